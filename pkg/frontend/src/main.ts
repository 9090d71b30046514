/**
 * Browser entry point: wires the socket, the store, the canvas, and the
 * controls together. All state lives in the SessionStore; socket events
 * write into it and the render loop reads from it — nothing else talks.
 */
import { InputCoalescer } from "./input.js";
import { parseServerMessage } from "./protocol.js";
import type { ClientMessage } from "./protocol.js";
import { renderFrame } from "./render.js";
import { parseTelemetry } from "./replay.js";
import { SessionStore } from "./store.js";

const store = new SessionStore();
const coalescer = new InputCoalescer(() => store.nextOutSeq());
let socket: WebSocket | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d");
if (ctx === null) throw new Error("2d canvas not available");
const log = $<HTMLElement>("input-log");
const toast = $<HTMLElement>("toast");
const modeButton = $<HTMLButtonElement>("mode-toggle");
const delaySlider = $<HTMLInputElement>("delay-slider");
const delayLabel = $<HTMLElement>("delay-label");

function send(message: ClientMessage, clientSeq: number): void {
  if (socket === null || socket.readyState !== WebSocket.OPEN) return;
  socket.send(JSON.stringify(message));
  const line = document.createElement("div");
  line.textContent = `#${clientSeq} ${message.type} ${JSON.stringify(
    "payload" in message ? message.payload : {},
  )}`;
  log.prepend(line);
  while (log.childElementCount > 50) log.lastElementChild?.remove();
}

function showToast(text: string): void {
  toast.textContent = text;
  toast.style.display = "block";
  setTimeout(() => (toast.style.display = "none"), 4000);
}

$<HTMLButtonElement>("connect").addEventListener("click", () => {
  const url = $<HTMLInputElement>("ws-url").value;
  socket?.close();
  store.reset();
  socket = new WebSocket(url);
  socket.onmessage = (ev) => {
    const msg = parseServerMessage(String(ev.data));
    store.apply(msg, performance.now());
    if (msg.type === "fault") {
      // widgets show acknowledged values only, so a rejected input needs
      // no rollback — just tell the operator why nothing happened
      showToast(`service fault: ${msg.payload.reason ?? "simulation fault"}`);
    }
  };
  socket.onclose = () => {
    store.status = "disconnected";
  };
});

// --- pointer drag -> master_input --------------------------------------------

let dragging = false;
canvas.addEventListener("pointerdown", () => (dragging = true));
window.addEventListener("pointerup", () => (dragging = false));
canvas.addEventListener("pointermove", (ev) => {
  if (!dragging || !store.canSendInput(performance.now())) return;
  const rect = canvas.getBoundingClientRect();
  const scale = 900;
  const x = (ev.clientX - rect.left - canvas.width / 2) / scale;
  const y = (canvas.height * 0.55 - (ev.clientY - rect.top)) / scale;
  const dof = store.info?.dof ?? 1;
  const target = dof >= 2 ? [x, y] : [x];
  const out = coalescer.drag(target, 0, performance.now());
  if (out !== null) send(out.message, out.clientSeq);
});

// --- widgets ------------------------------------------------------------------

modeButton.addEventListener("click", () => {
  if (!store.canSendInput(performance.now())) return;
  const current = store.acknowledgedMode ?? "position_force";
  const out = coalescer.toggleMode(current, 0);
  send(out.message, out.clientSeq);
});

delaySlider.addEventListener("change", () => {
  if (!store.canSendInput(performance.now())) return;
  const out = coalescer.setDelay(Number(delaySlider.value), 0);
  send(out.message, out.clientSeq);
});

// --- replay -------------------------------------------------------------------

$<HTMLInputElement>("replay-file").addEventListener("change", async (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0];
  if (file === undefined) return;
  const replay = parseTelemetry(await file.text());
  socket?.close();
  store.loadReplay(replay.info, replay.states);
  showToast(`loaded ${replay.states.length} frames`);
});

// --- render loop ----------------------------------------------------------------

function frame(): void {
  const now = performance.now();
  const pending = coalescer.flush(0, now);
  if (pending !== null && store.canSendInput(now)) {
    send(pending.message, pending.clientSeq);
  }
  renderFrame(ctx!, store, { width: canvas.width, height: canvas.height }, now);
  modeButton.textContent = `mode: ${store.acknowledgedMode ?? "—"}`;
  const dtMs = (store.info?.dt ?? 0.001) * 1000;
  const age = store.latest?.arms[0]?.channel_ages.m2s_motion ?? 0;
  delayLabel.textContent = `link age ${(age * dtMs).toFixed(0)} ms`;
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
