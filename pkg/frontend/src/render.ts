/**
 * Draw code shared by the live view and the replay view. Everything here
 * reads the session store only; the same function renders both, so a
 * loaded recording looks exactly like the live session it came from.
 *
 * Drawing goes through Draw2D, the small slice of CanvasRenderingContext2D
 * actually used, which keeps the renderer testable off-browser.
 */
import type { StatePayload } from "./protocol.js";
import type { SessionStore } from "./store.js";

export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  font: string;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Viewport {
  width: number;
  height: number;
}

/** Workspace metres -> pixels; x right, y up, origin centred. */
export function worldToScreen(
  [x, y]: [number, number],
  vp: Viewport,
  scale = 900,
): [number, number] {
  return [vp.width / 2 + x * scale, vp.height * 0.55 - y * scale];
}

const CONTACT_FORCE_EPS = 1e-3;
const FORCE_BAR_FULL_SCALE = 20; // N at full bar width

export function renderFrame(
  ctx: Draw2D,
  store: SessionStore,
  vp: Viewport,
  nowMs: number,
): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  const state = store.latest;
  if (state === null) {
    ctx.fillStyle = "#888";
    ctx.font = "14px sans-serif";
    ctx.fillText("no session", 12, 24);
    return;
  }
  drawWorkspace(ctx, store, state, vp);
  drawForceBars(ctx, state, vp);
  drawEnergySparkline(ctx, store, vp);
  drawStatusLine(ctx, store, state, vp);
  if (store.isStale(nowMs)) {
    ctx.fillStyle = "rgba(180, 30, 30, 0.85)";
    ctx.fillRect(0, 0, vp.width, 32);
    ctx.fillStyle = "#fff";
    ctx.font = "bold 15px sans-serif";
    ctx.fillText("STALE STREAM — input disabled", 12, 21);
  }
}

function pos2(p: number[]): [number, number] {
  return [p[0] ?? 0, p[1] ?? 0];
}

function drawWorkspace(
  ctx: Draw2D,
  store: SessionStore,
  state: StatePayload,
  vp: Viewport,
): void {
  // walls and goal region come from the recorded configuration
  const config = store.info?.config as
    | {
        environment?: {
          walls?: Array<{ axis: number; position: number; side: number }>;
        };
        success?: { target?: number[]; tolerance?: number[] };
      }
    | undefined;

  ctx.strokeStyle = "#555";
  ctx.lineWidth = 2;
  for (const wall of config?.environment?.walls ?? []) {
    ctx.beginPath();
    if (wall.axis === 0) {
      const [sx] = worldToScreen([wall.position, 0], vp);
      ctx.moveTo(sx, 0);
      ctx.lineTo(sx, vp.height);
    } else {
      const [, sy] = worldToScreen([0, wall.position], vp);
      ctx.moveTo(0, sy);
      ctx.lineTo(vp.width, sy);
    }
    ctx.stroke();
  }

  const goal = config?.success;
  if (goal?.target !== undefined) {
    const [gx, gy] = worldToScreen(pos2(goal.target), vp);
    const tol = goal.tolerance ?? [0.01];
    const r = Math.max(6, (tol[0] ?? 0.01) * 900);
    ctx.strokeStyle = "#2a8";
    ctx.beginPath();
    ctx.arc(gx, gy, r, 0, Math.PI * 2);
    ctx.stroke();
  }

  for (const arm of state.arms) {
    const [mx, my] = worldToScreen(pos2(arm.x_m), vp);
    const [sx, sy] = worldToScreen(pos2(arm.x_s), vp);
    // coupling line between the pair
    ctx.strokeStyle = "#bbb";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(mx, my);
    ctx.lineTo(sx, sy);
    ctx.stroke();
    // master: open circle; slave: filled
    ctx.strokeStyle = "#36c";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(mx, my, 7, 0, Math.PI * 2);
    ctx.stroke();
    ctx.fillStyle = inContact(arm.f_e) ? "#c33" : "#36c";
    ctx.beginPath();
    ctx.arc(sx, sy, 6, 0, Math.PI * 2);
    ctx.fill();
  }

  for (const obj of state.objects) {
    if (obj.x === undefined) continue;
    const [ox, oy] = worldToScreen(pos2(obj.x), vp);
    ctx.fillStyle = "#a80";
    ctx.fillRect(ox - 5, oy - 5, 10, 10);
  }
}

function inContact(f: number[]): boolean {
  return f.some((v) => Math.abs(v) > CONTACT_FORCE_EPS);
}

function drawForceBars(ctx: Draw2D, state: StatePayload, vp: Viewport): void {
  const x0 = 12;
  let y = vp.height - 96;
  const barW = Math.min(220, vp.width / 3);
  ctx.font = "11px sans-serif";
  for (const arm of state.arms) {
    const entries: Array<[string, number, string]> = [
      ["f_m", norm(arm.f_m_cmd), "#36c"],
      ["f_e", norm(arm.f_e), inContact(arm.f_e) ? "#c33" : "#888"],
    ];
    for (const [label, value, color] of entries) {
      ctx.fillStyle = "#444";
      ctx.fillText(`${arm.name} ${label} ${value.toFixed(2)} N`, x0, y - 2);
      ctx.strokeStyle = "#999";
      ctx.lineWidth = 1;
      ctx.strokeRect(x0, y, barW, 8);
      ctx.fillStyle = color;
      ctx.fillRect(x0, y, barW * Math.min(1, value / FORCE_BAR_FULL_SCALE), 8);
      y += 24;
    }
  }
  for (const [i, finger] of state.fingers.entries()) {
    ctx.fillStyle = "#444";
    ctx.fillText(`finger ${i} τ̂ ${finger.tau_est.toFixed(3)}`, x0, y - 2);
    ctx.strokeStyle = "#999";
    ctx.strokeRect(x0, y, barW, 8);
    ctx.fillStyle = finger.saturated ? "#c33" : "#a60";
    ctx.fillRect(x0, y, barW * Math.min(1, Math.abs(finger.tau_est)), 8);
    y += 24;
  }
}

function norm(v: number[]): number {
  return Math.hypot(...v);
}

function drawEnergySparkline(
  ctx: Draw2D,
  store: SessionStore,
  vp: Viewport,
): void {
  const points = store.history.toArray();
  if (points.length < 2) return;
  const w = Math.min(260, vp.width / 3);
  const h = 40;
  const x0 = vp.width - w - 12;
  const y0 = 16;
  const peak = Math.max(1e-9, ...points.map((p) => p.energy));
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  ctx.strokeRect(x0, y0, w, h);
  ctx.strokeStyle = "#383";
  ctx.beginPath();
  points.forEach((p, i) => {
    const px = x0 + (w * i) / (points.length - 1);
    const py = y0 + h - (h * p.energy) / peak;
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(`energy peak ${peak.toFixed(3)} J`, x0, y0 + h + 14);
}

function drawStatusLine(
  ctx: Draw2D,
  store: SessionStore,
  state: StatePayload,
  vp: Viewport,
): void {
  const arm = state.arms[0];
  const mode = store.acknowledgedMode ?? "?";
  const age = arm !== undefined ? arm.channel_ages.m2s_motion : 0;
  const dtMs = (store.info?.dt ?? 0.001) * 1000;
  ctx.fillStyle = "#222";
  ctx.font = "12px sans-serif";
  ctx.fillText(
    `t=${state.time.toFixed(3)} s  mode=${mode}  link age=${(age * dtMs).toFixed(0)} ms  ` +
      `dropped=${store.droppedFrames}  [${store.status}]`,
    12,
    vp.height - 8,
  );
}
