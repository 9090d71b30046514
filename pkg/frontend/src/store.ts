/**
 * Session-state store: the single place socket events and the render loop
 * meet. Holds only what came out of server messages — no client physics,
 * and no optimistic display: `acknowledgedMode` is whatever the last
 * state frame reported, never what the user clicked.
 */
import type {
  BilateralMode,
  FaultPayload,
  InfoPayload,
  ServerMessage,
  StatePayload,
} from "./protocol.js";
import { RingBuffer } from "./ring.js";

export const STALE_AFTER_MS = 1000;
export const HISTORY_CAPACITY = 600;

export type ConnectionStatus = "disconnected" | "connected" | "replay";

export interface HistoryPoint {
  time: number;
  x_m: number;
  x_s: number;
  f_m: number;
  f_e: number;
  energy: number;
}

export class SessionStore {
  status: ConnectionStatus = "disconnected";
  info: InfoPayload | null = null;
  latest: StatePayload | null = null;
  acknowledgedMode: BilateralMode | null = null;
  lastFault: FaultPayload | null = null;
  /** Wall-clock ms of the last state frame (for staleness). */
  lastStateAt = -Infinity;
  /** Detected gaps in the gapless `frame` counter (0 on a healthy link). */
  droppedFrames = 0;
  readonly history = new RingBuffer<HistoryPoint>(HISTORY_CAPACITY);
  private expectedFrame: number | null = null;
  private outSeq = 0;

  /** Strictly increasing sequence for outbound messages; never reused. */
  nextOutSeq(): number {
    return this.outSeq++;
  }

  apply(msg: ServerMessage, nowMs: number): void {
    switch (msg.type) {
      case "info":
        this.info = msg.payload;
        this.status = "connected";
        break;
      case "state":
        this.applyState(msg.payload, nowMs);
        break;
      case "fault":
        this.lastFault = msg.payload;
        break;
    }
  }

  private applyState(state: StatePayload, nowMs: number): void {
    if (this.expectedFrame !== null && state.frame !== this.expectedFrame) {
      this.droppedFrames += state.frame - this.expectedFrame;
    }
    this.expectedFrame = state.frame + 1;
    this.latest = state;
    this.lastStateAt = nowMs;
    const arm = state.arms[0];
    if (arm !== undefined) {
      this.acknowledgedMode = arm.mode;
      this.history.push({
        time: state.time,
        x_m: arm.x_m[0] ?? 0,
        x_s: arm.x_s[0] ?? 0,
        f_m: arm.f_m_cmd[0] ?? 0,
        f_e: arm.f_e[0] ?? 0,
        energy: arm.energy,
      });
    }
  }

  /** True when the stream went quiet: banner on, inputs off. */
  isStale(nowMs: number): boolean {
    return (
      this.status === "connected" && nowMs - this.lastStateAt > STALE_AFTER_MS
    );
  }

  /** Inputs are accepted only on a live, fresh, owned connection. */
  canSendInput(nowMs: number): boolean {
    return (
      this.status === "connected" &&
      this.info !== null &&
      this.info.owner &&
      !this.isStale(nowMs)
    );
  }

  /** Load a pre-recorded sequence of snapshots for offline viewing. */
  loadReplay(info: InfoPayload, states: StatePayload[]): void {
    this.reset();
    this.status = "replay";
    this.info = info;
    for (const s of states) {
      // replay files are gapless by construction; reuse the live path so
      // the replay view and the live view share every line of state code
      this.applyState(s, 0);
    }
  }

  reset(): void {
    this.status = "disconnected";
    this.info = null;
    this.latest = null;
    this.acknowledgedMode = null;
    this.lastFault = null;
    this.lastStateAt = -Infinity;
    this.droppedFrames = 0;
    this.expectedFrame = null;
    this.history.clear();
  }
}
