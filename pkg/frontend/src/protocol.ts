/**
 * Wire types for the live session WebSocket and the recorded telemetry
 * files. The UI never computes physics: everything it shows comes out of
 * these messages.
 */

export type BilateralMode = "position_force" | "four_channel";

export const CHANNEL_DIRECTIONS = [
  "m2s_motion",
  "m2s_force",
  "s2m_motion",
  "s2m_force",
] as const;
export type ChannelDirection = (typeof CHANNEL_DIRECTIONS)[number];

export interface ArmState {
  name: string;
  mode: BilateralMode;
  x_m: number[];
  v_m: number[];
  x_s: number[];
  v_s: number[];
  f_h: number[];
  f_e: number[];
  f_m_cmd: number[];
  f_s_cmd: number[];
  channel_ages: Record<ChannelDirection, number>;
  energy: number;
  budget: { accumulated: number; spent: number };
}

export interface FingerState {
  glove_angle: number;
  hand_angle: number;
  current: number;
  tau_est: number;
  rendered: number;
  saturated: boolean;
}

export interface ObjectState {
  name?: string;
  x?: number[];
  v?: number[];
  [key: string]: unknown;
}

/** One decimated simulation snapshot. `frame` is gapless per session. */
export interface StatePayload {
  tick: number;
  time: number;
  frame: number;
  arms: ArmState[];
  objects: ObjectState[];
  fingers: FingerState[];
}

export interface InfoPayload {
  schema_version: number;
  dt: number;
  dof: number;
  n_ticks: number;
  decimation: number;
  owner: boolean;
  config: Record<string, unknown>;
}

export interface FaultPayload {
  reason?: string;
  module?: string;
  tick?: number;
  message?: string;
}

export type ServerMessage =
  | { type: "info"; session_id: string; seq: number; payload: InfoPayload }
  | { type: "state"; session_id: string; seq: number; payload: StatePayload }
  | { type: "fault"; session_id: string; seq: number; payload: FaultPayload };

/** Inputs the owning client may send. */
export type ClientMessage =
  | { type: "master_input"; payload: { arm: number; target: number[] } }
  | { type: "set_mode"; payload: { arm: number; mode: BilateralMode } }
  | {
      type: "set_channel";
      payload: {
        arm: number;
        direction?: ChannelDirection;
        delay_steps?: number;
        jitter_steps_max?: number;
        drop_probability?: number;
      };
    }
  | { type: "start" }
  | { type: "stop" };

export function parseServerMessage(text: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new Error("unparseable server message");
  }
  if (typeof raw !== "object" || raw === null) {
    throw new Error("server message is not an object");
  }
  const msg = raw as { type?: unknown };
  if (msg.type !== "info" && msg.type !== "state" && msg.type !== "fault") {
    throw new Error(`unknown server message type ${String(msg.type)}`);
  }
  return raw as ServerMessage;
}
