/**
 * Offline loader for recorded telemetry (.jsonl): one header line, then
 * record lines interleaved with the inputs that produced them. Recorded
 * snapshots carry the same per-arm fields the live stream sends, so the
 * result plugs straight into the session store and draw code.
 */
import type { ArmState, InfoPayload, StatePayload } from "./protocol.js";

export interface ReplayFile {
  info: InfoPayload;
  states: StatePayload[];
  inputs: Array<Record<string, unknown>>;
  fault: Record<string, unknown> | null;
}

export function parseTelemetry(text: string): ReplayFile {
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error("empty telemetry file");
  }
  let info: InfoPayload | null = null;
  const states: StatePayload[] = [];
  const inputs: Array<Record<string, unknown>> = [];
  let fault: Record<string, unknown> | null = null;

  lines.forEach((line, i) => {
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(line) as Record<string, unknown>;
    } catch {
      throw new Error(`line ${i + 1}: not valid JSON`);
    }
    const kind = obj["kind"];
    if (kind === "header") {
      if (i !== 0) throw new Error(`line ${i + 1}: header after first line`);
      const config = obj["config"] as Record<string, unknown>;
      const sim = config["sim"] as { dt: number; duration: number; dof: number };
      info = {
        schema_version: obj["schema_version"] as number,
        dt: sim.dt,
        dof: sim.dof,
        n_ticks: Math.floor(sim.duration / sim.dt + 1e-9),
        decimation: 1,
        owner: false, // a recording accepts no input
        config,
      };
    } else if (kind === "record") {
      if (info === null) throw new Error(`line ${i + 1}: record before header`);
      states.push({
        tick: obj["tick"] as number,
        time: obj["time"] as number,
        frame: states.length, // recordings are gapless by construction
        arms: obj["arms"] as ArmState[],
        objects: (obj["objects"] as StatePayload["objects"]) ?? [],
        fingers: (obj["fingers"] as StatePayload["fingers"]) ?? [],
      });
    } else if (kind === "input") {
      inputs.push(obj);
    } else if (kind === "fault") {
      fault = obj;
    } else {
      throw new Error(`line ${i + 1}: unknown line kind ${String(kind)}`);
    }
  });

  if (info === null) throw new Error("telemetry file has no header line");
  return { info, states, inputs, fault };
}
