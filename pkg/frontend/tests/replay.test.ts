import { describe, expect, it } from "vitest";

import { parseTelemetry } from "../src/replay.js";

const HEADER = JSON.stringify({
  kind: "header",
  schema_version: 1,
  config: { sim: { dt: 0.001, duration: 0.003, seed: 1, dof: 1 }, arms: [] },
});

function record(tick: number): string {
  return JSON.stringify({
    kind: "record",
    tick,
    time: tick * 0.001,
    arms: [
      {
        name: "left",
        mode: "position_force",
        x_m: [0.01 * tick],
        v_m: [0],
        x_s: [0],
        v_s: [0],
        f_h: [0],
        f_e: [0],
        f_m_cmd: [0],
        f_s_cmd: [0],
        channel_ages: { m2s_motion: 1, m2s_force: 1, s2m_motion: 1, s2m_force: 1 },
        energy: 0,
        budget: { accumulated: 0, spent: 0 },
      },
    ],
  });
}

describe("parseTelemetry", () => {
  it("parses header, records, and interleaved inputs", () => {
    const input = JSON.stringify({
      kind: "input",
      tick: 1,
      type: "set_mode",
      payload: { arm: 0, mode: "four_channel" },
    });
    const file = [HEADER, record(0), input, record(1), record(2)].join("\n");
    const replay = parseTelemetry(file);
    expect(replay.info.dt).toBe(0.001);
    expect(replay.info.n_ticks).toBe(3);
    expect(replay.info.owner).toBe(false);
    expect(replay.states.map((s) => s.tick)).toEqual([0, 1, 2]);
    expect(replay.states.map((s) => s.frame)).toEqual([0, 1, 2]); // gapless
    expect(replay.inputs).toHaveLength(1);
    expect(replay.fault).toBeNull();
  });

  it("keeps a recorded fault", () => {
    const fault = JSON.stringify({ kind: "fault", module: "integrator", tick: 2 });
    const replay = parseTelemetry([HEADER, record(0), fault].join("\n"));
    expect(replay.fault).toMatchObject({ module: "integrator", tick: 2 });
  });

  it("rejects an empty file", () => {
    expect(() => parseTelemetry("")).toThrow(/empty/);
  });

  it("rejects records before the header", () => {
    expect(() => parseTelemetry(record(0))).toThrow(/before header/);
  });

  it("rejects unknown line kinds with the line number", () => {
    expect(() => parseTelemetry([HEADER, '{"kind":"wat"}'].join("\n"))).toThrow(
      /line 2/,
    );
  });

  it("rejects broken JSON with the line number", () => {
    expect(() => parseTelemetry([HEADER, "{nope"].join("\n"))).toThrow(/line 2/);
  });
});
