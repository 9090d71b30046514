import { describe, expect, it } from "vitest";

import { InputCoalescer } from "../src/input.js";

function makeCoalescer() {
  let seq = 0;
  return new InputCoalescer(() => seq++);
}

describe("InputCoalescer", () => {
  it("sends a first drag sample immediately", () => {
    const c = makeCoalescer();
    const out = c.drag([0.1], 0, 0);
    expect(out).not.toBeNull();
    expect(out!.message).toEqual({
      type: "master_input",
      payload: { arm: 0, target: [0.1] },
    });
  });

  it("dead-zones a zero-movement drag", () => {
    const c = makeCoalescer();
    c.drag([0.1, 0.2], 0, 0);
    expect(c.drag([0.1, 0.2], 0, 100)).toBeNull();
  });

  it("rate-limits to at most ~60 Hz, keeping the newest sample", () => {
    const c = makeCoalescer();
    expect(c.drag([0.0], 0, 0)).not.toBeNull();
    expect(c.drag([0.1], 0, 5)).toBeNull(); // inside the interval
    expect(c.drag([0.2], 0, 10)).toBeNull();
    const flushed = c.flush(0, 20);
    expect(flushed).not.toBeNull();
    expect(flushed!.message.type).toBe("master_input");
    expect(
      flushed!.message.type === "master_input" && flushed!.message.payload.target,
    ).toEqual([0.2]);
  });

  it("flush is a no-op with nothing pending", () => {
    const c = makeCoalescer();
    expect(c.flush(0, 1000)).toBeNull();
  });

  it("sequence numbers strictly increase across message kinds", () => {
    const c = makeCoalescer();
    const a = c.drag([0.1], 0, 0)!;
    const b = c.toggleMode("position_force", 0);
    const d = c.setDelay(50, 0);
    const e = c.drag([0.2], 0, 100)!;
    expect([a.clientSeq, b.clientSeq, d.clientSeq, e.clientSeq]).toEqual([0, 1, 2, 3]);
  });

  it("toggleMode flips between the two laws", () => {
    const c = makeCoalescer();
    expect(c.toggleMode("position_force", 0).message).toEqual({
      type: "set_mode",
      payload: { arm: 0, mode: "four_channel" },
    });
    expect(c.toggleMode("four_channel", 1).message).toEqual({
      type: "set_mode",
      payload: { arm: 1, mode: "position_force" },
    });
  });

  it("setDelay rounds and clamps to non-negative steps", () => {
    const c = makeCoalescer();
    expect(c.setDelay(49.6, 0).message).toEqual({
      type: "set_channel",
      payload: { arm: 0, delay_steps: 50 },
    });
    expect(c.setDelay(-3, 0).message).toEqual({
      type: "set_channel",
      payload: { arm: 0, delay_steps: 0 },
    });
  });
});
