import type { Draw2D } from "../src/render.js";

/** Records every draw call so tests can assert on what was drawn. */
export function recordingContext(): Draw2D & { calls: string[]; texts: string[] } {
  const calls: string[] = [];
  const texts: string[] = [];
  const record =
    (name: string) =>
    (...args: unknown[]) => {
      calls.push(name);
      if (name === "fillText") texts.push(String(args[0]));
    };
  return {
    calls,
    texts,
    fillStyle: "",
    strokeStyle: "",
    font: "",
    lineWidth: 1,
    clearRect: record("clearRect"),
    fillRect: record("fillRect"),
    strokeRect: record("strokeRect"),
    beginPath: record("beginPath"),
    moveTo: record("moveTo"),
    lineTo: record("lineTo"),
    arc: record("arc"),
    stroke: record("stroke"),
    fill: record("fill"),
    fillText: record("fillText"),
  };
}
