/**
 * Pointer-to-message plumbing: coalesces drag events to at most one
 * master_input per send interval, drops zero-length drags, and hands out
 * strictly increasing client sequence numbers so nothing can reorder.
 */
import type { ClientMessage } from "./protocol.js";

export const MAX_SEND_HZ = 60;

export interface SequencedMessage {
  clientSeq: number;
  message: ClientMessage;
}

export class InputCoalescer {
  private lastSentAt = -Infinity;
  private lastTarget: number[] | null = null;
  private pending: number[] | null = null;

  constructor(
    private readonly nextSeq: () => number,
    private readonly minIntervalMs: number = 1000 / MAX_SEND_HZ,
  ) {}

  /**
   * Register a drag sample; returns the message to send now, or null when
   * the sample was coalesced (rate limit) or dead-zoned (no movement).
   */
  drag(target: number[], arm: number, nowMs: number): SequencedMessage | null {
    if (this.lastTarget !== null && sameTarget(this.lastTarget, target)) {
      return null; // dead-zone: a drag of zero pixels sends nothing
    }
    if (nowMs - this.lastSentAt < this.minIntervalMs) {
      this.pending = target.slice();
      return null;
    }
    return this.emit(target, arm, nowMs);
  }

  /** Send the last coalesced sample once the rate limit allows. */
  flush(arm: number, nowMs: number): SequencedMessage | null {
    if (this.pending === null || nowMs - this.lastSentAt < this.minIntervalMs) {
      return null;
    }
    const target = this.pending;
    this.pending = null;
    if (this.lastTarget !== null && sameTarget(this.lastTarget, target)) {
      return null;
    }
    return this.emit(target, arm, nowMs);
  }

  toggleMode(
    current: "position_force" | "four_channel",
    arm: number,
  ): SequencedMessage {
    const mode =
      current === "position_force" ? "four_channel" : "position_force";
    return { clientSeq: this.nextSeq(), message: { type: "set_mode", payload: { arm, mode } } };
  }

  setDelay(delaySteps: number, arm: number): SequencedMessage {
    return {
      clientSeq: this.nextSeq(),
      message: {
        type: "set_channel",
        payload: { arm, delay_steps: Math.max(0, Math.round(delaySteps)) },
      },
    };
  }

  private emit(target: number[], arm: number, nowMs: number): SequencedMessage {
    this.lastSentAt = nowMs;
    this.lastTarget = target.slice();
    this.pending = null;
    return {
      clientSeq: this.nextSeq(),
      message: { type: "master_input", payload: { arm, target: target.slice() } },
    };
  }
}

function sameTarget(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}
