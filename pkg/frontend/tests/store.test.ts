import { describe, expect, it } from "vitest";

import type { ArmState, ServerMessage, StatePayload } from "../src/protocol.js";
import { HISTORY_CAPACITY, STALE_AFTER_MS, SessionStore } from "../src/store.js";

function arm(overrides: Partial<ArmState> = {}): ArmState {
  return {
    name: "left",
    mode: "position_force",
    x_m: [0],
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
    ...overrides,
  };
}

function stateMsg(frame: number, overrides: Partial<StatePayload> = {}): ServerMessage {
  return {
    type: "state",
    session_id: "s",
    seq: frame,
    payload: {
      tick: frame * 17,
      time: frame * 0.017,
      frame,
      arms: [arm()],
      objects: [],
      fingers: [],
      ...overrides,
    },
  };
}

const infoMsg: ServerMessage = {
  type: "info",
  session_id: "s",
  seq: 0,
  payload: {
    schema_version: 1,
    dt: 0.001,
    dof: 1,
    n_ticks: 1000,
    decimation: 17,
    owner: true,
    config: {},
  },
};

describe("SessionStore", () => {
  it("tracks acknowledged mode from state frames, never optimistically", () => {
    const store = new SessionStore();
    store.apply(infoMsg, 0);
    expect(store.acknowledgedMode).toBeNull();
    store.apply(stateMsg(0), 1);
    expect(store.acknowledgedMode).toBe("position_force");
    store.apply(stateMsg(1, { arms: [arm({ mode: "four_channel" })] }), 2);
    expect(store.acknowledgedMode).toBe("four_channel");
  });

  it("counts gaps in the gapless frame counter", () => {
    const store = new SessionStore();
    store.apply(stateMsg(0), 0);
    store.apply(stateMsg(1), 1);
    store.apply(stateMsg(4), 2); // frames 2,3 lost
    expect(store.droppedFrames).toBe(2);
  });

  it("goes stale after a quiet second and disables input", () => {
    const store = new SessionStore();
    store.apply(infoMsg, 0);
    store.apply(stateMsg(0), 1000);
    expect(store.isStale(1500)).toBe(false);
    expect(store.canSendInput(1500)).toBe(true);
    expect(store.isStale(1000 + STALE_AFTER_MS + 1)).toBe(true);
    expect(store.canSendInput(1000 + STALE_AFTER_MS + 1)).toBe(false);
  });

  it("non-owners cannot send input", () => {
    const store = new SessionStore();
    store.apply(
      { ...infoMsg, payload: { ...infoMsg.payload, owner: false } } as ServerMessage,
      0,
    );
    store.apply(stateMsg(0), 1);
    expect(store.canSendInput(2)).toBe(false);
  });

  it("history ring never exceeds capacity", () => {
    const store = new SessionStore();
    for (let i = 0; i < HISTORY_CAPACITY + 50; i++) store.apply(stateMsg(i), i);
    expect(store.history.length).toBe(HISTORY_CAPACITY);
  });

  it("records faults without touching the last good state", () => {
    const store = new SessionStore();
    store.apply(stateMsg(0), 0);
    store.apply(
      { type: "fault", session_id: "s", seq: 9, payload: { reason: "read-only client" } },
      1,
    );
    expect(store.lastFault?.reason).toBe("read-only client");
    expect(store.latest?.frame).toBe(0);
  });

  it("outbound sequence numbers strictly increase", () => {
    const store = new SessionStore();
    const seqs = [store.nextOutSeq(), store.nextOutSeq(), store.nextOutSeq()];
    expect(seqs).toEqual([0, 1, 2]);
  });

  it("replay load populates the same fields as the live path", () => {
    const store = new SessionStore();
    const states = [0, 1, 2].map((f) => (stateMsg(f).type === "state" ? (stateMsg(f) as Extract<ServerMessage, { type: "state" }>).payload : null)!) as StatePayload[];
    store.loadReplay(infoMsg.payload as never, states);
    expect(store.status).toBe("replay");
    expect(store.latest?.frame).toBe(2);
    expect(store.history.length).toBe(3);
    expect(store.acknowledgedMode).toBe("position_force");
    expect(store.canSendInput(0)).toBe(false); // a recording takes no input
  });
});
