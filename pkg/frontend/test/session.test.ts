import { describe, expect, it } from "vitest";

import type { ClientMessage } from "../src/protocol.js";
import { Session, Transport, TransportFactory } from "../src/session.js";
import { computeDecorations } from "../src/viewState.js";
import {
  ACK, DIAGNOSTICS_CLEAN, FIXTURE_TEXT, MARGINS_CLEAR, MARGINS_EDITED,
  MARGINS_VERIFYING, STATE_VALUES, TRACE_STATES, UNIT_BODY_FAILED,
  UNIT_SPEC_OK, VERIFIED,
} from "./fixture.js";

class FakeWire {
  sent: ClientMessage[] = [];
  closeHooks: (() => void)[] = [];
  openNow = true;
  handlers: Parameters<TransportFactory>[1] | null = null;
  connects = 0;

  factory(): TransportFactory {
    return (_url, handlers) => {
      this.connects += 1;
      this.handlers = handlers;
      if (this.openNow) queueMicrotask(() => handlers.onOpen());
      const transport: Transport = {
        send: (data) => this.sent.push(JSON.parse(data) as ClientMessage),
        close: () => handlers.onClose(),
      };
      return transport;
    };
  }

  push(message: unknown): void {
    this.handlers?.onMessage(JSON.stringify(message));
  }

  drop(): void {
    this.handlers?.onClose();
  }
}

function openSession(wire: FakeWire): Session {
  const pendingTimers: (() => void)[] = [];
  const session = new Session("ws://test/ws", wire.factory(),
                              () => 1234,
                              (fn) => { pendingTimers.push(fn); return 0 as never; });
  (session as unknown as { timers: (() => void)[] }).timers = pendingTimers;
  session.connect();
  wire.handlers?.onOpen();
  return session;
}

describe("acceptance: fixture replay and click interactions", () => {
  it("builds the red dot, blue dots, selection, and variable pane", () => {
    const wire = new FakeWire();
    const session = openSession(wire);

    session.onEdit(FIXTURE_TEXT);
    const update = wire.sent[0];
    expect(update).toMatchObject({
      type: "update", text: FIXTURE_TEXT, atMs: 1234,
      editedLines: [0, 1, 2, 3, 4, 5],
    });
    // edited lines render dark-orange before any server round trip
    expect(session.state.margins[0]).toBe("edited");

    for (const msg of [MARGINS_EDITED, { ...ACK, id: (update as { id: number }).id },
                       DIAGNOSTICS_CLEAN, MARGINS_VERIFYING, UNIT_SPEC_OK,
                       UNIT_BODY_FAILED, VERIFIED, MARGINS_CLEAR]) {
      wire.push(msg);
    }
    const decorations = computeDecorations(session.state);
    expect(decorations.redDotLines).toEqual([4]);  // exactly one red dot
    expect(session.state.verifiedSnapshotId).toBe(0);

    // click the red dot: selectError goes out, trace response selects last
    session.onClickRedDot("0:1");
    const selectError = wire.sent.at(-1) as { type: string; id: number; errorId: string };
    expect(selectError).toMatchObject({ type: "selectError", errorId: "0:1" });
    wire.push({ type: "trace", id: selectError.id, states: TRACE_STATES });

    expect(session.state.traceDots).toHaveLength(4);
    expect(session.state.selectedError).toBe("0:1");
    expect(session.state.selectedStateIndex).toBe(3);  // last state by default

    // the session fetches the default state's values automatically
    const autoFetch = wire.sent.at(-1) as {
      type: string; id: number; stateIndex: number; previousIndex: number | null };
    expect(autoFetch).toMatchObject({
      type: "selectState", errorId: "0:1", stateIndex: 3, previousIndex: null });
    wire.push({ type: "stateValues", id: autoFetch.id, values: [
      { name: "x", value: -3, previous: null },
      { name: "y", value: 2, previous: null },
    ] });
    expect(session.state.variablePane.map((r) => r.name)).toEqual(["x", "y"]);

    // click an earlier blue dot: previousIndex = previously selected state
    session.onClickBlueDot(1);
    const selectState = wire.sent.at(-1) as { type: string; id: number };
    expect(selectState).toMatchObject({
      type: "selectState", errorId: "0:1", stateIndex: 1, previousIndex: 3 });
    wire.push({ type: "stateValues", id: selectState.id, values: STATE_VALUES });

    // Value/Previous pane matches the transcript exactly
    expect(session.state.variablePane).toEqual(STATE_VALUES);
    const pane = computeDecorations(session.state).paneRows;
    expect(pane).toEqual([
      { name: "x", value: "-3", previous: "-3" },
      { name: "y", value: "1", previous: "2" },
    ]);
    const dots = computeDecorations(session.state).blueDots;
    expect(dots.filter((d) => d.selected).map((d) => d.index)).toEqual([1]);
  });

  it("clicking a blue dot of a stale error clears the selection", () => {
    const wire = new FakeWire();
    const session = openSession(wire);
    session.onEdit(FIXTURE_TEXT);
    wire.push({ ...ACK, id: (wire.sent[0] as { id: number }).id });
    wire.push(UNIT_BODY_FAILED);
    session.onClickRedDot("0:1");
    const selectError = wire.sent.at(-1) as { id: number };
    wire.push({ type: "trace", id: selectError.id, states: TRACE_STATES });
    expect(session.state.selectedError).toBe("0:1");
    session.onClickBlueDot(0);
    const selectState = wire.sent.at(-1) as { id: number };
    wire.push({ type: "error", id: selectState.id, reason: "stale-error" });
    expect(session.state.selectedError).toBeNull();
    expect(session.state.traceDots).toHaveLength(0);
    expect(session.state.notice).toContain("stale");
  });

  it("reconnect resends the whole buffer as edited", () => {
    const wire = new FakeWire();
    const session = openSession(wire);
    session.onEdit("method M() { }\n");
    wire.sent.length = 0;
    wire.drop();
    expect(session.state.connection).toBe("closed");
    const timers = (session as unknown as { timers: (() => void)[] }).timers;
    expect(timers).toHaveLength(1);
    timers[0]();  // the scheduled reconnect
    wire.handlers?.onOpen();
    expect(wire.connects).toBe(2);
    const resent = wire.sent.find((m) => m.type === "update") as {
      text: string; editedLines: number[] };
    expect(resent.text).toBe("method M() { }\n");
    expect(resent.editedLines).toEqual([0, 1]);
    expect(session.state.connection).toBe("open");
  });
});
