import { describe, expect, it } from "vitest";

import type { ServerMessage } from "../src/protocol.js";
import {
  applyServer, computeDecorations, initialViewState, ViewState,
} from "../src/viewState.js";
import {
  ACK, DIAGNOSTICS_CLEAN, MARGINS_CLEAR, MARGINS_EDITED, MARGINS_VERIFYING,
  UNIT_BODY_FAILED, UNIT_SPEC_OK, VERIFIED,
} from "./fixture.js";

function fold(messages: ServerMessage[], start?: ViewState): ViewState {
  return messages.reduce(applyServer, start ?? initialViewState());
}

describe("server message fold", () => {
  it("margins replace wholesale and drop idle lines", () => {
    let state = fold([MARGINS_EDITED]);
    expect(state.margins[0]).toBe("edited");
    state = fold([MARGINS_VERIFYING], state);
    expect(state.margins[3]).toBe("verifying");
    state = fold([MARGINS_CLEAR], state);
    expect(Object.keys(state.margins)).toHaveLength(0);
  });

  it("unit results accumulate red dots for the reporting snapshot", () => {
    const state = fold([ACK, DIAGNOSTICS_CLEAN, UNIT_SPEC_OK, UNIT_BODY_FAILED,
                        VERIFIED]);
    expect(state.errors).toHaveLength(1);
    expect(state.errors[0].errorId).toBe("0:1");
    expect(state.errors[0].entity).toBe("MethodBody T");
    expect(state.verifiedSnapshotId).toBe(0);
    expect(computeDecorations(state).redDotLines).toEqual([4]);
  });

  it("replaying the fixture twice is deterministic", () => {
    const transcript = [MARGINS_EDITED, ACK, DIAGNOSTICS_CLEAN,
                        MARGINS_VERIFYING, UNIT_SPEC_OK, UNIT_BODY_FAILED,
                        VERIFIED, MARGINS_CLEAR];
    expect(fold(transcript)).toEqual(fold(transcript));
  });

  it("messages for superseded snapshots never mutate state", () => {
    const newer: ServerMessage = {
      type: "unitResult", snapshotId: 3,
      entity: { name: "T", kind: "MethodBody" }, obligation: "MethodBody",
      verdict: "Verified", fromCache: false, errors: [],
    };
    const withNewer = fold([ACK, UNIT_BODY_FAILED, newer]);
    expect(withNewer.errors).toHaveLength(0);       // old dots invalidated
    expect(withNewer.resultsSnapshotId).toBe(3);
    const stale = fold([UNIT_BODY_FAILED], withNewer);  // snapshot 0 again
    expect(stale).toEqual(withNewer);
    const staleDiag: ServerMessage = {
      type: "resolutionDiagnostics", snapshotId: 1,
      items: [{ span: { startLine: 0, startCol: 0, endLine: 0, endCol: 1 },
                severity: "error", message: "late" }],
    };
    const afterNewerDiag = fold(
      [{ type: "resolutionDiagnostics", snapshotId: 2, items: [] }, staleDiag]);
    expect(afterNewerDiag.diagnostics).toEqual([]);
  });

  it("a newer snapshot's results clear any active selection", () => {
    let state = fold([ACK, UNIT_BODY_FAILED]);
    state = { ...state, selectedError: "0:1",
              traceDots: [{ line: 0, col: 0 }], selectedStateIndex: 0,
              variablePane: [{ name: "x", value: 1, previous: null }] };
    const newer: ServerMessage = {
      type: "unitResult", snapshotId: 1,
      entity: { name: "T", kind: "MethodBody" }, obligation: "MethodBody",
      verdict: "Verified", fromCache: false, errors: [],
    };
    const cleared = applyServer(state, newer);
    expect(cleared.selectedError).toBeNull();
    expect(cleared.traceDots).toHaveLength(0);
    expect(cleared.variablePane).toHaveLength(0);
  });

  it("stale-error responses clear the selection and show a notice", () => {
    let state = fold([ACK, UNIT_BODY_FAILED]);
    state = { ...state, selectedError: "0:1",
              traceDots: [{ line: 1, col: 0 }], selectedStateIndex: 0 };
    const cleared = applyServer(state, { type: "error", id: 9,
                                         reason: "stale-error" });
    expect(cleared.selectedError).toBeNull();
    expect(cleared.traceDots).toHaveLength(0);
    expect(cleared.notice).toContain("stale");
  });

  it("trace dots exist only while an error is selected", () => {
    const states: ViewState[] = [];
    let state = initialViewState();
    for (const msg of [MARGINS_EDITED, ACK, DIAGNOSTICS_CLEAN, UNIT_SPEC_OK,
                       UNIT_BODY_FAILED, VERIFIED]) {
      state = applyServer(state, msg);
      states.push(state);
    }
    for (const s of states) {
      expect(s.traceDots.length > 0).toBe(s.selectedError !== null);
    }
  });
});
