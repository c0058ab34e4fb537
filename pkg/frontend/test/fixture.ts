// A transcript recorded from a live session service run: the buffer below
// was submitted, its body unit failed an assertion, the red dot was
// selected, then state 1 was selected with the error state as "previous".

import type { ServerMessage } from "../src/protocol.js";

export const FIXTURE_TEXT = [
  "method T(x: int)",
  "{",
  "  var y := 1;",
  "  y := y + 1;",
  "  assert y == 3;",
  "}",
  "",
].join("\n");

export const ACK: ServerMessage = { type: "ack", id: 1, snapshotId: 0 };

export const MARGINS_EDITED: ServerMessage = {
  type: "margins",
  lines: [0, 1, 2, 3, 4, 5].map((line) => ({ line, state: "edited" as const })),
};

export const MARGINS_VERIFYING: ServerMessage = {
  type: "margins",
  lines: [0, 1, 2, 3, 4, 5].map((line) => ({ line, state: "verifying" as const })),
};

export const MARGINS_CLEAR: ServerMessage = { type: "margins", lines: [] };

export const DIAGNOSTICS_CLEAN: ServerMessage = {
  type: "resolutionDiagnostics", snapshotId: 0, items: [],
};

export const UNIT_SPEC_OK: ServerMessage = {
  type: "unitResult", snapshotId: 0,
  entity: { name: "T", kind: "MethodSpec" }, obligation: "MethodSpecWF",
  verdict: "Verified", fromCache: false, errors: [],
};

export const UNIT_BODY_FAILED: ServerMessage = {
  type: "unitResult", snapshotId: 0,
  entity: { name: "T", kind: "MethodBody" }, obligation: "MethodBody",
  verdict: "Failed", fromCache: false,
  errors: [{
    errorId: "0:1",
    span: { startLine: 4, startCol: 2, endLine: 4, endCol: 16 },
    message: "assertion might not hold",
    relatedSpans: [],
    traceLength: 4,
  }],
};

export const VERIFIED: ServerMessage = { type: "verified", snapshotId: 0 };

export const TRACE_STATES = [
  { line: 0, col: 7 },
  { line: 2, col: 2 },
  { line: 3, col: 2 },
  { line: 4, col: 2 },
];

export const STATE_VALUES = [
  { name: "x", value: -3, previous: -3 },
  { name: "y", value: 1, previous: 2 },
];
