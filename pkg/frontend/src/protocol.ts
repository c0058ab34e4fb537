// Wire types for the verifide session protocol (NDJSON over a WebSocket
// bridge; one JSON object per frame). Spans are 0-based, end-exclusive.

export interface Span {
  startLine: number;
  startCol: number;
  endLine: number;
  endCol: number;
}

export type WireValue = number | boolean | number[];

// ── client → server ──────────────────────────────────────────────

export interface UpdateMessage {
  type: "update";
  id: number;
  text: string;
  editedLines: number[];
  atMs: number;
}

export interface HoverMessage {
  type: "hover";
  id: number;
  line: number;
  col: number;
}

export interface SelectErrorMessage {
  type: "selectError";
  id: number;
  errorId: string;
}

export interface SelectStateMessage {
  type: "selectState";
  id: number;
  errorId: string;
  stateIndex: number;
  previousIndex: number | null;
}

export interface TokensMessage {
  type: "tokens";
  id: number;
}

export type ClientMessage =
  | UpdateMessage
  | HoverMessage
  | SelectErrorMessage
  | SelectStateMessage
  | TokensMessage;

// ── server → client ──────────────────────────────────────────────

export interface AckMessage {
  type: "ack";
  id: number;
  snapshotId: number;
}

export type MarginStateName = "idle" | "edited" | "verifying";

export interface MarginsMessage {
  type: "margins";
  lines: { line: number; state: MarginStateName }[];
}

export interface WireDiagnostic {
  span: Span;
  severity: string;
  message: string;
}

export interface ResolutionDiagnosticsMessage {
  type: "resolutionDiagnostics";
  snapshotId: number;
  items: WireDiagnostic[];
}

export interface WireError {
  errorId: string;
  span: Span;
  message: string;
  relatedSpans: Span[];
  traceLength: number;
}

export interface UnitResultMessage {
  type: "unitResult";
  snapshotId: number;
  entity: { name: string; kind: string };
  obligation: string;
  verdict: "Verified" | "Failed" | "Timeout";
  fromCache: boolean;
  errors: WireError[];
}

export interface VerifiedMessage {
  type: "verified";
  snapshotId: number;
}

export interface HoverResultMessage {
  type: "hoverResult";
  id: number;
  text: string | null;
}

export interface TraceMessage {
  type: "trace";
  id: number;
  states: { line: number; col: number }[];
}

export interface StateValuesMessage {
  type: "stateValues";
  id: number;
  values: { name: string; value: WireValue; previous: WireValue | null }[];
}

export interface TokensResultMessage {
  type: "tokensResult";
  id: number;
  tokens: { span: Span; kind: string }[];
}

export interface ErrorMessage {
  type: "error";
  id: number | null;
  reason: string;
}

export type ServerMessage =
  | AckMessage
  | MarginsMessage
  | ResolutionDiagnosticsMessage
  | UnitResultMessage
  | VerifiedMessage
  | HoverResultMessage
  | TraceMessage
  | StateValuesMessage
  | TokensResultMessage
  | ErrorMessage;

export function formatValue(value: WireValue | null): string {
  if (value === null) return "";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") return String(value);
  return `[${value.join(", ")}]`;
}
