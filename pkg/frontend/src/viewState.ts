// Pure view-state fold over the session's message log.
//
// Both directions pass through `apply`: client sends register pending
// requests (so a later `trace` or `stateValues` response knows which error
// it belongs to), server messages update the visible state. Messages that
// carry a snapshotId older than the newest one already seen never mutate
// anything.

import type {
  ClientMessage, MarginStateName, ServerMessage, Span, WireDiagnostic,
  WireError, WireValue,
} from "./protocol.js";

export interface VariableRow {
  name: string;
  value: WireValue;
  previous: WireValue | null;
}

export interface RedDot extends WireError {
  snapshotId: number;
  entity: string;
  unitMessage: string;
}

export interface TokenSpan {
  span: Span;
  kind: string;
}

type PendingRequest =
  | { kind: "selectError"; errorId: string }
  | { kind: "selectState"; errorId: string; stateIndex: number; previousIndex: number | null }
  | { kind: "update" }
  | { kind: "hover" }
  | { kind: "tokens" };

export interface ViewState {
  bufferText: string;
  connection: "connecting" | "open" | "closed";
  notice: string | null;
  latestSnapshotId: number | null;
  verifiedSnapshotId: number | null;
  tokens: TokenSpan[];
  margins: Record<number, MarginStateName>;
  diagnostics: WireDiagnostic[];
  diagnosticsSnapshotId: number | null;
  errors: RedDot[];
  resultsSnapshotId: number | null;
  selectedError: string | null;
  traceDots: { line: number; col: number }[];
  selectedStateIndex: number | null;
  previousStateIndex: number | null;
  variablePane: VariableRow[];
  hoverText: string | null;
  pending: Record<number, PendingRequest>;
}

export function initialViewState(): ViewState {
  return {
    bufferText: "",
    connection: "connecting",
    notice: null,
    latestSnapshotId: null,
    verifiedSnapshotId: null,
    tokens: [],
    margins: {},
    diagnostics: [],
    diagnosticsSnapshotId: null,
    errors: [],
    resultsSnapshotId: null,
    selectedError: null,
    traceDots: [],
    selectedStateIndex: null,
    previousStateIndex: null,
    variablePane: [],
    hoverText: null,
    pending: {},
  };
}

export function applyClient(state: ViewState, msg: ClientMessage): ViewState {
  const pending = { ...state.pending };
  switch (msg.type) {
    case "update":
      pending[msg.id] = { kind: "update" };
      // optimistic: edited lines show dark-orange before the round trip
      const margins = { ...state.margins };
      for (const line of msg.editedLines) margins[line] = "edited";
      return { ...state, pending, bufferText: msg.text, margins };
    case "selectError":
      pending[msg.id] = { kind: "selectError", errorId: msg.errorId };
      return { ...state, pending };
    case "selectState":
      pending[msg.id] = {
        kind: "selectState", errorId: msg.errorId,
        stateIndex: msg.stateIndex, previousIndex: msg.previousIndex,
      };
      return { ...state, pending };
    case "hover":
      pending[msg.id] = { kind: "hover" };
      return { ...state, pending };
    case "tokens":
      pending[msg.id] = { kind: "tokens" };
      return { ...state, pending };
  }
}

function takePending(state: ViewState, id: number | null):
    [PendingRequest | undefined, Record<number, PendingRequest>] {
  if (id === null || !(id in state.pending)) return [undefined, state.pending];
  const pending = { ...state.pending };
  const entry = pending[id];
  delete pending[id];
  return [entry, pending];
}

function clearSelection(state: ViewState): ViewState {
  return {
    ...state,
    selectedError: null,
    traceDots: [],
    selectedStateIndex: null,
    previousStateIndex: null,
    variablePane: [],
  };
}

export function applyServer(state: ViewState, msg: ServerMessage): ViewState {
  switch (msg.type) {
    case "ack": {
      const [, pending] = takePending(state, msg.id);
      const latest = Math.max(state.latestSnapshotId ?? -1, msg.snapshotId);
      return { ...state, pending, latestSnapshotId: latest };
    }
    case "margins": {
      const margins: Record<number, MarginStateName> = {};
      for (const entry of msg.lines) {
        if (entry.state !== "idle") margins[entry.line] = entry.state;
      }
      return { ...state, margins };
    }
    case "resolutionDiagnostics": {
      if (msg.snapshotId < (state.diagnosticsSnapshotId ?? -1)) return state;
      return {
        ...state,
        diagnostics: msg.items,
        diagnosticsSnapshotId: msg.snapshotId,
        latestSnapshotId: Math.max(state.latestSnapshotId ?? -1, msg.snapshotId),
      };
    }
    case "unitResult": {
      if (msg.snapshotId < (state.resultsSnapshotId ?? -1)) return state;
      let next = state;
      if (msg.snapshotId > (state.resultsSnapshotId ?? -1)) {
        // a newer snapshot started reporting: older red dots are stale
        next = clearSelection({ ...state, errors: [], resultsSnapshotId: msg.snapshotId });
      }
      const dots = msg.errors.map((e) => ({
        ...e,
        snapshotId: msg.snapshotId,
        entity: `${msg.entity.kind} ${msg.entity.name}`,
        unitMessage: e.message,
      }));
      return { ...next, errors: [...next.errors, ...dots] };
    }
    case "verified": {
      if (msg.snapshotId < (state.verifiedSnapshotId ?? -1)) return state;
      return { ...state, verifiedSnapshotId: msg.snapshotId };
    }
    case "hoverResult": {
      const [, pending] = takePending(state, msg.id);
      return { ...state, pending, hoverText: msg.text };
    }
    case "trace": {
      const [request, pending] = takePending(state, msg.id);
      if (request === undefined || request.kind !== "selectError") {
        return { ...state, pending };
      }
      // by default the last state, where the error was detected, is selected
      return {
        ...state,
        pending,
        selectedError: request.errorId,
        traceDots: msg.states,
        selectedStateIndex: msg.states.length - 1,
        previousStateIndex: null,
      };
    }
    case "stateValues": {
      const [request, pending] = takePending(state, msg.id);
      if (request === undefined || request.kind !== "selectState") {
        return { ...state, pending };
      }
      return {
        ...state,
        pending,
        selectedError: request.errorId,
        selectedStateIndex: request.stateIndex,
        previousStateIndex: request.previousIndex,
        variablePane: msg.values,
      };
    }
    case "tokensResult": {
      const [, pending] = takePending(state, msg.id);
      return { ...state, pending, tokens: msg.tokens };
    }
    case "error": {
      const [request, pending] = takePending(state, msg.id);
      if (msg.reason === "stale-error") {
        return clearSelection({
          ...state, pending,
          notice: "that error is stale; the buffer has been re-verified",
        });
      }
      void request;
      return { ...state, pending, notice: `server error: ${msg.reason}` };
    }
  }
}

// Pure decoration model consumed by the DOM layer (and by tests).
export interface Decorations {
  marginByLine: Record<number, MarginStateName>;
  squiggles: Span[];
  redDotLines: number[];
  blueDots: { line: number; col: number; index: number; selected: boolean }[];
  paneRows: { name: string; value: string; previous: string }[];
}

export function computeDecorations(state: ViewState): Decorations {
  const redDotLines = [...new Set(state.errors.map((e) => e.span.startLine))]
    .sort((a, b) => a - b);
  const blueDots = state.traceDots.map((dot, index) => ({
    line: dot.line,
    col: dot.col,
    index,
    selected: index === state.selectedStateIndex,
  }));
  const paneRows = state.variablePane.map((row) => ({
    name: row.name,
    value: format(row.value),
    previous: row.previous === null ? "" : format(row.previous),
  }));
  return {
    marginByLine: state.margins,
    squiggles: [
      ...state.diagnostics.map((d) => d.span),
      ...state.errors.map((e) => e.span),
    ],
    redDotLines,
    blueDots,
    paneRows,
  };
}

function format(value: WireValue): string {
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") return String(value);
  return `[${value.join(", ")}]`;
}
