// DOM layer: paints a ViewState into the panel. Rendering is a function of
// the state alone; every call rebuilds the overlays from scratch.

import { formatValue } from "./protocol.js";
import type { Session } from "./session.js";
import { ViewState, computeDecorations } from "./viewState.js";

const TOKEN_CLASSES: Record<string, string> = {
  Keyword: "tok-keyword",
  Comment: "tok-comment",
  Number: "tok-number",
  StringLit: "tok-string",
  Error: "tok-error",
};

export interface PanelElements {
  editor: HTMLTextAreaElement;
  highlight: HTMLElement;
  gutter: HTMLElement;
  statusBanner: HTMLElement;
  diagnosticsList: HTMLElement;
  variablePane: HTMLElement;
  hoverBox: HTMLElement;
}

export function render(state: ViewState, dom: PanelElements, session: Session): void {
  const lines = state.bufferText.split("\n");
  const decorations = computeDecorations(state);

  dom.statusBanner.textContent = bannerText(state);
  dom.statusBanner.className = `banner banner-${state.connection}`;

  dom.highlight.replaceChildren(...renderHighlight(state, lines));
  dom.gutter.replaceChildren(
    ...lines.map((_, lineNo) => renderGutterLine(lineNo, decorations, state, session)));
  dom.diagnosticsList.replaceChildren(
    ...renderDiagnostics(state, session));
  dom.variablePane.replaceChildren(...renderVariablePane(state));
  dom.hoverBox.textContent = state.hoverText ?? "";
  dom.hoverBox.style.display = state.hoverText ? "block" : "none";
}

function bannerText(state: ViewState): string {
  if (state.connection === "closed") return "disconnected - retrying";
  if (state.connection === "connecting") return "connecting";
  if (state.notice) return state.notice;
  if (state.verifiedSnapshotId !== null
      && state.verifiedSnapshotId === state.latestSnapshotId) {
    return `snapshot ${state.verifiedSnapshotId} verified`;
  }
  return "verifying";
}

function renderHighlight(state: ViewState, lines: string[]): Node[] {
  // one <div> per line; token and squiggle overlays as nested spans
  const decorations = computeDecorations(state);
  return lines.map((text, lineNo) => {
    const div = document.createElement("div");
    div.className = "code-line";
    const tokensHere = state.tokens.filter(
      (t) => t.span.startLine === lineNo && t.span.endLine === lineNo);
    let col = 0;
    for (const token of tokensHere.sort((a, b) => a.span.startCol - b.span.startCol)) {
      if (token.span.startCol > col) {
        div.append(text.slice(col, token.span.startCol));
      }
      const span = document.createElement("span");
      span.className = TOKEN_CLASSES[token.kind] ?? "tok-plain";
      span.textContent = text.slice(token.span.startCol, token.span.endCol);
      div.append(span);
      col = token.span.endCol;
    }
    div.append(text.slice(col));
    if (decorations.squiggles.some((s) => s.startLine === lineNo)) {
      div.classList.add("squiggle-line");
    }
    return div;
  });
}

function renderGutterLine(lineNo: number, decorations: ReturnType<typeof computeDecorations>,
                          state: ViewState, session: Session): HTMLElement {
  const cell = document.createElement("div");
  cell.className = "gutter-line";
  const margin = decorations.marginByLine[lineNo];
  if (margin === "edited") cell.classList.add("margin-edited");
  if (margin === "verifying") cell.classList.add("margin-verifying");

  if (decorations.redDotLines.includes(lineNo)) {
    const dot = document.createElement("button");
    dot.className = "red-dot";
    dot.title = state.errors
      .filter((e) => e.span.startLine === lineNo)
      .map((e) => e.message).join("\n");
    const error = state.errors.find((e) => e.span.startLine === lineNo);
    if (error) {
      dot.onclick = () => session.onClickRedDot(error.errorId);
    }
    cell.append(dot);
  }
  for (const blue of decorations.blueDots.filter((d) => d.line === lineNo)) {
    const dot = document.createElement("button");
    dot.className = blue.selected ? "blue-dot selected" : "blue-dot";
    dot.onclick = () => session.onClickBlueDot(blue.index);
    cell.append(dot);
  }
  return cell;
}

function renderDiagnostics(state: ViewState, session: Session): Node[] {
  const rows: Node[] = [];
  for (const diag of state.diagnostics) {
    const row = document.createElement("div");
    row.className = "diag-row";
    row.textContent =
      `${diag.severity} [${diag.span.startLine}:${diag.span.startCol}] ${diag.message}`;
    rows.push(row);
  }
  for (const error of state.errors) {
    const row = document.createElement("div");
    row.className = "diag-row error-row";
    row.textContent =
      `error [${error.span.startLine}:${error.span.startCol}] ${error.message} (${error.entity})`;
    rows.push(row);
    for (const related of error.relatedSpans) {
      const item = document.createElement("div");
      item.className = "diag-row related-row";
      item.textContent = `  related: line ${related.startLine}`;
      // navigation: scroll the editor to the related span and flash it
      item.onclick = () => flashLine(related.startLine);
      rows.push(item);
    }
  }
  return rows;
}

function renderVariablePane(state: ViewState): Node[] {
  if (state.variablePane.length === 0) return [];
  const header = document.createElement("div");
  header.className = "pane-row pane-header";
  for (const title of ["Variable", "Value", "Previous"]) {
    const cell = document.createElement("span");
    cell.textContent = title;
    header.append(cell);
  }
  const rows: Node[] = [header];
  for (const row of state.variablePane) {
    const div = document.createElement("div");
    div.className = "pane-row";
    for (const text of [row.name, formatValue(row.value), formatValue(row.previous)]) {
      const cell = document.createElement("span");
      cell.textContent = text;
      div.append(cell);
    }
    rows.push(div);
  }
  return rows;
}

function flashLine(lineNo: number): void {
  const line = document.querySelectorAll(".code-line")[lineNo];
  if (!line) return;
  line.scrollIntoView({ block: "center" });
  line.classList.add("flash");
  setTimeout(() => line.classList.remove("flash"), 600);
}
