import { render } from "./render.js";
import { Session, webSocketTransport } from "./session.js";

const DEMO_TEXT = `method Fill(a: array<int>, start: int, v: int)
  requires 0 <= start
  requires start <= a.Length
  ensures forall i :: start <= i < a.Length ==> a[i] == v
  decreases a.Length - start
{
  if start < a.Length {
    var end := start;
    a[end] := v;
    Fill(a, end + 1, v);
  }
}
`;

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function main(): void {
  const dom = {
    editor: element<HTMLTextAreaElement>("editor"),
    highlight: element<HTMLElement>("highlight"),
    gutter: element<HTMLElement>("gutter"),
    statusBanner: element<HTMLElement>("status"),
    diagnosticsList: element<HTMLElement>("diagnostics"),
    variablePane: element<HTMLElement>("variables"),
    hoverBox: element<HTMLElement>("hover"),
  };

  const url = `ws://${location.host}/ws`;
  const session = new Session(url, webSocketTransport());
  session.subscribe((state) => render(state, dom, session));

  dom.editor.value = DEMO_TEXT;
  dom.editor.addEventListener("input", () => session.onEdit(dom.editor.value));
  dom.editor.addEventListener("mousemove", (event) => {
    const pos = caretPosition(dom.editor, event);
    if (pos) session.requestHover(pos.line, pos.col);
  });
  dom.editor.addEventListener("scroll", () => {
    dom.highlight.scrollTop = dom.editor.scrollTop;
    dom.gutter.scrollTop = dom.editor.scrollTop;
  });

  session.connect();
  // first snapshot: the demo buffer
  session.onEdit(DEMO_TEXT);
}

function caretPosition(editor: HTMLTextAreaElement,
                       event: MouseEvent): { line: number; col: number } | null {
  const style = getComputedStyle(editor);
  const lineHeight = parseFloat(style.lineHeight) || 18;
  const charWidth = 8.5; // monospace approximation
  const rect = editor.getBoundingClientRect();
  const line = Math.floor((event.clientY - rect.top + editor.scrollTop) / lineHeight);
  const col = Math.floor((event.clientX - rect.left) / charWidth);
  if (line < 0 || col < 0) return null;
  return { line, col };
}

main();
