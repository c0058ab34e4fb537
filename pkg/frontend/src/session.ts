// Live session: owns the socket, the message log fold, and the user
// interactions. Reconnects with backoff and rebuilds server state by
// resending the whole buffer after a drop.

import { diffLines } from "./diff.js";
import type { ClientMessage, ServerMessage } from "./protocol.js";
import {
  ViewState, applyClient, applyServer, initialViewState,
} from "./viewState.js";

export interface Transport {
  send(data: string): void;
  close(): void;
}

export type TransportFactory = (
  url: string,
  handlers: {
    onOpen: () => void;
    onMessage: (data: string) => void;
    onClose: () => void;
  },
) => Transport;

const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 10_000;

export class Session {
  state: ViewState = initialViewState();

  private transport: Transport | null = null;
  private nextId = 1;
  private attempts = 0;
  private listeners: ((state: ViewState) => void)[] = [];
  private closed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly factory: TransportFactory,
    private readonly now: () => number = () => Date.now(),
    private readonly schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> =
      (fn, ms) => setTimeout(fn, ms),
  ) {}

  subscribe(listener: (state: ViewState) => void): void {
    this.listeners.push(listener);
  }

  connect(): void {
    this.setState({ ...this.state, connection: "connecting" });
    this.transport = this.factory(this.url, {
      onOpen: () => this.handleOpen(),
      onMessage: (data) => this.receive(data),
      onClose: () => this.handleClose(),
    });
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.transport?.close();
  }

  private handleOpen(): void {
    this.attempts = 0;
    this.setState({ ...this.state, connection: "open", notice: null });
    if (this.state.bufferText !== "") {
      // resync: the server session is fresh, resend everything as edited
      const lines = this.state.bufferText.split("\n").map((_, i) => i);
      this.send({
        type: "update", id: this.nextId++, text: this.state.bufferText,
        editedLines: lines, atMs: this.now(),
      });
    }
  }

  private handleClose(): void {
    if (this.closed) return;
    this.setState({
      ...this.state, connection: "closed",
      notice: "connection lost; retrying",
    });
    const delay = Math.min(RECONNECT_MAX_MS,
                           RECONNECT_BASE_MS * 2 ** this.attempts);
    this.attempts += 1;
    this.reconnectTimer = this.schedule(() => this.connect(), delay);
  }

  receive(data: string): void {
    let message: ServerMessage;
    try {
      message = JSON.parse(data) as ServerMessage;
    } catch {
      return;
    }
    this.setState(applyServer(this.state, message));
    if (message.type === "trace"
        && this.state.selectedError !== null
        && this.state.selectedStateIndex !== null
        && this.state.variablePane.length === 0) {
      // populate the Value column for the default (error) state right away
      this.send({
        type: "selectState", id: this.nextId++,
        errorId: this.state.selectedError,
        stateIndex: this.state.selectedStateIndex,
        previousIndex: null,
      });
    }
  }

  private send(message: ClientMessage): void {
    this.setState(applyClient(this.state, message));
    this.transport?.send(JSON.stringify(message));
  }

  // ── user interactions ──────────────────────────────────────────

  onEdit(newText: string): void {
    const edited = diffLines(this.state.bufferText, newText);
    this.send({
      type: "update", id: this.nextId++, text: newText,
      editedLines: edited, atMs: this.now(),
    });
    this.requestTokens();
  }

  requestHover(line: number, col: number): void {
    this.send({ type: "hover", id: this.nextId++, line, col });
  }

  requestTokens(): void {
    this.send({ type: "tokens", id: this.nextId++ });
  }

  onClickRedDot(errorId: string): void {
    this.send({ type: "selectError", id: this.nextId++, errorId });
  }

  onClickBlueDot(stateIndex: number): void {
    const errorId = this.state.selectedError;
    if (errorId === null) return;
    this.send({
      type: "selectState", id: this.nextId++, errorId,
      stateIndex,
      previousIndex: this.state.selectedStateIndex,
    });
  }

  private setState(state: ViewState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }
}

export function webSocketTransport(): TransportFactory {
  return (url, handlers) => {
    const socket = new WebSocket(url);
    socket.onopen = () => handlers.onOpen();
    socket.onmessage = (event) => handlers.onMessage(String(event.data));
    socket.onclose = () => handlers.onClose();
    socket.onerror = () => { /* close follows */ };
    return {
      send: (data) => socket.send(data),
      close: () => socket.close(),
    };
  };
}
