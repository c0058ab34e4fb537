"""Interactive session server.

One session per connection, each with its own engine. Buffer updates are
debounced in real time; diagnostics, margins, unit results, and verified
notifications are pushed as the engine emits them. Red-dot errors can be
selected to fetch blue-dot traces, and trace states can be inspected with a
Value/Previous variable pane.
"""

from __future__ import annotations

import json
import socket
import threading
from typing import Any, IO, Optional

from ..lang.ast import hover_info
from ..orchestrator.config import Config
from ..orchestrator.engine import Engine
from ..orchestrator.events import (
    MarginsChanged, ResolutionDiagnostics, SnapshotVerified, UnitCompleted,
)
from ..orchestrator.live import LiveDriver
from ..prover.verdict import CounterexampleTrace
from . import protocol

DEFAULT_PORT = 4717
_PUSH_POLL_S = 0.2


class _Writer:
    """Line writer shared by the handler and push threads."""

    def __init__(self, stream: IO[str]) -> None:
        self._stream = stream
        self._lock = threading.Lock()

    def send(self, message: dict[str, Any]) -> None:
        line = protocol.encode(message)
        with self._lock:
            self._stream.write(line)
            self._stream.flush()


class Session:
    def __init__(self, writer: _Writer, config: Optional[Config] = None) -> None:
        self.engine = Engine(config or Config())
        self.driver = LiveDriver(self.engine)
        self.writer = writer
        self._lock = threading.Lock()
        self._traces: dict[str, CounterexampleTrace] = {}
        self._trace_snapshot: dict[str, int] = {}
        self._results_snapshot: Optional[int] = None
        self._error_counter = 0
        self._selected: Optional[tuple[str, int]] = None  # errorId, state index
        self._closed = threading.Event()
        self._push_thread = threading.Thread(
            target=self._push_loop, daemon=True, name="verifide-push")
        self._push_thread.start()

    def close(self) -> None:
        self._closed.set()
        self.driver.close()

    # ── pushes ───────────────────────────────────────────────────

    def _push_loop(self) -> None:
        cursor = 0
        while not self._closed.is_set():
            events = self.engine.events.wait_since(cursor, timeout_s=_PUSH_POLL_S)
            for event in events:
                cursor = max(cursor, event.seq)
                try:
                    self._push_event(event)
                except (OSError, ValueError):
                    self._closed.set()
                    return

    def _push_event(self, event: Any) -> None:
        if isinstance(event, MarginsChanged):
            self.writer.send(protocol.margins(event.lines))
        elif isinstance(event, ResolutionDiagnostics):
            self.writer.send(protocol.resolution_diagnostics(
                event.snapshot_id, event.items))
        elif isinstance(event, UnitCompleted):
            self.writer.send(self._unit_result_message(event))
        elif isinstance(event, SnapshotVerified):
            self.writer.send(protocol.verified(event.snapshot_id))

    def _unit_result_message(self, event: UnitCompleted) -> dict[str, Any]:
        errors: list[dict[str, Any]] = []
        with self._lock:
            if self._results_snapshot != event.snapshot_id:
                # a newer snapshot started reporting: its errors supersede
                self._results_snapshot = event.snapshot_id
                self._invalidate_stale(event.snapshot_id)
            for err in event.verdict.errors:
                self._error_counter += 1
                error_id = f"{event.snapshot_id}:{self._error_counter}"
                self._traces[error_id] = err.trace
                self._trace_snapshot[error_id] = event.snapshot_id
                errors.append({
                    "errorId": error_id,
                    "span": protocol.span_to_wire(err.error_span),
                    "message": err.message,
                    "relatedSpans": [protocol.span_to_wire(s)
                                     for s in err.related_spans],
                    "traceLength": len(err.trace.states),
                })
        return protocol.unit_result(
            event.snapshot_id, event.entity_id.name, event.entity_id.kind.value,
            event.obligation.value, event.verdict, event.from_cache, errors)

    def _invalidate_stale(self, snapshot_id: int) -> None:
        stale = [eid for eid, sid in self._trace_snapshot.items()
                 if sid != snapshot_id]
        for eid in stale:
            self._trace_snapshot.pop(eid, None)
            self._traces.pop(eid, None)
        if self._selected is not None and self._selected[0] in stale:
            self._selected = None

    # ── requests ─────────────────────────────────────────────────

    def handle_line(self, line: str) -> None:
        line = line.strip()
        if not line:
            return
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            self.writer.send(protocol.error(None, "malformed-json"))
            return
        if not isinstance(message, dict):
            self.writer.send(protocol.error(None, "malformed-json"))
            return
        msg_id = message.get("id")
        handler = {
            "update": self._handle_update,
            "hover": self._handle_hover,
            "selectError": self._handle_select_error,
            "selectState": self._handle_select_state,
            "tokens": self._handle_tokens,
        }.get(message.get("type"))
        if handler is None:
            self.writer.send(protocol.error(msg_id, "unknown-type"))
            return
        try:
            self.writer.send(handler(msg_id, message))
        except _BadRequest as err:
            self.writer.send(protocol.error(msg_id, err.reason))

    def _handle_update(self, msg_id: Any, message: dict) -> dict[str, Any]:
        text = message.get("text")
        if not isinstance(text, str):
            raise _BadRequest("bad-request")
        edited = message.get("editedLines", [])
        if not isinstance(edited, list) or not all(isinstance(x, int) for x in edited):
            raise _BadRequest("bad-request")
        at_ms = message.get("atMs")
        if at_ms is not None and not isinstance(at_ms, int):
            raise _BadRequest("bad-request")
        snapshot_id = self.driver.submit(text, set(edited), at_ms)
        return protocol.ack(msg_id, snapshot_id)

    def _handle_hover(self, msg_id: Any, message: dict) -> dict[str, Any]:
        line, col = message.get("line"), message.get("col")
        if not isinstance(line, int) or not isinstance(col, int):
            raise _BadRequest("bad-request")
        program = self.engine.latest_program()
        if program is None:
            return protocol.hover_result(msg_id, None)
        info = hover_info(program, line, col)
        if info is None:
            return protocol.hover_result(msg_id, None)
        text = info.text
        value_line = self._selected_value_line(info.var_name)
        if value_line is not None:
            text = f"{text}\n{value_line}"
        return protocol.hover_result(msg_id, text)

    def _selected_value_line(self, var_name: Optional[str]) -> Optional[str]:
        if var_name is None:
            return None
        with self._lock:
            if self._selected is None:
                return None
            error_id, index = self._selected
            trace = self._traces.get(error_id)
        if trace is None or not (0 <= index < len(trace.states)):
            return None
        for name, value in trace.states[index].bindings:
            if name == var_name:
                return f"value in selected state: {protocol.value_to_text(value)}"
        return None

    def _handle_select_error(self, msg_id: Any, message: dict) -> dict[str, Any]:
        error_id = message.get("errorId")
        trace = self._valid_trace(error_id)
        with self._lock:
            self._selected = (error_id, len(trace.states) - 1)
        return protocol.trace_message(
            msg_id, [state.location for state in trace.states])

    def _handle_select_state(self, msg_id: Any, message: dict) -> dict[str, Any]:
        error_id = message.get("errorId")
        trace = self._valid_trace(error_id)
        n = len(trace.states)
        index = message.get("stateIndex")
        if index is None:
            index = n - 1  # the error state
        previous = message.get("previousIndex")
        if not isinstance(index, int) or not (0 <= index < n):
            raise _BadRequest("index-out-of-range")
        if previous is not None and (
                not isinstance(previous, int) or not (0 <= previous < n)):
            raise _BadRequest("index-out-of-range")
        with self._lock:
            self._selected = (error_id, index)
        prev_bindings = (dict(trace.states[previous].bindings)
                         if previous is not None else {})
        rows = []
        for name, value in trace.states[index].bindings:
            prev = prev_bindings.get(name)
            rows.append({
                "name": name,
                "value": protocol.value_to_wire(value),
                "previous": protocol.value_to_wire(prev) if prev is not None else None,
            })
        return protocol.state_values(msg_id, rows)

    def _valid_trace(self, error_id: Any) -> CounterexampleTrace:
        with self._lock:
            if (not isinstance(error_id, str)
                    or error_id not in self._traces
                    or self._trace_snapshot.get(error_id) != self._results_snapshot):
                raise _BadRequest("stale-error")
            return self._traces[error_id]

    def _handle_tokens(self, msg_id: Any, message: dict) -> dict[str, Any]:
        return protocol.tokens_result(msg_id, self.engine.current_tokens())


class _BadRequest(Exception):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


def serve_stream(rfile: IO[str], wfile: IO[str],
                 config: Optional[Config] = None) -> None:
    """Run one session over a line stream until it closes."""
    session = Session(_Writer(wfile), config)
    try:
        for line in rfile:
            session.handle_line(line)
    finally:
        session.close()


def serve_tcp(host: str = "127.0.0.1", port: int = DEFAULT_PORT,
              config: Optional[Config] = None,
              ready: Optional[threading.Event] = None,
              stop: Optional[threading.Event] = None) -> None:
    """Accept loop; one engine-backed session per connection."""
    server = socket.create_server((host, port))
    server.settimeout(0.25)
    if ready is not None:
        ready.set()
    try:
        while stop is None or not stop.is_set():
            try:
                conn, _ = server.accept()
            except socket.timeout:
                continue
            thread = threading.Thread(
                target=_serve_connection, args=(conn, config), daemon=True)
            thread.start()
    finally:
        server.close()


def _serve_connection(conn: socket.socket, config: Optional[Config]) -> None:
    rfile = conn.makefile("r", encoding="utf-8", newline="\n")
    wfile = conn.makefile("w", encoding="utf-8", newline="\n")
    try:
        serve_stream(rfile, wfile, config)
    except (OSError, ValueError):
        pass
    finally:
        conn.close()
