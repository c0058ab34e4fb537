import json
import socket
import threading
import time

import pytest

from verifide.orchestrator.config import Config, THREADED
from verifide.service.server import Session, _Writer, serve_tcp

from conftest import FIG3_SNAP2

TRACE_FIXTURE = (
    "method T(x: int)\n"
    "{\n"
    "  var y := 1;\n"
    "  y := y + 1;\n"
    "  assert y == 3;\n"
    "}\n")


class WireProbe:
    """Captures server output lines; lets tests wait for message types."""

    def __init__(self):
        self.messages = []
        self._cond = threading.Condition()

    # file-like surface used by _Writer
    def write(self, line):
        with self._cond:
            self.messages.append(json.loads(line))
            self._cond.notify_all()

    def flush(self):
        pass

    def wait_for(self, msg_type, timeout=10.0, predicate=None):
        deadline = time.monotonic() + timeout
        with self._cond:
            while True:
                for m in self.messages:
                    if m["type"] == msg_type and (predicate is None or predicate(m)):
                        return m
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    raise AssertionError(
                        f"no {msg_type} message; got {[m['type'] for m in self.messages]}")
                self._cond.wait(timeout=remaining)

    def of_type(self, msg_type):
        with self._cond:
            return [m for m in self.messages if m["type"] == msg_type]


@pytest.fixture
def session():
    probe = WireProbe()
    sess = Session(_Writer(probe),
                   Config(execution=THREADED, max_workers=2, debounce_ms=10))
    yield sess, probe
    sess.close()


def send(sess, **message):
    sess.handle_line(json.dumps(message))


def test_update_flows_to_diagnostics_and_verified(session):
    sess, probe = session
    send(sess, type="update", id=1, text=FIG3_SNAP2, editedLines=[0], atMs=0)
    ack = probe.wait_for("ack")
    assert ack["id"] == 1 and ack["snapshotId"] == 0
    diag = probe.wait_for("resolutionDiagnostics")
    assert diag["snapshotId"] == 0 and diag["items"] == []
    verified = probe.wait_for("verified")
    assert verified["snapshotId"] == 0
    results = probe.of_type("unitResult")
    assert len(results) == 5
    failed = [r for r in results if r["verdict"] == "Failed"]
    assert len(failed) == 1
    assert failed[0]["entity"] == {"name": "Foo", "kind": "MethodBody"}
    assert failed[0]["errors"][0]["message"] == "ensures clause might not hold"


def test_margins_pushed_on_edit(session):
    sess, probe = session
    send(sess, type="update", id=1, text="method M() { }", editedLines=[0], atMs=0)
    margins = probe.wait_for("margins")
    assert {"line": 0, "state": "edited"} in margins["lines"]


def test_hover_parameter(session):
    sess, probe = session
    send(sess, type="update", id=1, text="method M(x: int) { assert x == x; }",
         editedLines=[], atMs=0)
    probe.wait_for("verified")
    send(sess, type="hover", id=2, line=0, col=9)
    result = probe.wait_for("hoverResult")
    assert result["id"] == 2
    assert result["text"] == "(parameter) x: int"


def test_hover_miss_is_null(session):
    sess, probe = session
    send(sess, type="update", id=1, text="method M() { }", editedLines=[], atMs=0)
    probe.wait_for("verified")
    send(sess, type="hover", id=2, line=0, col=12)
    assert probe.wait_for("hoverResult")["text"] is None


def test_tokens_request(session):
    sess, probe = session
    send(sess, type="update", id=1, text="method M() { } // c", editedLines=[], atMs=0)
    send(sess, type="tokens", id=2)
    result = probe.wait_for("tokensResult")
    kinds = [t["kind"] for t in result["tokens"]]
    assert "Keyword" in kinds and "Comment" in kinds
    assert "Whitespace" not in kinds


def _await_failed_unit(probe):
    return probe.wait_for("unitResult", predicate=lambda m: m["verdict"] == "Failed")


def test_select_error_returns_blue_dot_trace(session):
    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    probe.wait_for("verified")
    error = failed["errors"][0]
    assert error["traceLength"] == 4  # entry + three statements
    send(sess, type="selectError", id=2, errorId=error["errorId"])
    trace = probe.wait_for("trace")
    assert len(trace["states"]) == 4
    assert trace["states"][0]["line"] == 0
    assert trace["states"][-1]["line"] == 4


def test_minimal_assert_false_trace_has_two_states(session):
    sess, probe = session
    send(sess, type="update", id=1, text="method B() { assert false; }",
         editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    assert failed["errors"][0]["traceLength"] == 2


def test_select_state_value_previous_columns(session):
    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    error_id = failed["errors"][0]["errorId"]
    send(sess, type="selectError", id=2, errorId=error_id)
    probe.wait_for("trace")
    # default: the last (error) state
    send(sess, type="selectState", id=3, errorId=error_id, stateIndex=None,
         previousIndex=None)
    last = probe.wait_for("stateValues", predicate=lambda m: m["id"] == 3)
    assert {"name": "y", "value": 2, "previous": None} in last["values"]
    # then select an earlier state; Previous shows the error state's values
    send(sess, type="selectState", id=4, errorId=error_id, stateIndex=1,
         previousIndex=3)
    earlier = probe.wait_for("stateValues", predicate=lambda m: m["id"] == 4)
    assert {"name": "y", "value": 1, "previous": 2} in earlier["values"]


def test_variable_not_yet_declared_absent_from_values(session):
    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    error_id = failed["errors"][0]["errorId"]
    send(sess, type="selectState", id=2, errorId=error_id, stateIndex=0,
         previousIndex=None)
    entry = probe.wait_for("stateValues", predicate=lambda m: m["id"] == 2)
    assert [v["name"] for v in entry["values"]] == ["x"]


def test_select_state_index_out_of_range(session):
    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    error_id = failed["errors"][0]["errorId"]
    send(sess, type="selectState", id=9, errorId=error_id, stateIndex=99,
         previousIndex=None)
    err = probe.wait_for("error", predicate=lambda m: m["id"] == 9)
    assert err["reason"] == "index-out-of-range"


def test_stale_error_after_new_snapshot(session):
    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    error_id = failed["errors"][0]["errorId"]
    probe.wait_for("verified")
    send(sess, type="update", id=2, text="method Clean() { }", editedLines=[],
         atMs=5_000)
    probe.wait_for("verified", predicate=lambda m: m["snapshotId"] == 1)
    send(sess, type="selectError", id=3, errorId=error_id)
    err = probe.wait_for("error", predicate=lambda m: m["id"] == 3)
    assert err["reason"] == "stale-error"


def test_hover_includes_selected_state_value(session):
    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    error_id = failed["errors"][0]["errorId"]
    probe.wait_for("verified")
    send(sess, type="selectError", id=2, errorId=error_id)
    probe.wait_for("trace")
    send(sess, type="hover", id=3, line=0, col=9)  # parameter x
    result = probe.wait_for("hoverResult", predicate=lambda m: m["id"] == 3)
    assert result["text"].startswith("(parameter) x: int")
    assert "value in selected state: " in result["text"]


def test_state_values_equal_prover_trace_bindings(session):
    # the pane must mirror the prover's trace verbatim, state by state
    from verifide.lang import parse, resolve
    from verifide.prover import BoundedProver, Bounds, extract_units

    program = resolve(parse(TRACE_FIXTURE))
    unit = next(u for u in extract_units(program)
                if u.obligation.value == "MethodBody")
    verdict = BoundedProver().verify_unit(unit, Bounds(), 30_000)
    trace = verdict.errors[0].trace

    sess, probe = session
    send(sess, type="update", id=1, text=TRACE_FIXTURE, editedLines=[], atMs=0)
    failed = _await_failed_unit(probe)
    error_id = failed["errors"][0]["errorId"]
    for index in range(len(trace.states)):
        send(sess, type="selectState", id=100 + index, errorId=error_id,
             stateIndex=index, previousIndex=None)
        msg = probe.wait_for("stateValues",
                             predicate=lambda m, i=index: m["id"] == 100 + i)
        got = [(v["name"], tuple(v["value"]) if isinstance(v["value"], list)
                else v["value"]) for v in msg["values"]]
        assert got == list(trace.states[index].bindings)


def test_malformed_json_and_unknown_type(session):
    sess, probe = session
    sess.handle_line("this is not json\n")
    assert probe.wait_for("error")["reason"] == "malformed-json"
    send(sess, type="teleport", id=7)
    err = probe.wait_for("error", predicate=lambda m: m["id"] == 7)
    assert err["reason"] == "unknown-type"


def test_bad_update_payload(session):
    sess, probe = session
    send(sess, type="update", id=5, text=123)
    err = probe.wait_for("error", predicate=lambda m: m["id"] == 5)
    assert err["reason"] == "bad-request"


def test_every_request_gets_a_response(session):
    sess, probe = session
    send(sess, type="update", id=1, text="method M() { }", editedLines=[], atMs=0)
    send(sess, type="hover", id=2, line=0, col=0)
    send(sess, type="tokens", id=3)
    send(sess, type="selectError", id=4, errorId="nope")
    for msg_id in (1, 2, 3, 4):
        got = [m for m in probe.messages
               if m.get("id") == msg_id and m["type"] != "update"]
        assert got, msg_id


def test_tcp_round_trip():
    stop = threading.Event()
    ready = threading.Event()
    thread = threading.Thread(
        target=serve_tcp,
        kwargs=dict(host="127.0.0.1", port=0, ready=ready, stop=stop),
        daemon=True)
    # port 0 gives an ephemeral port we cannot discover through serve_tcp;
    # bind our own listener instead to pick a free port first
    free = socket.socket()
    free.bind(("127.0.0.1", 0))
    port = free.getsockname()[1]
    free.close()
    thread = threading.Thread(
        target=serve_tcp,
        kwargs=dict(host="127.0.0.1", port=port,
                    config=Config(execution=THREADED, debounce_ms=10),
                    ready=ready, stop=stop),
        daemon=True)
    thread.start()
    assert ready.wait(timeout=5)
    try:
        with socket.create_connection(("127.0.0.1", port), timeout=5) as conn:
            conn.sendall((json.dumps(
                {"type": "update", "id": 1, "text": "method M() { }",
                 "editedLines": [], "atMs": 0}) + "\n").encode())
            received = b""
            deadline = time.monotonic() + 10
            while b'"verified"' not in received and time.monotonic() < deadline:
                conn.settimeout(max(0.1, deadline - time.monotonic()))
                try:
                    chunk = conn.recv(4096)
                except socket.timeout:
                    break
                if not chunk:
                    break
                received += chunk
            lines = [json.loads(l) for l in received.decode().splitlines() if l]
            types = [m["type"] for m in lines]
            assert "ack" in types
            assert "verified" in types
    finally:
        stop.set()
        thread.join(timeout=5)
