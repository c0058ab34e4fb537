"""Wire-level helpers for the NDJSON session protocol.

One JSON object per line. Client messages carry an ``id`` echoed in the
response; server pushes (margins, diagnostics, unit results, verified)
carry no id and may interleave with responses.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from ..lang.ast import Diagnostic
from ..lang.tokens import Span, Token, TokenKind
from ..prover.verdict import Value, Verdict


def span_to_wire(span: Span) -> dict[str, int]:
    return {"startLine": span.start_line, "startCol": span.start_col,
            "endLine": span.end_line, "endCol": span.end_col}


def value_to_wire(value: Value) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    return list(value)


def value_to_text(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return "[" + ", ".join(str(v) for v in value) + "]"


def encode(message: dict[str, Any]) -> str:
    return json.dumps(message, separators=(", ", ": ")) + "\n"


def ack(msg_id: Any, snapshot_id: int) -> dict[str, Any]:
    return {"type": "ack", "id": msg_id, "snapshotId": snapshot_id}


def error(msg_id: Any, reason: str) -> dict[str, Any]:
    return {"type": "error", "id": msg_id, "reason": reason}


def margins(lines: dict[int, str]) -> dict[str, Any]:
    return {"type": "margins",
            "lines": [{"line": line, "state": state}
                      for line, state in sorted(lines.items())]}


def resolution_diagnostics(snapshot_id: int,
                           items: tuple[Diagnostic, ...]) -> dict[str, Any]:
    return {"type": "resolutionDiagnostics", "snapshotId": snapshot_id,
            "items": [{"span": span_to_wire(d.span), "severity": d.severity,
                       "message": d.message} for d in items]}


def unit_result(snapshot_id: int, entity_name: str, entity_kind: str,
                obligation: str, verdict: Verdict, from_cache: bool,
                errors: list[dict[str, Any]]) -> dict[str, Any]:
    return {"type": "unitResult", "snapshotId": snapshot_id,
            "entity": {"name": entity_name, "kind": entity_kind},
            "obligation": obligation, "verdict": verdict.kind,
            "fromCache": from_cache, "errors": errors}


def verified(snapshot_id: int) -> dict[str, Any]:
    return {"type": "verified", "snapshotId": snapshot_id}


def hover_result(msg_id: Any, text: Optional[str]) -> dict[str, Any]:
    return {"type": "hoverResult", "id": msg_id, "text": text}


def trace_message(msg_id: Any, locations: list[Span]) -> dict[str, Any]:
    return {"type": "trace", "id": msg_id,
            "states": [{"line": s.start_line, "col": s.start_col}
                       for s in locations]}


def state_values(msg_id: Any, rows: list[dict[str, Any]]) -> dict[str, Any]:
    return {"type": "stateValues", "id": msg_id, "values": rows}


def tokens_result(msg_id: Any, tokens: list[Token]) -> dict[str, Any]:
    return {"type": "tokensResult", "id": msg_id,
            "tokens": [{"span": span_to_wire(t.span), "kind": t.kind.value}
                       for t in tokens if t.kind != TokenKind.WHITESPACE]}
