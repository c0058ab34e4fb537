"""Machine-readable replay reports."""

from __future__ import annotations

import json
from typing import Any

from ..fingerprint import render_checksum
from ..lang.tokens import Span
from ..orchestrator.engine import Engine, SnapshotRecord, UnitRecord
from ..prover.verdict import Verdict, VerificationError


def span_to_json(span: Span) -> dict[str, int]:
    return {"startLine": span.start_line, "startCol": span.start_col,
            "endLine": span.end_line, "endCol": span.end_col}


def error_to_json(error: VerificationError) -> dict[str, Any]:
    return {
        "message": error.message,
        "span": span_to_json(error.error_span),
        "relatedSpans": [span_to_json(s) for s in error.related_spans],
        "traceLength": len(error.trace.states),
    }


def verdict_to_json(verdict: Verdict) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": verdict.kind}
    if verdict.kind == "Failed":
        out["errors"] = [error_to_json(e) for e in verdict.errors]
    return out


def _unit_row(unit: UnitRecord) -> dict[str, Any]:
    return {
        "entity": {"name": unit.entity_id.name, "kind": unit.entity_id.kind.value},
        "obligation": unit.obligation.value,
        "priority": unit.priority.label,
        "action": unit.action,
        "verdict": verdict_to_json(unit.verdict) if unit.verdict else None,
        "durationMs": unit.duration_ms,
        "entityChecksum": render_checksum(unit.entity_checksum),
        "dependencyChecksum": render_checksum(unit.dependency_checksum),
    }


def _snapshot_row(record: SnapshotRecord, simulated: bool) -> dict[str, Any]:
    return {
        "snapshotId": record.snapshot_id,
        "resolutionMs": 0 if simulated else record.resolution_ms,
        "diagnostics": [
            {"severity": d.severity, "message": d.message,
             "span": span_to_json(d.span)}
            for d in record.diagnostics
        ],
        "units": [_unit_row(u) for u in record.units],
    }


def build_report(engine: Engine, simulated_time: bool) -> dict[str, Any]:
    """Report over every snapshot that reached resolution, in id order.

    With simulated time (scripted prover, no real sleeps) the totals count
    scripted durations, which keeps reports bit-identical across runs.
    """
    snapshots = [engine.snapshot_records[sid]
                 for sid in sorted(engine.snapshot_records)]
    invocations = 0
    hits = 0
    wall = 0.0
    for record in snapshots:
        for unit in record.units:
            if unit.action == "Proved":
                invocations += 1
            elif unit.action == "CacheHit":
                hits += 1
        if simulated_time:
            wall += sum(u.duration_ms for u in record.units)
        else:
            wall += record.run_wall_ms
    return {
        "snapshots": [_snapshot_row(r, simulated_time) for r in snapshots],
        "totals": {
            "wallMs": int(wall),
            "proverInvocations": invocations,
            "cacheHits": hits,
        },
    }


def report_to_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"
