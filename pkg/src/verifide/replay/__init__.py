"""Batch replay of edit sessions; machine-readable reports."""

from .diff import diff_lines
from .report import build_report, report_to_json, span_to_json, verdict_to_json
from .runner import NullCache, ReplayOptions, run_session
from .script import ScriptError, SessionScript, Snapshot, load_script, parse_script

__all__ = [
    "diff_lines", "build_report", "report_to_json", "span_to_json",
    "verdict_to_json", "NullCache", "ReplayOptions", "run_session",
    "ScriptError", "SessionScript", "Snapshot", "load_script", "parse_script",
]
