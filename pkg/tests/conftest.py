from __future__ import annotations

from pathlib import Path

import pytest

from verifide.lang import parse, resolve

CORPUS_DIR = Path(__file__).parent / "corpus" / "programs"

FIG3_SNAP0 = """method Foo()
  ensures P()
{ }

method Bar() { }

function P(): bool { true }
"""

FIG3_SNAP1 = FIG3_SNAP0.replace("method Bar() { }", "method Bar() { Foo(); }")

FIG3_SNAP2 = FIG3_SNAP1.replace("function P(): bool { true }",
                                "function P(): bool { false }")

FILL_WEAK = (CORPUS_DIR / "f_fill_weak.msp").read_text(encoding="utf-8")
FILL_FRAME = (CORPUS_DIR / "v_fill_frame.msp").read_text(encoding="utf-8")


def resolve_text(text: str):
    program = resolve(parse(text))
    assert not program.has_errors, [d.message for d in program.diagnostics]
    return program


def corpus_paths() -> list[Path]:
    return sorted(CORPUS_DIR.glob("*.msp"))


@pytest.fixture(scope="session")
def fig3_snapshots() -> list[str]:
    return [FIG3_SNAP0, FIG3_SNAP1, FIG3_SNAP2]


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
