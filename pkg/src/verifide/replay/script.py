"""Session script loading and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..prover.bounds import Bounds
from ..prover.scripted import ScriptedProver, ScriptedUnit


class ScriptError(Exception):
    pass


@dataclass(frozen=True)
class Snapshot:
    at_ms: int
    text: str


@dataclass
class SessionScript:
    file: str
    snapshots: list[Snapshot]
    workers: Optional[int] = None
    debounce_ms: Optional[int] = None
    timeout_ms: Optional[int] = None
    bounds: Optional[Bounds] = None
    cache_capacity: Optional[int] = None
    prover_kind: str = "bounded"
    scripted_units: dict[str, ScriptedUnit] = field(default_factory=dict)
    scripted_default: ScriptedUnit = field(default_factory=ScriptedUnit)

    def make_scripted_prover(self, real_sleep: bool) -> ScriptedProver:
        return ScriptedProver(units=dict(self.scripted_units),
                              default=self.scripted_default,
                              real_sleep=real_sleep)


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ScriptError(message)


def _parse_bounds(raw: dict) -> Bounds:
    _expect(isinstance(raw, dict), "config.bounds must be an object")
    try:
        return Bounds(
            int_low=int(raw.get("intLow", -3)),
            int_high=int(raw.get("intHigh", 3)),
            max_array_len=int(raw.get("maxArrayLen", 3)),
            max_steps=int(raw.get("maxSteps", 10_000)),
        )
    except (TypeError, ValueError) as err:
        raise ScriptError(f"invalid bounds: {err}") from err


def _parse_scripted_unit(raw: Any, where: str) -> ScriptedUnit:
    _expect(isinstance(raw, dict), f"{where} must be an object")
    delay = raw.get("delayMs", 0)
    verdict = raw.get("verdict", "Verified")
    _expect(isinstance(delay, int) and delay >= 0,
            f"{where}.delayMs must be a non-negative integer")
    _expect(verdict in ("Verified", "Failed"),
            f"{where}.verdict must be Verified or Failed")
    return ScriptedUnit(delay_ms=delay, verdict=verdict)


def parse_script(data: Any) -> SessionScript:
    _expect(isinstance(data, dict), "script must be a JSON object")
    snapshots_raw = data.get("snapshots")
    _expect(isinstance(snapshots_raw, list) and snapshots_raw,
            "script.snapshots must be a non-empty list")
    snapshots: list[Snapshot] = []
    last_at: Optional[int] = None
    for i, raw in enumerate(snapshots_raw):
        _expect(isinstance(raw, dict), f"snapshots[{i}] must be an object")
        at_ms = raw.get("atMs")
        text = raw.get("text")
        _expect(isinstance(at_ms, int), f"snapshots[{i}].atMs must be an integer")
        _expect(isinstance(text, str), f"snapshots[{i}].text must be a string")
        _expect(last_at is None or at_ms > last_at,
                "snapshot times must strictly increase")
        last_at = at_ms
        snapshots.append(Snapshot(at_ms, text))

    script = SessionScript(file=str(data.get("file", "<buffer>")),
                           snapshots=snapshots)
    config = data.get("config", {})
    _expect(isinstance(config, dict), "script.config must be an object")
    if "workers" in config:
        _expect(isinstance(config["workers"], int) and config["workers"] >= 1,
                "config.workers must be a positive integer")
        script.workers = config["workers"]
    if "debounceMs" in config:
        _expect(isinstance(config["debounceMs"], int) and config["debounceMs"] >= 0,
                "config.debounceMs must be a non-negative integer")
        script.debounce_ms = config["debounceMs"]
    if "timeoutMs" in config:
        _expect(isinstance(config["timeoutMs"], int) and config["timeoutMs"] > 0,
                "config.timeoutMs must be a positive integer")
        script.timeout_ms = config["timeoutMs"]
    if "bounds" in config:
        script.bounds = _parse_bounds(config["bounds"])
    if "cacheCapacity" in config:
        _expect(isinstance(config["cacheCapacity"], int) and config["cacheCapacity"] >= 1,
                "config.cacheCapacity must be a positive integer")
        script.cache_capacity = config["cacheCapacity"]
    prover = config.get("prover", {})
    _expect(isinstance(prover, dict), "config.prover must be an object")
    kind = prover.get("kind", "bounded")
    _expect(kind in ("bounded", "scripted"),
            "config.prover.kind must be bounded or scripted")
    script.prover_kind = kind
    if kind == "scripted":
        script.scripted_default = _parse_scripted_unit(
            {"delayMs": prover.get("defaultDelayMs", 0),
             "verdict": prover.get("defaultVerdict", "Verified")},
            "config.prover")
        units = prover.get("units", {})
        _expect(isinstance(units, dict), "config.prover.units must be an object")
        for unit_id, raw in units.items():
            script.scripted_units[unit_id] = _parse_scripted_unit(
                raw, f"config.prover.units[{unit_id!r}]")
    return script


def load_script(path: str | Path) -> SessionScript:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as err:
        raise ScriptError(f"cannot read script: {err}") from err
    except json.JSONDecodeError as err:
        raise ScriptError(f"script is not valid JSON: {err}") from err
    return parse_script(data)
