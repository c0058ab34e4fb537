"""Command line entry points: ``verifide replay`` and ``verifide serve``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .orchestrator.config import Config, THREADED
from .prover.bounds import Bounds
from .replay.report import report_to_json
from .replay.runner import ReplayOptions, run_session
from .replay.script import ScriptError, load_script
from .service.server import DEFAULT_PORT, serve_stream, serve_tcp


def _parse_bounds_flag(raw: str) -> Bounds:
    parts = raw.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--bounds expects lo,hi,len")
    try:
        lo, hi, max_len = (int(p) for p in parts)
        return Bounds(int_low=lo, int_high=hi, max_array_len=max_len)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verifide",
        description="Incremental verification engine for MiniSpec programs")
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="replay an edit-session script")
    replay.add_argument("script", help="session script (JSON)")
    replay.add_argument("--workers", type=int, default=None)
    replay.add_argument("--debounce-ms", type=int, default=None)
    replay.add_argument("--timeout-ms", type=int, default=None)
    replay.add_argument("--bounds", type=_parse_bounds_flag, default=None,
                        metavar="LO,HI,LEN")
    replay.add_argument("--cache-file", default=None)
    replay.add_argument("--no-cache", action="store_true")
    replay.add_argument("--real-time", action="store_true",
                        help="scripted prover sleeps for real; wall times are real")
    replay.add_argument("--out", default=None, help="report path (default stdout)")

    serve = sub.add_parser("serve", help="serve the editor session protocol")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--stdio", action="store_true",
                       help="single session on stdin/stdout instead of TCP")
    serve.add_argument("--workers", type=int, default=None)
    serve.add_argument("--debounce-ms", type=int, default=None)
    serve.add_argument("--timeout-ms", type=int, default=None)
    serve.add_argument("--bounds", type=_parse_bounds_flag, default=None,
                       metavar="LO,HI,LEN")
    return parser


def _run_replay(args: argparse.Namespace) -> int:
    try:
        script = load_script(args.script)
    except ScriptError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    options = ReplayOptions(
        workers=args.workers,
        debounce_ms=args.debounce_ms,
        timeout_ms=args.timeout_ms,
        bounds=args.bounds,
        cache_file=args.cache_file,
        no_cache=args.no_cache,
        real_time=args.real_time,
    )
    try:
        report, exit_code = run_session(script, options)
    except ScriptError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    text = report_to_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return exit_code


def _run_serve(args: argparse.Namespace) -> int:
    config = Config(execution=THREADED)
    if args.workers is not None:
        config.max_workers = args.workers
    if args.debounce_ms is not None:
        config.debounce_ms = args.debounce_ms
    if args.timeout_ms is not None:
        config.timeout_ms = args.timeout_ms
    if args.bounds is not None:
        config.bounds = args.bounds
    if args.stdio:
        serve_stream(sys.stdin, sys.stdout, config)
        return 0
    print(f"verifide session service on {args.host}:{args.port}", file=sys.stderr)
    serve_tcp(args.host, args.port, config)
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        return _run_replay(args)
    return _run_serve(args)


if __name__ == "__main__":
    sys.exit(main())
