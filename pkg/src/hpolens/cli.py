"""Command-line entry points: serve the API, convert run data, and run
analyses headlessly.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .convert import TABULAR, detect_format, load_tabular, write_tabular
from .errors import HpolensError, InvalidParamsError
from .json_util import canonical_bytes

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage problems; we reserve 2 for
    data errors, so remap."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hpolens", description="Analyze hyperparameter-optimization runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="start the HTTP service", parents=[], add_help=True)
    serve.add_argument("--runs-dir", required=True, help="directory containing run directories")
    serve.add_argument("--cache-dir", default=None, help="result cache directory (default: <runs-dir>/.cache)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8050)
    serve.add_argument("--workers", type=int, default=None, help="analysis worker threads (default: CPU count)")
    serve.add_argument("--poll-interval-secs", type=float, default=2.0,
                       help="live-run poll interval; <= 0 disables background polling")
    serve.add_argument("--static-dir", default=None, help="dashboard assets served at /")

    convert = sub.add_parser("convert", help="convert run data to the tabular format")
    convert.add_argument("--in", dest="input", required=True, help="input run directory")
    convert.add_argument("--out", dest="output", required=True, help="output directory")
    convert.add_argument("--force", action="store_true", help="overwrite a non-empty output directory")

    analyze = sub.add_parser("analyze", help="run one plugin and write its JSON payload")
    analyze.add_argument("plugin", help="plugin name (e.g. importances, footprint)")
    analyze.add_argument("--run", required=True, help="run directory")
    analyze.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                         help="plugin parameter; VALUE parsed as JSON, else kept as string")
    analyze.add_argument("--out", default="-", help="output file (default: stdout)")
    return parser


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    runs_dir = Path(args.runs_dir)
    if not runs_dir.is_dir():
        print(f"hpolens serve: runs directory does not exist: {runs_dir}", file=sys.stderr)
        return USAGE_ERROR
    cache_dir = Path(args.cache_dir) if args.cache_dir else runs_dir / ".cache"
    app = create_app(runs_dir=runs_dir, cache_dir=cache_dir, workers=args.workers,
                     poll_interval=args.poll_interval_secs, static_dir=args.static_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    except (OSError, SystemExit) as e:
        print(f"hpolens serve: could not bind {args.host}:{args.port}: {e}", file=sys.stderr)
        return USAGE_ERROR
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    src = Path(args.input)
    try:
        if detect_format(src) != TABULAR:
            print(f"hpolens convert: no known run format at {src}", file=sys.stderr)
            return DATA_ERROR
        run = load_tabular(src)
    except FileNotFoundError:
        print(f"hpolens convert: no such path: {src}", file=sys.stderr)
        return DATA_ERROR
    except HpolensError as e:
        print(f"hpolens convert: {e}", file=sys.stderr)
        return DATA_ERROR
    out = Path(args.output)
    try:
        write_tabular(run, out, overwrite=args.force)
    except FileExistsError as e:
        print(f"hpolens convert: {e} (use --force to overwrite)", file=sys.stderr)
        return USAGE_ERROR
    except HpolensError as e:
        print(f"hpolens convert: {e}", file=sys.stderr)
        return DATA_ERROR
    return 0


def _parse_params(pairs: list[str]) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise InvalidParamsError(f"--param expects KEY=VALUE, got {pair!r}", field=pair)
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def cmd_analyze(args: argparse.Namespace) -> int:
    from .service.plugins import build_payload, validate_params

    run_dir = Path(args.run)
    try:
        params_in = _parse_params(args.param)
    except InvalidParamsError as e:
        print(f"hpolens analyze: {e}", file=sys.stderr)
        return USAGE_ERROR
    try:
        run = load_tabular(run_dir)
    except FileNotFoundError:
        print(f"hpolens analyze: no such path: {run_dir}", file=sys.stderr)
        return DATA_ERROR
    except HpolensError as e:
        print(f"hpolens analyze: {e}", file=sys.stderr)
        return DATA_ERROR

    rid = run_dir.resolve().name
    try:
        params = validate_params(args.plugin, params_in, [run])
    except InvalidParamsError as e:
        print(f"hpolens analyze: {e}", file=sys.stderr)
        return USAGE_ERROR
    try:
        payload = build_payload(args.plugin, [rid], [run], params)
    except HpolensError as e:
        print(f"hpolens analyze: {e}", file=sys.stderr)
        return DATA_ERROR

    data = canonical_bytes(payload)
    if args.out == "-":
        sys.stdout.buffer.write(data + b"\n")
    else:
        Path(args.out).write_bytes(data)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    if args.command == "convert":
        return cmd_convert(args)
    if args.command == "analyze":
        return cmd_analyze(args)
    return USAGE_ERROR  # pragma: no cover - subparsers are required


if __name__ == "__main__":
    sys.exit(main())
