"""Headless entry point: render SVG, export CSV, validate documents, serve.

Exit codes: 0 success, 1 validation error, 2 I/O error. Diagnostics go to
standard error. Rendering is a pure function of its inputs: the same CSV,
descriptor, state document, and parameters always produce byte-identical
SVG.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data as da
from .errors import TableFoldError
from .layout import LayoutParams, compute_layout
from .scene import build_scene
from .schemas import validate_descriptor, validate_state
from .session import Session
from .svg import render_svg

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _read_json(path: str):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _load_session(args) -> Session:
    descriptor = None
    if args.descriptor:
        descriptor = _read_json(args.descriptor)
        validate_descriptor(descriptor)
    dataset = da.load_dataset(_read_bytes(args.data), descriptor)
    params = LayoutParams(viewport_h=args.viewport_h)
    session = Session(dataset, params=params)
    if args.state:
        doc = _read_json(args.state)
        validate_state(doc)
        if "dataset" not in doc:
            doc = dict(doc)
            doc["dataset"] = {"fingerprint": dataset.fingerprint}
        session.restore(doc)
    return session


def cmd_render(args) -> int:
    session = _load_session(args)
    state = session.state
    rows = state.traverse()
    layout = compute_layout(rows, state.mode, session.params, state.selection)
    scene = build_scene(state, layout, (0, len(rows)))
    Path(args.out).write_bytes(render_svg(scene))
    return EXIT_OK


def cmd_export(args) -> int:
    session = _load_session(args)
    Path(args.out).write_bytes(session.export_csv())
    return EXIT_OK


def cmd_validate(args) -> int:
    if not args.descriptor and not args.state:
        print("validate: nothing to check (use --descriptor and/or --state)",
              file=sys.stderr)
        return EXIT_VALIDATION
    if args.descriptor:
        validate_descriptor(_read_json(args.descriptor))
    if args.state:
        validate_state(_read_json(args.state))
    return EXIT_OK


def cmd_serve(args) -> int:
    from . import server
    server.run(host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tablefold")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_io(p, state=True, out=True):
        p.add_argument("--data", required=True, help="CSV file with a header row")
        p.add_argument("--descriptor", help="column descriptor JSON")
        if state:
            p.add_argument("--state", help="state snapshot JSON")
        if out:
            p.add_argument("--out", required=True, help="output file")
        p.add_argument("--viewport-h", type=float, default=600.0,
                       help="viewport height in px (overview layout)")

    p_render = sub.add_parser("render", help="render the table to SVG")
    add_io(p_render)
    p_render.set_defaults(func=cmd_render)

    p_export = sub.add_parser("export", help="export the visible rows as CSV")
    add_io(p_export)
    p_export.set_defaults(func=cmd_export)

    p_validate = sub.add_parser("validate", help="check descriptor/state schemas")
    p_validate.add_argument("--descriptor")
    p_validate.add_argument("--state")
    p_validate.set_defaults(func=cmd_validate)

    p_serve = sub.add_parser("serve", help="start the HTTP/WebSocket service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "port", None) is not None and not 1 <= args.port <= 65535:
        print(f"port {args.port} outside [1, 65535]", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"cannot read {e.filename}", file=sys.stderr)
        return EXIT_IO
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as e:
        print(f"malformed JSON: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except TableFoldError as e:
        print(str(e), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
