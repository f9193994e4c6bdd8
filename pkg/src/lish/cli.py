"""Command-line front door.

Every subcommand is a thin wrapper over the core package: load a document
file, call one operation, print the result.  Machine-readable output
(JSON, renderings) goes to stdout; diagnostics go to stderr.  Exit codes:
0 success, 1 validation/policy failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import replace

from . import edit, governance, layout, model

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lish", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, with_file: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if with_file:
            p.add_argument("file", help="document file ('-' for stdin)")
        return p

    add("validate", "check a document against the template rule")
    add("fmt", "write the canonical JSON form to stdout")

    p = add("import-csv", "embed a CSV file as a grid document")
    p.add_argument("--delimiter", default=",", help="field delimiter (default ',')")

    p = add("render", "render the document as monospace text")
    p.add_argument("--width", type=int, default=None, help="cap cell content width")

    for name, help_text in (
        ("governed", "cells governed by the marginal cell at --path"),
        ("margins", "margins governing the body cell at --path"),
        ("formula", "effective formula for the body cell at --path"),
    ):
        p = add(name, help_text)
        p.add_argument("--path", required=True, help="comma-separated indices; '' is the root")

    p = add("apply", "apply a JSON array of edit commands")
    p.add_argument("--script", required=True, help="file with a JSON array of commands")

    add("layout", "print cell placements as JSON")

    p = sub.add_parser("serve", help="run the document service")
    p.add_argument("--addr", default=None, help="listen address host:port (or LISH_ADDR)")
    p.add_argument("--workspace", default=None, help="directory of *.lish.json files (or LISH_WORKSPACE)")
    p.add_argument("--ui", default=None, help="built editor directory to host at /ui (or LISH_UI)")
    return parser


def _read_input(path: str, stdin: bytes | None) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read() if stdin is None else stdin
    with open(path, "rb") as fh:
        return fh.read()


def _load_document(path: str, stdin: bytes | None) -> model.Document:
    doc = model.parse_json(_read_input(path, stdin))
    mode = os.environ.get("LISH_MODE")
    if mode:
        if mode not in (model.MODE_STRICT, model.MODE_RELAXED):
            raise model.SchemaError(f"LISH_MODE must be 'strict' or 'relaxed', not {mode!r}")
        doc = replace(doc, mode=mode)
    return doc


def _print_json(obj: object) -> None:
    sys.stdout.write(model.canonical_dumps(obj).decode("utf-8") + "\n")


def _cmd_validate(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    report = model.validate_document(doc)
    if report.ok:
        return EXIT_OK
    for v in report.violations:
        print(f"{model.fmt_path(v.path)} {v.kind}: {v.detail}", file=sys.stderr)
    return EXIT_INVALID


def _cmd_fmt(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    sys.stdout.write(model.serialize_json(doc).decode("utf-8") + "\n")
    report = model.validate_document(doc)
    if not report.ok:
        print(f"note: document has {len(report.violations)} validation problem(s)", file=sys.stderr)
    return EXIT_OK


def _cmd_import_csv(args, stdin: bytes | None) -> int:
    doc = edit.import_csv(_read_input(args.file, stdin), delimiter=args.delimiter)
    sys.stdout.write(model.serialize_json(doc).decode("utf-8") + "\n")
    return EXIT_OK


def _cmd_render(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    placements = layout.compute_layout(doc)
    sys.stdout.write(render := layout.render_text(placements, doc, max_cell_width=args.width))
    if render:
        sys.stdout.write("\n")
    return EXIT_OK


def _cmd_governed(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    cells = governance.governed_set(doc, model.parse_path(args.path))
    _print_json([list(p) for p in sorted(cells)])
    return EXIT_OK


def _cmd_margins(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    margins = governance.governing_margins(doc, model.parse_path(args.path))
    _print_json([list(p) for p in margins])
    return EXIT_OK


def _cmd_formula(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    resolution = governance.effective_formula(doc, model.parse_path(args.path))
    _print_json(resolution.to_json())
    return EXIT_OK


def _cmd_apply(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    with open(args.script, "rb") as fh:
        script = json.load(fh)
    if not isinstance(script, list):
        raise edit.EditError("the script must be a JSON array of commands")
    for entry in script:
        result = edit.apply(doc, edit.command_from_json(entry))
        doc = result.doc
        for diag in result.diagnostics:
            print(diag, file=sys.stderr)
    sys.stdout.write(model.serialize_json(doc).decode("utf-8") + "\n")
    return EXIT_OK


def _cmd_layout(args, stdin: bytes | None) -> int:
    doc = _load_document(args.file, stdin)
    placements = layout.compute_layout(doc)
    _print_json(layout.placements_to_json(placements))
    return EXIT_OK


def _cmd_serve(args, stdin: bytes | None) -> int:
    import uvicorn

    from .server import create_app

    addr = args.addr or os.environ.get("LISH_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    workspace = args.workspace or os.environ.get("LISH_WORKSPACE", ".")
    app = create_app(workspace, ui_dir=args.ui)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


_HANDLERS = {
    "validate": _cmd_validate,
    "fmt": _cmd_fmt,
    "import-csv": _cmd_import_csv,
    "render": _cmd_render,
    "governed": _cmd_governed,
    "margins": _cmd_margins,
    "formula": _cmd_formula,
    "apply": _cmd_apply,
    "layout": _cmd_layout,
    "serve": _cmd_serve,
}


def _dispatch(argv: list[str], stdin: bytes | None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args, stdin)
    except (model.SchemaError, model.PathError, model.ShapeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (edit.EditError, model.InvalidDocument, model.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        report = getattr(exc, "report", None)
        if report is not None:
            for v in report.violations:
                print(f"{model.fmt_path(v.path)} {v.kind}: {v.detail}", file=sys.stderr)
        return EXIT_INVALID


def run(argv: list[str], stdin: bytes = b"") -> tuple[bytes, bytes, int]:
    """Run one invocation, capturing output; the testable entry point."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = _dispatch(argv, stdin)
        except SystemExit as exc:  # argparse usage failures
            code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return out.getvalue().encode("utf-8"), err.getvalue().encode("utf-8"), code


def main() -> None:
    try:
        code = _dispatch(sys.argv[1:], None)
    except KeyboardInterrupt:
        code = EXIT_USAGE
    sys.exit(code)
