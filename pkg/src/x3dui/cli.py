"""x3dui command line: validate, compile, simulate, bundle, minify, docs."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from . import emitter, simulate, toolchain
from .layout import Rect
from .runtime import Scene, initial_state
from .widgets import (
    UIDLError,
    WidgetTree,
    assign_ids,
    load_theme,
    parse_ui_spec,
    validate_tree,
)
from .xmltree import XMLSyntaxError

log = logging.getLogger("x3dui")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3

HUD_FLAGS = {"proximity": "proximityRoute", "layer3d": "layer3d"}


class InputError(Exception):
    """Bad user input; maps to exit code 2."""


def _viewport(text: str) -> tuple[float, float]:
    try:
        w, h = (float(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("viewport must look like 800x600") from None
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("viewport sides must be positive")
    return w, h


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="x3dui", description="X3DUI GUI compiler and deployment tools")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("spec", help="UIDL file")
        p.add_argument("--theme", help="key=value theme file overriding Settings")

    p = sub.add_parser("validate", help="check a UIDL file against the structural rules")
    spec_args(p)

    p = sub.add_parser("compile", help="compile a UIDL file to X3D")
    spec_args(p)
    p.add_argument("-o", "--output", required=True, help="output .x3d file")
    p.add_argument("--hud", choices=sorted(HUD_FLAGS), default="proximity", help="HUD strategy")
    p.add_argument("--z-epsilon", type=_positive_float, default=0.001, help="depth step between siblings")
    p.add_argument("--frame-gap", type=_positive_float, default=0.1, help="depth step between frames")
    p.add_argument("--strict-standard", action="store_true", help="no vendor nodes or flags")
    p.add_argument("--library-url", default="x3dui.x3d", help="url of the prototype library")
    p.add_argument("--image-path", help="image directory carried by the Display")
    p.add_argument("--compact", action="store_true", help="minified output")
    p.add_argument("--viewport", type=_viewport, default="800x600", help="WIDTHxHEIGHT")

    p = sub.add_parser("simulate", help="replay an event script and write a trace")
    spec_args(p)
    p.add_argument("--events", required=True, help="JSON array or JSON-lines event file")
    p.add_argument("-o", "--output", required=True, help="trace file (JSON lines)")
    p.add_argument("--viewport", type=_viewport, default="800x600", help="WIDTHxHEIGHT")

    p = sub.add_parser("layout", help="print the initial widget rectangles as TSV")
    spec_args(p)
    p.add_argument("-o", "--output", help="also write the rectangles as JSON")
    p.add_argument("--figure", help="PNG outline of the desktop")
    p.add_argument("--viewport", type=_viewport, default="800x600", help="WIDTHxHEIGHT")

    p = sub.add_parser("bundle", help="merge a prototype directory into one file")
    p.add_argument("directory", help="directory with system/visual/group/layout subdirectories")
    p.add_argument("-o", "--output", required=True, help="bundled .x3d file")
    p.add_argument("--report", action="store_true", help="print the size report")
    p.add_argument("--json", help="write the size report as JSON")
    p.add_argument("--figure", help="PNG bar chart of bytes per category")

    p = sub.add_parser("minify", help="strip whitespace and comments from an X3D file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--keep-comments", action="store_true")

    p = sub.add_parser("docs", help="render @doc comments to HTML")
    p.add_argument("directory")
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("corpus", help="write the synthetic 27-prototype library")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=0)
    return parser


# --------------------------------------------------------------------------
# helpers


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def load_tree(spec: str, theme: str | None) -> tuple[WidgetTree, list[str]]:
    """Parsed, numbered tree plus the violation lines (empty when valid)."""
    try:
        tree = parse_ui_spec(_read_text(spec).encode("utf-8"))
    except (UIDLError, XMLSyntaxError) as exc:
        raise InputError(f"{spec}: {exc}") from None
    if theme:
        try:
            tree = replace(tree, settings=load_theme(theme, tree.settings))
        except (ValueError, KeyError) as exc:
            raise InputError(f"{theme}: {exc}") from None
    report = validate_tree(tree)
    return assign_ids(tree), [str(v) for v in report.violations]


def _valid_tree(args) -> WidgetTree:
    tree, problems = load_tree(args.spec, args.theme)
    if problems:
        raise InputError(f"{args.spec}: {len(problems)} validation error(s)\n" + "\n".join(problems))
    return tree


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    _, problems = load_tree(args.spec, args.theme)
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return EXIT_INPUT
    print(f"{args.spec}: ok")
    return EXIT_OK


def cmd_compile(args) -> int:
    tree = _valid_tree(args)
    config = emitter.EmitConfig(
        hud_strategy=HUD_FLAGS[args.hud],
        z_epsilon=args.z_epsilon,
        frame_layer_gap=args.frame_gap,
        use_texture_text=not args.strict_standard,
        library_url=args.library_url,
        image_path=args.image_path,
        strict_standard=args.strict_standard,
        viewport=args.viewport,
    )
    doc = emitter.emit_scene(tree, None, config)
    _write_text(args.output, emitter.serialize_xml(doc, pretty=not args.compact))
    log.debug("wrote %s", args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    tree = _valid_tree(args)
    try:
        records = simulate.load_events(_read_text(args.events))
        trace = simulate.run_trace(tree, records, args.viewport)
    except simulate.EventScriptError as exc:
        raise InputError(f"{args.events}: {exc}") from None
    _write_text(args.output, simulate.dump_trace(trace))
    log.debug("%d events replayed", len(records))
    return EXIT_OK


def cmd_layout(args) -> int:
    tree = _valid_tree(args)
    scene = Scene(tree)
    state = initial_state(scene, args.viewport)
    rows: list[tuple[int, str, str, Rect]] = []
    for fid in sorted(state.frames):
        for wid, r in sorted(scene.widget_rects(fid, state.frames[fid].rect).items()):
            node = scene.nodes[wid]
            rows.append((wid, node.name, node.get("name", ""), r))
    print("id\tkind\tname\tx\ty\tw\th")
    for wid, kind, name, r in rows:
        print("\t".join([str(wid), kind, name] + [emitter.fmt(v) for v in r.as_list()]))
    if args.output:
        data = [{"id": wid, "kind": kind, "name": name, "rect": r.as_list()} for wid, kind, name, r in rows]
        _write_text(args.output, json.dumps(data, indent=2) + "\n")
    if args.figure:
        # matplotlib is only imported when a figure is asked for
        from .report import layout_figure

        layout_figure(tree, args.figure, args.viewport)
    return EXIT_OK


def cmd_bundle(args) -> int:
    try:
        files = toolchain.load_corpus(args.directory)
        doc, report = toolchain.bundle(files)
    except toolchain.ToolchainError as exc:
        raise InputError(str(exc)) from None
    _write_text(args.output, toolchain.serialize(doc, pretty=False))
    if args.report:
        print(report.to_text(), end="")
    if args.json:
        _write_text(args.json, toolchain.report_json(report))
    if args.figure:
        from .report import bundle_figure

        bundle_figure(files, args.figure)
    return EXIT_OK


def cmd_minify(args) -> int:
    raw = Path(args.input).read_bytes()
    if not raw:
        raise InputError(f"{args.input}: empty file")
    try:
        out = toolchain.minify(raw, keep_comments=args.keep_comments)
    except XMLSyntaxError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    _write_text(args.output, out)
    after = len(out.encode("utf-8"))
    print(f"before: {len(raw)} bytes")
    print(f"after: {after} bytes")
    print(f"reduction: {toolchain.size_report(len(raw), after):.1f}%")
    return EXIT_OK


def cmd_docs(args) -> int:
    try:
        files = toolchain.load_corpus(args.directory)
    except toolchain.ToolchainError as exc:
        raise InputError(str(exc)) from None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", toolchain.DocWarning)
        model = toolchain.extract_docs(files)
    for w in model.warnings:
        print(f"warning: {w}", file=sys.stderr)
    pages = toolchain.render_docs(model)
    toolchain.write_pages(pages, args.output)
    print(f"pages: {len(pages)}")
    print(f"entries: {toolchain.count_rendered_entries(pages)}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    paths = toolchain.generate_corpus(args.directory, seed=args.seed)
    print(f"prototypes: {len(paths)}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "compile": cmd_compile,
    "simulate": cmd_simulate,
    "layout": cmd_layout,
    "bundle": cmd_bundle,
    "minify": cmd_minify,
    "docs": cmd_docs,
    "corpus": cmd_corpus,
}


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    log.propagate = False


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"x3dui: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"x3dui: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
