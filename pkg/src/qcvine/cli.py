"""Command-line entry points: compile, render, analyze, serve.

Parse and compile failures print ``file:line:col: message`` on stderr and
exit 1.  The ``QCVINE_THEME`` environment variable (or ``--theme``) points
at a JSON theme file overriding the default look.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .abstraction import abstract_diagram
from .context import build_bundle, connectivity, entanglement_history, placement_context, provenance, suggest_placements
from .dsl import ParseError
from .frontend import CompileError, SemanticTree, SourceProgram, compile_source, _node_depths
from .model import CircuitModel, DomainError, QvError
from .render import RenderTheme, load_theme, render_abstraction, render_component, render_matrix, render_placement, render_timeline
from .segmentation import FoldState, build_component_diagram
from .serialize import canonical_json, flat_to_model, model_from_dict

VIEWS = ("component", "abstraction", "provenance", "placement", "connectivity")
ANALYSES = ("provenance", "placement", "connectivity", "entanglement", "suggest")


def _parse_params(pairs: list[str]) -> dict[str, int]:
    params: dict[str, int] = {}
    for pair in pairs:
        name, eq, value = pair.partition("=")
        if not eq or not name:
            raise QvError(f"bad --param {pair!r}, expected name=int")
        try:
            params[name] = int(value)
        except ValueError as exc:
            raise QvError(f"bad --param {pair!r}, expected name=int") from exc
    return params


def _load_theme(args: argparse.Namespace) -> RenderTheme:
    path = getattr(args, "theme", None) or os.environ.get("QCVINE_THEME")
    return load_theme(path) if path else RenderTheme()


def _write(out: str | None, body: str) -> None:
    if out:
        Path(out).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body if body.endswith("\n") else body + "\n")


def _load_model(path: str) -> CircuitModel:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return model_from_dict(data)


def _fold_state(args: argparse.Namespace, tree: SemanticTree) -> FoldState:
    if args.unfold is not None:
        ids = []
        for chunk in args.unfold.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            nid = int(chunk)
            if nid not in tree.nodes:
                raise QvError(f"unknown node id in unfold list: {nid}")
            ids.append(nid)
        return FoldState(frozenset(ids))
    if args.fold_depth is not None:
        depths = _node_depths(tree)
        return FoldState(frozenset(n for n, d in depths.items() if d <= args.fold_depth))
    return FoldState(frozenset(tree.nodes))  # fully unfolded


def cmd_compile(args: argparse.Namespace) -> int:
    try:
        text = Path(args.path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return 1
    try:
        if args.from_json:
            model = flat_to_model(json.loads(text))
        else:
            model = compile_source(SourceProgram(text, _parse_params(args.param)))
    except (ParseError, CompileError) as exc:
        line = getattr(exc, "line", 0)
        col = getattr(exc, "col", 0)
        msg = str(exc).split(": ", 1)[-1]
        print(f"{args.path}:{line}:{col}: {msg}", file=sys.stderr)
        return 1
    except (QvError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(args.output, canonical_json(model.to_dict()))
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    try:
        model = _load_model(args.model)
        theme = _load_theme(args)
        tree = model.tree
        if tree is None:
            raise QvError("model has no tree")
        fold = _fold_state(args, tree)
        diagram = build_component_diagram(model, fold)
        if args.view == "component":
            body = canonical_json(diagram.to_dict()) if args.json else render_component(diagram, theme)
        elif args.view == "abstraction":
            abs_d = abstract_diagram(diagram, tree, model)
            body = canonical_json(abs_d.to_dict()) if args.json else render_abstraction(abs_d, theme)
        elif args.view == "provenance":
            if args.qubit is None:
                raise QvError("--view provenance requires --qubit")
            tl = provenance(model, diagram, args.qubit)
            if args.json:
                body = canonical_json(tl.to_dict())
            else:
                body = render_timeline(build_bundle(model, diagram, qubit=args.qubit), theme)
        elif args.view == "placement":
            pc = placement_context(model, diagram, args.threshold)
            if args.json:
                body = canonical_json(pc.to_dict())
            else:
                body = render_placement(diagram, build_bundle(model, diagram, threshold=args.threshold), theme)
        elif args.view == "connectivity":
            matrix = connectivity(model, args.node)
            if args.json:
                body = canonical_json(matrix.to_dict())
            else:
                body = render_matrix(build_bundle(model, diagram, scope=args.node), theme)
        else:
            raise QvError(f"unknown view: {args.view}")
    except (QvError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(args.output, body)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        model = _load_model(args.model)
        tree = model.tree
        if tree is None:
            raise QvError("model has no tree")
        fold = _fold_state(args, tree)
        diagram = build_component_diagram(model, fold)
        if args.view == "provenance":
            if args.qubit is None:
                raise QvError("--view provenance requires --qubit")
            payload = provenance(model, diagram, args.qubit).to_dict()
        elif args.view == "placement":
            payload = placement_context(model, diagram, args.threshold).to_dict()
        elif args.view == "connectivity":
            payload = connectivity(model, args.node).to_dict()
        elif args.view == "entanglement":
            payload = entanglement_history(model).to_dict()
        elif args.view == "suggest":
            if args.gate is None:
                raise QvError("--view suggest requires --gate")
            payload = {"gate": args.gate, "candidates": suggest_placements(model, diagram, args.gate)}
        else:
            raise QvError(f"unknown analysis: {args.view}")
    except (QvError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write(args.output, canonical_json(payload))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app, register_model

    try:
        theme = _load_theme(args)
        app = create_app(theme)
        if args.path:
            text = Path(args.path).read_text(encoding="utf-8")
            mid = register_model(app, text, _parse_params(args.param))
            print(f"model {mid} ready")
    except (ParseError, CompileError) as exc:
        line = getattr(exc, "line", 0)
        col = getattr(exc, "col", 0)
        msg = str(exc).split(": ", 1)[-1]
        print(f"{args.path}:{line}:{col}: {msg}", file=sys.stderr)
        return 1
    except (QvError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _add_fold_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fold-depth", type=int, default=None, help="unfold nodes down to this tree depth")
    p.add_argument("--unfold", type=str, default=None, help="comma-separated node ids to unfold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcvine", description="quantum circuit visualization engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile DSL source to canonical model JSON")
    p.add_argument("path")
    p.add_argument("--param", action="append", default=[], metavar="NAME=INT")
    p.add_argument("--from-json", action="store_true", help="treat input as a flat gate-list JSON")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("render", help="render a view of a compiled model")
    p.add_argument("model")
    p.add_argument("--view", required=True, choices=VIEWS)
    _add_fold_flags(p)
    p.add_argument("--qubit", type=int, default=None)
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--node", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit the view's JSON payload instead of SVG")
    p.add_argument("--theme", default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("analyze", help="emit context analytics as JSON")
    p.add_argument("model")
    p.add_argument("--view", required=True, choices=ANALYSES)
    _add_fold_flags(p)
    p.add_argument("--qubit", type=int, default=None)
    p.add_argument("--threshold", type=int, default=1)
    p.add_argument("--node", type=int, default=None)
    p.add_argument("--gate", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("path", nargs="?", default=None, help="optional DSL file to preload")
    p.add_argument("--param", action="append", default=[], metavar="NAME=INT")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--theme", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
