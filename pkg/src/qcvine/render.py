"""Deterministic SVG rendering for every view.

The component and abstraction views share one grid painter, so an
abstraction with nothing elided is byte-identical to the component view.
Every super-gate glyph is wrapped in a ``<g id="sg-N">`` element; that id is
the hook interactive clients use for highlighting.  No timestamps, no
randomness: identical inputs yield identical bytes.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, fields, replace
from xml.sax.saxutils import escape

from .abstraction import AbstractionDiagram
from .context import ContextBundle
from .model import CONTROL, PLAIN, TARGET
from .segmentation import COMPONENT, ComponentDiagram, SuperBit, SuperGate

_HEX_DIGITS = set("0123456789abcdefABCDEF")


def _is_hex_color(v: str) -> bool:
    return len(v) == 7 and v.startswith("#") and all(c in _HEX_DIGITS for c in v[1:])


@dataclass(frozen=True)
class RenderTheme:
    unit: int = 44
    margin: int = 18
    gutter: int = 76
    font_family: str = "Menlo, Consolas, monospace"
    font_size: int = 11
    wire_color: str = "#444444"
    gate_fill: str = "#ffffff"
    gate_stroke: str = "#222222"
    component_fill: str = "#e8eef7"
    component_stroke: str = "#3a5a8c"
    text_color: str = "#111111"
    dot_color: str = "#666666"
    parallel_ramp: tuple[str, ...] = ("#2166ac", "#92c5de", "#f7f7f7", "#ef8a62", "#b2182b")
    idle_ramp: tuple[str, ...] = ("#edf8e9", "#bae4b3", "#74c476", "#238b45")
    matrix_fill: str = "#3a5a8c"
    group_palette: tuple[str, ...] = (
        "#4c78a8", "#f58518", "#54a24b", "#e45756",
        "#72b7b2", "#b279a2", "#eeca3b", "#9d755d",
    )

    def __post_init__(self) -> None:
        if self.unit < 8:
            raise ValueError("theme unit must be >= 8")
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, str) and v.startswith("#") and not _is_hex_color(v):
                raise ValueError(f"invalid color for {f.name}: {v}")
            if isinstance(v, tuple):
                for c in v:
                    if not _is_hex_color(c):
                        raise ValueError(f"invalid color in {f.name}: {c}")


def load_theme(path: str) -> RenderTheme:
    """Load theme overrides from a JSON file on top of the defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    known = {f.name for f in fields(RenderTheme)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown theme keys: {sorted(unknown)}")
    for key, value in data.items():
        if isinstance(value, list):
            data[key] = tuple(value)
    return replace(RenderTheme(), **data)


_CHAR_W = 6.6  # rough monospace advance at font size 11


def _fit_label(text: str, avail: float, count: int | None = None) -> str:
    if len(text) * _CHAR_W <= avail:
        return text
    suffix = f"×{count}" if count is not None else "…"
    keep = max(1, int(avail / _CHAR_W) - len(suffix))
    return text[:keep] + suffix


def _fmt(x: float) -> str:
    return f"{x:g}"


class _Svg:
    def __init__(self, width: float, height: float, theme: RenderTheme):
        self.theme = theme
        self.parts: list[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" '
            f'font-family="{escape(theme.font_family, {chr(34): "&quot;"})}" '
            f'font-size="{theme.font_size}">'
        ]

    def line(self, x1, y1, x2, y2, color, width=1.0, dash: str | None = None) -> None:
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{_fmt(width)}"{d}/>'
        )

    def rect(self, x, y, w, h, fill, stroke=None, opacity=None) -> None:
        s = f' stroke="{stroke}"' if stroke else ""
        o = f' opacity="{_fmt(opacity)}"' if opacity is not None else ""
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" fill="{fill}"{s}{o}/>'
        )

    def circle(self, cx, cy, r, fill, stroke=None) -> None:
        s = f' stroke="{stroke}"' if stroke else ""
        self.parts.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{fill}"{s}/>')

    def text(self, x, y, content, color=None, anchor="middle", rotate: float | None = None, size=None) -> None:
        color = color or self.theme.text_color
        tr = f' transform="rotate({_fmt(rotate)} {_fmt(x)} {_fmt(y)})"' if rotate else ""
        sz = f' font-size="{size}"' if size else ""
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'dominant-baseline="middle" fill="{color}"{sz}{tr}>{escape(content)}</text>'
        )

    def open_group(self, gid: str) -> None:
        self.parts.append(f'<g id="{escape(gid)}">')

    def close_group(self) -> None:
        self.parts.append("</g>")

    def finish(self) -> str:
        self.parts.append("</svg>")
        return "\n".join(self.parts)


@dataclass(frozen=True)
class _Glyph:
    sg: SuperGate
    col: int
    operand_rows: tuple[tuple[int, str], ...]  # (row, role) per operand, row-sorted
    span: tuple[int, int]  # min/max touched row


def _glyphs_for(super_gates: list[SuperGate], column_of, row_of_qubit) -> list[_Glyph]:
    out = []
    for sg in super_gates:
        rows = sorted({row_of_qubit[q] for q in sg.qubit_span})
        if sg.kind == COMPONENT:
            operand_rows: tuple[tuple[int, str], ...] = ()
        else:
            g = sg.members[0]
            operand_rows = tuple(sorted((row_of_qubit[op.q], op.role) for op in g.operands))
        out.append(_Glyph(sg, column_of[sg.id], operand_rows, (rows[0], rows[-1])))
    return sorted(out, key=lambda g: g.sg.id)


def _wire_label(bit: SuperBit) -> str:
    if bit.start == bit.stop:
        return f"q[{bit.start}]"
    return f"q[{bit.start}..{bit.stop}]"


def _gate_text(sg: SuperGate) -> str:
    if sg.kind == COMPONENT:
        return sg.label
    g = sg.members[0]
    base = sg.label.upper()
    if g.param_labels:
        return f"{base}({','.join(g.param_labels)})"
    return base


def _paint_glyphs(svg: _Svg, glyphs: list[_Glyph], ry, cx) -> None:
    theme = svg.theme
    u = theme.unit
    for glyph in glyphs:
        sg = glyph.sg
        svg.open_group(f"sg-{sg.id}")
        x = cx(glyph.col)
        if sg.kind == COMPONENT:
            top, bot = glyph.span
            y_top = ry(top) - u * 0.36
            y_bot = ry(bot) + u * 0.36
            svg.rect(x - u * 0.42, y_top, u * 0.84, y_bot - y_top,
                     theme.component_fill, theme.component_stroke)
            label = _gate_text(sg)
            if len(label) * _CHAR_W <= u * 0.84:
                svg.text(x, (y_top + y_bot) / 2, label)
            elif (y_bot - y_top) > u:
                svg.text(x, (y_top + y_bot) / 2,
                         _fit_label(label, y_bot - y_top - 8, len(sg.members)), rotate=-90)
            else:
                svg.text(x, (y_top + y_bot) / 2, _fit_label(label, u * 0.8, len(sg.members)))
        elif len(glyph.operand_rows) == 1:
            y = ry(glyph.operand_rows[0][0])
            svg.rect(x - u * 0.36, y - u * 0.36, u * 0.72, u * 0.72, theme.gate_fill, theme.gate_stroke)
            svg.text(x, y, _fit_label(_gate_text(sg), u * 0.7))
        else:
            top, bot = glyph.span
            svg.line(x, ry(top), x, ry(bot), theme.gate_stroke, 1.2)
            name = sg.label
            for row, role in glyph.operand_rows:
                y = ry(row)
                if role == CONTROL:
                    svg.circle(x, y, 3.5, theme.gate_stroke)
                elif name in ("cx", "ccx") and role == TARGET:
                    svg.circle(x, y, 7, "none", theme.gate_stroke)
                    svg.line(x - 7, y, x + 7, y, theme.gate_stroke)
                    svg.line(x, y - 7, x, y + 7, theme.gate_stroke)
                elif name == "cz" and role == TARGET:
                    svg.circle(x, y, 3.5, theme.gate_stroke)
                elif name in ("swap", "cswap") and role == PLAIN:
                    svg.line(x - 5, y - 5, x + 5, y + 5, theme.gate_stroke, 1.4)
                    svg.line(x - 5, y + 5, x + 5, y - 5, theme.gate_stroke, 1.4)
                else:  # labeled target/plain box (rotations etc.)
                    svg.rect(x - u * 0.34, y - u * 0.3, u * 0.68, u * 0.6, theme.gate_fill, theme.gate_stroke)
                    svg.text(x, y, _fit_label(_gate_text(sg), u * 0.64))
        svg.close_group()


def _paint_grid(
    row_slots: list[tuple[str, object]],
    n_cols: int,
    glyphs: list[_Glyph],
    dots: list[tuple[int, int, str]],
    theme: RenderTheme,
) -> str:
    u = theme.unit
    x0 = theme.margin + theme.gutter
    y0 = theme.margin
    width = x0 + max(n_cols, 1) * u + theme.margin
    height = y0 + max(len(row_slots), 1) * u + theme.margin
    svg = _Svg(width, height, theme)
    x_end = x0 + max(n_cols, 1) * u

    def ry(row: int) -> float:
        return y0 + row * u + u / 2

    def cx(col: int) -> float:
        return x0 + col * u + u / 2

    for r, (kind, payload) in enumerate(row_slots):
        y = ry(r)
        if kind == "wire":
            bit: SuperBit = payload  # type: ignore[assignment]
            if bit.start == bit.stop:
                svg.line(x0, y, x_end, y, theme.wire_color)
            else:
                svg.line(x0, y - 2, x_end, y - 2, theme.wire_color)
                svg.line(x0, y + 2, x_end, y + 2, theme.wire_color)
            svg.text(theme.margin + theme.gutter / 2 - 4, y, _wire_label(bit), anchor="middle")
        else:
            svg.text(theme.margin + theme.gutter / 2 - 4, y, "⋮", anchor="middle",
                     color=theme.dot_color)

    for row, col, style in dots:
        x, y = cx(col), ry(row)
        offs = {
            "v": ((0, -u * 0.22), (0, 0), (0, u * 0.22)),
            "h": ((-u * 0.22, 0), (0, 0), (u * 0.22, 0)),
            "diag": ((-u * 0.22, -u * 0.22), (0, 0), (u * 0.22, u * 0.22)),
        }[style]
        for dx, dy in offs:
            svg.circle(x + dx, y + dy, 2, theme.dot_color)

    _paint_glyphs(svg, glyphs, ry, cx)
    return svg.finish()


def render_component(diagram: ComponentDiagram, theme: RenderTheme = RenderTheme()) -> str:
    """Component view: one wire per super-bit, every super-gate at its column."""
    row_of = {}
    for bit in diagram.super_bits:
        for q in bit.qubits:
            row_of[q] = bit.id
    row_slots: list[tuple[str, object]] = [("wire", bit) for bit in diagram.super_bits]
    glyphs = _glyphs_for(diagram.super_gates, diagram.column_of, row_of)
    return _paint_grid(row_slots, diagram.width, glyphs, [], theme)


def render_abstraction(diagram: AbstractionDiagram, theme: RenderTheme = RenderTheme()) -> str:
    """Abstraction view: compacted grid plus dotted ellipsis bands."""
    row_of: dict[int, int] = {}
    for i, (kind, payload) in enumerate(diagram.row_slots):
        if kind == "wire":
            bit: SuperBit = payload  # type: ignore[assignment]
            for q in bit.qubits:
                row_of[q] = i
    # PlacedGate columns are already compact; rebuild glyphs from compact rows.
    visible = sorted((g.sg for g in diagram.gates), key=lambda sg: sg.id)
    compact_cols = {g.id: g.col for g in diagram.gates}
    glyphs = _glyphs_for(visible, compact_cols, row_of)
    return _paint_grid(diagram.row_slots, len(diagram.col_slots), glyphs, diagram.dots, theme)


def render_timeline(bundle: ContextBundle, theme: RenderTheme = RenderTheme()) -> str:
    """Provenance timeline: events at column-proportional positions."""
    tl = bundle.timeline
    width, height = 760.0, 96.0
    svg = _Svg(width, height, theme)
    x0, x1 = 60.0, width - 24.0
    y = height / 2
    if tl is None:
        svg.text(width / 2, y, "no qubit selected")
        return svg.finish()
    svg.text(30, y, f"q[{tl.qubit}]")
    svg.line(x0, y, x1, y, theme.wire_color)
    span = max(tl.span, 1)
    for e in tl.events:
        x = x0 + (e.column + 0.5) / span * (x1 - x0)
        svg.open_group(f"sg-{e.super_gate_id}")
        svg.rect(x - 14, y - 13, 28, 26, theme.component_fill, theme.component_stroke)
        svg.text(x, y, _fit_label(e.label, 26))
        svg.close_group()
        svg.text(x, y + 24, str(e.column), color=theme.dot_color, size=9)
    return svg.finish()


def _idle_cuts(spans: list[int]) -> list[float]:
    lengths = sorted(s for s in spans if s > 0)
    if not lengths:
        return []
    if len(lengths) < 4:
        return [float(lengths[-1])] * 3
    return statistics.quantiles(lengths, n=4)


def render_placement(
    diagram: ComponentDiagram, bundle: ContextBundle, theme: RenderTheme = RenderTheme()
) -> str:
    """Augmented circuit: parallelism-colored wire segments, idle highlights, idle extents."""
    pc = bundle.placement
    u = theme.unit
    x0 = theme.margin + theme.gutter
    y0 = theme.margin
    n_cols = max(diagram.width, 1)
    width = x0 + n_cols * u + theme.margin + 40
    height = y0 + max(len(diagram.super_bits), 1) * u + theme.margin
    svg = _Svg(width, height, theme)

    row_of = {}
    for bit in diagram.super_bits:
        for q in bit.qubits:
            row_of[q] = bit.id

    def ry(row: int) -> float:
        return y0 + row * u + u / 2

    def cx(col: int) -> float:
        return x0 + col * u + u / 2

    cuts = _idle_cuts([s.before for s in pc.idle_spans] + [s.after for s in pc.idle_spans])

    def idle_color(length: int) -> str:
        b = sum(1 for c in cuts if length > c)
        return theme.idle_ramp[min(b, len(theme.idle_ramp) - 1)]

    col_of = diagram.column_of
    seen_gaps: set[tuple[int, int, int]] = set()
    for s in pc.idle_spans:
        y = ry(row_of[s.wire])
        c = col_of[s.gate]
        if s.after > 0:
            key = (s.wire, c + 1, c + s.after)
            if key not in seen_gaps:
                seen_gaps.add(key)
                svg.rect(x0 + (c + 1) * u, y - u * 0.3, s.after * u, u * 0.6,
                         idle_color(s.after), opacity=0.55)
        if s.before > 0 and c - s.before == 0:
            key = (s.wire, 0, s.before - 1)
            if key not in seen_gaps:
                seen_gaps.add(key)
                svg.rect(x0, y - u * 0.3, s.before * u, u * 0.6, idle_color(s.before), opacity=0.55)

    # one segment per run of equal level, not per column
    runs: list[tuple[int, int, int]] = []
    c = 0
    while c < n_cols:
        lvl = pc.levels[c] if c < len(pc.levels) else -1
        start = c
        while c < n_cols and (pc.levels[c] if c < len(pc.levels) else -1) == lvl:
            c += 1
        runs.append((start, c, lvl))
    for bit in diagram.super_bits:
        y = ry(bit.id)
        for start, stop, lvl in runs:
            color = theme.wire_color if lvl < 0 else theme.parallel_ramp[lvl]
            w = 1.0 if lvl < 0 else 2.4
            svg.line(x0 + start * u, y, x0 + stop * u, y, color, w)
        svg.text(theme.margin + theme.gutter / 2 - 4, y, _wire_label(bit))
        extent = pc.idle_extent[bit.start]
        svg.text(x0 + n_cols * u + 20, y, f"{round(extent * 100)}%", color=theme.dot_color, size=9)

    glyphs = _glyphs_for(diagram.super_gates, diagram.column_of, row_of)
    _paint_glyphs(svg, glyphs, ry, cx)
    return svg.finish()


def render_matrix(bundle: ContextBundle, theme: RenderTheme = RenderTheme()) -> str:
    """Connectivity matrix with an entanglement-group strip underneath."""
    cm = bundle.connectivity
    n = max(cm.n, 1)
    cell = max(6, min(26, 440 // n))
    x0, y0 = 40.0, 28.0
    strip_h = cell
    snaps = bundle.entanglement.snapshots
    shown = snaps[-4:][::-1]
    width = x0 + n * cell + 24
    height = y0 + n * cell + 18 + len(shown) * (strip_h + 4) + 16
    svg = _Svg(width, height, theme)
    peak = max((cm.counts[i][j] for i in range(cm.n) for j in range(cm.n)), default=0)
    if cm.n:
        svg.rect(x0, y0, n * cell - 1, n * cell - 1, "#f4f4f4")
    for i in range(cm.n):
        for j in range(cm.n):
            count = cm.counts[i][j]
            if count > 0:
                op = 0.25 + 0.75 * (count / peak)
                svg.rect(x0 + j * cell, y0 + i * cell, cell - 1, cell - 1,
                         theme.matrix_fill, opacity=round(op, 3))
    step = max(1, n // 10)
    for i in range(0, cm.n, step):
        svg.text(x0 - 12, y0 + i * cell + cell / 2, str(i), size=8, color=theme.dot_color)
        svg.text(x0 + i * cell + cell / 2, y0 - 10, str(i), size=8, color=theme.dot_color)
    y = y0 + n * cell + 14
    for snap in shown:
        group_of = {}
        for gi, group in enumerate(snap.groups):
            for q in group:
                group_of[q] = gi
        for q in range(cm.n):
            color = theme.group_palette[group_of[q] % len(theme.group_palette)]
            svg.rect(x0 + q * cell, y, cell - 1, strip_h, color)
        svg.text(x0 - 18, y + strip_h / 2, f"t{snap.timestamp}" if snap.timestamp >= 0 else "t₀",
                 size=8, color=theme.dot_color)
        y += strip_h + 4
    return svg.finish()


def render_context(
    diagram: ComponentDiagram, bundle: ContextBundle, theme: RenderTheme = RenderTheme()
) -> dict[str, str]:
    """All three context documents keyed by view name."""
    return {
        "timeline": render_timeline(bundle, theme),
        "placement": render_placement(diagram, bundle, theme),
        "matrix": render_matrix(bundle, theme),
    }
