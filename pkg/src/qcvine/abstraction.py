"""Four-step visual abstraction of repetitive patterns.

The component diagram is turned into a grid (one row per rendered wire, one
column per layout column) with all rows and columns initially invisible.
Classified repetitions then mark only their first, second and last units'
rows and columns visible, everything outside a repetition marks itself, a
completion pass keeps exactly the gates whose operand rows and column are
all visible, and the final representation compacts the invisible runs into
fixed-size ellipsis bands carrying dot marks.

A repetition is only abstracted when it has at least four units; with three
or fewer, keeping the first two and the last would not shrink anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frontend import LOOP_KIND, SemanticTree
from .model import CircuitModel
from .segmentation import ComponentDiagram, SuperBit, SuperGate

MIN_ABSTRACTABLE = 4
KEEP_UNITS = (1, 2)  # plus the last


@dataclass
class _Elision:
    direction: str
    iterations: int
    rows: set[int] = field(default_factory=set)
    cols: set[int] = field(default_factory=set)


@dataclass
class Grid:
    """Occupancy grid over rendered wires and layout columns."""

    n_rows: int
    n_cols: int
    boxes: dict[int, tuple[tuple[int, ...], int]]  # super-gate id -> (rows, col)
    row_visible: list[bool]
    col_visible: list[bool]
    super_gates: list[SuperGate]
    super_bits: list[SuperBit]
    visible: set[int] = field(default_factory=set)
    elisions: dict[int, _Elision] = field(default_factory=dict)  # loop node -> spans


def gridify(diagram: ComponentDiagram) -> Grid:
    """Convert a component diagram into an all-invisible grid."""
    row_of: dict[int, int] = {}
    for bit in diagram.super_bits:
        for q in bit.qubits:
            row_of[q] = bit.id
    boxes: dict[int, tuple[tuple[int, ...], int]] = {}
    for sg in diagram.super_gates:
        rows = tuple(sorted({row_of[q] for q in sg.qubit_span}))
        boxes[sg.id] = (rows, diagram.column_of[sg.id])
    n_rows = len(diagram.super_bits)
    return Grid(
        n_rows,
        diagram.width,
        boxes,
        [False] * n_rows,
        [False] * diagram.width,
        list(diagram.super_gates),
        list(diagram.super_bits),
    )


def _executions(grid: Grid, tree: SemanticTree) -> dict[tuple, list[int]]:
    """Occurrences per dynamic run of each loop statement, keyed by context."""
    runs: dict[tuple, set[int]] = {}
    for sg in grid.super_gates:
        for g in sg.members:
            for i, nid in enumerate(g.tree_path):
                if tree.nodes[nid].kind != LOOP_KIND:
                    continue
                ctx = (nid, tuple(zip(g.tree_path[:i], g.occ_path[:i])))
                runs.setdefault(ctx, set()).add(g.occ_path[i])
    return {k: sorted(v) for k, v in runs.items()}


def _elided_by(sg: SuperGate, tree: SemanticTree, runs: dict[tuple, list[int]]) -> int | None:
    """Outermost abstractable repetition that hides this super-gate, if any."""
    g = sg.members[0]
    end = len(g.tree_path) if sg.label_index is None else sg.label_index + 1
    for i in range(end):
        nid = g.tree_path[i]
        node = tree.nodes[nid]
        if node.kind != LOOP_KIND or node.pattern is None:
            continue
        occs = runs[(nid, tuple(zip(g.tree_path[:i], g.occ_path[:i])))]
        total = len(occs)
        if total < MIN_ABSTRACTABLE:
            continue
        unit = occs.index(g.occ_path[i]) + 1
        if unit not in KEEP_UNITS and unit != total:
            return nid
    return None


def abbreviate(grid: Grid, tree: SemanticTree) -> Grid:
    """Mark visible the rows and columns of kept units and non-repetitive gates."""
    runs = _executions(grid, tree)
    for sg in grid.super_gates:
        rows, col = grid.boxes[sg.id]
        hidden_by = _elided_by(sg, tree, runs)
        if hidden_by is None:
            for r in rows:
                grid.row_visible[r] = True
            grid.col_visible[col] = True
        else:
            node = tree.nodes[hidden_by]
            el = grid.elisions.setdefault(
                hidden_by, _Elision(node.pattern.direction, node.pattern.iterations)
            )
            el.rows.update(rows)
            el.cols.add(col)
    # Rows and columns hosting no box hide nothing; keep them.
    occupied_rows = {r for rows, _ in grid.boxes.values() for r in rows}
    occupied_cols = {col for _, col in grid.boxes.values()}
    for r in range(grid.n_rows):
        if r not in occupied_rows:
            grid.row_visible[r] = True
    for c in range(grid.n_cols):
        if c not in occupied_cols:
            grid.col_visible[c] = True
    return grid


def complete(grid: Grid, model: CircuitModel) -> Grid:
    """A gate stays visible iff all its operand rows and its column are visible."""
    grid.visible = set()
    for sg_id, (rows, col) in grid.boxes.items():
        if grid.col_visible[col] and all(grid.row_visible[r] for r in rows):
            grid.visible.add(sg_id)
    return grid


@dataclass(frozen=True)
class Band:
    """A maximal run of invisible rows or columns, drawn one unit wide."""

    axis: str  # "row" | "col"
    from_index: int
    to_index: int
    dot_mark: bool = True

    @property
    def count(self) -> int:
        return self.to_index - self.from_index + 1


@dataclass(frozen=True)
class PlacedGate:
    id: int
    label: str
    row: int
    col: int
    rows: tuple[int, ...]
    sg: SuperGate


@dataclass(frozen=True)
class LegendEntry:
    node: int
    direction: str
    iterations: int


@dataclass
class AbstractionDiagram:
    gates: list[PlacedGate]
    bands: list[Band]
    legend: list[LegendEntry]
    row_slots: list[tuple[str, object]]  # ("wire", SuperBit) | ("band", band index)
    col_slots: list[tuple[str, object]]  # ("col", original col) | ("band", band index)
    diagonal_pairs: list[tuple[int, int]]  # (row band index, col band index)
    dots: list[tuple[int, int, str]]  # (row slot, col slot, "v"|"h"|"diag")

    def to_dict(self) -> dict:
        return {
            "gates": [
                {"id": g.id, "label": g.label, "row": g.row, "col": g.col, "rows": list(g.rows)}
                for g in self.gates
            ],
            "bands": [
                {"axis": b.axis, "from": b.from_index, "to": b.to_index, "count": b.count}
                for b in self.bands
            ],
            "legend": [
                {"node": e.node, "direction": e.direction, "iterations": e.iterations}
                for e in self.legend
            ],
        }


def _compact(visible: list[bool]) -> tuple[dict[int, int], list[tuple[str, int]], list[tuple[int, int]]]:
    """Map original indices to slot indices, inserting one slot per invisible run."""
    slot_of: dict[int, int] = {}
    slots: list[tuple[str, int]] = []
    bands: list[tuple[int, int]] = []
    i = 0
    n = len(visible)
    while i < n:
        if visible[i]:
            slot_of[i] = len(slots)
            slots.append(("keep", i))
            i += 1
        else:
            start = i
            while i < n and not visible[i]:
                i += 1
            bands.append((start, i - 1))
            slots.append(("band", len(bands) - 1))
    return slot_of, slots, bands


def represent(grid: Grid) -> AbstractionDiagram:
    """Compact visible rows/columns and emit ellipsis bands with dot marks."""
    row_map, row_slots_raw, row_runs = _compact(grid.row_visible)
    col_map, col_slots_raw, col_runs = _compact(grid.col_visible)

    bands: list[Band] = []
    row_band_idx: list[int] = []
    col_band_idx: list[int] = []
    for start, stop in row_runs:
        row_band_idx.append(len(bands))
        bands.append(Band("row", start, stop))
    for start, stop in col_runs:
        col_band_idx.append(len(bands))
        bands.append(Band("col", start, stop))

    row_slots: list[tuple[str, object]] = []
    row_band_slot: dict[int, int] = {}
    for kind, val in row_slots_raw:
        if kind == "keep":
            row_slots.append(("wire", grid.super_bits[val]))
        else:
            row_band_slot[row_band_idx[val]] = len(row_slots)
            row_slots.append(("band", row_band_idx[val]))
    col_slots: list[tuple[str, object]] = []
    col_band_slot: dict[int, int] = {}
    for kind, val in col_slots_raw:
        if kind == "keep":
            col_slots.append(("col", val))
        else:
            col_band_slot[col_band_idx[val]] = len(col_slots)
            col_slots.append(("band", col_band_idx[val]))

    def row_band_of(r: int) -> int:
        for idx, (rs, re) in zip(row_band_idx, row_runs):
            if rs <= r <= re:
                return idx
        raise AssertionError(f"row {r} not in any band")

    def col_band_of(c: int) -> int:
        for idx, (cs, ce) in zip(col_band_idx, col_runs):
            if cs <= c <= ce:
                return idx
        raise AssertionError(f"col {c} not in any band")

    gates: list[PlacedGate] = []
    dots: set[tuple[int, int, str]] = set()
    for sg in grid.super_gates:
        rows, col = grid.boxes[sg.id]
        if sg.id in grid.visible:
            new_rows = tuple(row_map[r] for r in rows)
            gates.append(PlacedGate(sg.id, sg.label, min(new_rows), col_map[col], new_rows, sg))
            continue
        # Dot marks stand in for hidden boxes wherever a band crosses kept space.
        if grid.col_visible[col]:
            for r in rows:
                if not grid.row_visible[r]:
                    dots.add((row_band_slot[row_band_of(r)], col_map[col], "v"))
        else:
            for r in rows:
                if grid.row_visible[r]:
                    dots.add((row_map[r], col_band_slot[col_band_of(col)], "h"))

    pairs: list[tuple[int, int]] = []
    legend: list[LegendEntry] = []
    for nid in sorted(grid.elisions):
        el = grid.elisions[nid]
        legend.append(LegendEntry(nid, el.direction, el.iterations))
        if el.direction != "diagonal":
            continue
        for rb, (rs, re) in zip(row_band_idx, row_runs):
            if not any(rs <= r <= re for r in el.rows):
                continue
            for cb, (cs, ce) in zip(col_band_idx, col_runs):
                if any(cs <= c <= ce for c in el.cols):
                    pairs.append((rb, cb))
    for rb, cb in sorted(set(pairs)):
        dots.add((row_band_slot[rb], col_band_slot[cb], "diag"))
    return AbstractionDiagram(
        gates, bands, legend, row_slots, col_slots, sorted(set(pairs)), sorted(dots)
    )


def abstract_diagram(diagram: ComponentDiagram, tree: SemanticTree, model: CircuitModel) -> AbstractionDiagram:
    """Run gridify, abbreviate, complete and represent in sequence."""
    return represent(complete(abbreviate(gridify(diagram), tree), model))
