"""Contextual analytics: qubit provenance, placement, connectivity, entanglement.

All functions are pure reads over an immutable model/diagram pair, so the
service can evaluate them concurrently per request.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import CircuitModel, DomainError
from .segmentation import ComponentDiagram


@dataclass(frozen=True)
class ProvenanceEvent:
    super_gate_id: int
    label: str
    column: int


@dataclass(frozen=True)
class ProvenanceTimeline:
    qubit: int
    events: tuple[ProvenanceEvent, ...]
    span: int

    def to_dict(self) -> dict:
        return {
            "qubit": self.qubit,
            "span": self.span,
            "events": [{"gate": e.super_gate_id, "label": e.label, "col": e.column} for e in self.events],
        }


def provenance(model: CircuitModel, diagram: ComponentDiagram, q: int) -> ProvenanceTimeline:
    """Every super-gate touching ``q`` at its layout column; span preserves intervals."""
    if not 0 <= q < model.qubit_count:
        raise DomainError(f"qubit {q} out of range 0..{model.qubit_count - 1}")
    events = [
        ProvenanceEvent(sg.id, sg.label, diagram.column_of[sg.id])
        for sg in diagram.super_gates
        if q in sg.qubit_span
    ]
    events.sort(key=lambda e: e.column)
    return ProvenanceTimeline(q, tuple(events), diagram.width)


@dataclass(frozen=True)
class IdleSpan:
    gate: int
    wire: int
    before: int
    after: int


@dataclass
class PlacementContext:
    parallelism: list[int]
    levels: list[int]  # -1 for empty columns
    idle_spans: list[IdleSpan]
    idle_extent: list[float]  # per qubit

    def to_dict(self) -> dict:
        return {
            "parallelism": list(self.parallelism),
            "levels": list(self.levels),
            "idleExtent": list(self.idle_extent),
            "idle": [
                {"gate": s.gate, "wire": s.wire, "before": s.before, "after": s.after}
                for s in self.idle_spans
            ],
        }


def parallelism_level(p: int, threshold: int, max_parallelism: int) -> int:
    """Quantize a column's gate count into five bins split at the threshold.

    Bins 0-1 sit below the threshold (light load), bins 2-4 at or above it
    (heavy load).  For a fixed count the level never increases as the
    threshold grows, which keeps the interactive slider monotone.
    """
    if p < threshold:
        return 0 if 2 * p <= threshold - 1 else 1
    span = max_parallelism - threshold
    if span <= 0:
        return 2
    return 2 + min((3 * (p - threshold)) // (span + 1), 2)


def placement_context(model: CircuitModel, diagram: ComponentDiagram, threshold: int) -> PlacementContext:
    """Per-column parallelism with threshold levels plus idle-space accounting."""
    if threshold < 1:
        raise DomainError("threshold must be >= 1")
    width = diagram.width
    parallelism = [0] * width
    occupied: dict[int, list[int]] = {}  # wire -> sorted occupied columns
    for sg in diagram.super_gates:
        col = diagram.column_of[sg.id]
        parallelism[col] += 1
        for q in sg.qubit_span:
            occupied.setdefault(q, []).append(col)
    for cols in occupied.values():
        cols.sort()
    max_par = max(parallelism, default=0)
    levels = [parallelism_level(p, threshold, max_par) if p > 0 else -1 for p in parallelism]

    idle_spans: list[IdleSpan] = []
    for sg in sorted(diagram.super_gates, key=lambda s: s.id):
        col = diagram.column_of[sg.id]
        for q in sorted(sg.qubit_span):
            cols = occupied[q]
            i = cols.index(col)
            prev_end = cols[i - 1] if i > 0 else -1
            next_start = cols[i + 1] if i + 1 < len(cols) else width
            idle_spans.append(IdleSpan(sg.id, q, col - prev_end - 1, next_start - col - 1))

    idle_extent = []
    for q in range(model.qubit_count):
        busy = len(set(occupied.get(q, ())))
        idle_extent.append(0.0 if width == 0 else (width - busy) / width)
    return PlacementContext(parallelism, levels, idle_spans, idle_extent)


def suggest_placements(model: CircuitModel, diagram: ComponentDiagram, gate_id: int) -> list[int]:
    """Columns a super-gate can move to without reordering any wire.

    Candidates are ranked by the parallelism of the destination column, so
    light-load columns come first; ties break toward earlier columns.
    """
    by_id = {sg.id: sg for sg in diagram.super_gates}
    if gate_id not in by_id:
        raise DomainError(f"unknown super-gate: {gate_id}")
    sg = by_id[gate_id]
    col = diagram.column_of[gate_id]
    lo, hi = -1, diagram.width
    busy: set[int] = set()
    for other in diagram.super_gates:
        if other.id == gate_id or not (other.qubit_span & sg.qubit_span):
            continue
        c = diagram.column_of[other.id]
        busy.add(c)
        if c < col:
            lo = max(lo, c)
        elif c > col:
            hi = min(hi, c)
    parallelism = [0] * diagram.width
    for other in diagram.super_gates:
        parallelism[diagram.column_of[other.id]] += 1
    candidates = [c for c in range(lo + 1, hi) if c != col and c not in busy]
    candidates.sort(key=lambda c: (parallelism[c], c))
    return candidates


@dataclass
class ConnectivityMatrix:
    n: int
    counts: list[list[int]]

    def cell(self, i: int, j: int) -> int:
        return self.counts[i][j]

    def to_dict(self) -> dict:
        cells = [
            [i, j, self.counts[i][j]]
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.counts[i][j] > 0
        ]
        return {"n": self.n, "cells": cells}


def connectivity(model: CircuitModel, scope: int | None = None) -> ConnectivityMatrix:
    """Count multi-qubit gates joining each qubit pair, optionally under one node."""
    if scope is not None and (model.tree is None or scope not in model.tree.nodes):
        raise DomainError(f"unknown tree node: {scope}")
    n = model.qubit_count
    counts = [[0] * n for _ in range(n)]
    for g in model.gates:
        if g.kind.arity < 2:
            continue
        if scope is not None and scope not in g.tree_path:
            continue
        qs = g.qubits
        for a in range(len(qs)):
            for b in range(a + 1, len(qs)):
                counts[qs[a]][qs[b]] += 1
                counts[qs[b]][qs[a]] += 1
    return ConnectivityMatrix(n, counts)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


@dataclass(frozen=True)
class Snapshot:
    timestamp: int
    groups: tuple[tuple[int, ...], ...]


@dataclass
class EntanglementHistory:
    snapshots: list[Snapshot]

    def to_dict(self) -> dict:
        return {
            "snapshots": [
                {"t": s.timestamp, "groups": [list(g) for g in s.groups]} for s in self.snapshots
            ]
        }


def _partition(uf: _UnionFind, n: int) -> tuple[tuple[int, ...], ...]:
    groups: dict[int, list[int]] = {}
    for q in range(n):
        groups.setdefault(uf.find(q), []).append(q)
    return tuple(tuple(g) for g in sorted(groups.values(), key=lambda g: g[0]))


def entanglement_history(model: CircuitModel) -> EntanglementHistory:
    """Structural entanglement over time: groups only ever merge.

    The initial all-singleton partition is recorded with timestamp -1, before
    any gate; every multi-qubit gate that actually merges groups appends a
    snapshot at its timestamp.
    """
    n = model.qubit_count
    uf = _UnionFind(n)
    snaps = [Snapshot(-1, _partition(uf, n))]
    for g in model.gates:
        if g.kind.arity < 2:
            continue
        changed = False
        qs = g.qubits
        for other in qs[1:]:
            changed |= uf.union(qs[0], other)
        if changed:
            snaps.append(Snapshot(g.timestamp, _partition(uf, n)))
    return EntanglementHistory(snaps)


@dataclass
class ContextBundle:
    """Everything the context views need for one render pass."""

    timeline: ProvenanceTimeline | None
    placement: PlacementContext
    connectivity: ConnectivityMatrix
    entanglement: EntanglementHistory


def build_bundle(
    model: CircuitModel,
    diagram: ComponentDiagram,
    qubit: int | None = None,
    threshold: int = 1,
    scope: int | None = None,
) -> ContextBundle:
    timeline = None if qubit is None else provenance(model, diagram, qubit)
    return ContextBundle(
        timeline,
        placement_context(model, diagram, threshold),
        connectivity(model, scope),
        entanglement_history(model),
    )
