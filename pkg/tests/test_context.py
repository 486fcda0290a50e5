"""Provenance, placement, suggestions, connectivity and entanglement."""

import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import check_per_qubit_order, gen_models
from qcvine.context import (
    connectivity,
    entanglement_history,
    parallelism_level,
    placement_context,
    provenance,
    suggest_placements,
)
from qcvine.frontend import SourceProgram, compile_source
from qcvine.model import DomainError
from qcvine.segmentation import FoldState, build_component_diagram

GHZ3 = "circuit main(3){ h q[0]; for i in 0..2 { cx q[i], q[i+1]; } }"


def _setup(src, fold=None, **params):
    m = compile_source(SourceProgram(src, params))
    fold = fold if fold is not None else FoldState(frozenset(m.tree.nodes))
    return m, build_component_diagram(m, fold)


def test_provenance_ghz_middle_qubit():
    m, d = _setup(GHZ3)
    tl = provenance(m, d, 1)
    assert [(e.label, e.column) for e in tl.events] == [("cx", 1), ("cx", 2)]
    assert tl.span == d.width == 3


def test_provenance_untouched_qubit():
    m, d = _setup("circuit main(4){ h q[0]; }")
    tl = provenance(m, d, 3)
    assert tl.events == () and tl.span == d.width


def test_provenance_out_of_range():
    m, d = _setup(GHZ3)
    with pytest.raises(DomainError):
        provenance(m, d, 9)


def test_parallelism_counts():
    m, d = _setup("circuit main(3){ h q[0]; h q[1]; h q[2]; x q[0]; }")
    pc = placement_context(m, d, threshold=1)
    assert pc.parallelism == [3, 1]
    assert sum(pc.parallelism) == len(d.super_gates)


def test_idle_spans_after_gap():
    # h sits at column 0; the next gate on its wire lands at column 5
    src = (
        "def filler(){ for i in 0..5 { x q[1]; } }"
        "def tail(){ x q[0]; }"
        "circuit main(2){ h q[0]; filler(); tail(); }"
    )
    m, d = _setup(src)
    pc = placement_context(m, d, threshold=1)
    h = next(sg for sg in d.super_gates if sg.label == "h")
    tail_x = next(sg for sg in d.super_gates if sg.label == "x" and 0 in sg.qubit_span)
    assert d.column_of[h.id] == 0 and d.column_of[tail_x.id] == 5
    span = next(s for s in pc.idle_spans if s.gate == h.id and s.wire == 0)
    assert span.after == 4 and span.before == 0
    span_x = next(s for s in pc.idle_spans if s.gate == tail_x.id and s.wire == 0)
    assert span_x.before == 4 and span_x.after == 0


def test_idle_extent_single_gate():
    m, d = _setup("circuit main(1){ h q[0]; }")
    pc = placement_context(m, d, threshold=1)
    assert pc.idle_extent == [0.0]
    assert d.width == 1


def test_idle_extent_fraction():
    m, d = _setup("circuit main(2){ h q[0]; x q[0]; y q[0]; h q[1]; }")
    pc = placement_context(m, d, threshold=1)
    assert pc.idle_extent[0] == 0.0
    assert pc.idle_extent[1] == pytest.approx(2 / 3)


def test_levels_split_at_threshold():
    m, d = _setup("circuit main(4){ h q[0]; h q[1]; h q[2]; h q[3]; x q[0]; x q[1]; y q[0]; }")
    pc = placement_context(m, d, threshold=3)
    # columns carry 4, 2, 1 gates
    assert pc.parallelism == [4, 2, 1]
    assert pc.levels[0] >= 2  # at or above threshold: heavy side
    assert pc.levels[1] <= 1 and pc.levels[2] <= 1


@given(
    p=st.integers(1, 40),
    t=st.integers(1, 40),
    peak=st.integers(1, 40),
)
def test_level_range_and_threshold_semantics(p, t, peak):
    peak = max(peak, p)
    level = parallelism_level(p, t, peak)
    assert 0 <= level <= 4
    assert (level >= 2) == (p >= t)


@given(p=st.integers(1, 30), peak=st.integers(1, 30))
def test_level_monotone_in_threshold(p, peak):
    peak = max(peak, p)
    levels = [parallelism_level(p, t, peak) for t in range(1, peak + 2)]
    assert all(a >= b for a, b in zip(levels, levels[1:]))


@given(t=st.integers(1, 30), peak=st.integers(1, 30))
def test_level_monotone_in_count(t, peak):
    levels = [parallelism_level(p, t, peak) for p in range(1, peak + 1)]
    assert all(a <= b for a, b in zip(levels, levels[1:]))


def test_suggest_no_legal_move():
    m, d = _setup("circuit main(1){ h q[0]; x q[0]; y q[0]; }")
    x = next(sg for sg in d.super_gates if sg.label == "x")
    assert suggest_placements(m, d, x.id) == []


def test_suggest_lone_gate_all_columns():
    src = "circuit main(2){ h q[1]; for i in 0..4 { x q[0]; } }"
    m, d = _setup(src)
    h = next(sg for sg in d.super_gates if sg.label == "h")
    assert d.width == 4
    cands = suggest_placements(m, d, h.id)
    assert cands == [1, 2, 3]  # every other column, light loads first


def test_suggest_ranked_by_parallelism():
    # wire q2 free except col 0; columns 1 and 2 differ in load
    src = "circuit main(3){ h q[2]; x q[0]; x q[1]; y q[0]; y q[1]; z q[0]; }"
    m, d = _setup(src)
    pc = placement_context(m, d, threshold=1)
    h = next(sg for sg in d.super_gates if sg.label == "h")
    cands = suggest_placements(m, d, h.id)
    loads = [pc.parallelism[c] for c in cands]
    assert loads == sorted(loads)


def test_suggest_unknown_gate():
    m, d = _setup(GHZ3)
    with pytest.raises(DomainError):
        suggest_placements(m, d, 999)


def test_suggest_moves_preserve_order():
    for model in gen_models(seed=77, count=15):
        d = build_component_diagram(model, FoldState(frozenset(model.tree.nodes)))
        for sg in d.super_gates[:6]:
            for target in suggest_placements(model, d, sg.id):
                moved = dict(d.column_of)
                moved[sg.id] = target
                shadow = type(d)(d.super_gates, d.super_bits, moved, max(moved.values()) + 1)
                check_per_qubit_order(model, shadow)


def test_connectivity_single_pair():
    m, d = _setup("circuit main(2){ cx q[0], q[1]; }")
    cm = connectivity(m)
    assert cm.cell(0, 1) == 1 and cm.cell(1, 0) == 1
    assert cm.cell(0, 0) == 0


def test_connectivity_ghz_tridiagonal():
    m, _ = _setup("circuit main(4){ h q[0]; for i in 0..3 { cx q[i], q[i+1]; } }")
    cm = connectivity(m)
    for i in range(4):
        for j in range(4):
            expect = 1 if abs(i - j) == 1 else 0
            assert cm.cell(i, j) == expect


def test_connectivity_single_qubit_only():
    m, _ = _setup("circuit main(3){ h q[0]; x q[1]; }")
    cm = connectivity(m)
    assert all(cm.cell(i, j) == 0 for i in range(3) for j in range(3))


def test_connectivity_scope():
    src = "def f(){ cx q[0], q[1]; } circuit main(3){ f(); cx q[1], q[2]; }"
    m, _ = _setup(src)
    ids = {n.label: n.id for n in m.tree.nodes.values()}
    scoped = connectivity(m, ids["f"])
    assert scoped.cell(0, 1) == 1 and scoped.cell(1, 2) == 0
    full = connectivity(m)
    root_scoped = connectivity(m, m.tree.root)
    assert root_scoped.counts == full.counts
    assert all(
        scoped.counts[i][j] <= full.counts[i][j] for i in range(3) for j in range(3)
    )


def test_connectivity_unknown_scope():
    m, _ = _setup(GHZ3)
    with pytest.raises(DomainError):
        connectivity(m, 404)


def test_entanglement_single_merge():
    m, _ = _setup("circuit main(3){ cx q[0], q[1]; }")
    hist = entanglement_history(m)
    assert hist.snapshots[0].groups == ((0,), (1,), (2,))
    assert hist.snapshots[-1].groups == ((0, 1), (2,))


def test_entanglement_ghz_all_merge():
    m, _ = _setup("circuit main(4){ h q[0]; for i in 0..3 { cx q[i], q[i+1]; } }")
    hist = entanglement_history(m)
    assert hist.snapshots[-1].groups == ((0, 1, 2, 3),)
    assert len(hist.snapshots) == 4  # initial + three merges


def test_entanglement_no_multiqubit_gates():
    m, _ = _setup("circuit main(3){ h q[0]; x q[1]; }")
    hist = entanglement_history(m)
    assert len(hist.snapshots) == 1
    assert hist.snapshots[0].timestamp == -1


def test_context_oracles_on_corpus():
    for model in gen_models(seed=911, count=25):
        # connectivity against plain pair enumeration
        cm = connectivity(model)
        counts = [[0] * model.qubit_count for _ in range(model.qubit_count)]
        for g in model.gates:
            qs = g.qubits
            if len(qs) < 2:
                continue
            for a in range(len(qs)):
                for b in range(a + 1, len(qs)):
                    counts[qs[a]][qs[b]] += 1
                    counts[qs[b]][qs[a]] += 1
        assert cm.counts == counts

        # final entanglement partition against graph components
        hist = entanglement_history(model)
        graph = nx.Graph()
        graph.add_nodes_from(range(model.qubit_count))
        for i in range(model.qubit_count):
            for j in range(i + 1, model.qubit_count):
                if counts[i][j]:
                    graph.add_edge(i, j)
        want = sorted(tuple(sorted(c)) for c in nx.connected_components(graph))
        got = sorted(hist.snapshots[-1].groups)
        assert got == want

        # partitions only ever coarsen
        for before, after in zip(hist.snapshots, hist.snapshots[1:]):
            for group in before.groups:
                assert any(set(group) <= set(g2) for g2 in after.groups)
