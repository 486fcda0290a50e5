"""Shared fixtures: program corpus generation and independent layout oracles."""

from __future__ import annotations

import random
from pathlib import Path

from qcvine.frontend import LOOP_KIND, SourceProgram, compile_source
from qcvine.model import CircuitModel
from qcvine.segmentation import ComponentDiagram, SuperGate

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

SINGLE = ("h", "x", "y", "z", "s", "t")
ROT = ("rx", "ry", "rz")


def load_program(name: str) -> str:
    return (PROGRAMS / name).read_text(encoding="utf-8")


def _const_gate(rng: random.Random, nq: int) -> str:
    r = rng.random()
    if r < 0.45 or nq < 2:
        kind = rng.choice(SINGLE + ROT)
        q = rng.randrange(nq)
        return f"{kind}(t) q[{q}];" if kind in ROT else f"{kind} q[{q}];"
    if r < 0.85 or nq < 3:
        kind = rng.choice(("cx", "cz", "swap", "cry", "ryy"))
        a, b = rng.sample(range(nq), 2)
        angle = "(t) " if kind in ("cry", "ryy") else " "
        return f"{kind}{angle}q[{a}], q[{b}];"
    kind = rng.choice(("ccx", "cswap"))
    a, b, c = rng.sample(range(nq), 3)
    return f"{kind} q[{a}], q[{b}], q[{c}];"


def _loop(rng: random.Random, nq: int, var: str, force_iters: int | None = None) -> list[str]:
    styles = ["vert1", "horiz"]
    if nq >= 4:
        styles += ["vert2", "diag"]
    if nq >= 5:
        styles.append("diag3")
    style = rng.choice(styles)
    if style == "vert1":
        stride = rng.choice((1, 2))
        iters = force_iters or rng.randint(2, max(2, (nq - 1) // stride + 1))
        iters = min(iters, (nq - 1) // stride + 1)
        kind = rng.choice(SINGLE)
        return [f"for {var} in 0..{iters} {{", f"  {kind} q[{stride}*{var}];", "}"]
    if style == "horiz":
        iters = force_iters or rng.randint(2, 7)
        kind = rng.choice(ROT)
        q = rng.randrange(nq)
        return [f"for {var} in 0..{iters} {{", f"  {kind}(t) q[{q}];", "}"]
    if style == "vert2":
        iters = force_iters or rng.randint(2, nq // 2)
        iters = min(iters, nq // 2)
        return [f"for {var} in 0..{iters} {{", f"  cx q[2*{var}], q[2*{var}+1];", "}"]
    if style == "diag":
        iters = force_iters or rng.randint(2, nq - 1)
        iters = min(iters, nq - 1)
        kind = rng.choice(("cx", "cz", "swap"))
        return [f"for {var} in 0..{iters} {{", f"  {kind} q[{var}], q[{var}+1];", "}"]
    iters = force_iters or rng.randint(2, nq - 2)
    iters = min(iters, nq - 2)
    return [f"for {var} in 0..{iters} {{", f"  ccx q[{var}], q[{var}+1], q[{var}+2];", "}"]


def gen_source(rng: random.Random, max_qubits: int = 12, inject_repetition: bool = False) -> str:
    nq = rng.randint(6 if inject_repetition else 3, max_qubits)
    var_counter = [0]

    def fresh_var() -> str:
        var_counter[0] += 1
        return f"i{var_counter[0]}"

    def gen_body(depth: int, budget: int, callables: list[str]) -> list[str]:
        lines: list[str] = []
        n_stmts = rng.randint(1, 4)
        for _ in range(n_stmts):
            r = rng.random()
            if r < 0.4 or depth >= 2:
                lines.append(_const_gate(rng, nq))
            elif r < 0.75:
                lines.extend(_loop(rng, nq, fresh_var()))
            elif callables and r < 0.9:
                lines.append(f"{rng.choice(callables)}();")
            else:
                var = fresh_var()
                iters = rng.randint(2, 3)
                inner = gen_body(depth + 1, budget, callables)
                lines.append(f"for {var} in 0..{iters} {{")
                lines.extend("  " + ln for ln in inner)
                lines.append("}")
        return lines

    funcs: list[str] = []
    callables: list[str] = []
    for fi in range(rng.randint(0, 2)):
        name = f"part{fi}"
        body = gen_body(1, 10, list(callables))
        funcs.append(f"def {name}() {{")
        funcs.extend("  " + ln for ln in body)
        funcs.append("}")
        callables.append(name)

    main = gen_body(0, 30, callables)
    if inject_repetition:
        main.extend(_loop(rng, nq, fresh_var(), force_iters=rng.randint(4, max(4, min(8, nq - 1)))))
    lines = funcs + [f"circuit main({nq}) {{"] + ["  " + ln for ln in main] + ["}"]
    return "\n".join(lines) + "\n"


def gen_models(seed: int, count: int, max_gates: int = 50, inject_repetition: bool = False,
               max_qubits: int = 12) -> list[CircuitModel]:
    """Deterministic corpus of compiled random programs."""
    rng = random.Random(seed)
    models: list[CircuitModel] = []
    while len(models) < count:
        src = gen_source(rng, max_qubits=max_qubits, inject_repetition=inject_repetition)
        model = compile_source(SourceProgram(src, {}))
        if 1 <= len(model.gates) <= max_gates:
            models.append(model)
    return models


# Independent layout oracles (deliberately re-derived from first principles).


def check_per_qubit_order(model: CircuitModel, diagram: ComponentDiagram) -> None:
    for q in range(model.qubit_count):
        touching = [sg for sg in diagram.super_gates if q in sg.qubit_span]
        by_col = sorted(touching, key=lambda sg: diagram.column_of[sg.id])
        by_time = sorted(touching, key=lambda sg: sg.start_time)
        assert [sg.id for sg in by_col] == [sg.id for sg in by_time], f"wire {q} reordered"


def check_column_exclusivity(diagram: ComponentDiagram) -> None:
    per_col: dict[int, list[SuperGate]] = {}
    for sg in diagram.super_gates:
        per_col.setdefault(diagram.column_of[sg.id], []).append(sg)
    for col, gates in per_col.items():
        for i in range(len(gates)):
            for j in range(i + 1, len(gates)):
                assert not (gates[i].qubit_span & gates[j].qubit_span), (
                    f"column {col} shared by gates {gates[i].id} and {gates[j].id}"
                )


def _gate_blocks(model: CircuitModel) -> dict[tuple, dict]:
    """Test-local reconstruction of dynamic blocks from raw gate alignment."""
    tree = model.tree
    assert tree is not None
    blocks: dict[tuple, dict] = {}
    for g in model.gates:
        chain: list[tuple] = []
        for i, node_id in enumerate(g.tree_path):
            if tree.nodes[node_id].kind == LOOP_KIND:
                chain.append(("exec", node_id, tuple(zip(g.tree_path[:i], g.occ_path[:i]))))
            else:
                chain.append(("call", node_id, g.occ_path[i]))
            key = tuple(chain)
            info = blocks.setdefault(key, {"gates": [], "parent": tuple(chain[:-1]) or None})
            info["gates"].append(g)
    return blocks


def check_sibling_intervals(model: CircuitModel, diagram: ComponentDiagram) -> None:
    """Dynamic sub-circuits under one parent occupy disjoint, time-ordered intervals."""
    col_of_gate = {}
    for sg in diagram.super_gates:
        for g in sg.members:
            col_of_gate[g.id] = diagram.column_of[sg.id]
    blocks = _gate_blocks(model)
    children: dict[tuple | None, list[tuple]] = {}
    for key, info in blocks.items():
        children.setdefault(info["parent"], []).append(key)
    for parent, keys in children.items():
        if parent is None:
            continue
        spans = []
        for key in keys:
            gates = blocks[key]["gates"]
            cols = [col_of_gate[g.id] for g in gates]
            spans.append((min(g.timestamp for g in gates), min(cols), max(cols), key))
        spans.sort()
        for (t1, lo1, hi1, k1), (t2, lo2, hi2, k2) in zip(spans, spans[1:]):
            assert hi1 < lo2, f"sibling blocks overlap: {k1} [{lo1},{hi1}] vs {k2} [{lo2},{hi2}]"


def check_leaf_asap_width(model: CircuitModel, diagram: ComponentDiagram) -> None:
    """Leaf blocks are exactly as wide as a greedy earliest-slot schedule."""
    col_of_gate = {}
    for sg in diagram.super_gates:
        for g in sg.members:
            col_of_gate[g.id] = diagram.column_of[sg.id]
    blocks = _gate_blocks(model)
    non_leaf = {info["parent"] for info in blocks.values() if info["parent"] is not None}
    for key, info in blocks.items():
        if key in non_leaf:
            continue
        gates = sorted(info["gates"], key=lambda g: g.timestamp)
        frontier: dict[int, int] = {}
        width = 0
        for g in gates:
            col = max((frontier.get(q, 0) for q in g.qubits), default=0)
            for q in g.qubits:
                frontier[q] = col + 1
            width = max(width, col + 1)
        cols = [col_of_gate[g.id] for g in gates]
        actual = max(cols) - min(cols) + 1
        assert actual == width, f"leaf block {key}: width {actual} != greedy {width}"
