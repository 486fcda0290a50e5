"""Semantic-tree construction, DSL compilation and repetition classification.

The semantic tree has one node per function reachable from the circuit body
plus one per textual ``for`` loop.  A function called from several sites is a
single node that appears once per call site in its parents' children lists;
dynamic invocations are told apart by occurrence counters, not by extra
nodes.  Compilation interprets the program abstractly: every gate call emits
one :class:`~qcvine.model.GateInstance` stamped with the active node path
and the entry counters of those nodes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import dsl
from .model import CircuitModel, GateInstance, Operand, QvError

ROOT_KIND = "root"
FUNCTION_KIND = "function"
LOOP_KIND = "loop"

VERTICAL = "vertical"
HORIZONTAL = "horizontal"
DIAGONAL = "diagonal"


class CompileError(QvError):
    """Static or abstract-execution error with a source position."""

    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class SourceProgram:
    """DSL source plus the integer bindings for its free parameters."""

    text: str
    params: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class RepetitionKind:
    """Direction and shape of a classified loop repetition."""

    direction: str  # vertical | horizontal | diagonal
    unit_size: int
    iterations: int


@dataclass
class TreeNode:
    id: int
    label: str
    kind: str  # root | function | loop
    children: list[int] = field(default_factory=list)
    pattern: RepetitionKind | None = None


@dataclass
class SemanticTree:
    nodes: dict[int, TreeNode]
    root: int = 0
    # compile-time lookup: (line, col) of a for statement -> its node id;
    # labels alone cannot disambiguate two loops on one source line
    loop_nodes: dict[tuple[int, int], int] = field(default_factory=dict)

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def subtree_ids(self, node_id: int) -> set[int]:
        """All node ids reachable from ``node_id`` (inclusive)."""
        seen: set[int] = set()
        stack = [node_id]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(self.nodes[cur].children)
        return seen

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "nodes": [
                {
                    "id": n.id,
                    "label": n.label,
                    "kind": n.kind,
                    "children": list(n.children),
                    "pattern": None
                    if n.pattern is None
                    else {
                        "direction": n.pattern.direction,
                        "unitSize": n.pattern.unit_size,
                        "iterations": n.pattern.iterations,
                    },
                }
                for n in sorted(self.nodes.values(), key=lambda n: n.id)
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "SemanticTree":
        nodes: dict[int, TreeNode] = {}
        for nd in d["nodes"]:
            pat = nd.get("pattern")
            nodes[nd["id"]] = TreeNode(
                nd["id"],
                nd["label"],
                nd["kind"],
                list(nd["children"]),
                None
                if pat is None
                else RepetitionKind(pat["direction"], pat["unitSize"], pat["iterations"]),
            )
        return SemanticTree(nodes, d.get("root", 0))


def build_semantic_tree(program: dsl.Program) -> SemanticTree:
    """Derive the function/loop hierarchy statically from the AST.

    Raises :class:`CompileError` on calls to undefined functions and on
    recursion (direct or mutual).
    """
    nodes: dict[int, TreeNode] = {0: TreeNode(0, "program", ROOT_KIND)}
    func_ids: dict[str, int] = {}
    loop_nodes: dict[tuple[int, int], int] = {}
    counter = itertools.count(1)

    def visit_body(body: tuple[dsl.Stmt, ...], parent: TreeNode, active: tuple[str, ...]) -> None:
        for stmt in body:
            if isinstance(stmt, dsl.GateCall):
                continue
            if isinstance(stmt, dsl.ForLoop):
                nid = next(counter)
                node = TreeNode(nid, f"for@{stmt.span.line}", LOOP_KIND)
                nodes[nid] = node
                loop_nodes[(stmt.span.line, stmt.span.col)] = nid
                parent.children.append(nid)
                visit_body(stmt.body, node, active)
            else:  # FuncCall
                visit_call(stmt, parent, active)

    def visit_call(call: dsl.FuncCall, parent: TreeNode, active: tuple[str, ...]) -> None:
        fdef = program.funcs.get(call.name)
        if fdef is None:
            raise CompileError(call.span.line, call.span.col, f"undefined function: {call.name}")
        if call.name in active:
            raise CompileError(call.span.line, call.span.col, f"recursive call to {call.name!r} rejected")
        if len(call.args) != len(fdef.params):
            raise CompileError(
                call.span.line, call.span.col,
                f"{call.name} expects {len(fdef.params)} argument(s), got {len(call.args)}",
            )
        known = func_ids.get(call.name)
        if known is not None:
            parent.children.append(known)
            return
        nid = next(counter)
        node = TreeNode(nid, call.name, FUNCTION_KIND)
        nodes[nid] = node
        func_ids[call.name] = nid
        parent.children.append(nid)
        visit_body(fdef.body, node, active + (call.name,))

    main_id = next(counter)
    main = TreeNode(main_id, program.circuit_name, FUNCTION_KIND)
    nodes[main_id] = main
    nodes[0].children.append(main_id)
    func_ids[program.circuit_name] = main_id
    visit_body(program.body, main, (program.circuit_name,))
    return SemanticTree(nodes, loop_nodes=loop_nodes)


class _Interpreter:
    def __init__(self, program: dsl.Program, tree: SemanticTree, params: dict[str, int]):
        self.program = program
        self.tree = tree
        self.params = dict(params)
        self.gates: list[GateInstance] = []
        self.entries: dict[int, int] = {}
        self.path: list[int] = []
        self.occs: list[int] = []
        self.qubit_count = 0
        self._func_ids = {n.label: n.id for n in tree.nodes.values() if n.kind == FUNCTION_KIND}

    def run(self) -> CircuitModel:
        n = self._eval(self.program.qubit_expr, self.params)
        if n < 1:
            span = self.program.qubit_expr.span
            raise CompileError(span.line, span.col, f"qubit count must be positive, got {n}")
        self.qubit_count = n
        self._enter(self.tree.root)
        self._enter(self.tree.nodes[self.tree.root].children[0])
        self._exec_body(self.program.body, dict(self.params))
        return CircuitModel(self.qubit_count, self.gates, self.tree)

    def _enter(self, node_id: int) -> None:
        self.entries[node_id] = self.entries.get(node_id, 0) + 1
        self.path.append(node_id)
        self.occs.append(self.entries[node_id])

    def _exit(self) -> None:
        self.path.pop()
        self.occs.pop()

    def _exec_body(self, body: tuple[dsl.Stmt, ...], env: dict[str, int]) -> None:
        for stmt in body:
            if isinstance(stmt, dsl.GateCall):
                self._emit(stmt, env)
            elif isinstance(stmt, dsl.ForLoop):
                self._exec_loop(stmt, env)
            else:
                self._exec_call(stmt, env)

    def _emit(self, stmt: dsl.GateCall, env: dict[str, int]) -> None:
        qubits = [self._eval(e, env) for e in stmt.operands]
        for q in qubits:
            if not 0 <= q < self.qubit_count:
                raise CompileError(
                    stmt.span.line, stmt.span.col,
                    f"qubit index out of range: {q} (circuit has {self.qubit_count} qubits)",
                )
        if len(set(qubits)) != len(qubits):
            raise CompileError(
                stmt.span.line, stmt.span.col,
                f"gate {stmt.kind.name!r} operands must be distinct, got {qubits}",
            )
        operands = tuple(Operand(q, role) for q, role in zip(qubits, stmt.kind.roles))
        gid = len(self.gates)
        self.gates.append(
            GateInstance(
                gid, stmt.kind, operands, stmt.angle_labels, gid,
                tuple(self.path), tuple(self.occs),
            )
        )

    def _exec_loop(self, stmt: dsl.ForLoop, env: dict[str, int]) -> None:
        start = self._eval(stmt.start, env)
        stop = self._eval(stmt.stop, env)
        if stop < start:
            raise CompileError(stmt.span.line, stmt.span.col, f"inverted loop range {start}..{stop}")
        node_id = self.tree.loop_nodes[(stmt.span.line, stmt.span.col)]
        for value in range(start, stop):
            self._enter(node_id)
            inner = dict(env)
            inner[stmt.var] = value
            self._exec_body(stmt.body, inner)
            self._exit()

    def _exec_call(self, stmt: dsl.FuncCall, env: dict[str, int]) -> None:
        fdef = self.program.funcs[stmt.name]
        args = [self._eval(e, env) for e in stmt.args]
        frame = dict(self.params)
        frame.update(zip(fdef.params, args))
        self._enter(self._func_ids[stmt.name])
        self._exec_body(fdef.body, frame)
        self._exit()

    def _eval(self, expr: dsl.Expr, env: dict[str, int]) -> int:
        if isinstance(expr, dsl.Num):
            return expr.value
        if isinstance(expr, dsl.Name):
            if expr.ident not in env:
                raise CompileError(expr.span.line, expr.span.col, f"parameter unbound: {expr.ident}")
            return env[expr.ident]
        if isinstance(expr, dsl.Neg):
            return -self._eval(expr.operand, env)
        left = self._eval(expr.left, env)
        right = self._eval(expr.right, env)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if right == 0:
            raise CompileError(expr.span.line, expr.span.col, "division by zero")
        return left // right


def compile_ast(program: dsl.Program, tree: SemanticTree, params: dict[str, int]) -> CircuitModel:
    """Abstractly execute ``program`` and return the aligned circuit model."""
    return _Interpreter(program, tree, params).run()


def _loop_executions(node_id: int, position_gates: list[tuple[GateInstance, int]]) -> list[list[tuple[int, list[GateInstance]]]]:
    """Group a loop node's gates into executions of consecutive iterations.

    ``position_gates`` pairs each gate with the index of ``node_id`` on its
    tree path.  Returns, per execution (one dynamic run of the loop
    statement), the ordered ``(occurrence, gates)`` iterations.
    """
    by_exec: dict[tuple, dict[int, list[GateInstance]]] = {}
    for g, i in position_gates:
        exec_key = tuple(zip(g.tree_path[:i], g.occ_path[:i]))
        by_exec.setdefault(exec_key, {}).setdefault(g.occ_path[i], []).append(g)
    out = []
    for key in sorted(by_exec, key=lambda k: min(min(g.timestamp for g in it) for it in by_exec[k].values())):
        iters = sorted(by_exec[key].items())
        out.append(iters)
    return out


def _classify_execution(iterations: list[tuple[int, list[GateInstance]]]) -> RepetitionKind | None:
    """Apply the footprint rules to one execution's iterations."""
    if len(iterations) < 2:
        return None
    kinds0 = [g.kind.name for g in iterations[0][1]]
    footprints: list[set[int]] = []
    for _, gates in iterations:
        if [g.kind.name for g in gates] != kinds0:
            return None  # non-uniform unit
        footprints.append({q for g in gates for q in g.qubits})
    first = footprints[0]
    if all(fp == first for fp in footprints[1:]):
        return RepetitionKind(HORIZONTAL, len(kinds0), len(iterations))
    shift = min(footprints[1]) - min(footprints[0])
    if shift == 0:
        return None
    disjoint = not (footprints[0] & footprints[1])
    for a, b in zip(footprints, footprints[1:]):
        if {q + shift for q in a} != b:
            return None
        if bool(a & b) == disjoint:
            return None
    direction = VERTICAL if disjoint else DIAGONAL
    return RepetitionKind(direction, len(kinds0), len(iterations))


def classify_loops(tree: SemanticTree, model: CircuitModel) -> SemanticTree:
    """Fill in repetition patterns for loop nodes whose executions agree.

    Executions with fewer than two iterations carry no repetition evidence
    and are ignored; a loop with conflicting or unclassifiable executions
    gets no pattern.
    """
    per_node: dict[int, list[tuple[GateInstance, int]]] = {}
    for g in model.gates:
        for i, node_id in enumerate(g.tree_path):
            if tree.nodes[node_id].kind == LOOP_KIND:
                per_node.setdefault(node_id, []).append((g, i))
    depths = _node_depths(tree)
    loop_ids = sorted(per_node, key=lambda nid: -depths.get(nid, 0))
    for node_id in loop_ids:
        results = []
        for iterations in _loop_executions(node_id, per_node[node_id]):
            if len(iterations) < 2:
                continue
            results.append(_classify_execution(iterations))
        if results and all(r is not None for r in results):
            directions = {r.direction for r in results}  # type: ignore[union-attr]
            if len(directions) == 1:
                tree.nodes[node_id].pattern = results[0]
                continue
        tree.nodes[node_id].pattern = None
    return tree


def _node_depths(tree: SemanticTree) -> dict[int, int]:
    depth = {tree.root: 0}
    stack = [tree.root]
    while stack:
        cur = stack.pop()
        for child in tree.nodes[cur].children:
            if child not in depth:
                depth[child] = depth[cur] + 1
                stack.append(child)
    return depth


def compile_source(src: SourceProgram) -> CircuitModel:
    """Parse, build the tree, compile and classify in one call."""
    ast = dsl.parse(src.text)
    tree = build_semantic_tree(ast)
    model = compile_ast(ast, tree, src.params)
    classify_loops(tree, model)
    return model
