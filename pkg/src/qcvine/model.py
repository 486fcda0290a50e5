"""Circuit intermediate representation shared by every pipeline stage.

A compiled circuit is a list of gate instances in global emission order.
Each gate knows which semantic-tree nodes were active when it was emitted
(``tree_path``) and the invocation counter of each of those nodes at that
moment (``occ_path``).  Those two parallel tuples are what the grouping,
layout and abstraction stages key on; nothing downstream re-executes the
source program.

Angle parameters are opaque display strings.  The model never evaluates
them and carries no state vectors, measurements or classical registers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .frontend import SemanticTree


class QvError(Exception):
    """Base class for all engine errors."""


class DomainError(QvError):
    """A structurally valid model was queried with an invalid argument."""


CONTROL = "control"
TARGET = "target"
PLAIN = "plain"


@dataclass(frozen=True)
class GateKind:
    """A gate type: name, operand count, angle-parameter count and operand roles."""

    name: str
    arity: int
    params: int
    roles: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.arity not in (1, 2, 3):
            raise ValueError(f"unsupported arity {self.arity}")
        if len(self.roles) != self.arity:
            raise ValueError("roles must match arity")


def _kinds(*specs: tuple[str, int, tuple[str, ...]]) -> dict[str, GateKind]:
    return {name: GateKind(name, len(roles), nparams, roles) for name, nparams, roles in specs}


KINDS: dict[str, GateKind] = _kinds(
    ("h", 0, (PLAIN,)),
    ("x", 0, (PLAIN,)),
    ("y", 0, (PLAIN,)),
    ("z", 0, (PLAIN,)),
    ("s", 0, (PLAIN,)),
    ("t", 0, (PLAIN,)),
    ("rx", 1, (PLAIN,)),
    ("ry", 1, (PLAIN,)),
    ("rz", 1, (PLAIN,)),
    ("ryy", 1, (PLAIN, PLAIN)),
    ("cx", 0, (CONTROL, TARGET)),
    ("cz", 0, (CONTROL, TARGET)),
    ("cry", 1, (CONTROL, TARGET)),
    ("crz", 1, (CONTROL, TARGET)),
    ("swap", 0, (PLAIN, PLAIN)),
    ("cswap", 0, (CONTROL, PLAIN, PLAIN)),
    ("ccx", 0, (CONTROL, CONTROL, TARGET)),
)


@dataclass(frozen=True)
class Operand:
    """A qubit reference with the role it plays for its gate."""

    q: int
    role: str


@dataclass(frozen=True)
class GateInstance:
    """One emitted gate, aligned to the semantic tree.

    ``tree_path`` runs from the root node to the node whose body emitted the
    gate.  ``occ_path`` holds, for every node on that path, the value of the
    node's entry counter at emission time (1-based).  The last entry is the
    classic loop-time label.
    """

    id: int
    kind: GateKind
    operands: tuple[Operand, ...]
    param_labels: tuple[str, ...]
    timestamp: int
    tree_path: tuple[int, ...]
    occ_path: tuple[int, ...]

    @property
    def occurrence(self) -> int:
        return self.occ_path[-1]

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(op.q for op in self.operands)


@dataclass
class CircuitModel:
    """Immutable-after-construction circuit: qubit count, gates, semantic tree."""

    qubit_count: int
    gates: list[GateInstance]
    tree: "SemanticTree | None" = None

    def gates_on_qubit(self, q: int) -> list[GateInstance]:
        """All gates touching qubit ``q`` in timestamp order."""
        if not 0 <= q < self.qubit_count:
            raise DomainError(f"qubit {q} out of range 0..{self.qubit_count - 1}")
        return [g for g in self.gates if q in g.qubits]

    def to_dict(self) -> dict:
        d = {
            "qubits": self.qubit_count,
            "gates": [
                {
                    "id": g.id,
                    "kind": g.kind.name,
                    "operands": [{"q": op.q, "role": op.role} for op in g.operands],
                    "params": list(g.param_labels),
                    "t": g.timestamp,
                    "treePath": list(g.tree_path),
                    "occPath": list(g.occ_path),
                    "occ": g.occurrence,
                }
                for g in self.gates
            ],
        }
        if self.tree is not None:
            d["tree"] = self.tree.to_dict()
        return d


@dataclass(frozen=True)
class Violation:
    """A broken model invariant, attributable to one gate where possible."""

    gate_id: int | None
    rule: str
    message: str


def validate(model: CircuitModel) -> list[Violation]:
    """Check every model invariant; violations are data, not exceptions."""
    out: list[Violation] = []
    if model.qubit_count < 1:
        out.append(Violation(None, "qubit-count", "qubit count must be positive"))
    seen_ts: set[int] = set()
    prev_ts = -1
    for g in model.gates:
        if g.timestamp in seen_ts:
            out.append(Violation(g.id, "timestamp-unique", f"timestamp {g.timestamp} reused"))
        seen_ts.add(g.timestamp)
        if g.timestamp <= prev_ts:
            out.append(Violation(g.id, "timestamp-order", "gates not sorted by timestamp"))
        prev_ts = max(prev_ts, g.timestamp)
        if len(set(g.qubits)) != len(g.qubits):
            out.append(Violation(g.id, "operands-distinct", f"duplicate operand in {g.qubits}"))
        for op in g.operands:
            if not 0 <= op.q < model.qubit_count:
                out.append(Violation(g.id, "operand-range", f"qubit {op.q} out of range"))
        if len(g.operands) != g.kind.arity:
            out.append(Violation(g.id, "arity", f"{g.kind.name} expects {g.kind.arity} operands"))
        if len(g.param_labels) != g.kind.params:
            out.append(Violation(g.id, "params", f"{g.kind.name} expects {g.kind.params} params"))
        if not g.tree_path:
            out.append(Violation(g.id, "tree-path", "empty tree path"))
        elif len(g.occ_path) != len(g.tree_path):
            out.append(Violation(g.id, "occ-path", "occ path length mismatch"))
        if model.tree is not None and g.tree_path:
            if g.tree_path[0] != model.tree.root:
                out.append(Violation(g.id, "tree-path", "tree path does not begin at root"))
            for node in g.tree_path:
                if node not in model.tree.nodes:
                    out.append(Violation(g.id, "tree-path", f"unknown tree node {node}"))
    return out
