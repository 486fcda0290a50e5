"""Canonical JSON for the interchange formats.

All payloads are dumped with sorted keys and compact separators so that a
recompile of the same source yields byte-identical files.
"""

from __future__ import annotations

import json

from .frontend import SemanticTree
from .model import KINDS, CircuitModel, GateInstance, Operand, QvError


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def model_from_dict(data: dict) -> CircuitModel:
    """Rebuild a circuit model (including its tree) from canonical JSON data."""
    try:
        tree = SemanticTree.from_dict(data["tree"]) if "tree" in data else None
        gates = []
        for gd in data["gates"]:
            kind = KINDS[gd["kind"]]
            operands = tuple(Operand(o["q"], o["role"]) for o in gd["operands"])
            gates.append(
                GateInstance(
                    gd["id"],
                    kind,
                    operands,
                    tuple(gd.get("params", [])),
                    gd["t"],
                    tuple(gd["treePath"]),
                    tuple(gd.get("occPath", [gd.get("occ", 1)] * len(gd["treePath"]))),
                )
            )
        gates.sort(key=lambda g: g.timestamp)
        return CircuitModel(data["qubits"], gates, tree)
    except (KeyError, TypeError) as exc:
        raise QvError(f"malformed model JSON: {exc}") from exc


def flat_to_model(data: dict) -> CircuitModel:
    """Import a bare gate list lacking tree data; synthesizes a one-node tree.

    Expected shape: ``{"qubits": N, "gates": [{"kind": ..., "operands": [q, ...],
    "params": [...]}, ...]}``.
    """
    from .frontend import FUNCTION_KIND, ROOT_KIND, TreeNode

    try:
        qubits = int(data["qubits"])
        nodes = {
            0: TreeNode(0, "program", ROOT_KIND, [1]),
            1: TreeNode(1, "circuit", FUNCTION_KIND, []),
        }
        tree = SemanticTree(nodes)
        gates = []
        for i, gd in enumerate(data["gates"]):
            name = gd["kind"]
            if name not in KINDS:
                raise QvError(f"unknown gate kind in flat JSON: {name}")
            kind = KINDS[name]
            qs = [int(q) for q in gd["operands"]]
            if len(qs) != kind.arity:
                raise QvError(f"gate {name} expects {kind.arity} operands, got {len(qs)}")
            operands = tuple(Operand(q, role) for q, role in zip(qs, kind.roles))
            params = tuple(str(p) for p in gd.get("params", []))
            gates.append(GateInstance(i, kind, operands, params, i, (0, 1), (1, 1)))
        return CircuitModel(qubits, gates, tree)
    except (KeyError, TypeError, ValueError) as exc:
        raise QvError(f"malformed flat circuit JSON: {exc}") from exc
