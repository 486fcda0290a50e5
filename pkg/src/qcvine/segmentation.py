"""Component view: gate grouping, qubit bundling and semantic-preserving layout.

Grouping resolves each gate against the fold state: the shallowest folded
node on its tree path (all proper ancestors unfolded) labels the gate, and
gates sharing that (node, occurrence) merge into a component super-gate.
A gate whose whole path is unfolded stays primitive.

Layout works bottom-up over dynamic blocks.  A block is one function
invocation or one execution of a loop statement; sibling blocks under the
same parent are concatenated left to right in time order so that every
sub-circuit keeps a contiguous, ordered column interval.  Inside a block,
gates and the per-iteration boxes of a folded loop are placed greedily at
the leftmost column where all their wires are free, which compresses width
without ever reordering the gates on any single wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frontend import FUNCTION_KIND, LOOP_KIND, SemanticTree
from .model import CircuitModel, DomainError, GateInstance


@dataclass(frozen=True)
class FoldState:
    """Set of unfolded semantic-tree node ids; the root is always unfolded."""

    unfolded: frozenset[int] = frozenset()

    @staticmethod
    def of(*node_ids: int) -> "FoldState":
        return FoldState(frozenset(node_ids))

    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.unfolded))


PRIMITIVE = "primitive"
COMPONENT = "component"


@dataclass
class SuperGate:
    """A primitive gate or a folded component, the unit the diagram places."""

    id: int
    label: str
    kind: str  # primitive | component
    members: list[GateInstance]
    node_id: int
    occurrence: int
    qubit_span: frozenset[int]
    label_index: int | None  # position of the folding node on the members' path

    @property
    def member_ids(self) -> list[int]:
        return sorted(g.id for g in self.members)

    @property
    def start_time(self) -> int:
        return min(g.timestamp for g in self.members)

    @property
    def wire_range(self) -> tuple[int, int]:
        return min(self.qubit_span), max(self.qubit_span)


@dataclass(frozen=True)
class SuperBit:
    """A maximal contiguous run of qubits sharing one super-gate sequence."""

    id: int
    start: int
    stop: int  # inclusive

    @property
    def qubits(self) -> range:
        return range(self.start, self.stop + 1)


@dataclass
class ComponentDiagram:
    super_gates: list[SuperGate]
    super_bits: list[SuperBit]
    column_of: dict[int, int]
    width: int

    def to_dict(self) -> dict:
        return {
            "superBits": [{"id": b.id, "from": b.start, "to": b.stop} for b in self.super_bits],
            "superGates": [
                {
                    "id": sg.id,
                    "label": sg.label,
                    "kind": sg.kind,
                    "col": self.column_of[sg.id],
                    "qubits": sorted(sg.qubit_span),
                    "node": sg.node_id,
                    "occ": sg.occurrence,
                }
                for sg in self.super_gates
            ],
            "width": self.width,
        }


def group_gates(model: CircuitModel, fold: FoldState) -> list[SuperGate]:
    """Aggregate gates into super-gates according to the fold state."""
    tree = _tree_of(model)
    for nid in fold.unfolded:
        if nid not in tree.nodes:
            raise DomainError(f"unknown tree node in fold state: {nid}")
    groups: dict[tuple, list[GateInstance]] = {}
    label_at: dict[tuple, int | None] = {}
    for g in model.gates:
        idx = _label_position(g, fold)
        if idx is None:
            key = ("gate", g.id)
        else:
            key = ("node", g.tree_path[idx], g.occ_path[idx])
        groups.setdefault(key, []).append(g)
        label_at[key] = idx
    ordered = sorted(groups.items(), key=lambda kv: min(g.timestamp for g in kv[1]))
    out: list[SuperGate] = []
    for sg_id, (key, members) in enumerate(ordered):
        idx = label_at[key]
        span = frozenset(q for g in members for q in g.qubits)
        if idx is None:
            g = members[0]
            out.append(SuperGate(sg_id, g.kind.name, PRIMITIVE, members,
                                 g.tree_path[-1], g.occ_path[-1], span, None))
        else:
            node = tree.nodes[key[1]]
            kind = COMPONENT if len(members) > 1 else PRIMITIVE
            label = node.label if len(members) > 1 else members[0].kind.name
            out.append(SuperGate(sg_id, label, kind, members, key[1], key[2], span, idx))
    return out


def _label_position(g: GateInstance, fold: FoldState) -> int | None:
    # Skip the root (index 0): it is implicitly unfolded.
    for i in range(1, len(g.tree_path)):
        if g.tree_path[i] not in fold.unfolded:
            return i
    return None


def bundle_qubits(model: CircuitModel, super_gates: list[SuperGate]) -> list[SuperBit]:
    """Bundle contiguous qubits that pass through identical super-gate sequences."""
    ordered = sorted(super_gates, key=lambda sg: sg.start_time)
    sequences: list[tuple[int, ...]] = []
    for q in range(model.qubit_count):
        sequences.append(tuple(sg.id for sg in ordered if q in sg.qubit_span))
    bits: list[SuperBit] = []
    start = 0
    for q in range(1, model.qubit_count + 1):
        if q == model.qubit_count or sequences[q] != sequences[start]:
            bits.append(SuperBit(len(bits), start, q - 1))
            start = q
    return bits


# Layout


@dataclass
class _Block:
    key: tuple
    items: list = field(default_factory=list)  # _GateItem | _CompItem | _Block
    width: int = 0
    local_col: int = 0  # column within the parent block
    placements: dict[int, int] = field(default_factory=dict)  # sg id -> local col

    @property
    def start_time(self) -> int:
        return min(it.start_time for it in self.items)

    @property
    def wires(self) -> frozenset[int]:
        out: set[int] = set()
        for it in self.items:
            out |= it.wires
        return frozenset(out)


@dataclass
class _GateItem:
    sg: SuperGate

    @property
    def start_time(self) -> int:
        return self.sg.start_time

    @property
    def wires(self) -> frozenset[int]:
        return self.sg.qubit_span


@dataclass
class _CompItem:
    """A folded function invocation: one column wide, serialized like a block."""

    sg: SuperGate

    @property
    def start_time(self) -> int:
        return self.sg.start_time

    @property
    def wires(self) -> frozenset[int]:
        return self.sg.qubit_span


def _block_chain(sg: SuperGate, tree: SemanticTree) -> tuple[list[tuple], bool]:
    """Blocks enclosing ``sg`` (outermost first) and whether it serializes.

    Function entries on the path become invocation blocks; loop entries
    become execution blocks keyed by the dynamic context in which the loop
    statement ran (the iteration layer itself is not a block).
    """
    g = sg.members[0]
    end = len(g.tree_path) if sg.label_index is None else sg.label_index
    chain: list[tuple] = []
    for i in range(end):
        node_id = g.tree_path[i]
        if tree.nodes[node_id].kind == LOOP_KIND:
            ctx = tuple(zip(g.tree_path[:i], g.occ_path[:i]))
            chain.append(("exec", node_id, ctx))
        else:
            chain.append(("call", node_id, g.occ_path[i]))
    serializes = False
    if sg.label_index is not None:
        node = tree.nodes[g.tree_path[sg.label_index]]
        if node.kind == LOOP_KIND:
            # Iteration boxes live inside their loop's execution block and
            # pack like gates, so repeated units stack instead of trailing off.
            ctx = tuple(zip(g.tree_path[: sg.label_index], g.occ_path[: sg.label_index]))
            chain.append(("exec", node.id, ctx))
        else:
            serializes = True
    return chain, serializes


def layout(model: CircuitModel, super_gates: list[SuperGate]) -> ComponentDiagram:
    """Compute the column of every super-gate and the bundled wires."""
    tree = _tree_of(model)
    blocks: dict[tuple, _Block] = {}

    def block_for(chain: list[tuple]) -> _Block:
        cur: _Block | None = None
        for depth in range(len(chain)):
            key = tuple(chain[: depth + 1])
            blk = blocks.get(key)
            if blk is None:
                blk = _Block(key)
                blocks[key] = blk
                if cur is not None:
                    cur.items.append(blk)
            cur = blk
        assert cur is not None
        return cur

    for sg in super_gates:
        chain, serializes = _block_chain(sg, tree)
        home = block_for(chain)
        home.items.append(_CompItem(sg) if serializes else _GateItem(sg))

    column_of: dict[int, int] = {}
    width = 0
    if blocks:
        root = blocks[(("call", tree.root, 1),)]
        _layout_block(root)
        _resolve(root, 0, column_of)
        width = root.width

    bits = bundle_qubits(model, super_gates)
    return ComponentDiagram(list(super_gates), bits, column_of, width)


def _layout_block(block: _Block) -> None:
    frontier: dict[int, int] = {}
    last_block_end = 0
    block_width = 0
    for item in sorted(block.items, key=lambda it: it.start_time):
        if isinstance(item, _Block):
            _layout_block(item)
            item_width = item.width
            serial = True
        elif isinstance(item, _CompItem):
            item_width = 1
            serial = True
        else:
            item_width = 1
            serial = False
        wires = item.wires
        col = max((frontier.get(w, 0) for w in wires), default=0)
        if serial:
            col = max(col, last_block_end)
            last_block_end = col + item_width
        for w in wires:
            frontier[w] = col + item_width
        if isinstance(item, _Block):
            item.local_col = col
        else:
            block.placements[item.sg.id] = col
        block_width = max(block_width, col + item_width)
    block.width = block_width


def _resolve(block: _Block, offset: int, column_of: dict[int, int]) -> None:
    for item in block.items:
        if isinstance(item, _Block):
            _resolve(item, offset + item.local_col, column_of)
        else:
            column_of[item.sg.id] = offset + block.placements[item.sg.id]


def build_component_diagram(model: CircuitModel, fold: FoldState) -> ComponentDiagram:
    """Group, bundle and lay out in one step."""
    return layout(model, group_gates(model, fold))


def _tree_of(model: CircuitModel) -> SemanticTree:
    if model.tree is None:
        raise DomainError("model carries no semantic tree")
    return model.tree
