"""qcvine: semantic-aware quantum circuit visualization engine."""

from .abstraction import AbstractionDiagram, Grid, abbreviate, abstract_diagram, complete, gridify, represent
from .context import (
    ContextBundle,
    build_bundle,
    connectivity,
    entanglement_history,
    placement_context,
    provenance,
    suggest_placements,
)
from .dsl import ParseError, parse
from .frontend import (
    CompileError,
    RepetitionKind,
    SemanticTree,
    SourceProgram,
    build_semantic_tree,
    classify_loops,
    compile_ast,
    compile_source,
)
from .model import KINDS, CircuitModel, DomainError, GateInstance, QvError, validate
from .render import RenderTheme, load_theme, render_abstraction, render_component, render_context
from .segmentation import (
    ComponentDiagram,
    FoldState,
    SuperBit,
    SuperGate,
    build_component_diagram,
    bundle_qubits,
    group_gates,
    layout,
)

__version__ = "0.1.0"
