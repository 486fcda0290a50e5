// Payload shapes of the qcvine HTTP API, mirrored one-to-one.

export interface RepetitionPattern {
  direction: 'vertical' | 'horizontal' | 'diagonal';
  unitSize: number;
  iterations: number;
}

export interface TreeNodePayload {
  id: number;
  label: string;
  kind: 'root' | 'function' | 'loop';
  children: number[];
  pattern: RepetitionPattern | null;
}

export interface StructurePayload {
  root: number;
  nodes: TreeNodePayload[];
}

export interface SuperGatePayload {
  id: number;
  label: string;
  kind: 'primitive' | 'component';
  col: number;
  qubits: number[];
  node: number;
  occ: number;
}

export interface ComponentPayload {
  superBits: { id: number; from: number; to: number }[];
  superGates: SuperGatePayload[];
  width: number;
}

export interface AbstractionPayload {
  gates: { id: number; label: string; row: number; col: number; rows: number[] }[];
  bands: { axis: 'row' | 'col'; from: number; to: number; count: number }[];
  legend: { node: number; direction: string; iterations: number }[];
}

export interface ProvenancePayload {
  qubit: number;
  span: number;
  events: { gate: number; label: string; col: number }[];
}

export interface PlacementPayload {
  parallelism: number[];
  levels: number[];
  idleExtent: number[];
  idle: { gate: number; wire: number; before: number; after: number }[];
}

export interface SuggestPayload {
  gate: number;
  candidates: number[];
}

export interface ConnectivityPayload {
  n: number;
  cells: [number, number, number][];
}

export interface EntanglementPayload {
  snapshots: { t: number; groups: number[][] }[];
}

export interface ViewState {
  modelId: string | null;
  unfolded: Set<number>;
  selectedNode: number | null;
  selectedQubit: number | null;
  threshold: number;
  selectedGate: number | null;
}

export function initialViewState(): ViewState {
  return {
    modelId: null,
    unfolded: new Set(),
    selectedNode: null,
    selectedQubit: null,
    threshold: 1,
    selectedGate: null,
  };
}
