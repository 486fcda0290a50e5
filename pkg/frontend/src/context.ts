// Context panels: provenance timeline, placement with the parallelism
// threshold slider (debounced at 100 ms), placement suggestions for a
// clicked gate, and the (optionally component-scoped) connectivity matrix.

import type { ApiClient } from './api.js';
import type { PlacementPayload, ViewState } from './types.js';

export const THRESHOLD_DEBOUNCE_MS = 100;

export class ContextPanels {
  lastPlacement: PlacementPayload | null = null;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private provenanceHost: HTMLElement,
    private placementHost: HTMLElement,
    private matrixHost: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
  ) {}

  async selectQubit(qubit: number | null): Promise<void> {
    this.state.selectedQubit = qubit;
    if (!this.state.modelId || qubit === null) {
      this.provenanceHost.innerHTML = '';
      return;
    }
    this.provenanceHost.innerHTML = await this.api.provenanceSvg(this.state.modelId, qubit);
  }

  setThreshold(value: number): void {
    this.state.threshold = value;
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.refreshPlacement();
    }, THRESHOLD_DEBOUNCE_MS);
  }

  async refreshPlacement(): Promise<void> {
    if (!this.state.modelId) return;
    const [svg, payload] = await Promise.all([
      this.api.placementSvg(this.state.modelId, this.state.threshold),
      this.api.placement(this.state.modelId, this.state.threshold),
    ]);
    this.lastPlacement = payload;
    this.placementHost.innerHTML = svg;
  }

  async selectGate(gateId: number | null): Promise<number[]> {
    this.state.selectedGate = gateId;
    if (!this.state.modelId || gateId === null) return [];
    const payload = await this.api.suggest(this.state.modelId, gateId);
    return payload.candidates;
  }

  async refreshConnectivity(scope: number | null): Promise<void> {
    if (!this.state.modelId) return;
    this.matrixHost.innerHTML = await this.api.connectivitySvg(this.state.modelId, scope);
  }
}
