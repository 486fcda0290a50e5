// Explorer bootstrap: wires the panels together against one ViewState.
// Configuration is a single baseUrl (?api=... or same origin).

import { ApiClient } from './api.js';
import { ContextPanels } from './context.js';
import { DiagramPanel } from './diagrams.js';
import { StructurePanel } from './structure.js';
import { initialViewState, type ViewState } from './types.js';

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

export class Explorer {
  state: ViewState = initialViewState();
  api: ApiClient;
  structure: StructurePanel;
  diagrams: DiagramPanel;
  context: ContextPanels;

  constructor(baseUrl: string) {
    this.api = new ApiClient(baseUrl);
    this.diagrams = new DiagramPanel(
      el('component-panel'),
      el('abstraction-panel'),
      this.api,
      this.state,
      (gateId) => void this.onGateClick(gateId),
    );
    this.structure = new StructurePanel(
      el('structure-panel'),
      this.api,
      this.state,
      () => this.onFoldChange(),
      (nodeId) => this.onNodeSelect(nodeId),
    );
    this.context = new ContextPanels(
      el('provenance-panel'),
      el('placement-panel'),
      el('matrix-panel'),
      this.api,
      this.state,
    );
  }

  banner(message: string): void {
    const host = el('banner');
    host.textContent = message;
    host.classList.toggle('visible', message !== '');
  }

  async loadProgram(source: string, params: Record<string, number>): Promise<void> {
    try {
      this.state.modelId = await this.api.compile(source, params);
      this.state.unfolded = new Set();
      this.state.selectedNode = null;
      this.state.selectedGate = null;
      if (this.state.modelId) {
        await this.api.setFold(this.state.modelId, []);
      }
      await this.structure.load();
      await this.refreshAll();
      this.banner('');
    } catch (err) {
      this.banner(String(err));
      throw err;
    }
  }

  /** Re-apply a saved ViewState after a reload: same state, same panels. */
  async applyViewState(saved: {
    modelId: string;
    unfolded: number[];
    selectedNode: number | null;
    selectedQubit: number | null;
    threshold: number;
  }): Promise<void> {
    this.state.modelId = saved.modelId;
    this.state.unfolded = new Set(saved.unfolded);
    this.state.selectedNode = saved.selectedNode;
    this.state.selectedQubit = saved.selectedQubit;
    this.state.threshold = saved.threshold;
    await this.api.setFold(saved.modelId, [...this.state.unfolded]);
    await this.structure.load();
    await this.refreshAll();
    if (this.state.selectedNode !== null) {
      this.diagrams.highlightSubtree(this.structure.subtree(this.state.selectedNode));
    }
  }

  async refreshAll(): Promise<void> {
    await this.diagrams.refresh();
    await this.context.refreshPlacement();
    await this.context.refreshConnectivity(this.state.selectedNode);
    if (this.state.selectedQubit !== null) {
      await this.context.selectQubit(this.state.selectedQubit);
    }
  }

  async onFoldChange(): Promise<void> {
    try {
      await this.diagrams.refresh();
      await this.context.refreshPlacement();
      if (this.state.selectedNode !== null) {
        this.diagrams.highlightSubtree(this.structure.subtree(this.state.selectedNode));
      }
      this.banner('');
    } catch (err) {
      this.banner(String(err));
    }
  }

  async onNodeSelect(nodeId: number | null): Promise<void> {
    try {
      this.diagrams.highlightSubtree(nodeId === null ? null : this.structure.subtree(nodeId));
      await this.context.refreshConnectivity(nodeId);
      this.banner('');
    } catch (err) {
      this.banner(String(err));
    }
  }

  async onGateClick(gateId: number): Promise<void> {
    try {
      const candidates = await this.context.selectGate(gateId);
      this.diagrams.overlaySuggestions(candidates);
      this.banner('');
    } catch (err) {
      this.banner(String(err));
    }
  }
}

export function boot(): Explorer {
  const query = new URLSearchParams(window.location.search);
  const baseUrl = query.get('api') ?? '';
  const explorer = new Explorer(baseUrl);

  el<HTMLButtonElement>('load-button').addEventListener('click', () => {
    const source = el<HTMLTextAreaElement>('source-input').value;
    const paramsText = el<HTMLInputElement>('params-input').value.trim();
    const params: Record<string, number> = {};
    if (paramsText) {
      for (const pair of paramsText.split(',')) {
        const [name, value] = pair.split('=');
        params[name.trim()] = Number(value);
      }
    }
    void explorer.loadProgram(source, params);
  });

  const slider = el<HTMLInputElement>('threshold-slider');
  slider.addEventListener('input', () => {
    el('threshold-value').textContent = slider.value;
    explorer.context.setThreshold(Number(slider.value));
  });

  el<HTMLInputElement>('qubit-input').addEventListener('change', (ev) => {
    const value = (ev.target as HTMLInputElement).value;
    void explorer.context.selectQubit(value === '' ? null : Number(value));
  });

  return explorer;
}

declare global {
  interface Window {
    qcvineExplorer?: Explorer;
  }
}

if (typeof document !== 'undefined' && document.getElementById('structure-panel')) {
  window.qcvineExplorer = boot();
}
