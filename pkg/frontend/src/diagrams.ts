// Component and abstraction panels. Both inject backend-rendered SVG and
// decorate glyphs by their sg-<id> element ids, which guarantees the picture
// matches what the CLI would emit for the same fold state.

import type { ApiClient } from './api.js';
import type { AbstractionPayload, ComponentPayload, ViewState } from './types.js';

const HIGHLIGHT_CLASS = 'hl';

export class DiagramPanel {
  componentPayload: ComponentPayload | null = null;
  abstractionPayload: AbstractionPayload | null = null;

  constructor(
    private componentHost: HTMLElement,
    private abstractionHost: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
    private onGateClick: (gateId: number) => void,
  ) {}

  async refresh(): Promise<void> {
    if (!this.state.modelId) return;
    const id = this.state.modelId;
    const [componentSvg, component, abstractionSvg, abstraction] = await Promise.all([
      this.api.componentSvg(id),
      this.api.component(id),
      this.api.abstractionSvg(id),
      this.api.abstraction(id),
    ]);
    this.componentPayload = component;
    this.abstractionPayload = abstraction;
    this.componentHost.innerHTML = componentSvg;
    this.abstractionHost.innerHTML = abstractionSvg;
    this.wireClicks(this.componentHost);
    this.applyHighlight(this.highlightIds());
  }

  private wireClicks(host: HTMLElement): void {
    for (const el of host.querySelectorAll<SVGGElement>('g[id^="sg-"]')) {
      el.addEventListener('click', () => {
        const gateId = Number(el.id.slice(3));
        this.onGateClick(gateId);
      });
    }
  }

  /** Gate ids that belong to the selected node's subtree, per the payloads. */
  highlightIds(subtree?: Set<number>): Set<number> {
    const ids = new Set<number>();
    if (!this.componentPayload) return ids;
    if (!subtree) {
      if (this.state.selectedNode === null) return ids;
      subtree = new Set([this.state.selectedNode]);
    }
    for (const sg of this.componentPayload.superGates) {
      if (subtree.has(sg.node)) ids.add(sg.id);
    }
    return ids;
  }

  /** Decorate only elements whose ids exist in the fetched payloads. */
  applyHighlight(gateIds: Set<number>): string[] {
    const decorated: string[] = [];
    const present = new Set((this.componentPayload?.superGates ?? []).map((sg) => sg.id));
    const abstractionPresent = new Set((this.abstractionPayload?.gates ?? []).map((g) => g.id));
    for (const host of [this.componentHost, this.abstractionHost]) {
      for (const el of host.querySelectorAll<SVGGElement>('g[id^="sg-"]')) {
        const gateId = Number(el.id.slice(3));
        const known = present.has(gateId) || abstractionPresent.has(gateId);
        const on = known && gateIds.has(gateId);
        el.classList.toggle(HIGHLIGHT_CLASS, on);
        if (on) decorated.push(el.id);
      }
    }
    return decorated;
  }

  highlightSubtree(subtree: Set<number> | null): string[] {
    return this.applyHighlight(subtree ? this.highlightIds(subtree) : new Set());
  }

  /** Overlay markers on candidate columns for a placement suggestion. */
  overlaySuggestions(columns: number[]): void {
    this.componentHost
      .querySelectorAll('.suggestion-marker')
      .forEach((el) => el.remove());
    const svg = this.componentHost.querySelector('svg');
    if (!svg || !this.componentPayload) return;
    const note = document.createElement('div');
    note.className = 'suggestion-marker';
    note.textContent = columns.length
      ? `candidate columns: ${columns.join(', ')}`
      : 'no legal moves';
    this.componentHost.appendChild(note);
  }
}
