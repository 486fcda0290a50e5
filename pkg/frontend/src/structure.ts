// Structure panel: the semantic tree as a collapsible list. Everything
// starts collapsed; expanding a node adds it to the unfolded set, pushes the
// fold state to the backend and triggers a diagram refresh.

import type { ApiClient } from './api.js';
import type { StructurePayload, TreeNodePayload, ViewState } from './types.js';

export class StructurePanel {
  payload: StructurePayload | null = null;
  private byId = new Map<number, TreeNodePayload>();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private state: ViewState,
    private onFoldChange: () => Promise<void> | void,
    private onSelect: (nodeId: number | null) => Promise<void> | void,
  ) {}

  async load(): Promise<void> {
    if (!this.state.modelId) return;
    this.payload = await this.api.structure(this.state.modelId);
    this.byId = new Map(this.payload.nodes.map((n) => [n.id, n]));
    // a fresh structure invalidates selections that no longer resolve
    if (this.state.selectedNode !== null && !this.byId.has(this.state.selectedNode)) {
      this.state.selectedNode = null;
    }
    for (const id of [...this.state.unfolded]) {
      if (!this.byId.has(id)) this.state.unfolded.delete(id);
    }
    this.render();
  }

  node(id: number): TreeNodePayload | undefined {
    return this.byId.get(id);
  }

  /** Node ids reachable from `id`, including itself. */
  subtree(id: number): Set<number> {
    const seen = new Set<number>();
    const stack = [id];
    while (stack.length) {
      const cur = stack.pop()!;
      if (seen.has(cur)) continue;
      seen.add(cur);
      const node = this.byId.get(cur);
      if (node) stack.push(...node.children);
    }
    return seen;
  }

  async toggle(nodeId: number): Promise<void> {
    if (!this.state.modelId) return;
    if (this.state.unfolded.has(nodeId)) {
      this.state.unfolded.delete(nodeId);
    } else {
      this.state.unfolded.add(nodeId);
    }
    await this.api.setFold(this.state.modelId, [...this.state.unfolded]);
    this.render();
    await this.onFoldChange();
  }

  async select(nodeId: number | null): Promise<void> {
    this.state.selectedNode = nodeId !== null && this.byId.has(nodeId) ? nodeId : null;
    this.render();
    await this.onSelect(this.state.selectedNode);
  }

  render(): void {
    this.root.textContent = '';
    if (!this.payload) return;
    this.root.appendChild(this.renderNode(this.payload.root, new Set()));
  }

  private renderNode(id: number, onPath: Set<number>): HTMLElement {
    const node = this.byId.get(id)!;
    const item = document.createElement('div');
    item.className = 'tree-node';
    item.dataset.nodeId = String(id);

    const row = document.createElement('div');
    row.className = 'tree-row';
    if (this.state.selectedNode === id) row.classList.add('selected');

    const expanded = id === this.payload!.root || this.state.unfolded.has(id);
    const caret = document.createElement('button');
    caret.className = 'caret';
    caret.textContent = node.children.length === 0 ? '·' : expanded ? '▾' : '▸';
    caret.disabled = node.children.length === 0;
    caret.addEventListener('click', (ev) => {
      ev.stopPropagation();
      void this.toggle(id);
    });
    row.appendChild(caret);

    const label = document.createElement('span');
    label.className = `tree-label kind-${node.kind}`;
    label.textContent = node.label;
    if (node.pattern) {
      const badge = document.createElement('span');
      badge.className = `pattern ${node.pattern.direction}`;
      badge.textContent = `${node.pattern.direction} ×${node.pattern.iterations}`;
      label.appendChild(badge);
    }
    row.appendChild(label);
    row.addEventListener('click', () => {
      void this.select(this.state.selectedNode === id ? null : id);
    });
    item.appendChild(row);

    if (expanded && !onPath.has(id)) {
      const children = document.createElement('div');
      children.className = 'tree-children';
      const next = new Set(onPath);
      next.add(id);
      for (const child of node.children) {
        children.appendChild(this.renderNode(child, next));
      }
      item.appendChild(children);
    }
    return item;
  }
}
