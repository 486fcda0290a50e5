// Thin client over the qcvine service. One in-flight request per panel key:
// issuing a new request for the same key aborts the previous one, so the
// latest interaction always wins.

import type {
  AbstractionPayload,
  ComponentPayload,
  ConnectivityPayload,
  EntanglementPayload,
  PlacementPayload,
  ProvenancePayload,
  StructurePayload,
  SuggestPayload,
} from './types.js';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(public baseUrl: string) {}

  private async request(panel: string, path: string, init?: RequestInit): Promise<Response> {
    this.inflight.get(panel)?.abort();
    const controller = new AbortController();
    this.inflight.set(panel, controller);
    const response = await fetch(this.baseUrl + path, { ...init, signal: controller.signal });
    if (this.inflight.get(panel) === controller) {
      this.inflight.delete(panel);
    }
    if (!response.ok) {
      const body = await response.text();
      throw new ApiError(response.status, `${response.status} on ${path}: ${body}`);
    }
    return response;
  }

  private async json<T>(panel: string, path: string): Promise<T> {
    const response = await this.request(panel, path);
    return (await response.json()) as T;
  }

  async compile(source: string, params: Record<string, number>): Promise<string> {
    const response = await this.request('program', '/program', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ source, params }),
    });
    const body = (await response.json()) as { modelId: string };
    return body.modelId;
  }

  structure(id: string): Promise<StructurePayload> {
    return this.json('structure', `/model/${id}/structure`);
  }

  async setFold(id: string, unfolded: number[]): Promise<void> {
    await this.request('fold', `/model/${id}/fold`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ unfolded }),
    });
  }

  component(id: string): Promise<ComponentPayload> {
    return this.json('component', `/model/${id}/component`);
  }

  async componentSvg(id: string): Promise<string> {
    const response = await this.request('component-svg', `/model/${id}/component?format=svg`);
    return response.text();
  }

  abstraction(id: string): Promise<AbstractionPayload> {
    return this.json('abstraction', `/model/${id}/abstraction`);
  }

  async abstractionSvg(id: string): Promise<string> {
    const response = await this.request('abstraction-svg', `/model/${id}/abstraction?format=svg`);
    return response.text();
  }

  provenance(id: string, qubit: number): Promise<ProvenancePayload> {
    return this.json('provenance', `/model/${id}/provenance?qubit=${qubit}`);
  }

  async provenanceSvg(id: string, qubit: number): Promise<string> {
    const r = await this.request('provenance-svg', `/model/${id}/provenance?qubit=${qubit}&format=svg`);
    return r.text();
  }

  placement(id: string, threshold: number): Promise<PlacementPayload> {
    return this.json('placement', `/model/${id}/placement?threshold=${threshold}`);
  }

  async placementSvg(id: string, threshold: number): Promise<string> {
    const r = await this.request(
      'placement-svg',
      `/model/${id}/placement?threshold=${threshold}&format=svg`,
    );
    return r.text();
  }

  suggest(id: string, gate: number): Promise<SuggestPayload> {
    return this.json('suggest', `/model/${id}/suggest?gate=${gate}`);
  }

  connectivity(id: string, node?: number | null): Promise<ConnectivityPayload> {
    const scope = node === null || node === undefined ? '' : `?node=${node}`;
    return this.json('connectivity', `/model/${id}/connectivity${scope}`);
  }

  async connectivitySvg(id: string, node?: number | null): Promise<string> {
    const scope = node === null || node === undefined ? '' : `node=${node}&`;
    const r = await this.request('connectivity-svg', `/model/${id}/connectivity?${scope}format=svg`);
    return r.text();
  }

  entanglement(id: string): Promise<EntanglementPayload> {
    return this.json('entanglement', `/model/${id}/entanglement`);
  }
}
