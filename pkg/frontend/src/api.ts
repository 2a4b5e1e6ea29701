// Typed client for the resyduo HTTP API. Response shapes mirror the wire
// format exactly; nothing here knows about the engine internals.

export interface HealthStatus {
  status: string;
  models: { T: boolean; P: boolean; L: boolean };
}

export interface ComponentEntry {
  id: string;
  name: string;
}

export interface ScoredComponent {
  id: string;
  score: number;
}

export interface ScoredLibrary {
  name: string;
  score: number;
}

export interface Draft {
  id: string;
  name: string;
  selected_components: string[];
  sketch: string;
  updated_at: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function raise(res: Response): Promise<never> {
  let code = 'http_error';
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(res.status, code, message);
}

export class Client {
  constructor(private base = '') {}

  private async getJson<T>(path: string): Promise<T> {
    const res = await fetch(this.base + path);
    if (!res.ok) await raise(res);
    return res.json();
  }

  private async send<T>(method: string, path: string, body: unknown): Promise<T> {
    const res = await fetch(this.base + path, {
      method,
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!res.ok) await raise(res);
    if (res.status === 204) return undefined as T;
    return res.json();
  }

  health(): Promise<HealthStatus> {
    return this.getJson('/api/v1/health');
  }

  tags(prefix: string): Promise<string[]> {
    return this.getJson(`/api/v1/catalog/tags?prefix=${encodeURIComponent(prefix)}`);
  }

  components(prefix: string): Promise<ComponentEntry[]> {
    return this.getJson(`/api/v1/catalog/components?prefix=${encodeURIComponent(prefix)}`);
  }

  async componentsByTags(tags: string[], n: number): Promise<ScoredComponent[]> {
    const out = await this.send<{ items: ScoredComponent[] }>(
      'POST', '/api/v1/recommend/components-by-tags', { tags, n });
    return out.items;
  }

  async componentsByProject(components: string[], n: number): Promise<ScoredComponent[]> {
    const out = await this.send<{ items: ScoredComponent[] }>(
      'POST', '/api/v1/recommend/components-by-project', { components, n });
    return out.items;
  }

  async libraries(components: string[], n: number): Promise<ScoredLibrary[]> {
    const out = await this.send<{ items: ScoredLibrary[] }>(
      'POST', '/api/v1/recommend/libraries', { components, n });
    return out.items;
  }

  async listDrafts(): Promise<Draft[]> {
    const out = await this.getJson<{ items: Draft[] }>('/api/v1/projects');
    return out.items;
  }

  createDraft(name: string, components: string[], sketch: string): Promise<Draft> {
    return this.send('POST', '/api/v1/projects',
      { name, selected_components: components, sketch });
  }

  updateDraft(id: string, patch: Partial<Pick<Draft, 'name' | 'selected_components' | 'sketch'>>): Promise<Draft> {
    return this.send('PUT', `/api/v1/projects/${id}`, patch);
  }

  async deleteDraft(id: string): Promise<void> {
    const res = await fetch(`${this.base}/api/v1/projects/${id}`, { method: 'DELETE' });
    if (!res.ok) await raise(res);
  }

  async getSketch(id: string): Promise<string> {
    const res = await fetch(`${this.base}/api/v1/projects/${id}/sketch`);
    if (!res.ok) await raise(res);
    return res.text();
  }

  async putSketch(id: string, text: string): Promise<void> {
    const res = await fetch(`${this.base}/api/v1/projects/${id}/sketch`, {
      method: 'PUT',
      headers: { 'content-type': 'text/plain; charset=utf-8' },
      body: text,
    });
    if (!res.ok) await raise(res);
  }
}
