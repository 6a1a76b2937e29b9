/**
 * HTTP client for the researchdesk service. The UI talks to the service
 * exclusively through this module; it holds no state beyond the credentials.
 */

import type {
  ApiError,
  Asset,
  AssistantSpec,
  BibliographyEntry,
  EngineEvent,
  Session,
  ToolDescriptor,
  UsageInfo,
} from './types.js';

export class ApiRequestError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, error: ApiError) {
    super(error.message);
    this.code = error.code;
    this.status = status;
  }
}

export interface StartSessionRequest {
  assistantId: string;
  selectedAssetIds?: string[];
  waiveMissing?: boolean;
}

export interface PromoteRequest {
  role: string;
  name: string;
  content?: string;
  messageIndex?: number;
  overrideRole?: boolean;
  extractFinal?: boolean;
}

export interface CrateExportRequest {
  assetIds: string[];
  authorName: string;
  license: string;
}

async function errorOf(response: Response): Promise<ApiRequestError> {
  let payload: ApiError = { code: 'internal-error', message: response.statusText };
  try {
    const body = (await response.json()) as { error?: ApiError };
    if (body.error) payload = body.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiRequestError(response.status, payload);
}

/** Parses `data: <json>\n\n` frames out of a streamed response body. */
export class SseFrameParser {
  private buffer = '';

  push(chunk: string): EngineEvent[] {
    this.buffer += chunk;
    const events: EngineEvent[] = [];
    let index: number;
    while ((index = this.buffer.indexOf('\n\n')) >= 0) {
      const frame = this.buffer.slice(0, index).trim();
      this.buffer = this.buffer.slice(index + 2);
      if (frame.startsWith('data: ')) {
        events.push(JSON.parse(frame.slice(6)) as EngineEvent);
      }
    }
    return events;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private token: string,
    private providerKey: string | null = null,
    private readonly fetchImpl: typeof fetch = fetch.bind(globalThis),
  ) {}

  setProviderKey(key: string | null): void {
    this.providerKey = key;
  }

  private headers(json = true): Record<string, string> {
    const headers: Record<string, string> = { Authorization: `Bearer ${this.token}` };
    if (json) headers['Content-Type'] = 'application/json';
    if (this.providerKey) headers['X-Provider-Key'] = this.providerKey;
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(body !== undefined),
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!response.ok) throw await errorOf(response);
    return (await response.json()) as T;
  }

  listAssistants(): Promise<{ assistants: AssistantSpec[] }> {
    return this.request('GET', '/api/v1/assistants');
  }

  listTools(): Promise<{ tools: ToolDescriptor[] }> {
    return this.request('GET', '/api/v1/tools');
  }

  usage(): Promise<UsageInfo> {
    return this.request('GET', '/api/v1/usage');
  }

  listAssets(project: string, role?: string, newestOnly = false): Promise<{ assets: Asset[] }> {
    const params = new URLSearchParams();
    if (role) params.set('role', role);
    if (newestOnly) params.set('newest_only', 'true');
    const query = params.toString();
    return this.request('GET', `/api/v1/projects/${project}/assets${query ? `?${query}` : ''}`);
  }

  createAsset(
    project: string,
    body: { name: string; role: string; kind?: string; content: string },
  ): Promise<Asset> {
    return this.request('POST', `/api/v1/projects/${project}/assets`, body);
  }

  startSession(project: string, body: StartSessionRequest): Promise<Session> {
    return this.request('POST', `/api/v1/projects/${project}/sessions`, body);
  }

  getSession(sessionId: string): Promise<Session> {
    return this.request('GET', `/api/v1/sessions/${sessionId}`);
  }

  promote(sessionId: string, body: PromoteRequest): Promise<Asset> {
    return this.request('POST', `/api/v1/sessions/${sessionId}/assets`, body);
  }

  addToBibliography(sessionId: string, entries: BibliographyEntry[]): Promise<Asset> {
    return this.request('POST', `/api/v1/sessions/${sessionId}/bibliography`, { entries });
  }

  exportLatex(project: string, assetIds: string[]): Promise<{ tex: string; bib: string }> {
    return this.request('POST', `/api/v1/projects/${project}/export/latex`, { assetIds });
  }

  async exportCrate(project: string, body: CrateExportRequest): Promise<Blob> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1/projects/${project}/export/crate`, {
      method: 'POST',
      headers: this.headers(),
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await errorOf(response);
    return response.blob();
  }

  /**
   * Stream a message turn; events arrive in server order via onEvent and the
   * full ordered list resolves once the terminal event closes the stream.
   */
  async sendMessage(
    sessionId: string,
    text: string,
    onEvent?: (event: EngineEvent) => void,
  ): Promise<EngineEvent[]> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1/sessions/${sessionId}/messages`, {
      method: 'POST',
      headers: this.headers(),
      body: JSON.stringify({ text }),
    });
    if (!response.ok) throw await errorOf(response);
    const events: EngineEvent[] = [];
    const parser = new SseFrameParser();
    const emit = (chunk: string) => {
      for (const event of parser.push(chunk)) {
        events.push(event);
        onEvent?.(event);
      }
    };
    if (response.body) {
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) break;
        emit(decoder.decode(value, { stream: true }));
      }
    } else {
      emit(await response.text());
    }
    return events;
  }
}
