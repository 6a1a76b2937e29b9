import { describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiRequestError, SseFrameParser } from '../src/api.js';
import type { EngineEvent } from '../src/types.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

function sseResponse(events: EngineEvent[], chunkSize = 7): Response {
  const raw = events.map((e) => `data: ${JSON.stringify(e)}\n\n`).join('');
  const encoder = new TextEncoder();
  const stream = new ReadableStream<Uint8Array>({
    start(controller) {
      for (let i = 0; i < raw.length; i += chunkSize) {
        controller.enqueue(encoder.encode(raw.slice(i, i + chunkSize)));
      }
      controller.close();
    },
  });
  return new Response(stream, {
    status: 200,
    headers: { 'Content-Type': 'text/event-stream' },
  });
}

describe('SseFrameParser', () => {
  it('reassembles frames split across arbitrary chunk boundaries', () => {
    const parser = new SseFrameParser();
    const raw = 'data: {"kind":"assistant_text","text":"hi"}\n\ndata: {"kind":"done"}\n\n';
    const events: EngineEvent[] = [];
    for (const ch of raw) events.push(...parser.push(ch));
    expect(events.map((e) => e.kind)).toEqual(['assistant_text', 'done']);
  });
});

describe('ApiClient', () => {
  it('sends the bearer token and optional provider key', async () => {
    const fetchImpl = vi.fn(async () => jsonResponse({ assistants: [] }));
    const client = new ApiClient('http://svc', 'tok-alice', 'sk-mine', fetchImpl);
    await client.listAssistants();
    const [url, init] = fetchImpl.mock.calls[0]! as unknown as [string, RequestInit];
    expect(url).toBe('http://svc/api/v1/assistants');
    const headers = init.headers as Record<string, string>;
    expect(headers['Authorization']).toBe('Bearer tok-alice');
    expect(headers['X-Provider-Key']).toBe('sk-mine');
  });

  it('maps error envelopes to ApiRequestError with the stable code', async () => {
    const fetchImpl = vi.fn(async () =>
      jsonResponse({ error: { code: 'budget-exceeded', message: 'no tokens' } }, 429),
    );
    const client = new ApiClient('', 't', null, fetchImpl);
    await expect(client.usage()).rejects.toMatchObject({
      code: 'budget-exceeded',
      status: 429,
    });
    const failure = await client.usage().catch((e) => e);
    expect(failure).toBeInstanceOf(ApiRequestError);
  });

  it('streams message events in order and invokes the callback per event', async () => {
    const script: EngineEvent[] = [
      { kind: 'tool_invoked', toolId: 'orkg-ask', toolCallId: 'c1' },
      {
        kind: 'tool_result',
        toolCallId: 'c1',
        result: { toolId: 'orkg-ask', status: 'ok', chatText: 'x' },
      },
      { kind: 'assistant_text', text: 'summary' },
      { kind: 'done', transcriptIndex: 4 },
    ];
    const fetchImpl = vi.fn(async () => sseResponse(script, 11));
    const client = new ApiClient('', 't', null, fetchImpl);
    const seen: string[] = [];
    const events = await client.sendMessage('s-1', 'go', (e) => seen.push(e.kind));
    expect(events.map((e) => e.kind)).toEqual([
      'tool_invoked',
      'tool_result',
      'assistant_text',
      'done',
    ]);
    expect(seen).toEqual(events.map((e) => e.kind));
  });

  it('posts exactly the selected entries to the bibliography route', async () => {
    const fetchImpl = vi.fn(async () => jsonResponse({ id: 'a-1', version: 1 }));
    const client = new ApiClient('', 't', null, fetchImpl);
    const entries = [{ title: 'A' }, { title: 'B' }];
    await client.addToBibliography('s-9', entries);
    const [url, init] = fetchImpl.mock.calls[0]! as unknown as [string, RequestInit];
    expect(url).toBe('/api/v1/sessions/s-9/bibliography');
    expect(JSON.parse(init.body as string)).toEqual({ entries });
  });
});
