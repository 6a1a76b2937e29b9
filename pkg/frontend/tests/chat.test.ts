import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ChatComponent } from '../src/components/chat.js';
import type { EngineEvent, SearchPayload } from '../src/types.js';

function searchResult(count: number): EngineEvent {
  const payload: SearchPayload = {
    entries: Array.from({ length: count }, (_, i) => ({ title: `P${i}` })),
    page: 0,
    pageSize: 10,
    hasMore: count === 10,
  };
  return {
    kind: 'tool_result',
    toolCallId: 'c1',
    result: {
      toolId: 'orkg-ask',
      status: 'ok',
      chatText: 'results as text',
      structured: payload,
      uiComponentId: 'literature-search',
    },
  };
}

describe('ChatComponent generative-UI dispatch', () => {
  let host: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="host"></div>';
    host = document.getElementById('host')!;
  });

  it('renders the literature component for results carrying its component id', () => {
    const chat = new ChatComponent(host, {
      onAddSelected: vi.fn(),
      onPageChange: vi.fn(),
    });
    chat.addEvent(searchResult(10));
    expect(host.querySelector('.literature-search-host')).not.toBeNull();
    expect(host.querySelectorAll('.result-row')).toHaveLength(10);
    // the plain-text fallback is not used
    expect(host.textContent).not.toContain('results as text');
  });

  it('renders plain chat text when no component id is present', () => {
    const chat = new ChatComponent(host, {
      onAddSelected: vi.fn(),
      onPageChange: vi.fn(),
    });
    chat.addEvent({
      kind: 'tool_result',
      toolCallId: 'c1',
      result: { toolId: 'crossref', status: 'ok', chatText: 'one record found' },
    });
    expect(host.querySelector('.literature-search-host')).toBeNull();
    expect(host.textContent).toContain('one record found');
  });

  it('keeps transcript ordering equal to event ordering and signals turn end', () => {
    const turns: EngineEvent[][] = [];
    const chat = new ChatComponent(host, {
      onAddSelected: vi.fn(),
      onPageChange: vi.fn(),
      onTurnEnd: (events) => turns.push(events),
    });
    chat.addUserMessage('find work');
    chat.addEvent({ kind: 'tool_invoked', toolId: 'orkg-ask', toolCallId: 'c1' });
    chat.addEvent(searchResult(3));
    chat.addEvent({ kind: 'assistant_text', text: 'pick some' });
    chat.addEvent({ kind: 'done', transcriptIndex: 4 });
    const classes = Array.from(host.children).map((el) => el.className);
    expect(classes[0]).toContain('user');
    expect(classes[1]).toContain('tool-invoked');
    expect(classes[2]).toContain('literature-search-host');
    expect(classes[3]).toContain('assistant');
    expect(turns).toHaveLength(1);
    expect(turns[0]!.map((e) => e.kind)).toEqual([
      'tool_invoked',
      'tool_result',
      'assistant_text',
      'done',
    ]);
  });

  it('error events render and terminate the turn', () => {
    const turns: EngineEvent[][] = [];
    const chat = new ChatComponent(host, {
      onAddSelected: vi.fn(),
      onPageChange: vi.fn(),
      onTurnEnd: (events) => turns.push(events),
    });
    chat.addEvent({ kind: 'error', code: 'tool-iteration-cap', message: 'too many calls' });
    expect(host.textContent).toContain('tool-iteration-cap');
    expect(turns).toHaveLength(1);
  });

  it('tool errors render as error bubbles, not components', () => {
    const chat = new ChatComponent(host, {
      onAddSelected: vi.fn(),
      onPageChange: vi.fn(),
    });
    chat.addEvent({
      kind: 'tool_result',
      toolCallId: 'c1',
      result: {
        toolId: 'orkg-ask',
        status: 'error',
        errorMessage: 'upstream-unavailable: poof',
        uiComponentId: 'literature-search',
      },
    });
    expect(host.querySelector('.literature-search-host')).toBeNull();
    expect(host.textContent).toContain('upstream-unavailable');
  });
});
