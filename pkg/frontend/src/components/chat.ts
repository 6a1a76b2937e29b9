/**
 * Chat transcript view: renders streamed engine events in server order and
 * dispatches generative-UI components keyed by the tool result
 * (tool_result with a uiComponentId renders its component; everything else
 * renders as chat text).
 */

import type { BibliographyEntry, EngineEvent, SearchPayload, ToolResult } from '../types.js';
import {
  LiteratureSearchComponent,
  type LiteratureSearchCallbacks,
} from './literatureSearch.js';

export interface ChatCallbacks extends LiteratureSearchCallbacks {
  /** Called when a turn ends (done or error). */
  onTurnEnd?(events: EngineEvent[]): void;
}

function bubble(kind: string, text: string): HTMLElement {
  const element = document.createElement('div');
  element.className = `bubble ${kind}`;
  element.textContent = text;
  return element;
}

export class ChatComponent {
  private turnEvents: EngineEvent[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: ChatCallbacks,
  ) {
    this.root.classList.add('chat-transcript');
  }

  clear(): void {
    this.root.innerHTML = '';
  }

  addUserMessage(text: string): void {
    this.root.appendChild(bubble('user', text));
  }

  /** Feed one streamed event; ordering must match the server stream. */
  addEvent(event: EngineEvent): void {
    this.turnEvents.push(event);
    switch (event.kind) {
      case 'assistant_text':
        this.root.appendChild(bubble('assistant', event.text ?? ''));
        break;
      case 'tool_invoked':
        this.root.appendChild(
          bubble('tool-invoked', `Calling ${event.toolId ?? 'tool'}…`),
        );
        break;
      case 'tool_result':
        if (event.result) this.renderToolResult(event.result);
        break;
      case 'error':
        this.root.appendChild(
          bubble('error', `Error (${event.code ?? 'unknown'}): ${event.message ?? ''}`),
        );
        this.endTurn();
        break;
      case 'done':
        this.endTurn();
        break;
    }
  }

  private endTurn(): void {
    const events = this.turnEvents;
    this.turnEvents = [];
    this.callbacks.onTurnEnd?.(events);
  }

  private renderToolResult(result: ToolResult): void {
    if (result.status === 'error') {
      this.root.appendChild(bubble('tool-error', result.errorMessage ?? 'tool error'));
      return;
    }
    if (result.uiComponentId === 'literature-search' && result.structured) {
      const host = document.createElement('div');
      host.className = 'generative-ui literature-search-host';
      this.root.appendChild(host);
      const component = new LiteratureSearchComponent(host, {
        onAddSelected: (entries: BibliographyEntry[]) =>
          this.callbacks.onAddSelected(entries),
        onPageChange: (page: number) => this.callbacks.onPageChange(page),
      });
      component.render(result.structured as SearchPayload);
      return;
    }
    this.root.appendChild(bubble('tool-result', result.chatText ?? ''));
  }
}
