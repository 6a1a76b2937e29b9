/** Assistant sidebar grouped by lifecycle phase; disabled entries are greyed
 * out but stay visible. */

import type { AssistantSpec } from '../types.js';

const PHASE_ORDER = ['ideation', 'literature', 'writing', 'review', 'publishing'] as const;

export class SidebarComponent {
  constructor(
    private readonly root: HTMLElement,
    private readonly onSelect: (assistantId: string) => void,
  ) {
    this.root.classList.add('sidebar');
  }

  render(assistants: AssistantSpec[], selectedId: string | null): void {
    this.root.innerHTML = '';
    for (const phase of PHASE_ORDER) {
      const inPhase = assistants.filter((a) => a.lifecyclePhase === phase);
      if (inPhase.length === 0) continue;
      const heading = document.createElement('h3');
      heading.className = 'phase-heading';
      heading.textContent = phase;
      this.root.appendChild(heading);
      for (const assistant of inPhase) {
        const item = document.createElement('button');
        item.className = 'assistant-item';
        item.dataset['assistantId'] = assistant.id;
        item.textContent = assistant.name;
        item.title = assistant.description;
        if (!assistant.enabled) {
          item.classList.add('disabled');
          item.disabled = true;
        }
        if (assistant.id === selectedId) item.classList.add('selected');
        item.addEventListener('click', () => this.onSelect(assistant.id));
        this.root.appendChild(item);
      }
    }
  }
}
