/** Tool panel: the selected assistant's tools with per-session visibility
 * toggles. Toggles are a client-side preference; the server confines dispatch
 * to the assistant's tool set regardless. */

import type { AssistantSpec, ToolDescriptor } from '../types.js';

export class ToolPanelComponent {
  constructor(private readonly root: HTMLElement) {
    this.root.classList.add('tool-panel');
  }

  render(tools: ToolDescriptor[], assistant: AssistantSpec | null): void {
    this.root.innerHTML = '';
    const heading = document.createElement('h3');
    heading.textContent = 'Tools';
    this.root.appendChild(heading);
    const ids = assistant ? assistant.toolIds : [];
    if (ids.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty';
      empty.textContent = 'This assistant calls no tools.';
      this.root.appendChild(empty);
      return;
    }
    const list = document.createElement('ul');
    for (const toolId of ids) {
      const descriptor = tools.find((t) => t.id === toolId);
      const row = document.createElement('li');
      row.className = 'tool-row';
      const toggle = document.createElement('input');
      toggle.type = 'checkbox';
      toggle.checked = true;
      toggle.dataset['toolId'] = toolId;
      row.appendChild(toggle);
      const label = document.createElement('span');
      label.textContent = descriptor ? descriptor.name : toolId;
      label.title = descriptor?.description ?? '';
      row.appendChild(label);
      list.appendChild(row);
    }
    this.root.appendChild(list);
  }
}
