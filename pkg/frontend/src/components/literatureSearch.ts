/**
 * Generative-UI component for literature-search tool results: one row per
 * entry with a checkbox, pagination controls, and an add-to-bibliography
 * action that posts exactly the checked entries.
 */

import type { Asset, BibliographyEntry, SearchPayload } from '../types.js';

export interface LiteratureSearchCallbacks {
  onAddSelected(entries: BibliographyEntry[]): Promise<Asset | void> | Asset | void;
  onPageChange(page: number): void;
}

function authorLine(entry: BibliographyEntry): string {
  const names = (entry.authors ?? []).map((a) =>
    [a.given, a.family].filter(Boolean).join(' '),
  );
  if (names.length === 0) return '';
  return names.length > 3 ? `${names.slice(0, 3).join(', ')} et al.` : names.join(', ');
}

export class LiteratureSearchComponent {
  private payload: SearchPayload | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: LiteratureSearchCallbacks,
  ) {}

  render(payload: SearchPayload): void {
    this.payload = payload;
    this.root.innerHTML = '';
    this.root.classList.add('literature-search');

    const list = document.createElement('ul');
    list.className = 'result-list';
    payload.entries.forEach((entry, index) => {
      const row = document.createElement('li');
      row.className = 'result-row';
      const checkbox = document.createElement('input');
      checkbox.type = 'checkbox';
      checkbox.dataset['index'] = String(index);
      row.appendChild(checkbox);

      const body = document.createElement('div');
      const title = document.createElement('div');
      title.className = 'result-title';
      title.textContent = entry.title;
      body.appendChild(title);
      const meta = document.createElement('div');
      meta.className = 'result-meta';
      meta.textContent = [authorLine(entry), entry.year, entry.sourceTool]
        .filter(Boolean)
        .join(' · ');
      body.appendChild(meta);
      row.appendChild(body);
      list.appendChild(row);
    });
    this.root.appendChild(list);

    if (payload.entries.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'no-results';
      empty.textContent = 'No results for this query.';
      this.root.appendChild(empty);
    }

    const controls = document.createElement('div');
    controls.className = 'result-controls';

    const prev = document.createElement('button');
    prev.className = 'prev-page';
    prev.textContent = 'Previous';
    prev.disabled = payload.page === 0;
    prev.addEventListener('click', () => this.callbacks.onPageChange(payload.page - 1));
    controls.appendChild(prev);

    const pageLabel = document.createElement('span');
    pageLabel.className = 'page-label';
    pageLabel.textContent = `Page ${payload.page + 1}`;
    controls.appendChild(pageLabel);

    const next = document.createElement('button');
    next.className = 'next-page';
    next.textContent = 'Next';
    next.disabled = !payload.hasMore;
    next.addEventListener('click', () => this.callbacks.onPageChange(payload.page + 1));
    controls.appendChild(next);

    const add = document.createElement('button');
    add.className = 'add-selected';
    add.textContent = 'Add selected to bibliography';
    add.disabled = payload.entries.length === 0;
    add.addEventListener('click', () => void this.addSelected(add));
    controls.appendChild(add);

    const status = document.createElement('span');
    status.className = 'add-status';
    controls.appendChild(status);

    this.root.appendChild(controls);
  }

  selectedEntries(): BibliographyEntry[] {
    if (!this.payload) return [];
    const boxes = this.root.querySelectorAll<HTMLInputElement>('input[type="checkbox"]');
    const selected: BibliographyEntry[] = [];
    boxes.forEach((box) => {
      if (box.checked) {
        const entry = this.payload!.entries[Number(box.dataset['index'])];
        if (entry) selected.push(entry);
      }
    });
    return selected;
  }

  private async addSelected(button: HTMLButtonElement): Promise<void> {
    const selected = this.selectedEntries();
    const status = this.root.querySelector<HTMLElement>('.add-status')!;
    if (selected.length === 0) {
      status.textContent = 'Select at least one entry first.';
      return;
    }
    button.disabled = true;
    try {
      const asset = await this.callbacks.onAddSelected(selected);
      status.textContent = asset
        ? `Added ${selected.length} to bibliography (v${asset.version}).`
        : `Added ${selected.length} to bibliography.`;
    } catch (error) {
      status.textContent = `Could not add: ${(error as Error).message}`;
    } finally {
      button.disabled = false;
    }
  }
}
