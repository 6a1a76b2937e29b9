/**
 * Track-changes decision interface over a client-side word diff: per-span
 * accept/reject, accept-all/reject-all, and an apply action that promotes the
 * resolved text as a new asset version.
 */

import {
  decideAll,
  decisionSpanCount,
  diffWords,
  resolveSpans,
  type Decision,
  type TrackChangeSpan,
} from '../diff.js';
import type { Asset } from '../types.js';

export interface TrackChangesCallbacks {
  onApply(resolvedText: string): Promise<Asset | void> | Asset | void;
}

export class TrackChangesComponent {
  private spans: TrackChangeSpan[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: TrackChangesCallbacks,
  ) {}

  render(original: string, revised: string): void {
    this.spans = diffWords(original, revised);
    this.redraw();
  }

  currentSpans(): TrackChangeSpan[] {
    return this.spans.map((s) => ({ ...s }));
  }

  resolvedText(): string {
    return resolveSpans(this.spans);
  }

  private redraw(): void {
    this.root.innerHTML = '';
    this.root.classList.add('track-changes');

    const text = document.createElement('div');
    text.className = 'diff-text';
    this.spans.forEach((span, index) => {
      const piece = document.createElement('span');
      piece.textContent = span.text;
      piece.className = `span-${span.kind}`;
      if (span.kind !== 'keep') {
        piece.classList.add(`decision-${span.decision ?? 'pending'}`);
        piece.dataset['index'] = String(index);
      }
      text.appendChild(piece);
      if (span.kind !== 'keep') {
        const controls = document.createElement('span');
        controls.className = 'span-controls';
        controls.appendChild(this.decisionButton(index, 'accepted', '✓'));
        controls.appendChild(this.decisionButton(index, 'rejected', '✗'));
        text.appendChild(controls);
      }
    });
    this.root.appendChild(text);

    if (decisionSpanCount(this.spans) === 0) {
      const notice = document.createElement('p');
      notice.className = 'no-changes';
      notice.textContent = 'No changes proposed; applying would keep the text as is.';
      this.root.appendChild(notice);
    }

    const controls = document.createElement('div');
    controls.className = 'diff-controls';
    controls.appendChild(this.bulkButton('accept-all', 'Accept all', 'accepted'));
    controls.appendChild(this.bulkButton('reject-all', 'Reject all', 'rejected'));

    const apply = document.createElement('button');
    apply.className = 'apply';
    apply.textContent = 'Apply';
    apply.addEventListener('click', () => void this.apply(apply));
    controls.appendChild(apply);

    const status = document.createElement('span');
    status.className = 'apply-status';
    controls.appendChild(status);
    this.root.appendChild(controls);
  }

  private decisionButton(index: number, decision: Decision, label: string): HTMLButtonElement {
    const button = document.createElement('button');
    button.className = `decide-${decision}`;
    button.dataset['index'] = String(index);
    button.textContent = label;
    button.addEventListener('click', () => {
      const span = this.spans[index];
      if (span && span.kind !== 'keep') {
        span.decision = decision;
        this.redraw();
      }
    });
    return button;
  }

  private bulkButton(className: string, label: string, decision: Decision): HTMLButtonElement {
    const button = document.createElement('button');
    button.className = className;
    button.textContent = label;
    button.addEventListener('click', () => {
      this.spans = decideAll(this.spans, decision);
      this.redraw();
    });
    return button;
  }

  private async apply(button: HTMLButtonElement): Promise<void> {
    const status = this.root.querySelector<HTMLElement>('.apply-status')!;
    if (decisionSpanCount(this.spans) === 0) {
      status.textContent = 'Nothing to apply.';
      return;
    }
    button.disabled = true;
    try {
      const asset = await this.callbacks.onApply(this.resolvedText());
      status.textContent = asset
        ? `Applied as version ${asset.version}.`
        : 'Applied.';
    } catch (error) {
      status.textContent = `Could not apply: ${(error as Error).message}`;
    } finally {
      button.disabled = false;
    }
  }
}
