/**
 * Export dialog: pick assets, enter the author name, choose a license from
 * the allow-list, download the RO-Crate archive. Server errors surface inline
 * with their stable code.
 */

import { ApiRequestError } from '../api.js';
import type { Asset } from '../types.js';

export const LICENSE_CHOICES = [
  'CC-BY-4.0',
  'CC0-1.0',
  'proprietary-all-rights-reserved',
] as const;

export interface ExportRequest {
  assetIds: string[];
  authorName: string;
  license: string;
}

export interface ExportDialogCallbacks {
  onExport(request: ExportRequest): Promise<Blob | void> | Blob | void;
  /** Hands the finished blob to the browser download path (overridable in tests). */
  download?(blob: Blob, filename: string): void;
}

function defaultDownload(blob: Blob, filename: string): void {
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export class ExportDialogComponent {
  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: ExportDialogCallbacks,
  ) {
    this.root.classList.add('export-dialog');
  }

  render(assets: Asset[]): void {
    this.root.innerHTML = '';
    const heading = document.createElement('h3');
    heading.textContent = 'Export assets as RO-Crate';
    this.root.appendChild(heading);

    const list = document.createElement('ul');
    for (const asset of assets) {
      const row = document.createElement('li');
      const checkbox = document.createElement('input');
      checkbox.type = 'checkbox';
      checkbox.dataset['assetId'] = asset.id;
      checkbox.checked = true;
      row.appendChild(checkbox);
      const label = document.createElement('span');
      label.textContent = `${asset.name} (${asset.role} v${asset.version})`;
      row.appendChild(label);
      list.appendChild(row);
    }
    this.root.appendChild(list);

    const nameField = document.createElement('input');
    nameField.type = 'text';
    nameField.className = 'author-name';
    nameField.placeholder = 'Your name (recorded as provenance)';
    this.root.appendChild(nameField);

    const licenseSelect = document.createElement('select');
    licenseSelect.className = 'license';
    for (const license of LICENSE_CHOICES) {
      const option = document.createElement('option');
      option.value = license;
      option.textContent = license;
      licenseSelect.appendChild(option);
    }
    this.root.appendChild(licenseSelect);

    const submit = document.createElement('button');
    submit.className = 'export-submit';
    submit.textContent = 'Export';
    submit.addEventListener('click', () => void this.submit());
    this.root.appendChild(submit);

    const error = document.createElement('p');
    error.className = 'export-error';
    this.root.appendChild(error);
  }

  private selection(): string[] {
    const ids: string[] = [];
    this.root
      .querySelectorAll<HTMLInputElement>('li input[type="checkbox"]')
      .forEach((box) => {
        if (box.checked && box.dataset['assetId']) ids.push(box.dataset['assetId']);
      });
    return ids;
  }

  private async submit(): Promise<void> {
    const error = this.root.querySelector<HTMLElement>('.export-error')!;
    const name = this.root.querySelector<HTMLInputElement>('.author-name')!.value.trim();
    const license = this.root.querySelector<HTMLSelectElement>('.license')!.value;
    if (!name) {
      error.textContent = 'Enter your name before exporting.';
      return;
    }
    error.textContent = '';
    try {
      const blob = await this.callbacks.onExport({
        assetIds: this.selection(),
        authorName: name,
        license,
      });
      if (blob) (this.callbacks.download ?? defaultDownload)(blob, 'ro-crate.zip');
    } catch (cause) {
      error.textContent =
        cause instanceof ApiRequestError
          ? `Export failed (${cause.code}): ${cause.message}`
          : `Export failed: ${(cause as Error).message}`;
    }
  }
}
