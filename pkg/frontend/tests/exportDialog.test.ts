import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiRequestError } from '../src/api.js';
import {
  ExportDialogComponent,
  LICENSE_CHOICES,
  type ExportRequest,
} from '../src/components/exportDialog.js';
import type { Asset } from '../src/types.js';

function asset(id: string, role = 'paper-title'): Asset {
  return {
    id,
    name: `Asset ${id}`,
    role,
    kind: 'text',
    content: 'c',
    version: 1,
    provenance: { creatorKind: 'user', createdAt: '2025-07-01T00:00:00Z' },
  };
}

describe('ExportDialogComponent', () => {
  let host: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="host"></div>';
    host = document.getElementById('host')!;
  });

  it('posts the checked selection with name and license, then downloads', async () => {
    const requests: ExportRequest[] = [];
    const downloads: string[] = [];
    const dialog = new ExportDialogComponent(host, {
      onExport: async (request) => {
        requests.push(request);
        return new Blob(['zip-bytes']);
      },
      download: (_blob, filename) => downloads.push(filename),
    });
    dialog.render([asset('a1'), asset('a2'), asset('a3')]);
    host.querySelectorAll<HTMLInputElement>('li input')[1]!.checked = false;
    host.querySelector<HTMLInputElement>('.author-name')!.value = 'Ada Lovelace';
    host.querySelector<HTMLSelectElement>('.license')!.value = 'CC-BY-4.0';
    host.querySelector<HTMLButtonElement>('.export-submit')!.click();
    await vi.waitFor(() => expect(requests).toHaveLength(1));
    expect(requests[0]).toEqual({
      assetIds: ['a1', 'a3'],
      authorName: 'Ada Lovelace',
      license: 'CC-BY-4.0',
    });
    expect(downloads).toEqual(['ro-crate.zip']);
  });

  it('blocks submit without a name', async () => {
    const onExport = vi.fn();
    const dialog = new ExportDialogComponent(host, { onExport });
    dialog.render([asset('a1')]);
    host.querySelector<HTMLButtonElement>('.export-submit')!.click();
    await Promise.resolve();
    expect(onExport).not.toHaveBeenCalled();
    expect(host.querySelector('.export-error')!.textContent).toContain('Enter your name');
  });

  it('shows server errors inline with the stable code', async () => {
    const dialog = new ExportDialogComponent(host, {
      onExport: async () => {
        throw new ApiRequestError(400, {
          code: 'unknown-license',
          message: 'not allowed',
        });
      },
    });
    dialog.render([asset('a1')]);
    host.querySelector<HTMLInputElement>('.author-name')!.value = 'Ada';
    host.querySelector<HTMLButtonElement>('.export-submit')!.click();
    await vi.waitFor(() =>
      expect(host.querySelector('.export-error')!.textContent).toContain('unknown-license'),
    );
  });

  it('offers exactly the allow-listed licenses', () => {
    const dialog = new ExportDialogComponent(host, { onExport: vi.fn() });
    dialog.render([]);
    const options = Array.from(host.querySelectorAll('option')).map((o) => o.value);
    expect(options).toEqual([...LICENSE_CHOICES]);
  });
});
