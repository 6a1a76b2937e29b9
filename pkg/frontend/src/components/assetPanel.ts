/** Asset panel: assets relevant to the selected assistant (its input and
 * output roles), with checkboxes that drive session input selection. */

import type { Asset, AssistantSpec } from '../types.js';

export class AssetPanelComponent {
  private assets: Asset[] = [];

  constructor(private readonly root: HTMLElement) {
    this.root.classList.add('asset-panel');
  }

  render(assets: Asset[], assistant: AssistantSpec | null): void {
    const relevant = assistant
      ? new Set([...assistant.inputRoles.map((r) => r.role), ...assistant.outputRoles])
      : null;
    this.assets = relevant ? assets.filter((a) => relevant.has(a.role)) : assets;
    this.root.innerHTML = '';
    const heading = document.createElement('h3');
    heading.textContent = 'Assets';
    this.root.appendChild(heading);
    if (this.assets.length === 0) {
      const empty = document.createElement('p');
      empty.className = 'empty';
      empty.textContent = 'No assets yet for this assistant.';
      this.root.appendChild(empty);
      return;
    }
    const list = document.createElement('ul');
    for (const asset of this.assets) {
      const row = document.createElement('li');
      row.className = 'asset-row';
      const checkbox = document.createElement('input');
      checkbox.type = 'checkbox';
      checkbox.dataset['assetId'] = asset.id;
      const required = assistant?.inputRoles.some((r) => r.role === asset.role && r.required);
      checkbox.checked = Boolean(required);
      row.appendChild(checkbox);
      const label = document.createElement('span');
      label.textContent = `${asset.name} (${asset.role} v${asset.version})`;
      label.title = asset.content.slice(0, 400);
      row.appendChild(label);
      list.appendChild(row);
    }
    this.root.appendChild(list);
  }

  selectedAssetIds(): string[] {
    const ids: string[] = [];
    this.root
      .querySelectorAll<HTMLInputElement>('input[type="checkbox"]')
      .forEach((box) => {
        if (box.checked && box.dataset['assetId']) ids.push(box.dataset['assetId']);
      });
    return ids;
  }

  newestOfRole(role: string): Asset | undefined {
    return this.assets
      .filter((a) => a.role === role)
      .sort((a, b) => b.version - a.version)[0];
  }
}
