/**
 * Application shell: login, assistant sidebar, chat with streamed events,
 * asset/tool panels, and the export dialog. The browser holds no
 * authoritative state; everything visible is refetched from the service.
 */

import { ApiClient, ApiRequestError } from './api.js';
import { AssetPanelComponent } from './components/assetPanel.js';
import { ChatComponent } from './components/chat.js';
import { ExportDialogComponent } from './components/exportDialog.js';
import { SidebarComponent } from './components/sidebar.js';
import { ToolPanelComponent } from './components/toolPanel.js';
import { TrackChangesComponent } from './components/trackChanges.js';
import type { AssistantSpec, BibliographyEntry, ToolDescriptor } from './types.js';

const PROJECT = 'default';

/** Final-artifact block emitted by the assistants when asked to finalize. */
const FINAL_BLOCK = /<<<FINAL>>>\s*\n([\s\S]*?)\n\s*<<<END FINAL>>>/;

export function extractFinalBlock(text: string): string | null {
  const match = FINAL_BLOCK.exec(text);
  return match ? match[1]!.trim() : null;
}

interface ViewState {
  selectedAssistantId: string | null;
  activeSessionId: string | null;
  lastSearchQuery: string | null;
}

export class App {
  private api: ApiClient | null = null;
  private assistants: AssistantSpec[] = [];
  private tools: ToolDescriptor[] = [];
  private readonly state: ViewState = {
    selectedAssistantId: null,
    activeSessionId: null,
    lastSearchQuery: null,
  };

  private sidebar!: SidebarComponent;
  private chat!: ChatComponent;
  private assetPanel!: AssetPanelComponent;
  private toolPanel!: ToolPanelComponent;

  constructor(private readonly root: HTMLElement) {}

  mount(): void {
    this.root.innerHTML = `
      <div class="login-view">
        <h2>Sign in</h2>
        <input class="token" type="password" placeholder="API token" />
        <input class="provider-key" type="password" placeholder="Provider key (optional, BYOK)" />
        <button class="login">Sign in</button>
        <p class="login-error"></p>
      </div>
      <div class="workspace" hidden>
        <nav class="sidebar-host"></nav>
        <main>
          <div class="chat-host"></div>
          <form class="composer">
            <input class="message" type="text" placeholder="Message the assistant…" />
            <button type="submit" class="send">Send</button>
          </form>
          <div class="promote-bar" hidden>
            <input class="promote-name" type="text" placeholder="Asset name" />
            <select class="promote-role"></select>
            <button type="button" class="promote">Save final block to assets</button>
            <span class="promote-status"></span>
          </div>
        </main>
        <aside>
          <div class="usage"></div>
          <div class="asset-host"></div>
          <div class="tool-host"></div>
          <button class="open-export">Export assets…</button>
          <div class="export-host" hidden></div>
          <div class="track-changes-host"></div>
        </aside>
      </div>
    `;
    this.root
      .querySelector<HTMLButtonElement>('.login')!
      .addEventListener('click', () => void this.login());
    this.root
      .querySelector<HTMLFormElement>('.composer')!
      .addEventListener('submit', (event) => {
        event.preventDefault();
        void this.send();
      });
    this.root
      .querySelector<HTMLButtonElement>('.open-export')!
      .addEventListener('click', () => void this.openExport());
    this.root
      .querySelector<HTMLButtonElement>('.promote')!
      .addEventListener('click', () => void this.promoteFinal());
  }

  private async login(): Promise<void> {
    const token = this.root.querySelector<HTMLInputElement>('.token')!.value.trim();
    const providerKey = this.root
      .querySelector<HTMLInputElement>('.provider-key')!
      .value.trim();
    const errorLine = this.root.querySelector<HTMLElement>('.login-error')!;
    this.api = new ApiClient('', token, providerKey || null);
    try {
      const [assistants, tools] = await Promise.all([
        this.api.listAssistants(),
        this.api.listTools(),
      ]);
      this.assistants = assistants.assistants;
      this.tools = tools.tools;
    } catch (cause) {
      errorLine.textContent =
        cause instanceof ApiRequestError ? cause.message : 'Service unreachable.';
      this.api = null;
      return;
    }
    this.root.querySelector<HTMLElement>('.login-view')!.hidden = true;
    const workspace = this.root.querySelector<HTMLElement>('.workspace')!;
    workspace.hidden = false;

    this.sidebar = new SidebarComponent(
      this.root.querySelector<HTMLElement>('.sidebar-host')!,
      (id) => void this.selectAssistant(id),
    );
    this.chat = new ChatComponent(this.root.querySelector<HTMLElement>('.chat-host')!, {
      onAddSelected: (entries) => this.addToBibliography(entries),
      onPageChange: (page) => void this.fetchSearchPage(page),
      onTurnEnd: (events) => void this.afterTurn(events),
    });
    this.assetPanel = new AssetPanelComponent(
      this.root.querySelector<HTMLElement>('.asset-host')!,
    );
    this.toolPanel = new ToolPanelComponent(
      this.root.querySelector<HTMLElement>('.tool-host')!,
    );
    this.sidebar.render(this.assistants, null);
    await this.refreshPanels();
    await this.refreshUsage();
  }

  private assistant(): AssistantSpec | null {
    return this.assistants.find((a) => a.id === this.state.selectedAssistantId) ?? null;
  }

  private async refreshUsage(): Promise<void> {
    if (!this.api) return;
    const usage = await this.api.usage();
    this.root.querySelector<HTMLElement>('.usage')!.textContent = usage.unlimited
      ? 'Token budget: unlimited (BYOK)'
      : `Tokens left today: ${usage.remaining} / ${usage.dailyLimit}`;
  }

  private async refreshPanels(): Promise<void> {
    if (!this.api) return;
    const { assets } = await this.api.listAssets(PROJECT, undefined, true);
    this.assetPanel.render(assets, this.assistant());
    this.toolPanel.render(this.tools, this.assistant());
    const promoteBar = this.root.querySelector<HTMLElement>('.promote-bar')!;
    const assistant = this.assistant();
    promoteBar.hidden = !assistant;
    if (assistant) {
      const roleSelect = this.root.querySelector<HTMLSelectElement>('.promote-role')!;
      roleSelect.innerHTML = '';
      for (const role of assistant.outputRoles) {
        const option = document.createElement('option');
        option.value = role;
        option.textContent = role;
        roleSelect.appendChild(option);
      }
    }
  }

  private async selectAssistant(assistantId: string): Promise<void> {
    this.state.selectedAssistantId = assistantId;
    this.state.activeSessionId = null; // a fresh session per assistant selection
    this.sidebar.render(this.assistants, assistantId);
    this.chat.clear();
    await this.refreshPanels();
  }

  private async ensureSession(): Promise<string | null> {
    if (!this.api || !this.state.selectedAssistantId) return null;
    if (this.state.activeSessionId) return this.state.activeSessionId;
    const session = await this.api.startSession(PROJECT, {
      assistantId: this.state.selectedAssistantId,
      selectedAssetIds: this.assetPanel.selectedAssetIds(),
    });
    this.state.activeSessionId = session.id;
    return session.id;
  }

  private async send(): Promise<void> {
    if (!this.api) return;
    const input = this.root.querySelector<HTMLInputElement>('.message')!;
    const text = input.value.trim();
    if (!text) return;
    const sendButton = this.root.querySelector<HTMLButtonElement>('.send')!;
    sendButton.disabled = true; // one in-flight stream per tab
    try {
      const sessionId = await this.ensureSession();
      if (!sessionId) return;
      this.chat.addUserMessage(text);
      input.value = '';
      await this.api.sendMessage(sessionId, text, (event) => this.chat.addEvent(event));
    } catch (cause) {
      this.chat.addEvent({
        kind: 'error',
        code: cause instanceof ApiRequestError ? cause.code : 'network',
        message: (cause as Error).message,
      });
    } finally {
      sendButton.disabled = false;
      await this.refreshUsage();
    }
  }

  private async afterTurn(events: { kind: string; text?: string }[]): Promise<void> {
    // proofreading replies with a final block open the track-changes interface
    const assistant = this.assistant();
    if (!assistant || !assistant.outputRoles.includes('paper-related-work')) return;
    if (assistant.id !== 'paper-proofreading') return;
    const lastText = [...events]
      .reverse()
      .find((e) => e.kind === 'assistant_text' && e.text);
    if (!lastText?.text) return;
    const revised = extractFinalBlock(lastText.text);
    if (!revised) return;
    const original = this.assetPanel.newestOfRole('paper-related-work');
    if (!original) return;
    const host = this.root.querySelector<HTMLElement>('.track-changes-host')!;
    const component = new TrackChangesComponent(host, {
      onApply: async (resolvedText) => {
        if (!this.api || !this.state.activeSessionId) return;
        const asset = await this.api.promote(this.state.activeSessionId, {
          role: original.role,
          name: original.name,
          content: resolvedText,
        });
        await this.refreshPanels();
        return asset;
      },
    });
    component.render(original.content, revised);
  }

  private async addToBibliography(entries: BibliographyEntry[]) {
    if (!this.api || !this.state.activeSessionId) return;
    const asset = await this.api.addToBibliography(this.state.activeSessionId, entries);
    await this.refreshPanels();
    return asset;
  }

  private async fetchSearchPage(page: number): Promise<void> {
    // pagination re-asks the assistant, which re-invokes the search tool
    if (!this.api || !this.state.activeSessionId) return;
    await this.api.sendMessage(
      this.state.activeSessionId,
      `Show page ${page + 1} of the previous search.`,
      (event) => this.chat.addEvent(event),
    );
  }

  private async promoteFinal(): Promise<void> {
    if (!this.api || !this.state.activeSessionId) return;
    const status = this.root.querySelector<HTMLElement>('.promote-status')!;
    const name = this.root.querySelector<HTMLInputElement>('.promote-name')!.value.trim();
    const role = this.root.querySelector<HTMLSelectElement>('.promote-role')!.value;
    if (!name) {
      status.textContent = 'Name the asset first.';
      return;
    }
    try {
      const session = await this.api.getSession(this.state.activeSessionId);
      let index = -1;
      for (let i = session.messages.length - 1; i >= 0; i--) {
        const message = session.messages[i]!;
        if (message.role === 'assistant' && message.text) {
          index = i;
          break;
        }
      }
      if (index < 0) {
        status.textContent = 'No assistant reply to promote yet.';
        return;
      }
      const asset = await this.api.promote(this.state.activeSessionId, {
        role,
        name,
        messageIndex: index,
        extractFinal: true,
      });
      status.textContent = `Saved ${asset.role} v${asset.version}.`;
      await this.refreshPanels();
    } catch (cause) {
      status.textContent =
        cause instanceof ApiRequestError
          ? `Could not save (${cause.code}): ${cause.message}`
          : `Could not save: ${(cause as Error).message}`;
    }
  }

  private async openExport(): Promise<void> {
    if (!this.api) return;
    const host = this.root.querySelector<HTMLElement>('.export-host')!;
    host.hidden = false;
    const { assets } = await this.api.listAssets(PROJECT, undefined, true);
    const dialog = new ExportDialogComponent(host, {
      onExport: (request) => this.api!.exportCrate(PROJECT, request),
    });
    dialog.render(assets);
  }
}

export function bootstrap(): void {
  const root = document.getElementById('app');
  if (root) new App(root).mount();
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap();
}
