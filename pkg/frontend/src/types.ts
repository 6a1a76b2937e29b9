/** Wire types of the researchdesk service API (camelCase JSON). */

export interface ProvenanceRecord {
  creatorKind: 'user' | 'assistant';
  assistantId?: string;
  sessionId?: string;
  createdAt: string;
  authorName?: string;
  license?: string;
}

export interface Asset {
  id: string;
  name: string;
  role: string;
  kind: 'text' | 'json' | 'bibliography';
  content: string;
  version: number;
  supersedes?: string;
  provenance: ProvenanceRecord;
}

export interface Author {
  family: string;
  given?: string;
}

export interface BibliographyEntry {
  title: string;
  authors?: Author[];
  year?: number;
  venue?: string;
  doi?: string;
  url?: string;
  abstract?: string;
  sourceTool?: string;
}

export interface ToolCall {
  id: string;
  toolName: string;
  argumentsJson: string;
}

export interface ChatMessage {
  role: 'system' | 'user' | 'assistant' | 'tool';
  text?: string;
  toolCalls?: ToolCall[];
  toolCallId?: string;
  toolName?: string;
}

export interface Session {
  id: string;
  userId: string;
  projectId: string;
  assistantId: string;
  selectedAssetIds: string[];
  messages: ChatMessage[];
  status: 'active' | 'ended';
  createdAt: string;
}

export interface InputRole {
  role: string;
  required: boolean;
}

export interface AssistantSpec {
  id: string;
  name: string;
  description: string;
  lifecyclePhase: 'ideation' | 'literature' | 'writing' | 'review' | 'publishing';
  systemPrompt: string;
  modelRef: string;
  inputRoles: InputRole[];
  outputRoles: string[];
  toolIds: string[];
  enabled: boolean;
  temperature: number;
}

export interface ToolDescriptor {
  id: string;
  name: string;
  description: string;
  inputSchema: unknown;
  outputMode: 'chat_text' | 'ui_component';
  uiComponentId?: 'literature-search' | 'track-changes';
}

export interface SearchPayload {
  entries: BibliographyEntry[];
  page: number;
  pageSize: number;
  hasMore: boolean;
}

export interface ToolResult {
  toolId: string;
  status: 'ok' | 'error';
  chatText?: string;
  structured?: unknown;
  errorMessage?: string;
  uiComponentId?: string;
}

export interface EngineEvent {
  kind: 'assistant_text' | 'tool_invoked' | 'tool_result' | 'error' | 'done';
  text?: string;
  toolId?: string;
  toolCallId?: string;
  argumentsJson?: string;
  result?: ToolResult;
  code?: string;
  message?: string;
  transcriptIndex?: number;
}

export interface ApiError {
  code: string;
  message: string;
}

export interface UsageInfo {
  dailyLimit: number;
  usedToday?: number;
  remaining: number;
  unlimited: boolean;
}

/** Generative-UI request attached to a tool result. */
export interface PendingGenerativeUi {
  componentId: 'literature-search' | 'track-changes';
  payload: ToolResult;
}
