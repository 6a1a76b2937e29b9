"""Conversation loop for one assistant: context assembly from selected assets,
model calls, confined tool dispatch, iteration capping, and promotion of
approved outputs into the asset store.

Promotion is always an explicit caller action; the engine never turns model
output into assets on its own.
"""

from __future__ import annotations

import re
import threading
import uuid
from typing import Callable, Iterator, Literal, Optional, Sequence

from .errors import (
    BudgetExceededError,
    ContractViolation,
    MissingRequiredAssetError,
    ResearchDeskError,
    RoleNotProducedError,
    SessionBusyError,
    SessionEndedError,
    UnknownSessionError,
)
from .gateway import (
    ChatRequest,
    Credentials,
    Gateway,
    UsageLedger,
    estimate_tokens,
    parse_model_ref,
)
from .model import (
    Asset,
    BibliographyEntry,
    ChatMessage,
    FrozenWireModel,
    ProvenanceRecord,
    UtcTimestamp,
    WireModel,
    bibliography_content,
    canonical_json,
    normalize_doi,
    parse_bibliography,
    utc_now,
    validate_entry,
)
from .registry import AssistantSpec, Registry
from .store import AssetStore
from .tools import ToolContext, ToolLibrary, ToolResult

MAX_GATEWAY_CALLS = 8

CONTEXT_BLOCK_HEADER = "==== CONTEXT ASSETS ===="
CONTEXT_BLOCK_FOOTER = "==== END CONTEXT ASSETS ===="

FINAL_BLOCK = re.compile(r"<<<FINAL>>>\s*\n(.*?)\n\s*<<<END FINAL>>>", re.DOTALL)

CAP_APOLOGY = (
    "I could not finish this request: it needed more tool calls than one turn "
    "allows. Please narrow the request or send it again to continue."
)


class Session(WireModel):
    id: str
    user_id: str
    project_id: str
    assistant_id: str
    selected_asset_ids: tuple[str, ...] = ()
    messages: list[ChatMessage] = []
    status: Literal["active", "ended"] = "active"
    created_at: UtcTimestamp


class EngineEvent(FrozenWireModel):
    kind: Literal["assistant_text", "tool_invoked", "tool_result", "error", "done"]
    text: Optional[str] = None
    tool_id: Optional[str] = None
    tool_call_id: Optional[str] = None
    arguments_json: Optional[str] = None
    result: Optional[ToolResult] = None
    code: Optional[str] = None
    message: Optional[str] = None
    transcript_index: Optional[int] = None


def extract_final_block(text: str) -> Optional[str]:
    """Content of the delimited final-artifact block, if the reply carries one."""
    match = FINAL_BLOCK.search(text)
    return match.group(1).strip() if match else None


def _asset_payload(asset: Asset) -> str:
    return asset.content


def _context_block(assets: Sequence[Asset]) -> str:
    parts = [CONTEXT_BLOCK_HEADER]
    for asset in assets:
        parts.append(f"[role: {asset.role} | name: {asset.name} | version: {asset.version}]")
        parts.append(_asset_payload(asset))
    parts.append(CONTEXT_BLOCK_FOOTER)
    return "\n".join(parts)


def render_tool_result(result: ToolResult) -> str:
    """How a tool result reads inside the transcript fed back to the model."""
    if result.status == "error":
        return f"Tool error: {result.error_message}"
    if result.chat_text:
        return result.chat_text
    return canonical_json(result.structured)


class Engine:
    def __init__(
        self,
        registry: Registry,
        gateway: Gateway,
        library: ToolLibrary,
        store: AssetStore,
        ledger: UsageLedger,
        clock: Callable = utc_now,
        max_gateway_calls: int = MAX_GATEWAY_CALLS,
    ):
        self.registry = registry
        self.gateway = gateway
        self.library = library
        self.store = store
        self.ledger = ledger
        self._clock = clock
        self._max_calls = max_gateway_calls
        self._sessions: dict[str, Session] = {}
        self._busy: set[str] = set()
        self._guard = threading.Lock()

    # -- sessions -----------------------------------------------------------

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no session {session_id!r}") from None

    def start_session(
        self,
        user_id: str,
        assistant_id: str,
        selected_assets: Sequence[Asset] = (),
        project_id: str = "default",
        waive_missing: bool = False,
    ) -> Session:
        spec = self.registry.get(assistant_id)
        covered = {a.role for a in selected_assets}
        missing = [r for r in spec.required_roles() if r not in covered]
        if missing and not waive_missing:
            raise MissingRequiredAssetError(
                f"missing required asset role(s): {', '.join(missing)}"
            )
        session = Session(
            id=f"s-{uuid.uuid4().hex[:12]}",
            user_id=user_id,
            project_id=project_id,
            assistant_id=assistant_id,
            selected_asset_ids=tuple(a.id for a in selected_assets),
            messages=[
                ChatMessage(role="system", text=self._system_text(spec, selected_assets))
            ],
            created_at=self._clock(),
        )
        with self._guard:
            self._sessions[session.id] = session
        return session

    @staticmethod
    def _system_text(spec: AssistantSpec, selected_assets: Sequence[Asset]) -> str:
        """Substitute {{role}} placeholders with the newest selected asset of that
        role; everything unreferenced lands in a delimited context block."""
        newest: dict[str, Asset] = {}
        for asset in selected_assets:
            head = newest.get(asset.role)
            if head is None or asset.version > head.version:
                newest[asset.role] = asset
        placeholders = set(spec.placeholders())
        text = spec.system_prompt
        for role in placeholders:
            replacement = _asset_payload(newest[role]) if role in newest else "(not provided)"
            text = re.sub(
                r"\{\{\s*" + re.escape(role) + r"\s*\}\}", lambda m: replacement, text
            )
        leftovers = [a for a in selected_assets if a.role not in placeholders]
        if leftovers:
            text = text.rstrip() + "\n\n" + _context_block(leftovers)
        return text

    # -- the conversation loop ----------------------------------------------

    def send_message(
        self, session: Session, user_text: str, byok: bool = False
    ) -> Iterator[EngineEvent]:
        """Run one user turn; yields the ordered event stream, ending with
        exactly one terminal event (done on success, error on failure).

        The busy flag is taken here (so a concurrent second call fails fast)
        and released when the returned stream finishes or is closed; callers
        must consume or close the stream."""
        if session.status != "active":
            raise SessionEndedError(f"session {session.id} has ended")
        if not user_text or not user_text.strip():
            raise ContractViolation("userText must be non-empty")
        with self._guard:
            if session.id in self._busy:
                raise SessionBusyError(f"session {session.id} has a message in flight")
            self._busy.add(session.id)
        return self._turn(session, user_text, byok)

    def _turn(self, session: Session, user_text: str, byok: bool) -> Iterator[EngineEvent]:
        spec = self.registry.get(session.assistant_id)
        model_ref = parse_model_ref(spec.model_ref)
        descriptors = self.library.summaries(spec.tool_ids)
        try:
            session.messages.append(ChatMessage(role="user", text=user_text))
            calls = 0
            while True:
                if calls >= self._max_calls:
                    session.messages.append(
                        ChatMessage(role="assistant", text=CAP_APOLOGY)
                    )
                    yield EngineEvent(kind="assistant_text", text=CAP_APOLOGY)
                    yield EngineEvent(
                        kind="error",
                        code="tool-iteration-cap",
                        message=f"turn exceeded {self._max_calls} gateway calls",
                    )
                    return
                estimate = estimate_tokens(
                    "".join(m.text or "" for m in session.messages)
                )
                decision = self.ledger.check_and_record(
                    session.user_id, estimate, byok=byok
                )
                if not decision.allowed:
                    yield EngineEvent(
                        kind="error",
                        code=BudgetExceededError.code,
                        message="daily token budget exhausted",
                    )
                    return
                request = ChatRequest(
                    messages=tuple(session.messages),
                    tool_descriptors=descriptors,
                    temperature=spec.temperature,
                )
                calls += 1
                try:
                    response = self.gateway.complete(model_ref, request, self._credentials(byok))
                except ResearchDeskError as exc:
                    yield EngineEvent(kind="error", code=exc.code, message=str(exc))
                    return
                if response.kind == "text":
                    session.messages.append(
                        ChatMessage(role="assistant", text=response.text)
                    )
                    yield EngineEvent(kind="assistant_text", text=response.text)
                    yield EngineEvent(
                        kind="done", transcript_index=len(session.messages) - 1
                    )
                    return
                session.messages.append(
                    ChatMessage(role="assistant", tool_calls=response.tool_calls)
                )
                for call in response.tool_calls:
                    yield EngineEvent(
                        kind="tool_invoked",
                        tool_id=call.tool_name,
                        tool_call_id=call.id,
                        arguments_json=call.arguments_json,
                    )
                    result = self._dispatch(spec, call.tool_name, call.arguments_json)
                    session.messages.append(
                        ChatMessage(
                            role="tool",
                            text=render_tool_result(result),
                            tool_call_id=call.id,
                            tool_name=call.tool_name,
                        )
                    )
                    yield EngineEvent(
                        kind="tool_result", tool_call_id=call.id, result=result
                    )
        finally:
            with self._guard:
                self._busy.discard(session.id)

    def _credentials(self, byok) -> Credentials:
        if isinstance(byok, str) and byok:
            return Credentials(api_key=byok)
        return Credentials()

    def _dispatch(self, spec: AssistantSpec, tool_id: str, arguments_json: str) -> ToolResult:
        """Dispatch confined to the assistant's tool set; contract refusals come
        back as error results so the model can see and recover from them."""
        context = ToolContext(allowed_tool_ids=frozenset(spec.tool_ids))
        try:
            return self.library.dispatch(tool_id, arguments_json, context)
        except ResearchDeskError as exc:
            return ToolResult(
                tool_id=tool_id,
                status="error",
                error_message=f"{exc.code}: {exc}",
            )

    # -- promotion ----------------------------------------------------------

    def promote_to_asset(
        self,
        session: Session,
        content: str,
        role: str,
        name: str,
        override_role: bool = False,
        origin: Optional[Literal["user", "assistant"]] = None,
    ) -> Asset:
        """Store chat output as a (new version of a) role asset. The caller
        decides when; provenance records whether the content originates from an
        assistant message (detected by exact text match unless the caller
        states the origin, e.g. when promoting an extracted final block)."""
        spec = self.registry.get(session.assistant_id)
        if role not in spec.output_roles and not override_role:
            raise RoleNotProducedError(
                f"assistant {spec.id!r} does not produce role {role!r}"
            )
        if not content or not content.strip():
            raise ContractViolation("content must be non-empty")
        if origin is not None:
            from_assistant = origin == "assistant"
        else:
            from_assistant = any(
                m.role == "assistant" and m.text and m.text.strip() == content.strip()
                for m in session.messages
            )
        if from_assistant:
            provenance = ProvenanceRecord(
                creator_kind="assistant",
                assistant_id=session.assistant_id,
                session_id=session.id,
                created_at=self._clock(),
            )
        else:
            provenance = ProvenanceRecord(
                creator_kind="user", session_id=session.id, created_at=self._clock()
            )
        kind = "bibliography" if role == "bibliography" else "text"
        head = self.store.newest(session.user_id, session.project_id, role, name)
        draft = Asset(
            id="",
            name=name,
            role=role,
            kind=kind,
            content=content,
            version=(head.version + 1) if head else 1,
            supersedes=head.id if head else None,
            provenance=provenance,
        )
        return self.store.put(session.user_id, session.project_id, draft)

    def add_selected_to_bibliography(
        self, session: Session, entries: Sequence[BibliographyEntry]
    ) -> Asset:
        """Merge user-selected entries into the project bibliography (new version).

        Merge key: normalized DOI when present, else (lowercased title, year);
        duplicates by key are skipped, so the operation is idempotent."""
        if not entries:
            raise ContractViolation("entries must be non-empty")
        for entry in entries:
            violations = validate_entry(entry)
            if violations:
                raise ContractViolation("; ".join(violations))
        head = self.store.newest(session.user_id, session.project_id, "bibliography")
        merged: list[BibliographyEntry] = list(parse_bibliography(head.content)) if head else []
        seen = {_merge_key(e) for e in merged}
        for entry in entries:
            key = _merge_key(entry)
            if key in seen:
                continue
            seen.add(key)
            merged.append(entry)
        provenance = ProvenanceRecord(
            creator_kind="assistant",
            assistant_id=session.assistant_id,
            session_id=session.id,
            created_at=self._clock(),
        )
        draft = Asset(
            id="",
            name=head.name if head else "Bibliography",
            role="bibliography",
            kind="bibliography",
            content=bibliography_content(merged),
            version=(head.version + 1) if head else 1,
            supersedes=head.id if head else None,
            provenance=provenance,
        )
        return self.store.put(session.user_id, session.project_id, draft)


def _merge_key(entry: BibliographyEntry):
    if entry.doi:
        try:
            return ("doi", normalize_doi(entry.doi))
        except Exception:
            pass
    return ("title-year", entry.title.strip().lower(), entry.year)
