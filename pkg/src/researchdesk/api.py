"""Authenticated HTTP facade over the platform.

All routes live under /api/v1 behind bearer-token auth (static token file);
/healthz is open. Message turns stream as server-sent-event frames, one
canonical-JSON EngineEvent per frame. Module errors map to stable
(HTTP status, code) pairs; the table lives in docs/errors.md.
"""

from __future__ import annotations

from typing import Optional

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse

from .config import Components, ServiceConfig, build_components
from .engine import Engine, extract_final_block
from .errors import (
    AssistantDisabledError,
    BudgetExceededError,
    ContractViolation,
    ResearchDeskError,
    UnauthenticatedError,
)
from .exporter import build_crate, export_latex, package_archive
from .gateway import UNLIMITED
from .model import (
    Asset,
    BibliographyEntry,
    ProvenanceRecord,
    WireModel,
    canonical_json,
    utc_now,
)

STATUS_BY_CODE = {
    "contract-violation": 400,
    "malformed-doi": 400,
    "invalid-orcid": 400,
    "parse-error": 400,
    "duplicate-id": 400,
    "schema-violation": 400,
    "tool-not-allowed": 400,
    "missing-required-asset": 400,
    "role-not-produced": 400,
    "session-ended": 400,
    "validation-failed": 400,
    "unknown-license": 400,
    "no-paper-assets": 400,
    "assistant-disabled": 400,
    "unauthenticated": 401,
    "unknown-assistant": 404,
    "unknown-asset": 404,
    "unknown-project": 404,
    "unknown-session": 404,
    "unknown-tool": 404,
    "not-found": 404,
    "session-busy": 409,
    "budget-exceeded": 429,
    "storage-failure": 500,
    "internal-error": 500,
    "provider-unreachable": 502,
    "provider-rejected": 502,
    "malformed-response": 502,
    "script-exhausted": 502,
    "upstream-unavailable": 502,
    "fetch-failed": 502,
    "unsupported-content": 502,
    "size-exceeded": 502,
    "tool-execution-failed": 502,
}


class Principal(WireModel):
    user_id: str
    byok: Optional[str] = None


class StartSessionBody(WireModel):
    assistant_id: str
    selected_asset_ids: list[str] = []
    waive_missing: bool = False


class MessageBody(WireModel):
    text: str


class CreateAssetBody(WireModel):
    name: str
    role: str
    kind: str = "text"
    content: str
    author_name: Optional[str] = None


class PromoteBody(WireModel):
    role: str
    name: str
    content: Optional[str] = None
    message_index: Optional[int] = None
    override_role: bool = False
    extract_final: bool = False


class BibliographyBody(WireModel):
    entries: list[BibliographyEntry]


class CrateExportBody(WireModel):
    asset_ids: list[str] = []
    author_name: str
    license: str


class LatexExportBody(WireModel):
    asset_ids: list[str] = []


def sse_frame(event) -> str:
    return f"data: {canonical_json(event)}\n\n"


def create_app(
    config: Optional[ServiceConfig] = None, components: Optional[Components] = None
) -> FastAPI:
    config = config or ServiceConfig.from_env()
    parts = components or build_components(config)
    engine = Engine(parts.registry, parts.gateway, parts.library, parts.store, parts.ledger)

    app = FastAPI(title="researchdesk", version="0.1.0")
    app.state.engine = engine
    app.state.components = parts

    def principal_of(
        authorization: Optional[str] = Header(default=None),
        x_provider_key: Optional[str] = Header(default=None),
    ) -> Principal:
        if not authorization or not authorization.startswith("Bearer "):
            raise UnauthenticatedError("missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        user_id = parts.credentials.get(token)
        if user_id is None:
            raise UnauthenticatedError("invalid bearer token")
        return Principal(user_id=user_id, byok=x_provider_key or None)

    @app.exception_handler(ResearchDeskError)
    async def on_domain_error(request: Request, exc: ResearchDeskError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/v1/assistants")
    def list_assistants(principal: Principal = Depends(principal_of)):
        return {"assistants": [a.to_wire() for a in parts.registry.assistants]}

    @app.get("/api/v1/tools")
    def list_tools(principal: Principal = Depends(principal_of)):
        return {"tools": [d.to_wire() for d in parts.library.descriptors.values()]}

    @app.get("/api/v1/usage")
    def usage(principal: Principal = Depends(principal_of)):
        if principal.byok:
            return {"dailyLimit": parts.ledger.daily_limit, "remaining": UNLIMITED, "unlimited": True}
        used = parts.ledger.used_today(principal.user_id)
        return {
            "dailyLimit": parts.ledger.daily_limit,
            "usedToday": used,
            "remaining": max(parts.ledger.daily_limit - used, 0),
            "unlimited": False,
        }

    # -- sessions ------------------------------------------------------------

    @app.post("/api/v1/projects/{project_id}/sessions")
    def start_session(
        project_id: str,
        body: StartSessionBody,
        principal: Principal = Depends(principal_of),
    ):
        spec = parts.registry.get(body.assistant_id)
        if not spec.enabled:
            raise AssistantDisabledError(f"assistant {spec.id!r} is disabled")
        parts.store.ensure_project(principal.user_id, project_id)
        selected = [
            parts.store.get(principal.user_id, project_id, asset_id)
            for asset_id in body.selected_asset_ids
        ]
        session = engine.start_session(
            principal.user_id,
            body.assistant_id,
            selected,
            project_id=project_id,
            waive_missing=body.waive_missing,
        )
        return session.to_wire()

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str, principal: Principal = Depends(principal_of)):
        session = engine.get_session(session_id)
        _check_owner(session, principal)
        return session.to_wire()

    @app.post("/api/v1/sessions/{session_id}/messages")
    def send_message(
        session_id: str,
        body: MessageBody,
        principal: Principal = Depends(principal_of),
    ):
        session = engine.get_session(session_id)
        _check_owner(session, principal)
        stream = engine.send_message(session, body.text, byok=principal.byok or False)
        first = next(stream)
        if first.kind == "error" and first.code == "budget-exceeded":
            stream.close()
            raise BudgetExceededError(first.message or "daily token budget exhausted")

        def frames():
            yield sse_frame(first)
            for event in stream:
                yield sse_frame(event)

        return StreamingResponse(frames(), media_type="text/event-stream")

    @app.post("/api/v1/sessions/{session_id}/assets")
    def promote(
        session_id: str,
        body: PromoteBody,
        principal: Principal = Depends(principal_of),
    ):
        session = engine.get_session(session_id)
        _check_owner(session, principal)
        content = body.content
        origin = None
        if body.message_index is not None:
            if not 0 <= body.message_index < len(session.messages):
                raise ContractViolation("messageIndex out of range")
            message = session.messages[body.message_index]
            if message.role != "assistant" or not message.text:
                raise ContractViolation("messageIndex must point at an assistant text message")
            content = message.text
            origin = "assistant"
        if content is None:
            raise ContractViolation("provide content or messageIndex")
        if body.extract_final:
            content = extract_final_block(content) or content
        asset = engine.promote_to_asset(
            session,
            content,
            body.role,
            body.name,
            override_role=body.override_role,
            origin=origin,
        )
        return asset.to_wire()

    @app.post("/api/v1/sessions/{session_id}/bibliography")
    def add_bibliography(
        session_id: str,
        body: BibliographyBody,
        principal: Principal = Depends(principal_of),
    ):
        session = engine.get_session(session_id)
        _check_owner(session, principal)
        asset = engine.add_selected_to_bibliography(session, body.entries)
        return asset.to_wire()

    # -- assets ----------------------------------------------------------------

    @app.get("/api/v1/projects/{project_id}/assets")
    def list_assets(
        project_id: str,
        role: Optional[str] = None,
        newest_only: bool = False,
        principal: Principal = Depends(principal_of),
    ):
        parts.store.ensure_project(principal.user_id, project_id)
        assets = parts.store.list(
            principal.user_id, project_id, role=role, newest_only=newest_only
        )
        return {"assets": [a.to_wire() for a in assets]}

    @app.post("/api/v1/projects/{project_id}/assets")
    def create_asset(
        project_id: str,
        body: CreateAssetBody,
        principal: Principal = Depends(principal_of),
    ):
        parts.store.ensure_project(principal.user_id, project_id)
        head = parts.store.newest(principal.user_id, project_id, body.role, body.name)
        draft = Asset(
            id="",
            name=body.name,
            role=body.role,
            kind=body.kind,  # type: ignore[arg-type]
            content=body.content,
            version=(head.version + 1) if head else 1,
            supersedes=head.id if head else None,
            provenance=ProvenanceRecord(
                creator_kind="user", author_name=body.author_name, created_at=utc_now()
            ),
        )
        return parts.store.put(principal.user_id, project_id, draft).to_wire()

    # -- export ------------------------------------------------------------------

    @app.post("/api/v1/projects/{project_id}/export/crate")
    def export_crate(
        project_id: str,
        body: CrateExportBody,
        principal: Principal = Depends(principal_of),
    ):
        parts.store.ensure_project(principal.user_id, project_id)
        selection = parts.store.select_for_export(
            principal.user_id, project_id, body.asset_ids
        )
        manifest = build_crate(selection, body.author_name, body.license)
        archive = package_archive(manifest)
        return Response(
            content=archive,
            media_type="application/zip",
            headers={"Content-Disposition": 'attachment; filename="ro-crate.zip"'},
        )

    @app.post("/api/v1/projects/{project_id}/export/latex")
    def export_latex_route(
        project_id: str,
        body: LatexExportBody,
        principal: Principal = Depends(principal_of),
    ):
        parts.store.ensure_project(principal.user_id, project_id)
        selection = parts.store.select_for_export(
            principal.user_id, project_id, body.asset_ids
        )
        result = export_latex(selection)
        return {"tex": result.tex_document, "bib": result.bib_database}

    if config.frontend_dir and config.frontend_dir.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.frontend_dir, html=True), name="ui")

    return app


def _check_owner(session, principal: Principal) -> None:
    if session.user_id != principal.user_id:
        # do not leak other users' session ids
        from .errors import UnknownSessionError

        raise UnknownSessionError(f"no session {session.id!r}")
