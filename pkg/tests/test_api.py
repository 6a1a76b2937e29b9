import io
import json
import zipfile

import pytest
from fastapi.testclient import TestClient

import researchdesk.errors as errors_module
from researchdesk.api import STATUS_BY_CODE, create_app
from researchdesk.config import Components
from researchdesk.errors import ResearchDeskError
from researchdesk.gateway import ChatResponse, Gateway, ScriptedProvider, UsageLedger
from researchdesk.model import ToolCall
from researchdesk.registry import load_builtin_registry, load_registry
from researchdesk.store import AssetStore
from researchdesk.tools import (
    FixtureTransport,
    ToolSettings,
    build_library,
    builtin_fixtures_dir,
)

AUTH = {"Authorization": "Bearer tok-alice"}


def text_step(text):
    return ChatResponse(kind="text", text=text)


def tool_step(tool, arguments, call_id="c1"):
    return ChatResponse(
        kind="tool_calls",
        tool_calls=(ToolCall(id=call_id, tool_name=tool, arguments_json=json.dumps(arguments)),),
    )


def make_client(tmp_path, script=None, daily_limit=1_000_000, registry_doc=None):
    library = build_library(FixtureTransport(builtin_fixtures_dir()), ToolSettings())
    registry = (
        load_registry(registry_doc, library.ids())
        if registry_doc
        else load_builtin_registry(library.ids())
    )
    components = Components(
        registry=registry,
        library=library,
        gateway=Gateway({"openai": ScriptedProvider(script or [text_step("ok")])}),
        store=AssetStore(tmp_path / "data"),
        ledger=UsageLedger(daily_limit=daily_limit),
        credentials={"tok-alice": "alice", "tok-bob": "bob"},
    )
    app = create_app(components=components)
    return TestClient(app), app


def sse_events(response):
    frames = [f for f in response.text.split("\n\n") if f.strip()]
    events = []
    for frame in frames:
        assert frame.startswith("data: ")
        events.append(json.loads(frame.removeprefix("data: ")))
    return events


def create_text_asset(client, role, content, name=None):
    response = client.post(
        "/api/v1/projects/default/assets",
        json={"name": name or role, "role": role, "kind": "text", "content": content},
        headers=AUTH,
    )
    assert response.status_code == 200, response.text
    return response.json()


class TestAuth:
    def test_healthz_open(self, tmp_path):
        client, _ = make_client(tmp_path)
        assert client.get("/healthz").json() == {"status": "ok"}

    def test_missing_token_rejected_everywhere(self, tmp_path):
        client, app = make_client(tmp_path)
        probes = [
            ("GET", "/api/v1/assistants", None),
            ("GET", "/api/v1/usage", None),
            ("POST", "/api/v1/projects/default/sessions", {"assistantId": "ideation"}),
            ("POST", "/api/v1/sessions/s-x/messages", {"text": "hi"}),
            ("GET", "/api/v1/projects/default/assets", None),
            ("POST", "/api/v1/projects/default/assets", {"name": "n", "role": "r", "content": "c"}),
            ("POST", "/api/v1/projects/default/export/crate", {"authorName": "A", "license": "CC-BY-4.0"}),
            ("POST", "/api/v1/projects/default/export/latex", {}),
        ]
        for method, path, body in probes:
            response = client.request(method, path, json=body)
            assert response.status_code == 401, path
            assert response.json()["error"]["code"] == "unauthenticated"
        # zero side effects: no sessions, no assets, no tokens recorded
        assert app.state.engine._sessions == {}
        assert app.state.components.ledger.used_today("alice") == 0
        assert app.state.components.store.list("alice", "default") == []

    def test_invalid_token(self, tmp_path):
        client, _ = make_client(tmp_path)
        response = client.get("/api/v1/assistants", headers={"Authorization": "Bearer nope"})
        assert response.status_code == 401

    def test_valid_token_resolves_user(self, tmp_path):
        client, _ = make_client(tmp_path)
        response = client.get("/api/v1/assistants", headers=AUTH)
        assert response.status_code == 200

    def test_byok_header_exempts_budget(self, tmp_path):
        client, _ = make_client(tmp_path, daily_limit=1)
        response = client.get(
            "/api/v1/usage", headers={**AUTH, "X-Provider-Key": "sk-user"}
        )
        assert response.json()["unlimited"] is True


class TestAssistants:
    def test_listing_includes_seven(self, tmp_path):
        client, _ = make_client(tmp_path)
        names = [a["id"] for a in client.get("/api/v1/assistants", headers=AUTH).json()["assistants"]]
        assert len(names) == 7 and "ideation" in names

    def test_disabled_assistant_listed_but_not_startable(self, tmp_path):
        doc = """
assistants:
  - {id: live, name: Live, model: openai/x, prompt: p, outputs: [ideation-topics]}
  - {id: dormant, name: Dormant, model: openai/x, prompt: p, outputs: [ideation-topics], enabled: false}
"""
        client, _ = make_client(tmp_path, registry_doc=doc)
        listing = client.get("/api/v1/assistants", headers=AUTH).json()["assistants"]
        assert {a["id"]: a["enabled"] for a in listing} == {"live": True, "dormant": False}
        response = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "dormant"},
            headers=AUTH,
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "assistant-disabled"


class TestSessionsAndStreaming:
    def test_stream_matches_engine_events(self, tmp_path):
        script = [
            tool_step("orkg-ask", {"query": "knowledge graphs question answering"}),
            text_step("here is a summary"),
        ]
        client, _ = make_client(tmp_path, script=script)
        asset = create_text_asset(client, "research-questions", "RQ1")
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "related-literature", "selectedAssetIds": [asset["id"]]},
            headers=AUTH,
        ).json()
        response = client.post(
            f"/api/v1/sessions/{session['id']}/messages",
            json={"text": "find related work"},
            headers=AUTH,
        )
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/event-stream")
        events = sse_events(response)
        assert [e["kind"] for e in events] == [
            "tool_invoked",
            "tool_result",
            "assistant_text",
            "done",
        ]
        assert events[1]["result"]["uiComponentId"] == "literature-search"

    def test_session_fetch_reproduces_transcript(self, tmp_path):
        client, _ = make_client(tmp_path, script=[text_step("pong")])
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "ideation"},
            headers=AUTH,
        ).json()
        client.post(
            f"/api/v1/sessions/{session['id']}/messages",
            json={"text": "ping"},
            headers=AUTH,
        )
        fetched = client.get(f"/api/v1/sessions/{session['id']}", headers=AUTH).json()
        assert [m["role"] for m in fetched["messages"]] == ["system", "user", "assistant"]

    def test_missing_required_asset_400(self, tmp_path):
        client, _ = make_client(tmp_path)
        response = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "paper-related-work"},
            headers=AUTH,
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "missing-required-asset"

    def test_budget_exhausted_429(self, tmp_path):
        client, _ = make_client(tmp_path, daily_limit=1)
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "ideation"},
            headers=AUTH,
        ).json()
        response = client.post(
            f"/api/v1/sessions/{session['id']}/messages",
            json={"text": "long enough message"},
            headers=AUTH,
        )
        assert response.status_code == 429
        assert response.json()["error"]["code"] == "budget-exceeded"

    def test_session_busy_409(self, tmp_path):
        client, app = make_client(tmp_path, script=[text_step("a"), text_step("b")])
        session_wire = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "ideation"},
            headers=AUTH,
        ).json()
        engine = app.state.engine
        session = engine.get_session(session_wire["id"])
        stream = engine.send_message(session, "hold the lock")
        next(stream)
        response = client.post(
            f"/api/v1/sessions/{session.id}/messages",
            json={"text": "second"},
            headers=AUTH,
        )
        assert response.status_code == 409
        assert response.json()["error"]["code"] == "session-busy"
        stream.close()

    def test_foreign_session_hidden(self, tmp_path):
        client, _ = make_client(tmp_path)
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "ideation"},
            headers=AUTH,
        ).json()
        response = client.get(
            f"/api/v1/sessions/{session['id']}",
            headers={"Authorization": "Bearer tok-bob"},
        )
        assert response.status_code == 404


class TestAssetsRoutes:
    def test_create_and_list(self, tmp_path):
        client, _ = make_client(tmp_path)
        create_text_asset(client, "ideation-topics", "topics here")
        listing = client.get("/api/v1/projects/default/assets", headers=AUTH).json()
        assert len(listing["assets"]) == 1
        assert listing["assets"][0]["provenance"]["creatorKind"] == "user"

    def test_same_name_creates_new_version(self, tmp_path):
        client, _ = make_client(tmp_path)
        first = create_text_asset(client, "ideation-topics", "v1", name="Topics")
        second = create_text_asset(client, "ideation-topics", "v2", name="Topics")
        assert second["version"] == 2 and second["supersedes"] == first["id"]
        newest = client.get(
            "/api/v1/projects/default/assets",
            params={"role": "ideation-topics", "newest_only": True},
            headers=AUTH,
        ).json()["assets"]
        assert [a["version"] for a in newest] == [2]

    def test_promote_from_message_index(self, tmp_path):
        client, _ = make_client(tmp_path, script=[text_step("draft topics")])
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "ideation"},
            headers=AUTH,
        ).json()
        client.post(
            f"/api/v1/sessions/{session['id']}/messages",
            json={"text": "suggest topics"},
            headers=AUTH,
        )
        response = client.post(
            f"/api/v1/sessions/{session['id']}/assets",
            json={"role": "ideation-topics", "name": "Topics", "messageIndex": 2},
            headers=AUTH,
        )
        assert response.status_code == 200
        asset = response.json()
        assert asset["content"] == "draft topics"
        assert asset["provenance"]["creatorKind"] == "assistant"

    def test_promote_extract_final_block(self, tmp_path):
        reply = "Sure!\n<<<FINAL>>>\nTopic A\nTopic B\n<<<END FINAL>>>"
        client, _ = make_client(tmp_path, script=[text_step(reply)])
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "ideation"},
            headers=AUTH,
        ).json()
        client.post(
            f"/api/v1/sessions/{session['id']}/messages",
            json={"text": "finalize"},
            headers=AUTH,
        )
        asset = client.post(
            f"/api/v1/sessions/{session['id']}/assets",
            json={
                "role": "ideation-topics",
                "name": "Topics",
                "messageIndex": 2,
                "extractFinal": True,
            },
            headers=AUTH,
        ).json()
        assert asset["content"] == "Topic A\nTopic B"
        # extraction keeps the assistant provenance of the source message
        assert asset["provenance"]["creatorKind"] == "assistant"

    def test_bibliography_route(self, tmp_path):
        client, _ = make_client(tmp_path)
        asset = create_text_asset(client, "research-questions", "RQ")
        session = client.post(
            "/api/v1/projects/default/sessions",
            json={"assistantId": "related-literature", "selectedAssetIds": [asset["id"]]},
            headers=AUTH,
        ).json()
        entries = [
            {"title": "Paper A", "doi": "10.1000/a", "sourceTool": "orkg-ask"},
            {"title": "Paper B", "sourceTool": "orkg-ask"},
        ]
        response = client.post(
            f"/api/v1/sessions/{session['id']}/bibliography",
            json={"entries": entries},
            headers=AUTH,
        )
        assert response.status_code == 200
        stored = response.json()
        assert stored["role"] == "bibliography"
        assert len(json.loads(stored["content"])) == 2


class TestExportRoutes:
    def test_crate_empty_selection_single_entry(self, tmp_path):
        client, _ = make_client(tmp_path)
        response = client.post(
            "/api/v1/projects/default/export/crate",
            json={"assetIds": [], "authorName": "Ada", "license": "CC-BY-4.0"},
            headers=AUTH,
        )
        assert response.status_code == 200
        archive = zipfile.ZipFile(io.BytesIO(response.content))
        assert archive.namelist() == ["ro-crate-metadata.json"]

    def test_crate_with_assets(self, tmp_path):
        client, _ = make_client(tmp_path)
        a = create_text_asset(client, "paper-title", "A Title", name="Title")
        b = create_text_asset(client, "research-questions", "RQs", name="Questions")
        response = client.post(
            "/api/v1/projects/default/export/crate",
            json={"assetIds": [a["id"], b["id"]], "authorName": "Ada", "license": "CC0-1.0"},
            headers=AUTH,
        )
        archive = zipfile.ZipFile(io.BytesIO(response.content))
        assert len(archive.namelist()) == 3

    def test_unknown_license_400(self, tmp_path):
        client, _ = make_client(tmp_path)
        response = client.post(
            "/api/v1/projects/default/export/crate",
            json={"assetIds": [], "authorName": "Ada", "license": "nope"},
            headers=AUTH,
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "unknown-license"

    def test_latex_route(self, tmp_path):
        client, _ = make_client(tmp_path)
        title = create_text_asset(client, "paper-title", "Graphs & Questions", name="Title")
        response = client.post(
            "/api/v1/projects/default/export/latex",
            json={"assetIds": [title["id"]]},
            headers=AUTH,
        )
        body = response.json()
        assert "\\title{Graphs \\& Questions}" in body["tex"]

    def test_latex_no_paper_assets_400(self, tmp_path):
        client, _ = make_client(tmp_path)
        response = client.post(
            "/api/v1/projects/default/export/latex",
            json={"assetIds": []},
            headers=AUTH,
        )
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "no-paper-assets"


class TestUsageRoute:
    def test_usage_reports_remaining(self, tmp_path):
        client, app = make_client(tmp_path, daily_limit=1000)
        app.state.components.ledger.check_and_record("alice", 400)
        body = client.get("/api/v1/usage", headers=AUTH).json()
        assert body == {
            "dailyLimit": 1000,
            "usedToday": 400,
            "remaining": 600,
            "unlimited": False,
        }


class TestErrorCodeTable:
    def test_every_error_code_has_exactly_one_status(self):
        codes = set()
        for name in dir(errors_module):
            obj = getattr(errors_module, name)
            if isinstance(obj, type) and issubclass(obj, ResearchDeskError):
                codes.add(obj.code)
        missing = codes - set(STATUS_BY_CODE)
        assert missing == set(), f"codes without a status mapping: {missing}"
