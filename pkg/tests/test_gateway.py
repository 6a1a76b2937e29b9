import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from researchdesk.errors import (
    ContractViolation,
    ProviderRejectedError,
    ProviderUnreachableError,
    ScriptExhaustedError,
)
from researchdesk.gateway import (
    UNLIMITED,
    ChatRequest,
    ChatResponse,
    Credentials,
    Gateway,
    HttpChatProvider,
    ModelRef,
    ScriptedProvider,
    ToolSummary,
    UsageLedger,
    estimate_tokens,
    parse_model_ref,
)
from researchdesk.model import ChatMessage, ToolCall

FIXTURES = Path(__file__).parent / "fixtures"

MODEL = ModelRef(provider_id="openai", model_name="gpt-4o-mini")


def request_of(*texts):
    messages = [ChatMessage(role="system", text="sys")]
    for t in texts:
        messages.append(ChatMessage(role="user", text=t))
    return ChatRequest(messages=tuple(messages))


class TestEstimateTokens:
    def test_empty(self):
        assert estimate_tokens("") == 0

    def test_eight_chars(self):
        assert estimate_tokens("12345678") == 2

    def test_nine_chars_ceil(self):
        assert estimate_tokens("123456789") == 3

    @given(st.text(max_size=500), st.text(max_size=100))
    def test_monotone_in_length(self, a, b):
        assert estimate_tokens(a + b) >= estimate_tokens(a)


class TestUsageLedger:
    def test_allow_within_limit(self):
        ledger = UsageLedger(daily_limit=1000)
        decision = ledger.check_and_record("u", 400)
        assert decision.allowed and decision.remaining == 600

    def test_deny_over_budget_keeps_ledger(self):
        ledger = UsageLedger(daily_limit=1000)
        ledger.check_and_record("u", 900)
        decision = ledger.check_and_record("u", 200)
        assert not decision.allowed
        assert ledger.used_today("u") == 900

    def test_byok_always_allowed(self):
        ledger = UsageLedger(daily_limit=10)
        decision = ledger.check_and_record("u", 10_000, byok=True)
        assert decision.allowed and decision.remaining == UNLIMITED
        ledger_user = UsageLedger(daily_limit=10, byok_users={"vip"})
        assert ledger_user.check_and_record("vip", 10_000).allowed

    def test_negative_tokens_rejected(self):
        with pytest.raises(ContractViolation):
            UsageLedger().check_and_record("u", -1)

    def test_concurrent_reservations_never_exceed_limit(self):
        ledger = UsageLedger(daily_limit=1000)
        outcomes = []
        barrier = threading.Barrier(16)

        def turn():
            barrier.wait()
            outcomes.append(ledger.check_and_record("u", 100).allowed)

        threads = [threading.Thread(target=turn) for _ in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sum(outcomes) == 10
        assert ledger.used_today("u") == 1000


class TestScriptedProvider:
    def test_single_text_step(self):
        provider = ScriptedProvider([ChatResponse(kind="text", text="a")])
        response = provider.complete(MODEL, request_of("hi"), Credentials())
        assert response.kind == "text" and response.text == "a"

    def test_steps_in_order(self):
        call = ToolCall(id="c1", tool_name="orkg-ask", arguments_json="{}")
        provider = ScriptedProvider(
            [
                ChatResponse(kind="tool_calls", tool_calls=(call,)),
                ChatResponse(kind="text", text="done"),
            ]
        )
        first = provider.complete(MODEL, request_of("q"), Credentials())
        second = provider.complete(MODEL, request_of("q"), Credentials())
        assert first.kind == "tool_calls" and first.tool_calls[0].tool_name == "orkg-ask"
        assert second.text == "done"

    def test_exhaustion(self):
        provider = ScriptedProvider([ChatResponse(kind="text", text="a")])
        provider.complete(MODEL, request_of("x"), Credentials())
        with pytest.raises(ScriptExhaustedError):
            provider.complete(MODEL, request_of("x"), Credentials())

    def test_empty_script_rejected(self):
        with pytest.raises(ContractViolation):
            ScriptedProvider([])

    def test_fixture_file_tool_call_step(self):
        provider = ScriptedProvider.from_file(FIXTURES / "scripted_orkg_ask.json")
        response = provider.complete(MODEL, request_of("find work"), Credentials())
        assert response.kind == "tool_calls"
        (call,) = response.tool_calls
        assert call.tool_name == "orkg-ask"
        assert json.loads(call.arguments_json)["query"] == (
            "knowledge graphs question answering"
        )

    def test_usage_estimated_when_missing(self):
        provider = ScriptedProvider([ChatResponse(kind="text", text="12345678")])
        response = provider.complete(MODEL, request_of("abcd"), Credentials())
        assert response.usage.output_tokens == 2
        assert response.usage.input_tokens == estimate_tokens("sys" + "abcd")


class TestGatewayContract:
    def test_empty_messages_never_sent(self):
        calls = []

        class Spy:
            def complete(self, model_ref, request, credentials):
                calls.append(request)
                return ChatResponse(kind="text", text="x")

        gateway = Gateway({"openai": Spy()})
        with pytest.raises(ContractViolation):
            gateway.complete(MODEL, ChatRequest(messages=()))
        assert calls == []

    def test_first_message_must_be_system(self):
        gateway = Gateway({"openai": ScriptedProvider([ChatResponse(kind="text", text="x")])})
        bad = ChatRequest(messages=(ChatMessage(role="user", text="hi"),))
        with pytest.raises(ContractViolation):
            gateway.complete(MODEL, bad)

    def test_parse_model_ref(self):
        ref = parse_model_ref("openai/gpt-4o-mini")
        assert ref == MODEL
        with pytest.raises(ContractViolation):
            parse_model_ref("missing-slash")


class _FakeOpenAI(BaseHTTPRequestHandler):
    behavior = "text"

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        if self.behavior == "reject":
            self.send_response(401)
            self.end_headers()
            return
        if self.behavior == "tool_call":
            message = {
                "tool_calls": [
                    {
                        "id": "call-9",
                        "type": "function",
                        "function": {"name": "crossref", "arguments": '{"doi": "10.1/x"}'},
                    }
                ]
            }
        else:
            message = {"content": f"echo:{body['messages'][-1]['content']}"}
        payload = {
            "choices": [{"message": message}],
            "usage": {"prompt_tokens": 7, "completion_tokens": 3},
        }
        raw = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture
def fake_server():
    server = HTTPServer(("127.0.0.1", 0), _FakeOpenAI)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()


class TestHttpChatProvider:
    def test_text_response_mapped(self, fake_server):
        _FakeOpenAI.behavior = "text"
        provider = HttpChatProvider(f"http://127.0.0.1:{fake_server.server_port}")
        gateway = Gateway({"openai": provider})
        response = gateway.complete(MODEL, request_of("ping"))
        assert response.kind == "text" and response.text == "echo:ping"
        assert response.usage.input_tokens == 7 and response.usage.output_tokens == 3

    def test_tool_call_preserved_with_provider_id(self, fake_server):
        _FakeOpenAI.behavior = "tool_call"
        provider = HttpChatProvider(f"http://127.0.0.1:{fake_server.server_port}")
        request = ChatRequest(
            messages=(ChatMessage(role="system", text="s"), ChatMessage(role="user", text="u")),
            tool_descriptors=(
                ToolSummary(name="crossref", description="d", input_schema={"type": "object"}),
            ),
        )
        response = provider.complete(MODEL, request, Credentials())
        assert response.kind == "tool_calls"
        assert response.tool_calls[0].id == "call-9"
        assert response.tool_calls[0].tool_name == "crossref"

    def test_auth_rejection(self, fake_server):
        _FakeOpenAI.behavior = "reject"
        provider = HttpChatProvider(f"http://127.0.0.1:{fake_server.server_port}")
        with pytest.raises(ProviderRejectedError):
            provider.complete(MODEL, request_of("x"), Credentials())

    def test_unreachable(self):
        provider = HttpChatProvider("http://127.0.0.1:1", timeout=0.2)
        with pytest.raises(ProviderUnreachableError):
            provider.complete(MODEL, request_of("x"), Credentials())
