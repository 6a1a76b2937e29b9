"""Environment-driven service configuration and component wiring.

Deployment knobs (all prefixed RESEARCHDESK_): listen address, data directory,
credentials file, daily token limit, provider selection (an OpenAI-compatible
HTTP endpoint or the scripted provider), fixtures mode, and the external tool
base URLs. Defaults give a fully self-contained fixtures-mode deployment.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .errors import ContractViolation
from .gateway import (
    DEFAULT_DAILY_LIMIT,
    ChatResponse,
    Gateway,
    HttpChatProvider,
    ScriptedProvider,
    UsageLedger,
)
from .registry import Registry, load_builtin_registry, load_registry
from .store import AssetStore
from .tools import (
    FixtureTransport,
    RequestsTransport,
    ToolLibrary,
    ToolSettings,
    build_library,
    builtin_fixtures_dir,
)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: Path = Path("data")
    credentials_file: Optional[Path] = Path("credentials.json")
    daily_token_limit: int = DEFAULT_DAILY_LIMIT
    fixtures_mode: bool = True
    fixtures_dir: Optional[Path] = None
    provider: str = "scripted"  # "scripted" or "http"
    provider_base_url: str = ""
    provider_api_key: str = ""
    script_path: Optional[Path] = None
    registry_file: Optional[Path] = None
    crossref_base: str = "https://api.crossref.org"
    orcid_base: str = "https://pub.orcid.org/v3.0"
    unpaywall_base: str = "https://api.unpaywall.org/v2"
    unpaywall_email: str = ""
    ask_base: str = "https://api.ask.orkg.org"
    s2_base: str = "https://api.semanticscholar.org"
    frontend_dir: Optional[Path] = None

    @classmethod
    def from_env(cls, env: Mapping[str, str] = os.environ) -> "ServiceConfig":
        def get(name, default):
            return env.get(f"RESEARCHDESK_{name}", default)

        fixtures_mode = get("FIXTURES_MODE", "1") not in ("0", "false", "no")
        config = cls(
            host=get("HOST", "127.0.0.1"),
            port=int(get("PORT", "8000")),
            data_dir=Path(get("DATA_DIR", "data")),
            credentials_file=Path(get("CREDENTIALS_FILE", "credentials.json")),
            daily_token_limit=int(get("DAILY_TOKEN_LIMIT", str(DEFAULT_DAILY_LIMIT))),
            fixtures_mode=fixtures_mode,
            fixtures_dir=Path(get("FIXTURES_DIR", "")) if get("FIXTURES_DIR", "") else None,
            provider=get("PROVIDER", "scripted" if fixtures_mode else "http"),
            provider_base_url=get("PROVIDER_BASE_URL", ""),
            provider_api_key=get("PROVIDER_KEY", ""),
            script_path=Path(get("SCRIPT_PATH", "")) if get("SCRIPT_PATH", "") else None,
            registry_file=Path(get("REGISTRY_FILE", "")) if get("REGISTRY_FILE", "") else None,
            crossref_base=get("CROSSREF_BASE", cls.crossref_base),
            orcid_base=get("ORCID_BASE", cls.orcid_base),
            unpaywall_base=get("UNPAYWALL_BASE", cls.unpaywall_base),
            unpaywall_email=get("UNPAYWALL_EMAIL", ""),
            ask_base=get("ASK_BASE", cls.ask_base),
            s2_base=get("S2_BASE", cls.s2_base),
            frontend_dir=Path(get("FRONTEND_DIR", "")) if get("FRONTEND_DIR", "") else None,
        )
        return config


def load_credentials(path: Optional[Path]) -> dict[str, str]:
    """Static bearer-token -> userId map; the auth seam for this artifact."""
    if path is None or not Path(path).exists():
        return {}
    data = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise ContractViolation("credentials file must map token strings to user ids")
    return data


def build_tool_settings(config: ServiceConfig) -> ToolSettings:
    return ToolSettings(
        crossref_base=config.crossref_base,
        orcid_base=config.orcid_base,
        unpaywall_base=config.unpaywall_base,
        unpaywall_email=config.unpaywall_email,
        ask_base=config.ask_base,
        s2_base=config.s2_base,
    )


def build_tool_library(config: ServiceConfig) -> ToolLibrary:
    settings = build_tool_settings(config)
    if config.fixtures_mode:
        transport = FixtureTransport(config.fixtures_dir or builtin_fixtures_dir())
    else:
        if not config.unpaywall_email:
            raise ContractViolation(
                "live mode requires RESEARCHDESK_UNPAYWALL_EMAIL (upstream convention)"
            )
        transport = RequestsTransport()
    return build_library(transport, settings)


def build_gateway(config: ServiceConfig) -> Gateway:
    if config.provider == "scripted":
        if config.script_path:
            provider = ScriptedProvider.from_file(config.script_path)
        else:
            provider = ScriptedProvider(
                [ChatResponse(kind="text", text="(scripted provider: script exhausted soon)")]
            )
        return Gateway({"openai": provider})
    if config.provider == "http":
        if not config.provider_base_url:
            raise ContractViolation("http provider requires RESEARCHDESK_PROVIDER_BASE_URL")
        return Gateway(
            {"openai": HttpChatProvider(config.provider_base_url, config.provider_api_key)}
        )
    raise ContractViolation(f"unknown provider kind {config.provider!r}")


def build_registry(config: ServiceConfig, library: ToolLibrary) -> Registry:
    if config.registry_file:
        return load_registry(config.registry_file.read_text("utf-8"), library.ids())
    return load_builtin_registry(library.ids())


@dataclass
class Components:
    registry: Registry
    library: ToolLibrary
    gateway: Gateway
    store: AssetStore
    ledger: UsageLedger
    credentials: dict[str, str] = field(default_factory=dict)


def build_components(config: ServiceConfig) -> Components:
    library = build_tool_library(config)
    return Components(
        registry=build_registry(config, library),
        library=library,
        gateway=build_gateway(config),
        store=AssetStore(config.data_dir),
        ledger=UsageLedger(daily_limit=config.daily_token_limit),
        credentials=load_credentials(config.credentials_file),
    )
