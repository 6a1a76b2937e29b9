"""Shared domain types and their structural validation.

Everything here is an immutable value object with a canonical camelCase JSON
form; that serialization is both the service wire format and the file format
of exported assets. Semantic invariants are checked by :func:`validate_asset`
and returned as violation strings, never raised, so that invalid assets can be
represented and reported on.
"""

from __future__ import annotations

import json
import re
from datetime import datetime, timezone
from typing import Annotated, Any, Literal, Optional

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
)
from pydantic.alias_generators import to_camel

from .errors import MalformedDoiError

CURRENT_YEAR = datetime.now(timezone.utc).year

BUILTIN_ROLES = (
    "ideation-topics",
    "research-questions",
    "bibliography",
    "paper-title",
    "paper-related-work",
    "paper-body",
)

PAPER_ROLES = ("paper-title", "paper-related-work", "paper-body")

ROLE_PATTERN = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")

DOI_PATTERN = re.compile(r"^10\.\d{4,9}(?:\.\d+)*/\S+$", re.IGNORECASE)

_DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "doi.org/", "doi:")

AssetKind = Literal["text", "json", "bibliography"]

_registered_roles: set[str] = set(BUILTIN_ROLES)


def register_role(role: str) -> None:
    """Register an additional pipeline role beyond the built-in six."""
    if not ROLE_PATTERN.match(role):
        raise ValueError(f"role {role!r} must be lowercase hyphen-separated")
    _registered_roles.add(role)


def known_roles() -> frozenset[str]:
    return frozenset(_registered_roles)


def _utc_second(value: datetime) -> datetime:
    """Provenance timestamps are UTC at second precision."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


UtcTimestamp = Annotated[
    datetime,
    AfterValidator(_utc_second),
    PlainSerializer(
        lambda d: d.strftime("%Y-%m-%dT%H:%M:%SZ"), return_type=str, when_used="json"
    ),
]


def utc_now() -> datetime:
    return _utc_second(datetime.now(timezone.utc))


class WireModel(BaseModel):
    """Base for every serializable type: camelCase on the wire, snake_case in code."""

    model_config = ConfigDict(alias_generator=to_camel, populate_by_name=True)

    def to_wire(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True, exclude_none=True, mode="json")


class FrozenWireModel(WireModel):
    model_config = ConfigDict(
        alias_generator=to_camel, populate_by_name=True, frozen=True
    )


def canonical_json(value: Any) -> str:
    """Deterministic JSON: sorted keys, compact separators, UTF-8 text."""
    if isinstance(value, BaseModel):
        value = value.model_dump(by_alias=True, exclude_none=True, mode="json")
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def normalize_doi(raw: str) -> str:
    """Strip doi.org / doi: prefixes, lowercase, and validate the DOI shape."""
    if not raw or not raw.strip():
        raise MalformedDoiError("empty DOI")
    doi = raw.strip()
    lowered = doi.lower()
    for prefix in _DOI_PREFIXES:
        if lowered.startswith(prefix):
            doi = doi[len(prefix) :]
            lowered = doi.lower()
    doi = doi.strip().lower()
    if not DOI_PATTERN.match(doi):
        raise MalformedDoiError(f"not a DOI: {raw!r}")
    return doi


class ProvenanceRecord(FrozenWireModel):
    creator_kind: Literal["user", "assistant"]
    assistant_id: Optional[str] = None
    session_id: Optional[str] = None
    created_at: UtcTimestamp = Field(default_factory=utc_now)
    author_name: Optional[str] = None
    license: Optional[str] = None


class Author(FrozenWireModel):
    family: str
    given: str = ""


class BibliographyEntry(FrozenWireModel):
    title: str
    authors: tuple[Author, ...] = ()
    year: Optional[int] = None
    venue: Optional[str] = None
    doi: Optional[str] = None
    url: Optional[str] = None
    abstract: Optional[str] = None
    source_tool: str = ""


class Asset(FrozenWireModel):
    id: str
    name: str
    role: str
    kind: AssetKind
    content: str
    version: int = 1
    supersedes: Optional[str] = None
    provenance: ProvenanceRecord


class ToolCall(FrozenWireModel):
    id: str
    tool_name: str
    arguments_json: str


class ChatMessage(FrozenWireModel):
    role: Literal["system", "user", "assistant", "tool"]
    text: Optional[str] = None
    tool_calls: Optional[tuple[ToolCall, ...]] = None
    tool_call_id: Optional[str] = None
    tool_name: Optional[str] = None


def validate_entry(entry: BibliographyEntry) -> list[str]:
    """Invariant check for one bibliography entry; returns violation strings."""
    violations = []
    if not entry.title or not entry.title.strip():
        violations.append("entry title must be non-empty")
    if entry.doi is not None and not DOI_PATTERN.match(entry.doi):
        violations.append(f"entry doi {entry.doi!r} does not match 10.<registrant>/<suffix>")
    if entry.year is not None and not (1500 <= entry.year <= CURRENT_YEAR + 1):
        violations.append(
            f"entry year {entry.year} outside [1500, {CURRENT_YEAR + 1}]"
        )
    return violations


def _validate_content(kind: AssetKind, content: str) -> list[str]:
    if kind == "text":
        return []
    try:
        parsed = json.loads(content)
    except (json.JSONDecodeError, TypeError):
        label = "bibliography" if kind == "bibliography" else "json"
        return [f"{label} content must be well-formed JSON"]
    if kind == "bibliography":
        if not isinstance(parsed, list):
            return ["bibliography content must be a list"]
        violations = []
        for i, item in enumerate(parsed):
            try:
                entry = BibliographyEntry.model_validate(item)
            except Exception:
                violations.append(f"bibliography entry {i} is not a valid entry object")
                continue
            violations.extend(validate_entry(entry))
        return violations
    return []


def validate_asset(asset: Asset) -> list[str]:
    """Check every core invariant; an empty list means the asset is valid."""
    violations = []
    if not asset.id:
        violations.append("id must be non-empty")
    if not asset.name or not asset.name.strip():
        violations.append("name must be non-empty")
    if not ROLE_PATTERN.match(asset.role):
        violations.append(f"role {asset.role!r} must be lowercase hyphen-separated")
    if asset.version < 1:
        violations.append("version must be >= 1")
    if asset.version > 1 and asset.supersedes is None:
        violations.append("version > 1 requires supersedes")
    if asset.version == 1 and asset.supersedes is not None:
        violations.append("version 1 must not supersede anything")
    violations.extend(_validate_content(asset.kind, asset.content))
    prov = asset.provenance
    if prov.creator_kind == "assistant":
        if not prov.assistant_id:
            violations.append("assistant-created asset requires assistantId")
        if not prov.session_id:
            violations.append("assistant-created asset requires sessionId")
    elif prov.assistant_id is not None:
        violations.append("user-created asset must not carry assistantId")
    return violations


def parse_bibliography(content: str) -> list[BibliographyEntry]:
    """Decode the content payload of a bibliography-kind asset."""
    parsed = json.loads(content)
    if not isinstance(parsed, list):
        raise ValueError("bibliography content must be a list")
    return [BibliographyEntry.model_validate(item) for item in parsed]


def bibliography_content(entries: list[BibliographyEntry]) -> str:
    return canonical_json([e.to_wire() for e in entries])
