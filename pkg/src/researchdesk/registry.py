"""Assistant definitions: loading, validation, and pipeline wiring checks.

Assistants are declared in a YAML document (see docs/assistants.md); the
built-in seven ship inside the package. A loaded :class:`Registry` is
immutable; reloading swaps the whole object.
"""

from __future__ import annotations

import re
from importlib import resources
from typing import Collection, Iterable, Literal, Optional

import yaml

from .errors import (
    DuplicateIdError,
    RegistryParseError,
    UnknownAssistantError,
    UnknownToolError,
)
from .model import ROLE_PATTERN, Asset, FrozenWireModel, canonical_json

PLACEHOLDER_PATTERN = re.compile(r"\{\{\s*([a-z0-9-]+)\s*\}\}")

BUILTIN_ASSISTANT_IDS = (
    "ideation",
    "research-questions",
    "related-literature",
    "paper-title",
    "paper-related-work",
    "paper-proofreading",
    "review",
)

LifecyclePhase = Literal["ideation", "literature", "writing", "review", "publishing"]


class InputRole(FrozenWireModel):
    role: str
    required: bool = True


class AssistantSpec(FrozenWireModel):
    id: str
    name: str
    description: str = ""
    lifecycle_phase: LifecyclePhase = "ideation"
    system_prompt: str
    model_ref: str
    input_roles: tuple[InputRole, ...] = ()
    output_roles: tuple[str, ...] = ()
    tool_ids: tuple[str, ...] = ()
    enabled: bool = True
    temperature: float = 0.7

    def placeholders(self) -> list[str]:
        return PLACEHOLDER_PATTERN.findall(self.system_prompt)

    def required_roles(self) -> list[str]:
        return [r.role for r in self.input_roles if r.required]

    def input_role_names(self) -> list[str]:
        return [r.role for r in self.input_roles]


class Registry(FrozenWireModel):
    assistants: tuple[AssistantSpec, ...]

    def get(self, assistant_id: str) -> AssistantSpec:
        for spec in self.assistants:
            if spec.id == assistant_id:
                return spec
        raise UnknownAssistantError(f"no assistant {assistant_id!r}")

    def ids(self) -> list[str]:
        return [a.id for a in self.assistants]

    def serialize(self) -> str:
        return canonical_json(self)


class ResolvedInputs(FrozenWireModel):
    satisfied: dict[str, tuple[Asset, ...]]
    missing: tuple[str, ...]


class UnsatisfiedRole(FrozenWireModel):
    assistant_id: str
    role: str


class PipelineReport(FrozenWireModel):
    unsatisfiable: tuple[UnsatisfiedRole, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.unsatisfiable


def _parse_assistant(record: dict) -> AssistantSpec:
    if not isinstance(record, dict):
        raise RegistryParseError(f"assistant record must be a mapping, got {type(record).__name__}")
    try:
        inputs = tuple(
            InputRole(role=item["role"], required=bool(item.get("required", True)))
            for item in record.get("inputs") or []
        )
        spec = AssistantSpec(
            id=str(record["id"]),
            name=str(record["name"]),
            description=str(record.get("description", "")),
            lifecycle_phase=record.get("phase", "ideation"),
            system_prompt=str(record["prompt"]),
            model_ref=str(record["model"]),
            input_roles=inputs,
            output_roles=tuple(str(r) for r in record.get("outputs") or ()),
            tool_ids=tuple(str(t) for t in record.get("tools") or ()),
            enabled=bool(record.get("enabled", True)),
            temperature=float(record.get("temperature", 0.7)),
        )
    except KeyError as exc:
        raise RegistryParseError(f"assistant record missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise RegistryParseError(f"bad assistant record: {exc}") from exc
    except Exception as exc:  # pydantic validation
        raise RegistryParseError(f"bad assistant record: {exc}") from exc
    return spec


def _check_spec(spec: AssistantSpec, tool_ids: Collection[str]) -> None:
    if not spec.id.strip() or not spec.name.strip() or not spec.system_prompt.strip():
        raise RegistryParseError(f"assistant {spec.id!r}: id, name and prompt must be non-empty")
    for role in list(spec.input_role_names()) + list(spec.output_roles):
        if not ROLE_PATTERN.match(role):
            raise RegistryParseError(f"assistant {spec.id!r}: bad role identifier {role!r}")
    known_inputs = set(spec.input_role_names())
    for placeholder in spec.placeholders():
        if placeholder not in known_inputs:
            raise RegistryParseError(
                f"assistant {spec.id!r}: prompt placeholder {{{{{placeholder}}}}} "
                f"does not name an input role"
            )
    for tool_id in spec.tool_ids:
        if tool_id not in tool_ids:
            raise UnknownToolError(f"assistant {spec.id!r} declares unknown tool {tool_id!r}")


def load_registry(document: str, tool_ids: Collection[str]) -> Registry:
    """Parse a YAML assistant-definition document into a validated Registry."""
    try:
        data = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise RegistryParseError(f"not valid YAML: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("assistants"), list):
        raise RegistryParseError("document must contain an 'assistants' list")
    specs = [_parse_assistant(record) for record in data["assistants"]]
    seen: set[str] = set()
    for spec in specs:
        if spec.id in seen:
            raise DuplicateIdError(f"duplicate assistant id {spec.id!r}")
        seen.add(spec.id)
        _check_spec(spec, tool_ids)
    return Registry(assistants=tuple(specs))


def builtin_document() -> str:
    return (
        resources.files("researchdesk").joinpath("config/assistants.yaml").read_text("utf-8")
    )


def load_builtin_registry(tool_ids: Collection[str]) -> Registry:
    """Load the packaged registry and require the seven built-in assistants."""
    registry = load_registry(builtin_document(), tool_ids)
    present = set(registry.ids())
    missing = [a for a in BUILTIN_ASSISTANT_IDS if a not in present]
    if missing:
        raise RegistryParseError(f"built-in registry is missing assistants: {missing}")
    for builtin_id in BUILTIN_ASSISTANT_IDS:
        if not registry.get(builtin_id).output_roles:
            raise RegistryParseError(f"built-in assistant {builtin_id!r} must produce output")
    return registry


def resolve_inputs(
    registry: Registry, assistant_id: str, assets: Iterable[Asset]
) -> ResolvedInputs:
    """List candidate assets per input role (newest version first) and report
    required roles with no candidates."""
    spec = registry.get(assistant_id)
    by_role: dict[str, list[Asset]] = {r: [] for r in spec.input_role_names()}
    for asset in assets:
        if asset.role in by_role:
            by_role[asset.role].append(asset)
    satisfied = {
        role: tuple(sorted(candidates, key=lambda a: a.version, reverse=True))
        for role, candidates in by_role.items()
    }
    missing = tuple(r for r in spec.required_roles() if not satisfied.get(r))
    return ResolvedInputs(satisfied=satisfied, missing=missing)


def validate_pipeline(registry: Registry) -> PipelineReport:
    """Check, in sidebar order, that every required input role has an upstream
    producer. Roles without one are reported (a user can still supply them by
    creating the asset manually, so entries are warnings, not blocks)."""
    producible: set[str] = set()
    unsatisfiable: list[UnsatisfiedRole] = []
    for spec in registry.assistants:
        for role in spec.required_roles():
            if role not in producible:
                unsatisfiable.append(UnsatisfiedRole(assistant_id=spec.id, role=role))
        producible.update(spec.output_roles)
    return PipelineReport(unsatisfiable=tuple(unsatisfiable))
