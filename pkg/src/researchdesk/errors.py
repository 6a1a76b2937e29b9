"""Exception hierarchy with stable machine-readable error codes.

Every error that can cross the service boundary carries a ``code`` that the
HTTP layer maps to exactly one status (see docs/errors.md). Codes are part of
the wire contract and must not change casually.
"""

from __future__ import annotations


class ResearchDeskError(Exception):
    """Base class; ``code`` identifies the error on the wire."""

    code = "internal-error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)


class ContractViolation(ResearchDeskError):
    """A caller broke a documented precondition."""

    code = "contract-violation"


# core-model
class MalformedDoiError(ResearchDeskError):
    code = "malformed-doi"


# assistant-registry
class RegistryParseError(ResearchDeskError):
    code = "parse-error"


class UnknownToolError(ResearchDeskError):
    code = "unknown-tool"


class DuplicateIdError(ResearchDeskError):
    code = "duplicate-id"


class UnknownAssistantError(ResearchDeskError):
    code = "unknown-assistant"


# llm-gateway
class ProviderUnreachableError(ResearchDeskError):
    code = "provider-unreachable"


class ProviderRejectedError(ResearchDeskError):
    code = "provider-rejected"


class MalformedResponseError(ResearchDeskError):
    code = "malformed-response"


class ScriptExhaustedError(ResearchDeskError):
    code = "script-exhausted"


# tool-library
class ToolNotAllowedError(ResearchDeskError):
    code = "tool-not-allowed"


class SchemaViolationError(ResearchDeskError):
    code = "schema-violation"


class ToolExecutionError(ResearchDeskError):
    """Base for downstream failures; dispatch wraps these as error results."""

    code = "tool-execution-failed"


class NotFoundError(ToolExecutionError):
    code = "not-found"


class UpstreamUnavailableError(ToolExecutionError):
    code = "upstream-unavailable"


class InvalidOrcidError(ResearchDeskError):
    code = "invalid-orcid"


class FetchFailedError(ToolExecutionError):
    code = "fetch-failed"


class UnsupportedContentError(ToolExecutionError):
    code = "unsupported-content"


class SizeExceededError(ToolExecutionError):
    code = "size-exceeded"


# orchestration-engine
class MissingRequiredAssetError(ResearchDeskError):
    code = "missing-required-asset"


class RoleNotProducedError(ResearchDeskError):
    code = "role-not-produced"


class SessionEndedError(ResearchDeskError):
    code = "session-ended"


class SessionBusyError(ResearchDeskError):
    code = "session-busy"


class UnknownSessionError(ResearchDeskError):
    code = "unknown-session"


class BudgetExceededError(ResearchDeskError):
    code = "budget-exceeded"


# asset-store
class ValidationFailedError(ResearchDeskError):
    code = "validation-failed"

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations) or "validation failed")


class StorageFailureError(ResearchDeskError):
    code = "storage-failure"


class UnknownAssetError(ResearchDeskError):
    code = "unknown-asset"


class UnknownProjectError(ResearchDeskError):
    code = "unknown-project"


# export-bundle
class UnknownLicenseError(ResearchDeskError):
    code = "unknown-license"


class NoPaperAssetsError(ResearchDeskError):
    code = "no-paper-assets"


# service-api
class UnauthenticatedError(ResearchDeskError):
    code = "unauthenticated"


class AssistantDisabledError(ResearchDeskError):
    code = "assistant-disabled"
