"""Tool argument validation against draft-07 input schemas."""

from __future__ import annotations

import json
import re

from jsonschema import Draft7Validator

from ..errors import SchemaViolationError

_REQUIRED_MESSAGE = re.compile(r"^'(.+?)' is a required property$")


def parse_arguments(arguments_json: str) -> dict:
    """Decode a tool-call argument document; must be a JSON object."""
    try:
        parsed = json.loads(arguments_json)
    except (json.JSONDecodeError, TypeError) as exc:
        raise SchemaViolationError(f"arguments are not valid JSON: {exc}") from exc
    if not isinstance(parsed, dict):
        raise SchemaViolationError("arguments must be a JSON object")
    return parsed


def validate_arguments(schema: dict, arguments: dict) -> None:
    """Raise SchemaViolationError naming the failing property, if any."""
    validator = Draft7Validator(schema)
    errors = sorted(validator.iter_errors(arguments), key=lambda e: str(e.path))
    if not errors:
        return
    error = errors[0]
    if error.validator == "required":
        match = _REQUIRED_MESSAGE.match(error.message)
        prop = match.group(1) if match else "?"
        raise SchemaViolationError(f"missing required property '{prop}'")
    location = ".".join(str(p) for p in error.absolute_path) or "(arguments)"
    raise SchemaViolationError(f"property '{location}': {error.message}")
