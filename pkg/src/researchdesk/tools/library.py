"""Tool descriptors and schema-validated dispatch.

A :class:`ToolLibrary` owns the descriptor table and one executor per tool.
``dispatch`` enforces, in order: the caller's allowed-tool set, tool
existence, argument-schema validity; only then does an executor run.
Contract refusals raise; downstream failures come back as error results so
the conversation loop can feed them to the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Union

from ..errors import (
    ResearchDeskError,
    ToolNotAllowedError,
    UnknownToolError,
)
from ..gateway import ToolSummary
from ..model import FrozenWireModel, normalize_doi
from . import clients
from .clients import ToolSettings
from .transport import Transport
from .validation import parse_arguments, validate_arguments


class ToolDescriptor(FrozenWireModel):
    id: str
    name: str
    description: str
    input_schema: dict
    output_mode: Literal["chat_text", "ui_component"] = "chat_text"
    ui_component_id: Optional[Literal["literature-search", "track-changes"]] = None

    def summary(self) -> ToolSummary:
        return ToolSummary(
            name=self.id, description=self.description, input_schema=self.input_schema
        )


class ToolResult(FrozenWireModel):
    tool_id: str
    status: Literal["ok", "error"]
    chat_text: Optional[str] = None
    structured: Optional[Union[dict, list]] = None
    error_message: Optional[str] = None
    ui_component_id: Optional[str] = None


@dataclass(frozen=True)
class ToolContext:
    allowed_tool_ids: frozenset[str]
    credentials: dict = field(default_factory=dict)


Executor = Callable[[dict, ToolContext], ToolResult]


@dataclass
class ToolLibrary:
    descriptors: dict[str, ToolDescriptor]
    executors: dict[str, Executor]

    def ids(self) -> tuple[str, ...]:
        return tuple(self.descriptors)

    def get(self, tool_id: str) -> ToolDescriptor:
        try:
            return self.descriptors[tool_id]
        except KeyError:
            raise UnknownToolError(f"no tool {tool_id!r}") from None

    def summaries(self, tool_ids) -> tuple[ToolSummary, ...]:
        return tuple(self.get(t).summary() for t in tool_ids)

    def dispatch(self, tool_id: str, arguments_json: str, context: ToolContext) -> ToolResult:
        if tool_id not in context.allowed_tool_ids:
            raise ToolNotAllowedError(
                f"tool {tool_id!r} is not available to this assistant"
            )
        descriptor = self.get(tool_id)
        arguments = parse_arguments(arguments_json)
        validate_arguments(descriptor.input_schema, arguments)
        try:
            result = self.executors[tool_id](arguments, context)
        except ResearchDeskError as exc:
            return ToolResult(
                tool_id=tool_id,
                status="error",
                error_message=f"{exc.code}: {exc}",
                ui_component_id=descriptor.ui_component_id,
            )
        if result.ui_component_id is None and descriptor.ui_component_id is not None:
            result = result.model_copy(
                update={"ui_component_id": descriptor.ui_component_id}
            )
        return result


def _format_entry(entry) -> str:
    authors = ", ".join(
        f"{a.given} {a.family}".strip() for a in entry.authors[:3]
    )
    bits = [entry.title]
    if authors:
        bits.append(authors + (" et al." if len(entry.authors) > 3 else ""))
    if entry.year:
        bits.append(str(entry.year))
    if entry.venue:
        bits.append(entry.venue)
    if entry.doi:
        bits.append(f"doi:{entry.doi}")
    return " — ".join(bits)


def _search_result(tool_id: str, results: clients.SearchResults) -> ToolResult:
    listing = "\n".join(f"- {_format_entry(e)}" for e in results.entries)
    summary = (
        f"{len(results.entries)} result(s) on page {results.page}"
        + (", more available" if results.has_more else "")
    )
    return ToolResult(
        tool_id=tool_id,
        status="ok",
        chat_text=f"{summary}\n{listing}" if listing else summary,
        structured={
            "entries": [e.to_wire() for e in results.entries],
            "page": results.page,
            "pageSize": results.page_size,
            "hasMore": results.has_more,
        },
    )


def build_library(transport: Transport, settings: ToolSettings) -> ToolLibrary:
    """Assemble the six built-in scholarly tools over the given transport."""

    def run_crossref(args: dict, ctx: ToolContext) -> ToolResult:
        doi = normalize_doi(args["doi"])
        entry = clients.crossref_lookup(doi, transport, settings)
        return ToolResult(
            tool_id="crossref",
            status="ok",
            chat_text=f"Bibliographic record: {_format_entry(entry)}",
            structured={"entry": entry.to_wire()},
        )

    def run_orcid(args: dict, ctx: ToolContext) -> ToolResult:
        entries = clients.orcid_works(args["orcidId"], transport, settings)
        listing = "\n".join(f"- {_format_entry(e)}" for e in entries)
        return ToolResult(
            tool_id="orcid",
            status="ok",
            chat_text=f"{len(entries)} public work(s):\n{listing}" if entries else "No public works.",
            structured={"entries": [e.to_wire() for e in entries]},
        )

    def run_unpaywall(args: dict, ctx: ToolContext) -> ToolResult:
        info = clients.unpaywall_lookup(normalize_doi(args["doi"]), transport, settings)
        if info.is_open_access and info.pdf_url:
            text = f"Open access; PDF at {info.pdf_url}"
        elif info.is_open_access:
            text = "Open access, but no direct PDF link was reported."
        else:
            text = "Not available open access."
        return ToolResult(
            tool_id="unpaywall", status="ok", chat_text=text, structured=info.to_wire()
        )

    def run_pdf_url(args: dict, ctx: ToolContext) -> ToolResult:
        document = clients.fetch_document(args["url"], transport, settings)
        note = " (truncated)" if document.truncated else ""
        return ToolResult(
            tool_id="pdf-url",
            status="ok",
            chat_text=f"Document text{note}:\n{document.text}",
            structured=document.to_wire(),
        )

    def run_ask(args: dict, ctx: ToolContext) -> ToolResult:
        results = clients.ask_search(args["query"], args.get("page", 0), transport, settings)
        return _search_result("orkg-ask", results)

    def run_s2(args: dict, ctx: ToolContext) -> ToolResult:
        results = clients.s2_search(args["query"], args.get("page", 0), transport, settings)
        return _search_result("semantic-scholar", results)

    doi_property = {
        "type": "string",
        "description": "The DOI, with or without a doi.org prefix, e.g. 10.3233/ds-210053",
    }
    search_properties = {
        "query": {
            "type": "string",
            "minLength": 1,
            "description": "Search query; phrase it as a topic or question",
        },
        "page": {
            "type": "integer",
            "minimum": 0,
            "description": "Zero-based result page; each page holds 10 entries",
        },
    }

    descriptors = [
        ToolDescriptor(
            id="crossref",
            name="Article metadata lookup",
            description=(
                "Fetch the bibliographic record (title, authors, year, venue) for a "
                "known DOI. Call this whenever the user mentions a specific DOI."
            ),
            input_schema={
                "type": "object",
                "properties": {"doi": doi_property},
                "required": ["doi"],
                "additionalProperties": False,
            },
        ),
        ToolDescriptor(
            id="orcid",
            name="Researcher works list",
            description=(
                "List the public works of a researcher identified by an ORCID iD "
                "(format 0000-0000-0000-0000). Call this when the user provides an "
                "ORCID iD or asks about a specific researcher's publications."
            ),
            input_schema={
                "type": "object",
                "properties": {
                    "orcidId": {
                        "type": "string",
                        "pattern": "^\\d{4}-\\d{4}-\\d{4}-\\d{3}[\\dX]$",
                        "description": "The 16-character ORCID iD with hyphens",
                    }
                },
                "required": ["orcidId"],
                "additionalProperties": False,
            },
        ),
        ToolDescriptor(
            id="pdf-url",
            name="Fetch document text",
            description=(
                "Download a document from an absolute http(s) URL and return its "
                "plain text (PDF and HTML are converted). Call this when the user "
                "shares a link whose content matters for the task."
            ),
            input_schema={
                "type": "object",
                "properties": {
                    "url": {"type": "string", "description": "Absolute http(s) URL"}
                },
                "required": ["url"],
                "additionalProperties": False,
            },
        ),
        ToolDescriptor(
            id="unpaywall",
            name="Open-access check",
            description=(
                "Check whether the article behind a DOI is legally readable open "
                "access and where its PDF lives. Call this before trying to fetch "
                "an article's text."
            ),
            input_schema={
                "type": "object",
                "properties": {"doi": doi_property},
                "required": ["doi"],
                "additionalProperties": False,
            },
        ),
        ToolDescriptor(
            id="orkg-ask",
            name="Scholarly question search",
            description=(
                "Semantic search over scholarly literature, tuned for research "
                "questions. Call this to find papers relevant to a research "
                "question; pass page to fetch further results."
            ),
            input_schema={
                "type": "object",
                "properties": dict(search_properties),
                "required": ["query"],
                "additionalProperties": False,
            },
            output_mode="ui_component",
            ui_component_id="literature-search",
        ),
        ToolDescriptor(
            id="semantic-scholar",
            name="Paper keyword search",
            description=(
                "Keyword search over a large scholarly index. Call this to find "
                "papers by topic keywords; pass page to fetch further results."
            ),
            input_schema={
                "type": "object",
                "properties": dict(search_properties),
                "required": ["query"],
                "additionalProperties": False,
            },
            output_mode="ui_component",
            ui_component_id="literature-search",
        ),
    ]
    executors = {
        "crossref": run_crossref,
        "orcid": run_orcid,
        "pdf-url": run_pdf_url,
        "unpaywall": run_unpaywall,
        "orkg-ask": run_ask,
        "semantic-scholar": run_s2,
    }
    return ToolLibrary(
        descriptors={d.id: d for d in descriptors}, executors=executors
    )
