"""Clients for the external scholarly services behind the tool library.

Every client takes the transport seam plus a :class:`ToolSettings`, so the
same code runs against recorded fixtures or live endpoints. Responses are
mapped into :class:`BibliographyEntry` values; upstream status codes become
the module's error taxonomy (not-found, upstream-unavailable, ...).
"""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Optional

from ..errors import (
    ContractViolation,
    FetchFailedError,
    InvalidOrcidError,
    NotFoundError,
    SizeExceededError,
    UnsupportedContentError,
    UpstreamUnavailableError,
)
from ..model import (
    Author,
    BibliographyEntry,
    FrozenWireModel,
    normalize_doi,
)
from .transport import DEFAULT_TIMEOUT, HttpResponse, Transport

PAGE_SIZE = 10

MAX_DOWNLOAD_BYTES = 10 * 1024 * 1024

MAX_TEXT_CHARS = 100_000

ORCID_PATTERN = re.compile(r"^\d{4}-\d{4}-\d{4}-\d{3}[\dX]$")


@dataclass(frozen=True)
class ToolSettings:
    """Base URLs and credentials for the external services; all overridable."""

    crossref_base: str = "https://api.crossref.org"
    orcid_base: str = "https://pub.orcid.org/v3.0"
    unpaywall_base: str = "https://api.unpaywall.org/v2"
    unpaywall_email: str = ""
    ask_base: str = "https://api.ask.orkg.org"
    s2_base: str = "https://api.semanticscholar.org"
    timeout: float = DEFAULT_TIMEOUT
    extra: dict = field(default_factory=dict)


class SearchResults(FrozenWireModel):
    entries: tuple[BibliographyEntry, ...]
    page: int
    page_size: int = PAGE_SIZE
    has_more: bool = False


class OpenAccessInfo(FrozenWireModel):
    is_open_access: bool
    pdf_url: Optional[str] = None
    license: Optional[str] = None


class DocumentText(FrozenWireModel):
    text: str
    truncated: bool = False


def orcid_checksum_ok(orcid_id: str) -> bool:
    """ISO 7064 11,2 check over the 15 base digits; 'X' encodes 10."""
    digits = orcid_id.replace("-", "")
    total = 0
    for ch in digits[:-1]:
        total = (total + int(ch)) * 2
    remainder = total % 11
    expected = (12 - remainder) % 11
    check = 10 if digits[-1] == "X" else int(digits[-1])
    return check == expected


def validate_orcid(orcid_id: str) -> str:
    candidate = orcid_id.strip().upper()
    if not ORCID_PATTERN.match(candidate):
        raise InvalidOrcidError(f"{orcid_id!r} is not shaped like an ORCID iD")
    if not orcid_checksum_ok(candidate):
        raise InvalidOrcidError(f"{orcid_id!r} fails the ORCID checksum")
    return candidate


def _require_normalized_doi(doi: str) -> str:
    if normalize_doi(doi) != doi:
        raise ContractViolation(f"doi {doi!r} must be in normalized form")
    return doi


def split_person_name(name: str) -> Author:
    """Best-effort 'Given Family' split; single tokens become the family name."""
    parts = name.strip().split()
    if not parts:
        return Author(family="", given="")
    if len(parts) == 1:
        return Author(family=parts[0], given="")
    return Author(family=parts[-1], given=" ".join(parts[:-1]))


def _raise_for_status(response: HttpResponse, subject: str) -> None:
    if response.status == 404:
        raise NotFoundError(f"{subject} not found")
    if response.status >= 400:
        raise UpstreamUnavailableError(f"{subject}: upstream returned {response.status}")


def crossref_lookup(
    doi: str, transport: Transport, settings: ToolSettings
) -> BibliographyEntry:
    doi = _require_normalized_doi(doi)
    response = transport.get(
        f"{settings.crossref_base}/works/{doi}", timeout=settings.timeout
    )
    _raise_for_status(response, f"DOI {doi}")
    message = response.json().get("message", {})
    titles = message.get("title") or []
    authors = tuple(
        Author(family=a.get("family", ""), given=a.get("given", ""))
        for a in message.get("author", [])
        if a.get("family")
    )
    year = None
    date_parts = (message.get("issued") or {}).get("date-parts") or [[]]
    if date_parts[0]:
        year = date_parts[0][0]
    venues = message.get("container-title") or []
    return BibliographyEntry(
        title=titles[0] if titles else "",
        authors=authors,
        year=year,
        venue=venues[0] if venues else None,
        doi=doi,
        url=message.get("URL"),
        abstract=None,
        source_tool="crossref",
    )


def orcid_works(
    orcid_id: str, transport: Transport, settings: ToolSettings
) -> list[BibliographyEntry]:
    orcid_id = validate_orcid(orcid_id)
    response = transport.get(
        f"{settings.orcid_base}/{orcid_id}/works",
        headers={"Accept": "application/json"},
        timeout=settings.timeout,
    )
    _raise_for_status(response, f"ORCID iD {orcid_id}")
    entries = []
    for group in response.json().get("group", []):
        summaries = group.get("work-summary") or []
        if not summaries:
            continue
        summary = summaries[0]
        title = (((summary.get("title") or {}).get("title")) or {}).get("value", "")
        if not title.strip():
            continue  # entries lacking a title are dropped
        year_raw = ((summary.get("publication-date") or {}).get("year") or {}).get("value")
        doi = None
        for ext in ((summary.get("external-ids") or {}).get("external-id") or []):
            if ext.get("external-id-type") == "doi" and ext.get("external-id-value"):
                try:
                    doi = normalize_doi(ext["external-id-value"])
                except Exception:
                    doi = None
                break
        entries.append(
            BibliographyEntry(
                title=title,
                year=int(year_raw) if year_raw else None,
                venue=(summary.get("journal-title") or {}).get("value"),
                doi=doi,
                url=(summary.get("url") or {}).get("value"),
                source_tool="orcid",
            )
        )
    return entries


def unpaywall_lookup(
    doi: str, transport: Transport, settings: ToolSettings
) -> OpenAccessInfo:
    doi = _require_normalized_doi(doi)
    params = {"email": settings.unpaywall_email} if settings.unpaywall_email else None
    response = transport.get(
        f"{settings.unpaywall_base}/{doi}", params=params, timeout=settings.timeout
    )
    _raise_for_status(response, f"DOI {doi}")
    body = response.json()
    location = body.get("best_oa_location") or {}
    pdf_url = location.get("url_for_pdf")
    return OpenAccessInfo(
        is_open_access=bool(body.get("is_oa")),
        pdf_url=pdf_url,
        license=location.get("license"),
    )


def fetch_document(
    url: str, transport: Transport, settings: ToolSettings
) -> DocumentText:
    if not url.startswith(("http://", "https://")):
        raise ContractViolation(f"url must be absolute http(s), got {url!r}")
    response = transport.get(url, timeout=settings.timeout, max_bytes=MAX_DOWNLOAD_BYTES)
    if response.status >= 400:
        raise FetchFailedError(f"GET {url} returned {response.status}")
    if len(response.body) > MAX_DOWNLOAD_BYTES:
        raise SizeExceededError(f"document at {url} exceeds 10 MiB")
    content_type = response.content_type.split(";")[0].strip().lower()
    if content_type == "application/pdf" or response.body[:5] == b"%PDF-":
        text = extract_pdf_text(response.body)
        if not text.strip():
            raise UnsupportedContentError("PDF contains no extractable text")
    elif content_type in ("text/html", "application/xhtml+xml"):
        text = strip_html(response.body.decode("utf-8", errors="replace"))
    else:
        text = response.body.decode("utf-8", errors="replace")
    truncated = len(text) > MAX_TEXT_CHARS
    return DocumentText(text=text[:MAX_TEXT_CHARS], truncated=truncated)


def ask_search(
    query: str, page: int, transport: Transport, settings: ToolSettings
) -> SearchResults:
    if not query.strip():
        raise ContractViolation("query must be non-empty")
    offset = page * PAGE_SIZE
    response = transport.get(
        f"{settings.ask_base}/index/search",
        params={"query": query, "limit": PAGE_SIZE, "offset": offset},
        timeout=settings.timeout,
    )
    _raise_for_status(response, "search")
    payload = response.json().get("payload", {})
    items = payload.get("items", [])
    entries = []
    for item in items:
        title = (item.get("title") or "").strip()
        if not title:
            continue
        venue = item.get("journals") or item.get("venue")
        if isinstance(venue, list):
            venue = venue[0] if venue else None
        entries.append(
            BibliographyEntry(
                title=title,
                authors=tuple(split_person_name(a) for a in item.get("authors") or []),
                year=item.get("year"),
                venue=venue,
                doi=_safe_doi(item.get("doi")),
                url=item.get("link"),
                abstract=item.get("abstract"),
                source_tool="orkg-ask",
            )
        )
    total = payload.get("total_hits", offset + len(items))
    return SearchResults(
        entries=tuple(entries),
        page=page,
        has_more=offset + len(items) < total,
    )


def s2_search(
    query: str, page: int, transport: Transport, settings: ToolSettings
) -> SearchResults:
    if not query.strip():
        raise ContractViolation("query must be non-empty")
    offset = page * PAGE_SIZE
    response = transport.get(
        f"{settings.s2_base}/graph/v1/paper/search",
        params={
            "query": query,
            "limit": PAGE_SIZE,
            "offset": offset,
            "fields": "title,abstract,year,venue,externalIds,authors,url",
        },
        timeout=settings.timeout,
    )
    _raise_for_status(response, "search")
    body = response.json()
    entries = []
    for item in body.get("data", []):
        title = (item.get("title") or "").strip()
        if not title:
            continue
        entries.append(
            BibliographyEntry(
                title=title,
                authors=tuple(
                    split_person_name(a.get("name", "")) for a in item.get("authors") or []
                ),
                year=item.get("year"),
                venue=item.get("venue") or None,
                doi=_safe_doi((item.get("externalIds") or {}).get("DOI")),
                url=item.get("url"),
                abstract=item.get("abstract"),
                source_tool="semantic-scholar",
            )
        )
    total = body.get("total", offset + len(entries))
    has_more = "next" in body or offset + len(body.get("data", [])) < total
    return SearchResults(entries=tuple(entries), page=page, has_more=has_more)


def _safe_doi(raw) -> Optional[str]:
    if not raw:
        return None
    try:
        return normalize_doi(str(raw))
    except Exception:
        return None


class _TextExtractor(HTMLParser):
    _SKIP = {"script", "style", "noscript"}

    def __init__(self):
        super().__init__()
        self._chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1

    def handle_data(self, data):
        if not self._skip_depth and data.strip():
            self._chunks.append(data.strip())

    def text(self) -> str:
        return " ".join(self._chunks)


def strip_html(markup: str) -> str:
    parser = _TextExtractor()
    parser.feed(markup)
    return parser.text()


_PDF_STRING = rb"\(((?:[^()\\]|\\.)*)\)"
_PDF_SHOW_TEXT = re.compile(
    rb"\[((?:[^\[\]\\]|\\.)*)\]\s*TJ|" + _PDF_STRING + rb"\s*(?:Tj|'|\")"
)
_PDF_ESCAPES = {
    b"n": "\n", b"r": "\r", b"t": "\t", b"b": "\b", b"f": "\f",
    b"(": "(", b")": ")", b"\\": "\\",
}


def _decode_pdf_string(raw: bytes) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i : i + 1]
        if ch == b"\\" and i + 1 < len(raw):
            nxt = raw[i + 1 : i + 2]
            if nxt in b"01234567":
                j = i + 1
                digits = b""
                while j < min(len(raw), i + 4) and raw[j : j + 1] in b"01234567":
                    digits += raw[j : j + 1]
                    j += 1
                out.append(chr(int(digits, 8) % 256))
                i = j
                continue
            out.append(_PDF_ESCAPES.get(nxt, nxt.decode("latin-1")))
            i += 2
        else:
            out.append(ch.decode("latin-1"))
            i += 1
    return "".join(out)


def _decode_stream(raw: bytes) -> bytes:
    """Undo the common content-stream encodings: Flate, ASCII85, or both."""
    candidates = [raw]
    stripped = raw.strip()
    if stripped.endswith(b"~>"):
        try:
            import base64

            candidates.insert(0, base64.a85decode(stripped, adobe=True))
        except ValueError:
            pass
    for candidate in candidates:
        try:
            return zlib.decompress(candidate)
        except zlib.error:
            continue
    return candidates[0]


def extract_pdf_text(data: bytes) -> str:
    """Best-effort embedded-text extraction: Flate/ASCII85 streams, Tj/TJ ops.

    No OCR, no font decoding beyond Latin-1; good enough for digitally
    authored PDFs with standard encodings.
    """
    pieces: list[str] = []
    for match in re.finditer(rb"stream\r?\n(.*?)endstream", data, re.DOTALL):
        content = _decode_stream(match.group(1))
        for op in _PDF_SHOW_TEXT.finditer(content):
            if op.group(1) is not None:
                for inner in re.finditer(_PDF_STRING, op.group(1)):
                    pieces.append(_decode_pdf_string(inner.group(1)))
            else:
                pieces.append(_decode_pdf_string(op.group(2)))
    return " ".join(piece for piece in pieces if piece.strip())
