"""HTTP transport seam for the scholarly-service clients.

Clients talk to a :class:`Transport`; tests and fixtures-mode deployments use
:class:`FixtureTransport`, which replays recorded exchanges committed to the
repo, while live deployments use :class:`RequestsTransport`. Exchanges are
keyed by method + URL + sorted query params.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path
from typing import NamedTuple, Optional, Protocol
from urllib.parse import urlencode

import requests

from ..errors import UpstreamUnavailableError
from ..model import canonical_json

DEFAULT_TIMEOUT = 15.0


class HttpResponse(NamedTuple):
    status: int
    content_type: str
    body: bytes

    def json(self):
        return json.loads(self.body.decode("utf-8"))


def request_key(method: str, url: str, params: Optional[dict] = None) -> str:
    key = f"{method.upper()} {url}"
    if params:
        key += "?" + urlencode(sorted((k, str(v)) for k, v in params.items()))
    return key


class Transport(Protocol):
    def get(
        self,
        url: str,
        params: Optional[dict] = None,
        headers: Optional[dict] = None,
        timeout: float = DEFAULT_TIMEOUT,
        max_bytes: Optional[int] = None,
    ) -> HttpResponse: ...


class RequestsTransport:
    """Live HTTP with a per-call timeout and no automatic retries."""

    def __init__(self):
        self._session = requests.Session()

    def get(self, url, params=None, headers=None, timeout=DEFAULT_TIMEOUT, max_bytes=None):
        try:
            response = self._session.get(
                url, params=params, headers=headers, timeout=timeout, stream=True
            )
            if max_bytes is None:
                body = response.content
            else:
                # read one byte past the cap so callers can detect overflow
                body = b""
                for chunk in response.iter_content(chunk_size=65536):
                    body += chunk
                    if len(body) > max_bytes:
                        break
            content_type = response.headers.get("Content-Type", "")
            response.close()
        except requests.RequestException as exc:
            raise UpstreamUnavailableError(str(exc)) from exc
        return HttpResponse(status=response.status_code, content_type=content_type, body=body)


class FixtureTransport:
    """Replays exchanges recorded as one JSON file each in a fixtures directory.

    File shape: {"request": {"method", "url", "params"},
                 "response": {"status", "contentType", one of bodyJson/bodyText/bodyBase64}}
    """

    def __init__(self, fixtures_dir: Path | str):
        self._exchanges: dict[str, HttpResponse] = {}
        directory = Path(fixtures_dir)
        for path in sorted(directory.glob("*.json")):
            record = json.loads(path.read_text("utf-8"))
            request = record["request"]
            key = request_key(
                request.get("method", "GET"), request["url"], request.get("params")
            )
            self._exchanges[key] = _response_from_record(record["response"])

    def __len__(self) -> int:
        return len(self._exchanges)

    def get(self, url, params=None, headers=None, timeout=DEFAULT_TIMEOUT, max_bytes=None):
        key = request_key("GET", url, params)
        try:
            return self._exchanges[key]
        except KeyError:
            raise UpstreamUnavailableError(f"no recorded exchange for {key!r}") from None


def _response_from_record(record: dict) -> HttpResponse:
    if "bodyJson" in record:
        body = canonical_json(record["bodyJson"]).encode("utf-8")
        default_type = "application/json"
    elif "bodyBase64" in record:
        body = base64.b64decode(record["bodyBase64"])
        default_type = "application/octet-stream"
    else:
        body = record.get("bodyText", "").encode("utf-8")
        default_type = "text/plain"
    return HttpResponse(
        status=int(record.get("status", 200)),
        content_type=record.get("contentType", default_type),
        body=body,
    )
