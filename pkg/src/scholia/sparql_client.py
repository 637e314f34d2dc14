"""HTTP client for SPARQL 1.1 protocol endpoints.

Executes SELECT queries against a configurable endpoint, parses the SPARQL
JSON results format into ResultSet, and layers an LRU+TTL response cache,
timeouts and bounded retry on top. The client is shareable across threads;
cache access is internally synchronized.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import requests

from .errors import ScholiaError
from .model import ResultSet, Term

log = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://query.wikidata.org/sparql"
DEFAULT_USER_AGENT = "scholia/0.1 (scholarly profile explorer; mailto:scholia-ops@example.org)"
RESULTS_MEDIA_TYPE = "application/sparql-results+json"

# Above this many bytes the query is sent as a POST form instead of a GET
# query parameter, mirroring public endpoint practice.
GET_SIZE_LIMIT = 2000

RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})

ENDPOINT_ENV = "SCHOLIA_ENDPOINT"
CACHE_TTL_ENV = "SCHOLIA_CACHE_TTL"


class TransportError(ScholiaError):
    """The endpoint could not be reached at the network level."""


class EndpointError(ScholiaError):
    """The endpoint answered with an HTTP error after retries were spent."""

    def __init__(self, status: int, body: str):
        super().__init__(f"endpoint returned HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class ParseError(ScholiaError):
    """The response is not a well-formed SPARQL JSON results document."""


_WS_RUN = re.compile(r"\s+")


def normalize_sparql(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim."""
    return _WS_RUN.sub(" ", text).strip()


def canonical_hash(text: str) -> bytes:
    """32-byte digest of the whitespace-normalized query text."""
    return hashlib.sha256(normalize_sparql(text).encode("utf-8")).digest()


@dataclass(frozen=True)
class QueryText:
    """A SPARQL query string plus its whitespace-insensitive digest."""

    text: str

    @property
    def canonical_hash(self) -> bytes:
        return canonical_hash(self.text)

    @property
    def normalized(self) -> str:
        return normalize_sparql(self.text)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str = DEFAULT_ENDPOINT
    timeout: float = 30.0
    max_retries: int = 2
    user_agent: str = DEFAULT_USER_AGENT
    cache_ttl: float = 300.0  # seconds; 0 disables caching
    cache_capacity: int = 1024
    retry_backoff: float = 0.25  # base delay, doubled per attempt

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ScholiaError(f"timeout must be > 0, got {self.timeout}")
        if self.cache_ttl < 0:
            raise ScholiaError(f"cache_ttl must be >= 0, got {self.cache_ttl}")

    @classmethod
    def from_env(cls, **overrides) -> "EndpointConfig":
        """Build a config honoring SCHOLIA_ENDPOINT / SCHOLIA_CACHE_TTL."""
        values = dict(overrides)
        if ENDPOINT_ENV in os.environ and "base_url" not in values:
            values["base_url"] = os.environ[ENDPOINT_ENV]
        if CACHE_TTL_ENV in os.environ and "cache_ttl" not in values:
            values["cache_ttl"] = float(os.environ[CACHE_TTL_ENV])
        return cls(**values)


def parse_results(body: bytes) -> ResultSet:
    """Parse a SPARQL 1.1 JSON results document.

    Never raises anything but ParseError for arbitrary input bytes; the error
    message carries the JSON path of the offending element.
    """
    try:
        document = json.loads(body)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ParseError(f"top level must be an object, got {type(document).__name__}")

    head = document.get("head")
    if not isinstance(head, dict) or not isinstance(head.get("vars"), list):
        raise ParseError("missing head.vars list")
    variables = []
    for i, name in enumerate(head["vars"]):
        if not isinstance(name, str):
            raise ParseError(f"head.vars[{i}] is not a string")
        variables.append(name)

    results = document.get("results")
    if not isinstance(results, dict) or not isinstance(results.get("bindings"), list):
        raise ParseError("missing results.bindings list")

    declared = set(variables)
    rows = []
    for i, binding in enumerate(results["bindings"]):
        if not isinstance(binding, dict):
            raise ParseError(f"results.bindings[{i}] is not an object")
        row = {}
        for name, value in binding.items():
            if name not in declared:
                raise ParseError(f"results.bindings[{i}] binds {name!r} not present in head.vars")
            if not isinstance(value, dict):
                raise ParseError(f"results.bindings[{i}].{name} is not an object")
            kind = value.get("type")
            text = value.get("value")
            if not isinstance(kind, str) or not isinstance(text, str):
                raise ParseError(f"results.bindings[{i}].{name} lacks type/value strings")
            datatype = value.get("datatype")
            lang = value.get("xml:lang")
            if datatype is not None and not isinstance(datatype, str):
                raise ParseError(f"results.bindings[{i}].{name}.datatype is not a string")
            if lang is not None and not isinstance(lang, str):
                raise ParseError(f"results.bindings[{i}].{name}.xml:lang is not a string")
            row[name] = Term(kind=kind, value=text, datatype=datatype, lang=lang)
        rows.append(row)
    return ResultSet(variables=tuple(variables), rows=tuple(rows))


class _TtlLruCache:
    """Least-recently-used cache with per-entry expiry. Thread-safe."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._entries: "OrderedDict[bytes, Tuple[float, ResultSet]]" = OrderedDict()
        self._lock = threading.Lock()

    def get(self, key: bytes, now: float) -> Optional[ResultSet]:
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                return None
            expires_at, value = entry
            if now >= expires_at:
                del self._entries[key]
                return None
            self._entries.move_to_end(key)
            return value

    def put(self, key: bytes, value: ResultSet, expires_at: float) -> None:
        with self._lock:
            self._entries[key] = (expires_at, value)
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()


class SparqlClient:
    """Executes queries with caching and retry per EndpointConfig."""

    def __init__(self, config: Optional[EndpointConfig] = None):
        self.config = config or EndpointConfig.from_env()
        self._cache = _TtlLruCache(self.config.cache_capacity)
        self._session = requests.Session()
        self.network_calls = 0  # diagnostic counter, incremented per HTTP request cycle

    def execute(self, query: Union[QueryText, str]) -> ResultSet:
        result, _ = self.execute_detailed(query)
        return result

    def execute_detailed(self, query: Union[QueryText, str]) -> Tuple[ResultSet, bool]:
        """Run one query; returns (results, served_from_cache)."""
        if isinstance(query, str):
            query = QueryText(query)
        if not query.text.strip():
            raise ValueError("query must be non-empty")

        caching = self.config.cache_ttl > 0
        key = query.canonical_hash
        if caching:
            cached = self._cache.get(key, time.monotonic())
            if cached is not None:
                return cached, True

        body = self._request(query.text)
        result = parse_results(body)
        if caching:
            self._cache.put(key, result, time.monotonic() + self.config.cache_ttl)
        return result, False

    def clear_cache(self) -> None:
        self._cache.clear()

    # -- internals ---------------------------------------------------------

    def _request(self, text: str) -> bytes:
        headers = {
            "Accept": RESULTS_MEDIA_TYPE,
            "User-Agent": self.config.user_agent,
        }
        attempts = self.config.max_retries + 1
        last_error: Optional[ScholiaError] = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(self.config.retry_backoff * (2 ** (attempt - 1)))
            self.network_calls += 1
            try:
                if len(text.encode("utf-8")) < GET_SIZE_LIMIT:
                    response = self._session.get(
                        self.config.base_url,
                        params={"query": text},
                        headers=headers,
                        timeout=self.config.timeout,
                    )
                else:
                    response = self._session.post(
                        self.config.base_url,
                        data={"query": text},
                        headers=headers,
                        timeout=self.config.timeout,
                    )
            except requests.RequestException as exc:
                last_error = TransportError(f"cannot reach {self.config.base_url}: {exc}")
                continue
            if response.status_code == 200:
                return response.content
            last_error = EndpointError(response.status_code, response.text)
            if response.status_code not in RETRYABLE_STATUS:
                break
        assert last_error is not None
        raise last_error
