"""Client for the MediaWiki-style entity API.

Covers the three lookups the profile pages need: batched label fetch,
entity search for the front page box, and encyclopedia intro extracts for
page headers. Also exposes a raw entity fetch (claims included) used by the
bibliography pipeline. Stateless apart from the shared HTTP session.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import requests

from .errors import ScholiaError
from .model import EntityId
from .sparql_client import DEFAULT_USER_AGENT, TransportError

log = logging.getLogger(__name__)

DEFAULT_API_URL = "https://www.wikidata.org/w/api.php"
API_URL_ENV = "SCHOLIA_API_URL"

# wbgetentities batch ceiling on public installations
MAX_IDS_PER_REQUEST = 50


class ApiError(ScholiaError):
    """The API answered with an error payload."""

    def __init__(self, code: str, info: str):
        super().__init__(f"{code}: {info}")
        self.code = code
        self.info = info


@dataclass(frozen=True)
class ApiConfig:
    base_url: str = DEFAULT_API_URL
    timeout: float = 30.0
    user_agent: str = DEFAULT_USER_AGENT

    @classmethod
    def from_env(cls, **overrides) -> "ApiConfig":
        values = dict(overrides)
        if API_URL_ENV in os.environ and "base_url" not in values:
            values["base_url"] = os.environ[API_URL_ENV]
        return cls(**values)


@dataclass(frozen=True)
class SearchHit:
    entity: EntityId
    label: str
    description: str = ""


def _chunks(values: Sequence, size: int):
    for start in range(0, len(values), size):
        yield values[start : start + size]


class EntityApiClient:
    def __init__(self, config: Optional[ApiConfig] = None):
        self.config = config or ApiConfig.from_env()
        self._session = requests.Session()

    def _call(self, url: str, params: Dict[str, str]) -> dict:
        query = dict(params)
        query["format"] = "json"
        try:
            response = self._session.get(
                url,
                params=query,
                headers={"User-Agent": self.config.user_agent},
                timeout=self.config.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"cannot reach {url}: {exc}") from exc
        if response.status_code != 200:
            raise ApiError(f"http-{response.status_code}", response.text[:200])
        try:
            payload = response.json()
        except ValueError as exc:
            raise ApiError("invalid-json", str(exc)) from exc
        if isinstance(payload, dict) and "error" in payload:
            error = payload["error"]
            raise ApiError(error.get("code", "unknown"), error.get("info", ""))
        return payload

    def fetch_labels(self, ids: Sequence[EntityId], language: str = "en") -> Dict[EntityId, str]:
        """Labels for the given ids in one language, chunked at the API limit.

        Ids without a label in the requested language are simply absent from
        the result, never an error.
        """
        if not ids:
            raise ValueError("ids must be non-empty")
        labels: Dict[EntityId, str] = {}
        for chunk in _chunks(list(ids), MAX_IDS_PER_REQUEST):
            payload = self._call(
                self.config.base_url,
                {
                    "action": "wbgetentities",
                    "ids": "|".join(e.text for e in chunk),
                    "props": "labels",
                    "languages": language,
                },
            )
            for entity in chunk:
                data = payload.get("entities", {}).get(entity.text, {})
                value = data.get("labels", {}).get(language, {}).get("value")
                if value is not None:
                    labels[entity] = value
        return labels

    def fetch_entities(self, ids: Sequence[EntityId]) -> Dict[EntityId, dict]:
        """Full entity documents (claims, labels, sitelinks) for the given ids.

        Missing entities are absent from the result map.
        """
        if not ids:
            raise ValueError("ids must be non-empty")
        entities: Dict[EntityId, dict] = {}
        for chunk in _chunks(list(ids), MAX_IDS_PER_REQUEST):
            payload = self._call(
                self.config.base_url,
                {
                    "action": "wbgetentities",
                    "ids": "|".join(e.text for e in chunk),
                    "props": "claims|labels|sitelinks",
                },
            )
            for entity in chunk:
                data = payload.get("entities", {}).get(entity.text)
                if data is not None and "missing" not in data:
                    entities[entity] = data
        return entities

    def search_entities(self, term: str, limit: int = 10) -> List[SearchHit]:
        """Front-page search: items matching a free-text term, API order."""
        if not term.strip():
            raise ValueError("search term must be non-empty")
        if limit < 1:
            raise ValueError("limit must be positive")
        payload = self._call(
            self.config.base_url,
            {
                "action": "wbsearchentities",
                "search": term,
                "language": "en",
                "type": "item",
                "limit": str(limit),
            },
        )
        hits = []
        for record in payload.get("search", [])[:limit]:
            try:
                entity = EntityId.parse(record.get("id", ""))
            except ScholiaError:
                continue
            hits.append(
                SearchHit(
                    entity=entity,
                    label=record.get("label", ""),
                    description=record.get("description", ""),
                )
            )
        return hits

    def fetch_extract(self, entity: EntityId, wiki: str = "enwiki") -> Optional[str]:
        """Plain-text intro extract for the item's article on the given wiki.

        Returns None when the item has no sitelink there. The extract is
        decorative, so failures of the second step also degrade to None.
        """
        if not entity.is_item:
            raise ValueError(f"extracts exist only for items, got {entity}")
        payload = self._call(
            self.config.base_url,
            {"action": "wbgetentities", "ids": entity.text, "props": "sitelinks"},
        )
        sitelinks = payload.get("entities", {}).get(entity.text, {}).get("sitelinks", {})
        link = sitelinks.get(wiki)
        if not link or "title" not in link:
            return None
        try:
            extract = self._call(
                self._extracts_url(wiki),
                {
                    "action": "query",
                    "prop": "extracts",
                    "exintro": "1",
                    "explaintext": "1",
                    "titles": link["title"],
                },
            )
            pages = extract.get("query", {}).get("pages", {})
            for page in pages.values():
                text = page.get("extract")
                if text:
                    return text
        except ScholiaError as exc:
            log.debug("extract fetch for %s failed: %s", entity, exc)
        return None

    def _extracts_url(self, wiki: str) -> str:
        """Endpoint serving article extracts for a wiki tag.

        When the entity API base has been overridden (tests, mirrors), the
        same server is assumed to impersonate the wiki as well; otherwise the
        host is derived from the tag ("enwiki" -> en.wikipedia.org).
        """
        if self.config.base_url != DEFAULT_API_URL:
            return self.config.base_url
        lang = wiki[:-4] if wiki.endswith("wiki") else wiki
        return f"https://{lang}.wikipedia.org/w/api.php"
