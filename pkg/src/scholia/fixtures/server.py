"""Hermetic test server impersonating the SPARQL endpoint and the entity API.

SPARQL requests are answered by matching the whitespace-normalized query
hash against the canned results generated from the triple file; unknown
queries get HTTP 400 with the normalized text echoed so drift between the
query builders and the canned set is immediately diagnosable. The MediaWiki
API side serves labels, search and extracts from the same dataset.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, List, Tuple
from urllib.parse import parse_qs, urlparse

from ..errors import ScholiaError
from ..model import EntityId, parse_entity_id
from ..sparql_client import RESULTS_MEDIA_TYPE, canonical_hash, normalize_sparql
from . import FixtureDataset
from .oracle import generate_canned_results


class BindError(ScholiaError):
    """The fixture server could not bind its address."""


@dataclass
class RequestRecord:
    method: str
    path: str
    detail: str = ""


class _SearchIndex:
    """Deterministic label search over the dataset's items."""

    def __init__(self, dataset: FixtureDataset, language: str = "en"):
        self.entries: List[Tuple[EntityId, str, str]] = []
        seen = set()
        for (entity_text, lang), label in sorted(dataset.labels.items()):
            if lang != language or not entity_text.startswith("Q") or entity_text in seen:
                continue
            seen.add(entity_text)
            entity = parse_entity_id(entity_text)
            description = dataset.descriptions.get((entity_text, language), "")
            self.entries.append((entity, label, description))

    def search(self, term: str, limit: int) -> List[Tuple[EntityId, str, str]]:
        needle = term.strip().lower()
        if not needle:
            return []
        scored = []
        for entity, label, description in self.entries:
            haystack = label.lower()
            position = haystack.find(needle)
            if position < 0 and needle in description.lower():
                position = 1000
            if position < 0:
                continue
            scored.append(((0 if position == 0 else 1, position, entity.number), entity, label, description))
        scored.sort(key=lambda row: row[0])
        return [(entity, label, description) for _k, entity, label, description in scored[:limit]]


class FixtureServer:
    """Runs both impersonated endpoints on one ephemeral port."""

    def __init__(self, dataset: FixtureDataset, host: str = "127.0.0.1", port: int = 0):
        self.dataset = dataset
        self.canned = generate_canned_results(dataset)
        self.search_index = _SearchIndex(dataset)
        self.request_log: List[RequestRecord] = []
        self.query_counts: Dict[str, int] = {}
        self._lock = threading.Lock()
        try:
            self._httpd = ThreadingHTTPServer((host, port), self._handler_class())
        except OSError as exc:
            raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
        self._httpd.daemon_threads = True
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> "FixtureServer":
        if not self._thread.is_alive():
            self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        self._thread.join(timeout=2)

    def __enter__(self) -> "FixtureServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def sparql_url(self) -> str:
        return f"http://127.0.0.1:{self.port}/sparql"

    @property
    def api_url(self) -> str:
        return f"http://127.0.0.1:{self.port}/w/api.php"

    def record(self, method: str, path: str, detail: str = "") -> None:
        with self._lock:
            self.request_log.append(RequestRecord(method, path, detail))

    def count_query(self, digest: str) -> None:
        with self._lock:
            self.query_counts[digest] = self.query_counts.get(digest, 0) + 1

    def reset_log(self) -> None:
        with self._lock:
            self.request_log.clear()
            self.query_counts.clear()

    # -- handler --------------------------------------------------------------

    def _handler_class(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output clean
                pass

            def _reply(self, status: int, payload: bytes, content_type: str) -> None:
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def _reply_json(self, status: int, document: dict) -> None:
                self._reply(status, json.dumps(document, ensure_ascii=False).encode("utf-8"),
                            "application/json; charset=utf-8")

            def do_GET(self) -> None:
                parsed = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                if parsed.path == "/sparql":
                    server.record("GET", parsed.path, "sparql")
                    self._answer_sparql(params.get("query", ""))
                elif parsed.path == "/w/api.php":
                    server.record("GET", parsed.path, params.get("action", ""))
                    self._answer_api(params)
                else:
                    server.record("GET", parsed.path)
                    self._reply(404, b"not found", "text/plain")

            def do_POST(self) -> None:
                parsed = urlparse(self.path)
                length = int(self.headers.get("Content-Length", "0"))
                body = self.rfile.read(length).decode("utf-8") if length else ""
                params = {k: v[0] for k, v in parse_qs(body).items()}
                if parsed.path == "/sparql":
                    server.record("POST", parsed.path, "sparql")
                    self._answer_sparql(params.get("query", ""))
                else:
                    server.record("POST", parsed.path, params.get("action", ""))
                    self._reply(404, b"not found", "text/plain")

            # -- SPARQL protocol ------------------------------------------------

            def _answer_sparql(self, query: str) -> None:
                normalized = normalize_sparql(query)
                digest = canonical_hash(query).hex()
                server.count_query(digest)
                entry = server.canned.get(digest)
                if entry is None:
                    self._reply(
                        400,
                        f"unknown query (no canned result):\n{normalized}\n".encode("utf-8"),
                        "text/plain; charset=utf-8",
                    )
                    return
                self._reply(
                    200,
                    json.dumps(entry["result"], ensure_ascii=False).encode("utf-8"),
                    RESULTS_MEDIA_TYPE,
                )

            # -- MediaWiki API ---------------------------------------------------

            def _answer_api(self, params: Dict[str, str]) -> None:
                action = params.get("action", "")
                if action == "wbgetentities":
                    self._wbgetentities(params)
                elif action == "wbsearchentities":
                    self._wbsearchentities(params)
                elif action == "query" and params.get("prop") == "extracts":
                    self._extracts(params)
                else:
                    self._reply_json(
                        200,
                        {"error": {"code": "unknown_action", "info": f"unsupported: {action!r}"}},
                    )

            def _wbgetentities(self, params: Dict[str, str]) -> None:
                ids = [i for i in params.get("ids", "").split("|") if i]
                if not ids or len(ids) > 50:
                    self._reply_json(
                        200,
                        {"error": {"code": "param-ids", "info": "between 1 and 50 ids required"}},
                    )
                    return
                entities = {}
                for id_text in ids:
                    try:
                        entity = parse_entity_id(id_text)
                    except ScholiaError:
                        self._reply_json(
                            200,
                            {"error": {"code": "no-such-entity", "info": f"bad id {id_text!r}"}},
                        )
                        return
                    document = server.dataset.entity_document(entity)
                    entities[id_text] = document if document else {"id": id_text, "missing": ""}
                self._reply_json(200, {"entities": entities, "success": 1})

            def _wbsearchentities(self, params: Dict[str, str]) -> None:
                term = params.get("search", "")
                try:
                    limit = max(1, min(int(params.get("limit", "10")), 50))
                except ValueError:
                    limit = 10
                hits = [
                    {"id": entity.text, "label": label, "description": description}
                    for entity, label, description in server.search_index.search(term, limit)
                ]
                self._reply_json(200, {"search": hits, "success": 1})

            def _extracts(self, params: Dict[str, str]) -> None:
                title = params.get("titles", "")
                pages = {}
                page_id = 1
                for (entity_text, _site), (link_title, extract) in sorted(
                    server.dataset.sitelinks.items()
                ):
                    if link_title == title:
                        pages[str(page_id)] = {
                            "pageid": page_id,
                            "title": link_title,
                            "extract": extract,
                        }
                        page_id += 1
                if not pages:
                    pages["-1"] = {"title": title, "missing": ""}
                self._reply_json(200, {"query": {"pages": pages}})

        return Handler


def serve(dataset: FixtureDataset, bind: str = "127.0.0.1:0") -> FixtureServer:
    """Start a fixture server on the given host:port (port 0 = ephemeral)."""
    host, _, port_text = bind.partition(":")
    try:
        port = int(port_text or "0")
    except ValueError as exc:
        raise BindError(f"bad bind address {bind!r}") from exc
    return FixtureServer(dataset, host=host or "127.0.0.1", port=port).start()
