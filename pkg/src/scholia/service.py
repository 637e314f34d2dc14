"""HTTP service: URL scheme, redirects, JSON panel API and UI hosting.

Routes
    GET /{aspect}/{Qid}        aspect page shell (title, excerpt, panels)
    GET /{Qid}                 302 to the guessed aspect
    GET /{doi|orcid|twitter|github}/{value}   302 to /{Qid}
    GET /api/panel/...         panel data as JSON, query included
    GET /api/search, /api/panels, /healthz
    /ui/                       static assets of the web client

Errors are application/problem+json. A failing endpoint degrades the single
panel being rendered, never the page.
"""

from __future__ import annotations

import html
import os
from pathlib import Path
from typing import Dict, List, Optional
from urllib.parse import quote, urlsplit

from fastapi import FastAPI
from fastapi.responses import HTMLResponse, JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from . import stats
from .entity_api import ApiConfig, EntityApiClient
from .errors import ScholiaError
from .model import Aspect, EntityId, MalformedId, PropertyRegistry, parse_entity_id
from .queries import (
    EXTERNAL_ID_KINDS,
    PanelQuerySpec,
    UnknownPanel,
    build_panel_query,
    get_panel,
    panel_catalog,
    panels_for,
)
from .resolver import (
    Ambiguous,
    NotFound,
    RuleTable,
    guess_aspect,
    load_rules_from_env,
    resolve_external,
)
from .sparql_client import EndpointConfig, EndpointError, SparqlClient, TransportError

BIND_ENV = "SCHOLIA_BIND"
DEFAULT_BIND = "127.0.0.1:8100"

# JSON schemas for panel responses, keyed by panel kind. Served in the
# catalog so clients can validate before rendering.
_TERM_SCHEMA = {
    "type": "object",
    "required": ["type", "value"],
    "properties": {
        "type": {"type": "string"},
        "value": {"type": "string"},
        "datatype": {"type": "string"},
        "xml:lang": {"type": "string"},
    },
}
_BASE_PROPERTIES = {
    "aspect": {"type": "string"},
    "panel": {"type": "string"},
    "subject": {"type": "string", "pattern": "^Q[1-9][0-9]*$"},
    "kind": {"type": "string"},
    "generated_query": {"type": "string"},
    "cache": {"enum": ["hit", "miss"]},
    "endpoint_editor_url": {"type": "string"},
}
_BASE_REQUIRED = ["aspect", "panel", "subject", "kind", "generated_query", "cache"]


def _schema(extra_properties: dict, extra_required: List[str]) -> dict:
    return {
        "type": "object",
        "required": _BASE_REQUIRED + extra_required,
        "properties": {**_BASE_PROPERTIES, **extra_properties},
    }


_ROWS_SCHEMA = {
    "columns": {"type": "array", "items": {"type": "string"}},
    "rows": {
        "type": "array",
        "items": {"type": "object", "additionalProperties": _TERM_SCHEMA},
    },
}
_SERIES_SCHEMA = {
    "years": {"type": "array", "items": {"type": "integer"}},
    "series": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["key", "values"],
            "properties": {
                "key": {"type": "string"},
                "label": {"type": "string"},
                "values": {"type": "array", "items": {"type": "number"}},
            },
        },
    },
}

PANEL_RESPONSE_SCHEMAS: Dict[str, dict] = {
    "table": _schema(_ROWS_SCHEMA, ["columns", "rows"]),
    "year-role-series": _schema(_SERIES_SCHEMA, ["years", "series"]),
    "year-author-series": _schema(
        {**_SERIES_SCHEMA, "missing_pages": {"type": "integer"}}, ["years", "series"]
    ),
    "year-series": _schema(_SERIES_SCHEMA, ["years", "series"]),
    "scatter": _schema(
        {
            "points": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["x", "y", "venue"],
                    "properties": {
                        "x": {"type": "number"},
                        "y": {"type": "number"},
                        "venue": {"type": "string"},
                        "label": {"type": "string"},
                    },
                },
            }
        },
        ["points"],
    ),
    "graph": _schema(
        {
            "edges": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["source", "target"],
                    "properties": {
                        "source": {"type": "object"},
                        "target": {"type": "object"},
                        "weight": {"type": "number"},
                    },
                },
            }
        },
        ["edges"],
    ),
}


def problem(status: int, title: str, detail: str = "", **extra) -> JSONResponse:
    payload = {"type": "about:blank", "title": title, "status": status, "detail": detail}
    payload.update(extra)
    return JSONResponse(status_code=status, content=payload, media_type="application/problem+json")


def _term_json(term) -> dict:
    return term.to_json()


def _row_json(row) -> dict:
    return {name: _term_json(term) for name, term in row.items()}


def _entity_text(term) -> str:
    entity = term.maybe_entity_id()
    return entity.text if entity else term.value


class ServiceState:
    """Shared clients and configuration behind the route handlers."""

    def __init__(
        self,
        sparql_config: Optional[EndpointConfig] = None,
        api_config: Optional[ApiConfig] = None,
        registry: Optional[PropertyRegistry] = None,
        rules: Optional[RuleTable] = None,
        language: str = "en",
    ):
        self.sparql = SparqlClient(sparql_config or EndpointConfig.from_env())
        self.api = EntityApiClient(api_config or ApiConfig.from_env())
        self.registry = registry or PropertyRegistry.defaults()
        self.rules = rules or load_rules_from_env()
        self.language = language

    def editor_url(self, query_text: str) -> str:
        parts = urlsplit(self.sparql.config.base_url)
        return f"{parts.scheme}://{parts.netloc}/#{quote(query_text)}"

    def label_of(self, entity: EntityId) -> str:
        try:
            labels = self.api.fetch_labels([entity], self.language)
            return labels.get(entity, entity.text)
        except ScholiaError:
            return entity.text

    def extract_of(self, entity: EntityId) -> Optional[str]:
        try:
            return self.api.fetch_extract(entity, "enwiki")
        except ScholiaError:
            return None


# ---------------------------------------------------------------------------
# Panel payload assembly
# ---------------------------------------------------------------------------


def _years_range(keys) -> List[int]:
    years = sorted({year for year, _k in keys})
    if not years:
        return []
    return list(range(years[0], years[-1] + 1))


def _panel_payload(state: ServiceState, aspect: Aspect, panel: str, subject: EntityId) -> dict:
    definition = get_panel(aspect, panel)
    spec = PanelQuerySpec(aspect=aspect, panel=panel, subject=subject, language=state.language)
    query = build_panel_query(spec, state.registry)
    results, from_cache = state.sparql.execute_detailed(query)

    payload = {
        "aspect": aspect.value,
        "panel": panel,
        "subject": subject.text,
        "kind": definition.kind,
        "generated_query": query.text,
        "cache": "hit" if from_cache else "miss",
        "endpoint_editor_url": state.editor_url(query.text),
    }

    if definition.kind == "year-role-series":
        records = stats.work_records_from_bindings(results)
        histogram = stats.papers_per_year_by_role(records, subject)
        years = _years_range(histogram.keys())
        payload["years"] = years
        payload["series"] = [
            {
                "key": role.value,
                "values": [float(histogram.get((year, role), 0)) for year in years],
            }
            for role in stats.ROLE_ORDER
        ]
    elif definition.kind == "year-author-series" and panel == "page-production-raw":
        associated_spec = PanelQuerySpec(
            aspect=aspect, panel="associated-authors", subject=subject, language=state.language
        )
        associated_results = state.sparql.execute(build_panel_query(associated_spec, state.registry))
        subject_authors = {
            term.entity_id() for term in associated_results.column("author")
        }
        labels = {
            row["author"].entity_id(): row["authorLabel"].value
            for row in associated_results
            if "author" in row and "authorLabel" in row
        }
        records = stats.work_records_from_bindings(results)
        production = stats.normalized_page_production(records, subject_authors)
        payload.update(_author_mass_series(production.production, labels))
        payload["missing_pages"] = production.missing_pages
    elif definition.kind == "year-author-series":
        rows = stats.citation_rows_from_bindings(results)
        mass = stats.coauthor_normalized_citations(rows)
        labels = {
            row["citedAuthor"].entity_id(): row["citedAuthorLabel"].value
            for row in results
            if "citedAuthor" in row
            and "citedAuthorLabel" in row
            and row["citedAuthor"].maybe_entity_id()
        }
        payload.update(_author_mass_series(mass, labels))
    elif definition.kind == "year-series":
        pairs = {
            row["year"].as_year(): row["count"].as_int() for row in results if "year" in row
        }
        years = _years_range([(year, None) for year in pairs])
        payload["years"] = years
        payload["series"] = [
            {"key": "citations", "values": [float(pairs.get(year, 0)) for year in years]}
        ]
    elif definition.kind == "scatter":
        points = stats.scatter_points_from_bindings(results)
        payload["points"] = [
            {"x": point.x, "y": point.y, "venue": point.venue.text, "label": point.label}
            for point in points
        ]
    elif definition.kind == "graph":
        payload["edges"] = _graph_edges(definition.columns, results, subject)
    else:
        payload["columns"] = list(definition.columns)
        payload["rows"] = [_row_json(row) for row in results]
    return payload


def _author_mass_series(mass: dict, labels: Dict[EntityId, str]) -> dict:
    years = _years_range(mass.keys())
    authors: Dict[str, dict] = {}
    for (year, author), value in mass.items():
        key = author.text if isinstance(author, EntityId) else str(author)
        bucket = authors.setdefault(
            key,
            {
                "key": key,
                "label": labels.get(author, key) if isinstance(author, EntityId) else key,
                "by_year": {},
            },
        )
        bucket["by_year"][year] = bucket["by_year"].get(year, 0.0) + value
    series = []
    for bucket in authors.values():
        series.append(
            {
                "key": bucket["key"],
                "label": bucket["label"],
                "values": [round(bucket["by_year"].get(year, 0.0), 9) for year in years],
            }
        )
    series.sort(key=lambda s: (-sum(s["values"]), s["key"]))
    return {"years": years, "series": series}


def _graph_edges(columns, results, subject: EntityId) -> List[dict]:
    edges = []
    for row in results:
        if "citingWork" in row and "citedWork" in row:
            source, target = row["citingWork"], row["citedWork"]
            source_label = row.get("citingWorkLabel")
            target_label = row.get("citedWorkLabel")
        elif "author1" in row and "author2" in row:
            source, target = row["author1"], row["author2"]
            source_label = row.get("author1Label")
            target_label = row.get("author2Label")
        elif "student" in row and "advisor" in row:
            source, target = row["student"], row["advisor"]
            source_label = row.get("studentLabel")
            target_label = row.get("advisorLabel")
        elif "coauthor" in row:
            source, target = None, row["coauthor"]
            source_label, target_label = None, row.get("coauthorLabel")
        else:
            continue
        edge = {
            "source": {
                "id": _entity_text(source) if source is not None else subject.text,
                "label": source_label.value if source_label else None,
            },
            "target": {
                "id": _entity_text(target),
                "label": target_label.value if target_label else None,
            },
        }
        if "count" in row:
            edge["weight"] = row["count"].as_int()
        edges.append(edge)
    return edges


# ---------------------------------------------------------------------------
# Page shell
# ---------------------------------------------------------------------------


def _page_shell(state: ServiceState, aspect: Aspect, subject: EntityId) -> str:
    label = state.label_of(subject)
    excerpt = state.extract_of(subject)
    aspect_links = " ".join(
        f'<a href="/{a.value}/{subject.text}"{" class=current" if a is aspect else ""}>{a.value}</a>'
        for a in Aspect
    )
    panel_names = ", ".join(d.name for d in panels_for(aspect))
    excerpt_html = f'<p class="excerpt">{html.escape(excerpt)}</p>' if excerpt else ""
    return f"""<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>{html.escape(label)} - {aspect.value}</title>
<link rel="stylesheet" href="/ui/style.css">
</head>
<body data-page="aspect" data-aspect="{aspect.value}" data-id="{subject.text}"
      data-label="{html.escape(label, quote=True)}">
<header>
<a class="home" href="/">Scholia</a>
<h1>{html.escape(label)} <span class="subject-id">{subject.text}</span></h1>
{excerpt_html}
<nav class="aspects">{aspect_links}</nav>
</header>
<main id="app"><noscript>Panels for this {aspect.value}: {html.escape(panel_names)}.
Enable JavaScript or use /api/panel/{aspect.value}/&lt;panel&gt;/{subject.text}.</noscript></main>
<script type="module" src="/ui/main.js"></script>
</body>
</html>"""


def _front_page() -> str:
    return """<!doctype html>
<html lang="en">
<head>
<meta charset="utf-8">
<meta name="viewport" content="width=device-width, initial-scale=1">
<title>Scholia</title>
<link rel="stylesheet" href="/ui/style.css">
</head>
<body data-page="home">
<header><a class="home" href="/">Scholia</a>
<h1>Scholarly profiles</h1>
<p class="excerpt">Search for a researcher, work, organization, venue or topic.</p>
</header>
<main id="app"><noscript>Use /api/search?q=&lt;term&gt; or open /&lt;Qid&gt; directly.</noscript></main>
<script type="module" src="/ui/main.js"></script>
</body>
</html>"""


# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------


def create_app(
    sparql_config: Optional[EndpointConfig] = None,
    api_config: Optional[ApiConfig] = None,
    registry: Optional[PropertyRegistry] = None,
    rules: Optional[RuleTable] = None,
    ui_dir: Optional[Path] = None,
) -> FastAPI:
    state = ServiceState(sparql_config, api_config, registry, rules)
    app = FastAPI(title="scholia", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.scholia = state

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/panels")
    def api_panels():
        catalog = panel_catalog()
        for entry in catalog:
            entry["schema"] = PANEL_RESPONSE_SCHEMAS[entry["kind"]]
        return {"panels": catalog}

    @app.get("/api/search")
    def api_search(q: str = "", limit: int = 10):
        if not q.strip():
            return problem(400, "empty query", "provide ?q=<term>")
        try:
            hits = state.api.search_entities(q, max(1, min(limit, 50)))
        except ScholiaError as exc:
            return problem(502, "search backend failure", str(exc))
        return {
            "query": q,
            "results": [
                {"id": hit.entity.text, "label": hit.label, "description": hit.description}
                for hit in hits
            ],
        }

    @app.get("/api/panel/{aspect_segment}/{panel}/{id_text}")
    def api_panel(aspect_segment: str, panel: str, id_text: str):
        try:
            aspect = Aspect.from_segment(aspect_segment)
        except KeyError:
            return problem(404, "unknown aspect", f"no aspect {aspect_segment!r}")
        try:
            subject = parse_entity_id(id_text)
        except MalformedId as exc:
            return problem(400, "malformed id", str(exc))
        try:
            return JSONResponse(_panel_payload(state, aspect, panel, subject))
        except UnknownPanel as exc:
            return problem(404, "unknown panel", str(exc))
        except (EndpointError, TransportError) as exc:
            return problem(502, "query endpoint failure", str(exc))

    ui_path = ui_dir if ui_dir is not None else _default_ui_dir()
    if ui_path is not None and ui_path.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")
    else:

        @app.get("/ui/{_path:path}")
        def ui_missing(_path: str):
            return problem(404, "UI not built", "build the frontend to serve /ui/")

    @app.get("/", response_class=HTMLResponse)
    def front_page():
        return HTMLResponse(_front_page())

    for kind in EXTERNAL_ID_KINDS:

        def make_handler(kind_name: str):
            def route_external(value: str):
                try:
                    entity = resolve_external(kind_name, value, state.sparql, state.registry)
                except NotFound as exc:
                    return problem(404, "identifier not found", str(exc))
                except Ambiguous as exc:
                    return problem(
                        409,
                        "ambiguous identifier",
                        str(exc),
                        candidates=[c.text for c in exc.candidates],
                    )
                except (EndpointError, TransportError) as exc:
                    return problem(502, "query endpoint failure", str(exc))
                return RedirectResponse(url=f"/{entity.text}", status_code=302)

            return route_external

        app.get(f"/{kind}/{{value:path}}")(make_handler(kind))

    @app.get("/{aspect_segment}/{id_text}", response_class=HTMLResponse)
    def route_aspect_page(aspect_segment: str, id_text: str):
        try:
            aspect = Aspect.from_segment(aspect_segment)
        except KeyError:
            return problem(404, "unknown aspect", f"no aspect {aspect_segment!r}")
        try:
            subject = parse_entity_id(id_text)
        except MalformedId as exc:
            return problem(400, "malformed id", str(exc))
        return HTMLResponse(_page_shell(state, aspect, subject))

    @app.get("/{id_text}")
    def route_bare_item(id_text: str):
        try:
            subject = parse_entity_id(id_text)
        except MalformedId as exc:
            return problem(400, "malformed id", str(exc))
        if not subject.is_item:
            return problem(400, "malformed id", "expected an item (Q) id")
        try:
            aspect = guess_aspect(subject, state.sparql, state.rules, state.registry)
        except (EndpointError, TransportError) as exc:
            return problem(502, "query endpoint failure", str(exc))
        return RedirectResponse(url=f"/{aspect.value}/{subject.text}", status_code=302)

    return app


def _default_ui_dir() -> Optional[Path]:
    """frontend/dist next to the repository root, when present."""
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if candidate.is_dir():
        return candidate
    candidate = Path.cwd() / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


def bind_address() -> tuple[str, int]:
    bind = os.environ.get(BIND_ENV, DEFAULT_BIND)
    host, _, port_text = bind.partition(":")
    return host or "127.0.0.1", int(port_text or "8100")


def run(bind: Optional[str] = None) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    if bind:
        host, _, port_text = bind.partition(":")
        address = (host or "127.0.0.1", int(port_text or "8100"))
    else:
        address = bind_address()
    uvicorn.run(create_app(), host=address[0], port=address[1], log_level="info")
