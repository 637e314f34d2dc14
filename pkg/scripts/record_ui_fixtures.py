#!/usr/bin/env python3
"""Record live JSON API payloads for the frontend test suite.

Drives the real service against the bundled fixture endpoint and snapshots
the responses the web client's tests replay, so the UI is tested against
exactly what the backend produces. Rerun after changing panels or data.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fastapi.testclient import TestClient

from scholia.entity_api import ApiConfig
from scholia.fixtures import load_default_dataset
from scholia.fixtures.server import FixtureServer
from scholia.service import create_app
from scholia.sparql_client import EndpointConfig

OUT_DIR = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"

CAPTURES = {
    "search_uta.json": "/api/search?q=Uta",
    "panels.json": "/api/panels",
    "author_works_per_year.json": "/api/panel/author/works-per-year-by-role/Q20980928",
    "author_coauthors.json": "/api/panel/author/coauthors/Q20980928",
    "author_works_raw.json": "/api/panel/author/works-raw/Q20980928",
    "publisher_scatter.json": "/api/panel/publisher/works-vs-citations-scatter/Q463494",
    "org_page_production.json": "/api/panel/organization/page-production-raw/Q24283660",
    "work_citation_graph.json": "/api/panel/work/citation-graph/Q21143764",
}


def main() -> int:
    dataset = load_default_dataset()
    with FixtureServer(dataset) as fixture:
        app = create_app(
            sparql_config=EndpointConfig(base_url=fixture.sparql_url),
            api_config=ApiConfig(base_url=fixture.api_url),
        )
        client = TestClient(app)
        OUT_DIR.mkdir(parents=True, exist_ok=True)
        for name, url in CAPTURES.items():
            response = client.get(url)
            response.raise_for_status()
            path = OUT_DIR / name
            path.write_text(
                json.dumps(response.json(), ensure_ascii=False, indent=1, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            print(f"recorded {url} -> {path.relative_to(Path.cwd())}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
