import jsonschema
import pytest

from scholia.fixtures.oracle import GraphIndex, panel_subjects
from scholia.model import Aspect
from scholia.queries import PANELS, PanelQuerySpec, build_panel_query
from scholia.service import PANEL_RESPONSE_SCHEMAS, create_app


def test_healthz(service_client):
    response = service_client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_aspect_page_renders_label_and_excerpt(service_client):
    response = service_client.get("/author/Q8219")
    assert response.status_code == 200
    assert "text/html" in response.headers["content-type"]
    assert "Uta Frith" in response.text
    assert "developmental psychologist" in response.text  # excerpt


def test_any_item_can_be_viewed_under_any_aspect(service_client):
    response = service_client.get("/topic/Q6365492")
    assert response.status_code == 200
    assert "Kanti V. Mardia" in response.text


def test_aspect_page_malformed_id(service_client):
    response = service_client.get("/author/FOO")
    assert response.status_code == 400
    assert response.headers["content-type"].startswith("application/problem+json")


def test_unknown_aspect_is_404(service_client):
    response = service_client.get("/frobnicate/Q1")
    assert response.status_code == 404


def test_bare_item_redirects_to_guessed_aspect(service_client):
    response = service_client.get("/Q8219", follow_redirects=False)
    assert response.status_code == 302
    assert response.headers["location"] == "/author/Q8219"


def test_bare_work_redirects_to_work_aspect(service_client):
    response = service_client.get("/Q18507561", follow_redirects=False)
    assert response.headers["location"] == "/work/Q18507561"


def test_bare_item_rejects_malformed(service_client):
    assert service_client.get("/Q0", follow_redirects=False).status_code == 400
    assert service_client.get("/P31", follow_redirects=False).status_code == 400


def test_external_redirect_chain_two_hops(service_client):
    first = service_client.get("/twitter/utafrith", follow_redirects=False)
    assert first.status_code == 302 and first.headers["location"] == "/Q8219"
    second = service_client.get(first.headers["location"], follow_redirects=False)
    assert second.status_code == 302 and second.headers["location"] == "/author/Q8219"
    third = service_client.get(second.headers["location"], follow_redirects=False)
    assert third.status_code == 200


def test_external_redirect_doi_with_slashes(service_client):
    response = service_client.get("/doi/10.1145/2629489", follow_redirects=False)
    assert response.status_code == 302
    assert response.headers["location"] == "/Q18507561"


def test_external_not_found(service_client):
    assert service_client.get("/doi/10.NOPE", follow_redirects=False).status_code == 404


def test_external_ambiguous_lists_candidates(service_client):
    response = service_client.get("/orcid/0000-0002-1825-0097", follow_redirects=False)
    assert response.status_code == 409
    assert response.json()["candidates"] == ["Q90000011", "Q90000012"]


def test_redirect_chains_terminate_for_all_fixture_items(service_client, dataset):
    """Every bare id reaches an aspect page in at most two hops."""
    for entity in dataset.known_entities():
        if not entity.is_item:
            continue
        response = service_client.get(f"/{entity.text}", follow_redirects=False)
        hops = 0
        while response.status_code == 302 and hops < 3:
            response = service_client.get(response.headers["location"], follow_redirects=False)
            hops += 1
        assert response.status_code == 200, entity
        assert hops <= 2, entity


def test_api_panel_role_series(service_client):
    response = service_client.get("/api/panel/author/works-per-year-by-role/Q20980928")
    assert response.status_code == 200
    data = response.json()
    assert data["kind"] == "year-role-series"
    assert [s["key"] for s in data["series"]] == ["first", "middle", "last", "solo", "unknown"]
    assert sum(sum(s["values"]) for s in data["series"]) == 8.0
    assert "wdt:P50" in data["generated_query"]


def test_api_panel_claims_supported_rows(service_client):
    response = service_client.get("/api/panel/work/claims-supported/Q22253877")
    rows = response.json()["rows"]
    assert len(rows) == 1
    row = rows[0]
    assert row["item"]["value"].endswith("/Q7669366")
    assert row["property"]["value"].endswith("/P681")
    assert row["value"]["value"].endswith("/Q14327652")


def test_api_panel_unknown(service_client):
    assert service_client.get("/api/panel/author/nope/Q1").status_code == 404
    assert service_client.get("/api/panel/frobnicate/works-raw/Q1").status_code == 404
    assert service_client.get("/api/panel/author/works-raw/zzz").status_code == 400


def test_api_panel_cache_flag(service_client):
    first = service_client.get("/api/panel/author/coauthors/Q8219").json()
    second = service_client.get("/api/panel/author/coauthors/Q8219").json()
    assert first["cache"] == "miss"
    assert second["cache"] == "hit"


def test_api_panel_degrades_to_502_for_uncanned_subject(service_client):
    # grammar-valid query, but the fixture has no canned entry for it
    response = service_client.get("/api/panel/author/works-raw/Q77777777")
    assert response.status_code == 502


def test_api_panels_catalog_includes_schemas(service_client):
    data = service_client.get("/api/panels").json()
    assert len(data["panels"]) == len(PANELS)
    for entry in data["panels"]:
        assert entry["schema"] == PANEL_RESPONSE_SCHEMAS[entry["kind"]]


def test_api_search(service_client):
    data = service_client.get("/api/search", params={"q": "Uta"}).json()
    assert data["results"][0] == {
        "id": "Q8219",
        "label": "Uta Frith",
        "description": "developmental psychologist",
    }
    assert service_client.get("/api/search").status_code == 400


def test_every_panel_response_validates_against_schema(service_client, dataset):
    """Run each panel for one designated subject and validate the payload."""
    subjects = panel_subjects(GraphIndex(dataset))
    for (aspect, panel), definition in sorted(
        PANELS.items(), key=lambda kv: (kv[0][0].value, kv[0][1])
    ):
        subject = subjects[aspect][0]
        response = service_client.get(f"/api/panel/{aspect.value}/{panel}/{subject.text}")
        assert response.status_code == 200, (aspect, panel, subject, response.text)
        jsonschema.validate(response.json(), PANEL_RESPONSE_SCHEMAS[definition.kind])


def test_generated_query_matches_builder(service_client):
    data = service_client.get("/api/panel/author/works-raw/Q20980928").json()
    from scholia.model import item

    spec = PanelQuerySpec(aspect=Aspect.AUTHOR, panel="works-raw", subject=item(20980928))
    assert data["generated_query"] == build_panel_query(spec).text
    assert data["endpoint_editor_url"].startswith("http://")


def test_service_is_read_only(service_client, fixture_server, dataset):
    """The fixture records every request; none may be a write."""
    fixture_server.reset_log()
    service_client.get("/Q8219", follow_redirects=True)
    service_client.get("/api/panel/author/works-raw/Q20980928")
    service_client.get("/api/search", params={"q": "Uta"})
    assert fixture_server.request_log, "requests must have been recorded"
    for record in fixture_server.request_log:
        assert record.method in ("GET", "POST")
        if record.method == "POST":
            assert record.path == "/sparql"
        assert record.detail in ("sparql", "wbgetentities", "wbsearchentities", "query", "")


def test_front_page_and_missing_ui(endpoint_config, api_config, tmp_path):
    from fastapi.testclient import TestClient

    app = create_app(
        sparql_config=endpoint_config, api_config=api_config, ui_dir=tmp_path / "absent"
    )
    client = TestClient(app)
    front = client.get("/")
    assert front.status_code == 200 and "search" in front.text.lower()
    assert client.get("/ui/main.js").status_code == 404


def test_problem_json_shape(service_client):
    payload = service_client.get("/frobnicate/Q1").json()
    assert payload["status"] == 404
    assert set(payload) >= {"type", "title", "status", "detail"}
