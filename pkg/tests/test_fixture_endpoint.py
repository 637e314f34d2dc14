import json
from pathlib import Path

import pytest
import requests

from scholia.fixtures import (
    FixtureDataset,
    FixtureError,
    default_dataset_dir,
    load_default_dataset,
)
from scholia.fixtures.oracle import (
    GraphIndex,
    generate_canned_results,
    referenced_entities_exist,
)
from scholia.fixtures.server import serve
from scholia.model import item, parse_entity_id
from scholia.queries import build_count_citations, build_count_scientific_articles

CANNED_PATH = (
    Path(__file__).resolve().parents[1]
    / "src" / "scholia" / "fixtures" / "canned" / "canned_queries.json"
)


def test_dataset_desk_scale(dataset):
    graph = GraphIndex(dataset)
    assert len(graph.works()) == 12
    assert len(graph.citation_edges()) == 31


def test_dataset_validation_caps(tmp_path):
    lines = ["# oversized"]
    for i in range(101):
        lines.append(f"Q{1000 + i}\tP31\tQ13442814")
    (tmp_path / "triples.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (tmp_path / "labels.tsv").write_text("", encoding="utf-8")
    with pytest.raises(FixtureError, match="desk-scale"):
        FixtureDataset.load(tmp_path)


def test_dataset_rejects_malformed_rows(tmp_path):
    (tmp_path / "triples.tsv").write_text("Q1\tP31\n", encoding="utf-8")
    with pytest.raises(FixtureError, match="triples.tsv:1"):
        FixtureDataset.load(tmp_path)


def test_part_of_closure_is_reflexive(dataset):
    graph = GraphIndex(dataset)
    # an organization with no parents closes over exactly itself
    assert graph.part_of_up_closure(item(90000020)) == {item(90000020)}
    # the section reaches the department and the university
    assert graph.part_of_up_closure(item(24283660)) == {
        item(24283660), item(90000021), item(90000020),
    }


def test_closure_terminates_on_cycles(tmp_path):
    (tmp_path / "triples.tsv").write_text(
        "Q1\tP361\tQ2\nQ2\tP361\tQ3\nQ3\tP361\tQ1\n", encoding="utf-8"
    )
    dataset = FixtureDataset.load(tmp_path)
    graph = GraphIndex(dataset)
    assert graph.part_of_up_closure(item(1)) == {item(1), item(2), item(3)}


def test_subclass_closure(dataset):
    graph = GraphIndex(dataset)
    assert graph.subclass_down_closure(item(90000060)) == {item(90000060), item(90000063)}


def test_canned_results_regenerate_deterministically(dataset):
    first = generate_canned_results(dataset)
    second = generate_canned_results(dataset)
    assert first == second


def test_canned_results_match_checked_in_file(dataset):
    """The CI drift check: regenerate from the triple file and diff."""
    regenerated = generate_canned_results(dataset)
    document = json.loads(CANNED_PATH.read_text(encoding="utf-8"))
    stored = {entry["hash"]: {"query": entry["query"], "result": entry["result"]}
              for entry in document["entries"]}
    assert stored == regenerated


def test_canned_results_reference_only_known_entities(dataset):
    canned = generate_canned_results(dataset)
    assert referenced_entities_exist(dataset, canned) == []


def test_default_dataset_dir_contains_documented_files():
    directory = default_dataset_dir()
    for name in ("triples.tsv", "labels.tsv", "descriptions.tsv", "sitelinks.tsv"):
        assert (directory / name).exists()


def test_server_answers_canned_query(fixture_server):
    response = requests.get(
        fixture_server.sparql_url,
        params={"query": build_count_scientific_articles().text},
        timeout=5,
    )
    assert response.status_code == 200
    assert response.json()["results"]["bindings"][0]["count"]["value"] == "12"


def test_server_unknown_query_echoes_normalized_text(fixture_server):
    response = requests.get(
        fixture_server.sparql_url,
        params={"query": "SELECT ?x  WHERE {\n ?x ?p   ?o . }"},
        timeout=5,
    )
    assert response.status_code == 400
    assert "SELECT ?x WHERE { ?x ?p ?o . }" in response.text


def test_server_counts_citations(fixture_server):
    response = requests.get(
        fixture_server.sparql_url,
        params={"query": build_count_citations().text},
        timeout=5,
    )
    assert response.json()["results"]["bindings"][0]["count"]["value"] == "31"


def test_server_wbgetentities_label(fixture_server):
    response = requests.get(
        fixture_server.api_url,
        params={"action": "wbgetentities", "ids": "Q8219", "format": "json"},
        timeout=5,
    )
    entity = response.json()["entities"]["Q8219"]
    assert entity["labels"]["en"]["value"] == "Uta Frith"


def test_server_rejects_oversized_batches(fixture_server):
    ids = "|".join(f"Q{i + 1}" for i in range(51))
    response = requests.get(
        fixture_server.api_url,
        params={"action": "wbgetentities", "ids": ids, "format": "json"},
        timeout=5,
    )
    assert "error" in response.json()


def test_serve_helper_and_bind(dataset):
    with serve(dataset, "127.0.0.1:0") as server:
        response = requests.get(
            server.sparql_url,
            params={"query": build_count_scientific_articles().text},
            timeout=5,
        )
        assert response.status_code == 200


def test_entity_document_claims_shape(dataset):
    document = dataset.entity_document(parse_entity_id("Q7669366"))
    claim = document["claims"]["P681"][0]
    assert claim["mainsnak"]["datavalue"]["value"]["id"] == "Q14327652"
    reference = claim["references"][0]["snaks"]["P248"][0]
    assert reference["datavalue"]["value"]["id"] == "Q22253877"


def test_load_default_dataset_round_trips():
    dataset = load_default_dataset()
    assert dataset.label(parse_entity_id("Q20980928")) == "Finn Årup Nielsen"
    assert dataset.sitelinks[("Q8219", "enwiki")][0] == "Uta Frith"
