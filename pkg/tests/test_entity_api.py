import pytest

from scholia.model import item, parse_entity_id, prop


def test_fetch_labels_single(api_client):
    labels = api_client.fetch_labels([item(8219)])
    assert labels == {item(8219): "Uta Frith"}


def test_fetch_labels_missing_ids_are_absent(api_client):
    labels = api_client.fetch_labels([item(8219), item(999999999)])
    assert item(8219) in labels
    assert item(999999999) not in labels


def test_fetch_labels_unknown_language_is_absent(api_client):
    assert api_client.fetch_labels([item(8219)], language="xx") == {}


def test_fetch_labels_empty_input_rejected(api_client):
    with pytest.raises(ValueError):
        api_client.fetch_labels([])


def test_fetch_labels_chunks_at_fifty(api_client, fixture_server):
    ids = [item(8219)] + [item(90100000 + i) for i in range(119)]
    fixture_server.reset_log()
    labels = api_client.fetch_labels(ids)
    calls = [r for r in fixture_server.request_log if r.detail == "wbgetentities"]
    assert len(calls) == 3  # 50 + 50 + 20
    assert labels[item(8219)] == "Uta Frith"


def test_search_entities_finds_uta(api_client):
    hits = api_client.search_entities("Uta Frith")
    assert [(h.entity.text, h.label) for h in hits] == [("Q8219", "Uta Frith")]
    assert hits[0].description == "developmental psychologist"


def test_search_entities_prefix_ranks_first(api_client):
    hits = api_client.search_entities("Uta", limit=5)
    assert hits[0].entity == item(8219)


def test_search_entities_no_match(api_client):
    assert api_client.search_entities("zzzznomatch") == []


def test_search_entities_respects_limit(api_client):
    hits = api_client.search_entities("a", limit=3)
    assert len(hits) <= 3


def test_search_entities_blank_rejected(api_client):
    with pytest.raises(ValueError):
        api_client.search_entities("   ")


def test_fetch_extract_present(api_client):
    extract = api_client.fetch_extract(item(8219), "enwiki")
    assert extract is not None
    assert extract.startswith("Uta Frith is a developmental psychologist")


def test_fetch_extract_absent_without_sitelink(api_client):
    assert api_client.fetch_extract(item(20980928), "enwiki") is None
    assert api_client.fetch_extract(item(8219), "dewiki") is None


def test_fetch_extract_rejects_properties(api_client):
    with pytest.raises(ValueError):
        api_client.fetch_extract(prop(31))


def test_fetch_entities_returns_claims(api_client):
    wikidata_paper = parse_entity_id("Q18507561")
    documents = api_client.fetch_entities([wikidata_paper])
    claims = documents[wikidata_paper]["claims"]
    assert "P2093" in claims and "P577" in claims


def test_api_url_from_env(monkeypatch):
    from scholia.entity_api import ApiConfig

    monkeypatch.setenv("SCHOLIA_API_URL", "http://example.org/w/api.php")
    assert ApiConfig.from_env().base_url == "http://example.org/w/api.php"
