import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholia.errors import ScholiaError
from scholia.queries import build_count_citations, build_count_scientific_articles
from scholia.sparql_client import (
    EndpointConfig,
    EndpointError,
    ParseError,
    QueryText,
    SparqlClient,
    TransportError,
    canonical_hash,
    normalize_sparql,
    parse_results,
)


def test_normalize_collapses_whitespace():
    assert normalize_sparql("  a\t\tb\n\nc ") == "a b c"


def test_canonical_hash_whitespace_invariant():
    query = build_count_scientific_articles().text
    assert canonical_hash(query) == canonical_hash("  " + query.replace("\n", "\n\t  "))
    assert len(canonical_hash(query)) == 32


@given(st.text(alphabet="ab?{}. \n\t", min_size=1))
def test_canonical_hash_normalized_form_stable(text):
    assert canonical_hash(text) == canonical_hash(normalize_sparql(text))


def test_parse_results_integer_count():
    body = json.dumps(
        {
            "head": {"vars": ["count"]},
            "results": {
                "bindings": [
                    {
                        "count": {
                            "type": "literal",
                            "datatype": "http://www.w3.org/2001/XMLSchema#integer",
                            "value": "615182",
                        }
                    }
                ]
            },
        }
    ).encode()
    results = parse_results(body)
    assert results.variables == ("count",)
    assert results.single_int() == 615182


def test_parse_results_empty_bindings():
    body = b'{"head": {"vars": ["x"]}, "results": {"bindings": []}}'
    assert len(parse_results(body)) == 0


def test_parse_results_rejects_undeclared_variable():
    body = b'{"head": {"vars": ["x"]}, "results": {"bindings": [{"y": {"type": "literal", "value": "1"}}]}}'
    with pytest.raises(ParseError, match="head.vars"):
        parse_results(body)


@pytest.mark.parametrize(
    "body",
    [
        b"",
        b"not json",
        b"[]",
        b"{}",
        b'{"head": {}}',
        b'{"head": {"vars": "x"}}',
        b'{"head": {"vars": [1]}}',
        b'{"head": {"vars": []}, "results": {}}',
        b'{"head": {"vars": ["x"]}, "results": {"bindings": [1]}}',
        b'{"head": {"vars": ["x"]}, "results": {"bindings": [{"x": "y"}]}}',
        b'{"head": {"vars": ["x"]}, "results": {"bindings": [{"x": {"type": 1, "value": "y"}}]}}',
        b'\xff\xfe\x00\x01',
    ],
)
def test_parse_results_malformed_documents(body):
    with pytest.raises(ParseError):
        parse_results(body)


@given(st.binary(max_size=400))
def test_parse_results_never_crashes_on_fuzz(body):
    try:
        parse_results(body)
    except ParseError:
        pass


_json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.text(max_size=8),
    lambda children: st.lists(children, max_size=3)
    | st.dictionaries(st.sampled_from(["head", "vars", "results", "bindings", "type", "value", "x"]), children, max_size=4),
    max_leaves=12,
)


@given(_json_values)
def test_parse_results_never_crashes_on_jsonish_fuzz(document):
    try:
        parse_results(json.dumps(document).encode())
    except ParseError:
        pass


def test_endpoint_config_validation():
    with pytest.raises(ScholiaError):
        EndpointConfig(timeout=0)
    with pytest.raises(ScholiaError):
        EndpointConfig(cache_ttl=-1)


def test_endpoint_config_from_env(monkeypatch):
    monkeypatch.setenv("SCHOLIA_ENDPOINT", "http://example.org/sparql")
    monkeypatch.setenv("SCHOLIA_CACHE_TTL", "17.5")
    config = EndpointConfig.from_env()
    assert config.base_url == "http://example.org/sparql"
    assert config.cache_ttl == 17.5


def test_execute_count_against_fixture(sparql_client):
    assert sparql_client.execute(build_count_scientific_articles()).single_int() == 12
    assert sparql_client.execute(build_count_citations()).single_int() == 31


def test_execute_rejects_empty_query(sparql_client):
    with pytest.raises(ValueError):
        sparql_client.execute("   ")


def test_cache_suppresses_second_network_call(fixture_server, endpoint_config):
    client = SparqlClient(endpoint_config)
    query = build_count_scientific_articles()
    digest = query.canonical_hash.hex()
    fixture_server.reset_log()
    first, hit_first = client.execute_detailed(query)
    second, hit_second = client.execute_detailed(query)
    assert (hit_first, hit_second) == (False, True)
    assert first == second
    assert fixture_server.query_counts[digest] == 1


def test_cache_is_whitespace_insensitive(fixture_server, endpoint_config):
    client = SparqlClient(endpoint_config)
    query = build_count_scientific_articles()
    fixture_server.reset_log()
    client.execute(query)
    _result, hit = client.execute_detailed(QueryText("  " + query.text.replace("\n", " \n ")))
    assert hit is True
    assert fixture_server.query_counts[query.canonical_hash.hex()] == 1


def test_cache_ttl_zero_disables(fixture_server, endpoint_config):
    from dataclasses import replace

    client = SparqlClient(replace(endpoint_config, cache_ttl=0))
    query = build_count_scientific_articles()
    fixture_server.reset_log()
    client.execute(query)
    client.execute(query)
    assert fixture_server.query_counts[query.canonical_hash.hex()] == 2


def test_cache_lru_eviction(fixture_server, endpoint_config):
    from dataclasses import replace

    client = SparqlClient(replace(endpoint_config, cache_capacity=1))
    articles = build_count_scientific_articles()
    citations = build_count_citations()
    fixture_server.reset_log()
    client.execute(articles)
    client.execute(citations)  # evicts the articles entry
    client.execute(articles)
    assert fixture_server.query_counts[articles.canonical_hash.hex()] == 2


class _FlakyHandler(BaseHTTPRequestHandler):
    statuses = []
    hits = 0

    def log_message(self, *args):
        pass

    def do_GET(self):
        cls = type(self)
        status = cls.statuses[min(cls.hits, len(cls.statuses) - 1)]
        cls.hits += 1
        if status == 200:
            body = b'{"head": {"vars": ["x"]}, "results": {"bindings": []}}'
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        else:
            self.send_response(status)
            self.send_header("Content-Length", "0")
            self.end_headers()


@pytest.fixture
def flaky_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _FlakyHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    server.server_close()


def _flaky_client(server, statuses, max_retries=2):
    _FlakyHandler.statuses = statuses
    _FlakyHandler.hits = 0
    return SparqlClient(
        EndpointConfig(
            base_url=f"http://127.0.0.1:{server.server_address[1]}/",
            max_retries=max_retries,
            retry_backoff=0.001,
            cache_ttl=0,
        )
    )


def test_retry_exhaustion_on_500(flaky_server):
    client = _flaky_client(flaky_server, [500, 500, 500])
    with pytest.raises(EndpointError) as info:
        client.execute("SELECT ?x WHERE { ?x ?p ?o . }")
    assert info.value.status == 500
    assert _FlakyHandler.hits == 3  # max_retries=2 means three attempts


def test_retry_recovers_after_429(flaky_server):
    client = _flaky_client(flaky_server, [429, 200])
    results = client.execute("SELECT ?x WHERE { ?x ?p ?o . }")
    assert len(results) == 0
    assert _FlakyHandler.hits == 2


def test_client_errors_do_not_retry(flaky_server):
    client = _flaky_client(flaky_server, [400, 200])
    with pytest.raises(EndpointError):
        client.execute("SELECT ?x WHERE { ?x ?p ?o . }")
    assert _FlakyHandler.hits == 1


def test_transport_error_on_unreachable_endpoint():
    client = SparqlClient(
        EndpointConfig(base_url="http://127.0.0.1:1/sparql", max_retries=0, retry_backoff=0.001)
    )
    with pytest.raises(TransportError):
        client.execute("SELECT ?x WHERE { ?x ?p ?o . }")


def test_small_queries_use_get_large_use_post(fixture_server, endpoint_config):
    client = SparqlClient(endpoint_config)
    fixture_server.reset_log()
    with pytest.raises(EndpointError):  # unknown query, but the method is logged
        client.execute("SELECT ?x WHERE { ?x ?p ?o . }")
    small = fixture_server.request_log[-1].method
    padding = "".join(f"?v{i} " for i in range(400))
    with pytest.raises(EndpointError):
        client.execute(f"SELECT {padding}WHERE {{ ?x ?p ?o . }}")
    large = fixture_server.request_log[-1].method
    assert (small, large) == ("GET", "POST")
