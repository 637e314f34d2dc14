"""Shared fixtures: the dataset and one hermetic fixture server per session."""

import pytest
from fastapi.testclient import TestClient

from scholia.entity_api import ApiConfig, EntityApiClient
from scholia.fixtures import load_default_dataset
from scholia.fixtures.server import FixtureServer
from scholia.service import create_app
from scholia.sparql_client import EndpointConfig, SparqlClient


@pytest.fixture(scope="session")
def dataset():
    return load_default_dataset()


@pytest.fixture(scope="session")
def fixture_server(dataset):
    server = FixtureServer(dataset).start()
    yield server
    server.stop()


@pytest.fixture
def endpoint_config(fixture_server):
    return EndpointConfig(base_url=fixture_server.sparql_url, retry_backoff=0.01)


@pytest.fixture
def sparql_client(endpoint_config):
    return SparqlClient(endpoint_config)


@pytest.fixture
def api_config(fixture_server):
    return ApiConfig(base_url=fixture_server.api_url)


@pytest.fixture
def api_client(api_config):
    return EntityApiClient(api_config)


@pytest.fixture
def service_client(endpoint_config, api_config):
    app = create_app(sparql_config=endpoint_config, api_config=api_config)
    return TestClient(app)


@pytest.fixture
def fixture_env(fixture_server, monkeypatch):
    """Point the env-driven configs at the fixture server (for CLI tests)."""
    monkeypatch.setenv("SCHOLIA_ENDPOINT", fixture_server.sparql_url)
    monkeypatch.setenv("SCHOLIA_API_URL", fixture_server.api_url)
    return fixture_server
