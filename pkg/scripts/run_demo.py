#!/usr/bin/env python3
"""Run the whole stack locally against the bundled fixture dataset.

Starts the hermetic fixture server (SPARQL endpoint + entity API) and the
profile web service wired to it, then serves until interrupted. Handy for
browsing the UI or poking the JSON API without network access.

Usage: python scripts/run_demo.py [--bind 127.0.0.1:8100]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import uvicorn

from scholia.entity_api import ApiConfig
from scholia.fixtures import load_default_dataset
from scholia.fixtures.server import FixtureServer
from scholia.service import create_app
from scholia.sparql_client import EndpointConfig


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bind", default="127.0.0.1:8100", help="host:port for the web service")
    args = parser.parse_args()
    host, _, port = args.bind.partition(":")

    dataset = load_default_dataset()
    fixture = FixtureServer(dataset).start()
    print(f"fixture SPARQL endpoint: {fixture.sparql_url}")
    print(f"fixture entity API:      {fixture.api_url}")

    app = create_app(
        sparql_config=EndpointConfig(base_url=fixture.sparql_url),
        api_config=ApiConfig(base_url=fixture.api_url),
    )
    print(f"service:                 http://{args.bind}/  (try /Q8219 or /author/Q20980928)")
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port or "8100"), log_level="warning")
    finally:
        fixture.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
