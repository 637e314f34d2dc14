#!/usr/bin/env python3
"""Print a plain-text author profile: per-year role histogram and coauthors.

Runs against the endpoint in SCHOLIA_ENDPOINT; with --fixture it spins up the
bundled dataset instead, which makes the script a quick end-to-end exercise
of query generation, execution and the chart math.

Usage: python scripts/author_report.py Q20980928 --fixture
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from scholia import stats
from scholia.model import Aspect, parse_entity_id
from scholia.queries import PanelQuerySpec, build_panel_query
from scholia.sparql_client import EndpointConfig, SparqlClient


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("author", help="item id, e.g. Q20980928")
    parser.add_argument("--fixture", action="store_true", help="use the bundled dataset")
    args = parser.parse_args()
    subject = parse_entity_id(args.author)

    fixture = None
    if args.fixture:
        from scholia.fixtures import load_default_dataset
        from scholia.fixtures.server import FixtureServer

        fixture = FixtureServer(load_default_dataset()).start()
        client = SparqlClient(EndpointConfig(base_url=fixture.sparql_url))
    else:
        client = SparqlClient(EndpointConfig.from_env())

    try:
        spec = PanelQuerySpec(aspect=Aspect.AUTHOR, panel="works-raw", subject=subject)
        records = stats.work_records_from_bindings(client.execute(build_panel_query(spec)))
        histogram = stats.papers_per_year_by_role(records, subject)

        print(f"works: {len(records)} ({sum(histogram.values())} dated)")
        years = sorted({year for year, _role in histogram})
        header = "year  " + "".join(f"{role.value:>9}" for role in stats.ROLE_ORDER)
        print(header)
        for year in years:
            cells = "".join(
                f"{histogram.get((year, role), 0):>9}" for role in stats.ROLE_ORDER
            )
            print(f"{year}  {cells}")

        spec = PanelQuerySpec(aspect=Aspect.AUTHOR, panel="coauthors", subject=subject)
        results = client.execute(build_panel_query(spec))
        print("\ncoauthors:")
        for row in results:
            label = row["coauthorLabel"].value if "coauthorLabel" in row else "?"
            print(f"  {label} ({row['count'].value} shared works)")
    finally:
        if fixture is not None:
            fixture.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
