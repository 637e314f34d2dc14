#!/usr/bin/env python3
"""Regenerate the checked-in canned query results from the fixture triples.

The fixture server always derives its canned results from the triple file at
startup; the JSON written here exists so CI can detect drift (regenerate and
diff). Run this after changing either the dataset or any query builder.
"""

import json
import sys
from pathlib import Path

from scholia.fixtures import load_default_dataset
from scholia.fixtures.oracle import generate_canned_results, referenced_entities_exist

CANNED_PATH = Path(__file__).resolve().parents[1] / "src" / "scholia" / "fixtures" / "canned" / "canned_queries.json"


def main() -> int:
    dataset = load_default_dataset()
    canned = generate_canned_results(dataset)
    missing = referenced_entities_exist(dataset, canned)
    if missing:
        print(f"refusing to write: canned results reference unknown ids {missing}", file=sys.stderr)
        return 1
    document = {
        "version": 1,
        "entries": [
            {"hash": digest, **entry} for digest, entry in sorted(canned.items())
        ],
    }
    CANNED_PATH.parent.mkdir(parents=True, exist_ok=True)
    CANNED_PATH.write_text(
        json.dumps(document, ensure_ascii=False, indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {len(canned)} canned queries to {CANNED_PATH}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
