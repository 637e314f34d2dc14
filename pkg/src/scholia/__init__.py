"""Scholarly profiles over a Wikidata-style SPARQL endpoint.

The package turns item identifiers into on-the-fly profile pages (authors,
works, organizations, venues, series, publishers, sponsors, topics) by
generating SPARQL queries, and can also write BibTeX files from the
\\citation keys of a LaTeX run.
"""

__version__ = "0.1.0"

from .model import Aspect, EntityId, PropertyRegistry, parse_entity_id  # noqa: F401
