"""Client-side aggregation for the chart panels.

The raw-bindings queries return one row per (work, author); the functions
here turn those rows into the per-year stacked series and scatter points the
profile pages display. Counts are exact integers; normalized quantities are
binary floats (tests compare them at 1e-9).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .errors import ScholiaError
from .model import AuthorEntry, AuthorKey, EntityId, ResultSet, WorkRecord


class OrdinalOutOfRange(ScholiaError):
    """An author ordinal lies outside 1..author_count."""


class ZeroAuthorCount(ScholiaError):
    """A citation row claims a cited work with no authors."""


class AuthorRole(Enum):
    FIRST = "first"
    MIDDLE = "middle"
    LAST = "last"
    SOLO = "solo"
    UNKNOWN = "unknown"


# Stacking order for the five-color bar charts.
ROLE_ORDER = (
    AuthorRole.FIRST,
    AuthorRole.MIDDLE,
    AuthorRole.LAST,
    AuthorRole.SOLO,
    AuthorRole.UNKNOWN,
)


def classify_role(ordinal: Optional[int], author_count: int) -> AuthorRole:
    """Author-position role: solo beats everything, then first/last/middle.

    A missing ordinal on a multi-author work is its own bucket rather than a
    guess.
    """
    if author_count < 1:
        raise ZeroAuthorCount(f"author_count must be >= 1, got {author_count}")
    if ordinal is not None and not 1 <= ordinal <= author_count:
        raise OrdinalOutOfRange(f"ordinal {ordinal} outside 1..{author_count}")
    if author_count == 1:
        return AuthorRole.SOLO
    if ordinal is None:
        return AuthorRole.UNKNOWN
    if ordinal == 1:
        return AuthorRole.FIRST
    if ordinal == author_count:
        return AuthorRole.LAST
    return AuthorRole.MIDDLE


YearRoleHistogram = Dict[Tuple[int, AuthorRole], int]


def papers_per_year_by_role(records: Sequence[WorkRecord], subject: EntityId) -> YearRoleHistogram:
    """Papers per (year, role) for one author.

    One increment per record where the subject appears as an author and a
    publication year is known; undated works are excluded from the chart.
    """
    histogram: YearRoleHistogram = {}
    for record in records:
        if record.publication_year is None or not record.has_author(subject):
            continue
        role = classify_role(record.ordinal_of(subject), record.author_count)
        key = (record.publication_year, role)
        histogram[key] = histogram.get(key, 0) + 1
    return histogram


@dataclass(frozen=True)
class PageProduction:
    """Normalized page mass per (year, author), plus the missing-data tally."""

    production: Dict[Tuple[int, EntityId], float]
    missing_pages: int


def normalized_page_production(
    records: Sequence[WorkRecord], subject_authors: Set[EntityId]
) -> PageProduction:
    """Page production normalized by author count.

    A dated work with p pages and n authors contributes p/n to (year, a) for
    each of its authors a in the subject set. Works without a page count
    contribute nothing and are tallied so the chart can disclose the bias.
    """
    production: Dict[Tuple[int, EntityId], float] = {}
    missing = 0
    for record in records:
        if record.publication_year is None:
            continue
        if record.pages is None:
            missing += 1
            continue
        share = record.pages / record.author_count
        for entry in record.authors:
            author = entry.author
            if isinstance(author, EntityId) and author in subject_authors:
                key = (record.publication_year, author)
                production[key] = production.get(key, 0.0) + share
    return PageProduction(production=production, missing_pages=missing)


CitationRow = Tuple[EntityId, Optional[int], int, AuthorKey]


def coauthor_normalized_citations(
    citing_rows: Iterable[CitationRow],
) -> Dict[Tuple[int, AuthorKey], float]:
    """Citation mass per (citing year, author of the cited work).

    Each row is one (citation event, cited author) pair carrying the cited
    work's total author count; the event contributes 1/count to that author's
    bar for the citing year. Rows whose citing work is undated are skipped.
    """
    mass: Dict[Tuple[int, AuthorKey], float] = {}
    for cited_work, year, author_count, author in citing_rows:
        if author_count < 1:
            raise ZeroAuthorCount(f"cited work {cited_work} has author count {author_count}")
        if year is None:
            continue
        key = (year, author)
        mass[key] = mass.get(key, 0.0) + 1.0 / author_count
    return mass


@dataclass(frozen=True)
class ScatterPoint:
    x: int  # works published
    y: int  # citations received
    venue: EntityId
    label: str = ""


def publisher_scatter(
    venue_rows: Iterable[Tuple[EntityId, int, int, str]]
) -> List[ScatterPoint]:
    """Scatter points (works, citations) per venue.

    Ordered by work count descending, ties broken by venue id ascending.
    """
    points = []
    for venue, works, citations, label in venue_rows:
        if works < 0 or citations < 0:
            raise ScholiaError(f"negative counts for {venue}: {works}, {citations}")
        points.append(ScatterPoint(x=works, y=citations, venue=venue, label=label))
    points.sort(key=lambda pt: (-pt.x, pt.venue.sort_key()))
    return points


# ---------------------------------------------------------------------------
# Adapters from raw query bindings to the inputs above
# ---------------------------------------------------------------------------


def work_records_from_bindings(results: ResultSet) -> List[WorkRecord]:
    """Assemble WorkRecords from one-row-per-(work, author) bindings.

    Expects the raw works query projection: work, author, ordinal?,
    authorCount, year?, pages?, workLabel?.
    """
    order: List[str] = []
    by_work: Dict[str, dict] = {}
    for row in results:
        if "work" not in row:
            continue
        key = row["work"].value
        if key not in by_work:
            order.append(key)
            by_work[key] = {
                "work": row["work"].entity_id(),
                "title": row["workLabel"].value if "workLabel" in row else "",
                "authors": [],
                "seen": set(),
                "year": row["year"].as_year() if "year" in row else None,
                "pages": row["pages"].as_int() if "pages" in row else None,
            }
        bucket = by_work[key]
        if "author" in row:
            term = row["author"]
            author: AuthorKey = term.maybe_entity_id() or term.value
            ordinal = int(row["ordinal"].value) if "ordinal" in row else None
            entry_key = (str(author), ordinal)
            if entry_key not in bucket["seen"]:
                bucket["seen"].add(entry_key)
                bucket["authors"].append(AuthorEntry(author=author, ordinal=ordinal))
    records = []
    for key in order:
        bucket = by_work[key]
        records.append(
            WorkRecord(
                work=bucket["work"],
                title=bucket["title"],
                authors=tuple(bucket["authors"]),
                publication_year=bucket["year"],
                pages=bucket["pages"],
            )
        )
    return records


def citation_rows_from_bindings(results: ResultSet) -> List[CitationRow]:
    """Rows for coauthor_normalized_citations from the conorm raw query."""
    rows: List[CitationRow] = []
    for row in results:
        if "citedWork" not in row or "citedAuthor" not in row:
            continue
        term = row["citedAuthor"]
        author: AuthorKey = term.maybe_entity_id() or term.value
        rows.append(
            (
                row["citedWork"].entity_id(),
                row["year"].as_year() if "year" in row else None,
                row["authorCount"].as_int() if "authorCount" in row else 0,
                author,
            )
        )
    return rows


def scatter_points_from_bindings(results: ResultSet) -> List[ScatterPoint]:
    """Scatter points from the publisher works/citations query."""
    venue_rows = []
    for row in results:
        if "venue" not in row:
            continue
        venue_rows.append(
            (
                row["venue"].entity_id(),
                row["works"].as_int() if "works" in row else 0,
                row["citations"].as_int() if "citations" in row else 0,
                row["venueLabel"].value if "venueLabel" in row else "",
            )
        )
    return publisher_scatter(venue_rows)
