import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholia.model import AuthorEntry, ResultSet, Term, WorkRecord, item
from scholia.stats import (
    AuthorRole,
    OrdinalOutOfRange,
    ZeroAuthorCount,
    citation_rows_from_bindings,
    classify_role,
    coauthor_normalized_citations,
    normalized_page_production,
    papers_per_year_by_role,
    publisher_scatter,
    scatter_points_from_bindings,
    work_records_from_bindings,
)

XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"


def test_classify_role_solo_beats_everything():
    assert classify_role(1, 1) is AuthorRole.SOLO
    assert classify_role(None, 1) is AuthorRole.SOLO


def test_classify_role_positions():
    assert classify_role(1, 5) is AuthorRole.FIRST
    assert classify_role(5, 5) is AuthorRole.LAST
    assert classify_role(3, 5) is AuthorRole.MIDDLE
    assert classify_role(None, 4) is AuthorRole.UNKNOWN


def test_classify_role_bounds():
    with pytest.raises(OrdinalOutOfRange):
        classify_role(6, 5)
    with pytest.raises(OrdinalOutOfRange):
        classify_role(0, 5)
    with pytest.raises(ZeroAuthorCount):
        classify_role(None, 0)


@given(
    count=st.integers(min_value=1, max_value=50),
    ordinal=st.integers(min_value=1, max_value=50) | st.none(),
)
def test_classify_role_total_and_known_when_ordered(count, ordinal):
    if ordinal is not None and ordinal > count:
        with pytest.raises(OrdinalOutOfRange):
            classify_role(ordinal, count)
        return
    role = classify_role(ordinal, count)
    if ordinal is not None:
        assert role is not AuthorRole.UNKNOWN
    assert isinstance(role, AuthorRole)


def _record(work, authors, year=None, pages=None):
    return WorkRecord(
        work=item(work),
        authors=tuple(AuthorEntry(a, o) for a, o in authors),
        publication_year=year,
        pages=pages,
    )


SUBJECT = item(1)


def test_papers_per_year_counts_only_dated_subject_works():
    records = [
        _record(10, [(SUBJECT, 1), (item(2), 2)], year=2015),
        _record(11, [(SUBJECT, None)], year=2015),  # solo despite missing ordinal
        _record(12, [(SUBJECT, 1)], year=None),  # undated: excluded
        _record(13, [(item(2), 1)], year=2015),  # not the subject
        _record(14, [(SUBJECT, 2), (item(2), 1)], year=2016),
    ]
    histogram = papers_per_year_by_role(records, SUBJECT)
    assert histogram == {
        (2015, AuthorRole.FIRST): 1,
        (2015, AuthorRole.SOLO): 1,
        (2016, AuthorRole.LAST): 1,
    }
    assert sum(histogram.values()) == 3


def test_papers_per_year_histogram_total_bounded():
    records = [_record(10, [(SUBJECT, 1)], year=2015) for _ in range(4)]
    histogram = papers_per_year_by_role(records, SUBJECT)
    assert sum(histogram.values()) == len(records)


def test_page_production_shares():
    records = [
        _record(
            10,
            [(SUBJECT, 1), (item(2), 2), (item(3), 3), (item(4), 4)],
            year=2015,
            pages=12,
        )
    ]
    result = normalized_page_production(records, {SUBJECT, item(2)})
    assert result.production == {
        (2015, SUBJECT): 3.0,
        (2015, item(2)): 3.0,
    }
    assert result.missing_pages == 0


def test_page_production_missing_pages_tally():
    records = [
        _record(10, [(SUBJECT, 1)], year=2015),
        _record(11, [(SUBJECT, 1)], year=2016, pages=4),
    ]
    result = normalized_page_production(records, {SUBJECT})
    assert result.missing_pages == 1
    assert result.production == {(2016, SUBJECT): 4.0}


@given(
    pages=st.integers(min_value=1, max_value=500),
    n_authors=st.integers(min_value=1, max_value=12),
)
def test_page_production_conserves_pages(pages, n_authors):
    authors = [(item(i + 10), i + 1) for i in range(n_authors)]
    records = [_record(5, authors, year=2000, pages=pages)]
    result = normalized_page_production(records, {a for a, _o in authors})
    assert math.isclose(sum(result.production.values()), pages, rel_tol=0, abs_tol=1e-9)


def test_coauthor_normalized_citations_spec_example():
    # one work, three authors, cited six times in one year
    rows = []
    for _citation in range(6):
        for author in (item(2), item(3), item(4)):
            rows.append((item(10), 2016, 3, author))
    mass = coauthor_normalized_citations(rows)
    for author in (item(2), item(3), item(4)):
        assert math.isclose(mass[(2016, author)], 2.0, abs_tol=1e-9)


def test_coauthor_normalized_citations_empty():
    assert coauthor_normalized_citations([]) == {}


def test_coauthor_normalized_citations_rejects_zero_count():
    with pytest.raises(ZeroAuthorCount):
        coauthor_normalized_citations([(item(10), 2016, 0, item(2))])


def test_coauthor_normalized_citations_skips_undated():
    mass = coauthor_normalized_citations([(item(10), None, 2, item(2))])
    assert mass == {}


@given(
    events=st.lists(
        st.tuples(st.integers(2000, 2020), st.integers(min_value=1, max_value=8)),
        max_size=30,
    )
)
def test_coauthor_normalized_citations_conserve_mass(events):
    rows = []
    for year, n_authors in events:
        for author_index in range(n_authors):
            rows.append((item(10), year, n_authors, item(100 + author_index)))
    mass = coauthor_normalized_citations(rows)
    assert math.isclose(sum(mass.values()), len(events), rel_tol=0, abs_tol=1e-9)


def test_publisher_scatter_ordering():
    points = publisher_scatter(
        [
            (item(20), 2, 3, "B"),
            (item(10), 10, 50, "A"),
        ]
    )
    assert [(p.x, p.y, p.label) for p in points] == [(10, 50, "A"), (2, 3, "B")]


def test_publisher_scatter_tie_broken_by_id():
    points = publisher_scatter(
        [
            (item(30), 5, 1, "high-id"),
            (item(7), 5, 9, "low-id"),
        ]
    )
    assert [p.venue for p in points] == [item(7), item(30)]


def test_publisher_scatter_rejects_negative():
    with pytest.raises(Exception):
        publisher_scatter([(item(1), -1, 0, "x")])


def _uri(entity):
    return Term("uri", entity.uri)


def _lit(value, datatype=None):
    return Term("literal", value, datatype=datatype)


def test_work_records_from_bindings_groups_rows():
    rows = (
        {
            "work": _uri(item(10)),
            "workLabel": _lit("First work"),
            "author": _uri(SUBJECT),
            "ordinal": _lit("1"),
            "authorCount": _lit("2", XSD_INT),
            "year": _lit("2015", XSD_INT),
            "pages": _lit("12"),
        },
        {
            "work": _uri(item(10)),
            "workLabel": _lit("First work"),
            "author": _lit("A. Writer"),
            "ordinal": _lit("2"),
            "authorCount": _lit("2", XSD_INT),
            "year": _lit("2015", XSD_INT),
            "pages": _lit("12"),
        },
        {
            "work": _uri(item(11)),
            "workLabel": _lit("Second work"),
            "author": _uri(SUBJECT),
            "authorCount": _lit("1", XSD_INT),
        },
    )
    variables = ("work", "workLabel", "author", "authorLabel", "ordinal", "authorCount", "year", "pages")
    records = work_records_from_bindings(ResultSet(variables=variables, rows=rows))
    assert len(records) == 2
    first, second = records
    assert first.work == item(10)
    assert first.pages == 12
    assert first.publication_year == 2015
    assert first.authors == (AuthorEntry(SUBJECT, 1), AuthorEntry("A. Writer", 2))
    assert second.publication_year is None
    assert second.authors == (AuthorEntry(SUBJECT, None),)


def test_citation_rows_from_bindings():
    rows = (
        {
            "citingWork": _uri(item(20)),
            "citedWork": _uri(item(10)),
            "citedAuthor": _uri(item(2)),
            "year": _lit("2016", XSD_INT),
            "authorCount": _lit("3", XSD_INT),
        },
    )
    variables = ("citingWork", "citedWork", "citedAuthor", "citedAuthorLabel", "year", "authorCount")
    parsed = citation_rows_from_bindings(ResultSet(variables=variables, rows=rows))
    assert parsed == [(item(10), 2016, 3, item(2))]


def test_scatter_points_from_bindings():
    rows = (
        {
            "venue": _uri(item(30)),
            "venueLabel": _lit("Genome Biology"),
            "works": _lit("5", XSD_INT),
            "citations": _lit("8", XSD_INT),
        },
    )
    variables = ("venue", "venueLabel", "works", "citations")
    points = scatter_points_from_bindings(ResultSet(variables=variables, rows=rows))
    assert [(p.x, p.y, p.venue, p.label) for p in points] == [(5, 8, item(30), "Genome Biology")]
