from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholia.bibgen import (
    BibEntry,
    BibParseError,
    EntityNotFound,
    IoError,
    escape_field_value,
    fetch_entry,
    format_bibliography,
    format_bibtex,
    parse_aux,
    parse_bibtex,
    unescape_field_value,
    write_bib_from_aux,
)
from scholia.errors import ScholiaError
from scholia.fixtures.oracle import GraphIndex
from scholia.model import item, parse_entity_id


def test_parse_aux_single_citation():
    ids, skipped = parse_aux("\\citation{Q18507561}\n")
    assert ids == [parse_entity_id("Q18507561")]
    assert skipped == []


def test_parse_aux_dedup_and_skip():
    ids, skipped = parse_aux("\\citation{Q1,smith2010,Q1}\n")
    assert ids == [item(1)]
    assert skipped == ["smith2010"]


def test_parse_aux_empty():
    assert parse_aux("") == ([], [])


def test_parse_aux_skips_property_ids_and_keeps_order():
    content = "\\citation{Q5}\n\\citation{P50}\n\\citation{Q3,Q5}\n\\relax\n"
    ids, skipped = parse_aux(content)
    assert ids == [item(5), item(3)]
    assert skipped == ["P50"]


def test_parse_aux_is_idempotent():
    content = "\\citation{Q5,alpha}\n\\citation{Q7}\n"
    assert parse_aux(content) == parse_aux(content)


def test_fetch_entry_article_fields(api_client):
    entry = fetch_entry(parse_entity_id("Q18507561"), api_client)
    assert entry.entry_type == "article"
    assert entry.cite_key == "Q18507561"
    assert entry.get("title") == "Wikidata: a free collaborative knowledgebase"
    assert entry.get("author") == "Denny Vrandečić and Markus Krötzsch"
    assert entry.get("journal") == "Communications of the ACM"
    assert entry.get("volume") == "57"
    assert entry.get("number") == "10"
    assert entry.get("pages") == "78-85"
    assert entry.get("year") == "2014"
    assert entry.get("doi") == "10.1145/2629489"
    assert [name for name, _v in entry.fields] == [
        "title", "author", "journal", "volume", "number", "pages", "year", "doi",
    ]


def test_fetch_entry_orders_authors_by_ordinal(api_client):
    # statement order in the fixture is scrambled (3, 1, 2)
    entry = fetch_entry(parse_entity_id("Q90000104"), api_client)
    assert entry.get("author") == "Daniela Balslev and Lars Kai Hansen and Finn Årup Nielsen"


def test_fetch_entry_book(api_client):
    entry = fetch_entry(parse_entity_id("Q90000041"), api_client)
    assert entry.entry_type == "book"
    assert entry.get("title") == "Directional Statistics"
    assert entry.get("year") == "1999"


def test_fetch_entry_misc_for_unclassed(api_client):
    entry = fetch_entry(parse_entity_id("Q90000060"), api_client)  # a topic item
    assert entry.entry_type == "misc"


def test_fetch_entry_not_found(api_client):
    with pytest.raises(EntityNotFound):
        fetch_entry(item(999999999), api_client)


def test_format_minimal_entry():
    entry = BibEntry(entry_type="misc", cite_key="Q1", fields=(("title", "X"),))
    assert format_bibtex(entry) == "@misc{Q1,\n  title = {X},\n}\n"


def test_format_escapes_specials():
    entry = BibEntry(entry_type="misc", cite_key="Q1", fields=(("title", "Health & Safety"),))
    assert "title = {Health \\& Safety}," in format_bibtex(entry)


def test_cite_key_must_be_item():
    with pytest.raises(ScholiaError):
        BibEntry(entry_type="misc", cite_key="P50", fields=())
    with pytest.raises(ScholiaError):
        BibEntry(entry_type="misc", cite_key="smith2010", fields=())


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=60))
def test_escape_unescape_round_trip(text):
    assert unescape_field_value(escape_field_value(text)) == text


def test_utf8_round_trip_through_write_and_read():
    entry = BibEntry(
        entry_type="misc", cite_key="Q1", fields=(("author", "Finn Årup Nielsen"),)
    )
    text = format_bibtex(entry)
    parsed = parse_bibtex(text)
    assert parsed[0].get("author") == "Finn Årup Nielsen"
    assert parsed[0].get("author").encode() == "Finn Årup Nielsen".encode()


def test_parse_bibtex_structures():
    text = (
        "Preamble junk\n"
        "@string{acm = {Communications of the ACM}}\n"
        "@comment{ not an entry {nested} }\n"
        '@article{Q5, title = {A {nested} title}, journal = acm # " extra", year = 1999}\n'
    )
    entries = parse_bibtex(text)
    assert len(entries) == 1
    entry = entries[0]
    assert entry.entry_type == "article"
    assert entry.get("title") == "A {nested} title"
    assert entry.get("journal") == "Communications of the ACM extra"
    assert entry.get("year") == "1999"


@pytest.mark.parametrize(
    "bad",
    [
        "@article{Q5, title = {unterminated\n",
        "@article{, title = {x}}",
        "@article{Q5, title = }",
        '@article{Q5, title = "unterminated}',
        "@article{Q5, title = undefinedmacro}",
    ],
)
def test_parse_bibtex_rejects_grammar_violations(bad):
    with pytest.raises(BibParseError):
        parse_bibtex(bad)


def test_every_fixture_entry_round_trips(dataset, api_client):
    """Corpus check: each work's entry serializes to parseable BibTeX."""
    graph = GraphIndex(dataset)
    entries = [fetch_entry(work, api_client) for work in graph.work_like()]
    text = format_bibliography(entries)
    parsed = parse_bibtex(text)
    assert len(parsed) == len(entries)
    for original, round_tripped in zip(entries, parsed):
        assert round_tripped.cite_key == original.cite_key
        assert round_tripped.entry_type == original.entry_type
        for name, value in original.fields:
            assert unescape_field_value(round_tripped.get(name)) == value


def test_write_bib_from_aux_default_output(tmp_path, api_client):
    aux = tmp_path / "example.aux"
    aux.write_text(
        "\\relax\n\\citation{Q18507561}\n\\bibstyle{plain}\n\\bibdata{example}\n",
        encoding="utf-8",
    )
    report = write_bib_from_aux(aux, client=api_client)
    assert (report.written, report.skipped, report.failures) == (1, [], [])
    bib = (tmp_path / "example.bib").read_text(encoding="utf-8")
    assert bib.startswith("@article{Q18507561,")
    assert parse_bibtex(bib)[0].cite_key == "Q18507561"


def test_write_bib_from_aux_mixed_keys_and_failures(tmp_path, api_client):
    aux = tmp_path / "mixed.aux"
    aux.write_text(
        "\\citation{Q18507561,legacy2001}\n\\citation{Q999999999}\n", encoding="utf-8"
    )
    report = write_bib_from_aux(aux, tmp_path / "out.bib", client=api_client)
    assert report.written == 1
    assert report.skipped == ["legacy2001"]
    assert len(report.failures) == 1 and report.failures[0][0] == "Q999999999"
    entries = parse_bibtex((tmp_path / "out.bib").read_text(encoding="utf-8"))
    assert [e.cite_key for e in entries] == ["Q18507561"]


def test_write_bib_from_aux_missing_aux(tmp_path, api_client):
    with pytest.raises(IoError):
        write_bib_from_aux(tmp_path / "absent.aux", client=api_client)


def test_write_bib_from_aux_unwritable_output(tmp_path, api_client):
    aux = tmp_path / "example.aux"
    aux.write_text("\\citation{Q18507561}\n", encoding="utf-8")
    # a directory as the output path cannot be opened for writing by anyone
    blocked = tmp_path / "out.bib"
    blocked.mkdir()
    with pytest.raises(IoError):
        write_bib_from_aux(aux, blocked, client=api_client)
