"""Deterministic SPARQL text generation.

One builder per (aspect, panel) plus the standalone counting, external-link
and claims-supported queries. Builders are pure functions of their inputs:
the same spec and registry always produce byte-identical text, so query
output is snapshot-testable and cache keys are stable.

Raw-bindings strategy: the chart panels (per-year roles, page production,
co-author-normalized citations) fetch one row per (work, author) with
ordinal, author count, pages and date, and are aggregated client-side by
the stats module. That keeps the bar-chart math unit-testable without a
SPARQL engine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .errors import ScholiaError
from .model import Aspect, EntityId, PropertyRegistry, item
from .sparql_client import QueryText

# The class that marks scholarly articles in the default vocabulary.
SCIENTIFIC_ARTICLE_CLASS = item(13442814)

# Graph traversal bounds for the citation-graph panel.
MAX_GRAPH_DEPTH = 3
DEFAULT_GRAPH_DEPTH = 2
DEFAULT_NODE_CAP = 200

EXTERNAL_ID_KINDS = ("doi", "orcid", "twitter", "github")


class UnknownPanel(ScholiaError):
    """The (aspect, panel) pair does not exist in the panel registry."""


class MalformedPrefix(ScholiaError):
    """The URL prefix for the external-resource query is not usable."""


_LANGUAGE_RE = re.compile(r"^[A-Za-z][A-Za-z-]*$")
_URL_PREFIX_RE = re.compile(r"^https?://[A-Za-z0-9._~:/?#@!$&'()*+,;=%-]+$")


@dataclass(frozen=True)
class PanelQuerySpec:
    """One (aspect, panel, subject) request to render a profile panel."""

    aspect: Aspect
    panel: str
    subject: EntityId
    language: str = "en"
    limit: int = 500

    def __post_init__(self) -> None:
        if not _LANGUAGE_RE.match(self.language):
            raise ScholiaError(f"bad language tag {self.language!r}")
        if self.limit < 1:
            raise ScholiaError(f"limit must be positive, got {self.limit}")


def escape_string_literal(value: str) -> str:
    """Escape a python string for inclusion in a SPARQL double-quoted literal."""
    return value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _label_service(language: str) -> str:
    return f'SERVICE wikibase:label {{ bd:serviceParam wikibase:language "{language}" . }}'


def _author_statement_union(p: PropertyRegistry, work_var: str = "?work") -> str:
    """UNION enumerating all author positions (items and name strings)."""
    author = p.token("author")
    name_string = p.token("author-name-string")
    ordinal = p.token("series-ordinal")
    return (
        f"{{ {work_var} p:{author} ?authorStatement . ?authorStatement ps:{author} ?author .\n"
        f"    OPTIONAL {{ ?authorStatement pq:{ordinal} ?ordinal . }} }}\n"
        f"  UNION\n"
        f"  {{ {work_var} p:{name_string} ?authorStatement . "
        f"?authorStatement ps:{name_string} ?author .\n"
        f"    OPTIONAL {{ ?authorStatement pq:{ordinal} ?ordinal . }} }}"
    )


def _author_count_subquery(p: PropertyRegistry, work_var: str = "?work") -> str:
    author = p.token("author")
    name_string = p.token("author-name-string")
    return (
        f"{{ SELECT {work_var} (COUNT(?anyAuthor) AS ?authorCount) WHERE {{\n"
        f"      {{ {work_var} wdt:{author} ?anyAuthor . }} "
        f"UNION {{ {work_var} wdt:{name_string} ?anyAuthor . }} }}\n"
        f"    GROUP BY {work_var} }}"
    )


def _year_bind(p: PropertyRegistry, work_var: str = "?work") -> str:
    date = p.token("publication-date")
    return f"OPTIONAL {{ {work_var} wdt:{date} ?date . BIND(YEAR(?date) AS ?year) }}"


def _associated_author_path(p: PropertyRegistry, author_var: str, subject: EntityId) -> str:
    """Authors linked to the organization or one of its suborganizations."""
    employer = p.token("employer")
    affiliation = p.token("affiliation")
    part_of = p.token("part-of")
    return f"{author_var} (wdt:{employer}|wdt:{affiliation})/wdt:{part_of}* wd:{subject.text} ."


# ---------------------------------------------------------------------------
# Standalone queries
# ---------------------------------------------------------------------------


def build_count_scientific_articles(
    registry: Optional[PropertyRegistry] = None,
    article_class: EntityId = SCIENTIFIC_ARTICLE_CLASS,
) -> QueryText:
    """Count all items typed as scientific article."""
    p = registry or PropertyRegistry.defaults()
    instance_of = p.token("instance-of")
    return QueryText(
        "select (count(?work) as ?count) where {\n"
        f"  ?work wdt:{instance_of} wd:{article_class.text} . }}"
    )


def build_count_citations(registry: Optional[PropertyRegistry] = None) -> QueryText:
    """Count all citation triples in the graph."""
    p = registry or PropertyRegistry.defaults()
    cites = p.token("cites")
    return QueryText(
        "select (count(?citedwork) as ?count) where {\n"
        f"  ?work wdt:{cites} ?citedwork . }}"
    )


def build_external_resource_query(
    url_prefix: str, registry: Optional[PropertyRegistry] = None
) -> QueryText:
    """Items whose external-data link starts with the given URL prefix."""
    if not _URL_PREFIX_RE.match(url_prefix or ""):
        raise MalformedPrefix(f"not an absolute http(s) URL prefix: {url_prefix!r}")
    p = registry or PropertyRegistry.defaults()
    data_url = p.token("external-data-url")
    return QueryText(
        "select ?item ?resource where {\n"
        f"  ?item wdt:{data_url} ?resource .\n"
        "  filter strstarts(str(?resource),\n"
        f'                   "{url_prefix}") }}'
    )


def build_claims_supported_query(
    work: EntityId,
    registry: Optional[PropertyRegistry] = None,
    language: str = "en",
) -> QueryText:
    """Statements across the graph whose reference chain cites the given work."""
    if not work.is_item:
        raise ScholiaError(f"claims-supported subject must be an item, got {work}")
    p = registry or PropertyRegistry.defaults()
    stated_in = p.token("stated-in")
    return QueryText(
        "SELECT distinct ?item ?itemLabel ?property ?propertyLabel\n"
        "       ?value ?valueLabel WHERE {\n"
        "  ?item ?p ?statement .\n"
        "  ?property wikibase:claim ?p .\n"
        "  ?statement ?a ?value .\n"
        "  ?item ?b ?value .\n"
        "  ?statement prov:wasDerivedFrom/\n"
        f"    <http://www.wikidata.org/prop/reference/{stated_in}>\n"
        f"    wd:{work.text} .\n"
        "  SERVICE wikibase:label {\n"
        f'    bd:serviceParam wikibase:language "{language}" }}\n'
        "} ORDER BY ?itemLabel"
    )


def build_citation_graph_query(
    work: EntityId,
    depth: int = DEFAULT_GRAPH_DEPTH,
    node_cap: int = DEFAULT_NODE_CAP,
    registry: Optional[PropertyRegistry] = None,
    language: str = "en",
) -> QueryText:
    """Citation edges reachable from the work within the given hop bound.

    Bounded-depth traversal: the seed pattern enumerates nodes within
    depth-1 undirected hops, then every citation edge touching a seed node
    is returned.
    """
    if not 1 <= depth <= MAX_GRAPH_DEPTH:
        raise ValueError(f"depth must be within 1..{MAX_GRAPH_DEPTH}, got {depth}")
    if node_cap < 1:
        raise ValueError(f"node_cap must be positive, got {node_cap}")
    p = registry or PropertyRegistry.defaults()
    cites = p.token("cites")
    if depth == 1:
        seed = f"VALUES ?node {{ wd:{work.text} }}"
    else:
        hop = f"((wdt:{cites}|^wdt:{cites}))?"
        path = "/".join([hop] * (depth - 1))
        seed = f"wd:{work.text} {path} ?node ."
    return QueryText(
        "SELECT DISTINCT ?citingWork ?citingWorkLabel ?citedWork ?citedWorkLabel WHERE {\n"
        f"  {seed}\n"
        f"  ?citingWork wdt:{cites} ?citedWork .\n"
        "  FILTER (?citingWork = ?node || ?citedWork = ?node)\n"
        f"  {_label_service(language)}\n"
        "} ORDER BY ?citingWork ?citedWork\n"
        f"LIMIT {node_cap}"
    )


def build_instance_of_query(subject: EntityId, registry: Optional[PropertyRegistry] = None) -> QueryText:
    """Classes the subject is an instance of, for aspect guessing."""
    p = registry or PropertyRegistry.defaults()
    instance_of = p.token("instance-of")
    return QueryText(
        "SELECT ?class WHERE {\n"
        f"  wd:{subject.text} wdt:{instance_of} ?class .\n"
        "} ORDER BY ?class"
    )


def build_external_id_lookup(
    kind: str, value: str, registry: Optional[PropertyRegistry] = None
) -> QueryText:
    """Items carrying the given external identifier value, exact match."""
    if kind not in EXTERNAL_ID_KINDS:
        raise ScholiaError(f"unsupported external identifier kind {kind!r}")
    p = registry or PropertyRegistry.defaults()
    prop = p.token(kind)
    literal = escape_string_literal(value)
    return QueryText(
        "SELECT ?item WHERE {\n"
        f'  ?item wdt:{prop} "{literal}" .\n'
        "} ORDER BY ?item\n"
        "LIMIT 10"
    )


# ---------------------------------------------------------------------------
# Panel builders
# ---------------------------------------------------------------------------

Builder = Callable[[PanelQuerySpec, PropertyRegistry], str]


def _author_works_raw(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    pages = p.token("number-of-pages")
    return (
        "SELECT ?work ?workLabel ?author ?authorLabel ?ordinal ?authorCount ?year ?pages WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  {_author_statement_union(p)}\n"
        f"  {_author_count_subquery(p)}\n"
        f"  {_year_bind(p)}\n"
        f"  OPTIONAL {{ ?work wdt:{pages} ?pages . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?year) ?work ?ordinal ?author\n"
        f"LIMIT {spec.limit}"
    )


def _author_coauthors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    return (
        "SELECT ?coauthor ?coauthorLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{author} ?coauthor .\n"
        f"  FILTER (?coauthor != wd:{spec.subject.text})\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?coauthor ?coauthorLabel\n"
        "ORDER BY DESC(?count) ?coauthor\n"
        f"LIMIT {spec.limit}"
    )


def _author_topics(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    theme = p.token("main-theme")
    return (
        "SELECT ?topic ?topicLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{theme} ?topic .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?topic ?topicLabel\n"
        "ORDER BY DESC(?count) ?topic\n"
        f"LIMIT {spec.limit}"
    )


def _author_venue_stats(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    published_in = p.token("published-in")
    return (
        "SELECT ?venue ?venueLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{published_in} ?venue .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?venue ?venueLabel\n"
        "ORDER BY DESC(?count) ?venue\n"
        f"LIMIT {spec.limit}"
    )


def _author_citations_per_year(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    cites = p.token("cites")
    date = p.token("publication-date")
    return (
        "SELECT ?year (COUNT(?citingWork) AS ?count) WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  ?citingWork wdt:{date} ?date .\n"
        "  BIND(YEAR(?date) AS ?year)\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?year\n"
        "ORDER BY ?year\n"
        f"LIMIT {spec.limit}"
    )


def _author_most_cited_work(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    cites = p.token("cites")
    return (
        "SELECT ?work ?workLabel (COUNT(?citingWork) AS ?count) WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?work ?workLabel\n"
        "ORDER BY DESC(?count) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _author_citing_authors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    cites = p.token("cites")
    return (
        "SELECT ?citingAuthor ?citingAuthorLabel (COUNT(DISTINCT ?citingWork) AS ?count) WHERE {\n"
        f"  ?work wdt:{author} wd:{spec.subject.text} .\n"
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  ?citingWork wdt:{author} ?citingAuthor .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?citingAuthor ?citingAuthorLabel\n"
        "ORDER BY DESC(?count) ?citingAuthor\n"
        f"LIMIT {spec.limit}"
    )


def _author_timeline(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    educated_at = p.token("educated-at")
    employer = p.token("employer")
    start = p.token("start-time")
    end = p.token("end-time")
    return (
        "SELECT ?organization ?organizationLabel ?role ?startDate ?endDate WHERE {\n"
        f"  {{ wd:{spec.subject.text} p:{educated_at} ?statement . "
        f"?statement ps:{educated_at} ?organization .\n"
        '    BIND("education" AS ?role) }\n'
        "  UNION\n"
        f"  {{ wd:{spec.subject.text} p:{employer} ?statement . "
        f"?statement ps:{employer} ?organization .\n"
        '    BIND("employment" AS ?role) }\n'
        f"  OPTIONAL {{ ?statement pq:{start} ?startDate . }}\n"
        f"  OPTIONAL {{ ?statement pq:{end} ?endDate . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?startDate ?organization ?role\n"
        f"LIMIT {spec.limit}"
    )


def _author_locations_map(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    educated_at = p.token("educated-at")
    employer = p.token("employer")
    coordinate = p.token("coordinate-location")
    return (
        "SELECT DISTINCT ?organization ?organizationLabel ?coordinate WHERE {\n"
        f"  wd:{spec.subject.text} (wdt:{educated_at}|wdt:{employer}) ?organization .\n"
        f"  ?organization wdt:{coordinate} ?coordinate .\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?organization\n"
        f"LIMIT {spec.limit}"
    )


def _author_academic_tree(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    advisor = p.token("doctoral-advisor")
    s = spec.subject.text
    return (
        "SELECT DISTINCT ?student ?studentLabel ?advisor ?advisorLabel WHERE {\n"
        f"  {{ wd:{s} wdt:{advisor} ?advisor . BIND(wd:{s} AS ?student) }}\n"
        "  UNION\n"
        f"  {{ wd:{s} wdt:{advisor} ?mid . ?mid wdt:{advisor} ?advisor . BIND(?mid AS ?student) }}\n"
        "  UNION\n"
        f"  {{ ?student wdt:{advisor} wd:{s} . BIND(wd:{s} AS ?advisor) }}\n"
        "  UNION\n"
        f"  {{ ?mid wdt:{advisor} wd:{s} . ?student wdt:{advisor} ?mid . BIND(?mid AS ?advisor) }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?student ?advisor\n"
        f"LIMIT {spec.limit}"
    )


def _work_citations_to(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    cites = p.token("cites")
    date = p.token("publication-date")
    return (
        "SELECT ?citingWork ?citingWorkLabel ?date WHERE {\n"
        f"  ?citingWork wdt:{cites} wd:{spec.subject.text} .\n"
        f"  OPTIONAL {{ ?citingWork wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?citingWork\n"
        f"LIMIT {spec.limit}"
    )


def _work_citations_in(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    cites = p.token("cites")
    date = p.token("publication-date")
    return (
        "SELECT ?citedWork ?citedWorkLabel ?date WHERE {\n"
        f"  wd:{spec.subject.text} wdt:{cites} ?citedWork .\n"
        f"  OPTIONAL {{ ?citedWork wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?citedWork\n"
        f"LIMIT {spec.limit}"
    )


def _work_claims_supported(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    return build_claims_supported_query(spec.subject, p, spec.language).text


def _work_citation_graph(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    return build_citation_graph_query(
        spec.subject,
        depth=DEFAULT_GRAPH_DEPTH,
        node_cap=DEFAULT_NODE_CAP,
        registry=p,
        language=spec.language,
    ).text


def _org_associated_authors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    return (
        "SELECT DISTINCT ?author ?authorLabel WHERE {\n"
        f"  {_associated_author_path(p, '?author', spec.subject)}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?author\n"
        f"LIMIT {spec.limit}"
    )


def _org_recent_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    date = p.token("publication-date")
    return (
        "SELECT DISTINCT ?work ?workLabel ?date WHERE {\n"
        f"  {_associated_author_path(p, '?author', spec.subject)}\n"
        f"  ?work wdt:{author} ?author .\n"
        f"  OPTIONAL {{ ?work wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _org_coauthor_graph(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    return (
        "SELECT ?author1 ?author1Label ?author2 ?author2Label "
        "(COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  {_associated_author_path(p, '?author1', spec.subject)}\n"
        f"  ?work wdt:{author} ?author1 .\n"
        f"  ?work wdt:{author} ?author2 .\n"
        "  FILTER (?author1 != ?author2)\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?author1 ?author1Label ?author2 ?author2Label\n"
        "ORDER BY DESC(?count) ?author1 ?author2\n"
        f"LIMIT {spec.limit}"
    )


def _org_page_production_raw(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    pages = p.token("number-of-pages")
    return (
        "SELECT DISTINCT ?work ?workLabel ?author ?authorLabel ?ordinal "
        "?authorCount ?year ?pages WHERE {\n"
        f"  {_associated_author_path(p, '?associatedAuthor', spec.subject)}\n"
        f"  ?work wdt:{author} ?associatedAuthor .\n"
        f"  {_author_statement_union(p)}\n"
        f"  {_author_count_subquery(p)}\n"
        f"  {_year_bind(p)}\n"
        f"  OPTIONAL {{ ?work wdt:{pages} ?pages . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?year) ?work ?ordinal ?author\n"
        f"LIMIT {spec.limit}"
    )


def _org_conorm_citations_raw(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    name_string = p.token("author-name-string")
    cites = p.token("cites")
    date = p.token("publication-date")
    return (
        "SELECT DISTINCT ?citingWork ?citedWork ?citedAuthor ?citedAuthorLabel "
        "?year ?authorCount WHERE {\n"
        f"  {_associated_author_path(p, '?associatedAuthor', spec.subject)}\n"
        f"  ?citedWork wdt:{author} ?associatedAuthor .\n"
        f"  ?citingWork wdt:{cites} ?citedWork .\n"
        f"  {{ ?citedWork wdt:{author} ?citedAuthor . }} "
        f"UNION {{ ?citedWork wdt:{name_string} ?citedAuthor . }}\n"
        f"  {_author_count_subquery(p, '?citedWork')}\n"
        f"  OPTIONAL {{ ?citingWork wdt:{date} ?date . BIND(YEAR(?date) AS ?year) }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?year) ?citingWork ?citedWork ?citedAuthor\n"
        f"LIMIT {spec.limit}"
    )


def _org_most_cited_affiliated(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    author = p.token("author")
    ordinal = p.token("series-ordinal")
    cites = p.token("cites")
    return (
        "SELECT ?work ?workLabel (COUNT(?citingWork) AS ?count) WHERE {\n"
        f"  {_associated_author_path(p, '?author', spec.subject)}\n"
        f"  ?work p:{author} ?authorStatement .\n"
        f"  ?authorStatement ps:{author} ?author .\n"
        f'  ?authorStatement pq:{ordinal} "1" .\n'
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?work ?workLabel\n"
        "ORDER BY DESC(?count) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _venue_recent_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    date = p.token("publication-date")
    return (
        "SELECT ?work ?workLabel ?date WHERE {\n"
        f"  ?work wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  OPTIONAL {{ ?work wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _venue_topics(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    theme = p.token("main-theme")
    return (
        "SELECT ?topic ?topicLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{theme} ?topic .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?topic ?topicLabel\n"
        "ORDER BY DESC(?count) ?topic\n"
        f"LIMIT {spec.limit}"
    )


def _venue_author_images(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    author = p.token("author")
    image = p.token("image")
    return (
        "SELECT DISTINCT ?author ?authorLabel ?image WHERE {\n"
        f"  ?work wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{author} ?author .\n"
        f"  ?author wdt:{image} ?image .\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?author\n"
        f"LIMIT {spec.limit}"
    )


def _venue_prolific_authors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    author = p.token("author")
    return (
        "SELECT ?author ?authorLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{author} ?author .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?author ?authorLabel\n"
        "ORDER BY DESC(?count) ?author\n"
        f"LIMIT {spec.limit}"
    )


def _venue_most_cited_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    cites = p.token("cites")
    return (
        "SELECT ?work ?workLabel (COUNT(?citingWork) AS ?count) WHERE {\n"
        f"  ?work wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?work ?workLabel\n"
        "ORDER BY DESC(?count) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _venue_most_cited_authors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    author = p.token("author")
    cites = p.token("cites")
    return (
        "SELECT ?author ?authorLabel (COUNT(?citingWork) AS ?count) WHERE {\n"
        f"  ?work wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{author} ?author .\n"
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?author ?authorLabel\n"
        "ORDER BY DESC(?count) ?author\n"
        f"LIMIT {spec.limit}"
    )


def _venue_most_cited_venues(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    published_in = p.token("published-in")
    cites = p.token("cites")
    return (
        "SELECT ?venue ?venueLabel (COUNT(?citedWork) AS ?count) WHERE {\n"
        f"  ?citingWork wdt:{published_in} wd:{spec.subject.text} .\n"
        f"  ?citingWork wdt:{cites} ?citedWork .\n"
        f"  ?citedWork wdt:{published_in} ?venue .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?venue ?venueLabel\n"
        "ORDER BY DESC(?count) ?venue\n"
        f"LIMIT {spec.limit}"
    )


def _series_items(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    series = p.token("series")
    ordinal = p.token("series-ordinal")
    return (
        "SELECT ?item ?itemLabel ?ordinal WHERE {\n"
        f"  ?item p:{series} ?statement .\n"
        f"  ?statement ps:{series} wd:{spec.subject.text} .\n"
        f"  OPTIONAL {{ ?statement pq:{ordinal} ?ordinal . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?ordinal ?item\n"
        f"LIMIT {spec.limit}"
    )


def _series_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    series = p.token("series")
    published_in = p.token("published-in")
    date = p.token("publication-date")
    return (
        "SELECT ?work ?workLabel ?venue ?venueLabel ?date WHERE {\n"
        f"  ?venue wdt:{series} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{published_in} ?venue .\n"
        f"  OPTIONAL {{ ?work wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _publisher_venues_by_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    publisher = p.token("publisher")
    published_in = p.token("published-in")
    return (
        "SELECT ?venue ?venueLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?venue wdt:{publisher} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{published_in} ?venue .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?venue ?venueLabel\n"
        "ORDER BY DESC(?count) ?venue\n"
        f"LIMIT {spec.limit}"
    )


def _publisher_most_cited_papers(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    publisher = p.token("publisher")
    published_in = p.token("published-in")
    cites = p.token("cites")
    return (
        "SELECT ?work ?workLabel (COUNT(?citingWork) AS ?count) WHERE {\n"
        f"  ?venue wdt:{publisher} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{published_in} ?venue .\n"
        f"  ?citingWork wdt:{cites} ?work .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?work ?workLabel\n"
        "ORDER BY DESC(?count) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _publisher_editors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    publisher = p.token("publisher")
    editor = p.token("editor")
    return (
        "SELECT DISTINCT ?editor ?editorLabel ?venue ?venueLabel WHERE {\n"
        f"  ?venue wdt:{publisher} wd:{spec.subject.text} .\n"
        f"  ?venue wdt:{editor} ?editor .\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY ?editor ?venue\n"
        f"LIMIT {spec.limit}"
    )


def _publisher_scatter(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    publisher = p.token("publisher")
    published_in = p.token("published-in")
    cites = p.token("cites")
    return (
        "SELECT ?venue ?venueLabel ?works ?citations WHERE {\n"
        "  { SELECT ?venue (COUNT(DISTINCT ?work) AS ?works) "
        "(COUNT(?citingWork) AS ?citations) WHERE {\n"
        f"      ?venue wdt:{publisher} wd:{spec.subject.text} .\n"
        f"      ?work wdt:{published_in} ?venue .\n"
        f"      OPTIONAL {{ ?citingWork wdt:{cites} ?work . }}\n"
        "    } GROUP BY ?venue }\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?works) ?venue\n"
        f"LIMIT {spec.limit}"
    )


def _sponsor_funded_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    sponsor = p.token("sponsor")
    date = p.token("publication-date")
    return (
        "SELECT ?work ?workLabel ?date WHERE {\n"
        f"  ?work wdt:{sponsor} wd:{spec.subject.text} .\n"
        f"  OPTIONAL {{ ?work wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _sponsor_sponsored_authors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    sponsor = p.token("sponsor")
    author = p.token("author")
    return (
        "SELECT ?author ?authorLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{sponsor} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{author} ?author .\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?author ?authorLabel\n"
        "ORDER BY DESC(?count) ?author\n"
        f"LIMIT {spec.limit}"
    )


def _sponsor_co_sponsors(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    sponsor = p.token("sponsor")
    return (
        "SELECT ?cosponsor ?cosponsorLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{sponsor} wd:{spec.subject.text} .\n"
        f"  ?work wdt:{sponsor} ?cosponsor .\n"
        f"  FILTER (?cosponsor != wd:{spec.subject.text})\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?cosponsor ?cosponsorLabel\n"
        "ORDER BY DESC(?count) ?cosponsor\n"
        f"LIMIT {spec.limit}"
    )


def _topic_recent_works(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    theme = p.token("main-theme")
    subclass = p.token("subclass-of")
    date = p.token("publication-date")
    return (
        "SELECT DISTINCT ?work ?workLabel ?date WHERE {\n"
        f"  ?work wdt:{theme}/wdt:{subclass}* wd:{spec.subject.text} .\n"
        f"  OPTIONAL {{ ?work wdt:{date} ?date . }}\n"
        f"  {_label_service(spec.language)}\n"
        "} ORDER BY DESC(?date) ?work\n"
        f"LIMIT {spec.limit}"
    )


def _topic_co_occurring(spec: PanelQuerySpec, p: PropertyRegistry) -> str:
    theme = p.token("main-theme")
    subclass = p.token("subclass-of")
    return (
        "SELECT ?topic ?topicLabel (COUNT(DISTINCT ?work) AS ?count) WHERE {\n"
        f"  ?work wdt:{theme}/wdt:{subclass}* wd:{spec.subject.text} .\n"
        f"  ?work wdt:{theme} ?topic .\n"
        f"  FILTER (?topic != wd:{spec.subject.text})\n"
        f"  {_label_service(spec.language)}\n"
        "} GROUP BY ?topic ?topicLabel\n"
        "ORDER BY DESC(?count) ?topic\n"
        f"LIMIT {spec.limit}"
    )


# ---------------------------------------------------------------------------
# Panel registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PanelDef:
    """Catalog entry for one panel: identity, display kind, and its builder.

    ``kind`` drives result post-processing and rendering:
    table, year-role-series, year-author-series, year-series, scatter, graph.
    ``columns`` is the SELECT projection, in order. Tier 1 panels are backed
    by full fixture oracles; tier 2 panels are catalogued and
    grammar-checked but their exact content is deployment data dependent.
    """

    aspect: Aspect
    name: str
    tier: int
    kind: str
    columns: Tuple[str, ...]
    description: str
    build: Builder


def _panel(aspect, name, tier, kind, columns, description, build) -> PanelDef:
    return PanelDef(aspect, name, tier, kind, tuple(columns), description, build)


PANELS: Dict[Tuple[Aspect, str], PanelDef] = {
    (d.aspect, d.name): d
    for d in [
        _panel(
            Aspect.AUTHOR, "works-raw", 1, "table",
            ("work", "workLabel", "author", "authorLabel", "ordinal", "authorCount", "year", "pages"),
            "List of publications with author positions",
            _author_works_raw,
        ),
        _panel(
            Aspect.AUTHOR, "works-per-year-by-role", 1, "year-role-series",
            ("work", "workLabel", "author", "authorLabel", "ordinal", "authorCount", "year", "pages"),
            "Publications per year, stacked by first/middle/last/solo role",
            _author_works_raw,
        ),
        _panel(
            Aspect.AUTHOR, "coauthors", 1, "graph",
            ("coauthor", "coauthorLabel", "count"),
            "Co-authors weighted by shared works",
            _author_coauthors,
        ),
        _panel(
            Aspect.AUTHOR, "topics", 1, "table",
            ("topic", "topicLabel", "count"),
            "Main themes of the published works",
            _author_topics,
        ),
        _panel(
            Aspect.AUTHOR, "venue-stats", 1, "table",
            ("venue", "venueLabel", "count"),
            "Venues ranked by number of works",
            _author_venue_stats,
        ),
        _panel(
            Aspect.AUTHOR, "education-employment-timeline", 2, "table",
            ("organization", "organizationLabel", "role", "startDate", "endDate"),
            "Education and employment periods",
            _author_timeline,
        ),
        _panel(
            Aspect.AUTHOR, "locations-map", 2, "table",
            ("organization", "organizationLabel", "coordinate"),
            "Coordinates of associated organizations",
            _author_locations_map,
        ),
        _panel(
            Aspect.AUTHOR, "citations-per-year", 1, "year-series",
            ("year", "count"),
            "Citations received, grouped by citing year",
            _author_citations_per_year,
        ),
        _panel(
            Aspect.AUTHOR, "most-cited-work", 1, "table",
            ("work", "workLabel", "count"),
            "Works ranked by citations received",
            _author_most_cited_work,
        ),
        _panel(
            Aspect.AUTHOR, "citing-authors", 1, "table",
            ("citingAuthor", "citingAuthorLabel", "count"),
            "Authors citing this author's works",
            _author_citing_authors,
        ),
        _panel(
            Aspect.AUTHOR, "academic-tree", 2, "graph",
            ("student", "studentLabel", "advisor", "advisorLabel"),
            "Doctoral advisor/student neighbourhood",
            _author_academic_tree,
        ),
        _panel(
            Aspect.WORK, "citations-to", 1, "table",
            ("citingWork", "citingWorkLabel", "date"),
            "Works citing this work",
            _work_citations_to,
        ),
        _panel(
            Aspect.WORK, "citations-in", 1, "table",
            ("citedWork", "citedWorkLabel", "date"),
            "Works cited by this work",
            _work_citations_in,
        ),
        _panel(
            Aspect.WORK, "claims-supported", 1, "table",
            ("item", "itemLabel", "property", "propertyLabel", "value", "valueLabel"),
            "Statements elsewhere that cite this work as their source",
            _work_claims_supported,
        ),
        _panel(
            Aspect.WORK, "citation-graph", 1, "graph",
            ("citingWork", "citingWorkLabel", "citedWork", "citedWorkLabel"),
            "Citation edges within two hops of this work",
            _work_citation_graph,
        ),
        _panel(
            Aspect.ORGANIZATION, "associated-authors", 1, "table",
            ("author", "authorLabel"),
            "Authors employed by or affiliated with the organization or its parts",
            _org_associated_authors,
        ),
        _panel(
            Aspect.ORGANIZATION, "recent-works", 1, "table",
            ("work", "workLabel", "date"),
            "Recent works by associated authors",
            _org_recent_works,
        ),
        _panel(
            Aspect.ORGANIZATION, "coauthor-graph", 1, "graph",
            ("author1", "author1Label", "author2", "author2Label", "count"),
            "Co-author pairs touching the organization",
            _org_coauthor_graph,
        ),
        _panel(
            Aspect.ORGANIZATION, "page-production-raw", 1, "year-author-series",
            ("work", "workLabel", "author", "authorLabel", "ordinal", "authorCount", "year", "pages"),
            "Pages per year normalized by author count, colored by author",
            _org_page_production_raw,
        ),
        _panel(
            Aspect.ORGANIZATION, "conorm-citations-raw", 1, "year-author-series",
            ("citingWork", "citedWork", "citedAuthor", "citedAuthorLabel", "year", "authorCount"),
            "Citations per year weighted by 1/authors of the cited work",
            _org_conorm_citations_raw,
        ),
        _panel(
            Aspect.ORGANIZATION, "most-cited-affiliated", 1, "table",
            ("work", "workLabel", "count"),
            "Most cited works with an associated first author",
            _org_most_cited_affiliated,
        ),
        _panel(
            Aspect.VENUE, "recent-works", 1, "table",
            ("work", "workLabel", "date"),
            "Recent works published in the venue",
            _venue_recent_works,
        ),
        _panel(
            Aspect.VENUE, "topics", 2, "table",
            ("topic", "topicLabel", "count"),
            "Main themes of works in the venue",
            _venue_topics,
        ),
        _panel(
            Aspect.VENUE, "author-images", 2, "table",
            ("author", "authorLabel", "image"),
            "Images of authors publishing in the venue",
            _venue_author_images,
        ),
        _panel(
            Aspect.VENUE, "prolific-authors", 1, "table",
            ("author", "authorLabel", "count"),
            "Authors with most works in the venue",
            _venue_prolific_authors,
        ),
        _panel(
            Aspect.VENUE, "most-cited-works", 1, "table",
            ("work", "workLabel", "count"),
            "Works in the venue ranked by citations",
            _venue_most_cited_works,
        ),
        _panel(
            Aspect.VENUE, "most-cited-authors", 2, "table",
            ("author", "authorLabel", "count"),
            "Authors in the venue ranked by citations to their venue works",
            _venue_most_cited_authors,
        ),
        _panel(
            Aspect.VENUE, "most-cited-venues", 2, "table",
            ("venue", "venueLabel", "count"),
            "Venues most cited from works in this venue",
            _venue_most_cited_venues,
        ),
        _panel(
            Aspect.SERIES, "items-in-series", 1, "table",
            ("item", "itemLabel", "ordinal"),
            "Venues that are part of the series",
            _series_items,
        ),
        _panel(
            Aspect.SERIES, "works-from-series-venues", 1, "table",
            ("work", "workLabel", "venue", "venueLabel", "date"),
            "Works published in the series' venues",
            _series_works,
        ),
        _panel(
            Aspect.PUBLISHER, "venues-by-works", 1, "table",
            ("venue", "venueLabel", "count"),
            "Venues of the publisher ranked by works",
            _publisher_venues_by_works,
        ),
        _panel(
            Aspect.PUBLISHER, "most-cited-papers", 1, "table",
            ("work", "workLabel", "count"),
            "Most cited works across the publisher's venues",
            _publisher_most_cited_papers,
        ),
        _panel(
            Aspect.PUBLISHER, "editors", 2, "table",
            ("editor", "editorLabel", "venue", "venueLabel"),
            "Editors of the publisher's venues",
            _publisher_editors,
        ),
        _panel(
            Aspect.PUBLISHER, "works-vs-citations-scatter", 1, "scatter",
            ("venue", "venueLabel", "works", "citations"),
            "Works versus citations per venue",
            _publisher_scatter,
        ),
        _panel(
            Aspect.SPONSOR, "funded-works", 1, "table",
            ("work", "workLabel", "date"),
            "Works funded by the sponsor",
            _sponsor_funded_works,
        ),
        _panel(
            Aspect.SPONSOR, "sponsored-authors", 1, "table",
            ("author", "authorLabel", "count"),
            "Authors on funded works",
            _sponsor_sponsored_authors,
        ),
        _panel(
            Aspect.SPONSOR, "co-sponsors", 1, "table",
            ("cosponsor", "cosponsorLabel", "count"),
            "Sponsors co-funding the same works",
            _sponsor_co_sponsors,
        ),
        _panel(
            Aspect.TOPIC, "recent-works", 1, "table",
            ("work", "workLabel", "date"),
            "Recent works on the topic or any subtopic",
            _topic_recent_works,
        ),
        _panel(
            Aspect.TOPIC, "co-occurring-topics", 1, "table",
            ("topic", "topicLabel", "count"),
            "Topics co-occurring on the same works",
            _topic_co_occurring,
        ),
    ]
}


def panels_for(aspect: Aspect) -> List[PanelDef]:
    return [d for (a, _), d in PANELS.items() if a is aspect]


def get_panel(aspect: Aspect, panel: str) -> PanelDef:
    try:
        return PANELS[(aspect, panel)]
    except KeyError:
        raise UnknownPanel(f"no panel {panel!r} for aspect {aspect.value!r}") from None


def build_panel_query(spec: PanelQuerySpec, registry: Optional[PropertyRegistry] = None) -> QueryText:
    """Deterministic SPARQL text for one panel request."""
    definition = get_panel(spec.aspect, spec.panel)
    p = registry or PropertyRegistry.defaults()
    return QueryText(definition.build(spec, p))


def panel_catalog() -> List[dict]:
    """Machine-readable catalog served at /api/panels."""
    entries = []
    for definition in PANELS.values():
        entries.append(
            {
                "aspect": definition.aspect.value,
                "panel": definition.name,
                "tier": definition.tier,
                "kind": definition.kind,
                "columns": list(definition.columns),
                "description": definition.description,
            }
        )
    entries.sort(key=lambda e: (e["aspect"], e["panel"]))
    return entries
