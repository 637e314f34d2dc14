"""Syntactic checker for the SPARQL 1.1 SELECT queries this package emits.

Implements the relevant productions of the SPARQL 1.1 grammar (SelectQuery,
GroupGraphPattern, property paths, FILTER/BIND/VALUES/SERVICE, aggregates,
solution modifiers) with pyparsing. It is a validity gate, not an engine:
queries are checked for well-formedness and for use of undeclared prefixes,
nothing is evaluated. CONSTRUCT/ASK/DESCRIBE and updates are out of scope
because no code path generates them.
"""

from __future__ import annotations

import re

import pyparsing as pp

from .errors import ScholiaError

# Prefixes a Wikidata-style endpoint declares implicitly; queries may use
# them without a PREFIX line.
WELL_KNOWN_PREFIXES = frozenset(
    {
        "wd", "wdt", "p", "ps", "pq", "psv", "pr", "prov", "wikibase", "bd",
        "rdf", "rdfs", "xsd", "schema", "skos", "owl", "geo", "geof", "hint",
        "mwapi", "gas",
    }
)


class SparqlSyntaxError(ScholiaError):
    """A generated query failed the SPARQL 1.1 grammar check."""


def _kw(word: str) -> pp.ParserElement:
    return pp.CaselessKeyword(word)


def _build_grammar() -> pp.ParserElement:
    ppu = pp.pyparsing_unicode

    # --- terminals -------------------------------------------------------
    PN_CHARS = pp.alphanums + "_" + ppu.Latin1.alphas
    var = pp.Combine(pp.one_of("? $") + pp.Word(PN_CHARS)).set_name("var")
    iriref = pp.QuotedString("<", end_quote_char=">", unquote_results=False).set_name("iriref")

    prefix_name = pp.Word(pp.alphas, pp.alphanums + "_-")
    pname_local = pp.Word(PN_CHARS, PN_CHARS + "-.", as_keyword=False)
    pname = pp.Combine(prefix_name + ":" + pname_local).set_name("pname")
    pname_ns = pp.Combine(prefix_name + ":")  # e.g. in PREFIX declarations
    iri = iriref | pname

    string_lit = (
        pp.QuotedString('"', esc_char="\\", unquote_results=False)
        | pp.QuotedString("'", esc_char="\\", unquote_results=False)
    )
    lang_or_dt = pp.Optional(
        pp.Combine("@" + pp.Word(pp.alphas + "-")) | pp.Combine("^^" + (iriref | pname))
    )
    rdf_literal = pp.Combine(string_lit + lang_or_dt)
    numeric = pp.pyparsing_common.fnumber
    boolean = _kw("true") | _kw("false")
    literal = rdf_literal | numeric | boolean

    # --- forward declarations ---------------------------------------------
    expression = pp.Forward()
    group_graph_pattern = pp.Forward()

    # --- expressions -------------------------------------------------------
    separator_clause = pp.Suppress(";") + _kw("SEPARATOR") + pp.Suppress("=") + string_lit
    arg_list = pp.Optional(
        pp.Optional(_kw("DISTINCT"))
        + pp.Optional(pp.DelimitedList(expression))
        + pp.Optional(separator_clause)
    )
    builtin_name = pp.one_of(
        """STR LANG LANGMATCHES DATATYPE BOUND IRI URI BNODE RAND ABS CEIL
        FLOOR ROUND CONCAT SUBSTR STRLEN REPLACE UCASE LCASE ENCODE_FOR_URI
        CONTAINS STRSTARTS STRENDS STRBEFORE STRAFTER YEAR MONTH DAY HOURS
        MINUTES SECONDS TIMEZONE TZ NOW UUID STRUUID MD5 SHA1 SHA256 SHA384
        SHA512 COALESCE IF STRLANG STRDT sameTerm isIRI isURI isBLANK
        isLITERAL isNUMERIC REGEX EXISTS COUNT SUM MIN MAX AVG SAMPLE
        GROUP_CONCAT""",
        caseless=True,
        as_keyword=True,
    )
    star = pp.Literal("*")
    builtin_call = pp.Group(
        builtin_name + pp.Suppress("(") + (star | arg_list) + pp.Suppress(")")
    ) | pp.Group((_kw("EXISTS") | _kw("NOT") + _kw("EXISTS")) + group_graph_pattern)
    function_call = pp.Group(iri + pp.Suppress("(") + arg_list + pp.Suppress(")"))

    bracketted = pp.Suppress("(") + expression + pp.Suppress(")")
    primary = bracketted | builtin_call | function_call | literal | var | iri
    unary = pp.Optional(pp.one_of("! + -")) + primary
    multiplicative = unary + pp.ZeroOrMore(pp.one_of("* /") + unary)
    additive = multiplicative + pp.ZeroOrMore(pp.one_of("+ -") + multiplicative)
    in_list = pp.Suppress("(") + pp.Optional(pp.DelimitedList(expression)) + pp.Suppress(")")
    relational = additive + pp.Optional(
        (pp.one_of("!= <= >= = < >") + additive)
        | (_kw("NOT") + _kw("IN") + in_list)
        | (_kw("IN") + in_list)
    )
    conditional_and = relational + pp.ZeroOrMore("&&" + relational)
    expression <<= conditional_and + pp.ZeroOrMore("||" + conditional_and)

    # --- property paths -----------------------------------------------------
    # A bare "?" is a path modifier only when it does not start a variable
    # (the SPARQL tokenizer resolves this by longest match on VAR1).
    path_mod = pp.Regex(r"(\?(?![\w?$])|\*|\+)")
    path = pp.Forward()
    path_primary = _kw("a") | iri | pp.Group(pp.Suppress("(") + path + pp.Suppress(")"))
    path_elt = path_primary + pp.Optional(path_mod)
    path_elt_or_inverse = pp.Optional("^") + path_elt
    path_sequence = pp.DelimitedList(path_elt_or_inverse, delim="/")
    path <<= pp.DelimitedList(path_sequence, delim="|")

    # --- triple patterns -----------------------------------------------------
    graph_term = iri | literal | var
    verb = path | var
    object_list = pp.DelimitedList(graph_term, delim=",")
    property_list = pp.DelimitedList(pp.Group(verb + object_list), delim=";")
    triples_same_subject = pp.Group(graph_term + property_list)

    # --- graph patterns ------------------------------------------------------
    filter_ = pp.Group(_kw("FILTER") + (bracketted | builtin_call | function_call))
    bind = pp.Group(
        _kw("BIND") + pp.Suppress("(") + expression + _kw("AS") + var + pp.Suppress(")")
    )
    data_block_value = iri | literal | _kw("UNDEF")
    values = pp.Group(
        _kw("VALUES")
        + (
            var + pp.Suppress("{") + pp.ZeroOrMore(data_block_value) + pp.Suppress("}")
            | pp.Suppress("(") + pp.OneOrMore(var) + pp.Suppress(")")
            + pp.Suppress("{")
            + pp.ZeroOrMore(pp.Suppress("(") + pp.OneOrMore(data_block_value) + pp.Suppress(")"))
            + pp.Suppress("}")
        )
    )
    optional_ = pp.Group(_kw("OPTIONAL") + group_graph_pattern)
    minus = pp.Group(_kw("MINUS") + group_graph_pattern)
    graph_ = pp.Group(_kw("GRAPH") + (var | iri) + group_graph_pattern)
    service = pp.Group(_kw("SERVICE") + pp.Optional(_kw("SILENT")) + (var | iri) + group_graph_pattern)
    union = group_graph_pattern + pp.ZeroOrMore(_kw("UNION") + group_graph_pattern)
    not_triples = optional_ | minus | graph_ | service | filter_ | bind | values | union

    select_query = pp.Forward()
    pattern_element = (not_triples | triples_same_subject) + pp.Optional(pp.Suppress("."))
    group_graph_pattern <<= pp.Group(
        pp.Suppress("{") + (select_query | pp.ZeroOrMore(pattern_element)) + pp.Suppress("}")
    )

    # --- select query ---------------------------------------------------------
    as_binding = pp.Group(pp.Suppress("(") + expression + _kw("AS") + var + pp.Suppress(")"))
    select_clause = (
        _kw("SELECT")
        + pp.Optional(_kw("DISTINCT") | _kw("REDUCED"))
        + (star | pp.OneOrMore(as_binding | var))
    )
    where_clause = pp.Optional(_kw("WHERE")) + group_graph_pattern
    group_condition = as_binding | builtin_call | function_call | var
    group_clause = _kw("GROUP") + _kw("BY") + pp.OneOrMore(group_condition)
    having_clause = _kw("HAVING") + pp.OneOrMore(bracketted | builtin_call | function_call)
    order_condition = (
        pp.Group((_kw("ASC") | _kw("DESC")) + bracketted) | var | bracketted | builtin_call
    )
    order_clause = _kw("ORDER") + _kw("BY") + pp.OneOrMore(order_condition)
    limit = _kw("LIMIT") + pp.pyparsing_common.integer
    offset = _kw("OFFSET") + pp.pyparsing_common.integer
    solution_modifier = (
        pp.Optional(group_clause)
        + pp.Optional(having_clause)
        + pp.Optional(order_clause)
        + pp.Optional(limit + pp.Optional(offset) | offset + pp.Optional(limit))
    )
    select_query <<= select_clause + where_clause + solution_modifier

    prologue = pp.ZeroOrMore(
        pp.Group(_kw("PREFIX") + pname_ns + iriref) | pp.Group(_kw("BASE") + iriref)
    )
    query_unit = prologue + select_query
    query_unit.ignore(pp.Regex(r"#[^\n]*"))
    return query_unit


_GRAMMAR = _build_grammar()

_STRIP_RE = re.compile(r'<[^>]*>|"(?:[^"\\]|\\.)*"|\'(?:[^\'\\]|\\.)*\'|#[^\n]*')
_PNAME_RE = re.compile(r"\b([A-Za-z][\w-]*):")
_DECL_RE = re.compile(r"(?i)\bPREFIX\s+([A-Za-z][\w-]*):")


def _used_prefixes(text: str) -> set[str]:
    """Namespace prefixes appearing in the query, IRIs and strings excluded."""
    stripped = _STRIP_RE.sub(" ", text)
    return set(_PNAME_RE.findall(stripped))


def check_query(text: str, extra_prefixes: frozenset[str] = frozenset()) -> None:
    """Validate one SELECT query; raise SparqlSyntaxError if it is not legal.

    Prefixed names must use a prefix that is declared in the query or well
    known on the target endpoint (or passed in ``extra_prefixes``).
    """
    if not text or not text.strip():
        raise SparqlSyntaxError("empty query")
    try:
        _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise SparqlSyntaxError(
            f"line {exc.lineno}, col {exc.col}: {exc.msg}\n{exc.line}"
        ) from exc

    declared = set(_DECL_RE.findall(text))
    allowed = WELL_KNOWN_PREFIXES | declared | extra_prefixes
    unknown = _used_prefixes(text) - allowed
    if unknown:
        raise SparqlSyntaxError(f"undeclared prefixes: {sorted(unknown)}")


def is_valid_query(text: str) -> bool:
    try:
        check_query(text)
        return True
    except SparqlSyntaxError:
        return False
