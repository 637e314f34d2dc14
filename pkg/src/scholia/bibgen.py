"""BibTeX generation driven by LaTeX .aux files.

The pipeline: scan the aux file for \\citation{Q...} keys, fetch each cited
item from the entity API, map its claims onto BibTeX fields and write a
UTF-8 .bib file that standard bibtex can consume. A grammar-faithful BibTeX
reader lives here too, both for round-trip checks and so generated files can
be verified without an external parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import ScholiaError
from .entity_api import EntityApiClient
from .model import EntityId, PropertyRegistry, parse_entity_id

ENTRY_FIELD_ORDER = ("title", "author", "journal", "volume", "number", "pages", "year", "doi", "url")

# Classes that pick the BibTeX entry type; anything else becomes @misc.
ARTICLE_CLASS = "Q13442814"
BOOK_CLASS = "Q571"

_CITATION_RE = re.compile(r"\\citation\{([^}]*)\}")
_ESCAPES = (("&", r"\&"), ("%", r"\%"), ("#", r"\#"), ("_", r"\_"))


class EntityNotFound(ScholiaError):
    """The cited item does not exist on the entity API."""


class IoError(ScholiaError):
    """Reading the aux file or writing the bib file failed."""


class BibParseError(ScholiaError):
    """The BibTeX text violates the entry grammar."""


@dataclass(frozen=True)
class BibEntry:
    """One bibliography entry: type, cite key and ordered field map."""

    entry_type: str  # "article" | "book" | "misc"
    cite_key: str
    fields: Tuple[Tuple[str, str], ...]

    def __post_init__(self) -> None:
        key = parse_entity_id(self.cite_key)
        if not key.is_item:
            raise ScholiaError(f"cite key must be an item id, got {self.cite_key}")

    def get(self, name: str) -> Optional[str]:
        for field_name, value in self.fields:
            if field_name == name:
                return value
        return None


@dataclass
class BibReport:
    written: int = 0
    skipped: List[str] = field(default_factory=list)
    failures: List[Tuple[str, str]] = field(default_factory=list)


def parse_aux(content: str) -> Tuple[List[EntityId], List[str]]:
    """Item ids cited in aux content, first-occurrence order, deduplicated.

    Keys that do not match the item-id pattern are collected separately as
    skipped; malformed lines are simply ignored.
    """
    ids: List[EntityId] = []
    skipped: List[str] = []
    seen_ids = set()
    seen_skipped = set()
    for match in _CITATION_RE.finditer(content):
        for key in match.group(1).split(","):
            key = key.strip()
            if not key:
                continue
            try:
                entity = parse_entity_id(key)
            except ScholiaError:
                entity = None
            if entity is not None and entity.is_item:
                if entity not in seen_ids:
                    seen_ids.add(entity)
                    ids.append(entity)
            elif key not in seen_skipped:
                seen_skipped.add(key)
                skipped.append(key)
    return ids, skipped


# ---------------------------------------------------------------------------
# Entity JSON -> BibEntry
# ---------------------------------------------------------------------------


def _claims(entity: dict, prop: str) -> List[dict]:
    return entity.get("claims", {}).get(prop, [])


def _main_value(claim: dict):
    return claim.get("mainsnak", {}).get("datavalue", {}).get("value")


def _first_string(entity: dict, prop: str) -> Optional[str]:
    for claim in _claims(entity, prop):
        value = _main_value(claim)
        if isinstance(value, str):
            return value
    return None


def _first_monotext(entity: dict, prop: str) -> Optional[str]:
    for claim in _claims(entity, prop):
        value = _main_value(claim)
        if isinstance(value, dict) and "text" in value:
            return value["text"]
    return None


def _first_year(entity: dict, prop: str) -> Optional[int]:
    for claim in _claims(entity, prop):
        value = _main_value(claim)
        if isinstance(value, dict) and "time" in value:
            text = value["time"].lstrip("+-")
            return int(text[:4])
    return None


def _entity_values(entity: dict, prop: str) -> List[EntityId]:
    out = []
    for claim in _claims(entity, prop):
        value = _main_value(claim)
        if isinstance(value, dict) and "id" in value:
            out.append(parse_entity_id(value["id"]))
    return out


def _ordinal_of(claim: dict, ordinal_prop: str) -> Optional[int]:
    for snak in claim.get("qualifiers", {}).get(ordinal_prop, []):
        value = snak.get("datavalue", {}).get("value")
        if isinstance(value, str) and value.isdigit():
            return int(value)
    return None


def _ordered_authors(
    entity: dict, registry: PropertyRegistry, labels: Dict[EntityId, str]
) -> List[str]:
    """Author names sorted by series ordinal; unordered ones keep claim order."""
    author_prop = registry.token("author")
    name_prop = registry.token("author-name-string")
    ordinal_prop = registry.token("series-ordinal")
    entries: List[Tuple[Optional[int], int, str]] = []
    position = 0
    for claim in _claims(entity, author_prop):
        value = _main_value(claim)
        if isinstance(value, dict) and "id" in value:
            author = parse_entity_id(value["id"])
            name = labels.get(author, author.text)
            entries.append((_ordinal_of(claim, ordinal_prop), position, name))
            position += 1
    for claim in _claims(entity, name_prop):
        value = _main_value(claim)
        if isinstance(value, str):
            entries.append((_ordinal_of(claim, ordinal_prop), position, value))
            position += 1
    entries.sort(key=lambda e: (0, e[0]) if e[0] is not None else (1, e[1]))
    return [name for _ordinal, _position, name in entries]


def fetch_entry(
    entity: EntityId,
    client: EntityApiClient,
    registry: Optional[PropertyRegistry] = None,
) -> BibEntry:
    """Build the BibTeX entry for one cited item."""
    registry = registry or PropertyRegistry.defaults()
    documents = client.fetch_entities([entity])
    if entity not in documents:
        raise EntityNotFound(f"no entity {entity.text} on the API")
    document = documents[entity]

    classes = {e.text for e in _entity_values(document, registry.token("instance-of"))}
    if ARTICLE_CLASS in classes:
        entry_type = "article"
    elif BOOK_CLASS in classes:
        entry_type = "book"
    else:
        entry_type = "misc"

    # Resolve labels for nested items (authors, venue) in one batch.
    nested = _entity_values(document, registry.token("author"))
    venues = _entity_values(document, registry.token("published-in"))
    nested.extend(venues)
    labels = client.fetch_labels(nested) if nested else {}

    title = _first_monotext(document, registry.token("title"))
    if title is None:
        title = document.get("labels", {}).get("en", {}).get("value")
    authors = _ordered_authors(document, registry, labels)
    year = _first_year(document, registry.token("publication-date"))

    values = {
        "title": title,
        "author": " and ".join(authors) if authors else None,
        "journal": labels.get(venues[0]) if venues else None,
        "volume": _first_string(document, registry.token("volume")),
        "number": _first_string(document, registry.token("issue")),
        "pages": _first_string(document, registry.token("pages")),
        "year": str(year) if year is not None else None,
        "doi": _first_string(document, registry.token("doi")),
        "url": _first_string(document, registry.token("full-text-url")),
    }
    fields = tuple(
        (name, values[name]) for name in ENTRY_FIELD_ORDER if values[name] is not None
    )
    return BibEntry(entry_type=entry_type, cite_key=entity.text, fields=fields)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def escape_field_value(value: str) -> str:
    for char, escaped in _ESCAPES:
        value = value.replace(char, escaped)
    return value


def unescape_field_value(value: str) -> str:
    for char, escaped in _ESCAPES:
        value = value.replace(escaped, char)
    return value


def format_bibtex(entry: BibEntry) -> str:
    lines = [f"@{entry.entry_type}{{{entry.cite_key},"]
    for name, value in entry.fields:
        lines.append(f"  {name} = {{{escape_field_value(value)}}},")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_bibliography(entries: Sequence[BibEntry]) -> str:
    return "\n".join(format_bibtex(entry) for entry in entries)


# ---------------------------------------------------------------------------
# BibTeX reading (grammar check + round trips)
# ---------------------------------------------------------------------------


class _BibReader:
    """Recursive-descent reader for the BibTeX entry grammar.

    Supports @type{key, name = value, ...} with brace-balanced or quoted
    values, numbers, macro names and # concatenation, plus @string/@comment/
    @preamble blocks. Text outside entries is ignored, as bibtex does.
    """

    def __init__(self, text: str):
        self.text = text
        self.position = 0
        self.macros: Dict[str, str] = {}

    def error(self, message: str) -> BibParseError:
        line = self.text.count("\n", 0, self.position) + 1
        return BibParseError(f"line {line}: {message}")

    def eof(self) -> bool:
        return self.position >= len(self.text)

    def skip_ws(self) -> None:
        while not self.eof() and self.text[self.position].isspace():
            self.position += 1

    def expect(self, char: str) -> None:
        self.skip_ws()
        if self.eof() or self.text[self.position] != char:
            found = "end of input" if self.eof() else repr(self.text[self.position])
            raise self.error(f"expected {char!r}, found {found}")
        self.position += 1

    def name(self) -> str:
        self.skip_ws()
        start = self.position
        while not self.eof() and (self.text[self.position].isalnum() or self.text[self.position] in "-_.:+/"):
            self.position += 1
        if start == self.position:
            raise self.error("expected a name")
        return self.text[start : self.position]

    def braced(self) -> str:
        """A {...} group with balanced inner braces; returns inner text."""
        self.expect("{")
        depth = 1
        start = self.position
        while not self.eof():
            char = self.text[self.position]
            if char == "\\" and self.position + 1 < len(self.text):
                self.position += 2
                continue
            if char == "{":
                depth += 1
            elif char == "}":
                depth -= 1
                if depth == 0:
                    inner = self.text[start : self.position]
                    self.position += 1
                    return inner
            self.position += 1
        raise self.error("unterminated brace group")

    def quoted(self) -> str:
        self.expect('"')
        depth = 0
        start = self.position
        while not self.eof():
            char = self.text[self.position]
            if char == "{":
                depth += 1
            elif char == "}":
                depth -= 1
            elif char == '"' and depth == 0:
                inner = self.text[start : self.position]
                self.position += 1
                return inner
            self.position += 1
        raise self.error("unterminated quoted string")

    def value(self) -> str:
        """Simple value: braced, quoted, number or macro, with # concatenation."""
        parts = []
        while True:
            self.skip_ws()
            if self.eof():
                raise self.error("expected a field value")
            char = self.text[self.position]
            if char == "{":
                parts.append(self.braced())
            elif char == '"':
                parts.append(self.quoted())
            elif char.isdigit():
                start = self.position
                while not self.eof() and self.text[self.position].isdigit():
                    self.position += 1
                parts.append(self.text[start : self.position])
            else:
                macro = self.name()
                if macro.lower() not in self.macros:
                    raise self.error(f"undefined string macro {macro!r}")
                parts.append(self.macros[macro.lower()])
            self.skip_ws()
            if not self.eof() and self.text[self.position] == "#":
                self.position += 1
                continue
            return "".join(parts)

    def entry_body(self, entry_type: str) -> Optional[BibEntry]:
        self.expect("{")
        if entry_type in ("comment", "preamble"):
            # consume until the matching close brace
            self.position -= 1
            self.braced()
            return None
        if entry_type == "string":
            macro = self.name()
            self.expect("=")
            self.macros[macro.lower()] = self.value()
            self.expect("}")
            return None
        self.skip_ws()
        start = self.position
        while not self.eof() and self.text[self.position] not in ",}":
            self.position += 1
        key = self.text[start : self.position].strip()
        if not key:
            raise self.error("entry has no cite key")
        fields: List[Tuple[str, str]] = []
        while True:
            self.skip_ws()
            if self.eof():
                raise self.error("unterminated entry")
            if self.text[self.position] == "}":
                self.position += 1
                break
            self.expect(",")
            self.skip_ws()
            if not self.eof() and self.text[self.position] == "}":
                self.position += 1
                break
            field_name = self.name().lower()
            self.expect("=")
            fields.append((field_name, self.value()))
        return BibEntry(entry_type=entry_type, cite_key=key, fields=tuple(fields))

    def entries(self) -> List[BibEntry]:
        out = []
        while True:
            at = self.text.find("@", self.position)
            if at < 0:
                return out
            self.position = at + 1
            entry_type = self.name().lower()
            entry = self.entry_body(entry_type)
            if entry is not None:
                out.append(entry)


def parse_bibtex(text: str) -> List[BibEntry]:
    """Parse BibTeX text; raises BibParseError when the grammar is violated.

    Field values are returned as written (the writer's escapes intact);
    unescape_field_value inverts them.
    """
    return _BibReader(text).entries()


# ---------------------------------------------------------------------------
# Workflow
# ---------------------------------------------------------------------------


def write_bib_from_aux(
    aux_path: Union[str, Path],
    out_path: Union[str, Path, None] = None,
    client: Optional[EntityApiClient] = None,
    registry: Optional[PropertyRegistry] = None,
) -> BibReport:
    """The aux-to-bib workflow: one entry per resolvable key, in aux order.

    Individual fetch failures are reported but never abort the remaining
    entries. The default output path swaps the .aux suffix for .bib.
    """
    aux_path = Path(aux_path)
    out_path = Path(out_path) if out_path is not None else aux_path.with_suffix(".bib")
    client = client or EntityApiClient()
    try:
        content = aux_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {aux_path}: {exc}") from exc

    ids, skipped = parse_aux(content)
    report = BibReport(skipped=skipped)
    entries: List[BibEntry] = []
    for entity in ids:
        try:
            entries.append(fetch_entry(entity, client, registry))
        except ScholiaError as exc:
            report.failures.append((entity.text, str(exc)))
    report.written = len(entries)
    try:
        out_path.write_text(format_bibliography(entries), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise IoError(f"cannot write {out_path}: {exc}") from exc
    return report
