"""Domain types shared by every other module.

Defines entity identifiers (Q/P ids), the property vocabulary used to build
queries, the eight viewing aspects, work records, and the typed carrier for
SPARQL SELECT results. All types are immutable after construction and safe
to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterator, Mapping, Optional, Sequence, Union

from .errors import ScholiaError

ENTITY_URI_PREFIX = "http://www.wikidata.org/entity/"


class MalformedId(ScholiaError):
    """A string is not a canonical Q/P identifier."""


class UnknownRole(ScholiaError):
    """A property role is not declared in the registry."""


class EntityKind(Enum):
    ITEM = "Q"
    PROPERTY = "P"


_ENTITY_ID_RE = re.compile(r"^([QP])([1-9][0-9]*)$")


@dataclass(frozen=True)
class EntityId:
    """A validated Q/P identifier, the universal key for all lookups.

    The canonical text form is ``Q<number>`` for items and ``P<number>`` for
    properties, with no leading zeros; parsing the canonical form round-trips
    exactly.
    """

    kind: EntityKind
    number: int

    def __post_init__(self) -> None:
        if not isinstance(self.number, int) or self.number < 1:
            raise MalformedId(f"entity number must be a positive integer, got {self.number!r}")

    @property
    def text(self) -> str:
        return f"{self.kind.value}{self.number}"

    @property
    def uri(self) -> str:
        return ENTITY_URI_PREFIX + self.text

    @property
    def is_item(self) -> bool:
        return self.kind is EntityKind.ITEM

    @property
    def is_property(self) -> bool:
        return self.kind is EntityKind.PROPERTY

    def sort_key(self) -> tuple[str, int]:
        return (self.kind.value, self.number)

    def __str__(self) -> str:
        return self.text

    @classmethod
    def parse(cls, text: str) -> "EntityId":
        return parse_entity_id(text)


def parse_entity_id(text: str) -> EntityId:
    """Parse canonical ``Q<number>``/``P<number>`` text into an EntityId.

    Rejects lowercase prefixes, leading zeros, zero itself, and anything
    carrying URL decoration; the accepted language is ``^[QP][1-9][0-9]*$``.
    """
    if not isinstance(text, str):
        raise MalformedId(f"entity id must be a string, got {type(text).__name__}")
    m = _ENTITY_ID_RE.match(text)
    if m is None:
        raise MalformedId(f"not a canonical entity id: {text!r}")
    kind = EntityKind.ITEM if m.group(1) == "Q" else EntityKind.PROPERTY
    return EntityId(kind, int(m.group(2)))


def item(number: int) -> EntityId:
    return EntityId(EntityKind.ITEM, number)


def prop(number: int) -> EntityId:
    return EntityId(EntityKind.PROPERTY, number)


def entity_id_from_uri(uri: str) -> EntityId:
    """Extract the entity id from a concept URI such as ``…/entity/Q42``."""
    return parse_entity_id(uri.rsplit("/", 1)[-1])


class Aspect(Enum):
    """The eight viewing modes an item can be displayed under."""

    AUTHOR = "author"
    WORK = "work"
    ORGANIZATION = "organization"
    VENUE = "venue"
    SERIES = "series"
    PUBLISHER = "publisher"
    SPONSOR = "sponsor"
    TOPIC = "topic"

    @property
    def segment(self) -> str:
        """Unique lowercase URL segment for this aspect."""
        return self.value

    @classmethod
    def from_segment(cls, segment: str) -> "Aspect":
        for aspect in cls:
            if aspect.value == segment:
                return aspect
        raise KeyError(segment)


# Semantic role -> default property id. Only configuration: individual
# deployments (and the test fixtures) may override any entry.
DEFAULT_PROPERTIES: Mapping[str, str] = {
    # core bibliographic graph vocabulary
    "author": "P50",
    "author-name-string": "P2093",
    "published-in": "P1433",
    "publisher": "P123",
    "series": "P179",
    "main-theme": "P921",
    "educated-at": "P69",
    "employer": "P108",
    "affiliation": "P1416",
    "part-of": "P361",
    "sponsor": "P859",
    "cites": "P2860",
    "instance-of": "P31",
    "publication-date": "P577",
    "number-of-pages": "P1104",
    "series-ordinal": "P1545",
    "external-data-url": "P1325",
    "stated-in": "P248",
    "subclass-of": "P279",
    # external identifiers backing the redirect scheme
    "doi": "P356",
    "orcid": "P496",
    "twitter": "P2002",
    "github": "P2037",
    # bibliography fields
    "title": "P1476",
    "volume": "P478",
    "pages": "P304",
    "issue": "P433",
    "full-text-url": "P953",
    # panel extras
    "doctoral-advisor": "P184",
    "image": "P18",
    "coordinate-location": "P625",
    "editor": "P98",
    "start-time": "P580",
    "end-time": "P582",
}


@dataclass(frozen=True)
class PropertyRegistry:
    """Map from semantic role name to the property id that realizes it.

    Lookup is total over the declared role set: asking for an undeclared role
    raises UnknownRole rather than silently returning a default.
    """

    properties: Mapping[str, EntityId]

    def __post_init__(self) -> None:
        for role, pid in self.properties.items():
            if not isinstance(pid, EntityId) or not pid.is_property:
                raise ScholiaError(f"registry role {role!r} must map to a property id, got {pid!r}")
        object.__setattr__(self, "properties", MappingProxyType(dict(self.properties)))

    @classmethod
    def defaults(cls) -> "PropertyRegistry":
        return cls({role: parse_entity_id(p) for role, p in DEFAULT_PROPERTIES.items()})

    def require(self, role: str) -> EntityId:
        try:
            return self.properties[role]
        except KeyError:
            raise UnknownRole(f"no property registered for role {role!r}") from None

    def token(self, role: str) -> str:
        """Bare property token (e.g. ``P50``) for query templating."""
        return self.require(role).text

    def override(self, overrides: Mapping[str, Union[str, EntityId]]) -> "PropertyRegistry":
        """Return a new registry with some roles replaced."""
        merged = dict(self.properties)
        for role, value in overrides.items():
            merged[role] = value if isinstance(value, EntityId) else parse_entity_id(value)
        return PropertyRegistry(merged)

    def roles(self) -> Sequence[str]:
        return tuple(self.properties)


AuthorKey = Union[EntityId, str]


@dataclass(frozen=True)
class AuthorEntry:
    """One author position on a work: a resolved item or a plain name string."""

    author: AuthorKey
    ordinal: Optional[int] = None

    def __post_init__(self) -> None:
        if self.ordinal is not None and self.ordinal < 1:
            raise ScholiaError(f"author ordinal must be positive, got {self.ordinal}")


@dataclass(frozen=True)
class WorkRecord:
    """One scholarly work, the input to all client-side statistics."""

    work: EntityId
    title: str = ""
    authors: tuple[AuthorEntry, ...] = ()
    venue: Optional[EntityId] = None
    publication_year: Optional[int] = None
    pages: Optional[int] = None
    cited_works: tuple[EntityId, ...] = ()
    instance_of: tuple[EntityId, ...] = ()

    def __post_init__(self) -> None:
        ordinals = [a.ordinal for a in self.authors if a.ordinal is not None]
        if len(ordinals) != len(set(ordinals)):
            raise ScholiaError(f"duplicate author ordinals on {self.work}: {sorted(ordinals)}")
        if self.pages is not None and self.pages < 1:
            raise ScholiaError(f"page count must be >= 1, got {self.pages}")

    @property
    def author_count(self) -> int:
        return len(self.authors)

    def ordinal_of(self, author: EntityId) -> Optional[int]:
        """Ordinal of the given item author, or None if absent/unordered."""
        for entry in self.authors:
            if entry.author == author:
                return entry.ordinal
        return None

    def has_author(self, author: EntityId) -> bool:
        return any(entry.author == author for entry in self.authors)


@dataclass(frozen=True)
class Term:
    """One typed RDF term from a SPARQL JSON results binding."""

    kind: str  # "uri" | "literal" | "bnode"
    value: str
    datatype: Optional[str] = None
    lang: Optional[str] = None

    @property
    def is_uri(self) -> bool:
        return self.kind == "uri"

    def entity_id(self) -> EntityId:
        """The entity id this term denotes; raises MalformedId otherwise."""
        if self.kind == "uri":
            return entity_id_from_uri(self.value)
        return parse_entity_id(self.value)

    def maybe_entity_id(self) -> Optional[EntityId]:
        try:
            return self.entity_id()
        except MalformedId:
            return None

    def as_int(self) -> int:
        return int(float(self.value))

    def as_float(self) -> float:
        return float(self.value)

    def as_year(self) -> int:
        """Year component of an integer or xsd:dateTime-shaped value."""
        text = self.value.lstrip("+-")
        return int(text[:4]) if "-" in text[1:] else int(float(text))

    def to_json(self) -> dict:
        out: dict = {"type": self.kind, "value": self.value}
        if self.datatype is not None:
            out["datatype"] = self.datatype
        if self.lang is not None:
            out["xml:lang"] = self.lang
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "Term":
        return cls(
            kind=obj["type"],
            value=obj["value"],
            datatype=obj.get("datatype"),
            lang=obj.get("xml:lang"),
        )


@dataclass(frozen=True)
class ResultSet:
    """Parsed SPARQL SELECT results: variable names plus typed rows.

    Each row maps a subset of the declared variables to terms; unbound
    variables are simply absent from the row map.
    """

    variables: tuple[str, ...]
    rows: tuple[Mapping[str, Term], ...] = ()

    def __post_init__(self) -> None:
        declared = set(self.variables)
        for i, row in enumerate(self.rows):
            extra = set(row) - declared
            if extra:
                raise ScholiaError(f"row {i} binds undeclared variables: {sorted(extra)}")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[Mapping[str, Term]]:
        return iter(self.rows)

    def column(self, name: str) -> Iterator[Term]:
        """Bound terms of one variable, skipping rows where it is unbound."""
        for row in self.rows:
            if name in row:
                yield row[name]

    def single_int(self) -> int:
        """Value of a one-row, one-variable aggregate such as a count."""
        if len(self.rows) != 1:
            raise ScholiaError(f"expected exactly one result row, got {len(self.rows)}")
        return self.rows[0][self.variables[0]].as_int()

    def to_sparql_json(self) -> dict:
        return {
            "head": {"vars": list(self.variables)},
            "results": {
                "bindings": [
                    {name: term.to_json() for name, term in row.items()} for row in self.rows
                ]
            },
        }
