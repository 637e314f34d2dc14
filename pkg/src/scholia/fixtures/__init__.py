"""Versioned test dataset powering the hermetic fixture endpoint.

The dataset is a small scholarly graph stored as line-oriented UTF-8 files:

* ``triples.tsv`` - tab-separated subject / property / object, with two
  optional JSON columns for qualifiers and references. Objects are entity
  ids (``Q42``), JSON-typed literals (``{"type": "time", ...}``) or bare
  strings.
* ``labels.tsv`` / ``descriptions.tsv`` - id, language, text.
* ``sitelinks.tsv`` - id, site, title, intro extract.

Everything is read-only after load and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..errors import ScholiaError
from ..model import EntityId, EntityKind, parse_entity_id

XSD = "http://www.w3.org/2001/XMLSchema#"
WKT_DATATYPE = "http://www.opengis.net/ont/geosparql#wktLiteral"

# Desk-scale caps from the dataset contract.
MAX_WORKS = 100
MAX_AUTHORS = 30
MAX_ORGS_AND_VENUES = 10

WORK_CLASSES = frozenset({"Q13442814", "Q571", "Q580922"})
HUMAN_CLASS = "Q5"
ORG_VENUE_CLASSES = frozenset(
    {"Q3918", "Q31855", "Q4830453", "Q2085381", "Q157031", "Q327333", "Q5633421", "Q1143604"}
)


class FixtureError(ScholiaError):
    """The fixture dataset is malformed or violates its invariants."""


@dataclass(frozen=True)
class StringValue:
    value: str


@dataclass(frozen=True)
class TimeValue:
    value: str  # ISO date, e.g. "2014-09-23"

    @property
    def year(self) -> int:
        return int(self.value[:4])

    @property
    def iso_datetime(self) -> str:
        return f"{self.value}T00:00:00Z"

    @property
    def wikibase_time(self) -> str:
        return f"+{self.value}T00:00:00Z"


@dataclass(frozen=True)
class QuantityValue:
    amount: int


@dataclass(frozen=True)
class MonoText:
    value: str
    language: str = "en"


Value = Union[EntityId, StringValue, TimeValue, QuantityValue, MonoText]


@dataclass(frozen=True)
class Statement:
    subject: EntityId
    property: EntityId
    value: Value
    qualifiers: Tuple[Tuple[EntityId, Value], ...] = ()
    references: Tuple[Tuple[Tuple[EntityId, Value], ...], ...] = ()

    def qualifier(self, prop: EntityId) -> Optional[Value]:
        for key, value in self.qualifiers:
            if key == prop:
                return value
        return None


_ENTITY_RE = re.compile(r"^[QP][1-9][0-9]*$")


def _parse_value(cell: str) -> Value:
    if _ENTITY_RE.match(cell):
        return parse_entity_id(cell)
    if cell.startswith("{"):
        obj = json.loads(cell)
        kind = obj.get("type")
        if kind == "time":
            return TimeValue(obj["value"])
        if kind == "quantity":
            return QuantityValue(int(obj["value"]))
        if kind == "monolingualtext":
            return MonoText(obj["value"], obj.get("language", "en"))
        if kind == "string":
            return StringValue(obj["value"])
        raise FixtureError(f"unknown literal type in {cell!r}")
    return StringValue(cell)


def _parse_value_map(cell: str) -> Tuple[Tuple[EntityId, Value], ...]:
    data = json.loads(cell)
    pairs = []
    for key, raw in data.items():
        value = _parse_value(raw) if isinstance(raw, str) else _parse_value(json.dumps(raw))
        pairs.append((parse_entity_id(key), value))
    return tuple(pairs)


@dataclass
class FixtureDataset:
    """An in-memory scholarly graph with labels, sitelinks and descriptions."""

    statements: List[Statement] = field(default_factory=list)
    labels: Dict[Tuple[str, str], str] = field(default_factory=dict)  # (id, lang) -> text
    descriptions: Dict[Tuple[str, str], str] = field(default_factory=dict)
    sitelinks: Dict[Tuple[str, str], Tuple[str, str]] = field(default_factory=dict)
    # (id, site) -> (title, extract)

    # -- loading -----------------------------------------------------------

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "FixtureDataset":
        directory = Path(directory)
        dataset = cls()
        dataset._read_triples(directory / "triples.tsv")
        dataset._read_text_table(directory / "labels.tsv", dataset.labels)
        dataset._read_text_table(directory / "descriptions.tsv", dataset.descriptions)
        dataset._read_sitelinks(directory / "sitelinks.tsv")
        dataset.validate()
        return dataset

    def _read_triples(self, path: Path) -> None:
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) < 3:
                raise FixtureError(f"{path.name}:{lineno}: expected at least 3 columns")
            try:
                statement = Statement(
                    subject=parse_entity_id(cells[0]),
                    property=parse_entity_id(cells[1]),
                    value=_parse_value(cells[2]),
                    qualifiers=_parse_value_map(cells[3]) if len(cells) > 3 and cells[3] else (),
                    references=tuple(
                        tuple(
                            (parse_entity_id(k), _parse_value(v if isinstance(v, str) else json.dumps(v)))
                            for k, v in ref.items()
                        )
                        for ref in json.loads(cells[4])
                    )
                    if len(cells) > 4 and cells[4]
                    else (),
                )
            except (ScholiaError, ValueError, KeyError) as exc:
                raise FixtureError(f"{path.name}:{lineno}: {exc}") from exc
            self.statements.append(statement)

    def _read_text_table(self, path: Path, target: Dict[Tuple[str, str], str]) -> None:
        if not path.exists():
            return
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 3:
                raise FixtureError(f"{path.name}:{lineno}: expected 3 columns")
            target[(cells[0], cells[1])] = cells[2]

    def _read_sitelinks(self, path: Path) -> None:
        if not path.exists():
            return
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t")
            if len(cells) != 4:
                raise FixtureError(f"{path.name}:{lineno}: expected 4 columns")
            self.sitelinks[(cells[0], cells[1])] = (cells[2], cells[3])

    # -- invariants ---------------------------------------------------------

    def validate(self) -> None:
        """Check desk-scale caps and referential sanity."""
        classes: Dict[str, set] = {}
        for s in self.statements:
            if s.property.text == "P31" and isinstance(s.value, EntityId):
                classes.setdefault(s.subject.text, set()).add(s.value.text)
        works = [i for i, cs in classes.items() if cs & WORK_CLASSES]
        humans = [i for i, cs in classes.items() if HUMAN_CLASS in cs]
        orgs_venues = [i for i, cs in classes.items() if cs & ORG_VENUE_CLASSES]
        if len(works) > MAX_WORKS:
            raise FixtureError(f"{len(works)} works exceed the desk-scale cap {MAX_WORKS}")
        if len(humans) > MAX_AUTHORS:
            raise FixtureError(f"{len(humans)} authors exceed the cap {MAX_AUTHORS}")
        if len(orgs_venues) > MAX_ORGS_AND_VENUES:
            raise FixtureError(
                f"{len(orgs_venues)} organizations/venues exceed the cap {MAX_ORGS_AND_VENUES}"
            )
        for (entity_id, _lang) in self.labels:
            parse_entity_id(entity_id)

    # -- lookups -------------------------------------------------------------

    def label(self, entity: EntityId, language: str = "en") -> Optional[str]:
        return self.labels.get((entity.text, language))

    def label_or_id(self, entity: EntityId, language: str = "en") -> str:
        return self.labels.get((entity.text, language), entity.text)

    def description(self, entity: EntityId, language: str = "en") -> Optional[str]:
        return self.descriptions.get((entity.text, language))

    def known_entities(self) -> List[EntityId]:
        """Every entity id mentioned anywhere in the dataset, deduplicated."""
        seen: Dict[str, EntityId] = {}

        def note(entity: EntityId) -> None:
            seen.setdefault(entity.text, entity)

        for s in self.statements:
            note(s.subject)
            note(s.property)
            if isinstance(s.value, EntityId):
                note(s.value)
            for key, value in s.qualifiers:
                note(key)
                if isinstance(value, EntityId):
                    note(value)
            for reference in s.references:
                for key, value in reference:
                    note(key)
                    if isinstance(value, EntityId):
                        note(value)
        for entity_id, _lang in self.labels:
            note(parse_entity_id(entity_id))
        return sorted(seen.values(), key=lambda e: e.sort_key())

    # -- wikibase JSON -------------------------------------------------------

    def entity_document(self, entity: EntityId) -> Optional[dict]:
        """Full wikibase-style JSON document for one entity, or None."""
        statements = [s for s in self.statements if s.subject == entity]
        labels = {
            lang: {"language": lang, "value": text}
            for (eid, lang), text in self.labels.items()
            if eid == entity.text
        }
        if not statements and not labels:
            return None
        claims: Dict[str, list] = {}
        for s in statements:
            claims.setdefault(s.property.text, []).append(_statement_json(s))
        sitelinks = {
            site: {"site": site, "title": title}
            for (eid, site), (title, _extract) in self.sitelinks.items()
            if eid == entity.text
        }
        return {
            "id": entity.text,
            "type": "item" if entity.kind is EntityKind.ITEM else "property",
            "labels": labels,
            "descriptions": {
                lang: {"language": lang, "value": text}
                for (eid, lang), text in self.descriptions.items()
                if eid == entity.text
            },
            "claims": claims,
            "sitelinks": sitelinks,
        }


def _datavalue(value: Value) -> dict:
    if isinstance(value, EntityId):
        return {
            "value": {
                "entity-type": "item" if value.kind is EntityKind.ITEM else "property",
                "numeric-id": value.number,
                "id": value.text,
            },
            "type": "wikibase-entityid",
        }
    if isinstance(value, StringValue):
        return {"value": value.value, "type": "string"}
    if isinstance(value, TimeValue):
        return {
            "value": {
                "time": value.wikibase_time,
                "timezone": 0,
                "before": 0,
                "after": 0,
                "precision": 11,
                "calendarmodel": "http://www.wikidata.org/entity/Q1985727",
            },
            "type": "time",
        }
    if isinstance(value, QuantityValue):
        return {"value": {"amount": f"+{value.amount}", "unit": "1"}, "type": "quantity"}
    if isinstance(value, MonoText):
        return {
            "value": {"text": value.value, "language": value.language},
            "type": "monolingualtext",
        }
    raise FixtureError(f"cannot serialize value {value!r}")


def _snak(prop: EntityId, value: Value) -> dict:
    return {"snaktype": "value", "property": prop.text, "datavalue": _datavalue(value)}


def _statement_json(statement: Statement) -> dict:
    document = {
        "mainsnak": _snak(statement.property, statement.value),
        "type": "statement",
        "rank": "normal",
    }
    if statement.qualifiers:
        qualifiers: Dict[str, list] = {}
        order = []
        for prop, value in statement.qualifiers:
            qualifiers.setdefault(prop.text, []).append(_snak(prop, value))
            if prop.text not in order:
                order.append(prop.text)
        document["qualifiers"] = qualifiers
        document["qualifiers-order"] = order
    if statement.references:
        refs = []
        for reference in statement.references:
            snaks: Dict[str, list] = {}
            order = []
            for prop, value in reference:
                snaks.setdefault(prop.text, []).append(_snak(prop, value))
                if prop.text not in order:
                    order.append(prop.text)
            refs.append({"snaks": snaks, "snaks-order": order})
        document["references"] = refs
    return document


def default_dataset_dir() -> Path:
    """Directory of the dataset files shipped inside the package."""
    return Path(resources.files(__package__)) / "dataset"


def load_default_dataset() -> FixtureDataset:
    return FixtureDataset.load(default_dataset_dir())
