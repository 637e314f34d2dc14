"""Aspect guessing and external-identifier resolution.

Bare item ids are redirected to their most relevant aspect by looking at the
item's classes; /twitter/<name> style paths resolve through an exact-match
query on the corresponding identifier property. The rule table is plain
configuration so deployments can extend it without code changes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Set

from .errors import ScholiaError
from .model import Aspect, EntityId, PropertyRegistry, parse_entity_id
from .queries import EXTERNAL_ID_KINDS, build_external_id_lookup, build_instance_of_query
from .sparql_client import SparqlClient


class NotFound(ScholiaError):
    """No item carries the requested external identifier."""

    def __init__(self, kind: str, value: str):
        super().__init__(f"no item with {kind} identifier {value!r}")
        self.kind = kind
        self.value = value


class Ambiguous(ScholiaError):
    """Several items carry the requested external identifier."""

    def __init__(self, kind: str, value: str, candidates: Sequence[EntityId]):
        ids = ", ".join(c.text for c in candidates)
        super().__init__(f"{kind} identifier {value!r} is ambiguous: {ids}")
        self.kind = kind
        self.value = value
        self.candidates = tuple(candidates)


@dataclass(frozen=True)
class AspectRule:
    """Maps one instance-of class to an aspect; higher priority wins."""

    entity_class: EntityId
    aspect: Aspect
    priority: int


# Extrapolated from the example items each aspect is meant to display;
# only human -> author is forced by the redirect behaviour itself.
DEFAULT_RULES: tuple[AspectRule, ...] = (
    AspectRule(parse_entity_id("Q5"), Aspect.AUTHOR, 100),  # human
    AspectRule(parse_entity_id("Q13442814"), Aspect.WORK, 95),  # scientific article
    AspectRule(parse_entity_id("Q571"), Aspect.WORK, 90),  # book
    AspectRule(parse_entity_id("Q580922"), Aspect.WORK, 85),  # preprint
    AspectRule(parse_entity_id("Q5633421"), Aspect.VENUE, 80),  # scientific journal
    AspectRule(parse_entity_id("Q1143604"), Aspect.VENUE, 75),  # proceedings
    AspectRule(parse_entity_id("Q3918"), Aspect.ORGANIZATION, 70),  # university
    AspectRule(parse_entity_id("Q31855"), Aspect.ORGANIZATION, 65),  # research institute
    AspectRule(parse_entity_id("Q4830453"), Aspect.ORGANIZATION, 60),  # business
    AspectRule(parse_entity_id("Q2085381"), Aspect.PUBLISHER, 55),  # publisher
    AspectRule(parse_entity_id("Q277759"), Aspect.SERIES, 50),  # book series
    AspectRule(parse_entity_id("Q27785883"), Aspect.SERIES, 45),  # proceedings series
    AspectRule(parse_entity_id("Q157031"), Aspect.SPONSOR, 40),  # foundation
    AspectRule(parse_entity_id("Q327333"), Aspect.SPONSOR, 35),  # government agency
)


class RuleTable:
    """Priority-ordered aspect rules with a Topic fallback."""

    def __init__(self, rules: Iterable[AspectRule] = DEFAULT_RULES):
        rules = list(rules)
        seen = set()
        for rule in rules:
            if rule.entity_class in seen:
                raise ScholiaError(f"duplicate rule for class {rule.entity_class}")
            seen.add(rule.entity_class)
        self.rules = sorted(rules, key=lambda r: (-r.priority, r.entity_class.sort_key()))

    def aspect_for(self, classes: Set[EntityId]) -> Aspect:
        """Aspect of the highest-priority matching rule; Topic when none match."""
        for rule in self.rules:
            if rule.entity_class in classes:
                return rule.aspect
        return Aspect.TOPIC

    @classmethod
    def parse(cls, text: str) -> "RuleTable":
        """Parse the rule config format: one ``Qclass = aspect, priority`` per line."""
        rules = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                class_text, rest = (part.strip() for part in line.split("=", 1))
                aspect_text, priority_text = (part.strip() for part in rest.split(",", 1))
                rules.append(
                    AspectRule(
                        entity_class=parse_entity_id(class_text),
                        aspect=Aspect.from_segment(aspect_text),
                        priority=int(priority_text),
                    )
                )
            except (ValueError, KeyError, ScholiaError) as exc:
                raise ScholiaError(f"bad rule on line {lineno}: {raw!r} ({exc})") from exc
        return cls(rules)

    def dump(self) -> str:
        lines = [f"{r.entity_class.text} = {r.aspect.value}, {r.priority}" for r in self.rules]
        return "\n".join(lines) + "\n"


RULES_ENV = "SCHOLIA_RULES"


def load_rules_from_env() -> RuleTable:
    """Rule table from the file named by SCHOLIA_RULES, or the defaults."""
    path = os.environ.get(RULES_ENV)
    if not path:
        return RuleTable()
    return RuleTable.parse(Path(path).read_text(encoding="utf-8"))


def instance_classes(
    subject: EntityId,
    client: SparqlClient,
    registry: Optional[PropertyRegistry] = None,
) -> Set[EntityId]:
    """All instance-of classes of the subject, as a set."""
    results = client.execute(build_instance_of_query(subject, registry))
    classes = set()
    for term in results.column("class"):
        entity = term.maybe_entity_id()
        if entity is not None:
            classes.add(entity)
    return classes


def guess_aspect(
    subject: EntityId,
    client: SparqlClient,
    rules: Optional[RuleTable] = None,
    registry: Optional[PropertyRegistry] = None,
) -> Aspect:
    """Most relevant aspect for a bare item id.

    Any item can be read as a topic, so that is the fallback when no class
    rule matches (including items with no class statements at all).
    """
    if not subject.is_item:
        raise ValueError(f"aspect guessing applies to items, got {subject}")
    table = rules or RuleTable()
    return table.aspect_for(instance_classes(subject, client, registry))


def normalize_identifier(kind: str, value: str) -> str:
    """Canonical lookup form of an external identifier value."""
    value = value.strip()
    if kind == "doi":
        return value.upper()
    return value


def resolve_external(
    kind: str,
    value: str,
    client: SparqlClient,
    registry: Optional[PropertyRegistry] = None,
) -> EntityId:
    """The unique item carrying the given external identifier."""
    if kind not in EXTERNAL_ID_KINDS:
        raise ValueError(f"unsupported identifier kind {kind!r}")
    if not value or not value.strip():
        raise ValueError("identifier value must be non-empty")
    lookup_value = normalize_identifier(kind, value)
    results = client.execute(build_external_id_lookup(kind, lookup_value, registry))
    candidates: List[EntityId] = []
    for term in results.column("item"):
        entity = term.maybe_entity_id()
        if entity is not None and entity not in candidates:
            candidates.append(entity)
    if not candidates:
        raise NotFound(kind, value)
    if len(candidates) > 1:
        raise Ambiguous(kind, value, candidates)
    return candidates[0]
