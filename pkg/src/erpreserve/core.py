"""Domain types for ER models and relational schemas.

Everything here is immutable. Construction never raises on semantic problems;
call :func:`validate_model` / :func:`validate_schema` to get the violations
as data.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Union

IDENTIFIER_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@functools.total_ordering
@dataclass(frozen=True, slots=True)
class Cardinality:
    """A min or max value: a non-negative integer, or unbounded (``N``)."""

    value: int | None

    @classmethod
    def finite(cls, k: int) -> Cardinality:
        return cls(int(k))

    @classmethod
    def parse(cls, text: str) -> Cardinality:
        if text == "N":
            return UNBOUNDED
        return cls(int(text))

    @property
    def is_unbounded(self) -> bool:
        return self.value is None

    def _rank(self) -> float:
        return float("inf") if self.value is None else self.value

    def __lt__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Cardinality(other)
        if not isinstance(other, Cardinality):
            return NotImplemented
        return self._rank() < other._rank()

    def exceeds_one(self) -> bool:
        return self.value is None or self.value > 1

    def __str__(self) -> str:
        return "N" if self.value is None else str(self.value)


UNBOUNDED = Cardinality(None)
ONE = Cardinality(1)
ZERO = Cardinality(0)

CardinalityLike = Union[Cardinality, int, str]


def card(value: CardinalityLike) -> Cardinality:
    """Coerce ``1``, ``"N"`` or a Cardinality into a Cardinality."""
    if isinstance(value, Cardinality):
        return value
    if isinstance(value, str):
        return Cardinality.parse(value)
    return Cardinality.finite(value)


@dataclass(frozen=True, slots=True)
class StructuralConstraint:
    min: Cardinality
    max: Cardinality

    def __post_init__(self) -> None:
        object.__setattr__(self, "min", card(self.min))
        object.__setattr__(self, "max", card(self.max))

    def __str__(self) -> str:
        return f"({self.min},{self.max})"


def sc(min_value: CardinalityLike, max_value: CardinalityLike) -> StructuralConstraint:
    return StructuralConstraint(card(min_value), card(max_value))


@dataclass(frozen=True, slots=True)
class EntityType:
    name: str
    key_attribute: str
    attributes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))


@dataclass(frozen=True, slots=True)
class RelationshipType:
    name: str
    left_entity: str
    right_entity: str
    left_constraint: StructuralConstraint
    right_constraint: StructuralConstraint


@dataclass(frozen=True, slots=True)
class ErModel:
    entities: tuple[EntityType, ...] = ()
    relationships: tuple[RelationshipType, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "relationships", tuple(self.relationships))

    def entity(self, name: str) -> EntityType:
        for entity in self.entities:
            if entity.name == name:
                return entity
        raise KeyError(name)

    def relationship(self, name: str) -> RelationshipType:
        for rel in self.relationships:
            if rel.name == name:
                return rel
        raise KeyError(name)

    def restricted_to(self, rel: RelationshipType) -> ErModel:
        """The two-entity model holding only ``rel`` and its participants."""
        return ErModel(
            (self.entity(rel.left_entity), self.entity(rel.right_entity)), (rel,)
        )


# -- validation ---------------------------------------------------------------


class Violation(NamedTuple):
    code: str
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.element}: {self.message}"


def _check_constraint(owner: str, c: StructuralConstraint) -> list[Violation]:
    out = []
    if c.min.is_unbounded:
        out.append(Violation("min-unbounded", owner, "min cannot be unbounded"))
    elif c.min.value < 0:
        out.append(Violation("min-negative", owner, "min below zero"))
    if not c.max.is_unbounded and c.max.value < 1:
        out.append(Violation("max-below-one", owner, "max below one"))
    if not c.min.is_unbounded and c.max < c.min:
        out.append(Violation("min-exceeds-max", owner, "min exceeds max"))
    return out


def validate_model(model: ErModel) -> list[Violation]:
    """Every invariant violation in ``model``; an empty list means valid."""
    violations: list[Violation] = []
    entity_names: set[str] = set()
    for entity in model.entities:
        if not entity.name:
            violations.append(Violation("empty-name", "<entity>", "entity name is empty"))
        elif not IDENTIFIER_RE.match(entity.name):
            violations.append(Violation("bad-identifier", entity.name, "not an identifier"))
        if entity.name in entity_names:
            violations.append(
                Violation("duplicate-name", entity.name, "duplicate entity name")
            )
        entity_names.add(entity.name)
        for attr in (entity.key_attribute, *entity.attributes):
            if not IDENTIFIER_RE.match(attr or ""):
                violations.append(
                    Violation("bad-identifier", f"{entity.name}.{attr}", "not an identifier")
                )
        if entity.key_attribute in entity.attributes:
            violations.append(
                Violation(
                    "key-in-attributes",
                    f"{entity.name}.{entity.key_attribute}",
                    "key attribute also listed as an attribute",
                )
            )
        seen: set[str] = set()
        for attr in entity.attributes:
            if attr in seen:
                violations.append(
                    Violation(
                        "duplicate-attribute",
                        f"{entity.name}.{attr}",
                        "duplicate attribute name",
                    )
                )
            seen.add(attr)

    rel_names: set[str] = set()
    for rel in model.relationships:
        if not rel.name:
            violations.append(
                Violation("empty-name", "<relationship>", "relationship name is empty")
            )
        elif not IDENTIFIER_RE.match(rel.name):
            violations.append(Violation("bad-identifier", rel.name, "not an identifier"))
        if rel.name in rel_names:
            violations.append(
                Violation("duplicate-name", rel.name, "duplicate relationship name")
            )
        if rel.name in entity_names:
            violations.append(
                Violation(
                    "duplicate-name", rel.name, "relationship name clashes with an entity"
                )
            )
        rel_names.add(rel.name)
        for side in (rel.left_entity, rel.right_entity):
            if side not in entity_names:
                violations.append(
                    Violation("unknown-entity", rel.name, f"unknown entity {side!r}")
                )
        if rel.left_entity == rel.right_entity:
            violations.append(
                Violation("recursive-relationship", rel.name, "both sides name the same entity")
            )
        violations += _check_constraint(f"{rel.name}.{rel.left_entity}", rel.left_constraint)
        violations += _check_constraint(f"{rel.name}.{rel.right_entity}", rel.right_constraint)
    return violations


# -- classification and slots -------------------------------------------------


class Side(enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"

    @property
    def other(self) -> Side:
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


class RelationshipClass(enum.Enum):
    ONE_TO_ONE = "OneToOne"
    ONE_TO_MANY = "OneToMany"
    MANY_TO_MANY = "ManyToMany"


@dataclass(frozen=True, slots=True)
class Classification:
    kind: RelationshipClass
    one_side: Side | None = None

    def __str__(self) -> str:
        if self.kind is RelationshipClass.ONE_TO_MANY:
            return f"OneToMany(one_side={self.one_side.value})"
        return self.kind.value


def classify_relationship(rel: RelationshipType) -> Classification:
    left_one = rel.left_constraint.max == ONE
    right_one = rel.right_constraint.max == ONE
    if left_one and right_one:
        return Classification(RelationshipClass.ONE_TO_ONE)
    if left_one:
        return Classification(RelationshipClass.ONE_TO_MANY, Side.LEFT)
    if right_one:
        return Classification(RelationshipClass.ONE_TO_MANY, Side.RIGHT)
    return Classification(RelationshipClass.MANY_TO_MANY)


class ConstraintSlot(enum.Enum):
    LEFT_MIN = "LeftMin"
    LEFT_MAX = "LeftMax"
    RIGHT_MIN = "RightMin"
    RIGHT_MAX = "RightMax"

    @property
    def side(self) -> Side:
        return Side.LEFT if self.name.startswith("LEFT") else Side.RIGHT

    @property
    def is_max(self) -> bool:
        return self.name.endswith("MAX")

    @classmethod
    def of(cls, side: Side, is_max: bool) -> ConstraintSlot:
        return cls[f"{side.name}_{'MAX' if is_max else 'MIN'}"]


SLOT_ORDER = (
    ConstraintSlot.LEFT_MIN,
    ConstraintSlot.LEFT_MAX,
    ConstraintSlot.RIGHT_MIN,
    ConstraintSlot.RIGHT_MAX,
)


class SlotValue(NamedTuple):
    slot: ConstraintSlot
    value: Cardinality


def constraint_slots(rel: RelationshipType) -> list[SlotValue]:
    lc, rc = rel.left_constraint, rel.right_constraint
    return [
        SlotValue(ConstraintSlot.LEFT_MIN, lc.min),
        SlotValue(ConstraintSlot.LEFT_MAX, lc.max),
        SlotValue(ConstraintSlot.RIGHT_MIN, rc.min),
        SlotValue(ConstraintSlot.RIGHT_MAX, rc.max),
    ]


def side_entity(rel: RelationshipType, side: Side) -> str:
    return rel.left_entity if side is Side.LEFT else rel.right_entity


def side_constraint(rel: RelationshipType, side: Side) -> StructuralConstraint:
    return rel.left_constraint if side is Side.LEFT else rel.right_constraint


# -- relational schemas -------------------------------------------------------


class ColumnRole(enum.Enum):
    KEY = "Key"
    PLAIN = "Plain"
    FOREIGN_KEY = "ForeignKey"


class Column(NamedTuple):
    name: str
    role: ColumnRole


class ForeignKey(NamedTuple):
    column: str
    target_relation: str
    target_column: str
    nullable: bool


@dataclass(frozen=True, slots=True)
class RelationSchema:
    name: str
    columns: tuple[Column, ...]
    primary_key: frozenset[str]
    foreign_keys: tuple[ForeignKey, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "primary_key", frozenset(self.primary_key))
        object.__setattr__(self, "foreign_keys", tuple(self.foreign_keys))

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def foreign_key(self, column: str) -> ForeignKey:
        for fk in self.foreign_keys:
            if fk.column == column:
                return fk
        raise KeyError(column)


class EncodingKind(enum.Enum):
    FK_IN_RELATION = "FkInRelation"
    JUNCTION_RELATION = "JunctionRelation"


@dataclass(frozen=True, slots=True)
class Encoding:
    """How one relationship landed in the schema.

    ``relation`` is the FK holder or the junction. ``left_relation`` and
    ``right_relation`` are the participating entity relations and ``columns``
    the FK column(s) carrying the relationship (one for FK placement, left then
    right for a junction). Only (relationship, kind, relation) take part in
    schema equality.
    """

    relationship: str
    kind: EncodingKind
    relation: str
    left_relation: str = ""
    right_relation: str = ""
    columns: tuple[str, ...] = ()

    @property
    def holder_side(self) -> Side | None:
        if self.kind is not EncodingKind.FK_IN_RELATION:
            return None
        return Side.LEFT if self.relation == self.left_relation else Side.RIGHT

    def __str__(self) -> str:
        return f"{self.kind.value}({self.relation})"


@dataclass(frozen=True, slots=True)
class RelationalSchema:
    relations: tuple[RelationSchema, ...] = ()
    relationship_encodings: tuple[Encoding, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(
            self, "relationship_encodings", tuple(self.relationship_encodings)
        )

    def relation(self, name: str) -> RelationSchema:
        for rel in self.relations:
            if rel.name == name:
                return rel
        raise KeyError(name)

    def encoding(self, relationship: str) -> Encoding:
        for enc in self.relationship_encodings:
            if enc.relationship == relationship:
                return enc
        raise KeyError(relationship)


def validate_schema(
    schema: RelationalSchema, relationships: Iterable[str] | None = None
) -> list[Violation]:
    """Invariant violations of a relational schema.

    When ``relationships`` is given, each must have exactly one encoding.
    """
    out: list[Violation] = []
    by_name = {r.name: r for r in schema.relations}
    if len(by_name) != len(schema.relations):
        out.append(Violation("duplicate-name", "<schema>", "duplicate relation name"))
    for rel in schema.relations:
        names = rel.column_names
        if len(set(names)) != len(names):
            out.append(Violation("duplicate-column", rel.name, "duplicate column name"))
        for pk in sorted(rel.primary_key - set(names)):
            out.append(Violation("pk-missing", f"{rel.name}.{pk}", "PK column does not exist"))
        fk_cols = [fk.column for fk in rel.foreign_keys]
        for col in rel.columns:
            n = fk_cols.count(col.name)
            if col.role is ColumnRole.FOREIGN_KEY and n != 1:
                out.append(
                    Violation(
                        "fk-entry-count",
                        f"{rel.name}.{col.name}",
                        f"foreign key column has {n} foreign key entries",
                    )
                )
            if col.role is not ColumnRole.FOREIGN_KEY and n:
                out.append(
                    Violation(
                        "fk-role", f"{rel.name}.{col.name}", "FK entry on a non-FK column"
                    )
                )
        for fk in rel.foreign_keys:
            if fk.column not in names:
                out.append(
                    Violation("fk-missing", f"{rel.name}.{fk.column}", "FK column does not exist")
                )
            if fk.column in rel.primary_key and fk.nullable:
                out.append(
                    Violation(
                        "pk-nullable", f"{rel.name}.{fk.column}", "PK column is nullable"
                    )
                )
            target = by_name.get(fk.target_relation)
            if target is None or Column(fk.target_column, ColumnRole.KEY) not in target.columns:
                out.append(
                    Violation(
                        "fk-target",
                        f"{rel.name}.{fk.column}",
                        f"target {fk.target_relation}.{fk.target_column} is not a key column",
                    )
                )
    if relationships is not None:
        encoded = [e.relationship for e in schema.relationship_encodings]
        for name in relationships:
            if encoded.count(name) != 1:
                out.append(
                    Violation("encoding-count", name, f"{encoded.count(name)} encodings")
                )
    for enc in schema.relationship_encodings:
        if enc.relation not in by_name:
            out.append(
                Violation("encoding-target", enc.relationship, f"no relation {enc.relation!r}")
            )
    return out
