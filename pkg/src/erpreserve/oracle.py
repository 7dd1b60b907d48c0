"""Brute-force oracles for constraint preservation.

Two independent routes to the same verdicts:

* inverse image: transform a whole family of ER models, group the results by
  structural schema identity, and ask whether every preimage in a group agrees
  on a slot's value;
* instances: enumerate every legal population of a schema over a small key
  pool and look at the participation counts the schema permits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .analysis import NOT_REPRESENTED, Verdict, exact, lower_bound_only
from .core import (
    ONE,
    SLOT_ORDER,
    UNBOUNDED,
    Cardinality,
    ColumnRole,
    ConstraintSlot,
    Encoding,
    EncodingKind,
    EntityType,
    ErModel,
    RelationalSchema,
    RelationSchema,
    RelationshipType,
    Side,
    StructuralConstraint,
    card,
    constraint_slots,
)
from .transform import schema_equal, transform

MANY = "n"  # stands for a many-side min above one

ONE_TO_ONE_MINS = ((1, 0), (0, 1), (0, 0), (1, 1))
ONE_TO_MANY_MINS = ((1, 0), (0, 1), (0, 0), (1, 1), (1, MANY), (0, MANY))
MANY_TO_MANY_MINS = ((0, 0), (0, 1), (1, 0), (1, 1))

DEFAULT_POOL_CAP = 3
DEFAULT_RELATION_CAP = 3


class CapExceededError(ValueError):
    """The requested enumeration is larger than the configured bound."""


class UndefinedProfileError(ValueError):
    """Participation is undefined when an entity table is empty."""


# -- model families -----------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    entity_pair: tuple[EntityType, EntityType]
    relationship_name: str = "R"
    one_to_one_mins: tuple = ONE_TO_ONE_MINS
    one_to_many_mins: tuple = ONE_TO_MANY_MINS
    many_to_many_mins: tuple = MANY_TO_MANY_MINS
    max_samples: tuple[Cardinality, ...] = (ONE, Cardinality(2), Cardinality(3), UNBOUNDED)
    many_side_min_samples: tuple[Cardinality, ...] = (Cardinality(2),)

    def __post_init__(self) -> None:
        maxes = tuple(sorted(set(card(m) for m in self.max_samples)))
        object.__setattr__(self, "max_samples", maxes)
        object.__setattr__(
            self, "many_side_min_samples", tuple(card(m) for m in self.many_side_min_samples)
        )
        if ONE not in maxes or not any(m.exceeds_one() for m in maxes):
            raise ValueError("max_samples must contain 1 and a value above 1")
        if self.entity_pair[0].name == self.entity_pair[1].name:
            raise ValueError("family entities must be distinct")


def _family_model(spec: FamilySpec, left: tuple, right: tuple) -> ErModel:
    rel = RelationshipType(
        spec.relationship_name,
        spec.entity_pair[0].name,
        spec.entity_pair[1].name,
        StructuralConstraint(card(left[0]), card(left[1])),
        StructuralConstraint(card(right[0]), card(right[1])),
    )
    return ErModel(spec.entity_pair, (rel,))


def enumerate_family(spec: FamilySpec) -> list[ErModel]:
    """1:1 over the four min pairs, 1:N in both orientations over the six min
    rows and every many-side max sample, M:N over min pairs x max samples."""
    many_maxes = [m for m in spec.max_samples if m.exceeds_one()]
    models: list[ErModel] = []
    for m1, m2 in spec.one_to_one_mins:
        models.append(_family_model(spec, (m1, 1), (m2, 1)))
    for one_side_left in (True, False):
        for m_one, m_many in spec.one_to_many_mins:
            many_mins = spec.many_side_min_samples if m_many == MANY else (card(m_many),)
            for lo in many_mins:
                for hi in many_maxes:
                    if hi < lo:
                        continue
                    one, many = (m_one, 1), (lo, hi)
                    models.append(
                        _family_model(spec, *((one, many) if one_side_left else (many, one)))
                    )
    for m1, m2 in spec.many_to_many_mins:
        for x1, x2 in itertools.product(many_maxes, repeat=2):
            models.append(_family_model(spec, (m1, x1), (m2, x2)))
    return list(dict.fromkeys(models))


# -- inverse image ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class OracleVerdict:
    slot: ConstraintSlot
    verdict: Verdict
    witness: tuple = ()


@dataclass
class SchemaClass:
    """One structural equivalence class of transformed family members."""

    schema: RelationalSchema
    members: list[ErModel] = field(default_factory=list)
    verdicts: list[OracleVerdict] = field(default_factory=list)

    @property
    def encoding(self) -> Encoding:
        return self.schema.relationship_encodings[0]


def describe_model(model: ErModel) -> str:
    rel = model.relationships[0]
    return (
        f"{rel.name}: {rel.left_entity}{rel.left_constraint} "
        f"{rel.right_entity}{rel.right_constraint}"
    )


def _only_relationship(model: ErModel) -> RelationshipType:
    if len(model.relationships) != 1:
        raise ValueError("family members must hold exactly one relationship")
    return model.relationships[0]


def _preimage_verdict(slot: ConstraintSlot, members: Sequence[ErModel]) -> OracleVerdict:
    index = SLOT_ORDER.index(slot)
    seen: dict[Cardinality, ErModel] = {}
    for m in members:
        seen.setdefault(constraint_slots(_only_relationship(m))[index].value, m)
    values = list(seen)
    if len(values) == 1:
        return OracleVerdict(slot, exact(values[0]))
    witness = (seen[values[0]], seen[values[1]])
    if all(v.exceeds_one() for v in values):
        return OracleVerdict(slot, lower_bound_only(1), witness)
    # prefer a witness pair that straddles one
    low = next(v for v in values if not v.exceeds_one())
    other = next(v for v in values if v != low)
    return OracleVerdict(slot, NOT_REPRESENTED, (seen[low], seen[other]))


def inverse_image_verdicts(family: Iterable[ErModel]) -> list[SchemaClass]:
    classes: list[SchemaClass] = []
    for model in family:
        schema = transform(model)
        for cls in classes:
            if schema_equal(cls.schema, schema):
                cls.members.append(model)
                break
        else:
            classes.append(SchemaClass(schema, [model]))
    for cls in classes:
        cls.verdicts = [_preimage_verdict(slot, cls.members) for slot in SLOT_ORDER]
    return classes


def class_of(classes: Iterable[SchemaClass], schema: RelationalSchema) -> SchemaClass:
    for cls in classes:
        if schema_equal(cls.schema, schema):
            return cls
    raise KeyError("no class holds this schema")


# -- instances ----------------------------------------------------------------

Value = Union[str, None]


def _row_key(row: tuple[Value, ...]) -> tuple:
    return tuple((v is not None, v or "") for v in row)


@dataclass(frozen=True, slots=True)
class Table:
    relation: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Value, ...], ...]
    key: str | None = None

    def column(self, name: str) -> list[Value]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    @property
    def keys(self) -> list[Value]:
        return self.column(self.key) if self.key else []


@dataclass(frozen=True, slots=True)
class Instance:
    tables: tuple[Table, ...]

    def table(self, relation: str) -> Table:
        for t in self.tables:
            if t.relation == relation:
                return t
        raise KeyError(relation)

    def __str__(self) -> str:
        lines = []
        for t in self.tables:
            rows = ", ".join(
                "(" + ", ".join("null" if v is None else v for v in row) + ")" for row in t.rows
            )
            lines.append(f"{t.relation} → {{{rows}}}")
        return "\n".join(lines)


def key_pool(relation: str, size: int) -> tuple[str, ...]:
    return tuple(f"{relation.lower()}{i}" for i in range(1, size + 1))


def _projected(rel: RelationSchema) -> tuple[str, ...]:
    return tuple(c.name for c in rel.columns if c.role is not ColumnRole.PLAIN)


def _key_column(rel: RelationSchema) -> str | None:
    keys = [c.name for c in rel.columns if c.role is ColumnRole.KEY]
    if len(keys) > 1:
        raise ValueError(f"{rel.name}: composite Key-role primary keys are not supported")
    if not keys:
        fk_cols = {fk.column for fk in rel.foreign_keys}
        if not rel.primary_key or not rel.primary_key <= fk_cols:
            raise ValueError(f"{rel.name}: primary key must be a Key column or FK columns")
        return None
    return keys[0]


def _subsets(items: Sequence) -> Iterator[tuple]:
    for n in range(len(items) + 1):
        yield from itertools.combinations(items, n)


def _fk_domain(fk, present: dict[str, tuple[str, ...]]) -> tuple[Value, ...]:
    values: tuple[Value, ...] = present[fk.target_relation]
    return ((None,) + values) if fk.nullable else values


def _pk_unique(rel: RelationSchema, columns: tuple[str, ...], rows: Sequence[tuple]) -> bool:
    idx = [columns.index(c) for c in sorted(rel.primary_key)]
    seen = {tuple(row[i] for i in idx) for row in rows}
    return len(seen) == len(rows)


def _relation_options(
    rel: RelationSchema, key: str | None, present: dict[str, tuple[str, ...]]
) -> list[tuple[tuple[Value, ...], ...]]:
    columns = _projected(rel)
    fks = {fk.column: fk for fk in rel.foreign_keys}
    if key is not None:
        # one row per present key; each FK column takes any value in its domain
        fk_cols = [c for c in columns if c != key]
        per_row = list(itertools.product(*(_fk_domain(fks[c], present) for c in fk_cols)))
        options = []
        for choice in itertools.product(per_row, repeat=len(present[rel.name])):
            rows = []
            for k, fk_values in zip(present[rel.name], choice):
                values = dict(zip(fk_cols, fk_values), **{key: k})
                rows.append(tuple(values[c] for c in columns))
            options.append(tuple(sorted(rows, key=_row_key)))
        return options
    candidates = list(itertools.product(*(_fk_domain(fks[c], present) for c in columns)))
    candidates = [row for row in candidates if not any(
        v is None for c, v in zip(columns, row) if c in rel.primary_key
    )]
    return [
        tuple(sorted(rows, key=_row_key))
        for rows in _subsets(candidates)
        if _pk_unique(rel, columns, rows)
    ]


def enumerate_instances(
    schema: RelationalSchema,
    key_pool_size: int,
    *,
    pool_cap: int = DEFAULT_POOL_CAP,
    relation_cap: int = DEFAULT_RELATION_CAP,
) -> list[Instance]:
    """Every legal population of ``schema`` over a fixed key pool.

    Key-bearing relations draw keys from their own pool of ``key_pool_size``
    symbols; nullable FKs range over null plus the target's present keys.
    Plain columns are left out.
    """
    if not 1 <= key_pool_size <= pool_cap:
        raise CapExceededError(f"key pool size {key_pool_size} outside [1, {pool_cap}]")
    if len(schema.relations) > relation_cap:
        raise CapExceededError(
            f"{len(schema.relations)} relations exceed the cap of {relation_cap}"
        )
    keys = {r.name: _key_column(r) for r in schema.relations}
    keyed = [r.name for r in schema.relations if keys[r.name] is not None]
    pools = {name: key_pool(name, key_pool_size) for name in keyed}

    instances = []
    for key_sets in itertools.product(*(list(_subsets(pools[n])) for n in keyed)):
        present = dict(zip(keyed, key_sets))
        per_relation = [_relation_options(r, keys[r.name], present) for r in schema.relations]
        for choice in itertools.product(*per_relation):
            instances.append(
                Instance(
                    tuple(
                        Table(r.name, _projected(r), rows, keys[r.name])
                        for r, rows in zip(schema.relations, choice)
                    )
                )
            )
    return instances


# -- participation ------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ParticipationProfile:
    left_min: int
    left_max: int
    right_min: int
    right_max: int

    def achieved(self, side: Side) -> tuple[int, int]:
        if side is Side.LEFT:
            return self.left_min, self.left_max
        return self.right_min, self.right_max


def relationship_pairs(instance: Instance, encoding: Encoding) -> list[tuple[str, str]]:
    """(left key, right key) for every relationship instance."""
    if encoding.kind is EncodingKind.JUNCTION_RELATION:
        table = instance.table(encoding.relation)
        left_col, right_col = encoding.columns
        return list(zip(table.column(left_col), table.column(right_col)))
    holder = instance.table(encoding.relation)
    pairs = [(k, v) for k, v in zip(holder.keys, holder.column(encoding.columns[0])) if v is not None]
    if encoding.holder_side is Side.RIGHT:
        pairs = [(v, k) for k, v in pairs]
    return pairs


def participation_profile(instance: Instance, encoding: Encoding) -> ParticipationProfile:
    left = instance.table(encoding.left_relation).keys
    right = instance.table(encoding.right_relation).keys
    if not left or not right:
        raise UndefinedProfileError("an entity table is empty")
    pairs = relationship_pairs(instance, encoding)
    left_counts = [sum(1 for a, _ in pairs if a == k) for k in left]
    right_counts = [sum(1 for _, b in pairs if b == k) for k in right]
    return ParticipationProfile(
        min(left_counts), max(left_counts), min(right_counts), max(right_counts)
    )


def _max_verdict(slot, profiles, other_side_reaches_two: bool) -> OracleVerdict:
    side = slot.side
    one = next((i for i, p in profiles if p.achieved(side)[1] == 1), None)
    many = next((i for i, p in profiles if p.achieved(side)[1] >= 2), None)
    if many is None and one is not None:
        return OracleVerdict(slot, exact(ONE), (one,))
    if many is not None and other_side_reaches_two:
        return OracleVerdict(slot, lower_bound_only(1), (many,))
    low = one or next((i for i, p in profiles if p.achieved(side)[1] == 0), None)
    return OracleVerdict(slot, NOT_REPRESENTED, tuple(i for i in (low, many) if i is not None))


def _min_verdict(slot, profiles) -> OracleVerdict:
    side = slot.side
    seen: dict[int, Instance] = {}
    for inst, p in profiles:
        seen.setdefault(p.achieved(side)[0], inst)
    if len(seen) == 1:
        (value, inst), = seen.items()
        return OracleVerdict(slot, exact(Cardinality(value)), (inst,))
    zero = seen.get(0)
    positive = next((seen[v] for v in sorted(seen) if v >= 1), None)
    witness = tuple(i for i in (zero, positive) if i is not None) or tuple(seen.values())[:2]
    return OracleVerdict(slot, NOT_REPRESENTED, witness)


def instance_verdicts(
    schema: RelationalSchema,
    encoding: Encoding,
    key_pool_size: int,
    **caps,
) -> list[OracleVerdict]:
    """Verdicts from participation counts over every populated legal instance.

    A max slot is Exact(1) when no instance exceeds one on that side. It is
    LowerBoundOnly(1) when both sides can exceed one (only a junction allows
    that), and NotRepresented when this side can exceed one but the other
    cannot, since the schema then admits both 1 and more than 1 here.
    """
    profiles = []
    for inst in enumerate_instances(schema, key_pool_size, **caps):
        try:
            profiles.append((inst, participation_profile(inst, encoding)))
        except UndefinedProfileError:
            continue
    if not profiles:
        return [OracleVerdict(slot, NOT_REPRESENTED) for slot in SLOT_ORDER]
    reaches_two = {
        side: any(p.achieved(side)[1] >= 2 for _, p in profiles) for side in Side
    }
    out = []
    for slot in SLOT_ORDER:
        if slot.is_max:
            out.append(_max_verdict(slot, profiles, reaches_two[slot.side.other]))
        else:
            out.append(_min_verdict(slot, profiles))
    return out


def family_for(model: ErModel, rel: RelationshipType, **overrides) -> FamilySpec:
    """Default family over ``rel``'s entity pair, named like ``rel``."""
    pair = (model.entity(rel.left_entity), model.entity(rel.right_entity))
    return FamilySpec(pair, rel.name, **overrides)

