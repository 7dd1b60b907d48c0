"""The classical PK/FK-only ER-to-relational transformation."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import (
    ONE,
    Column,
    ColumnRole,
    Encoding,
    EncodingKind,
    ErModel,
    ForeignKey,
    RelationalSchema,
    RelationSchema,
    RelationshipClass,
    RelationshipType,
    Side,
    classify_relationship,
    side_entity,
)


class NameCollisionError(ValueError):
    """A generated FK column name is already taken in its relation."""


class PlacementReason(enum.Enum):
    TOTAL_PARTICIPATION = "TotalParticipation"
    TIE_BREAK = "TieBreak"
    MAX_ONE_SIDE = "MaxOneSide"


@dataclass(frozen=True, slots=True)
class FkPlacement:
    holder: str
    referenced: str
    reason: PlacementReason
    holder_side: Side


def transform_entities(model: ErModel) -> RelationalSchema:
    relations = []
    for entity in model.entities:
        columns = [Column(entity.key_attribute, ColumnRole.KEY)]
        columns += [Column(a, ColumnRole.PLAIN) for a in entity.attributes]
        relations.append(RelationSchema(entity.name, columns, {entity.key_attribute}))
    return RelationalSchema(relations)


def _placement(rel: RelationshipType, side: Side, reason: PlacementReason) -> FkPlacement:
    return FkPlacement(side_entity(rel, side), side_entity(rel, side.other), reason, side)


def place_fk_one_to_one(rel: RelationshipType) -> FkPlacement:
    """Total-participation side holds the FK; ties go to the smaller entity name."""
    left_total = rel.left_constraint.min == ONE
    right_total = rel.right_constraint.min == ONE
    if left_total != right_total:
        side = Side.LEFT if left_total else Side.RIGHT
        return _placement(rel, side, PlacementReason.TOTAL_PARTICIPATION)
    side = Side.LEFT if rel.left_entity < rel.right_entity else Side.RIGHT
    return _placement(rel, side, PlacementReason.TIE_BREAK)


def place_fk_one_to_many(rel: RelationshipType) -> FkPlacement:
    kind = classify_relationship(rel)
    if kind.kind is not RelationshipClass.ONE_TO_MANY:
        raise ValueError(f"{rel.name} is {kind}, not one-to-many")
    return _placement(rel, kind.one_side, PlacementReason.MAX_ONE_SIDE)


def place_fk(rel: RelationshipType) -> FkPlacement:
    kind = classify_relationship(rel).kind
    if kind is RelationshipClass.ONE_TO_ONE:
        return place_fk_one_to_one(rel)
    if kind is RelationshipClass.ONE_TO_MANY:
        return place_fk_one_to_many(rel)
    raise ValueError(f"{rel.name} is many-to-many; it gets a junction relation")


def _fresh_column(rel: RelationshipType, taken: set[str], entity: str, key: str) -> str:
    # <Entity>_<Key>, falling back to <Relationship>_<Entity>_<Key>
    for candidate in (f"{entity}_{key}", f"{rel.name}_{entity}_{key}"):
        if candidate not in taken:
            return candidate
    raise NameCollisionError(
        f"relationship {rel.name}: column {entity}_{key} already exists"
    )


def transform_many_to_many(rel: RelationshipType, model: ErModel) -> RelationSchema:
    """The junction relation named after ``rel``, keyed by both borrowed keys."""
    if classify_relationship(rel).kind is not RelationshipClass.MANY_TO_MANY:
        raise ValueError(f"{rel.name} is not many-to-many")
    columns: list[Column] = []
    fks: list[ForeignKey] = []
    for entity_name in (rel.left_entity, rel.right_entity):
        key = model.entity(entity_name).key_attribute
        name = _fresh_column(rel, {c.name for c in columns}, entity_name, key)
        columns.append(Column(name, ColumnRole.FOREIGN_KEY))
        fks.append(ForeignKey(name, entity_name, key, False))
    return RelationSchema(rel.name, columns, {c.name for c in columns}, fks)


def transform(model: ErModel) -> RelationalSchema:
    relations = {r.name: r for r in transform_entities(model).relations}
    order = list(relations)
    encodings: list[Encoding] = []
    for rel in model.relationships:
        if classify_relationship(rel).kind is RelationshipClass.MANY_TO_MANY:
            junction = transform_many_to_many(rel, model)
            relations[junction.name] = junction
            order.append(junction.name)
            encodings.append(
                Encoding(
                    rel.name,
                    EncodingKind.JUNCTION_RELATION,
                    junction.name,
                    rel.left_entity,
                    rel.right_entity,
                    junction.column_names,
                )
            )
            continue
        placement = place_fk(rel)
        holder = relations[placement.holder]
        key = model.entity(placement.referenced).key_attribute
        column = _fresh_column(rel, set(holder.column_names), placement.referenced, key)
        relations[holder.name] = RelationSchema(
            holder.name,
            (*holder.columns, Column(column, ColumnRole.FOREIGN_KEY)),
            holder.primary_key,
            (*holder.foreign_keys, ForeignKey(column, placement.referenced, key, True)),
        )
        encodings.append(
            Encoding(
                rel.name,
                EncodingKind.FK_IN_RELATION,
                holder.name,
                rel.left_entity,
                rel.right_entity,
                (column,),
            )
        )
    return RelationalSchema([relations[n] for n in order], encodings)


def _relation_signature(rel: RelationSchema) -> tuple:
    return (
        tuple((c.name, c.role) for c in rel.columns),
        rel.primary_key,
        frozenset(rel.foreign_keys),
    )


def schema_equal(a: RelationalSchema, b: RelationalSchema) -> bool:
    """Structural identity: relations matched by name, encodings by holder/junction."""
    if len(a.relations) != len(b.relations):
        return False
    b_rel = {r.name: r for r in b.relations}
    for rel in a.relations:
        other = b_rel.get(rel.name)
        if other is None or _relation_signature(rel) != _relation_signature(other):
            return False

    def encodings(s: RelationalSchema) -> list[tuple[str, str, str]]:
        return sorted(
            (e.relationship, e.kind.value, e.relation) for e in s.relationship_encodings
        )

    return encodings(a) == encodings(b)

