from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import E, S, binary
from erpreserve.core import (
    ONE,
    UNBOUNDED,
    Cardinality,
    ConstraintSlot,
    EntityType,
    ErModel,
    RelationshipClass,
    RelationshipType,
    Side,
    card,
    classify_relationship,
    constraint_slots,
    sc,
    validate_model,
)

maxes = st.one_of(st.integers(1, 5).map(Cardinality), st.just(UNBOUNDED))


@st.composite
def valid_constraints(draw):
    hi = draw(maxes)
    bound = 5 if hi.is_unbounded else hi.value
    return sc(draw(st.integers(0, bound)), hi)


def codes(model):
    return {v.code for v in validate_model(model)}


def test_cardinality_ordering():
    assert Cardinality(0) < ONE < Cardinality(7) < UNBOUNDED
    assert not UNBOUNDED < UNBOUNDED
    assert card("N") == UNBOUNDED and card(3) == Cardinality(3)
    assert str(UNBOUNDED) == "N" and str(card(2)) == "2"


def test_valid_model_is_ok(total_left_1to1):
    assert validate_model(total_left_1to1) == []


def test_min_exceeds_max():
    violations = validate_model(binary((2, 1), (0, 1)))
    assert [(v.code, v.message) for v in violations] == [("min-exceeds-max", "min exceeds max")]
    assert violations[0].element == "R.E"


def test_max_below_one():
    assert "max-below-one" in codes(binary((0, 0), (0, 1)))
    assert [v.message for v in validate_model(binary((0, 1), (0, 0)))] == ["max below one"]


@pytest.mark.parametrize(
    "model, code",
    [
        (ErModel((E, E)), "duplicate-name"),
        (ErModel((EntityType("E", "K", ("K",)),)), "key-in-attributes"),
        (ErModel((EntityType("E", "K", ("A", "A")),)), "duplicate-attribute"),
        (ErModel((EntityType("", "K"),)), "empty-name"),
        (binary((0, 1), (0, 1), name="E"), "duplicate-name"),
        (binary(("N", "N"), (0, 1)), "min-unbounded"),
        (ErModel((E,), (RelationshipType("R", "E", "X", sc(0, 1), sc(0, 1)),)), "unknown-entity"),
        (ErModel((E,), (RelationshipType("R", "E", "E", sc(0, 1), sc(0, 1)),)), "recursive-relationship"),
    ],
)
def test_invariant_codes(model, code):
    assert code in codes(model)


def test_attribute_names_shared_across_entities_are_fine():
    # E and S both carry A1, A2
    assert validate_model(ErModel((E, S))) == []


@given(valid_constraints(), valid_constraints())
def test_single_field_corruption_is_reported(left, right):
    model = binary((left.min, left.max), (right.min, right.max))
    assert validate_model(model) == []
    rel = model.relationships[0]

    def corrupt(**changes):
        return dataclasses.replace(model, relationships=(dataclasses.replace(rel, **changes),))

    assert "max-below-one" in codes(corrupt(left_constraint=sc(left.min, 0)))
    assert "min-unbounded" in codes(corrupt(right_constraint=sc("N", right.max)))
    if not right.max.is_unbounded:
        assert "min-exceeds-max" in codes(corrupt(right_constraint=sc(right.max.value + 1, right.max)))
    assert "unknown-entity" in codes(corrupt(right_entity="Nope"))


@pytest.mark.parametrize(
    "x1, x2, expected, one_side",
    [
        (1, 1, RelationshipClass.ONE_TO_ONE, None),
        (1, "N", RelationshipClass.ONE_TO_MANY, Side.LEFT),
        ("N", 1, RelationshipClass.ONE_TO_MANY, Side.RIGHT),
        (3, 2, RelationshipClass.MANY_TO_MANY, None),
    ],
)
def test_classify(x1, x2, expected, one_side):
    c = classify_relationship(binary((0, x1), (0, x2)).relationships[0])
    assert c.kind is expected and c.one_side is one_side


@given(valid_constraints(), valid_constraints())
def test_classification_is_exhaustive_and_exclusive(left, right):
    rel = binary((left.min, left.max), (right.min, right.max)).relationships[0]
    c = classify_relationship(rel)
    conditions = {
        RelationshipClass.ONE_TO_ONE: left.max == ONE and right.max == ONE,
        RelationshipClass.ONE_TO_MANY: (left.max == ONE) != (right.max == ONE),
        RelationshipClass.MANY_TO_MANY: left.max.exceeds_one() and right.max.exceeds_one(),
    }
    assert [k for k, holds in conditions.items() if holds] == [c.kind]


def test_constraint_slots_order(total_left_1to1):
    slots = constraint_slots(total_left_1to1.relationships[0])
    assert [s.slot for s in slots] == list(ConstraintSlot)
    assert [s.value for s in slots] == [card(1), card(1), card(0), card(1)]


@given(valid_constraints(), valid_constraints())
def test_constraint_slots_mirror_model(left, right):
    rel = binary((left.min, left.max), (right.min, right.max)).relationships[0]
    values = [s.value for s in constraint_slots(rel)]
    assert values == [left.min, left.max, right.min, right.max]


def test_many_to_many_slots():
    values = [s.value for s in constraint_slots(binary((0, 2), (0, 2)).relationships[0])]
    assert values == [card(0), card(2), card(0), card(2)]
