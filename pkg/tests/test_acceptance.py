"""Exit criteria. Run with ``pytest tests/test_acceptance.py`` for the PASS/FAIL summary."""

from __future__ import annotations

import io
import itertools
import random
from pathlib import Path

import pytest

from conftest import E, S, binary
from erpreserve.analysis import NOT_REPRESENTED, analyze, exact, lower_bound_only
from erpreserve.cli import run
from erpreserve.core import (
    ONE,
    UNBOUNDED,
    Cardinality,
    EntityType,
    ErModel,
    RelationshipClass,
    RelationshipType,
    classify_relationship,
    sc,
)
from erpreserve.oracle import (
    FamilySpec,
    class_of,
    enumerate_family,
    enumerate_instances,
    inverse_image_verdicts,
    participation_profile,
    UndefinedProfileError,
)
from erpreserve.text import ParseError, parse_er, render_er, render_rds
from erpreserve.transform import schema_equal, transform

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

FK_LEFT = (NOT_REPRESENTED, exact(ONE), NOT_REPRESENTED, NOT_REPRESENTED)
FK_RIGHT = (NOT_REPRESENTED, NOT_REPRESENTED, NOT_REPRESENTED, exact(ONE))
JUNCTION = (NOT_REPRESENTED, lower_bound_only(1), NOT_REPRESENTED, lower_bound_only(1))
MANY_MAXES = (2, 3, "N")
TABLE_1 = ((1, 0), (0, 1), (0, 0), (1, 1))
TABLE_2 = ((1, 0), (0, 1), (0, 0), (1, 1), (1, 2), (0, 2))


def vector(model):
    return analyze(model).relationships[0].verdict_vector()


@pytest.mark.criterion(1, "golden transformations")
def test_golden_transformations():
    assert render_rds(transform(binary((1, 1), (0, 1)))) == (
        "E[Ke*, A1, A2, S_Ks→S.Ks?]\n"
        "S[Ks*, A1, A2]\n"
    )
    assert render_rds(transform(binary((0, 1), (1, 1)))) == (
        "E[Ke*, A1, A2]\n"
        "S[Ks*, A1, A2, E_Ke→E.Ke?]\n"
    )
    schema = transform(binary((0, 2), (0, 3)))
    assert len(schema.relations) == 3
    junction = schema.relation("R")
    assert len(junction.columns) == 2
    assert junction.primary_key == set(junction.column_names)
    assert {fk.column for fk in junction.foreign_keys} == junction.primary_key
    assert not any(fk.nullable for fk in junction.foreign_keys)
    assert render_rds(schema).splitlines()[2] == "R[E_Ke*→E.Ke, S_Ks*→S.Ks]"


@pytest.mark.criterion(2, "one-to-one verdict table")
@pytest.mark.parametrize("m1, m2", TABLE_1)
def test_one_to_one_verdicts(m1, m2):
    model = binary((m1, 1), (m2, 1))
    holder = transform(model).encoding("R").holder_side
    assert vector(model) == (FK_LEFT if holder.value == "Left" else FK_RIGHT)


@pytest.mark.criterion(3, "one-to-many verdict table")
@pytest.mark.parametrize("m1, m2", TABLE_2)
@pytest.mark.parametrize("x2", MANY_MAXES)
def test_one_to_many_verdicts(m1, m2, x2):
    # same vector as the one-to-one case whose FK lands in E
    assert vector(binary((m1, 1), (m2, x2))) == vector(binary((1, 1), (0, 1))) == FK_LEFT
    assert vector(binary((m2, x2), (m1, 1))) == vector(binary((0, 1), (1, 1))) == FK_RIGHT


@pytest.mark.criterion(4, "many-to-many invariance")
def test_many_to_many_invariance():
    models = [
        binary((m1, x1), (m2, x2))
        for (m1, m2), x1, x2 in itertools.product(
            itertools.product((0, 1), repeat=2), MANY_MAXES, MANY_MAXES
        )
    ]
    assert len(models) == 36
    schemas = [transform(m) for m in models]
    assert all(schema_equal(a, b) for a, b in itertools.combinations(schemas, 2))
    assert all(vector(m) == JUNCTION for m in models)


@pytest.mark.criterion(5, "cross-case structural identity")
def test_cross_case_identity():
    one_to_one, one_to_many = binary((1, 1), (0, 1)), binary((1, 1), (0, "N"))
    assert schema_equal(transform(one_to_one), transform(one_to_many))
    classes = inverse_image_verdicts(enumerate_family(FamilySpec((E, S))))
    cls = class_of(classes, transform(one_to_one))
    assert one_to_one in cls.members and binary((1, 1), (0, 2)) in cls.members
    right_max = cls.verdicts[3]
    assert right_max.verdict == NOT_REPRESENTED
    values = {w.relationships[0].right_constraint.max for w in right_max.witness}
    assert ONE in values and any(v.exceeds_one() for v in values)


@pytest.mark.criterion(6, "oracle-analyzer agreement")
def test_oracle_analyzer_agreement():
    family = enumerate_family(FamilySpec((E, S)))
    assert len(family) == 4 + 2 * 18 + 36
    for cls in inverse_image_verdicts(family):
        expected = tuple(v.verdict for v in cls.verdicts)
        for member in cls.members:
            assert vector(member) == expected
    for sample in sorted(SAMPLES.glob("*.er")):
        out = io.StringIO()
        assert run(["verify", str(sample)], stdout=out, stderr=io.StringIO()) == 0, out.getvalue()


@pytest.mark.criterion(7, "instance-oracle witnesses")
def test_instance_witnesses():
    schema = transform(binary((1, 1), (0, 1)))
    encoding = schema.encoding("R")
    instances = enumerate_instances(schema, 2)
    assert len(enumerate_instances(schema, 1)) == 5
    assert len(instances) == 38  # frozen regression value
    profiles = []
    for inst in instances:
        try:
            profiles.append(participation_profile(inst, encoding))
        except UndefinedProfileError:
            continue
    # (a) holder side never exceeds one
    assert all(p.left_max <= 1 for p in profiles)
    # (b) null FK
    assert any(None in inst.table("E").column("S_Ks") for inst in instances)
    # (c) repeated FK value
    assert any(p.right_max == 2 for p in profiles)
    # (d) both mins take 0 and >= 1
    assert {p.left_min for p in profiles} >= {0, 1}
    assert any(p.right_min == 0 for p in profiles) and any(p.right_min >= 1 for p in profiles)


def random_corpus(n: int, seed: int = 20261015) -> list[ErModel]:
    rng = random.Random(seed)
    names = ["E", "S", "Dept", "Emp", "Proj", "Part"]
    corpus = []
    for _ in range(n):
        chosen = rng.sample(names, rng.randint(2, 4))
        ents = []
        for name in chosen:
            attrs = rng.sample(["A1", "A2", "A3", "Label", "code"], rng.randint(0, 3))
            ents.append(EntityType(name, f"K{name.lower()}", tuple(attrs)))
        rels = []
        for i in range(rng.randint(1, 3)):
            left, right = rng.sample(chosen, 2)
            cons = []
            for _ in range(2):
                hi = rng.choice([Cardinality(1), Cardinality(1), Cardinality(2), Cardinality(5), UNBOUNDED])
                lo = rng.randint(0, 3 if hi.is_unbounded else hi.value)
                cons.append(sc(lo, hi))
            rels.append(RelationshipType(f"R{i}", left, right, *cons))
        corpus.append(ErModel(tuple(ents), tuple(rels)))
    return corpus


INVALID_FIXTURES = [
    ("(min 1, max 0)", "max-below-one"),
    ("(min 2, max 1)", "min-exceeds-max"),
    ("(min N, max N)", "min-unbounded"),
    ("(min 0, max 0)", "max-below-one"),
]


@pytest.mark.criterion(8, "parser round-trip and diagnostics")
def test_parser_round_trip():
    corpus = random_corpus(150)
    kinds = {classify_relationship(r).kind for m in corpus for r in m.relationships}
    assert kinds == set(RelationshipClass)
    for model in corpus:
        assert parse_er(render_er(model)) == model
    for constraint, code in INVALID_FIXTURES:
        text = (
            "entity E { key Ke; }\nentity S { key Ks; }\n"
            f"relationship R between E {constraint} and S (min 0, max 1);\n"
        )
        with pytest.raises(ParseError) as err:
            parse_er(text)
        assert code in {d.code for d in err.value.diagnostics}
