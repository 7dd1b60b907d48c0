"""Rule-based preservation verdicts for each relationship's four constraint slots."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ONE,
    SLOT_ORDER,
    Cardinality,
    Classification,
    ConstraintSlot,
    Encoding,
    ErModel,
    RelationshipClass,
    classify_relationship,
)
from .transform import transform


class VerdictKind(enum.Enum):
    EXACT = "Exact"
    LOWER_BOUND_ONLY = "LowerBoundOnly"
    NOT_REPRESENTED = "NotRepresented"


@dataclass(frozen=True, slots=True)
class Verdict:
    kind: VerdictKind
    value: Cardinality | None = None
    threshold: int | None = None

    def __str__(self) -> str:
        if self.kind is VerdictKind.EXACT:
            return f"Exact({self.value})"
        if self.kind is VerdictKind.LOWER_BOUND_ONLY:
            return f"LowerBoundOnly({self.threshold})"
        return "NotRepresented"


def exact(value: Cardinality) -> Verdict:
    return Verdict(VerdictKind.EXACT, value=value)


def lower_bound_only(threshold: int = 1) -> Verdict:
    return Verdict(VerdictKind.LOWER_BOUND_ONLY, threshold=threshold)


NOT_REPRESENTED = Verdict(VerdictKind.NOT_REPRESENTED)


class Justification(enum.Enum):
    CASE_1A = "Case1A"  # holder tuple carries one FK value
    CASE_1B = "Case1B"  # FK may be null
    CASE_1C = "Case1C"  # FK values may repeat
    CASE_1D = "Case1D"  # referenced key may or may not appear
    CASE_3_MAX = "Case3Max"  # junction only says "more than one"
    CASE_3_MIN = "Case3Min"


@dataclass(frozen=True, slots=True)
class SlotVerdict:
    slot: ConstraintSlot
    verdict: Verdict
    justification: Justification


@dataclass(frozen=True, slots=True)
class RelationshipReport:
    relationship: str
    classification: Classification
    encoding: Encoding
    verdicts: tuple[SlotVerdict, ...]

    def verdict_vector(self) -> tuple[Verdict, ...]:
        return tuple(v.verdict for v in self.verdicts)


@dataclass(frozen=True, slots=True)
class PreservationReport:
    relationships: tuple[RelationshipReport, ...]

    def for_relationship(self, name: str) -> RelationshipReport:
        for r in self.relationships:
            if r.relationship == name:
                return r
        raise KeyError(name)


def _fk_verdicts(encoding: Encoding) -> tuple[SlotVerdict, ...]:
    holder = encoding.holder_side
    table = {
        ConstraintSlot.of(holder, True): (exact(ONE), Justification.CASE_1A),
        ConstraintSlot.of(holder, False): (NOT_REPRESENTED, Justification.CASE_1B),
        ConstraintSlot.of(holder.other, True): (NOT_REPRESENTED, Justification.CASE_1C),
        ConstraintSlot.of(holder.other, False): (NOT_REPRESENTED, Justification.CASE_1D),
    }
    return tuple(SlotVerdict(slot, *table[slot]) for slot in SLOT_ORDER)


def _junction_verdicts() -> tuple[SlotVerdict, ...]:
    return tuple(
        SlotVerdict(slot, lower_bound_only(1), Justification.CASE_3_MAX)
        if slot.is_max
        else SlotVerdict(slot, NOT_REPRESENTED, Justification.CASE_3_MIN)
        for slot in SLOT_ORDER
    )


def analyze(model: ErModel) -> PreservationReport:
    schema = transform(model)
    reports = []
    for rel in model.relationships:
        classification = classify_relationship(rel)
        encoding = schema.encoding(rel.name)
        if classification.kind is RelationshipClass.MANY_TO_MANY:
            verdicts = _junction_verdicts()
        else:
            verdicts = _fk_verdicts(encoding)
        reports.append(RelationshipReport(rel.name, classification, encoding, verdicts))
    return PreservationReport(tuple(reports))


@dataclass(frozen=True, slots=True)
class SlotCounts:
    exact: int = 0
    lower_bound: int = 0
    lost: int = 0

    def __add__(self, other: SlotCounts) -> SlotCounts:
        return SlotCounts(
            self.exact + other.exact,
            self.lower_bound + other.lower_bound,
            self.lost + other.lost,
        )

    @property
    def loss_ratio(self) -> Fraction:
        total = self.exact + self.lower_bound + self.lost
        return Fraction(total - self.exact, total) if total else Fraction(0)


@dataclass(frozen=True, slots=True)
class Summary:
    per_relationship: dict[str, SlotCounts]
    totals: SlotCounts


def summarize(report: PreservationReport) -> Summary:
    per: dict[str, SlotCounts] = {}
    for r in report.relationships:
        kinds = [v.verdict.kind for v in r.verdicts]
        per[r.relationship] = SlotCounts(
            kinds.count(VerdictKind.EXACT),
            kinds.count(VerdictKind.LOWER_BOUND_ONLY),
            kinds.count(VerdictKind.NOT_REPRESENTED),
        )
    return Summary(per, sum(per.values(), SlotCounts()))
