"""ER-to-relational schema compiler and constraint-preservation auditor."""

from .analysis import (
    NOT_REPRESENTED,
    PreservationReport,
    SlotVerdict,
    Verdict,
    VerdictKind,
    analyze,
    exact,
    lower_bound_only,
    summarize,
)
from .core import (
    ONE,
    UNBOUNDED,
    Cardinality,
    ConstraintSlot,
    EntityType,
    ErModel,
    RelationalSchema,
    RelationSchema,
    RelationshipType,
    StructuralConstraint,
    card,
    classify_relationship,
    constraint_slots,
    sc,
    validate_model,
    validate_schema,
)
from .text import ParseError, parse_er, render_er, render_rds
from .transform import schema_equal, transform

__version__ = "0.1.0"

__all__ = [
    "Cardinality",
    "ConstraintSlot",
    "EntityType",
    "ErModel",
    "NOT_REPRESENTED",
    "ONE",
    "ParseError",
    "PreservationReport",
    "RelationSchema",
    "RelationalSchema",
    "RelationshipType",
    "SlotVerdict",
    "StructuralConstraint",
    "UNBOUNDED",
    "Verdict",
    "VerdictKind",
    "analyze",
    "card",
    "classify_relationship",
    "constraint_slots",
    "exact",
    "lower_bound_only",
    "parse_er",
    "render_er",
    "render_rds",
    "sc",
    "schema_equal",
    "summarize",
    "transform",
    "validate_model",
    "validate_schema",
]
