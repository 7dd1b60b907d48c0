"""ER text DSL and relational-schema renderers.

Grammar (``#`` starts a comment that runs to end of line)::

    entity <Name> { key <Attr>; attr <Attr>; ... }
    relationship <Name> between <Entity> (min <k>, max <k|N>) and <Entity> (min <k>, max <k|N>);

``render_er`` writes one declaration per line; the parser treats newlines as
ordinary whitespace.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterator, Literal

from .core import (
    UNBOUNDED,
    Cardinality,
    ColumnRole,
    EntityType,
    ErModel,
    RelationalSchema,
    RelationshipType,
    StructuralConstraint,
    validate_model,
)


@dataclass(frozen=True, slots=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True, slots=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.code}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<int>[0-9]+)|(?P<punct>[{};(),])"
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # ident | int | punct | eof
    text: str
    span: SourceSpan


def _tokenize(text: str) -> Iterator[_Token]:
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1, 0)
        if m is None:
            raise ParseError(
                [Diagnostic("syntax", f"unexpected character {text[pos]!r}", SourceSpan(span.line, span.column, 1))]
            )
        kind, value = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            yield _Token(kind, value, SourceSpan(span.line, span.column, len(value)))
        for i, ch in enumerate(value):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    yield _Token("eof", "", SourceSpan(line, pos - line_start + 1, 0))


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0
        self.spans: dict[str, SourceSpan] = {}
        self.min_unbounded: list[Diagnostic] = []

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, expected: str) -> ParseError:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError([Diagnostic("syntax", f"expected {expected}, found {found}", tok.span)])

    def expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind == "eof":
            raise self.fail(repr(text))
        self.i += 1
        return self.tokens[self.i - 1]

    def ident(self, what: str) -> _Token:
        if self.tok.kind != "ident":
            raise self.fail(what)
        self.i += 1
        return self.tokens[self.i - 1]

    def cardinality(self, allow_unbounded: bool, owner: str) -> Cardinality:
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return Cardinality(int(tok.text))
        if tok.kind == "ident" and tok.text == "N":
            self.i += 1
            if not allow_unbounded:
                self.spans.setdefault(owner, tok.span)
            return UNBOUNDED
        raise self.fail("an integer or N" if allow_unbounded else "an integer")

    def entity(self) -> EntityType:
        self.expect("entity")
        name = self.ident("an entity name")
        self.spans.setdefault(name.text, name.span)
        self.expect("{")
        key: str | None = None
        attrs: list[str] = []
        while self.tok.text != "}" or self.tok.kind == "eof":
            if self.tok.text == "key" and self.tok.kind == "ident":
                kw = self.expect("key")
                if key is not None:
                    raise ParseError([Diagnostic("duplicate-key", f"entity {name.text} declares a second key", kw.span)])
                attr = self.ident("an attribute name")
                key = attr.text
            elif self.tok.text == "attr" and self.tok.kind == "ident":
                self.expect("attr")
                attr = self.ident("an attribute name")
                attrs.append(attr.text)
            else:
                raise self.fail("'key', 'attr' or '}'")
            self.spans.setdefault(f"{name.text}.{attr.text}", attr.span)
            self.expect(";")
        close = self.expect("}")
        if key is None:
            raise ParseError([Diagnostic("missing-key", f"entity {name.text} has no key", close.span)])
        return EntityType(name.text, key, tuple(attrs))

    def side(self, rel: str) -> tuple[str, StructuralConstraint]:
        entity = self.ident("an entity name")
        owner = f"{rel}.{entity.text}"
        self.spans.setdefault(owner, entity.span)
        self.expect("(")
        self.expect("min")
        lo = self.cardinality(False, owner)
        self.expect(",")
        self.expect("max")
        hi = self.cardinality(True, owner)
        self.expect(")")
        return entity.text, StructuralConstraint(lo, hi)

    def relationship(self) -> RelationshipType:
        self.expect("relationship")
        name = self.ident("a relationship name")
        self.spans.setdefault(name.text, name.span)
        self.expect("between")
        left, lc = self.side(name.text)
        self.expect("and")
        right, rc = self.side(name.text)
        self.expect(";")
        return RelationshipType(name.text, left, right, lc, rc)

    def model(self) -> ErModel:
        entities, relationships = [], []
        while self.tok.kind != "eof":
            if self.tok.text == "entity":
                entities.append(self.entity())
            elif self.tok.text == "relationship":
                relationships.append(self.relationship())
            else:
                raise self.fail("'entity' or 'relationship'")
        return ErModel(tuple(entities), tuple(relationships))


def parse_er(text: str) -> ErModel:
    """Parse DSL text into a validated model.

    Raises :class:`ParseError` carrying every diagnostic; syntax errors stop at
    the first one, semantic errors are all reported.
    """
    parser = _Parser(text)
    model = parser.model()
    violations = validate_model(model)
    if violations:
        fallback = parser.tokens[-1].span
        raise ParseError(
            [Diagnostic(v.code, f"{v.element}: {v.message}", parser.spans.get(v.element, fallback)) for v in violations]
        )
    return model


def render_er(model: ErModel) -> str:
    lines = []
    for e in model.entities:
        body = " ".join([f"key {e.key_attribute};", *(f"attr {a};" for a in e.attributes)])
        lines.append(f"entity {e.name} {{ {body} }}")
    for r in model.relationships:
        lc, rc = r.left_constraint, r.right_constraint
        lines.append(
            f"relationship {r.name} between {r.left_entity} (min {lc.min}, max {lc.max})"
            f" and {r.right_entity} (min {rc.min}, max {rc.max});"
        )
    return "".join(line + "\n" for line in lines)


def _paper_column(rel, col) -> str:
    text = col.name + ("*" if col.name in rel.primary_key else "")
    if col.role is ColumnRole.FOREIGN_KEY:
        fk = rel.foreign_key(col.name)
        text += f"→{fk.target_relation}.{fk.target_column}" + ("?" if fk.nullable else "")
    return text


def schema_to_dict(schema: RelationalSchema) -> dict:
    return {
        "relations": [
            {
                "name": r.name,
                "columns": [{"name": c.name, "role": c.role.value} for c in r.columns],
                "primary_key": [c for c in r.column_names if c in r.primary_key],
                "foreign_keys": [
                    {
                        "column": fk.column,
                        "target_relation": fk.target_relation,
                        "target_column": fk.target_column,
                        "nullable": fk.nullable,
                    }
                    for fk in r.foreign_keys
                ],
            }
            for r in schema.relations
        ],
        "relationship_encodings": [
            {"relationship": e.relationship, "encoding": e.kind.value, "relation": e.relation}
            for e in schema.relationship_encodings
        ],
    }


def dump_structured(data: object) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def render_rds(schema: RelationalSchema, format: Literal["paper", "structured"] = "paper") -> str:
    if format == "structured":
        return dump_structured(schema_to_dict(schema))
    if format != "paper":
        raise ValueError(f"unknown format {format!r}")
    return "".join(
        f"{r.name}[{', '.join(_paper_column(r, c) for c in r.columns)}]\n" for r in schema.relations
    )
