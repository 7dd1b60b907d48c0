"""Command-line front end.

Exit codes: 0 success/agreement, 1 parse, validation or usage problems,
2 oracle and analyzer disagree, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

from . import __version__
from .analysis import (
    PreservationReport,
    RelationshipReport,
    SlotCounts,
    Verdict,
    analyze,
    summarize,
)
from .core import ONE, Cardinality, ErModel, RelationshipType, card, constraint_slots
from .oracle import (
    DEFAULT_POOL_CAP,
    CapExceededError,
    Instance,
    OracleVerdict,
    class_of,
    describe_model,
    enumerate_family,
    enumerate_instances,
    family_for,
    instance_verdicts,
    inverse_image_verdicts,
)
from .text import ParseError, dump_structured, parse_er, render_rds
from .transform import NameCollisionError, transform

EXIT_OK, EXIT_INPUT, EXIT_DISAGREE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _max_samples(text: str) -> tuple[Cardinality, ...]:
    try:
        values = tuple(card(part.strip()) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid max sample list {text!r}")
    if not values or any(not v.is_unbounded and v.value < 1 for v in values):
        raise argparse.ArgumentTypeError("max samples must be integers >= 1 or N")
    return values


def _pool_size(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid pool size {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("pool size must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="erpreserve", description="ER-to-relational transformation auditor")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, help_text in (
        ("transform", "print the relational schema"),
        ("analyze", "report which constraint values survive the transformation"),
        ("verify", "check the analyzer against the brute-force oracles"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input_path", help="ER DSL file, or - for standard input")
        p.add_argument("--format", choices=("paper", "structured"), default="paper")
        if name == "verify":
            p.add_argument(
                "--oracle", choices=("inverse-image", "instances", "both"), default="both"
            )
            p.add_argument("--pool-size", type=_pool_size, default=2)
            p.add_argument("--max-samples", type=_max_samples, default=_max_samples("2,3,N"))
    return parser


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    input_path: str
    format: str = "paper"
    oracle: str = "both"
    pool_size: int = 2
    max_samples: tuple[Cardinality, ...] = (Cardinality(2), Cardinality(3), Cardinality(None))


# -- rendering ----------------------------------------------------------------


def _counts_text(c: SlotCounts) -> str:
    return f"exact={c.exact} lower_bound={c.lower_bound} lost={c.lost} loss_ratio={c.loss_ratio}"


def _counts_dict(c: SlotCounts) -> dict:
    return {
        "exact": c.exact,
        "lower_bound": c.lower_bound,
        "lost": c.lost,
        "loss_ratio": str(c.loss_ratio),
    }


def _verdict_dict(v: Verdict) -> dict:
    out: dict = {"kind": v.kind.value}
    if v.value is not None:
        out["value"] = str(v.value)
    if v.threshold is not None:
        out["threshold"] = v.threshold
    return out


def render_report(model: ErModel, report: PreservationReport, fmt: str) -> str:
    summary = summarize(report)
    if fmt == "structured":
        return dump_structured(
            {
                "relationships": [
                    {
                        "name": r.relationship,
                        "classification": str(r.classification),
                        "encoding": str(r.encoding),
                        "verdicts": [
                            {
                                "slot": sv.slot.value,
                                "model_value": str(value),
                                "verdict": _verdict_dict(sv.verdict),
                                "justification": sv.justification.value,
                            }
                            for sv, (_, value) in zip(
                                r.verdicts, constraint_slots(model.relationship(r.relationship))
                            )
                        ],
                        "summary": _counts_dict(summary.per_relationship[r.relationship]),
                    }
                    for r in report.relationships
                ],
                "totals": _counts_dict(summary.totals),
            }
        )
    lines = []
    for r in report.relationships:
        lines.append(f"relationship {r.relationship}: {r.classification}, {r.encoding}")
        values = constraint_slots(model.relationship(r.relationship))
        for sv, (_, value) in zip(r.verdicts, values):
            lines.append(
                f"  {sv.slot.value:<9} {str(value):>3}  {str(sv.verdict):<18} {sv.justification.value}"
            )
        lines.append("  " + _counts_text(summary.per_relationship[r.relationship]))
    lines.append("total: " + _counts_text(summary.totals))
    return "".join(line + "\n" for line in lines)


def _witness_text(witness: object) -> str:
    if isinstance(witness, ErModel):
        return describe_model(witness)
    return str(witness)


def _witness_json(witness: object) -> object:
    if isinstance(witness, ErModel):
        return describe_model(witness)
    if isinstance(witness, Instance):
        return {t.relation: [list(row) for row in t.rows] for t in witness.tables}
    return str(witness)


@dataclass
class _OracleRun:
    name: str
    detail: str
    verdicts: list[OracleVerdict]


def _verify_relationship(
    model: ErModel, rel: RelationshipType, analyzed: RelationshipReport, config: CliConfig
) -> tuple[list[_OracleRun], list[str]]:
    sub = model.restricted_to(rel)
    schema = transform(sub)
    runs = []
    if config.oracle in ("inverse-image", "both"):
        spec = family_for(model, rel, max_samples=(ONE, *config.max_samples))
        family = list(dict.fromkeys([*enumerate_family(spec), sub]))
        cls = class_of(inverse_image_verdicts(family), schema)
        runs.append(
            _OracleRun(
                "inverse-image",
                f"{len(family)} family models, {len(cls.members)} in this schema class",
                cls.verdicts,
            )
        )
    if config.oracle in ("instances", "both"):
        encoding = schema.encoding(rel.name)
        count = len(enumerate_instances(schema, config.pool_size))
        runs.append(
            _OracleRun(
                "instances",
                f"pool size {config.pool_size}, {count} legal instances",
                instance_verdicts(schema, encoding, config.pool_size),
            )
        )
    disagreements = []
    for run in runs:
        for ov, sv in zip(run.verdicts, analyzed.verdicts):
            if ov.verdict != sv.verdict:
                disagreements.append(
                    f"{ov.slot.value} ({run.name}: {ov.verdict}, analyzer: {sv.verdict})"
                )
    return runs, disagreements


def _verify(model: ErModel, config: CliConfig) -> tuple[str, bool]:
    report = analyze(model)
    agree_all = True
    results = []
    for rel in model.relationships:
        analyzed = report.for_relationship(rel.name)
        runs, disagreements = _verify_relationship(model, rel, analyzed, config)
        agree_all = agree_all and not disagreements
        results.append((rel, analyzed, runs, disagreements))

    if config.format == "structured":
        return (
            dump_structured(
                {
                    "relationships": [
                        {
                            "name": rel.name,
                            "analyzer": [
                                {"slot": sv.slot.value, "verdict": _verdict_dict(sv.verdict)}
                                for sv in analyzed.verdicts
                            ],
                            "oracles": [
                                {
                                    "oracle": run.name,
                                    "detail": run.detail,
                                    "verdicts": [
                                        {
                                            "slot": ov.slot.value,
                                            "verdict": _verdict_dict(ov.verdict),
                                            "witness": [_witness_json(w) for w in ov.witness],
                                        }
                                        for ov in run.verdicts
                                    ],
                                }
                                for run in runs
                            ],
                            "agree": not disagreements,
                            "disagreements": disagreements,
                        }
                        for rel, analyzed, runs, disagreements in results
                    ],
                    "agree": agree_all,
                }
            ),
            agree_all,
        )

    lines = []
    for rel, analyzed, runs, disagreements in results:
        lines.append(f"relationship {rel.name}: {analyzed.classification}, {analyzed.encoding}")
        lines.append("  analyzer: " + ", ".join(
            f"{sv.slot.value}={sv.verdict}" for sv in analyzed.verdicts
        ))
        for run in runs:
            lines.append(f"  {run.name} oracle ({run.detail}):")
            for ov in run.verdicts:
                lines.append(f"    {ov.slot.value:<9} {ov.verdict}")
                for w in ov.witness:
                    for i, text in enumerate(_witness_text(w).splitlines()):
                        lines.append(f"      {'witness: ' if i == 0 else '         '}{text}")
        if disagreements:
            lines.append(f"DISAGREE {rel.name}: " + "; ".join(disagreements))
        else:
            lines.append(f"AGREE {rel.name}: all four slots")
    return "".join(line + "\n" for line in lines), agree_all


# -- entry point --------------------------------------------------------------


def run(
    argv: Sequence[str] | None = None,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_INPUT
    config = CliConfig(**vars(args))

    try:
        if config.input_path == "-":
            text = stdin.read()
        else:
            with open(config.input_path, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        print(f"erpreserve: cannot read {config.input_path}: {exc}", file=stderr)
        return EXIT_INPUT

    try:
        model = parse_er(text)
        schema = transform(model)
    except ParseError as exc:
        for diag in exc.diagnostics:
            print(f"{config.input_path}:{diag}", file=stderr)
        return EXIT_INPUT
    except NameCollisionError as exc:
        print(f"{config.input_path}: name-collision: {exc}", file=stderr)
        return EXIT_INPUT

    if config.subcommand == "transform":
        stdout.write(render_rds(schema, config.format))
        return EXIT_OK
    if config.subcommand == "analyze":
        stdout.write(render_report(model, analyze(model), config.format))
        return EXIT_OK

    if config.pool_size > DEFAULT_POOL_CAP:
        print(
            f"erpreserve: pool size {config.pool_size} exceeds the cap of {DEFAULT_POOL_CAP}",
            file=stderr,
        )
        return EXIT_CAP
    try:
        output, agree = _verify(model, config)
    except CapExceededError as exc:
        print(f"erpreserve: {exc}", file=stderr)
        return EXIT_CAP
    stdout.write(output)
    return EXIT_OK if agree else EXIT_DISAGREE


def main() -> None:
    sys.exit(run())


__all__ = ["CliConfig", "build_parser", "main", "render_report", "run"]
