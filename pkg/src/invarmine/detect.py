"""Rule-based anomaly scoring, detection, and explanation.

A rule is violated on a row when every antecedent predicate holds and
at least one consequent predicate fails.  The anomaly score of a row
is the sum of the supports of its violated rules, so breaking a
boundary rule adds a full point and breaking a mined rule adds its
training support.  A row is reported anomalous when its score strictly
exceeds the threshold phi.  Individual rules can be deactivated by id
without retraining.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import DataError, DataPoint, Dataset
from .mining import BOUNDARY, InvariantRule, RuleSet
from .predicates import Predicate


class SchemaMismatchError(DataError):
    """Dataset columns do not match the columns the rules were trained on."""


@dataclass(frozen=True)
class DetectionConfig:
    phi: float = 0.0
    ignore_rules: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.phi < 0.0:
            raise DataError(f"phi must be non-negative, got {self.phi}")


@dataclass(frozen=True)
class RuleViolation:
    rule_id: int
    rule: InvariantRule
    failed: tuple[Predicate, ...]  # the consequent predicates that did not hold


@dataclass
class AnomalyReport:
    row: int
    score: float
    is_anomaly: bool
    violations: list[RuleViolation]


def _check_schema(ruleset: RuleSet, dataset: Dataset) -> None:
    if ruleset.schema.fingerprint() != dataset.schema.fingerprint():
        raise SchemaMismatchError(
            "dataset columns do not match the rule file "
            f"(expected {ruleset.schema!r}, got {dataset.schema!r})"
        )


def _active_rules(ruleset: RuleSet, ignore_rules: frozenset[int]) -> list[tuple[int, InvariantRule]]:
    for rid in ignore_rules:
        if not 0 <= rid < len(ruleset.rules):
            raise DataError(f"no rule with id {rid}")
    return [(rid, r) for rid, r in enumerate(ruleset.rules) if rid not in ignore_rules]


def score_dataset(
    ruleset: RuleSet, dataset: Dataset, ignore_rules: frozenset[int] = frozenset()
) -> np.ndarray:
    """Anomaly score per row, vectorized over the whole dataset."""
    _check_schema(ruleset, dataset)
    n = dataset.row_count
    scores = np.zeros(n, dtype=np.float64)
    cache: dict[Predicate, np.ndarray] = {}

    def mask_of(p: Predicate) -> np.ndarray:
        got = cache.get(p)
        if got is None:
            got = p.mask(dataset)
            cache[p] = got
        return got

    for _, rule in _active_rules(ruleset, ignore_rules):
        triggered = np.ones(n, dtype=bool)
        for p in rule.antecedent:
            triggered &= mask_of(p)
        consequent_ok = np.ones(n, dtype=bool)
        for p in rule.consequent:
            consequent_ok &= mask_of(p)
        scores += np.where(triggered & ~consequent_ok, rule.support, 0.0)
    return scores


def score_point(
    ruleset: RuleSet, point: DataPoint, ignore_rules: frozenset[int] = frozenset()
) -> float:
    """Anomaly score of a single row, computed predicate by predicate."""
    score = 0.0
    for _, rule in _active_rules(ruleset, ignore_rules):
        if all(p.holds(point) for p in rule.antecedent) and not all(
            p.holds(point) for p in rule.consequent
        ):
            score += rule.support
    return score


def detect(ruleset: RuleSet, dataset: Dataset, config: DetectionConfig) -> list[AnomalyReport]:
    """Score every row and collect its violated rules.

    Reports come back in row order, one per row, flagged anomalous when
    score > phi.  Violations list only the rules the row actually
    breaks, in rule-id order, each with the consequent predicates that
    failed.
    """
    _check_schema(ruleset, dataset)
    n = dataset.row_count
    cache: dict[Predicate, np.ndarray] = {}

    def mask_of(p: Predicate) -> np.ndarray:
        got = cache.get(p)
        if got is None:
            got = p.mask(dataset)
            cache[p] = got
        return got

    scores = np.zeros(n, dtype=np.float64)
    per_row: list[list[RuleViolation]] = [[] for _ in range(n)]
    for rid, rule in _active_rules(ruleset, config.ignore_rules):
        triggered = np.ones(n, dtype=bool)
        for p in rule.antecedent:
            triggered &= mask_of(p)
        failed_masks = [(p, ~mask_of(p)) for p in rule.consequent]
        any_failed = np.zeros(n, dtype=bool)
        for _, fm in failed_masks:
            any_failed |= fm
        violated = triggered & any_failed
        scores[violated] += rule.support
        for row in np.nonzero(violated)[0]:
            failed = tuple(p for p, fm in failed_masks if fm[row])
            per_row[row].append(RuleViolation(rule_id=rid, rule=rule, failed=failed))
    return [
        AnomalyReport(
            row=i,
            score=float(scores[i]),
            is_anomaly=bool(scores[i] > config.phi),
            violations=per_row[i],
        )
        for i in range(n)
    ]


@dataclass
class ExplanationEntry:
    rule_id: int
    rule_text: str
    columns: tuple[str, ...]
    conditions: tuple[str, ...]
    evidence: str


@dataclass
class Explanation:
    row: int
    score: float
    entries: list[ExplanationEntry]

    def text(self) -> str:
        lines = [f"row {self.row}: anomaly score {self.score:g}"]
        for e in self.entries:
            lines.append(f"- rule {e.rule_id}: {e.rule_text}")
            lines.append(f"  implicated columns: {', '.join(e.columns)}")
            lines.append(f"  failed conditions: {'; '.join(e.conditions)}")
            lines.append(f"  {e.evidence}")
        return "\n".join(lines)


def explain(report: AnomalyReport, ruleset: RuleSet) -> Explanation:
    """Answer, per violated rule: which columns are implicated, what
    condition they failed, and why the rule was believed.

    Raises DataError when the report has no violations to explain.
    """
    if not report.violations:
        raise DataError(f"row {report.row} violates no rules; nothing to explain")
    schema = ruleset.schema
    entries: list[ExplanationEntry] = []
    for v in report.violations:
        columns: list[str] = []
        for p in v.failed:
            for c in p.columns():
                if c not in columns:
                    columns.append(c)
        conditions = tuple(p.render(schema) for p in v.failed)
        if v.rule.kind == BOUNDARY:
            evidence = (
                f"every training row satisfied {conditions[0]!r}; "
                "this row falls outside that envelope"
            )
        else:
            ant = " and ".join(repr(p.render(schema)) for p in v.rule.antecedent)
            held = " and ".join(repr(p.render(schema)) for p in v.failed)
            evidence = (
                f"in training, whenever {ant} held ({v.rule.support:.1%} of rows), "
                f"{held} always held as well; this row meets the condition but breaks the outcome"
            )
        entries.append(
            ExplanationEntry(
                rule_id=v.rule_id,
                rule_text=ruleset.rule_text(v.rule),
                columns=tuple(columns),
                conditions=conditions,
                evidence=evidence,
            )
        )
    return Explanation(row=report.row, score=report.score, entries=entries)


def write_reports(reports: list[AnomalyReport], ruleset: RuleSet, path: str) -> None:
    """One JSON object per row: score, flag, and violated rule details."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            payload = {
                "row": r.row,
                "score": r.score,
                "is_anomaly": r.is_anomaly,
                "violations": [
                    {
                        "rule_id": v.rule_id,
                        "rule": ruleset.rule_text(v.rule),
                        "support": v.rule.support,
                        "failed": [p.render(ruleset.schema) for p in v.failed],
                    }
                    for v in r.violations
                ],
            }
            fh.write(json.dumps(payload))
            fh.write("\n")
