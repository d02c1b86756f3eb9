"""End-to-end training: statistics, trees, predicates, mining, rules.

The whole pipeline is deterministic: tree fitting breaks ties by
column order and threshold, catalogs list categorical predicates
before continuous ones, and mined rules come out in canonical order.
The worker count only parallelizes tree fitting across target columns
and never changes the result.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .data import Dataset, compute_column_stats
from .mining import (
    MiningConfig,
    RuleSet,
    boundary_rules,
    filter_closed,
    generate_rules,
    mine_frequent_sets,
)
from .predicates import PredicateCatalog, gen_categorical_predicates, gen_continuous_predicates
from .tree import DecisionTree, extract_cutoffs, fit_classification_tree, fit_regression_tree


@dataclass(frozen=True)
class TrainConfig:
    theta: float
    gamma: float
    max_set_size: int | None = 6
    workers: int | None = None


@dataclass
class TrainResult:
    ruleset: RuleSet
    timings: dict[str, float]
    warnings: list[str]
    trees: list[DecisionTree]


def _fit_trees(dataset: Dataset, min_leaf: int, workers: int | None) -> tuple[list[DecisionTree], list[str]]:
    schema = dataset.schema
    warnings: list[str] = []
    jobs: list[tuple[str, str]] = []
    if schema.continuous_names:
        jobs += [(name, "classification") for name in schema.categorical_names]
    else:
        warnings += [
            f"column {name!r}: no continuous columns to split on; tree skipped"
            for name in schema.categorical_names
        ]
    jobs += [(name, "regression") for name in schema.continuous_names]

    def run(job: tuple[str, str]) -> DecisionTree | None:
        name, kind = job
        if kind == "classification":
            return fit_classification_tree(dataset, name, min_leaf)
        return fit_regression_tree(dataset, name, min_leaf)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(run, jobs))
    else:
        fitted = [run(job) for job in jobs]

    trees: list[DecisionTree] = []
    for (name, kind), tree in zip(jobs, fitted):
        if tree is None:
            warnings.append(f"column {name!r}: no other continuous column to regress on; tree skipped")
        else:
            trees.append(tree)
    return trees, warnings


def train_ruleset(dataset: Dataset, config: TrainConfig) -> TrainResult:
    """Learn an invariant ruleset from anomaly-free training data.

    Stages: column statistics; decision trees (one classification tree
    per categorical column, one regression tree per continuous column,
    leaf floor |D| * theta); predicate catalogs; frequent-set mining and
    closedness filtering; rule generation plus per-column boundary
    rules.  Timings per stage are returned in seconds.
    """
    mining_config = MiningConfig(config.theta, config.gamma, config.max_set_size)
    timings: dict[str, float] = {}
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    stats = compute_column_stats(dataset)
    timings["stats"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    min_leaf = math.floor(dataset.row_count * config.theta)
    trees, warnings = _fit_trees(dataset, min_leaf, config.workers)
    timings["trees"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cutoffs = extract_cutoffs(trees)
    catalog = PredicateCatalog.concat(
        gen_categorical_predicates(dataset, config.theta),
        gen_continuous_predicates(dataset, cutoffs, config.theta),
    )
    timings["predicates"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    frequent = mine_frequent_sets(dataset, catalog, mining_config)
    closed = filter_closed(frequent)
    timings["mining"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rules = generate_rules(closed, dataset, catalog)
    rules.extend(boundary_rules(stats, dataset.schema))
    timings["rules"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_start

    ruleset = RuleSet(
        schema=dataset.schema.copy(),
        stats=stats,
        theta=config.theta,
        gamma=config.gamma,
        max_set_size=config.max_set_size,
        catalog=catalog,
        rules=rules,
    )
    return TrainResult(ruleset=ruleset, timings=timings, warnings=warnings, trees=trees)
