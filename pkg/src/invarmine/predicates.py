"""Predicate forms and catalog generation.

A predicate is a boolean test on one row.  Catalogs are built from
training data so that every member's training support strictly exceeds
the support floor theta:

* categorical columns yield equality predicates for common values,
  while rare values are pooled left to right into disjunctions that
  clear the floor (a final pool absorbs a tail too weak to stand
  alone);
* continuous columns yield half-open interval predicates [lo, hi)
  whose endpoints come from decision-tree cut-offs, scanned in
  ascending order so that every emitted bin clears the floor.

Support is always the fraction of training rows satisfying the
predicate; comparisons against theta are strict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    CATEGORICAL,
    DataError,
    DataPoint,
    Dataset,
    Schema,
    format_number,
)


@dataclass(frozen=True)
class CategoricalEquals:
    """column = value (categorical codes)."""

    column: str
    code: int

    def mask(self, dataset: Dataset) -> np.ndarray:
        return dataset.column(self.column) == self.code

    def holds(self, point: DataPoint) -> bool:
        return point[self.column] == self.code

    def columns(self) -> tuple[str, ...]:
        return (self.column,)

    def render(self, schema: Schema) -> str:
        return f"{self.column} = {schema.value_of(self.column, self.code)}"


@dataclass(frozen=True)
class CategoricalDisjunction:
    """(col_a = v1) or (col_b = v2) or ...; at least two branches."""

    items: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if len(self.items) < 2:
            raise DataError("disjunction needs at least two branches")
        if len(set(self.items)) != len(self.items):
            raise DataError("disjunction has duplicate branches")

    def mask(self, dataset: Dataset) -> np.ndarray:
        out = np.zeros(dataset.row_count, dtype=bool)
        for column, code in self.items:
            out |= dataset.column(column) == code
        return out

    def holds(self, point: DataPoint) -> bool:
        return any(point[column] == code for column, code in self.items)

    def columns(self) -> tuple[str, ...]:
        seen: list[str] = []
        for column, _ in self.items:
            if column not in seen:
                seen.append(column)
        return tuple(seen)

    def render(self, schema: Schema) -> str:
        return " | ".join(f"{c} = {schema.value_of(c, v)}" for c, v in self.items)


@dataclass(frozen=True)
class Interval:
    """lower <= column < upper; either bound may be infinite."""

    column: str
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise DataError(f"empty interval [{self.lower}, {self.upper})")

    def mask(self, dataset: Dataset) -> np.ndarray:
        arr = dataset.column(self.column)
        return (arr >= self.lower) & (arr < self.upper)

    def holds(self, point: DataPoint) -> bool:
        return self.lower <= point[self.column] < self.upper

    def columns(self) -> tuple[str, ...]:
        return (self.column,)

    def render(self, schema: Schema) -> str:
        if self.lower == float("-inf"):
            return f"{self.column} < {format_number(self.upper)}"
        if self.upper == float("inf"):
            return f"{self.column} >= {format_number(self.lower)}"
        return f"{format_number(self.lower)} <= {self.column} < {format_number(self.upper)}"


@dataclass(frozen=True)
class Range:
    """low <= column <= high, both bounds finite and inclusive."""

    column: str
    low: float
    high: float

    def __post_init__(self) -> None:
        if not self.low <= self.high:
            raise DataError(f"empty range [{self.low}, {self.high}]")

    def mask(self, dataset: Dataset) -> np.ndarray:
        arr = dataset.column(self.column)
        return (arr >= self.low) & (arr <= self.high)

    def holds(self, point: DataPoint) -> bool:
        return self.low <= point[self.column] <= self.high

    def columns(self) -> tuple[str, ...]:
        return (self.column,)

    def render(self, schema: Schema) -> str:
        return f"{format_number(self.low)} <= {self.column} <= {format_number(self.high)}"


@dataclass(frozen=True)
class Membership:
    """column's value is one of a fixed set of codes."""

    column: str
    codes: frozenset[int]

    def __post_init__(self) -> None:
        if not self.codes:
            raise DataError("membership set is empty")

    def mask(self, dataset: Dataset) -> np.ndarray:
        return np.isin(dataset.column(self.column), sorted(self.codes))

    def holds(self, point: DataPoint) -> bool:
        return point[self.column] in self.codes

    def columns(self) -> tuple[str, ...]:
        return (self.column,)

    def render(self, schema: Schema) -> str:
        values = sorted(schema.value_of(self.column, c) for c in self.codes)
        return f"{self.column} in {{{','.join(values)}}}"


Predicate = CategoricalEquals | CategoricalDisjunction | Interval | Range | Membership


class PredicateCatalog:
    """Ordered predicate list with cached training supports."""

    def __init__(self, pairs):
        self.predicates: list[Predicate] = []
        self.supports: list[float] = []
        for pred, sup in pairs:
            self.predicates.append(pred)
            self.supports.append(sup)

    def __len__(self) -> int:
        return len(self.predicates)

    def pairs(self) -> list[tuple[Predicate, float]]:
        return list(zip(self.predicates, self.supports))

    @classmethod
    def concat(cls, *catalogs: "PredicateCatalog") -> "PredicateCatalog":
        pairs: list[tuple[Predicate, float]] = []
        for c in catalogs:
            pairs.extend(c.pairs())
        return cls(pairs)


def _fraction(count: int, n: int) -> float:
    return int(count) / n


def gen_categorical_predicates(dataset: Dataset, theta: float) -> PredicateCatalog:
    """Equality predicates for common values, pooled disjunctions for the rest.

    Values are visited in code order per column, columns in schema
    order.  A value with support > theta becomes an equality predicate;
    the others are queued in encounter order.  The queue is then pooled
    left to right: as soon as the current pool's support clears theta,
    it is emitted and a new pool starts, unless the values left behind
    could not clear theta as one disjunction, in which case they are
    merged into the pool, which is emitted as the final predicate.  A
    queue whose total support never clears theta yields nothing.

    Pools can span columns, so pool support is computed on row masks,
    not by summing per-value counts.  Every emitted disjunction has at
    least two branches: queued values have support <= theta, so no
    single-value pool can clear the floor.
    """
    n = dataset.row_count
    predicates: list[tuple[Predicate, float]] = []
    queue: list[tuple[str, int, np.ndarray]] = []  # (column, code, row mask)

    for col in dataset.schema.columns:
        if col.kind != CATEGORICAL:
            continue
        arr = dataset.column(col.name)
        counts = np.bincount(arr, minlength=len(col.values))
        for code in range(len(col.values)):
            count = int(counts[code])
            if count == 0:
                continue
            if _fraction(count, n) > theta:
                predicates.append((CategoricalEquals(col.name, code), _fraction(count, n)))
            else:
                queue.append((col.name, code, arr == code))

    total = len(queue)
    if total >= 2:
        # suffix_support[j] = support of (queue[j] | ... | queue[total-1])
        suffix_support = [0.0] * (total + 1)
        running = np.zeros(n, dtype=bool)
        for j in range(total - 1, -1, -1):
            running = running | queue[j][2]
            suffix_support[j] = _fraction(np.count_nonzero(running), n)

        k = 0
        pool_mask = queue[0][2].copy()
        for j in range(1, total):
            pool_mask |= queue[j][2]
            pool_support = _fraction(np.count_nonzero(pool_mask), n)
            if pool_support > theta:
                if suffix_support[j + 1] > theta:
                    items = tuple((c, v) for c, v, _ in queue[k : j + 1])
                    predicates.append((CategoricalDisjunction(items), pool_support))
                    k = j + 1
                    pool_mask = np.zeros(n, dtype=bool)
                else:
                    items = tuple((c, v) for c, v, _ in queue[k:])
                    predicates.append((CategoricalDisjunction(items), suffix_support[k]))
                    break

    return PredicateCatalog(predicates)


def gen_continuous_predicates(
    dataset: Dataset, cutoffs: dict[str, list[float]], theta: float
) -> PredicateCatalog:
    """Half-open bins over cut-off values, one ascending scan per column.

    The scan keeps an anchor, initially unset.  While unset, the prefix
    (-inf, tau_j) is emitted at the first cut-off where it clears theta,
    anchoring there.  Once anchored, the running bin [anchor, tau_j) is
    emitted when it clears theta, either moving the anchor to tau_j or,
    if the remaining tail [tau_j, inf) cannot clear theta on its own,
    widening into the open tail [anchor, inf) and ending the scan.  An
    open tail left over at the end of the scan is emitted only when it
    clears theta itself; a scan that never anchors emits nothing.
    """
    n = dataset.row_count
    predicates: list[tuple[Predicate, float]] = []
    for column in dataset.schema.continuous_names:
        taus = cutoffs.get(column, [])
        if not taus:
            continue
        arr = dataset.column(column)
        anchor: float | None = None
        broke = False
        for tau in taus:
            if anchor is None:
                sup = _fraction(np.count_nonzero(arr < tau), n)
                if sup > theta:
                    predicates.append((Interval(column, float("-inf"), tau), sup))
                    anchor = tau
                continue
            sup = _fraction(np.count_nonzero((arr >= anchor) & (arr < tau)), n)
            if sup > theta:
                tail = _fraction(np.count_nonzero(arr >= tau), n)
                if tail > theta:
                    predicates.append((Interval(column, anchor, tau), sup))
                    anchor = tau
                else:
                    full = _fraction(np.count_nonzero(arr >= anchor), n)
                    predicates.append((Interval(column, anchor, float("inf")), full))
                    broke = True
                    break
        if anchor is not None and not broke:
            tail = _fraction(np.count_nonzero(arr >= anchor), n)
            if tail > theta:
                predicates.append((Interval(column, anchor, float("inf")), tail))
    return PredicateCatalog(predicates)
