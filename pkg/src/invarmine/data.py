"""Tabular dataset ingestion, column statistics, and predicate-set support.

Datasets are column-oriented: continuous columns are float64 arrays,
categorical columns are int64 code arrays backed by a per-column value
dictionary on the schema.  Categorical values are interned in first-seen
order, so the same schema object can ingest a training file and later a
test file; values unseen at training time receive fresh codes and thus
never match predicates built from training codes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"
KINDS = (CONTINUOUS, CATEGORICAL)


class DataError(ValueError):
    """Raised for schema violations and ingestion failures."""


@dataclass
class Column:
    """One declared column: a name, a kind, and (if categorical) its values."""

    name: str
    kind: str
    values: list[str]

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise DataError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CONTINUOUS and self.values:
            raise DataError(f"column {self.name!r}: continuous columns carry no value dictionary")


class Schema:
    """Ordered column declarations plus categorical value dictionaries."""

    def __init__(self, columns: list[Column]):
        if not columns:
            raise DataError("schema has no columns")
        names = [c.name for c in columns]
        if len(set(names)) != len(names):
            raise DataError("schema has duplicate column names")
        self.columns = list(columns)
        self._by_name = {c.name: c for c in self.columns}
        # code tables mirror Column.values; intern() keeps both in sync
        self._codes: dict[str, dict[str, int]] = {
            c.name: {v: i for i, v in enumerate(c.values)}
            for c in self.columns
            if c.kind == CATEGORICAL
        }

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def continuous_names(self) -> list[str]:
        return [c.name for c in self.columns if c.kind == CONTINUOUS]

    @property
    def categorical_names(self) -> list[str]:
        return [c.name for c in self.columns if c.kind == CATEGORICAL]

    def column(self, name: str) -> Column:
        try:
            return self._by_name[name]
        except KeyError:
            raise DataError(f"unknown column {name!r}") from None

    def kind(self, name: str) -> str:
        return self.column(name).kind

    def intern(self, name: str, value: str) -> int:
        """Return the code for a categorical value, extending the dictionary."""
        table = self._codes[name]
        code = table.get(value)
        if code is None:
            code = len(table)
            table[value] = code
            self._by_name[name].values.append(value)
        return code

    def code_for(self, name: str, value: str) -> int | None:
        """Look up a categorical value's code without extending the dictionary."""
        return self._codes[name].get(value)

    def value_of(self, name: str, code: int) -> str:
        values = self.column(name).values
        if not 0 <= code < len(values):
            raise DataError(f"column {name!r}: no value with code {code}")
        return values[code]

    def copy(self) -> "Schema":
        return Schema([Column(c.name, c.kind, list(c.values)) for c in self.columns])

    def fingerprint(self) -> str:
        """Hash of column names and kinds; value dictionaries do not count."""
        payload = json.dumps([[c.name, c.kind] for c in self.columns])
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_dict(self) -> dict:
        out = []
        for c in self.columns:
            entry: dict = {"name": c.name, "kind": c.kind}
            if c.kind == CATEGORICAL:
                entry["values"] = list(c.values)
            out.append(entry)
        return {"columns": out}

    @classmethod
    def from_dict(cls, payload: dict) -> "Schema":
        if not isinstance(payload, dict) or "columns" not in payload:
            raise DataError("schema JSON must be an object with a 'columns' list")
        columns = []
        for entry in payload["columns"]:
            name = entry.get("name")
            kind = entry.get("kind")
            if not isinstance(name, str) or not name:
                raise DataError("schema column entry lacks a name")
            values = entry.get("values", [])
            columns.append(Column(name, kind, list(values)))
        return cls(columns)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Schema) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        cols = ", ".join(f"{c.name}:{c.kind}" for c in self.columns)
        return f"Schema({cols})"


def load_schema(path: str) -> Schema:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON ({exc})") from None
    return Schema.from_dict(payload)


def save_schema(schema: Schema, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(schema.to_dict(), fh, indent=2)
        fh.write("\n")


@dataclass
class DataPoint:
    """One row: continuous values as floats, categorical values as codes."""

    values: dict[str, float | int]

    def __getitem__(self, name: str) -> float | int:
        try:
            return self.values[name]
        except KeyError:
            raise DataError(f"unknown column {name!r}") from None


class Dataset:
    """A fixed table over a schema; columns are numpy arrays."""

    def __init__(self, schema: Schema, arrays: dict[str, np.ndarray]):
        if set(arrays) != set(schema.names):
            raise DataError("dataset arrays do not match schema columns")
        lengths = {len(a) for a in arrays.values()}
        if len(lengths) != 1:
            raise DataError("dataset columns have unequal lengths")
        self.schema = schema
        self._arrays = arrays
        self.row_count = lengths.pop()

    @classmethod
    def from_columns(cls, schema: Schema, columns: dict[str, list]) -> "Dataset":
        """Build a dataset from python lists; categorical entries are value strings."""
        arrays: dict[str, np.ndarray] = {}
        for col in schema.columns:
            raw = columns[col.name]
            if col.kind == CONTINUOUS:
                arr = np.asarray(raw, dtype=np.float64)
                if not np.all(np.isfinite(arr)):
                    raise DataError(f"column {col.name!r}: non-finite value")
                arrays[col.name] = arr
            else:
                codes = np.asarray([schema.intern(col.name, str(v)) for v in raw], dtype=np.int64)
                arrays[col.name] = codes
        return cls(schema, arrays)

    def column(self, name: str) -> np.ndarray:
        try:
            return self._arrays[name]
        except KeyError:
            raise DataError(f"unknown column {name!r}") from None

    def row(self, index: int) -> DataPoint:
        if not 0 <= index < self.row_count:
            raise DataError(f"row index {index} out of range (0..{self.row_count - 1})")
        values: dict[str, float | int] = {}
        for col in self.schema.columns:
            cell = self._arrays[col.name][index]
            values[col.name] = float(cell) if col.kind == CONTINUOUS else int(cell)
        return DataPoint(values)

    def iter_rows(self):
        for i in range(self.row_count):
            yield self.row(i)

    def take(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.schema, {n: a[idx] for n, a in self._arrays.items()})


def load_csv(path: str, schema: Schema) -> Dataset:
    """Parse a comma-separated file against a schema.

    The header must contain every schema column (extra file columns are
    ignored).  Continuous cells must parse as finite numbers; empty cells
    are rejected.  Categorical values are interned into the schema's
    dictionaries, extending them in place.  Errors name the offending
    zero-based data row and column.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        positions: dict[str, int] = {}
        for pos, name in enumerate(header):
            if name in positions and name in schema.names:
                raise DataError(f"{path}: duplicate header column {name!r}")
            positions.setdefault(name, pos)
        for name in schema.names:
            if name not in positions:
                raise DataError(f"{path}: header omits schema column {name!r}")

        cont_cols = [(c.name, positions[c.name]) for c in schema.columns if c.kind == CONTINUOUS]
        cat_cols = [(c.name, positions[c.name]) for c in schema.columns if c.kind == CATEGORICAL]
        cont_data: dict[str, list[float]] = {n: [] for n, _ in cont_cols}
        cat_data: dict[str, list[int]] = {n: [] for n, _ in cat_cols}

        width = max(positions[n] for n in schema.names) + 1
        for i, record in enumerate(reader):
            if len(record) < width:
                raise DataError(f"{path}: row {i}: expected at least {width} fields, got {len(record)}")
            for name, pos in cont_cols:
                cell = record[pos]
                if cell == "":
                    raise DataError(f"{path}: row {i}, column {name!r}: missing value")
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(f"{path}: row {i}, column {name!r}: cannot parse {cell!r} as a number") from None
                if not math.isfinite(value):
                    raise DataError(f"{path}: row {i}, column {name!r}: non-finite value {cell!r}")
                cont_data[name].append(value)
            for name, pos in cat_cols:
                cell = record[pos]
                if cell == "":
                    raise DataError(f"{path}: row {i}, column {name!r}: missing value")
                cat_data[name].append(schema.intern(name, cell))

    arrays: dict[str, np.ndarray] = {}
    for name, _ in cont_cols:
        arrays[name] = np.asarray(cont_data[name], dtype=np.float64)
    for name, _ in cat_cols:
        arrays[name] = np.asarray(cat_data[name], dtype=np.int64)
    if not arrays or len(next(iter(arrays.values()))) == 0:
        raise DataError(f"{path}: no data rows")
    return Dataset(schema, arrays)


def format_number(value: float) -> str:
    """Render a float the way rule files and CSV output spell it.

    Integral values print without a decimal point; everything else uses
    the shortest representation that parses back to the same float.
    """
    v = float(value)
    if math.isfinite(v) and v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def write_csv(dataset: Dataset, path: str) -> None:
    """Serialize a dataset; continuous cells round-trip through repr."""
    schema = dataset.schema
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(schema.names)
        columns = []
        for col in schema.columns:
            arr = dataset.column(col.name)
            if col.kind == CONTINUOUS:
                columns.append([repr(float(v)) for v in arr])
            else:
                columns.append([schema.value_of(col.name, int(v)) for v in arr])
        for i in range(dataset.row_count):
            writer.writerow([column[i] for column in columns])


@dataclass(frozen=True)
class ContinuousStats:
    mean: float
    std: float
    minimum: float
    maximum: float


@dataclass
class ColumnStats:
    """Per-column training statistics used to build boundary rules."""

    continuous: dict[str, ContinuousStats]
    categorical: dict[str, list[str]]


def compute_column_stats(dataset: Dataset) -> ColumnStats:
    """Mean, population standard deviation, and extrema per continuous
    column; the set of seen values per categorical column."""
    if dataset.row_count == 0:
        raise DataError("cannot compute statistics on an empty dataset")
    continuous: dict[str, ContinuousStats] = {}
    categorical: dict[str, list[str]] = {}
    for col in dataset.schema.columns:
        arr = dataset.column(col.name)
        if col.kind == CONTINUOUS:
            continuous[col.name] = ContinuousStats(
                mean=float(arr.mean()),
                std=float(arr.std()),
                minimum=float(arr.min()),
                maximum=float(arr.max()),
            )
        else:
            codes = sorted(int(c) for c in np.unique(arr))
            categorical[col.name] = [dataset.schema.value_of(col.name, c) for c in codes]
    return ColumnStats(continuous, categorical)


def load_labels(path: str) -> np.ndarray:
    """Parse a labels file: one 0 or 1 per line, anomalies marked 1."""
    labels: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            text = line.strip()
            if not text:
                continue
            if text not in ("0", "1"):
                raise DataError(f"{path}: line {i}: label must be 0 or 1, got {text!r}")
            labels.append(int(text))
    if not labels:
        raise DataError(f"{path}: no labels")
    return np.asarray(labels, dtype=np.int64)


def support(dataset: Dataset, predicates) -> float:
    """Fraction of rows on which every predicate in the set holds.

    The empty set has support 1.  Rows are a multiset: duplicates count
    separately.
    """
    if dataset.row_count == 0:
        raise DataError("support is undefined on an empty dataset")
    mask = np.ones(dataset.row_count, dtype=bool)
    for p in predicates:
        mask &= p.mask(dataset)
    return int(np.count_nonzero(mask)) / dataset.row_count
