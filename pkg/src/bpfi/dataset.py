"""Discrete tabular data model, fixed-draw materialization and binning."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .exceptions import (
    EmptyColumn,
    InfeasibleDraw,
    LengthMismatch,
    NonFiniteValue,
    UnknownFeature,
)

__all__ = [
    "BinningRule",
    "Column",
    "DiscreteDataset",
    "SyntheticSpec",
    "apply_bin_edges",
    "bin_column",
    "encode_values",
    "fit_bin_edges",
    "materialize",
    "read_csv",
]


def encode_values(values: Iterable[Any]) -> tuple[np.ndarray, tuple]:
    """Dictionary-encode raw values into dense integer codes.

    The dictionary is sorted when the values are mutually comparable and
    falls back to first-appearance order otherwise.
    """
    values = list(values)
    distinct = list(dict.fromkeys(values))
    try:
        distinct = sorted(distinct)
    except TypeError:
        pass
    index = {v: i for i, v in enumerate(distinct)}
    codes = np.fromiter((index[v] for v in values), dtype=np.int64, count=len(values))
    return codes, tuple(distinct)


@dataclass(frozen=True, eq=False)
class Column:
    """A named categorical column: ``values[codes[r]]`` is the raw value of row ``r``."""

    name: str
    codes: np.ndarray
    values: tuple

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64, copy=True)
        if codes.ndim != 1:
            raise ValueError(f"column {self.name!r} must be one-dimensional")
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.values)):
            raise ValueError(f"column {self.name!r} has codes outside its value dictionary")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "values", tuple(self.values))

    @classmethod
    def from_values(cls, name: str, values: Iterable[Any]) -> "Column":
        codes, dictionary = encode_values(values)
        return cls(name, codes, dictionary)

    def __len__(self) -> int:
        return len(self.codes)

    def raw(self) -> list:
        return [self.values[c] for c in self.codes]

    @property
    def n_distinct(self) -> int:
        return int(np.unique(self.codes).size)


@dataclass(frozen=True, eq=False)
class DiscreteDataset:
    """Immutable table of categorical feature columns plus one target column."""

    features: tuple[Column, ...]
    target: Column

    def __post_init__(self):
        features = tuple(self.features)
        object.__setattr__(self, "features", features)
        n = len(self.target)
        if n == 0:
            raise EmptyColumn("dataset has no rows")
        names = [c.name for c in features]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate feature names in {names}")
        if self.target.name in names:
            raise ValueError(f"target name {self.target.name!r} is also a feature name")
        for col in features:
            if len(col) != n:
                raise LengthMismatch(
                    f"column {col.name!r} has {len(col)} rows, target has {n}"
                )

    @classmethod
    def from_columns(
        cls,
        features: Mapping[str, Sequence[Any]],
        target: tuple[str, Sequence[Any]],
    ) -> "DiscreteDataset":
        """Build a dataset from raw columns, e.g.
        ``DiscreteDataset.from_columns({"X1": [0, 1]}, ("Y", [0, 1]))``."""
        cols = tuple(Column.from_values(name, vals) for name, vals in features.items())
        return cls(cols, Column.from_values(*target))

    @property
    def n_samples(self) -> int:
        return len(self.target)

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.features)

    @property
    def target_name(self) -> str:
        return self.target.name

    @property
    def feature_codes(self) -> np.ndarray:
        """Codes as an ``(n_samples, n_features)`` integer matrix."""
        if not self.features:
            return np.empty((self.n_samples, 0), dtype=np.int64)
        return np.column_stack([c.codes for c in self.features])

    def column(self, name: str) -> Column:
        for col in self.features:
            if col.name == name:
                return col
        if name == self.target.name:
            return self.target
        raise UnknownFeature(name)

    def feature_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise UnknownFeature(name) from None

    def restrict(self, subset: Iterable[str]) -> "DiscreteDataset":
        """Keep only the named features (in dataset order); the target is untouched."""
        wanted = set(subset)
        unknown = wanted - set(self.feature_names)
        if unknown:
            raise UnknownFeature(", ".join(sorted(unknown)))
        return DiscreteDataset(
            tuple(c for c in self.features if c.name in wanted), self.target
        )

    def reorder(self, order: Sequence[int]) -> "DiscreteDataset":
        if sorted(order) != list(range(self.n_features)):
            raise ValueError(f"{order} is not a permutation of the feature indices")
        return DiscreteDataset(tuple(self.features[i] for i in order), self.target)

    def with_target(self, target: Column) -> "DiscreteDataset":
        if len(target) != self.n_samples:
            raise LengthMismatch(
                f"target has {len(target)} rows, dataset has {self.n_samples}"
            )
        return DiscreteDataset(self.features, target)

    def take_rows(self, rows: Sequence[int]) -> "DiscreteDataset":
        rows = np.asarray(rows, dtype=np.int64)
        return DiscreteDataset(
            tuple(Column(c.name, c.codes[rows], c.values) for c in self.features),
            Column(self.target.name, self.target.codes[rows], self.target.values),
        )

    def to_csv(self, path: str | os.PathLike | None = None) -> str:
        """Write features then target as comma-separated text; returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = (*self.features, self.target)
        writer.writerow([c.name for c in cols])
        raw = [[_format_value(v) for v in c.values] for c in cols]
        codes = [c.codes for c in cols]
        for r in range(self.n_samples):
            writer.writerow([raw[j][codes[j][r]] for j in range(len(cols))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def _format_value(value: Any) -> str:
    if isinstance(value, Fraction) and value.denominator == 1:
        return str(value.numerator)
    return str(value)


@dataclass(frozen=True)
class SyntheticSpec:
    """Joint outcome table with exact weights, expanded by :func:`materialize`.

    Each row of ``outcome_table`` is ``(values, weight)`` where ``values`` lists
    one entry per name in ``column_names``. The target defaults to the last
    column.
    """

    outcome_table: tuple[tuple[tuple, Fraction], ...]
    total_samples: int
    column_names: tuple[str, ...]
    target: str | None = None

    def __post_init__(self):
        table = tuple((tuple(vals), Fraction(w)) for vals, w in self.outcome_table)
        object.__setattr__(self, "outcome_table", table)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        if self.target is None:
            object.__setattr__(self, "target", self.column_names[-1])
        if self.target not in self.column_names:
            raise UnknownFeature(self.target)
        if self.total_samples <= 0:
            raise ValueError("total_samples must be positive")
        if not table:
            raise ValueError("outcome table is empty")
        for vals, w in table:
            if len(vals) != len(self.column_names):
                raise LengthMismatch(f"outcome {vals} does not match {self.column_names}")
            if w < 0:
                raise ValueError(f"negative weight {w} for outcome {vals}")
        total = sum(w for _, w in table)
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")

    def counts(self) -> list[int]:
        out = []
        for vals, w in self.outcome_table:
            c = w * self.total_samples
            if c.denominator != 1:
                raise InfeasibleDraw(
                    f"outcome {vals} needs {c} copies out of {self.total_samples}"
                )
            out.append(int(c))
        return out


def materialize(spec: SyntheticSpec) -> DiscreteDataset:
    """Fixed draw: repeat every outcome exactly ``weight * total_samples`` times,
    contiguously and in outcome-table order."""
    counts = spec.counts()
    columns = []
    for j, name in enumerate(spec.column_names):
        raw = []
        for (vals, _), c in zip(spec.outcome_table, counts):
            raw.extend([vals[j]] * c)
        columns.append(Column.from_values(name, raw))
    target = columns[spec.column_names.index(spec.target)]
    return DiscreteDataset(tuple(c for c in columns if c is not target), target)


@dataclass(frozen=True)
class BinningRule:
    column: str
    strategy: str = "equal-width"
    bin_count: int = 10

    STRATEGIES = ("equal-width", "equal-frequency")

    def __post_init__(self):
        if self.strategy not in self.STRATEGIES:
            raise ValueError(f"unknown binning strategy {self.strategy!r}")
        if int(self.bin_count) != self.bin_count or self.bin_count < 1:
            raise ValueError(f"bin_count must be a positive integer, got {self.bin_count}")

    @classmethod
    def parse(cls, text: str) -> "BinningRule":
        """Parse ``column:k[:strategy]``."""
        parts = text.rsplit(":", 2)
        if len(parts) == 3 and parts[2] in cls.STRATEGIES:
            name, k, strategy = parts
        else:
            name, k = text.rsplit(":", 1)
            strategy = "equal-width"
        return cls(name, strategy, int(k))


def bin_column(raw: Sequence[float], rule: BinningRule) -> np.ndarray:
    """Map numeric values to bin codes ``0 .. rule.bin_count - 1``.

    Equal-width splits ``[min, max]`` into half-open intervals, the last one
    closed. Equal-frequency keeps equal values together and assigns each
    distinct value, in increasing order, to bin ``floor(k * rank / n)`` where
    ``rank`` counts the values strictly below it.
    """
    x = _check_numeric(raw, rule.column)
    return apply_bin_edges(x, fit_bin_edges(x, rule))


def _check_numeric(raw: Sequence[float], name: str) -> np.ndarray:
    x = np.asarray(raw, dtype=float)
    if x.size == 0:
        raise EmptyColumn(name)
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue(f"column {name!r} contains NaN or infinite values")
    return x


def fit_bin_edges(x: np.ndarray, rule: BinningRule) -> tuple[str, np.ndarray]:
    """Learn what :func:`apply_bin_edges` needs to reproduce ``bin_column``.

    Returns ``("width", [lo, hi, k])`` or ``("thresholds", t)`` where row
    ``t[0]`` holds the smallest value of each occupied bin and ``t[1]`` that
    bin's code.
    """
    x = _check_numeric(x, rule.column)
    k = rule.bin_count
    lo, hi = float(x.min()), float(x.max())
    if rule.strategy == "equal-width" or lo == hi:
        return "width", np.array([lo, hi, k], dtype=float)
    distinct, counts = np.unique(x, return_counts=True)
    if k > distinct.size:
        raise ValueError(
            f"equal-frequency needs at most {distinct.size} bins for column {rule.column!r}"
        )
    below = np.concatenate(([0], np.cumsum(counts)[:-1]))
    per_value = np.minimum(below * k // x.size, k - 1)
    starts = np.flatnonzero(np.diff(per_value, prepend=-1))
    return "thresholds", np.vstack([distinct[starts], per_value[starts]])


def apply_bin_edges(x: np.ndarray, edges: tuple[str, np.ndarray]) -> np.ndarray:
    kind, params = edges
    x = np.asarray(x, dtype=float)
    if kind == "width":
        lo, hi, k = params
        if lo == hi:
            return np.zeros(x.size, dtype=np.int64)
        codes = np.floor((x - lo) / (hi - lo) * k).astype(np.int64)
        return np.clip(codes, 0, int(k) - 1)
    idx = np.maximum(np.searchsorted(params[0], x, side="right") - 1, 0)
    return params[1][idx].astype(np.int64)


def read_csv(
    source: str | os.PathLike | io.TextIOBase,
    target: str,
    bins: Sequence[BinningRule] = (),
    features: Sequence[str] | None = None,
) -> DiscreteDataset:
    """Load a headered CSV; every cell is a string unless a binning rule names
    its column, in which case it is parsed as float and binned."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))
    if not rows:
        raise EmptyColumn("CSV has no header")
    header, body = rows[0], rows[1:]
    if len(set(header)) != len(header):
        raise ValueError(f"duplicate column names in header {header}")
    if target not in header:
        raise UnknownFeature(f"target {target!r} not in header {header}")
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise LengthMismatch(f"line {lineno} has {len(row)} cells, expected {len(header)}")
    rules = {r.column: r for r in bins}
    unknown = set(rules) - set(header)
    if unknown:
        raise UnknownFeature(", ".join(sorted(unknown)))
    if features is None:
        features = [h for h in header if h != target]
    missing = set(features) - set(header)
    if missing:
        raise UnknownFeature(", ".join(sorted(missing)))

    def load(name: str) -> Column:
        j = header.index(name)
        cells = [row[j] for row in body]
        if name in rules:
            try:
                nums = [float(c) for c in cells]
            except ValueError as exc:
                raise ValueError(f"column {name!r}: {exc}") from None
            return Column.from_values(name, bin_column(nums, rules[name]).tolist())
        return Column.from_values(name, cells)

    return DiscreteDataset(tuple(load(f) for f in features), load(target))
