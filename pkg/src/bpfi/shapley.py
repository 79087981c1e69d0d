"""Exact Shapley aggregation of the subset-dependency function (BP-FI)."""

from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dataset import Column, DiscreteDataset
from .dependency import _denominator, iter_subset_ud, mask_to_indices
from .exceptions import (
    IncompleteCache,
    InvalidK,
    InvalidSize,
    LengthMismatch,
    TooManyFeatures,
)

__all__ = [
    "DEFAULT_MAX_FEATURES",
    "FiResult",
    "SubsetDependencyCache",
    "best_subset",
    "compute_fi",
    "default_max_features",
    "exact_fi",
    "fi_for_model_predictions",
    "oracle_fi",
    "shapley_weight",
]

DEFAULT_MAX_FEATURES = 20
ORACLE_MAX_FEATURES = 8


def default_max_features() -> int:
    """Feature cap, overridable through ``BPFI_MAX_FEATURES``."""
    env = os.environ.get("BPFI_MAX_FEATURES")
    return int(env) if env else DEFAULT_MAX_FEATURES


def shapley_weight(subset_size: int, m: int) -> float:
    """``|S|! (m - |S| - 1)! / m!``; log-factorials beyond 20 features."""
    if m < 1 or not 0 <= subset_size <= m - 1:
        raise InvalidSize(f"subset size {subset_size} invalid for {m} features")
    if m <= 20:
        return float(
            Fraction(math.factorial(subset_size) * math.factorial(m - subset_size - 1),
                     math.factorial(m))
        )
    return math.exp(
        math.lgamma(subset_size + 1) + math.lgamma(m - subset_size) - math.lgamma(m + 1)
    )


class SubsetDependencyCache:
    """Dependency value per feature bitmask (bit ``i`` is feature ``i``)."""

    def __init__(self, m: int, feature_names: Sequence[str] | None = None):
        self.m = m
        self.feature_names = tuple(feature_names) if feature_names is not None else None
        self._values = np.full(1 << m, np.nan)
        self._filled = np.zeros(1 << m, dtype=bool)

    def __setitem__(self, mask: int, value: float) -> None:
        self._values[mask] = value
        self._filled[mask] = True

    def __getitem__(self, mask: int) -> float:
        if not self._filled[mask]:
            raise IncompleteCache(f"no dependency cached for subset {mask}")
        return float(self._values[mask])

    def __contains__(self, mask: int) -> bool:
        return 0 <= mask < self._values.size and bool(self._filled[mask])

    def __len__(self) -> int:
        return int(self._filled.sum())

    @property
    def complete(self) -> bool:
        return bool(self._filled.all())

    def as_array(self) -> np.ndarray:
        """All ``2**m`` values indexed by mask; raises if any is missing."""
        if not self.complete:
            raise IncompleteCache(f"{len(self)} of {1 << self.m} subsets cached")
        out = self._values.copy()
        out.setflags(write=False)
        return out

    def items(self):
        for mask in np.flatnonzero(self._filled):
            yield int(mask), float(self._values[mask])

    def names(self, mask: int) -> list[str]:
        idx = mask_to_indices(mask)
        if self.feature_names is None:
            return [str(i) for i in idx]
        return [self.feature_names[i] for i in idx]

    def is_null_independent(self, i: int, atol: float = 1e-9) -> bool:
        """True when adding feature ``i`` never changes the dependency."""
        v = self.as_array()
        masks = np.arange(v.size)
        without = masks[(masks >> i) & 1 == 0]
        return bool(np.all(np.abs(v[without | (1 << i)] - v[without]) <= atol))


@dataclass
class FiResult:
    importances: np.ndarray
    total_dependency: float
    cache: SubsetDependencyCache
    feature_names: tuple[str, ...]
    dataset_id: int | None = None
    method: str = field(default="bp-fi")

    def as_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "importances": [float(x) for x in self.importances],
            "total_dependency": float(self.total_dependency),
        }


def _check_cap(m: int, max_features: int | None) -> None:
    cap = default_max_features() if max_features is None else max_features
    if m > cap:
        raise TooManyFeatures(f"{m} features exceeds the cap of {cap}")


def subset_dependencies(ds: DiscreteDataset) -> SubsetDependencyCache:
    den = _denominator(ds)
    cache = SubsetDependencyCache(ds.n_features, ds.feature_names)
    cache[0] = 0.0
    for mask, num in iter_subset_ud(ds):
        cache[mask] = num / den
    return cache


def _shapley_from_values(v: np.ndarray, m: int) -> np.ndarray:
    masks = np.arange(1 << m)
    sizes = np.array([bin(x).count("1") for x in range(1 << m)])
    weights = np.array([shapley_weight(k, m) for k in range(m)])
    out = np.empty(m)
    for i in range(m):
        without = masks[(masks >> i) & 1 == 0]
        out[i] = np.sum(weights[sizes[without]] * (v[without | (1 << i)] - v[without]))
    return out


def compute_fi(ds: DiscreteDataset, max_features: int | None = None) -> FiResult:
    """BP-FI of every feature of ``ds``.

    All ``2**m`` subset dependencies are computed once, then each feature's
    importance is the Shapley-weighted sum of its marginal gains.
    """
    m = ds.n_features
    _check_cap(m, max_features)
    cache = subset_dependencies(ds)
    if m == 0:
        return FiResult(np.empty(0), 0.0, cache, ())
    fi = _shapley_from_values(cache.as_array(), m)
    return FiResult(fi, cache[(1 << m) - 1], cache, ds.feature_names)


def _exact_dependencies(ds: DiscreteDataset) -> dict[frozenset, Fraction]:
    rows = [tuple(r) for r in ds.feature_codes.tolist()]
    ys = ds.target.codes.tolist()
    n = len(ys)
    y_counts = Counter(ys)
    den = Fraction(sum(c * (n - c) for c in y_counts.values()) * 2, n * n)
    if den == 0:
        _denominator(ds)  # raises DependencyUndefined

    def value(subset: frozenset) -> Fraction:
        if not subset:
            return Fraction(0)
        cols = sorted(subset)
        x_counts, xy_counts = Counter(), Counter()
        for row, y in zip(rows, ys):
            key = tuple(row[c] for c in cols)
            x_counts[key] += 1
            xy_counts[key, y] += 1
        # sum over all (x, y) of |p(x,y) - p(x)p(y)|, split into occupied and empty cells
        total = Fraction(0)
        for (key, y), c in xy_counts.items():
            total += abs(Fraction(c, n) - Fraction(x_counts[key] * y_counts[y], n * n))
        empty = Fraction(n * n - sum(x_counts[k] * y_counts[y] for k, y in xy_counts), n * n)
        return (total + empty) / den

    m = ds.n_features
    return {
        frozenset(s): value(frozenset(s))
        for r in range(m + 1)
        for s in itertools.combinations(range(m), r)
    }


def exact_fi(ds: DiscreteDataset) -> list[Fraction]:
    """BP-FI as exact rationals by averaging gains over all ``m!`` orderings."""
    m = ds.n_features
    if m > ORACLE_MAX_FEATURES:
        raise TooManyFeatures(f"permutation oracle supports at most {ORACLE_MAX_FEATURES} features")
    v = _exact_dependencies(ds)
    totals = [Fraction(0)] * m
    count = 0
    for order in itertools.permutations(range(m)):
        prefix: frozenset = frozenset()
        for i in order:
            grown = prefix | {i}
            totals[i] += v[grown] - v[prefix]
            prefix = grown
        count += 1
    return [t / count for t in totals]


def oracle_fi(ds: DiscreteDataset) -> FiResult:
    """Brute-force BP-FI over feature orderings, sharing no code with :func:`compute_fi`."""
    m = ds.n_features
    if m > ORACLE_MAX_FEATURES:
        raise TooManyFeatures(f"permutation oracle supports at most {ORACLE_MAX_FEATURES} features")
    v = _exact_dependencies(ds)
    cache = SubsetDependencyCache(m, ds.feature_names)
    for subset, value in v.items():
        cache[sum(1 << i for i in subset)] = float(value)
    fi = np.array([float(x) for x in exact_fi(ds)])
    return FiResult(fi, float(v[frozenset(range(m))]), cache, ds.feature_names,
                    method="permutation-oracle")


def best_subset(cache: SubsetDependencyCache, k: int) -> int:
    """Size-``k`` subset with the highest dependency; ties go to the lowest bitmask."""
    if not 1 <= k <= cache.m:
        raise InvalidK(f"K={k} must lie in 1..{cache.m}")
    v = cache.as_array()
    best, best_value = -1, -np.inf
    for mask in range(v.size):
        if bin(mask).count("1") == k and v[mask] > best_value:
            best, best_value = mask, v[mask]
    return best


def fi_for_model_predictions(
    ds: DiscreteDataset, predictions: Sequence, max_features: int | None = None
) -> FiResult:
    """BP-FI with the target replaced by a model's predicted outcomes."""
    if len(predictions) != ds.n_samples:
        raise LengthMismatch(
            f"{len(predictions)} predictions for {ds.n_samples} samples"
        )
    if isinstance(predictions, Column):
        target = Column(ds.target_name, predictions.codes, predictions.values)
    else:
        target = Column.from_values(ds.target_name, list(predictions))
    return compute_fi(ds.with_target(target), max_features=max_features)
