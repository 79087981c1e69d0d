"""Empirical BP dependency of the target on a feature subset.

For discrete data the unnormalised dependency of ``Y`` on ``X`` is

    UD(X, Y) = sum_x p(x) * sum_y |p(y | x) - p(y)|

and ``Dep(X -> Y) = UD(X, Y) / UD(Y, Y)``. A subset of features is treated as
one composite variable whose outcomes are the distinct code tuples.

With counts ``c_xy``, ``n_x``, ``n_y`` over ``n`` rows,
``n**2 * UD = sum_xy |n*c_xy - n_x*n_y|``. Every quantity here is computed as
that integer, so a dependency is a single correctly rounded division and
does not depend on row order or on how values were coded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .dataset import DiscreteDataset
from .exceptions import DependencyUndefined, UnknownFeature

__all__ = [
    "DependencyValue",
    "as_mask",
    "dep",
    "dependency_value",
    "iter_subset_ud",
    "mask_to_indices",
    "ud",
    "ud_self",
]


@dataclass(frozen=True)
class DependencyValue:
    value: float
    subset: int
    ud_numerator: float
    ud_denominator: float


def as_mask(ds: DiscreteDataset, subset: int | Iterable[int | str]) -> int:
    """Normalise a bitmask, an iterable of feature indices or of names to a bitmask."""
    m = ds.n_features
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >> m:
            raise UnknownFeature(f"bitmask {mask} has bits outside {m} features")
        return mask
    mask = 0
    for item in subset:
        i = ds.feature_index(item) if isinstance(item, str) else int(item)
        if not 0 <= i < m:
            raise UnknownFeature(f"feature index {i} out of range for {m} features")
        mask |= 1 << i
    return mask


def mask_to_indices(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _refine(groups: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Dense group ids for the pair (current group, column code)."""
    key = groups * (int(codes.max()) + 1) + codes
    return np.unique(key, return_inverse=True)[1].ravel()


def _group_ids(ds: DiscreteDataset, mask: int) -> np.ndarray:
    groups = np.zeros(ds.n_samples, dtype=np.int64)
    for i in mask_to_indices(mask):
        groups = _refine(groups, ds.features[i].codes)
    return groups


def _ud_scaled(groups: np.ndarray, y: np.ndarray, y_counts: np.ndarray) -> int:
    """Return ``n**2 * UD`` for the composite variable ``groups`` as an exact int.

    Cells with ``c_xy = 0`` contribute ``n_x*n_y``; those sum to ``n**2`` minus
    the nonzero cells' share, so only occupied cells are visited.
    """
    n = y.size
    k = y_counts.size
    cells, c = np.unique(groups * k + y, return_counts=True)
    gx = cells // k
    n_x = np.bincount(groups)[gx]
    n_y = y_counts[cells % k]
    expected = n_x * n_y
    return n * n + int(np.sum(np.abs(n * c - expected) - expected))


def _y_counts(ds: DiscreteDataset) -> np.ndarray:
    return np.bincount(ds.target.codes, minlength=len(ds.target.values))


def _ud_self_scaled(ds: DiscreteDataset) -> int:
    # n^2 * UD(Y, Y) = 2 * (n^2 - sum_y n_y^2)
    counts = _y_counts(ds).astype(np.int64)
    n = ds.n_samples
    return 2 * (n * n - int(np.sum(counts * counts)))


def ud(ds: DiscreteDataset, subset: int | Iterable[int | str]) -> float:
    mask = as_mask(ds, subset)
    if mask == 0:
        return 0.0
    n = ds.n_samples
    return _ud_scaled(_group_ids(ds, mask), ds.target.codes, _y_counts(ds)) / (n * n)


def ud_self(ds: DiscreteDataset) -> float:
    n = ds.n_samples
    return _ud_self_scaled(ds) / (n * n)


def _denominator(ds: DiscreteDataset) -> int:
    den = _ud_self_scaled(ds)
    if den == 0:
        raise DependencyUndefined(
            f"target {ds.target_name!r} is constant; the dependency is undefined"
        )
    return den


def dep(ds: DiscreteDataset, subset: int | Iterable[int | str]) -> float:
    """Dependency of the target on ``subset``, in ``[0, 1]``.

    Raises :class:`DependencyUndefined` when the target takes a single value.
    """
    den = _denominator(ds)
    mask = as_mask(ds, subset)
    if mask == 0:
        return 0.0
    num = _ud_scaled(_group_ids(ds, mask), ds.target.codes, _y_counts(ds))
    return num / den


def dependency_value(ds: DiscreteDataset, subset: int | Iterable[int | str]) -> DependencyValue:
    den = _denominator(ds)
    mask = as_mask(ds, subset)
    num = _ud_scaled(_group_ids(ds, mask), ds.target.codes, _y_counts(ds)) if mask else 0
    n2 = ds.n_samples**2
    return DependencyValue(num / den, mask, num / n2, den / n2)


def iter_subset_ud(ds: DiscreteDataset) -> Iterator[tuple[int, int]]:
    """Yield ``(mask, n**2 * UD(S, Y))`` for every nonempty subset exactly once.

    Subsets are enumerated depth first, each one refining its parent's
    grouping by one extra column, so memory stays at ``O(m * n)``.
    """
    y = ds.target.codes
    y_counts = _y_counts(ds)
    columns = [c.codes for c in ds.features]
    m = len(columns)

    def extend(mask: int, groups: np.ndarray, start: int):
        for j in range(start, m):
            child = _refine(groups, columns[j])
            child_mask = mask | (1 << j)
            yield child_mask, _ud_scaled(child, y, y_counts)
            yield from extend(child_mask, child, j + 1)

    yield from extend(0, np.zeros(ds.n_samples, dtype=np.int64), 0)
