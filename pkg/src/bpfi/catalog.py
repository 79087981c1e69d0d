"""The 28 ground-truth synthetic datasets and their published BP-FI outcomes.

Every dataset is a :class:`SyntheticSpec` over independent uniform (or
weighted) base variables; derived columns are computed per joint outcome and
the result is expanded by fixed draw. Binned values use exact rationals so no
grid point lands on the wrong side of a bin edge.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .dataset import DiscreteDataset, SyntheticSpec, materialize
from .exceptions import UnknownDataset

__all__ = [
    "CATALOG_IDS",
    "CatalogEntry",
    "PROBABILITY_IDS",
    "get_dataset",
    "get_entry",
    "golden_fi",
    "probability_of",
]

CATALOG_IDS = tuple(range(1, 29))
PROBABILITY_IDS = tuple(range(18, 29))


@dataclass(frozen=True)
class CatalogEntry:
    id: int
    name: str
    spec: SyntheticSpec
    golden_fi: tuple[float, ...]
    sample_count: int
    symmetric_groups: tuple[tuple[int, ...], ...] = ()
    bins: tuple[int, ...] | None = field(default=None)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c for c in self.spec.column_names if c != self.spec.target)


def _joint(
    base: Sequence[Sequence],
    derive: Callable[..., tuple],
    names: Sequence[str],
    total: int,
    weights: Sequence[Sequence[Fraction]] | None = None,
) -> SyntheticSpec:
    """Spec for independent base variables (uniform unless ``weights`` given),
    mapped to output rows by ``derive``. Zero-weight rows are dropped and
    duplicate rows merged, keeping first-appearance order."""
    if weights is None:
        weights = [[Fraction(1, len(vals))] * len(vals) for vals in base]
    table: dict[tuple, Fraction] = {}
    for combo in itertools.product(*(range(len(v)) for v in base)):
        w = math.prod((weights[j][k] for j, k in enumerate(combo)), start=Fraction(1))
        if w == 0:
            continue
        row = tuple(derive(*(base[j][k] for j, k in enumerate(combo))))
        table[row] = table.get(row, Fraction(0)) + w
    return SyntheticSpec(tuple(table.items()), total, tuple(names))


def _binary(y_map: Callable[..., tuple], names: Sequence[str]) -> SyntheticSpec:
    def derive(x1, x2, x3):
        y = x1 + 2 * x2 + 4 * x3
        return (*y_map(x1, x2, x3, y), y)

    return _joint([(0, 1)] * 3, derive, names, 1000)


def _grid(k: int) -> list[Fraction]:
    return [Fraction(j, k - 1) for j in range(k)]


def _floor_to_grid(y: Fraction, k: int) -> Fraction:
    """Largest point of the ``k``-point grid on ``[0, 1]`` not exceeding ``y``."""
    return Fraction(math.floor(y * (k - 1)), k - 1)


def _bins(order: Sequence[int], names: Sequence[str]) -> SyntheticSpec:
    def derive(y):
        return (*(_floor_to_grid(y, k) for k in order), y)

    return _joint([_grid(1000)], derive, names, 1000)


def _xor(a: int, b: int) -> int:
    return a * (1 - b) + b * (1 - a)


def _probability(p: Fraction) -> SyntheticSpec:
    # S selects which X_i drives Y; X_i = Z_i + (S - 1), Y = floor(X_S / 2)
    def derive(s, z1, z2):
        x1, x2 = z1 + s - 1, z2 + s - 1
        return x1, x2, (x1 if s == 1 else x2) // 2

    half = Fraction(1, 2)
    return _joint(
        [(1, 2), (0, 2), (0, 2)],
        derive,
        ("X1", "X2", "Y"),
        1000,
        weights=[[p, 1 - p], [half, half], [half, half]],
    )


def probability_of(dataset_id: int) -> Fraction:
    if dataset_id not in PROBABILITY_IDS:
        raise UnknownDataset(f"dataset {dataset_id} is not a probability dataset")
    return Fraction(dataset_id - 18, 10)


def _build() -> dict[int, CatalogEntry]:
    e: dict[int, CatalogEntry] = {}

    def add(i, name, spec, golden, groups=(), bins=None):
        e[i] = CatalogEntry(i, name, spec, tuple(golden), spec.total_samples,
                            tuple(tuple(g) for g in groups), bins)

    add(1, "Binary system",
        _binary(lambda a, b, c, y: (a, b, c), ("X1", "X2", "X3", "Y")),
        (0.333, 0.333, 0.333), [(0, 1, 2)])
    add(2, "Binary system with clone",
        _binary(lambda a, b, c, y: (a, a, b, c), ("X1_clone", "X1", "X2", "X3", "Y")),
        (0.202, 0.202, 0.298, 0.298), [(0, 1), (2, 3)])
    add(3, "Binary system with clone and one fully informative variable",
        _binary(lambda a, b, c, y: (a, a, b, c, y**2),
                ("X1_clone", "X1", "X2", "X3", "X4_full", "Y")),
        (0.148, 0.148, 0.183, 0.183, 0.338), [(0, 1), (2, 3)])
    add(4, "Binary system with clone and two fully informative variables",
        _binary(lambda a, b, c, y: (a, a, b, c, y**2, y**3),
                ("X1_clone", "X1", "X2", "X3", "X4_full", "X5_full", "Y")),
        (0.117, 0.117, 0.136, 0.136, 0.248, 0.248), [(0, 1), (2, 3), (4, 5)])
    add(5, "Binary system with clone and two fully informative variables different order",
        _binary(lambda a, b, c, y: (c, y**2, y**3, a, a, b),
                ("X3", "X4_full", "X5_full", "X1_clone", "X1", "X2", "Y")),
        (0.136, 0.248, 0.248, 0.117, 0.117, 0.136), [(3, 4), (0, 5), (1, 2)])

    null_names = ("X1_null", "X2_null", "X3_null")
    add(6, "Null-independent system",
        _joint([(0, 1)] * 4, lambda a, b, c, y: (a, b, c, y), (*null_names, "Y"), 2000),
        (0.0, 0.0, 0.0), [(0, 1, 2)])
    add(7, "Null-independent system with constant variable",
        _joint([(0, 1)] * 4, lambda a, b, c, y: (a, b, c, 1, y),
               (*null_names, "X4_const", "Y"), 2000),
        (0.0, 0.0, 0.0, 0.0), [(0, 1, 2, 3)])

    add(8, "Uniform system increasing bins",
        _bins((10, 50, 1000), ("X1_bins10", "X2_bins50", "X3_bins1000_full", "Y")),
        (0.297, 0.342, 0.361), bins=(10, 50, 1000))
    add(9, "Uniform system increasing bins more variables",
        _bins((10, 20, 50, 100, 1000),
              ("X1_bins10", "X2_bins20", "X3_bins50", "X4_bins100", "X5_bins1000_full", "Y")),
        (0.179, 0.193, 0.204, 0.208, 0.216), bins=(10, 20, 50, 100, 1000))
    add(10, "Uniform system increasing bins with clone different order",
        _bins((1000, 50, 10, 1000),
              ("X3_bins1000_full", "X2_bins50", "X1_bins10", "X3_clone_full", "Y")),
        (0.262, 0.253, 0.223, 0.262), [(0, 3)], bins=(1000, 50, 10, 1000))

    add(11, "Dependent system: 1x fully informative variable",
        _joint([(1, 2)] * 3, lambda a, b, c: (a, b, c, a),
               ("X1_full", "X2_null", "X3_null", "Y"), 1000),
        (1.0, 0.0, 0.0), [(1, 2)])
    add(12, "Dependent system: 2x fully informative variable",
        _joint([(1, 2)] * 2, lambda a, c: (a, a**2, c, a),
               ("X1_full", "X2_full", "X3_null", "Y"), 1000),
        (0.5, 0.5, 0.0), [(0, 1)])
    add(13, "Dependent system: 3x fully informative variable",
        _joint([(1, 2)], lambda a: (a, a**2, a**3, a),
               ("X1_full", "X2_full", "X3_full", "Y"), 1000),
        (0.333, 0.333, 0.333), [(0, 1, 2)])

    add(14, "XOR dataset",
        _joint([(0, 1)] * 2, lambda a, b: (a, b, _xor(a, b)), ("X1", "X2", "Y"), 1000),
        (0.5, 0.5), [(0, 1)])
    add(15, "XOR dataset one variable",
        _joint([(0, 1)] * 2, lambda a, hidden: (a, _xor(a, hidden)), ("X1_null", "Y"), 1000),
        (0.0,))
    add(16, "XOR dataset with clone",
        _joint([(0, 1)] * 2, lambda a, b: (a, a, b, _xor(a, b)),
               ("X1_clone", "X1", "X2", "Y"), 1000),
        (0.167, 0.167, 0.667), [(0, 1)])
    add(17, "XOR dataset with null independent",
        _joint([(0, 1), (0, 1), (0, 3)], lambda a, b, c: (a, b, c, _xor(a, b)),
               ("X1", "X2", "X3_null", "Y"), 1000),
        (0.5, 0.5, 0.0), [(0, 1)])

    for i in PROBABILITY_IDS:
        p = probability_of(i)
        add(i, f"Probability dataset p={float(p):.1f}", _probability(p),
            (float(p), float(1 - p)), [(0, 1)] if p == Fraction(1, 2) else ())
    return e


_CATALOG = _build()


def get_entry(dataset_id: int) -> CatalogEntry:
    try:
        return _CATALOG[int(dataset_id)]
    except (KeyError, ValueError, TypeError):
        raise UnknownDataset(f"no catalog dataset with id {dataset_id!r}") from None


@lru_cache(maxsize=None)
def get_dataset(dataset_id: int) -> DiscreteDataset:
    """Materialized catalog dataset; repeated calls return the same object."""
    return materialize(get_entry(dataset_id).spec)


def golden_fi(dataset_id: int) -> tuple[float, ...]:
    """Published BP-FI outcome, rounded to three decimals."""
    return get_entry(dataset_id).golden_fi
