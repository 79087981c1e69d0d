"""Shared fixtures and hypothesis strategies."""

import sys
from collections import Counter
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import strategies as st

from bpfi.dataset import DiscreteDataset


def reference_dep(rows, feature_idx, target_idx=-1) -> Fraction:
    """Dependency straight from its definition, on a list of row tuples.

    Probabilities are exact fractions; every (x, y) pair in the product of the
    observed supports is visited, including empty cells.
    """
    n = len(rows)
    xs = [tuple(r[j] for j in feature_idx) for r in rows]
    ys = [r[target_idx] for r in rows]
    px = {x: Fraction(c, n) for x, c in Counter(xs).items()}
    py = {y: Fraction(c, n) for y, c in Counter(ys).items()}
    pxy = Counter(zip(xs, ys))

    def ud(px_, pxy_):
        total = Fraction(0)
        for x, y in product(px_, py):
            cond = Fraction(pxy_.get((x, y), 0), n) / px_[x]
            total += px_[x] * abs(cond - py[y])
        return total

    self_pxy = Counter(zip(ys, ys))
    denom = ud(py, self_pxy)
    return ud(px, pxy) / denom


@st.composite
def small_datasets(draw, min_features=1, max_features=4, max_rows=24, max_levels=3):
    """Random small categorical datasets whose target takes at least two values."""
    m = draw(st.integers(min_features, max_features))
    n = draw(st.integers(2, max_rows))
    levels = st.integers(0, max_levels - 1)
    rows = draw(st.lists(st.tuples(*([levels] * (m + 1))), min_size=n, max_size=n))
    ys = [r[-1] for r in rows]
    if len(set(ys)) < 2:
        rows[0] = rows[0][:-1] + (1 - min(ys[0], 1),)
    return rows


def rows_to_dataset(rows) -> DiscreteDataset:
    m = len(rows[0]) - 1
    feats = {f"X{j + 1}": [r[j] for r in rows] for j in range(m)}
    return DiscreteDataset.from_columns(feats, ("Y", [r[-1] for r in rows]))


@pytest.fixture
def xor_rows():
    return [(a, b, a ^ b) for a in (0, 1) for b in (0, 1)]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(module.format_line(n, *results[n]))
