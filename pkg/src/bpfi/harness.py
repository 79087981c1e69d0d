"""Grade feature-importance vectors against the 18 property tests.

A submission maps each catalog dataset id to an FI vector (or ``None`` for no
result). Every test runs on a fixed set of datasets; if any of them lacks a
vector the test is ``NoResult``. Tolerance is ``EPSILON`` throughout.

NaN / infinity conventions:

* sums, ranges, bounds and target outcomes treat NaN as a failure;
* equality checks between two values (stable sum, symmetry, order, clone
  comparison) treat two NaNs, or two infinities of the same sign, as equal.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .catalog import CATALOG_IDS, PROBABILITY_IDS, get_dataset, get_entry, probability_of
from .exceptions import MalformedSubmission
from .shapley import SubsetDependencyCache, compute_fi

__all__ = [
    "EPSILON",
    "Counterexample",
    "FiSubmission",
    "ReferenceEntry",
    "TEST_DATASETS",
    "TEST_NAMES",
    "TestReport",
    "TestResult",
    "Verdict",
    "build_reference",
    "run_all",
    "run_test",
    "self_submission",
]

EPSILON = 0.01
NULL_ATOL = 1e-9
# Decimal inputs such as 0.34 - 0.33 land a hair above 0.01 in binary floating
# point; comparisons against epsilon allow for that rounding.
ROUNDING_SLACK = 1e-12


class Verdict(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    NO_RESULT = "NoResult"


TEST_NAMES = {
    1: "Efficiency sum BP-FI",
    2: "Efficiency stable",
    3: "Symmetry",
    4: "Range (lower)",
    5: "Range (upper)",
    6: "Bounds BP-FI (lower)",
    7: "Bounds BP-FI (upper)",
    8: "Null-independent implies zero FI",
    9: "Zero FI implies null-independent",
    10: "One fully informative, two null-independent",
    11: "Fully informative variable in argmax FI",
    12: "Limiting the outcome space",
    13: "Adding features can increase FI",
    14: "Adding features can decrease FI",
    15: "Cloning does not increase FI",
    16: "Order does not change FI",
    17: "Outcome XOR",
    18: "Outcome probability datasets",
}

# (baseline id, extended id): total dependency is unchanged by the extension
STABLE_SUM_PAIRS = ((1, 2), (1, 3), (1, 4), (1, 5), (6, 7), (8, 9), (8, 10),
                    (11, 12), (11, 13), (14, 16), (14, 17))

# (baseline id, extended id, {baseline feature index: extended feature index})
ADD_FEATURE_PAIRS = (
    (1, 2, {0: 1, 1: 2, 2: 3}),
    (2, 3, {0: 0, 1: 1, 2: 2, 3: 3}),
    (3, 4, {0: 0, 1: 1, 2: 2, 3: 3, 4: 4}),
    (6, 7, {0: 0, 1: 1, 2: 2}),
    (8, 9, {0: 0, 1: 2, 2: 4}),
    (8, 10, {0: 2, 1: 1, 2: 0}),
    (14, 16, {0: 1, 1: 2}),
    (14, 17, {0: 0, 1: 1}),
    (15, 14, {0: 0}),
)

# (baseline id, extended id, cloned feature in baseline, same feature in extended)
CLONE_PAIRS = ((1, 2, 0, 1), (8, 10, 2, 0), (14, 16, 0, 1))

# (dataset a, dataset b, permutation): feature i of a is feature perm[i] of b
ORDER_PAIRS = ((4, 5, (3, 4, 5, 0, 1, 2)),) + tuple(
    (18 + k, 28 - k, (1, 0)) for k in range(5)
)

XOR_OUTCOMES = {14: (0.5, 0.5), 17: (0.5, 0.5, 0.0)}


def _ids(pairs) -> tuple[int, ...]:
    return tuple(sorted({i for p in pairs for i in p[:2]}))


TEST_DATASETS: dict[int, tuple[int, ...]] = {
    1: CATALOG_IDS,
    2: _ids(STABLE_SUM_PAIRS),
    3: tuple(i for i in CATALOG_IDS if get_entry(i).symmetric_groups),
    4: CATALOG_IDS,
    5: CATALOG_IDS,
    6: CATALOG_IDS,
    7: CATALOG_IDS,
    8: (6, 7, 11, 12, 15, 17, 18, 28),
    9: CATALOG_IDS,
    10: (11,),
    11: (3, 4, 5, 8, 9, 10, 11, 12, 13, 18, 28),
    12: (8, 9, 10),
    13: _ids(ADD_FEATURE_PAIRS),
    14: _ids(ADD_FEATURE_PAIRS),
    15: _ids(CLONE_PAIRS),
    16: _ids(ORDER_PAIRS),
    17: tuple(XOR_OUTCOMES),
    18: PROBABILITY_IDS,
}


@dataclass(frozen=True)
class ReferenceEntry:
    """BP-FI ground truth for one catalog dataset."""

    fi: np.ndarray
    cache: SubsetDependencyCache
    total_dependency: float
    singleton_dependency: np.ndarray
    null_independent: tuple[bool, ...]
    fully_informative: tuple[bool, ...]


@lru_cache(maxsize=1)
def build_reference() -> dict[int, ReferenceEntry]:
    ref = {}
    for i in CATALOG_IDS:
        res = compute_fi(get_dataset(i))
        m = len(res.importances)
        singles = np.array([res.cache[1 << j] for j in range(m)])
        ref[i] = ReferenceEntry(
            fi=res.importances,
            cache=res.cache,
            total_dependency=res.total_dependency,
            singleton_dependency=singles,
            null_independent=tuple(res.cache.is_null_independent(j, NULL_ATOL) for j in range(m)),
            fully_informative=tuple(bool(s >= 1 - NULL_ATOL) for s in singles),
        )
    return ref


def _parse_value(x: Any) -> float:
    if isinstance(x, bool):
        raise MalformedSubmission(f"boolean {x!r} is not an FI value")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        key = x.strip().lower()
        table = {"nan": math.nan, "inf": math.inf, "+inf": math.inf, "infinity": math.inf,
                 "-inf": -math.inf, "-infinity": -math.inf}
        if key in table:
            return table[key]
    raise MalformedSubmission(f"cannot read FI value {x!r}")


def _format_value(x: float) -> float | str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


@dataclass
class FiSubmission:
    """Per-dataset FI vectors from one method; ``None`` marks a missing result."""

    method_name: str
    results: dict[int, np.ndarray | None] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[int, np.ndarray | None] = {}
        for key, vec in self.results.items():
            try:
                i = int(key)
            except (TypeError, ValueError):
                raise MalformedSubmission(f"dataset id {key!r} is not an integer") from None
            if i not in CATALOG_IDS:
                raise MalformedSubmission(f"dataset id {i} is outside 1..28")
            if vec is None:
                clean[i] = None
                continue
            if isinstance(vec, (str, bytes)) or not isinstance(vec, (Sequence, np.ndarray)):
                raise MalformedSubmission(f"dataset {i}: FI must be a list, got {vec!r}")
            arr = np.array([_parse_value(v) for v in vec], dtype=float)
            m = len(get_entry(i).feature_names)
            if arr.size != m:
                raise MalformedSubmission(f"dataset {i}: expected {m} values, got {arr.size}")
            clean[i] = arr
        self.results = clean

    def get(self, dataset_id: int) -> np.ndarray | None:
        return self.results.get(dataset_id)

    @classmethod
    def from_dict(cls, obj: Any) -> "FiSubmission":
        if not isinstance(obj, Mapping):
            raise MalformedSubmission("submission must be a JSON object")
        results = obj.get("results")
        if not isinstance(results, Mapping):
            raise MalformedSubmission("submission needs a 'results' object")
        name = obj.get("method_name", "unnamed")
        if not isinstance(name, str):
            raise MalformedSubmission("method_name must be a string")
        return cls(name, dict(results))

    @classmethod
    def from_json(cls, text: str) -> "FiSubmission":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedSubmission(f"invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "FiSubmission":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_dict(self) -> dict:
        return {
            "method_name": self.method_name,
            "results": {
                str(i): None if v is None else [_format_value(x) for x in v]
                for i, v in sorted(self.results.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def self_submission(reference: Mapping[int, ReferenceEntry] | None = None) -> FiSubmission:
    """The built-in BP-FI vectors packaged as a submission."""
    ref = build_reference() if reference is None else reference
    return FiSubmission("BP-FI", {i: e.fi.copy() for i, e in ref.items()})


@dataclass(frozen=True)
class Counterexample:
    test_id: int
    dataset_ids: tuple[int, ...]
    feature: int | None
    observed: float
    expected: float | str

    def to_dict(self) -> dict:
        expected = self.expected if isinstance(self.expected, str) else _format_value(self.expected)
        return {
            "test_id": self.test_id,
            "dataset_ids": list(self.dataset_ids),
            "feature": self.feature,
            "observed": _format_value(float(self.observed)),
            "expected": expected,
        }


@dataclass
class TestResult:
    __test__ = False  # not a pytest class

    test_id: int
    verdict: Verdict
    counterexamples: list[Counterexample] = field(default_factory=list)
    missing: tuple[int, ...] = ()

    @property
    def name(self) -> str:
        return TEST_NAMES[self.test_id]

    def to_dict(self) -> dict:
        return {
            "id": self.test_id,
            "name": self.name,
            "verdict": self.verdict.value,
            "datasets": list(TEST_DATASETS[self.test_id]),
            "missing_datasets": list(self.missing),
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }


@dataclass
class TestReport:
    __test__ = False

    method_name: str
    epsilon: float
    results: dict[int, TestResult]

    def verdict(self, test_id: int) -> Verdict:
        return self.results[test_id].verdict

    @property
    def verdicts(self) -> dict[int, Verdict]:
        return {i: r.verdict for i, r in sorted(self.results.items())}

    @property
    def all_passed(self) -> bool:
        return all(r.verdict is Verdict.PASS for r in self.results.values())

    def failed(self) -> list[int]:
        return [i for i, v in self.verdicts.items() if v is Verdict.FAIL]

    def to_dict(self) -> dict:
        counts = {v.value: 0 for v in Verdict}
        for r in self.results.values():
            counts[r.verdict.value] += 1
        return {
            "method_name": self.method_name,
            "epsilon": self.epsilon,
            "summary": counts,
            "tests": [r.to_dict() for _, r in sorted(self.results.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)

    def to_table(self) -> str:
        lines = [f"method: {self.method_name}   epsilon: {self.epsilon}",
                 f"{'test':>4}  {'name':<46} {'verdict':<8} counterexamples"]
        for i, r in sorted(self.results.items()):
            lines.append(f"{i:>4}  {r.name:<46} {r.verdict.value:<8} {len(r.counterexamples)}")
        return "\n".join(lines)


# --- comparison helpers -----------------------------------------------------


def _same(a: float, b: float, eps: float) -> bool:
    """Equal within ``eps``; two NaNs or two same-signed infinities count as equal."""
    if math.isnan(a) or math.isnan(b):
        return math.isnan(a) and math.isnan(b)
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= eps + ROUNDING_SLACK


def _close(a: float, b: float, eps: float) -> bool:
    """Finite and within ``eps``; NaN and infinities never match."""
    return math.isfinite(a) and abs(a - b) <= eps + ROUNDING_SLACK


def _le(a: float, b: float, eps: float) -> bool:
    """``a <= b + eps``; false whenever a NaN is involved."""
    return bool(a <= b + eps + ROUNDING_SLACK)


# --- tests ------------------------------------------------------------------

Checker = Callable[[Mapping[int, np.ndarray], Mapping[int, ReferenceEntry], float], list]


def _t1(fi, ref, eps):
    out = []
    for i in TEST_DATASETS[1]:
        total = float(np.sum(fi[i]))
        if not np.all(np.isfinite(fi[i])) or not _close(total, ref[i].total_dependency, eps):
            out.append(Counterexample(1, (i,), None, total, ref[i].total_dependency))
    return out


def _t2(fi, ref, eps):
    out = []
    for a, b in STABLE_SUM_PAIRS:
        sa, sb = float(np.sum(fi[a])), float(np.sum(fi[b]))
        if not _same(sa, sb, eps):
            out.append(Counterexample(2, (a, b), None, sb, sa))
    return out


def _t3(fi, ref, eps):
    out = []
    for i in TEST_DATASETS[3]:
        for group in get_entry(i).symmetric_groups:
            first = group[0]
            for j in group[1:]:
                if not _same(fi[i][j], fi[i][first], eps):
                    out.append(Counterexample(3, (i,), j, fi[i][j], fi[i][first]))
    return out


def _per_feature(test_id: int, ok: Callable[[float, int, int], bool], expected: Callable[[int, int], Any]):
    def check(fi, ref, eps):
        out = []
        for i in TEST_DATASETS[test_id]:
            for j, x in enumerate(fi[i]):
                if not ok(float(x), i, j):
                    out.append(Counterexample(test_id, (i,), j, float(x), expected(i, j)))
        return out

    return check


def _t4(fi, ref, eps):
    return _per_feature(4, lambda x, i, j: x >= -eps, lambda i, j: ">= 0")(fi, ref, eps)


def _t5(fi, ref, eps):
    return _per_feature(5, lambda x, i, j: x <= 1 + eps, lambda i, j: "<= 1")(fi, ref, eps)


def _t6(fi, ref, eps):
    def bound(i, j):
        return float(ref[i].singleton_dependency[j]) / len(ref[i].fi)

    return _per_feature(6, lambda x, i, j: _le(bound(i, j), x, eps), bound)(fi, ref, eps)


def _t7(fi, ref, eps):
    return _per_feature(
        7, lambda x, i, j: _le(x, ref[i].total_dependency, eps),
        lambda i, j: ref[i].total_dependency,
    )(fi, ref, eps)


def _t8(fi, ref, eps):
    return _per_feature(
        8, lambda x, i, j: not ref[i].null_independent[j] or _close(x, 0.0, eps),
        lambda i, j: 0.0,
    )(fi, ref, eps)


def _t9(fi, ref, eps):
    return _per_feature(
        9, lambda x, i, j: not _close(x, 0.0, eps) or ref[i].null_independent[j],
        lambda i, j: "nonzero (feature is not null-independent)",
    )(fi, ref, eps)


def _expect(test_id: int, i: int, target: Sequence[float], fi, eps) -> list:
    return [Counterexample(test_id, (i,), j, float(x), float(t))
            for j, (x, t) in enumerate(zip(fi[i], target)) if not _close(float(x), t, eps)]


def _t10(fi, ref, eps):
    return _expect(10, 11, (1.0, 0.0, 0.0), fi, eps)


def _t11(fi, ref, eps):
    out = []
    for i in TEST_DATASETS[11]:
        vec = fi[i]
        for j, full in enumerate(ref[i].fully_informative):
            if not full:
                continue
            if math.isnan(vec[j]):
                out.append(Counterexample(11, (i,), j, vec[j], "max FI"))
                continue
            for x in vec:
                if x > vec[j] + eps + ROUNDING_SLACK:
                    out.append(Counterexample(11, (i,), j, vec[j], float(x)))
    return out


def _t12(fi, ref, eps):
    out = []
    for i in TEST_DATASETS[12]:
        bins = get_entry(i).bins
        for fine, kf in enumerate(bins):
            for coarse, kc in enumerate(bins):
                if kf > kc and not _le(fi[i][coarse], fi[i][fine], eps):
                    out.append(Counterexample(12, (i,), coarse, fi[i][coarse], fi[i][fine]))
    return out


def _changes(fi) -> Iterable[tuple[int, int, int, float, float]]:
    for a, b, mapping in ADD_FEATURE_PAIRS:
        for j, k in mapping.items():
            yield a, b, j, float(fi[a][j]), float(fi[b][k])


def _t13(fi, ref, eps):
    found = [d for d in _changes(fi) if d[4] - d[3] > eps + ROUNDING_SLACK]
    if found:
        return []
    return [Counterexample(13, TEST_DATASETS[13], None, _max_shift(fi, +1), f"an increase > {eps}")]


def _t14(fi, ref, eps):
    found = [d for d in _changes(fi) if d[3] - d[4] > eps + ROUNDING_SLACK]
    if found:
        return []
    return [Counterexample(14, TEST_DATASETS[14], None, _max_shift(fi, -1), f"a decrease > {eps}")]


def _max_shift(fi, sign: int) -> float:
    shifts = [sign * (after - before) for *_, before, after in _changes(fi)]
    shifts = [s for s in shifts if not math.isnan(s)]
    return max(shifts) if shifts else math.nan


def _t15(fi, ref, eps):
    out = []
    for a, b, j, k in CLONE_PAIRS:
        before, after = float(fi[a][j]), float(fi[b][k])
        if not (_same(after, before, eps) or _le(after, before, eps)):
            out.append(Counterexample(15, (a, b), k, after, before))
    return out


def _t16(fi, ref, eps):
    out = []
    for a, b, perm in ORDER_PAIRS:
        for j, k in enumerate(perm):
            if not _same(fi[b][k], fi[a][j], eps):
                out.append(Counterexample(16, (a, b), k, fi[b][k], fi[a][j]))
    return out


def _t17(fi, ref, eps):
    return [c for i, target in XOR_OUTCOMES.items() for c in _expect(17, i, target, fi, eps)]


def _t18(fi, ref, eps):
    out = []
    for i in PROBABILITY_IDS:
        p = float(probability_of(i))
        out.extend(_expect(18, i, (p, 1 - p), fi, eps))
    return out


CHECKS: dict[int, Checker] = {
    1: _t1, 2: _t2, 3: _t3, 4: _t4, 5: _t5, 6: _t6, 7: _t7, 8: _t8, 9: _t9,
    10: _t10, 11: _t11, 12: _t12, 13: _t13, 14: _t14, 15: _t15, 16: _t16,
    17: _t17, 18: _t18,
}


def run_test(
    test_id: int,
    sub: FiSubmission,
    reference: Mapping[int, ReferenceEntry] | None = None,
    epsilon: float = EPSILON,
) -> TestResult:
    if test_id not in CHECKS:
        raise KeyError(f"no test {test_id}; tests are numbered 1..18")
    ref = build_reference() if reference is None else reference
    needed = TEST_DATASETS[test_id]
    missing = tuple(i for i in needed if sub.get(i) is None)
    if missing:
        return TestResult(test_id, Verdict.NO_RESULT, missing=missing)
    fi = {i: sub.get(i) for i in needed}
    counterexamples = CHECKS[test_id](fi, ref, epsilon)
    verdict = Verdict.FAIL if counterexamples else Verdict.PASS
    return TestResult(test_id, verdict, counterexamples)


def run_all(
    sub: FiSubmission,
    reference: Mapping[int, ReferenceEntry] | None = None,
    epsilon: float = EPSILON,
) -> TestReport:
    ref = build_reference() if reference is None else reference
    missing_ref = set(CATALOG_IDS) - set(ref)
    if missing_ref:
        raise ValueError(f"reference lacks datasets {sorted(missing_ref)}")
    results = {t: run_test(t, sub, ref, epsilon) for t in sorted(CHECKS)}
    return TestReport(sub.method_name, epsilon, results)
