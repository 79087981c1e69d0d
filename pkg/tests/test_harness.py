import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpfi.catalog import CATALOG_IDS, get_entry
from bpfi.exceptions import MalformedSubmission
from bpfi.harness import (
    EPSILON,
    TEST_DATASETS,
    TEST_NAMES,
    FiSubmission,
    Verdict,
    run_all,
    run_test,
    self_submission,
)


@pytest.fixture(scope="module")
def own():
    return self_submission()


def variant(sub, dataset_id, values):
    results = dict(sub.results)
    results[dataset_id] = values
    return FiSubmission("variant", results)


def zeros():
    return FiSubmission("zeros", {i: [0.0] * len(get_entry(i).feature_names) for i in CATALOG_IDS})


class TestSelf:
    def test_all_pass(self, own):
        report = run_all(own)
        assert report.all_passed
        assert set(report.verdicts) == set(range(1, 19))
        assert all(not r.counterexamples for r in report.results.values())

    def test_efficiency_on_null_system(self, own):
        res = run_test(1, own)
        assert res.verdict is Verdict.PASS
        assert float(np.sum(own.get(6))) == pytest.approx(0.0, abs=1e-12)


class TestVerdicts:
    def test_all_zeros(self):
        report = run_all(zeros())
        assert report.verdict(17) is Verdict.FAIL
        assert report.failed() == [1, 6, 9, 10, 13, 14, 17, 18]

    def test_missing_vector_is_no_result(self, own):
        report = run_all(variant(own, 11, None))
        assert report.verdict(10) is Verdict.NO_RESULT
        assert report.results[10].missing == (11,)
        for t, v in report.verdicts.items():
            if 11 in TEST_DATASETS[t]:
                assert v is Verdict.NO_RESULT
            else:
                assert v is Verdict.PASS

    def test_below_range(self, own):
        res = run_test(4, variant(own, 1, [-0.05, 0.5, 0.5]))
        assert res.verdict is Verdict.FAIL
        (ce,) = res.counterexamples
        assert (ce.dataset_ids, ce.feature, ce.observed) == ((1,), 0, -0.05)

    def test_symmetry_within_epsilon(self, own):
        res = run_test(3, variant(own, 13, [0.34, 0.33, 0.33]))
        assert res.verdict is Verdict.PASS

    def test_symmetry_beyond_epsilon(self, own):
        assert run_test(3, variant(own, 13, [0.36, 0.33, 0.33])).verdict is Verdict.FAIL

    def test_perturbed_xor(self, own):
        fi = own.get(14).copy()
        fi[0] += 0.05
        report = run_all(variant(own, 14, fi))
        assert report.failed() == [1, 2, 3, 17]
        for t in report.failed():
            assert 14 in TEST_DATASETS[t]

    def test_fail_has_counterexample(self):
        report = run_all(zeros())
        for r in report.results.values():
            assert (r.verdict is Verdict.FAIL) == bool(r.counterexamples)

    def test_unknown_test(self, own):
        with pytest.raises(KeyError):
            run_test(19, own)


class TestNanSemantics:
    def test_nan_fails_sum(self, own):
        assert run_test(1, variant(own, 14, ["NaN", 0.5])).verdict is Verdict.FAIL

    def test_nan_fails_range(self, own):
        assert run_test(4, variant(own, 14, ["nan", 0.5])).verdict is Verdict.FAIL
        assert run_test(5, variant(own, 14, ["nan", 0.5])).verdict is Verdict.FAIL

    def test_two_nans_are_symmetric(self, own):
        assert run_test(3, variant(own, 14, ["NaN", "NaN"])).verdict is Verdict.PASS

    def test_same_infinities_are_equal(self, own):
        assert run_test(3, variant(own, 14, ["inf", "inf"])).verdict is Verdict.PASS
        assert run_test(3, variant(own, 14, ["inf", "-inf"])).verdict is Verdict.FAIL

    def test_nan_fails_target_outcome(self, own):
        assert run_test(17, variant(own, 14, ["NaN", "NaN"])).verdict is Verdict.FAIL


class TestSubmissionFormat:
    def test_round_trip(self, own):
        back = FiSubmission.from_json(own.to_json())
        assert back.method_name == "BP-FI"
        for i in CATALOG_IDS:
            assert back.get(i).tolist() == own.get(i).tolist()

    def test_special_values(self, own):
        sub = variant(own, 14, ["NaN", "-Inf"])
        obj = json.loads(sub.to_json())
        assert obj["results"]["14"] == ["NaN", "-inf"]
        back = FiSubmission.from_json(sub.to_json()).get(14)
        assert math.isnan(back[0]) and back[1] == -math.inf

    def test_null_entries(self):
        sub = FiSubmission.from_json('{"method_name": "m", "results": {"14": null}}')
        assert sub.get(14) is None
        assert run_all(sub).verdict(17) is Verdict.NO_RESULT

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[]",
            '{"method_name": "m"}',
            '{"method_name": 3, "results": {}}',
            '{"results": {"99": [0]}}',
            '{"results": {"x": [0]}}',
            '{"results": {"14": [0.5]}}',
            '{"results": {"14": "0.5"}}',
            '{"results": {"14": ["half", 0.5]}}',
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(MalformedSubmission):
            FiSubmission.from_json(text)

    def test_report_json_is_strict(self, own):
        report = run_all(variant(own, 14, ["NaN", "NaN"]))
        obj = json.loads(report.to_json())
        assert obj["summary"]["Pass"] + obj["summary"]["Fail"] == 18
        assert [t["id"] for t in obj["tests"]] == list(range(1, 19))

    def test_table(self, own):
        table = run_all(own).to_table()
        assert len(table.splitlines()) == 20
        for name in TEST_NAMES.values():
            assert name in table


class TestRobustness:
    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(CATALOG_IDS), st.floats(-EPSILON / 2, EPSILON / 2, allow_nan=False))
    def test_small_uniform_shift_of_one_entry_keeps_range(self, dataset_id, delta):
        own = self_submission()
        fi = own.get(dataset_id).copy()
        fi[0] += delta
        sub = variant(own, dataset_id, fi)
        for t in (4, 5, 17, 18):
            assert run_test(t, sub).verdict is Verdict.PASS

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(CATALOG_IDS))
    def test_no_result_isolated(self, dataset_id):
        report = run_all(variant(self_submission(), dataset_id, None))
        for t, v in report.verdicts.items():
            expected = Verdict.NO_RESULT if dataset_id in TEST_DATASETS[t] else Verdict.PASS
            assert v is expected
