"""BP feature importance (BP-FI).

Exact Shapley values over the BP dependency of a discrete
target on feature subsets, a catalog of 28 synthetic ground-truth datasets
and an 18-test harness for grading any method's importance vectors.
"""

__version__ = "0.1.0"

from .catalog import get_dataset, get_entry, golden_fi
from .dataset import BinningRule, Column, DiscreteDataset, SyntheticSpec, bin_column, materialize, read_csv
from .dependency import dep, ud, ud_self
from .estimator import BPFeatureImportance, DiscreteBinner
from .harness import FiSubmission, TestReport, run_all, run_test, self_submission
from .shapley import (
    FiResult,
    SubsetDependencyCache,
    best_subset,
    compute_fi,
    fi_for_model_predictions,
    oracle_fi,
    shapley_weight,
)

__all__ = [
    "BPFeatureImportance",
    "BinningRule",
    "Column",
    "DiscreteBinner",
    "DiscreteDataset",
    "FiResult",
    "FiSubmission",
    "SubsetDependencyCache",
    "SyntheticSpec",
    "TestReport",
    "best_subset",
    "bin_column",
    "compute_fi",
    "dep",
    "fi_for_model_predictions",
    "get_dataset",
    "get_entry",
    "golden_fi",
    "materialize",
    "oracle_fi",
    "read_csv",
    "run_all",
    "run_test",
    "self_submission",
    "shapley_weight",
    "ud",
    "ud_self",
]
