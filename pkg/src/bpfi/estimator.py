"""scikit-learn front end: a BP-FI feature selector and a fitted binner."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .dataset import BinningRule, Column, DiscreteDataset, apply_bin_edges, fit_bin_edges
from .dependency import mask_to_indices
from .shapley import FiResult, best_subset, compute_fi

__all__ = ["BPFeatureImportance", "DiscreteBinner", "check_discrete_dataset"]


def check_discrete_dataset(X, y, feature_names=None, target_name: str = "y") -> DiscreteDataset:
    """Encode a validated 2-D ``X`` and 1-D ``y`` as a :class:`DiscreteDataset`.

    Every distinct value of a column becomes its own category, so continuous
    columns should be binned first (see :class:`DiscreteBinner`).
    """
    X = np.asarray(X)
    y = np.asarray(y).ravel()
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(X.shape[1])]
    names = [str(n) for n in feature_names]
    while target_name in names:
        target_name = "_" + target_name
    cols = tuple(Column.from_values(name, X[:, j].tolist()) for j, name in enumerate(names))
    return DiscreteDataset(cols, Column.from_values(target_name, y.tolist()))


class BPFeatureImportance(SelectorMixin, BaseEstimator):
    """BP feature importance on categorical data.

    ``fit`` computes the exact Shapley value of every feature under the
    dependency of ``y`` on feature subsets. As a selector it keeps the
    ``n_features_to_select`` features whose joint dependency on ``y`` is
    highest (lowest bitmask on ties).

    Parameters
    ----------
    n_features_to_select : int or None
        Size of the selected subset; ``None`` keeps half of the features
        (at least one).
    max_features : int or None
        Refuse inputs with more features than this; ``None`` uses the
        package default (20, or ``BPFI_MAX_FEATURES``).

    Attributes
    ----------
    feature_importances_ : ndarray of shape (n_features,)
    total_dependency_ : float
        Dependency of ``y`` on all features; equals the sum of importances.
    subset_dependencies_ : SubsetDependencyCache
    support_ : ndarray of bool
    result_ : FiResult
    """

    def __init__(self, n_features_to_select=None, max_features=None):
        self.n_features_to_select = n_features_to_select
        self.max_features = max_features

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=None)
        names = getattr(self, "feature_names_in_", None)
        ds = check_discrete_dataset(X, y, names)
        self.result_: FiResult = compute_fi(ds, max_features=self.max_features)
        self.feature_importances_ = self.result_.importances
        self.total_dependency_ = self.result_.total_dependency
        self.subset_dependencies_ = self.result_.cache

        m = ds.n_features
        k = self.n_features_to_select
        if k is None:
            k = max(1, m // 2)
        mask = best_subset(self.subset_dependencies_, int(k))
        support = np.zeros(m, dtype=bool)
        support[mask_to_indices(mask)] = True
        self.support_ = support
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "support_")
        return self.support_

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.string = True
        tags.input_tags.categorical = True
        tags.target_tags.required = True
        return tags


class DiscreteBinner(TransformerMixin, BaseEstimator):
    """Bin every column of a numeric matrix into integer codes.

    Edges are learned in ``fit``; on the training data the codes equal
    :func:`bpfi.dataset.bin_column` applied column by column.
    """

    def __init__(self, n_bins=10, strategy="equal-width"):
        self.n_bins = n_bins
        self.strategy = strategy

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=float)
        self.edges_ = [
            fit_bin_edges(X[:, j], BinningRule(f"x{j}", self.strategy, self.n_bins))
            for j in range(X.shape[1])
        ]
        return self

    def transform(self, X):
        check_is_fitted(self, "edges_")
        X = validate_data(self, X, dtype=float, reset=False)
        return np.column_stack(
            [apply_bin_edges(X[:, j], e) for j, e in enumerate(self.edges_)]
        )
