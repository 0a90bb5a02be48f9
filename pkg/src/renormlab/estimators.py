"""Scikit-learn style front end for the pipeline stages.

Hyperparameters live in ``__init__`` untouched, computation happens in
``fit`` and lands in trailing-underscore attributes, so ``get_params`` /
``set_params`` and pipeline composition work as usual.  Point-wise
operations (the induced Markov map, the conjugacy) are exposed as
``transform`` on arrays and keep the input shape.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .conjugacy import build_mesh, conjugacy_at, match_towers, qs_modulus
from .distortion import Thresholds, certify
from .errors import UnresolvedPointError
from .maps import UnimodalMap, map_from_descriptor
from .partition import build_partition
from .renorm import build_tower
from .validation import as_point_array, check_map_like


def _coerce_map(m) -> UnimodalMap:
    if isinstance(m, dict):
        return map_from_descriptor(m)
    return check_map_like(m)


def _check_fitted(estimator, attr: str):
    if not hasattr(estimator, attr):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit first")


class RenormalizationTower(BaseEstimator):
    """Builds the tower of renormalizations of one map.

    Parameters
    ----------
    depth : levels to compute.
    max_return_time : bound N on the admissible return times.
    on_failure : "raise" or "truncate" when a level cannot be built.
    """

    def __init__(self, depth: int = 6, max_return_time: int = 2,
                 on_failure: str = "raise"):
        self.depth = depth
        self.max_return_time = max_return_time
        self.on_failure = on_failure

    def fit(self, X, y=None):
        fmap = _coerce_map(X)
        self.tower_ = build_tower(fmap, self.depth, self.max_return_time,
                                  on_failure=self.on_failure)
        self.return_times_ = self.tower_.return_times
        self.scaling_ratios_ = np.array(self.tower_.scaling_ratios())
        self.periodic_points_ = np.array(self.tower_.p_points)
        self.n_levels_ = self.tower_.depth
        return self

    def score(self, X=None, y=None) -> float:
        """Negative worst periodicity residual (larger is better)."""
        _check_fitted(self, "tower_")
        return -max(level.p_residual for level in self.tower_.levels)


class InducedMarkovMap(BaseEstimator, TransformerMixin):
    """Induced Markov map F of the tower partition, as a point transformer.

    ``transform`` evaluates F on an array (NaN where unresolved);
    ``predict`` labels each point with its flat element index (-1 where
    unresolved).
    """

    def __init__(self, depth: int = 4, max_return_time: int = 2):
        self.depth = depth
        self.max_return_time = max_return_time

    def fit(self, X, y=None):
        fmap = _coerce_map(X)
        self.tower_ = build_tower(fmap, self.depth, self.max_return_time)
        self.partition_ = build_partition(self.tower_)
        self.element_index_ = {e.key: i for i, e in
                               enumerate(self.partition_.elements)}
        return self

    def _eval(self, x: float) -> tuple[float, int]:
        try:
            element = self.partition_.locate(x)
        except UnresolvedPointError:
            return float("nan"), -1
        y = x
        for _ in range(element.iterate):
            y = self.partition_.tower.base(y)
        return float(y), self.element_index_[element.key]

    def transform(self, X):
        _check_fitted(self, "partition_")
        arr = as_point_array(X, "X")
        flat = arr.ravel()
        out = np.array([self._eval(float(x))[0] for x in flat])
        return out.reshape(arr.shape)

    def predict(self, X):
        _check_fitted(self, "partition_")
        arr = as_point_array(X, "X")
        flat = arr.ravel()
        out = np.array([self._eval(float(x))[1] for x in flat], dtype=int)
        return out.reshape(arr.shape)


class DistortionCertifier(BaseEstimator):
    """Runs the bounded-distortion certification on one map."""

    def __init__(self, depth: int = 5, word_length: int = 4, grid: int = 64,
                 threshold_a: float = 100.0, threshold_b: float = 100.0,
                 threshold_c: float = 1000.0, max_return_time: int = 2):
        self.depth = depth
        self.word_length = word_length
        self.grid = grid
        self.threshold_a = threshold_a
        self.threshold_b = threshold_b
        self.threshold_c = threshold_c
        self.max_return_time = max_return_time

    def fit(self, X, y=None):
        fmap = _coerce_map(X)
        tower = build_tower(fmap, self.depth, self.max_return_time)
        partition = build_partition(tower)
        self.report_ = certify(partition, self.word_length, self.grid,
                               Thresholds(self.threshold_a, self.threshold_b,
                                          self.threshold_c))
        self.constants_ = (self.report_.A, self.report_.B, self.report_.C)
        self.passed_ = self.report_.passed
        return self

    def score(self, X=None, y=None) -> float:
        _check_fitted(self, "report_")
        return 1.0 if self.passed_ else 0.0


class ConjugacyMap(BaseEstimator, TransformerMixin):
    """Conjugacy H between two maps with matching combinatorics.

    ``fit(X, y)`` takes the source map X and target map y; ``transform``
    evaluates H, ``inverse_transform`` evaluates H^{-1}.
    """

    def __init__(self, depth: int = 5, max_return_time: int = 2,
                 word_length: int = 4):
        self.depth = depth
        self.max_return_time = max_return_time
        self.word_length = word_length

    def fit(self, X, y):
        fmap = _coerce_map(X)
        gmap = _coerce_map(y)
        tower_f = build_tower(fmap, self.depth, self.max_return_time)
        tower_g = build_tower(gmap, self.depth, self.max_return_time)
        self.match_ = match_towers(tower_f, tower_g)
        part_f = build_partition(tower_f)
        part_g = build_partition(tower_g)
        self.mesh_ = build_mesh(part_f, part_g, self.word_length)
        self.resolution_ = self.mesh_.resolution
        return self

    def transform(self, X):
        _check_fitted(self, "mesh_")
        arr = as_point_array(X, "X")
        return np.asarray(conjugacy_at(self.mesh_, arr)).reshape(arr.shape)

    def inverse_transform(self, X):
        _check_fitted(self, "mesh_")
        arr = as_point_array(X, "X")
        return np.asarray(conjugacy_at(self.mesh_.inverse(), arr)).reshape(arr.shape)

    def qs_table(self, j0: int = 3, j1: int = 8, grid: int = 512):
        _check_fitted(self, "mesh_")
        return qs_modulus(self.mesh_, j0, j1, grid)
