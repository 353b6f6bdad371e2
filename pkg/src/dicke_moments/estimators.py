"""Scikit-learn style wrappers around the functional core.

Rows are samples: population vectors of a fixed system size N stacked into
an (n_samples, N+1) array. The wrappers make the moment transform, the
separability check, and the mixture reconstruction composable with
pipelines and grid search via the usual fit/transform/predict surface.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bernstein import MomentVector, transform_matrix
from .dicke_core import PopulationVector
from .hausdorff import DEFAULT_TOL_PSD, hankel_negativity, validate_moments
from .reconstruct import DEFAULT_RANK_TOL, reconstruct_decomposition

__all__ = [
    "BernsteinMomentTransform",
    "HankelSeparabilityClassifier",
    "CoherentMixtureReconstructor",
]


def _check_populations(X, n_levels: int | None = None) -> np.ndarray:
    X = check_array(X, ensure_2d=True, dtype=float)
    if n_levels is not None and X.shape[1] != n_levels:
        raise ValueError(
            f"expected {n_levels} Dicke levels per row, got {X.shape[1]}"
        )
    return X


class BernsteinMomentTransform(TransformerMixin, BaseEstimator):
    """Map rows of Dicke populations to raw-moment vectors m = B p.

    The system size is inferred from the data at fit time; the triangular
    transform and its inverse are cached as fitted attributes.
    """

    def fit(self, X, y=None):
        X = _check_populations(X)
        self.n_emitters_ = X.shape[1] - 1
        tm = transform_matrix(self.n_emitters_)
        self.matrix_ = tm.B
        self.inverse_matrix_ = tm.Binv
        return self

    def transform(self, X):
        check_is_fitted(self, "matrix_")
        X = _check_populations(X, self.n_emitters_ + 1)
        return X @ self.matrix_.T

    def inverse_transform(self, X):
        check_is_fitted(self, "inverse_matrix_")
        X = _check_populations(X, self.n_emitters_ + 1)
        return X @ self.inverse_matrix_.T


class HankelSeparabilityClassifier(BaseEstimator):
    """Separability verdicts for rows of Dicke populations.

    predict returns 1 for separable rows, 0 for entangled ones;
    decision_function returns minus the Hankel negativity, so separable
    states sit at exactly zero.
    """

    def __init__(self, tol_psd: float = DEFAULT_TOL_PSD):
        self.tol_psd = tol_psd

    def fit(self, X, y=None):
        X = _check_populations(X)
        self.n_emitters_ = X.shape[1] - 1
        return self

    def predict(self, X):
        check_is_fitted(self, "n_emitters_")
        X = _check_populations(X, self.n_emitters_ + 1)
        out = np.empty(X.shape[0], dtype=int)
        for i, row in enumerate(X):
            p = PopulationVector.from_array(row)
            verdict = validate_moments(
                MomentVector.from_array(self._moments(p)), self.tol_psd
            )
            out[i] = int(verdict.valid)
        return out

    def decision_function(self, X):
        check_is_fitted(self, "n_emitters_")
        X = _check_populations(X, self.n_emitters_ + 1)
        return np.array(
            [
                -hankel_negativity(PopulationVector.from_array(row), self.tol_psd)
                for row in X
            ]
        )

    @staticmethod
    def _moments(p: PopulationVector) -> np.ndarray:
        m = transform_matrix(p.N).B @ p.p
        m[0] = 1.0
        return m


class CoherentMixtureReconstructor(BaseEstimator):
    """Fit spin-coherent atoms (w_i, eps_i) to one row of populations each.

    After fit, ``decompositions_`` holds one Decomposition per row and
    ``residuals_`` the max-norm moment residuals.
    """

    def __init__(self, rank_tol: float = DEFAULT_RANK_TOL):
        self.rank_tol = rank_tol

    def fit(self, X, y=None):
        X = _check_populations(X)
        self.n_emitters_ = X.shape[1] - 1
        B = transform_matrix(self.n_emitters_).B
        decompositions = []
        residuals = []
        for row in X:
            m = B @ PopulationVector.from_array(row).p
            m[0] = 1.0
            d = reconstruct_decomposition(
                MomentVector.from_array(m), rank_tol=self.rank_tol
            )
            decompositions.append(d)
            residuals.append(
                float(np.max(np.abs(d.moments(m.size) - m)))
            )
        self.decompositions_ = decompositions
        self.residuals_ = np.array(residuals)
        return self

    def fit_predict(self, X, y=None):
        self.fit(X)
        return self.decompositions_
