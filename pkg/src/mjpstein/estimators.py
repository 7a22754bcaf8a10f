"""Estimator-style wrappers around the functional API.

The objects follow the scikit-learn conventions (constructor stores
parameters only, ``fit`` returns ``self``, learned state ends with ``_``)
so they work with ``get_params``/``set_params`` and ``clone``.  "Fitting"
here is deterministic computation from the model, not learning from data.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_symmetric
from .engine import SteinSolver, build_chain, stationary_distribution
from .factorize import factorize
from .process import ProcessSpec, geometry_of


class CovarianceFactorizer(BaseEstimator, TransformerMixin):
    """Integer dyad factorization of a covariance matrix.

    ``fit(sigma2)`` stores ``jumps_`` and ``weights_``; ``transform`` maps
    rows of jump vectors to their weights and ``inverse_transform``
    rebuilds the covariance.
    """

    def fit(self, X, y=None):
        sigma2 = check_symmetric(X, "sigma2")
        self.jump_set_ = factorize(sigma2)
        self.jumps_ = self.jump_set_.jumps
        self.weights_ = self.jump_set_.weights
        self.n_features_in_ = sigma2.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "jump_set_")
        X = np.atleast_2d(np.asarray(X))
        return np.array([self.jump_set_.weight(row) for row in X])

    def inverse_transform(self, X=None):
        check_is_fitted(self, "jump_set_")
        return self.jump_set_.matrix()


class TruncatedEquilibrium(BaseEstimator):
    """Equilibrium law of the truncated chain.

    Parameters
    ----------
    delta : float
        Sigma-ball radius per unit of ``n``.
    check_irreducible : bool
        Run the strong-component check before solving.
    """

    def __init__(self, delta=0.25, check_irreducible=True):
        self.delta = delta
        self.check_irreducible = check_irreducible

    def fit(self, spec: ProcessSpec, y=None):
        if not isinstance(spec, ProcessSpec):
            raise TypeError("fit expects a ProcessSpec")
        self.geometry_ = geometry_of(spec)
        self.chain_ = build_chain(spec, self.geometry_, self.delta)
        self.stationary_ = stationary_distribution(self.chain_, check=self.check_irreducible)
        self.n_features_in_ = spec.d
        return self

    def predict_proba(self, X):
        """Equilibrium probability of each row of ``X`` (zero off the ball)."""
        check_is_fitted(self, "stationary_")
        idx = self.chain_.lookup(np.atleast_2d(X))
        out = np.zeros(idx.shape[0])
        out[idx >= 0] = self.stationary_.probs[idx[idx >= 0]]
        return out


class SteinTransformer(BaseEstimator, TransformerMixin):
    """Maps target sets to centered Stein solutions over the chain states.

    ``transform`` takes a boolean matrix, one row per target set, and returns
    a matrix of ``h_B`` values with the same shape.
    """

    def __init__(self, delta=0.25):
        self.delta = delta

    def fit(self, spec: ProcessSpec, y=None):
        eq = TruncatedEquilibrium(delta=self.delta).fit(spec)
        self.chain_ = eq.chain_
        self.stationary_ = eq.stationary_
        self.solver_ = SteinSolver(self.chain_, self.stationary_)
        self.n_features_in_ = self.chain_.size
        return self

    def transform(self, X):
        check_is_fitted(self, "solver_")
        X = np.atleast_2d(np.asarray(X, dtype=bool))
        if X.shape[1] != self.chain_.size:
            raise ValueError(f"expected {self.chain_.size} columns, got {X.shape[1]}")
        return np.vstack([self.solver_.solve(row).values for row in X])
