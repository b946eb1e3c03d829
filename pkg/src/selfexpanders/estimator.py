"""scikit-learn style wrapper around the bottle-profile solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .profile_ode import InitialConditions, SolveOptions, integrate
from .symfun import parse_family


def _heights(X) -> np.ndarray:
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of heights, got shape {X.shape}")
        X = X[:, 0]
    return X


class BottleProfile(TransformerMixin, BaseEstimator):
    """Solve for a bottle profile ``r(h)`` and evaluate it at given heights.

    ``fit`` ignores its arguments: the profile is fully determined by the
    hyperparameters. ``predict`` returns ``r(h)``; ``transform`` returns the
    columns ``[r, rdot, rddot]``.

    Examples
    --------
    >>> model = BottleProfile(family="H", n=2).fit()
    >>> model.predict([-100.0, 100.0]).round(6)
    array([1.134859, 2.460922])
    """

    def __init__(self, family="H", n=2, h0=-1.0, r0=1.5, rdot0=0.3,
                 rtol=1e-10, atol=1e-12, span=1e4, tail_eps=1e-8):
        self.family = family
        self.n = n
        self.h0 = h0
        self.r0 = r0
        self.rdot0 = rdot0
        self.rtol = rtol
        self.atol = atol
        self.span = span
        self.tail_eps = tail_eps

    def fit(self, X=None, y=None):
        f = parse_family(self.family, self.n)
        ic = InitialConditions(float(self.h0), float(self.r0), float(self.rdot0))
        opts = SolveOptions(rtol=self.rtol, atol=self.atol, span=self.span, tail_eps=self.tail_eps)
        self.family_ = f
        self.trajectory_, self.report_ = integrate(f, ic, opts)
        self.h_star_ = self.report_.h_star
        self.r_min_ = self.report_.r_min_est
        self.r_max_ = self.report_.r_max_est
        return self

    def _states(self, X):
        check_is_fitted(self, "trajectory_")
        return [self.trajectory_.state_at(float(h)) for h in _heights(X)]

    def predict(self, X) -> np.ndarray:
        return np.array([s.r for s in self._states(X)])

    def transform(self, X) -> np.ndarray:
        from .profile_ode import rhs

        states = self._states(X)
        out = np.empty((len(states), 3))
        for i, s in enumerate(states):
            out[i] = (s.r, s.rdot, rhs(self.family_, s) if s.rdot > 0 else 0.0)
        return out

    def score(self, X=None, y=None) -> float:
        """Fraction of profile checks that passed."""
        check_is_fitted(self, "report_")
        verdicts = self.report_.invariant_verdicts
        return sum(v.passed for v in verdicts) / len(verdicts)
