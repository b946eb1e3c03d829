"""Differential geometry of hypersurfaces of revolution ``F = r(h) Phi + h e_{n+1}``.

The unit normal points inward (toward the axis), so the support function
``<F, nu>`` is negative on round cylinders and spheres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .symfun import CurvatureFunction, eval_rho, ray


@dataclass(frozen=True)
class ExpanderParams:
    """Constant ``mu > 0`` in the self-expander equation ``-1/rho = mu <F, nu>``."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"expander constant must be positive, got {self.mu!r}")


def principal_curvatures(r: float, rdot: float, rddot: float, n: int) -> np.ndarray:
    """Principal curvatures of the profile graph ``r(h)`` rotated about the h-axis.

    The first n-1 entries are the rotational curvature, the last one is the
    curvature of the profile curve.
    """
    if not r > 0:
        raise DomainError(f"radius must be positive, got r={r!r}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    w2 = 1.0 + rdot * rdot
    lam = np.full(n, 1.0 / (r * math.sqrt(w2)))
    lam[-1] = -rddot / w2 ** 1.5
    return lam


def support_function(h: float, r: float, rdot: float) -> float:
    """``<F, nu> = (rdot h - r) / sqrt(1 + rdot^2)``."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got r={r!r}")
    return (rdot * h - r) / math.sqrt(1.0 + rdot * rdot)


def mu_cylinder(f: CurvatureFunction) -> ExpanderParams:
    """Expander constant of round cylinders, ``1 / rho(1, ..., 1, 0)``."""
    return ExpanderParams(1.0 / eval_rho(f, ray(f.n, 0.0)))


def mu_sphere(f: CurvatureFunction) -> ExpanderParams:
    """Expander constant of round spheres, ``1 / rho(1, ..., 1)``."""
    return ExpanderParams(1.0 / eval_rho(f, np.ones(f.n)))


def expander_residual(f: CurvatureFunction, h: float, r: float, rdot: float,
                      rddot: float, p: ExpanderParams) -> float:
    """``-1/rho(lambda) - mu <F, nu>`` at one point of the profile.

    Raises ConeError (carrying the curvatures) when they leave the cone.
    """
    lam = principal_curvatures(r, rdot, rddot, f.n)
    return -1.0 / eval_rho(f, lam) - p.mu * support_function(h, r, rdot)
