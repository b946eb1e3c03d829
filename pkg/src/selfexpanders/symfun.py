"""Symmetric curvature functions and their restriction to the cylinder ray.

A curvature function ``rho`` is a positive, symmetric, degree-1 homogeneous
function of the principal curvatures, defined on an open cone ``Gamma``.
Along the ray ``(1, ..., 1, xi)`` it restricts to a strictly increasing
scalar function ``rho_hat`` on an interval ``(-alpha, beta)``; the profile
ODE only ever needs ``rho_hat``, its derivative and its inverse.

Every family is an immutable dataclass. The constants ``alpha``, ``beta``,
``gamma`` (supremum of ``rho_hat``) and ``uniform_c`` (supremum of its
derivative) are fixed at construction, from closed forms where known and
from numerical scans otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .exceptions import ConeError, DomainError, RangeError

INF = math.inf

#: cap used when scanning toward an infinite right endpoint
SCAN_CAP = 1e6

# 3-point Gauss-Legendre nodes/weights on [0, 1]
_GL_NODES = (0.5 - math.sqrt(15) / 10, 0.5, 0.5 + math.sqrt(15) / 10)
_GL_WEIGHTS = (5 / 18, 8 / 18, 5 / 18)


def elementary_symmetric(lambdas: Sequence[float]) -> list[float]:
    """Return ``[sigma_0, ..., sigma_n]`` via the product recurrence of
    ``prod (1 + lambda_i x)``."""
    e = [1.0] + [0.0] * len(lambdas)
    for i, x in enumerate(lambdas, start=1):
        for j in range(i, 0, -1):
            e[j] += x * e[j - 1]
    return e


def sigma_k(lambdas: Sequence[float], k: int) -> float:
    """k-th elementary symmetric polynomial of ``lambdas``.

    >>> sigma_k([2.0, 3.0, 4.0], 2)
    26.0
    """
    n = len(lambdas)
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise TypeError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    return elementary_symmetric(lambdas)[k]


def _ray_sigma(n: int, j: int, xi: float) -> float:
    """sigma_j(1, ..., 1, xi) with n-1 ones."""
    if j == 0:
        return 1.0
    return comb(n - 1, j) + comb(n - 1, j - 1) * xi


def _ray_sigma_slope(n: int, j: int) -> int:
    return comb(n - 1, j - 1) if j >= 1 else 0


def _garding_violation(lambdas, m: int) -> Optional[str]:
    e = elementary_symmetric(lambdas)
    for j in range(1, m + 1):
        if not e[j] > 0:
            return f"sigma_{j} > 0"
    return None


def ray(n: int, xi: float) -> np.ndarray:
    """The point ``(1, ..., 1, xi)`` of R^n."""
    v = np.ones(n)
    v[-1] = xi
    return v


def central_difference(fun, x: float, lo: float = -INF, hi: float = INF) -> float:
    """Central difference with a step kept inside ``(lo, hi)``."""
    step = 1e-6 * max(1.0, abs(x))
    room = min(x - lo, hi - x)
    if step > 0.25 * room:
        step = 0.25 * room
    return (fun(x + step) - fun(x - step)) / (2 * step)


@dataclass(frozen=True)
class CurvatureFunction:
    """Base class of the registered curvature-function families."""

    n: int

    alpha: float = field(init=False, default=math.nan, compare=False)
    beta: float = field(init=False, default=math.nan, compare=False)
    gamma: float = field(init=False, default=math.nan, compare=False)
    uniform_c: float = field(init=False, default=math.nan, compare=False)
    interval_estimated: bool = field(init=False, default=False, compare=False, repr=False)
    constants_estimated: bool = field(init=False, default=False, compare=False, repr=False)

    tag = "abstract"
    experimental = False

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n!r}")
        self._validate()
        interval = self._analytic_interval()
        estimated = interval is None
        if estimated:
            interval = ray_interval(self)
            if interval is None:
                raise DomainError(f"{self.spec}: cylinder direction not in cone")
        object.__setattr__(self, "alpha", float(interval[0]))
        object.__setattr__(self, "beta", float(interval[1]))
        object.__setattr__(self, "interval_estimated", estimated)

        gamma = self._analytic_gamma()
        c = self._analytic_uniform_c()
        object.__setattr__(self, "constants_estimated", gamma is None or c is None)
        if gamma is None:
            gamma = _scan_gamma(self)
        if c is None:
            c, _ = scan_derivative_bound(self)
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "uniform_c", float(c))

    # -- hooks for subclasses -------------------------------------------------
    def _validate(self):
        pass

    def _evaluate(self, lam: np.ndarray) -> float:
        raise NotImplementedError

    def cone_violation(self, lam) -> Optional[str]:
        """Name of the first failed cone inequality, or None inside the cone."""
        raise NotImplementedError

    def _analytic_interval(self):
        return None

    def _analytic_gamma(self):
        return None

    def _analytic_uniform_c(self):
        return None

    def _rho_hat(self, xi: float) -> float:
        return self._evaluate(ray(self.n, xi))

    def _rho_hat_derivative(self, xi: float) -> float:
        return central_difference(self._rho_hat, xi, -self.alpha, self.beta)

    def _rho_hat_inverse(self, y: float) -> float:
        return _bracketed_inverse(self, y)

    def _rho_hat_secant(self, xi: float) -> float:
        # mean of the derivative over [0, xi]; direct quotient when xi is large
        if abs(xi) > 1e-2:
            return (self._rho_hat(xi) - self._rho_hat(0.0)) / xi
        if xi == 0.0:
            return self._rho_hat_derivative(0.0)
        return sum(w * self._rho_hat_derivative(t * xi) for t, w in zip(_GL_NODES, _GL_WEIGHTS))

    @property
    def spec(self) -> str:
        """Family string in the CLI grammar (without the dimension)."""
        raise NotImplementedError

    # -- derived properties ---------------------------------------------------
    @property
    def cylinder_admissible(self) -> bool:
        return self.alpha > 0 and self.beta > 0

    @property
    def bottle_eligible(self) -> bool:
        """Whether the existence theorem's interval conditions can hold."""
        return self.cylinder_admissible and self.beta > 1

    def in_interval(self, xi: float) -> bool:
        return -self.alpha < xi < self.beta

    def __call__(self, lambdas) -> float:
        return eval_rho(self, lambdas)


@dataclass(frozen=True)
class MeanCurvature(CurvatureFunction):
    """``rho = H = lambda_1 + ... + lambda_n`` on the mean-convex cone."""

    tag = "H"

    def _evaluate(self, lam):
        return math.fsum(lam)

    def cone_violation(self, lam):
        return None if math.fsum(lam) > 0 else "sigma_1 > 0"

    def _analytic_interval(self):
        return self.n - 1.0, INF

    def _analytic_gamma(self):
        return INF

    def _analytic_uniform_c(self):
        return 1.0

    def _rho_hat(self, xi):
        return (self.n - 1) + xi

    def _rho_hat_derivative(self, xi):
        return 1.0

    def _rho_hat_inverse(self, y):
        return y - (self.n - 1)

    def _rho_hat_secant(self, xi):
        return 1.0

    @property
    def spec(self):
        return "H"


@dataclass(frozen=True)
class _RayRatio(CurvatureFunction):
    """Shared closed forms for ``(sigma_top / sigma_bottom)^(1/(top-bottom))``."""

    @property
    def _top(self) -> int:
        raise NotImplementedError

    @property
    def _bottom(self) -> int:
        raise NotImplementedError

    def _coeffs(self):
        n, j, i = self.n, self._top, self._bottom
        return (_ray_sigma(n, j, 0.0), _ray_sigma_slope(n, j),
                _ray_sigma(n, i, 0.0), _ray_sigma_slope(n, i))

    def _evaluate(self, lam):
        e = elementary_symmetric(lam)
        m = self._top - self._bottom
        ratio = e[self._top] / e[self._bottom]
        return ratio if m == 1 else ratio ** (1.0 / m)

    def cone_violation(self, lam):
        return _garding_violation(lam, self._top)

    def _analytic_interval(self):
        a, b, _, _ = self._coeffs()
        return a / b, INF

    def _analytic_gamma(self):
        _, b, _, d = self._coeffs()
        if d == 0:
            return INF
        return (b / d) ** (1.0 / (self._top - self._bottom))

    def _analytic_uniform_c(self):
        a, b, c, d = self._coeffs()
        if self._top - self._bottom > 1:
            return INF
        return b * b / (b * c - a * d)

    def _rho_hat(self, xi):
        a, b, c, d = self._coeffs()
        ratio = (a + b * xi) / (c + d * xi)
        m = self._top - self._bottom
        return ratio if m == 1 else ratio ** (1.0 / m)

    def _rho_hat_derivative(self, xi):
        a, b, c, d = self._coeffs()
        m = self._top - self._bottom
        num, den = a + b * xi, c + d * xi
        dratio = (b * c - a * d) / (den * den)
        if m == 1:
            return dratio
        return (num / den) ** (1.0 / m - 1.0) * dratio / m

    def _rho_hat_inverse(self, y):
        a, b, c, d = self._coeffs()
        t = y ** (self._top - self._bottom)
        return (t * c - a) / (b - t * d)

    def _rho_hat_secant(self, xi):
        if self._top - self._bottom > 1:
            return super()._rho_hat_secant(xi)
        a, b, c, d = self._coeffs()
        return (b * c - a * d) / (c * (c + d * xi))


@dataclass(frozen=True)
class SigmaRatioAdjacent(_RayRatio):
    """``rho = sigma_{k+1} / sigma_k`` on the Garding cone of order k+1."""

    k: int = 1
    tag = "sigma-ratio"

    def _validate(self):
        if not 1 <= self.k <= self.n - 1:
            raise ValueError(f"sigma-ratio needs 1 <= k <= n-1, got k={self.k}, n={self.n}")

    @property
    def _top(self):
        return self.k + 1

    @property
    def _bottom(self):
        return self.k

    @property
    def spec(self):
        return f"sigma-ratio:k={self.k}"


@dataclass(frozen=True)
class SigmaRatioGeneral(_RayRatio):
    """``rho = (sigma_j / sigma_i)^(1/(j-i))`` on the Garding cone of order j."""

    i: int = 1
    j: int = 2
    tag = "sigma-ratio-gen"

    def _validate(self):
        if not 0 <= self.i < self.j <= self.n:
            raise ValueError(f"sigma-ratio-gen needs 0 <= i < j <= n, got i={self.i}, j={self.j}")

    @property
    def _top(self):
        return self.j

    @property
    def _bottom(self):
        return self.i

    @property
    def spec(self):
        return f"sigma-ratio-gen:i={self.i},j={self.j}"


@dataclass(frozen=True)
class SigmaRoot(CurvatureFunction):
    """``rho = sigma_k^(1/k)``.

    The cone is ``{sigma_k > 0}`` intersected with the cones where every
    ``sigma_{k-1}`` of the n-1 remaining curvatures is positive, which is
    what makes each partial derivative positive.
    """

    k: int = 2
    tag = "sigma-root"

    def _validate(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"sigma-root needs 1 <= k <= n, got k={self.k}")

    def _evaluate(self, lam):
        s = sigma_k(list(lam), self.k)
        return s if self.k == 1 else s ** (1.0 / self.k)

    def cone_violation(self, lam):
        lam = list(lam)
        if not sigma_k(lam, self.k) > 0:
            return f"sigma_{self.k} > 0"
        if self.k >= 2:
            for idx in range(len(lam)):
                rest = lam[:idx] + lam[idx + 1:]
                if not elementary_symmetric(rest)[self.k - 1] > 0:
                    return f"sigma_{self.k - 1}(lambda without lambda_{idx + 1}) > 0"
        return None

    def _analytic_interval(self):
        n, k = self.n, self.k
        return comb(n - 1, k) / comb(n - 1, k - 1), INF

    def _analytic_gamma(self):
        return INF

    def _analytic_uniform_c(self):
        return 1.0 if self.k == 1 else INF

    def _rho_hat(self, xi):
        s = _ray_sigma(self.n, self.k, xi)
        return s if self.k == 1 else s ** (1.0 / self.k)

    def _rho_hat_derivative(self, xi):
        s = _ray_sigma(self.n, self.k, xi)
        slope = _ray_sigma_slope(self.n, self.k)
        return slope * s ** (1.0 / self.k - 1.0) / self.k

    def _rho_hat_inverse(self, y):
        return (y ** self.k - comb(self.n - 1, self.k)) / comb(self.n - 1, self.k - 1)

    @property
    def spec(self):
        return f"sigma-root:k={self.k}"


@dataclass(frozen=True)
class PNorm(CurvatureFunction):
    """``rho = (sum lambda_i^p)^(1/p)`` on the positive cone.

    The cylinder direction lies on the boundary of this cone, so the family
    is never eligible for bottle construction. Along the ray it is defined
    for ``xi > 0`` only, which is recorded as ``alpha = 0``.
    """

    p: float = 2.0
    tag = "pnorm"

    def _validate(self):
        if not self.p > 1:
            raise ValueError(f"pnorm needs p > 1, got p={self.p}")

    def _evaluate(self, lam):
        lam = np.asarray(lam, dtype=float)
        top = lam.max()
        return float(top * np.sum((lam / top) ** self.p) ** (1.0 / self.p))

    def cone_violation(self, lam):
        for idx, x in enumerate(lam):
            if not x > 0:
                return f"lambda_{idx + 1} > 0"
        return None

    def _analytic_interval(self):
        return 0.0, INF

    def _analytic_gamma(self):
        return INF

    def _analytic_uniform_c(self):
        return 1.0

    def _rho_hat(self, xi):
        return ((self.n - 1) + xi ** self.p) ** (1.0 / self.p)

    def _rho_hat_derivative(self, xi):
        return xi ** (self.p - 1) * self._rho_hat(xi) ** (1 - self.p)

    @property
    def spec(self):
        return f"pnorm:p={self.p:g}"


@dataclass(frozen=True)
class SurfaceExample(CurvatureFunction):
    """``rho = (l1 + l2)^3 / (l1 - l2)^2`` for surfaces (n = 2).

    Parabolic on ``{l1 + l2 > 0} & ({l1 - 5 l2 > 0} | {5 l1 - l2 < 0})``;
    undefined at umbilic points, hence on round spheres.
    """

    tag = "surface-example"

    def _validate(self):
        if self.n != 2:
            raise ValueError("surface-example is defined for n = 2 only")

    def _evaluate(self, lam):
        l1, l2 = lam
        return (l1 + l2) ** 3 / (l1 - l2) ** 2

    def cone_violation(self, lam):
        if len(lam) != 2:
            return "n = 2"
        l1, l2 = lam
        if not l1 + l2 > 0:
            return "lambda_1 + lambda_2 > 0"
        if not (l1 - 5 * l2 > 0 or 5 * l1 - l2 < 0):
            return "lambda_1 - 5 lambda_2 > 0 or 5 lambda_1 - lambda_2 < 0"
        return None

    def _analytic_interval(self):
        return 1.0, 0.2

    def _analytic_gamma(self):
        return 1.2 ** 3 / 0.8 ** 2

    def _analytic_uniform_c(self):
        # derivative is increasing on (-1, 0.2); supremum at the right end
        return 1.2 ** 2 * 4.8 / 0.8 ** 3

    def _rho_hat(self, xi):
        return (1 + xi) ** 3 / (1 - xi) ** 2

    def _rho_hat_derivative(self, xi):
        return (1 + xi) ** 2 * (5 - xi) / (1 - xi) ** 3

    @property
    def spec(self):
        return "surface-example"


@dataclass(frozen=True)
class Composite(CurvatureFunction):
    """Experimental sum ``sigma_k/sigma_{k-1} + sum a_ij (sigma_j/sigma_i)^(1/(j-i))
    + sum b_l sigma_l^(1/l)``.

    ``weights_a`` holds ``((i, j), a_ij)`` pairs and ``weights_b`` holds
    ``(l, b_l)`` pairs. The cone is taken as the Garding cone of order k-1
    intersected with ``{rho > 0}``; ``alpha`` is located numerically.
    """

    k: int = 2
    weights_a: tuple = ()
    weights_b: tuple = ()
    tag = "composite"
    experimental = True

    def _validate(self):
        n, k = self.n, self.k
        if not 2 <= k < n:
            raise ValueError(f"composite needs 2 <= k < n, got k={k}, n={n}")
        for (i, j), a in self.weights_a:
            if not (1 <= i < j < k) or a < 0:
                raise ValueError(f"bad composite term a_{i}{j}={a}")
        for l, b in self.weights_b:
            if not (1 <= l < k) or b < 0:
                raise ValueError(f"bad composite term b_{l}={b}")

    def _evaluate(self, lam):
        e = elementary_symmetric(list(lam))
        total = e[self.k] / e[self.k - 1]
        for (i, j), a in self.weights_a:
            total += a * (e[j] / e[i]) ** (1.0 / (j - i))
        for l, b in self.weights_b:
            total += b * e[l] ** (1.0 / l)
        return total

    def cone_violation(self, lam):
        bad = _garding_violation(list(lam), self.k - 1)
        if bad is not None:
            return bad
        return None if self._evaluate(lam) > 0 else "rho > 0"

    @property
    def spec(self):
        parts = [f"k={self.k}"]
        parts += [f"a{i}-{j}={a:g}" for (i, j), a in self.weights_a]
        parts += [f"b{l}={b:g}" for l, b in self.weights_b]
        return "composite:" + ",".join(parts)


# -- numerical fallbacks ------------------------------------------------------

def ray_interval(f: CurvatureFunction, cap: float = SCAN_CAP):
    """Locate the maximal interval ``(-alpha, beta)`` around 0 on which the ray
    lies in the cone, by geometric scanning plus bisection on membership.

    Returns None when the cylinder direction itself is outside the cone.
    """
    n = f.n

    def inside(xi):
        return f.cone_violation(ray(n, xi)) is None

    if not inside(0.0):
        return None

    def edge(sign):
        t_in, t = 0.0, 1e-8
        while t <= cap:
            if not inside(sign * t):
                break
            t_in, t = t, 2 * t
        else:
            return INF
        t_out = t
        for _ in range(200):
            mid = 0.5 * (t_in + t_out)
            if mid in (t_in, t_out):
                break
            if inside(sign * mid):
                t_in = mid
            else:
                t_out = mid
        return t_in

    return edge(-1.0), edge(1.0)


def _scan_gamma(f: CurvatureFunction) -> float:
    if math.isinf(f.beta):
        far, near = f._rho_hat(SCAN_CAP), f._rho_hat(SCAN_CAP / 10)
        return INF if far > near * (1 + 1e-3) else far
    return f._rho_hat(f.beta - f.beta * 1e-12)


def scan_derivative_bound(f: CurvatureFunction, growth_tol: float = 1e-2):
    """Scan ``d rho_hat / d xi`` over the interval.

    Returns ``(bound, finite)``. The bound is declared infinite when the
    derivative keeps growing along the approach to an endpoint.
    """
    lo, hi = -f.alpha, f.beta
    deriv = f._rho_hat_derivative
    values = []
    unbounded = False

    def approach(points):
        nonlocal unbounded
        d = [deriv(x) for x in points]
        values.extend(d)
        if d[-1] > d[-4] * (1 + growth_tol) and d[-1] > d[-2]:
            unbounded = True

    width = (hi if math.isfinite(hi) else 1.0) - lo
    inner = [lo + width * t for t in np.linspace(0.05, 0.95, 19)] if math.isfinite(lo) else []
    values.extend(deriv(x) for x in inner if lo < x < hi)
    if math.isfinite(lo) and f.alpha > 0:
        approach([lo + f.alpha * 10.0 ** -m for m in range(1, 13)])
    if math.isfinite(hi):
        span = hi - max(lo, 0.0)
        approach([hi - span * 10.0 ** -m for m in range(1, 13)])
    else:
        start = max(lo, 0.0)
        approach([start + 10.0 ** m for m in np.arange(-1.0, math.log10(SCAN_CAP) + 0.25, 0.5)])
    if unbounded:
        return INF, False
    return max(values), True


def _bracketed_inverse(f: CurvatureFunction, y: float) -> float:
    lo, hi = -f.alpha, f.beta
    if lo < 0.0 < hi:
        start = 0.0
    elif math.isfinite(hi):
        start = 0.5 * (lo + hi)
    else:
        start = lo + 1.0
    g = lambda x: f._rho_hat(x) - y
    g0 = g(start)
    if g0 == 0.0:
        return start
    a = b = start
    if g0 > 0:
        for m in range(1, 1100):
            a = lo + (start - lo) * 2.0 ** -m
            if g(a) <= 0:
                break
        else:
            # rho_hat does not decay to 0 at the left end (e.g. alpha = 0)
            raise RangeError(f"y={y!r} below the range of rho_hat", side="low", value=y)
    else:
        for m in range(1, 1100):
            b = hi - (hi - start) * 2.0 ** -m if math.isfinite(hi) else start + 2.0 ** m
            if g(b) >= 0:
                break
        else:
            raise RangeError(f"y={y!r} above the range of rho_hat", side="high", value=y)
    root = brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(root)


# -- public operations -------------------------------------------------------

def cone_contains(f: CurvatureFunction, lambdas) -> bool:
    """True iff ``lambdas`` lies strictly inside the family's open cone."""
    if len(lambdas) != f.n:
        raise ValueError(f"expected {f.n} curvatures, got {len(lambdas)}")
    return f.cone_violation(lambdas) is None


def eval_rho(f: CurvatureFunction, lambdas) -> float:
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (f.n,):
        raise ValueError(f"expected {f.n} curvatures, got shape {lam.shape}")
    bad = f.cone_violation(lam)
    if bad is not None:
        raise ConeError(f"{f.spec}: {lam.tolist()} violates {bad}", lambdas=lam, inequality=bad)
    return f._evaluate(lam)


def _check_xi(f: CurvatureFunction, xi: float):
    if not f.in_interval(xi):
        raise DomainError(f"xi={xi!r} outside ({-f.alpha}, {f.beta})")


def rho_hat(f: CurvatureFunction, xi: float) -> float:
    """``rho(1, ..., 1, xi)`` for ``xi`` in ``(-alpha, beta)``."""
    _check_xi(f, xi)
    return f._rho_hat(xi)


def rho_hat_derivative(f: CurvatureFunction, xi: float) -> float:
    _check_xi(f, xi)
    return f._rho_hat_derivative(xi)


def rho_hat_secant(f: CurvatureFunction, xi: float) -> float:
    """``(rho_hat(xi) - rho_hat(0)) / xi``, continued by the derivative at 0."""
    _check_xi(f, xi)
    return f._rho_hat_secant(xi)


def rho_hat_inverse(f: CurvatureFunction, y: float) -> float:
    """Inverse of ``rho_hat`` on ``(0, gamma)``.

    Raises RangeError with ``side="low"`` for ``y <= 0`` and
    ``side="high"`` for ``y >= gamma``.
    """
    if not y > 0:
        raise RangeError(f"y={y!r} <= 0", side="low", value=y)
    if not y < f.gamma:
        raise RangeError(f"y={y!r} >= gamma={f.gamma!r}", side="high", value=y)
    return f._rho_hat_inverse(y)


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of checking the existence theorem's hypotheses for a family."""

    alpha: float
    beta: float
    rho_hat_vanishes_at_minus_alpha: bool
    limit_estimate: float
    derivative_bound: float
    passes_theorem: bool
    gamma: float = INF
    cylinder_admissible: bool = True
    interval_verified: bool = True
    estimated: bool = False
    failures: tuple = ()


def _limit_at_left_end(f: CurvatureFunction):
    values = [f._rho_hat(-f.alpha + f.alpha * 10.0 ** -m) for m in range(4, 15)]
    decreasing = all(b <= a for a, b in zip(values, values[1:]))
    return values[-1], decreasing


def check_theorem_hypotheses(f: CurvatureFunction, limit_threshold: float = 1e-6) -> HypothesisReport:
    """Check ``alpha > 0``, ``beta > 1``, ``rho_hat -> 0`` at ``-alpha`` and a
    finite bound on the derivative of ``rho_hat``."""
    failures = []
    admissible = f.cylinder_admissible and f.cone_violation(ray(f.n, 0.0)) is None
    if not admissible:
        failures.append("cylinder direction (1,...,1,0) not in cone")

    verified = True
    if admissible and not f.interval_estimated:
        numeric = ray_interval(f)
        verified = numeric is not None and all(
            (math.isinf(x) and math.isinf(y)) or abs(x - y) <= 1e-9 * max(1.0, abs(x))
            for x, y in zip(numeric, (f.alpha, f.beta)))
        if not verified:
            failures.append(f"cone scan disagrees with interval ({-f.alpha}, {f.beta})")

    if not f.alpha > 0:
        failures.append(f"alpha > 0 violated (alpha = {f.alpha:g} <= 0)")
    if not f.beta > 1:
        failures.append(f"beta > 1 violated (beta = {f.beta:g} <= 1)")

    if f.alpha > 0 and math.isfinite(f.alpha):
        limit, decreasing = _limit_at_left_end(f)
        vanishes = decreasing and limit < limit_threshold
    else:
        limit, vanishes = math.nan, False
    if not vanishes:
        failures.append("rho_hat -> 0 as xi -> -alpha violated")

    if f.alpha > 0:
        bound, finite = scan_derivative_bound(f)
    else:
        bound, finite = f.uniform_c, math.isfinite(f.uniform_c)
    if not finite:
        failures.append("uniform bound C on d rho_hat / d xi violated (C = inf)")

    return HypothesisReport(
        alpha=f.alpha,
        beta=f.beta,
        rho_hat_vanishes_at_minus_alpha=vanishes,
        limit_estimate=limit,
        derivative_bound=bound,
        passes_theorem=not failures,
        gamma=f.gamma,
        cylinder_admissible=admissible,
        interval_verified=verified,
        estimated=f.interval_estimated or f.constants_estimated,
        failures=tuple(failures),
    )


# -- family grammar -----------------------------------------------------------

def _parse_params(text: str) -> dict:
    params = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"malformed parameter {item!r}")
        params[key.strip()] = value.strip()
    return params


def parse_family(spec: str, n: int) -> CurvatureFunction:
    """Build a family from its CLI string, e.g. ``"sigma-ratio:k=1"``."""
    name, _, rest = spec.strip().partition(":")
    params = _parse_params(rest)
    try:
        if name in ("H", "mean"):
            family = MeanCurvature(n)
        elif name == "sigma-ratio":
            family = SigmaRatioAdjacent(n, k=int(params.pop("k")))
        elif name == "sigma-ratio-gen":
            family = SigmaRatioGeneral(n, i=int(params.pop("i")), j=int(params.pop("j")))
        elif name == "sigma-root":
            family = SigmaRoot(n, k=int(params.pop("k")))
        elif name == "pnorm":
            family = PNorm(n, p=float(params.pop("p")))
        elif name == "surface-example":
            family = SurfaceExample(n)
        elif name == "composite":
            k = int(params.pop("k"))
            a, b = [], []
            for key in sorted(params):
                if key.startswith("a"):
                    i, j = key[1:].split("-")
                    a.append(((int(i), int(j)), float(params[key])))
                elif key.startswith("b"):
                    b.append((int(key[1:]), float(params[key])))
                else:
                    raise ValueError(f"unknown composite parameter {key!r}")
            params = {}
            family = Composite(n, k=k, weights_a=tuple(a), weights_b=tuple(b))
        else:
            raise ValueError(f"unknown family {name!r}")
    except KeyError as exc:
        raise ValueError(f"family {name!r} missing parameter {exc.args[0]!r}") from None
    if params:
        raise ValueError(f"unexpected parameters for {name!r}: {sorted(params)}")
    return family
