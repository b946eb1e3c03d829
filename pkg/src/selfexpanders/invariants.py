"""Pointwise verification of a computed bottle profile.

Each check returns a CheckVerdict whose ``worst_margin`` is a signed
distance to violation (positive is safe), so margins can be tracked across
runs as regression metrics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import ExpanderParams, expander_residual
from .profile_ode import (InitialConditions, ProfileState, SolveReport, Trajectory,
                          _context, inflection_candidates, q_value)
from .symfun import CurvatureFunction

RESIDUAL_BOUND = 1e-8
DISTINCT_RADII_MARGIN = 1e-6
SIGN_BAND = 1e-8


class CheckId(str, enum.Enum):
    MONOTONE = "Monotone"
    SIGN_LAW = "SignLaw"
    IDENTITY_Q = "IdentityQ"
    PRE_INFLECTION_CONVEX = "PreInflectionConvex"
    LOWER_BOUND_C = "LowerBoundC"
    UPPER_BOUND_K = "UpperBoundK"
    DOMAIN_LOW = "DomainLow"
    DOMAIN_HIGH = "DomainHigh"
    UNIQUE_INFLECTION = "UniqueInflection"
    TAIL_DECAY_LEFT = "TailDecayLeft"
    TAIL_DECAY_RIGHT = "TailDecayRight"
    RESIDUAL_BOUND = "ResidualBound"
    DISTINCT_RADII = "DistinctRadii"


@dataclass(frozen=True)
class CheckVerdict:
    check_id: CheckId
    passed: bool
    worst_margin: float
    worst_location_h: float
    note: str = ""

    def to_dict(self) -> dict:
        return {"check_id": self.check_id.value, "pass": self.passed,
                "worst_margin": self.worst_margin, "worst_location_h": self.worst_location_h,
                "note": self.note}


def lower_bound_constant(f: CurvatureFunction, ic: InitialConditions) -> float:
    """A priori lower bound for ``r`` on ``(-inf, h0]``:
    ``exp(-C (pi/2 + C1) / (rho_hat(0) Q(h0)))`` with
    ``C1 = arctan(rdot0) - rho_hat(0) Q(h0) / C * ln r0``.
    """
    c = f.uniform_c
    if not math.isfinite(c):
        return 0.0
    rho0 = f._rho_hat(0.0)
    q0 = q_value(ProfileState(ic.h0, ic.r0, ic.rdot0))
    c1 = math.atan(ic.rdot0) - rho0 * q0 / c * math.log(ic.r0)
    return math.exp(-c * (math.pi / 2 + c1) / (rho0 * q0))


def _worst(values: np.ndarray, h: np.ndarray):
    """Minimum of ``values`` (NaN counts as violation) and where it occurs."""
    if values.size == 0:
        return math.inf, math.nan
    bad = np.isnan(values)
    if bad.any():
        i = int(np.argmax(bad))
        return -math.inf, float(h[i])
    i = int(np.argmin(values))
    return float(values[i]), float(h[i])


def _verdict(check_id, margin, where, strict=True, note=""):
    passed = margin > 0 if strict else margin >= 0
    return CheckVerdict(check_id, bool(passed), margin, where, note)


def _check_monotone(t):
    margin, where = _worst(t.rdot, t.h)
    return _verdict(CheckId.MONOTONE, margin, where)


def _check_sign_law(t, rho0, slope0):
    q, rdd = t.q, t.rddot
    eps = 1e-12 * (1 + np.abs(q)) * (1 + np.abs(rdd))
    product = q * rdd + eps
    # |Q| <= band  <=>  |rddot| <= band * scale, with scale the linearisation at Q = 0
    scale = (1 + t.rdot ** 2) * rho0 * t.rdot / (t.r * slope0)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, np.abs(rdd) / scale, np.where(rdd == 0, 0.0, np.inf))
    in_q = np.abs(q) <= SIGN_BAND
    in_r = rel <= SIGN_BAND
    band = np.full(q.shape, np.inf)
    band[in_q] = np.minimum(band[in_q], 2 * SIGN_BAND - rel[in_q])
    band[in_r] = np.minimum(band[in_r], 2 * SIGN_BAND - np.abs(q[in_r]))
    band[np.isnan(q) | np.isnan(rdd)] = np.nan
    m1, w1 = _worst(product, t.h)
    m2, w2 = _worst(band, t.h)
    margin, where = (m1, w1) if m1 <= m2 else (m2, w2)
    return CheckVerdict(CheckId.SIGN_LAW, bool(m1 >= 0 and m2 > 0), margin, where)


def _check_identity(t):
    lhs = 1 - t.rdot * t.q
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = t.r * (1 + t.rdot ** 2) / (t.r - t.rdot * t.h)
    tol = 1e-13 * (1 + np.abs(t.domain_quantity))
    margin, where = _worst(tol - np.abs(lhs - rhs), t.h)
    return _verdict(CheckId.IDENTITY_Q, margin, where, strict=False)


def _check_pre_inflection(t, h0):
    mask = t.h <= h0
    h, rdd, q = t.h[mask], t.rddot[mask], t.q[mask]
    if h.size < 2:
        return CheckVerdict(CheckId.PRE_INFLECTION_CONVEX, False, -math.inf, h0, "no samples")
    m1, w1 = _worst(rdd, h)
    m2, w2 = _worst(-(np.diff(q)), h[1:])
    passed = m1 > 0 and m2 >= 0
    margin, where = (m1, w1) if m1 <= m2 else (m2, w2)
    return CheckVerdict(CheckId.PRE_INFLECTION_CONVEX, bool(passed), margin, where)


def _check_lower_bound(t, f, ic):
    c = lower_bound_constant(f, ic)
    mask = t.h <= ic.h0
    margin, where = _worst(t.r[mask] - c, t.h[mask])
    note = f"c={c!r}" + (" (C estimated)" if f.constants_estimated else "")
    return _verdict(CheckId.LOWER_BOUND_C, margin, where, note=note)


def _check_upper_bound(t):
    eps = t.options.tail_eps
    i = int(np.argmax(t.r))
    margin = float(t.r[-1] + eps - t.r[i])
    growth = float(t.rdot[-1] * abs(t.h[-1]))
    passed = margin > 0 and growth <= eps
    return CheckVerdict(CheckId.UPPER_BOUND_K, bool(passed), min(margin, eps - growth),
                        float(t.h[i]), f"K={float(t.r[i])!r}")


def _check_domain_low(t):
    margin, where = _worst(t.domain_quantity, t.h)
    return _verdict(CheckId.DOMAIN_LOW, margin, where)


def _check_domain_high(t, ctx, h_star):
    y = t.domain_quantity
    left = t.h <= h_star if math.isfinite(h_star) else t.q >= 0
    right = ~left | (t.h == h_star)
    # at h* itself y equals rho_hat(0) up to the refinement tolerance on Q
    ml, wl = _worst(ctx.rho0 * (1 + 1e-12) - y[left], t.h[left])
    mr, wr = _worst(ctx.rho1 - y[right], t.h[right])
    mg, wg = _worst(ctx.gamma - y, t.h)
    margin, where = min((ml, wl), (mr, wr), (mg, wg))
    return _verdict(CheckId.DOMAIN_HIGH, margin, where)


def _check_unique_inflection(t, h0):
    roots = inflection_candidates(t)
    inside = [x for x in roots if h0 < x < 0]
    if len(roots) == 1 and len(inside) == 1:
        x = inside[0]
        return _verdict(CheckId.UNIQUE_INFLECTION, min(x - h0, -x), x)
    where = roots[0] if roots else math.nan
    return CheckVerdict(CheckId.UNIQUE_INFLECTION, False, -float(abs(len(roots) - 1) or 1),
                        where, f"{len(roots)} zeros of Q: {roots[:5]}")


def _check_tail(t, side):
    check_id = CheckId.TAIL_DECAY_LEFT if side == "left" else CheckId.TAIL_DECAY_RIGHT
    eps = t.options.tail_eps
    end = t.h_lo if side == "left" else t.h_hi
    if (side == "left" and end >= 0) or (side == "right" and end <= 0):
        return CheckVerdict(check_id, False, -math.inf, end, "trajectory does not reach this side")
    mask = np.abs(t.h) >= abs(end) / 10
    mask &= (t.h < 0) if side == "left" else (t.h > 0)
    h = t.h[mask]
    order = np.argsort(np.abs(h))
    h = h[order]
    slope = np.abs(t.rdot[mask][order] * h)
    bend = np.abs(t.rddot[mask][order] * h * h)
    margins = [
        _worst(-np.diff(slope), h[1:]),
        _worst(-np.diff(bend), h[1:]),
        (eps - float(slope[-1]), float(h[-1])),
        (eps - float(bend[-1]), float(h[-1])),
    ]
    monotone = margins[0][0] >= 0 and margins[1][0] >= 0
    small = margins[2][0] > 0 and margins[3][0] > 0
    margin, where = min(margins)
    return CheckVerdict(check_id, bool(monotone and small), margin, where,
                        f"decade [{abs(end) / 10:g}, {abs(end):g}], {h.size} samples")


def _check_residual(t, f, p):
    res = np.empty(len(t))
    for i in range(len(t)):
        try:
            res[i] = expander_residual(f, t.h[i], t.r[i], t.rdot[i], t.rddot[i], p)
        except ValueError:
            res[i] = np.nan
    margin, where = _worst(RESIDUAL_BOUND - np.abs(res), t.h)
    return _verdict(CheckId.RESIDUAL_BOUND, margin, where, strict=False,
                    note=f"max |residual| = {RESIDUAL_BOUND - margin!r}")


def _check_distinct(t):
    margin = float(t.r[-1] - t.r[0] - DISTINCT_RADII_MARGIN)
    return _verdict(CheckId.DISTINCT_RADII, margin, t.h_hi)


def run_all_checks(f: CurvatureFunction, t: Trajectory, p: ExpanderParams,
                   h_star: Optional[float] = None) -> list[CheckVerdict]:
    """Run the thirteen profile checks and return one verdict per check."""
    if t.family != f:
        raise ValueError(f"trajectory belongs to {t.family.spec} (n={t.family.n}), "
                         f"not {f.spec} (n={f.n})")
    if t.ic is None:
        raise ValueError("trajectory carries no initial conditions")
    ctx = _context(f)
    if h_star is None:
        roots = [x for x in inflection_candidates(t) if t.ic.h0 < x < 0]
        h_star = roots[0] if len(roots) == 1 else math.nan
    slope0 = f._rho_hat_derivative(0.0)
    return [
        _check_monotone(t),
        _check_sign_law(t, ctx.rho0, slope0),
        _check_identity(t),
        _check_pre_inflection(t, t.ic.h0),
        _check_lower_bound(t, f, t.ic),
        _check_upper_bound(t),
        _check_domain_low(t),
        _check_domain_high(t, ctx, h_star),
        _check_unique_inflection(t, t.ic.h0),
        _check_tail(t, "left"),
        _check_tail(t, "right"),
        _check_residual(t, f, p),
        _check_distinct(t),
    ]


def compare_reports(a: SolveReport, b: SolveReport, tol: float) -> dict:
    """Absolute differences of ``h_star``, ``r_min_est`` and ``r_max_est``."""
    if a.family != b.family or a.n != b.n:
        raise ValueError(f"cannot compare {a.family} (n={a.n}) with {b.family} (n={b.n})")
    diffs = {
        "h_star": abs(a.h_star - b.h_star),
        "r_min": abs(a.r_min_est - b.r_min_est),
        "r_max": abs(a.r_max_est - b.r_max_est),
    }
    return {**diffs, "tol": tol, "within_tol": all(d <= tol for d in diffs.values())}
