"""The rotationally symmetric self-expander ODE for a profile graph ``r(h)``.

With ``Q = -(r rdot + h) / (r - rdot h)`` and ``y = (1 - rdot Q) rho_hat(0)``
the expander equation with the cylinder constant becomes

    rddot = -(1 + rdot^2) / r * rho_hat^{-1}(y).

Integration uses the state ``(r, log rdot)``. Solutions with ``rdot0 > 0``
stay strictly increasing, and away from the neck ``rdot`` decays like a
Gaussian in ``h``; in the log variable that decay is a smooth polynomial
instead of a stiff linear mode, and positivity of ``rdot`` is structural.
"""

from __future__ import annotations

import bisect
import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _dopri
from .exceptions import (DomainExit, InvalidConfiguration, InvariantViolation,
                         RangeError, SingularityError)
from .geometry import ExpanderParams, expander_residual, mu_cylinder
from .symfun import CurvatureFunction, check_theorem_hypotheses


@dataclass(frozen=True)
class ProfileState:
    """One point ``(h, r, rdot)`` of a profile curve."""

    h: float
    r: float
    rdot: float

    @property
    def q(self) -> float:
        return q_value(self)


@dataclass(frozen=True)
class InitialConditions:
    h0: float
    r0: float
    rdot0: float


@dataclass(frozen=True)
class SolveOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    span: float = 1e4
    tail_eps: float = 1e-8
    max_steps: int = 100_000
    # a tail is certified once rdot drops below this (and below tail_eps)
    rdot_floor: float = 1e-200


class TerminationKind(str, enum.Enum):
    REACHED_SPAN = "ReachedSpan"
    TAIL_CERTIFIED = "TailCertified"
    DOMAIN_EXIT = "DomainExit"
    STEP_UNDERFLOW = "StepUnderflow"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    h: float
    side: Optional[str] = None
    y: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.kind in (TerminationKind.REACHED_SPAN, TerminationKind.TAIL_CERTIFIED)

    def __str__(self):
        if self.kind is TerminationKind.DOMAIN_EXIT:
            return f"DomainExit({self.side})"
        return self.kind.value

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "h": self.h, "side": self.side, "y": self.y}


def validate_initial_conditions(ic: InitialConditions) -> list[str]:
    """Return the violated inequalities; an empty list means the conditions hold."""
    violations = []
    if not ic.h0 < 0:
        violations.append("h0 < 0 violated")
    if not ic.r0 > -ic.h0:
        violations.append("r0 > -h0 violated")
    if not ic.rdot0 > 0:
        violations.append("rdot0 > 0 violated")
    if not (ic.r0 > 0 and ic.rdot0 < -ic.h0 / ic.r0):
        violations.append("rdot0 < -h0/r0 violated")
    return violations


def q_value(s: ProfileState) -> float:
    """``Q = -(r rdot + h) / (r - rdot h)``; its sign is the sign of ``rddot``."""
    denom = s.r - s.rdot * s.h
    if denom == 0:
        raise SingularityError(f"r - rdot*h vanishes at h={s.h!r}")
    return -(s.r * s.rdot + s.h) / denom


@dataclass(frozen=True)
class _Context:
    f: CurvatureFunction
    rho0: float
    rho1: float
    gamma: float


@functools.lru_cache(maxsize=64)
def _context(f: CurvatureFunction) -> _Context:
    rho1 = f._rho_hat(1.0) if f.in_interval(1.0) else math.inf
    return _Context(f, f._rho_hat(0.0), rho1, f.gamma)


def _curvature_terms(ctx: _Context, h: float, r: float, rdot: float):
    """Return ``(rddot / rdot, Q, y)`` with domain guards.

    ``rddot / rdot`` is formed without cancellation: with ``m`` the secant
    slope of ``rho_hat`` between 0 and ``xi = rho_hat^{-1}(y)`` the ODE
    reads ``rddot = (1 + rdot^2) rho_hat(0) rdot Q / (r m)``.
    """
    if not r > 0:
        raise DomainExit("low", h, 0.0)
    denom = r - rdot * h
    if not denom > 0:
        raise DomainExit("singular", h, math.nan)
    q = -(r * rdot + h) / denom
    y = ctx.rho0 * (1.0 - rdot * q)
    f = ctx.f
    if not y > 0:
        raise DomainExit("low", h, y)
    if not y < ctx.gamma:
        raise DomainExit("high", h, y)
    try:
        xi = f._rho_hat_inverse(y)
    except (RangeError, ValueError):
        raise DomainExit("high" if y > ctx.rho0 else "low", h, y) from None
    if not f.in_interval(xi):
        raise DomainExit("high" if xi > 0 else "low", h, y)
    slope = f._rho_hat_secant(xi)
    ratio = (1.0 + rdot * rdot) * ctx.rho0 * q / (r * slope)
    return ratio, q, y


def rhs(f: CurvatureFunction, s: ProfileState) -> float:
    """Second derivative ``rddot`` prescribed by the ODE at ``s``.

    Raises DomainExit when ``y`` leaves ``(0, gamma)`` (side ``"low"`` or
    ``"high"``) or when ``r - rdot h <= 0`` (side ``"singular"``).
    """
    ratio, _, _ = _curvature_terms(_context(f), s.h, s.r, s.rdot)
    return ratio * s.rdot


@dataclass
class _Segment:
    """One accepted step, kept for dense output."""

    h: float
    dt: float
    state: np.ndarray
    K: np.ndarray

    @property
    def lo(self):
        return min(self.h, self.h + self.dt)

    @property
    def hi(self):
        return max(self.h, self.h + self.dt)

    def evaluate(self, h):
        return _dopri.dense(self.state, self.dt, self.K, (h - self.h) / self.dt)


@dataclass
class _Branch:
    samples: list
    segments: list
    errors: list
    accepted: int
    rejected: int
    guard_hits: int
    termination: Termination


def _error_norm(err, y_old, y_new, opts):
    scale = opts.atol + opts.rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _integrate_branch(ctx, h0, state0, direction, opts, stops=()):
    def fun(h, Y):
        rdot = math.exp(Y[1])
        ratio, _, _ = _curvature_terms(ctx, h, Y[0], rdot)
        return np.array([rdot, ratio])

    t, Y = h0, np.asarray(state0, dtype=float)
    samples, segments, errors = [(t, Y)], [], []
    accepted = rejected = guard_hits = 0
    try:
        F = fun(t, Y)
    except DomainExit as exc:
        term = Termination(TerminationKind.DOMAIN_EXIT, t, exc.side, exc.y)
        return _Branch(samples, segments, errors, 0, 0, 1, term)

    t_end = direction * opts.span
    dt = direction * 1e-2
    err_prev = 1e-4
    log_floor = math.log(opts.rdot_floor)
    alpha, beta = 0.7 / _dopri.ORDER, 0.4 / _dopri.ORDER
    while True:
        if accepted + rejected >= opts.max_steps:
            term = Termination(TerminationKind.STEP_LIMIT, t)
            break
        nominal, target = dt, t_end
        for stop in stops:
            if (stop - t) * direction > 0 and abs(stop - t) < abs(target - t):
                target = stop
        clipped = abs(dt) >= abs(target - t)
        if clipped:
            dt = target - t
        try:
            Y_new, F_new, err, K = _dopri.step(fun, t, Y, F, dt)
        except DomainExit as exc:
            guard_hits += 1
            if abs(dt) <= 1e-10 * max(1.0, abs(t)):
                term = Termination(TerminationKind.DOMAIN_EXIT, t, exc.side, exc.y)
                break
            dt = 0.5 * dt
            continue
        en = _error_norm(err, Y, Y_new, opts)
        if en <= 1.0 and Y_new[1] < log_floor - 2.0 and Y[1] >= log_floor - 1.0:
            # land just below the floor instead of jumping into underflow
            rejected += 1
            dt *= max(0.05, 0.9 * (log_floor - 1.0 - Y[1]) / (Y_new[1] - Y[1]))
            continue
        if en <= 1.0:
            segments.append(_Segment(t, dt, Y, K))
            errors.append(en)
            t = target if clipped else t + dt
            Y, F = Y_new, F_new
            samples.append((t, Y))
            accepted += 1
            if t == t_end:
                term = Termination(TerminationKind.REACHED_SPAN, t)
                break
            rdot = math.exp(Y[1])
            if (rdot < opts.rdot_floor and rdot < opts.tail_eps
                    and abs(rdot * F[1] * t * t) < opts.tail_eps):
                term = Termination(TerminationKind.TAIL_CERTIFIED, t)
                break
            factor = 5.0 if en == 0 else 0.9 * en ** -alpha * err_prev ** beta
            err_prev = max(en, 1e-4)
            dt = (nominal if clipped else dt) * min(5.0, max(0.2, factor))
        else:
            rejected += 1
            dt *= max(0.2, 0.9 * en ** (-1.0 / _dopri.ORDER))
            if abs(dt) < 1e-13 * max(1.0, abs(t)):
                term = Termination(TerminationKind.STEP_UNDERFLOW, t)
                break
    return _Branch(samples, segments, errors, accepted, rejected, guard_hits, term)


@dataclass
class Trajectory:
    """Profile samples in increasing ``h`` with per-point diagnostics.

    ``rddot`` is the ODE right-hand side at each sample, ``q`` the quotient
    Q, ``domain_quantity`` the argument ``y`` of ``rho_hat^{-1}`` and
    ``residual`` the self-expander residual ``-1/rho - mu <F, nu>``.
    """

    family: CurvatureFunction
    ic: Optional[InitialConditions]
    options: SolveOptions
    mu: ExpanderParams
    h: np.ndarray
    r: np.ndarray
    rdot: np.ndarray
    rddot: np.ndarray
    q: np.ndarray
    domain_quantity: np.ndarray
    residual: np.ndarray
    terminations: tuple = ()
    accepted_steps: int = 0
    rejected_steps: int = 0
    guard_hits: int = 0
    error_estimates: np.ndarray = field(default_factory=lambda: np.empty(0))
    segments: list = field(default_factory=list, repr=False)

    def __len__(self):
        return self.h.size

    @property
    def h_lo(self) -> float:
        return float(self.h[0])

    @property
    def h_hi(self) -> float:
        return float(self.h[-1])

    def state_at(self, h: float) -> ProfileState:
        """Dense-output state at ``h``.

        Beyond a certified tail the profile is extended by its end value:
        there ``rdot`` is monotone toward the end, so the extension error is
        at most ``rdot_end * |h - h_end|``.
        """
        if self.h_lo <= h <= self.h_hi:
            if not self.segments:
                r = float(np.interp(h, self.h, self.r))
                return ProfileState(h, r, float(np.interp(h, self.h, self.rdot)))
            los = [s.lo for s in self.segments]
            idx = max(0, bisect.bisect_right(los, h) - 1)
            r, w = self.segments[idx].evaluate(h)
            return ProfileState(h, float(r), math.exp(w))
        left, right = self.terminations or (None, None)
        end = 0 if h < self.h_lo else -1
        term = left if end == 0 else right
        if term is not None and term.kind is TerminationKind.TAIL_CERTIFIED:
            return ProfileState(h, float(self.r[end]), float(self.rdot[end]))
        raise ValueError(f"h={h!r} outside [{self.h_lo}, {self.h_hi}] and no certified tail")

    def r_at(self, h: float) -> float:
        return self.state_at(h).r


@dataclass
class SolveReport:
    """Summary of one bottle solve."""

    family: str
    n: int
    ic: InitialConditions
    h_star: float
    r_at_star: float
    r_min_est: float
    r_max_est: float
    lower_bound_c: float
    upper_bound_K: float
    invariant_verdicts: list
    termination: Termination
    branch_terminations: tuple
    inflection_error: Optional[str] = None

    @property
    def all_pass(self) -> bool:
        return self.termination.ok and all(v.passed for v in self.invariant_verdicts)


def _diagnostics(f, mu, ctx, h, r, rdot):
    try:
        ratio, q, y = _curvature_terms(ctx, h, r, rdot)
    except DomainExit:
        return math.nan, math.nan, math.nan, math.nan
    rddot = ratio * rdot
    try:
        res = expander_residual(f, h, r, rdot, rddot, mu)
    except ValueError:
        res = math.nan
    return rddot, q, y, res


def _assemble(f, ic, opts, backward, forward) -> Trajectory:
    ctx = _context(f)
    mu = mu_cylinder(f)
    points = [(t, Y) for t, Y in reversed(backward.samples[1:])] + forward.samples
    h = np.array([p[0] for p in points])
    r = np.array([p[1][0] for p in points])
    rdot = np.exp([p[1][1] for p in points])
    diag = np.array([_diagnostics(f, mu, ctx, *args) for args in zip(h, r, rdot)])
    segments = sorted(backward.segments + forward.segments, key=lambda s: s.lo)
    return Trajectory(
        family=f, ic=ic, options=opts, mu=mu,
        h=h, r=r, rdot=rdot,
        rddot=diag[:, 0], q=diag[:, 1], domain_quantity=diag[:, 2], residual=diag[:, 3],
        terminations=(backward.termination, forward.termination),
        accepted_steps=backward.accepted + forward.accepted,
        rejected_steps=backward.rejected + forward.rejected,
        guard_hits=backward.guard_hits + forward.guard_hits,
        error_estimates=np.array(backward.errors[::-1] + forward.errors),
        segments=segments,
    )


def _insert_sample(t: Trajectory, h_new: float):
    """Add the dense-output state at ``h_new`` to the sample arrays."""
    if np.any(t.h == h_new):
        return
    s = t.state_at(h_new)
    rddot, q, y, res = _diagnostics(t.family, t.mu, _context(t.family), h_new, s.r, s.rdot)
    idx = int(np.searchsorted(t.h, h_new))
    for name, value in (("h", h_new), ("r", s.r), ("rdot", s.rdot), ("rddot", rddot),
                        ("q", q), ("domain_quantity", y), ("residual", res)):
        setattr(t, name, np.insert(getattr(t, name), idx, value))


def _q_of(h, r, rdot):
    return -(r * rdot + h) / (r - rdot * h)


def _segment_roots(seg: _Segment, tol=1e-12):
    """Sign changes of Q inside one step, refined by bisection on dense output."""
    xs = np.linspace(0.0, 1.0, 9)
    hs = [seg.h + x * seg.dt for x in xs]
    qs = []
    for h in hs:
        r, w = seg.evaluate(h)
        qs.append(_q_of(h, r, math.exp(w)))
    roots = []
    for (ha, qa), (hb, qb) in zip(zip(hs, qs), zip(hs[1:], qs[1:])):
        if qa == 0:
            roots.append(ha)
            continue
        if qa * qb >= 0:
            continue
        for _ in range(200):
            hm = 0.5 * (ha + hb)
            r, w = seg.evaluate(hm)
            qm = _q_of(hm, r, math.exp(w))
            if abs(qm) <= tol or hm in (ha, hb):
                break
            if (qm > 0) == (qa > 0):
                ha, qa = hm, qm
            else:
                hb = hm
        roots.append(hm)
    return roots


def inflection_candidates(t: Trajectory) -> list[float]:
    """All refined zeros of Q along the trajectory, in increasing order."""
    if t.segments:
        roots = set()
        for seg in t.segments:
            roots.update(_segment_roots(seg))
        # a zero shared by adjacent steps is reported by both
        merged = []
        for x in sorted(roots):
            if merged and abs(x - merged[-1]) <= 1e-12 * max(1.0, abs(x)):
                continue
            merged.append(x)
        return merged
    q = t.q
    roots = []
    for i in range(len(q) - 1):
        if q[i] == 0:
            roots.append(float(t.h[i]))
        elif q[i] * q[i + 1] < 0:
            roots.append(float(t.h[i] - q[i] * (t.h[i + 1] - t.h[i]) / (q[i + 1] - q[i])))
    if len(q) and q[-1] == 0:
        roots.append(float(t.h[-1]))
    return roots


def detect_inflection(t: Trajectory) -> float:
    """The unique zero ``h*`` of Q, required to lie in ``(h0, 0)``.

    Raises InvariantViolation when Q vanishes at or before ``h0``, at or
    after 0, or more than once.
    """
    h0 = t.ic.h0 if t.ic is not None else -math.inf
    if not (t.h_lo <= h0 and t.h_hi >= 0):
        raise InvariantViolation(f"trajectory [{t.h_lo}, {t.h_hi}] does not span (h0, 0)")
    roots = inflection_candidates(t)
    early = [x for x in roots if x <= h0]
    if early:
        raise InvariantViolation(f"inflection at h={early[0]!r} <= h0")
    late = [x for x in roots if x >= 0]
    if late:
        raise InvariantViolation(f"inflection at h={late[0]!r} >= 0")
    if len(roots) != 1:
        raise InvariantViolation(f"expected one inflection in (h0, 0), found {len(roots)}: {roots}")
    return roots[0]


def integrate(f: CurvatureFunction, ic: InitialConditions, opts: Optional[SolveOptions] = None,
              *, validate: bool = True):
    """Integrate the profile ODE from ``ic`` in both directions.

    Returns ``(Trajectory, SolveReport)``. With ``validate`` the initial
    conditions and the family hypotheses are checked first and
    InvalidConfiguration lists every violation.
    """
    from .invariants import lower_bound_constant, run_all_checks

    opts = opts or SolveOptions()
    if validate:
        problems = validate_initial_conditions(ic)
        if not f.bottle_eligible:
            problems.append(f"{f.spec} is not eligible for bottle construction")
        report = check_theorem_hypotheses(f)
        problems += [f"hypothesis failed: {msg}" for msg in report.failures]
        if problems:
            raise InvalidConfiguration(problems)
    if not ic.rdot0 > 0 or not ic.r0 > 0:
        raise InvalidConfiguration(["rdot0 > 0 and r0 > 0 are required to integrate"])

    ctx = _context(f)
    state0 = np.array([ic.r0, math.log(ic.rdot0)])
    forward = _integrate_branch(ctx, ic.h0, state0, 1.0, opts, stops=(0.0,))
    backward = _integrate_branch(ctx, ic.h0, state0, -1.0, opts)
    traj = _assemble(f, ic, opts, backward, forward)

    h_star, failure = math.nan, None
    try:
        h_star = detect_inflection(traj)
        _insert_sample(traj, h_star)
    except InvariantViolation as exc:
        failure = str(exc)

    kinds = (backward.termination, forward.termination)
    abnormal = [k for k in kinds if not k.ok]
    if abnormal:
        overall = abnormal[0]
    elif all(k.kind is TerminationKind.REACHED_SPAN for k in kinds):
        overall = kinds[1]
    else:
        overall = next(k for k in kinds if k.kind is TerminationKind.TAIL_CERTIFIED)

    verdicts = run_all_checks(f, traj, traj.mu, h_star=h_star)
    report = SolveReport(
        family=f.spec, n=f.n, ic=ic,
        h_star=h_star,
        r_at_star=traj.r_at(h_star) if math.isfinite(h_star) else math.nan,
        r_min_est=float(traj.r[0]), r_max_est=float(traj.r[-1]),
        lower_bound_c=lower_bound_constant(f, ic),
        upper_bound_K=float(np.max(traj.r)),
        invariant_verdicts=verdicts,
        termination=overall,
        branch_terminations=kinds,
        inflection_error=failure,
    )
    return traj, report
