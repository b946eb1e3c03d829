"""Independent reference solver for the golden bottle runs.

Classical fixed-step RK4 on the plain state (r, rdot), with rho_hat and
its inverse written out by hand for the mean curvature and sigma_2/sigma_1
cases. Step sizes are powers of two so every check height is a grid node;
the step is halved until three successive refinements agree, and the last
pair is Richardson-extrapolated.
"""

import math
from dataclasses import dataclass


def mean_curvature_ray(n):
    rho0 = n - 1.0
    return rho0, (lambda y: y - (n - 1.0))


def sigma_ratio_ray(n, k):
    a, b = math.comb(n - 1, k + 1), math.comb(n - 1, k)
    c, d = math.comb(n - 1, k), math.comb(n - 1, k - 1)
    # rho_hat(xi) = (a + b xi) / (c + d xi)
    return a / c, (lambda y: (y * c - a) / (b - y * d))


def _accel(h, r, p, rho0, inverse):
    q = -(r * p + h) / (r - p * h)
    return -(1 + p * p) / r * inverse((1 - p * q) * rho0)


def _rk4(h, r, p, dt, rho0, inverse):
    k1r, k1p = p, _accel(h, r, p, rho0, inverse)
    k2r, k2p = p + 0.5 * dt * k1p, _accel(h + 0.5 * dt, r + 0.5 * dt * k1r, p + 0.5 * dt * k1p, rho0, inverse)
    k3r, k3p = p + 0.5 * dt * k2p, _accel(h + 0.5 * dt, r + 0.5 * dt * k2r, p + 0.5 * dt * k2p, rho0, inverse)
    k4r, k4p = p + dt * k3p, _accel(h + dt, r + dt * k3r, p + dt * k3p, rho0, inverse)
    return (r + dt / 6 * (k1r + 2 * k2r + 2 * k3r + k4r),
            p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p))


def _q(h, r, p):
    return -(r * p + h) / (r - p * h)


def _run(ray, h0, r0, p0, dt, checks):
    rho0, inverse = ray
    out = {}
    h_star = math.nan
    lo, hi = min(checks), max(checks)
    for direction in (1.0, -1.0):
        h, r, p = h0, r0, p0
        nsteps = round(((hi if direction > 0 else lo) - h0) * direction / dt)
        for i in range(nsteps):
            if h in checks:
                out[h] = r
            r_new, p_new = _rk4(h, r, p, direction * dt, rho0, inverse)
            h_new = h0 + direction * (i + 1) * dt
            if direction > 0 and _q(h, r, p) > 0 >= _q(h_new, r_new, p_new):
                a, b = 0.0, dt
                for _ in range(80):
                    s = 0.5 * (a + b)
                    rs, ps = _rk4(h, r, p, s, rho0, inverse)
                    if _q(h + s, rs, ps) > 0:
                        a = s
                    else:
                        b = s
                h_star = h + 0.5 * (a + b)
            h, r, p = h_new, r_new, p_new
        out[h] = r
    return h_star, out


@dataclass
class OracleResult:
    h_star: float
    r: dict
    dt: float
    spread: float


def oracle(ray, h0, r0, p0, checks=(-100.0, -10.0, 0.0, 10.0, 100.0), tol=1e-8,
           start=6, max_level=12):
    """Step-halved RK4 solution: ``h_star`` and ``r`` at the check heights."""
    history = []
    for level in range(start, max_level + 1):
        dt = 2.0 ** -level
        h_star, r = _run(ray, h0, r0, p0, dt, set(checks))
        vec = [h_star] + [r[c] for c in checks]
        history.append(vec)
        if len(history) >= 3:
            a, b, c = history[-3:]
            spread = max(max(abs(x - y), abs(y - z)) for x, y, z in zip(a, b, c))
            if spread <= tol:
                extrap = [(16 * z - y) / 15 for y, z in zip(b, c)]
                return OracleResult(extrap[0], dict(zip(checks, extrap[1:])), dt, spread)
    raise RuntimeError("RK4 oracle did not converge")
