import sys

import numpy as np
import pytest

from selfexpanders import (Composite, InitialConditions, MeanCurvature, PNorm, SigmaRatioAdjacent,
                           SigmaRatioGeneral, SigmaRoot, SurfaceExample, cone_contains, integrate, ray)

GOLDEN_IC = InitialConditions(-1.0, 1.5, 0.3)

# frozen from tests/oracle.py (step-halved RK4, Richardson-extrapolated at dt = 2^-8);
# tests/test_profile_ode.py re-derives them live
GOLDEN = {
    "H": {
        "n": 2,
        "h_star": -0.5205111692597685,
        "r": {-100.0: 1.134859419923334, -10.0: 1.134859419923334, 0.0: 1.8104564240381142,
              10.0: 2.460902834671907, 100.0: 2.460921878061991},
    },
    "sigma-ratio:k=1": {
        "n": 3,
        "h_star": -0.51204446135054,
        "r": {-100.0: 1.0299024615658532, -10.0: 1.0299024615658596, 0.0: 1.8069406638172179,
              10.0: 2.623159742734776, 100.0: 2.6239840590240315},
    },
}
CHECK_HEIGHTS = (-100.0, -10.0, 0.0, 10.0, 100.0)

FAMILIES = [
    MeanCurvature(2), MeanCurvature(3), MeanCurvature(5),
    SigmaRatioAdjacent(3, k=1), SigmaRatioAdjacent(4, k=2), SigmaRatioAdjacent(5, k=1),
    SigmaRatioGeneral(4, i=1, j=3), SigmaRatioGeneral(5, i=0, j=2),
    SigmaRoot(3, k=2), SigmaRoot(4, k=3), SigmaRoot(3, k=1),
    PNorm(3, p=2.0), PNorm(2, p=3.5),
    SurfaceExample(2),
    Composite(4, k=3, weights_a=(((1, 2), 0.5),), weights_b=((1, 0.2),)),
]


def family_id(f):
    return f"{f.spec}/n={f.n}"


def sample_cone(f, rng, count, fd_step=None):
    """Random points strictly inside the cone of ``f``.

    Half the draws perturb a permuted ray point, half come from a box; with
    ``fd_step`` the points also keep a finite-difference stencil inside.
    """
    lo = -f.alpha if np.isfinite(f.alpha) else -5.0
    hi = min(f.beta, 5.0)
    out = []
    while len(out) < count:
        if rng.random() < 0.5:
            xi = lo + (hi - lo) * rng.uniform(0.05, 0.95)
            lam = ray(f.n, xi) + 0.05 * rng.standard_normal(f.n)
            lam = rng.permutation(lam) * rng.uniform(0.2, 5.0)
        else:
            lam = rng.uniform(-1.0, 3.0, f.n)
        if not cone_contains(f, lam):
            continue
        if fd_step is not None:
            h = fd_step * max(1.0, float(np.max(np.abs(lam))))
            eye = np.eye(f.n) * h
            if not all(cone_contains(f, lam + e) and cone_contains(f, lam - e) for e in eye):
                continue
        out.append(lam)
    return out


@pytest.fixture(scope="session")
def golden_runs():
    from selfexpanders import parse_family

    runs = {}
    for spec, data in GOLDEN.items():
        f = parse_family(spec, data["n"])
        runs[spec] = (f, *integrate(f, GOLDEN_IC))
    return runs


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
