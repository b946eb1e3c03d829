import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FAMILIES, family_id, sample_cone
from selfexpanders import (ConeError, DomainError, MeanCurvature, PNorm, RangeError,
                           SigmaRatioAdjacent, SigmaRatioGeneral, SigmaRoot, SurfaceExample,
                           check_theorem_hypotheses, cone_contains, elementary_symmetric, eval_rho,
                           parse_family, ray, ray_interval, rho_hat, rho_hat_derivative,
                           rho_hat_inverse, rho_hat_secant, sigma_k)
from selfexpanders.symfun import scan_derivative_bound


def brute_sigma(lam, k):
    return sum(math.prod(c) for c in itertools.combinations(lam, k))


# -- sigma_k -------------------------------------------------------------------

@pytest.mark.parametrize("lam,k,expected", [
    ((1, 1, 1), 1, 3.0),
    ((1, 1, 0), 2, 1.0),
    ((2, 3, 4), 2, 26.0),
    ((2, 3, 4), 3, 24.0),
])
def test_sigma_k_examples(lam, k, expected):
    assert sigma_k(lam, k) == expected


@pytest.mark.parametrize("k", [0, 4, -1])
def test_sigma_k_rejects_bad_order(k):
    with pytest.raises(ValueError):
        sigma_k((1.0, 2.0, 3.0), k)


def test_sigma_k_rejects_non_integer():
    with pytest.raises(TypeError):
        sigma_k((1.0, 2.0), 1.5)


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=7))
def test_elementary_symmetric_matches_enumeration(lam):
    e = elementary_symmetric(lam)
    assert e[0] == 1.0
    for k in range(1, len(lam) + 1):
        ref = brute_sigma(lam, k)
        scale = math.prod(1 + abs(x) for x in lam)
        assert abs(e[k] - ref) <= 1e-12 * scale


# -- evaluation and cones ------------------------------------------------------

def test_eval_rho_examples():
    assert eval_rho(MeanCurvature(2), (1, 1)) == 2.0
    assert eval_rho(SigmaRatioAdjacent(3, k=1), (1, 1, 0)) == 0.5


def test_eval_rho_names_failed_inequality():
    with pytest.raises(ConeError) as info:
        eval_rho(MeanCurvature(2), (1.0, -2.0))
    assert "sigma_1 > 0" in str(info.value)
    assert info.value.inequality == "sigma_1 > 0"
    np.testing.assert_array_equal(info.value.lambdas, [1.0, -2.0])


def test_eval_rho_rejects_wrong_length():
    with pytest.raises(ValueError):
        eval_rho(MeanCurvature(3), (1.0, 1.0))


def test_cone_examples():
    assert not cone_contains(MeanCurvature(2), (1, -2))
    assert cone_contains(SurfaceExample(2), (1, 0.1))
    assert not cone_contains(SurfaceExample(2), (1, 1))
    assert not cone_contains(PNorm(3), ray(3, 0.0))
    assert cone_contains(SigmaRatioAdjacent(3, k=1), ray(3, -0.49))
    assert not cone_contains(SigmaRatioAdjacent(3, k=1), ray(3, -0.5))


def test_cone_is_open():
    # boundary points are excluded with zero slack
    assert not cone_contains(MeanCurvature(2), (1.0, -1.0))
    assert not cone_contains(SurfaceExample(2), (1.0, 0.2))


@pytest.mark.parametrize("f", FAMILIES, ids=family_id)
def test_doubling(f):
    rng = np.random.default_rng(1)
    for lam in sample_cone(f, rng, 20):
        assert eval_rho(f, 2 * lam) == pytest.approx(2 * eval_rho(f, lam), rel=1e-13)


# -- rho_hat -------------------------------------------------------------------

def test_rho_hat_examples():
    assert rho_hat(MeanCurvature(2), 0.5) == 1.5
    sr = SigmaRatioAdjacent(3, k=1)
    assert rho_hat(sr, 0.0) == 0.5
    assert rho_hat(sr, -0.5 + 1e-12) == pytest.approx(0.0, abs=1e-11)
    xs = -0.5 + np.logspace(-2, -12, 11)
    vals = [rho_hat(sr, x) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_rho_hat_out_of_interval():
    with pytest.raises(DomainError):
        rho_hat(SigmaRatioAdjacent(3, k=1), -0.5)
    with pytest.raises(DomainError):
        rho_hat(SurfaceExample(2), 0.2)


def test_rho_hat_inverse_examples():
    h = MeanCurvature(2)
    assert rho_hat_inverse(h, 1.0) == 0.0
    assert rho_hat_inverse(h, 1.5) == 0.5


def test_rho_hat_inverse_sides():
    sr = SigmaRatioAdjacent(3, k=1)
    with pytest.raises(RangeError) as low:
        rho_hat_inverse(sr, 0.0)
    assert low.value.side == "low"
    with pytest.raises(RangeError) as high:
        rho_hat_inverse(sr, sr.gamma)
    assert high.value.side == "high"
    assert sr.gamma == 2.0


def test_rho_hat_derivative_examples():
    for n in (2, 3, 7):
        for xi in (-0.9, 0.0, 3.0, 1e5):
            assert rho_hat_derivative(MeanCurvature(n), xi) == 1.0
    assert rho_hat_derivative(SigmaRatioAdjacent(3, k=1), 0.0) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("f", FAMILIES, ids=family_id)
def test_derivative_matches_difference_quotient(f):
    lo, hi = -f.alpha, min(f.beta, 4.0)
    for t in np.linspace(0.1, 0.9, 9):
        xi = lo + t * (hi - lo)
        h = 1e-5 * max(1.0, abs(xi))
        fd = (f._rho_hat(xi + h) - f._rho_hat(xi - h)) / (2 * h)
        assert rho_hat_derivative(f, xi) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("f", FAMILIES, ids=family_id)
def test_rho_hat_is_eval_on_the_ray(f):
    lo, hi = -f.alpha, min(f.beta, 4.0)
    for t in np.linspace(0.05, 0.95, 7):
        xi = lo + t * (hi - lo)
        assert rho_hat(f, xi) == pytest.approx(eval_rho(f, ray(f.n, xi)), rel=1e-13)


@pytest.mark.parametrize("f", FAMILIES, ids=family_id)
def test_secant_is_mean_slope(f):
    lo, hi = -f.alpha, min(f.beta, 4.0)
    for t in np.linspace(0.05, 0.95, 7):
        xi = lo + t * (hi - lo)
        if f.alpha == 0 or xi == 0:
            continue
        direct = (f._rho_hat(xi) - f._rho_hat(0.0)) / xi
        assert rho_hat_secant(f, xi) == pytest.approx(direct, rel=1e-9)
    if f.alpha > 0:
        for xi in (1e-3, -1e-3, 1e-9):
            direct = (f._rho_hat(xi) - f._rho_hat(0.0)) / xi
            assert rho_hat_secant(f, xi) == pytest.approx(direct, rel=1e-5)


# -- properties ----------------------------------------------------------------

def test_homogeneity_1000_samples():
    rng = np.random.default_rng(2024)
    count = 0
    for idx in range(1000):
        f = FAMILIES[idx % len(FAMILIES)]
        lam = sample_cone(f, rng, 1)[0]
        c = rng.uniform(0.1, 10.0)
        base = eval_rho(f, lam)
        assert abs(eval_rho(f, c * lam) - c * base) <= 1e-12 * c * base
        count += 1
    assert count == 1000


def test_parabolicity_200_samples():
    rng = np.random.default_rng(7)
    for idx in range(200):
        f = FAMILIES[idx % len(FAMILIES)]
        lam = sample_cone(f, rng, 1, fd_step=1e-6)[0]
        h = 1e-6 * max(1.0, float(np.max(np.abs(lam))))
        for i in range(f.n):
            e = np.zeros(f.n)
            e[i] = h
            d = (eval_rho(f, lam + e) - eval_rho(f, lam - e)) / (2 * h)
            assert d > 0, (family_id(f), lam, i, d)


@pytest.mark.parametrize("f", [SigmaRatioAdjacent(5, k=k) for k in (1, 2, 3)]
                         + [SigmaRatioGeneral(5, i=i, j=j) for i, j in ((0, 3), (1, 4), (2, 5))],
                         ids=family_id)
def test_newton_maclaurin_on_positive_cone(f):
    rng = np.random.default_rng(3)
    for _ in range(50):
        lam = rng.uniform(0.01, 5.0, f.n)
        h = 1e-6 * max(1.0, lam.max())
        for i in range(f.n):
            e = np.zeros(f.n)
            e[i] = h
            assert eval_rho(f, lam + e) > eval_rho(f, lam - e)


@pytest.mark.parametrize("f", FAMILIES, ids=family_id)
def test_round_trip(f):
    lo = -f.alpha
    hi = min(f.beta, 50.0)
    xs = lo + (hi - lo) * np.linspace(0.01, 0.99, 41)
    for xi in xs:
        if not f.in_interval(xi):
            continue
        y = rho_hat(f, xi)
        if not 0 < y < f.gamma:
            continue
        assert abs(rho_hat_inverse(f, y) - xi) <= 1e-10 * max(1.0, abs(xi))
    top = f.gamma if math.isfinite(f.gamma) else 100.0
    bottom = f._rho_hat(lo + 1e-6 * (hi - lo))
    for y in bottom + (top - bottom) * np.linspace(0.01, 0.99, 41):
        assert abs(rho_hat(f, rho_hat_inverse(f, y)) - y) <= 1e-10 * max(1.0, y)


def test_permutation_symmetry():
    rng = np.random.default_rng(11)
    for f in FAMILIES:
        for lam in sample_cone(f, rng, 30):
            base = eval_rho(f, lam)
            for _ in range(3):
                assert abs(eval_rho(f, rng.permutation(lam)) - base) <= 1e-14 * abs(base)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
def test_homogeneity_property(f, seed, c):
    lam = sample_cone(f, np.random.default_rng(seed), 1)[0]
    base = eval_rho(f, lam)
    assert abs(eval_rho(f, c * lam) - c * base) <= 1e-12 * c * base


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([f for f in FAMILIES if f.alpha > 0]), st.floats(0.001, 0.999))
def test_rho_hat_increasing_property(f, t):
    hi = min(f.beta, 20.0)
    xi = -f.alpha + t * (hi + f.alpha)
    step = 1e-3 * (hi + f.alpha)
    if f.in_interval(xi + step):
        assert rho_hat(f, xi + step) > rho_hat(f, xi)
    assert rho_hat_derivative(f, xi) > 0


# -- numerical scans against closed forms --------------------------------------

@pytest.mark.parametrize("f", [f for f in FAMILIES if not f.interval_estimated], ids=family_id)
def test_ray_interval_matches_closed_form(f):
    found = ray_interval(f)
    if f.alpha == 0:
        assert found is None
        return
    lo, hi = found
    assert lo == pytest.approx(f.alpha, rel=1e-9)
    assert (math.isinf(hi) and math.isinf(f.beta)) or hi == pytest.approx(f.beta, rel=1e-9)


@pytest.mark.parametrize("f", [MeanCurvature(3), SigmaRatioAdjacent(3, k=1), SigmaRatioAdjacent(6, k=3),
                               SigmaRatioGeneral(5, i=2, j=3), SurfaceExample(2)], ids=family_id)
def test_scanned_bound_matches_closed_form(f):
    bound, finite = scan_derivative_bound(f)
    assert finite
    assert bound == pytest.approx(f.uniform_c, rel=1e-3)


@pytest.mark.parametrize("f", [SigmaRoot(3, k=2), SigmaRatioGeneral(4, i=1, j=3)], ids=family_id)
def test_scanned_bound_unbounded(f):
    _, finite = scan_derivative_bound(f)
    assert not finite
    assert math.isinf(f.uniform_c)


def test_composite_is_experimental_and_estimated():
    f = parse_family("composite:k=3,a1-2=0.5,b1=0.2", 4)
    assert f.experimental and f.interval_estimated
    assert 0 < f.alpha
    assert cone_contains(f, ray(4, -f.alpha * 0.999))
    assert not cone_contains(f, ray(4, -f.alpha * 1.001))


# -- hypothesis checker ----------------------------------------------------------

def test_hypotheses_mean_curvature():
    rep = check_theorem_hypotheses(MeanCurvature(2))
    assert rep.alpha == 1 and math.isinf(rep.beta) and rep.passes_theorem
    assert rep.rho_hat_vanishes_at_minus_alpha


def test_hypotheses_sigma_ratio():
    rep = check_theorem_hypotheses(SigmaRatioAdjacent(3, k=1))
    assert rep.alpha == 0.5 and math.isinf(rep.beta) and rep.passes_theorem
    assert rep.gamma == 2.0


def test_hypotheses_surface_example():
    rep = check_theorem_hypotheses(SurfaceExample(2))
    assert rep.beta == pytest.approx(0.2)
    assert not rep.passes_theorem
    assert any("beta > 1" in msg for msg in rep.failures)


def test_hypotheses_pnorm():
    rep = check_theorem_hypotheses(PNorm(3, p=2.0))
    assert not rep.passes_theorem and not rep.cylinder_admissible
    assert any("not in cone" in msg for msg in rep.failures)


def test_hypotheses_unbounded_derivative():
    rep = check_theorem_hypotheses(SigmaRoot(3, k=2))
    assert not rep.passes_theorem
    assert any("uniform bound C" in msg for msg in rep.failures)


# -- grammar ----------------------------------------------------------------------

@pytest.mark.parametrize("text,n,cls", [
    ("H", 2, MeanCurvature),
    ("sigma-ratio:k=1", 3, SigmaRatioAdjacent),
    ("sigma-ratio-gen:i=1,j=3", 4, SigmaRatioGeneral),
    ("sigma-root:k=2", 3, SigmaRoot),
    ("pnorm:p=2", 3, PNorm),
    ("surface-example", 2, SurfaceExample),
])
def test_parse_family(text, n, cls):
    f = parse_family(text, n)
    assert isinstance(f, cls) and f.n == n
    assert parse_family(f.spec, n) == f


@pytest.mark.parametrize("text,n", [("bogus", 2), ("sigma-ratio", 3), ("sigma-ratio:k=5", 3),
                                    ("H:x=1", 2), ("surface-example", 3), ("H", 1), ("pnorm:p=1", 3)])
def test_parse_family_errors(text, n):
    with pytest.raises(ValueError):
        parse_family(text, n)


def test_families_are_hashable_and_immutable():
    f = MeanCurvature(3)
    assert {f: 1}[MeanCurvature(3)] == 1
    with pytest.raises(Exception):
        f.n = 4
