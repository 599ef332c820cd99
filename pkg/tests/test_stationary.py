import math
from fractions import Fraction

import numpy as np
import pytest

from oracles import fd1, fd2

from qaccess.measure import Rank1Povm
from qaccess.qstate import DensityPair
from qaccess.stationary import (
    BoundaryDistribution,
    PureStateDomain,
    QuadraticTriple,
    StationaryParams,
    build_P,
    canonicalize,
    count_roots_of_f,
    eval_f,
    eval_f_derivatives,
    extract_params,
    random_params,
    sample_curve,
    stationarity_residual,
)


WITNESS = StationaryParams(
    alpha1=0.5, alpha2=0.5, xi1=2.0, eta1=5.0, xi2=0.0, eta2=1.0
)
EQUAL_Q = StationaryParams(
    alpha1=0.3, alpha2=0.7, xi1=1.0, eta1=3.0, xi2=1.0, eta2=3.0
)


def make_params(a1, xi1, eta1, xi2, eta2):
    return StationaryParams(
        alpha1=a1, alpha2=1.0 - a1, xi1=xi1, eta1=eta1, xi2=xi2, eta2=eta2
    )


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------


def test_params_reject_nonpositive_curvature():
    with pytest.raises(ValueError, match=r"0 <= xi\^2 < eta"):
        make_params(0.5, 2.0, 4.0, 0.0, 1.0)  # xi^2 == eta


def test_params_reject_bad_weights():
    with pytest.raises(ValueError):
        StationaryParams(
            alpha1=0.0, alpha2=1.0, xi1=0.0, eta1=1.0, xi2=0.0, eta2=1.0
        )
    with pytest.raises(ValueError):
        StationaryParams(
            alpha1=0.6, alpha2=0.6, xi1=0.0, eta1=1.0, xi2=0.0, eta2=1.0
        )


def test_curvature_shift_property():
    p = make_params(0.4, 1.5, 4.0, 0.5, 2.0)
    assert p.X == pytest.approx(4.0 - 1.5 ** 2, abs=0)


# ---------------------------------------------------------------------------
# the quadratic triple and the inflection polynomial
# ---------------------------------------------------------------------------


def test_quadratics_from_params_expand_by_hand():
    trip = QuadraticTriple.from_params(WITNESS)
    assert trip.q1.coeffs == (Fraction(5), Fraction(4), Fraction(1))
    assert trip.q2.coeffs == (Fraction(1), Fraction(0), Fraction(1))
    assert trip.qs.coeffs == (Fraction(3), Fraction(2), Fraction(1))
    # L = Q1' Q2 - Q2' Q1 = -4 t^2 - 8 t + 4 for these parameters
    assert trip.L.coeffs == (Fraction(4), Fraction(-8), Fraction(-4))


def test_explicit_quintic_factorization():
    p = build_P(WITNESS)
    assert p.is_exact
    assert tuple(p.as_fractions()) == (-448, -960, -1024, -768, -320, -64)


def test_inflection_polynomial_at_origin_by_hand():
    # L(0) = 4, L'(0) = -8, (Q1 Q2 Qs)(0) = 15, (Q1 Q2 Qs)'(0) = 22:
    # 3 (-8)(15) - 22 (4) = -448
    p = build_P(WITNESS)
    assert p(Fraction(0)) == -448


def test_identical_quadratics_give_zero_polynomial():
    assert build_P(EQUAL_Q).is_zero


# ---------------------------------------------------------------------------
# f and its derivatives
# ---------------------------------------------------------------------------


def test_f_vanishes_for_identical_quadratics():
    for t in (-3.0, 0.0, 1.7, 40.0):
        assert eval_f(EQUAL_Q, t) == 0.0
        fp, fpp = eval_f_derivatives(EQUAL_Q, t)
        assert fp == 0.0 and fpp == 0.0


def test_second_derivative_sign_at_origin():
    # alpha1 alpha2 L(0) P(0) / (Q1 Q2 Qs)^2(0) = (1/4)(4)(-448)/225
    _, fpp = eval_f_derivatives(WITNESS, 0.0)
    assert fpp == pytest.approx(-448.0 / 225.0, rel=1e-12)
    assert fpp < 0


def test_derivatives_match_centered_differences():
    h = 1e-5
    rng = np.random.default_rng(99)
    pts = 0
    seed = 0
    while pts < 1000:
        p = random_params(seed)
        seed += 1
        fn = lambda t: eval_f(p, t)
        for t in rng.uniform(-5.0, 5.0, size=4):
            fp, fpp = eval_f_derivatives(p, float(t))
            assert abs(fp - fd1(fn, float(t), h)) <= 1e-6 * (1.0 + abs(fp))
            assert abs(fpp - fd2(fn, float(t), h)) <= 1e-4 * (1.0 + abs(fpp))
            pts += 1


def test_f_decays_at_large_arguments():
    for seed in range(100):
        p = random_params(seed)
        ts = np.linspace(-10.0, 10.0, 201)
        scale = max(1.0, max(abs(eval_f(p, float(t))) for t in ts))
        assert abs(eval_f(p, 1e6)) <= 1e-9 * scale
        assert abs(eval_f(p, -1e6)) <= 1e-9 * scale


# ---------------------------------------------------------------------------
# stationarity residuals
# ---------------------------------------------------------------------------


def _mixed_pair():
    rho1 = 0.5 * np.array([[0.7, 0.2], [0.2, 0.3]])
    rho2 = 0.5 * np.array([[0.4, -0.1], [-0.1, 0.6]])
    return DensityPair(rho1=rho1, rho2=rho2)


def test_residual_antisymmetry_is_exact():
    states = _mixed_pair()
    s2 = 1.0 / math.sqrt(2.0)
    povm = Rank1Povm(
        kets=(
            np.array([s2, 0.0]),
            np.array([0.0, s2]),
            np.array([0.5, 0.5]),
            np.array([0.5, -0.5]),
        )
    )
    for k in range(4):
        for l in range(4):
            if k == l:
                continue
            a = stationarity_residual(states, povm, k, l)
            b = stationarity_residual(states, povm, l, k)
            assert a == -b  # bitwise, not approximately


def test_residual_zero_for_identical_states():
    rho = 0.5 * np.array([[0.6, 0.15], [0.15, 0.4]])
    states = DensityPair(rho1=rho, rho2=rho)
    s2 = 1.0 / math.sqrt(2.0)
    povm = Rank1Povm(kets=(np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    assert abs(stationarity_residual(states, povm, 0, 1)) <= 1e-12
    povm3 = Rank1Povm(
        kets=(
            np.array([s2, 0.0]),
            np.array([0.0, s2]),
            np.array([0.5, 0.5]),
            np.array([0.5, -0.5]),
        )
    )
    for k in range(4):
        for l in range(k + 1, 4):
            assert abs(stationarity_residual(states, povm3, k, l)) <= 1e-12


def test_residual_zero_for_statistically_equivalent_outcomes():
    states = _mixed_pair()
    s2 = 1.0 / math.sqrt(2.0)
    povm = Rank1Povm(
        kets=(
            np.array([s2, 0.0]),
            np.array([s2, 0.0]),
            np.array([0.0, 1.0]),
        )
    )
    assert stationarity_residual(states, povm, 0, 1) == 0.0


def test_residual_requires_interior_distribution():
    rho = 0.5 * np.array([[1.0, 0.0], [0.0, 0.0]])
    states = DensityPair(rho1=rho, rho2=rho)
    povm = Rank1Povm(kets=(np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    with pytest.raises(BoundaryDistribution):
        stationarity_residual(states, povm, 0, 1)


# ---------------------------------------------------------------------------
# frame extraction
# ---------------------------------------------------------------------------


def test_extract_isotropic_pair():
    states = DensityPair(rho1=0.25 * np.eye(2), rho2=0.25 * np.eye(2))
    p = extract_params(
        states, np.array([1.0, 0.0]), np.array([0.0, 1.0])
    )
    assert p.alpha1 == pytest.approx(0.5, abs=1e-15)
    assert p.xi1 == 0.0 and p.xi2 == 0.0
    assert p.eta1 == pytest.approx(1.0, abs=1e-15)
    assert p.eta2 == pytest.approx(1.0, abs=1e-15)


def test_extract_diagonal_states():
    states = DensityPair(
        rho1=0.5 * np.diag([0.8, 0.2]), rho2=0.5 * np.diag([0.3, 0.7])
    )
    p = extract_params(
        states, np.array([1.0, 0.0]), np.array([0.0, 1.0])
    )
    assert p.xi1 == 0.0 and p.xi2 == 0.0
    assert p.eta1 == pytest.approx(0.2 / 0.8, rel=1e-14)
    assert p.eta2 == pytest.approx(0.7 / 0.3, rel=1e-14)


def test_extract_refuses_pure_state():
    states = DensityPair(
        rho1=0.5 * np.array([[0.5, 0.5], [0.5, 0.5]]),
        rho2=0.25 * np.eye(2),
    )
    with pytest.raises(PureStateDomain):
        extract_params(states, np.array([1.0, 0.0]), np.array([0.0, 1.0]))


def test_extract_satisfies_domain_constraints_on_random_draws():
    from qaccess.optimizer import random_density_pair

    rng = np.random.default_rng(314)
    for i in range(10000):
        states = random_density_pair(int(i), reject_near_pure=True)
        chi = float(rng.uniform(0.0, np.pi))
        k1 = np.array([math.cos(chi), math.sin(chi)])
        k0 = np.array([-math.sin(chi), math.cos(chi)])
        p = extract_params(states, k1, k0)
        assert 0.0 < p.alpha1 < 1.0
        assert p.xi1 ** 2 < p.eta1
        assert p.xi2 ** 2 < p.eta2


# ---------------------------------------------------------------------------
# canonical frame
# ---------------------------------------------------------------------------


def test_canonicalize_fixes_second_state():
    p = make_params(0.35, 1.2, 3.0, 0.8, 2.5)
    c = canonicalize(p)
    assert c.xi2 == 0.0
    assert c.eta2 == pytest.approx(1.0, abs=1e-15)
    assert c.alpha1 == p.alpha1


def test_canonicalize_identity_on_canonical_input():
    c = canonicalize(WITNESS)
    assert c == WITNESS


def test_canonicalize_matches_quadratic_substitution():
    # Q1(sigma t + tau)/sigma^2 must equal t^2 + 2 xi1' t + eta1'
    p = make_params(0.5, 3.0, 17.0, 3.0, 13.0)
    c = canonicalize(p)
    sigma = math.sqrt(13.0 - 9.0)
    tau = -3.0
    xi_sub = (tau + p.xi1) / sigma
    eta_sub = (tau * tau + 2.0 * p.xi1 * tau + p.eta1) / (sigma * sigma)
    assert c.xi1 == pytest.approx(xi_sub, abs=1e-14)
    assert c.eta1 == pytest.approx(eta_sub, abs=1e-14)
    assert c.xi1 == 0.0
    assert c.eta1 == pytest.approx(2.0, abs=1e-14)


def test_root_count_invariant_under_canonical_frame():
    for seed in range(100):
        p = random_params(seed)
        a = count_roots_of_f(p)
        b = count_roots_of_f(canonicalize(p))
        assert a.count == b.count, seed


# ---------------------------------------------------------------------------
# root counting of f
# ---------------------------------------------------------------------------


def test_identical_quadratics_flagged_not_counted():
    res = count_roots_of_f(EQUAL_Q)
    assert res.identically_zero
    assert res.count == 0
    assert res.roots == ()


def test_explicit_point_has_single_root_at_minus_one():
    res = count_roots_of_f(WITNESS)
    assert res.count == 1
    assert abs(res.roots[0] + 1.0) <= 1e-8
    # t = -1 is an exact zero: both quadratics equal 2 there
    assert eval_f(WITNESS, -1.0) == 0.0


def test_at_most_two_roots_on_seeded_draws():
    for seed in range(500):
        res = count_roots_of_f(random_params(seed))
        assert res.count <= 2, seed


def test_reported_roots_are_roots_and_scan_finds_no_extras():
    for seed in range(30):
        p = random_params(seed)
        res = count_roots_of_f(p)
        rad = res.bracket
        ts = np.linspace(-rad, rad, 20001)
        vals = np.array([eval_f(p, float(t)) for t in ts])
        scale = max(1e-300, float(np.max(np.abs(vals))))
        for r in res.roots:
            assert abs(eval_f(p, r)) <= 1e-8 * scale
        signs = np.sign(vals[np.abs(vals) > 1e-13 * scale])
        crossings = int(np.sum(signs[1:] != signs[:-1]))
        assert crossings <= res.count, seed


def test_sampled_curve_is_consistent_with_pointwise_eval():
    ts, f, fp, fpp = sample_curve(WITNESS, -2.0, 2.0, 41)
    assert len(ts) == 41
    i = 20
    assert ts[i] == 0.0
    assert f[i] == eval_f(WITNESS, 0.0)
    dfp, dfpp = eval_f_derivatives(WITNESS, 0.0)
    assert fp[i] == dfp and fpp[i] == dfpp
