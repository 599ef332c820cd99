import math

import numpy as np
import pytest

from oracles import binary_entropy_bits, mi_bits_of_table, vn_sweep_max_bits

from qaccess.measure import (
    JointDistribution,
    Povm,
    Rank1Povm,
    accessible_information_report,
    is_von_neumann,
    joint_distribution,
    mutual_information,
    parse_povm,
)
from qaccess.qstate import DensityPair


BASIS = Rank1Povm(kets=(np.array([1.0, 0.0]), np.array([0.0, 1.0])))


def trine_povm():
    w = math.sqrt(2.0 / 3.0)
    return Rank1Povm(
        kets=tuple(
            w * np.array([math.cos(j * math.pi / 3.0), math.sin(j * math.pi / 3.0)])
            for j in range(3)
        )
    )


def classical_pair():
    return DensityPair(rho1=0.5 * np.diag([1.0, 0.0]), rho2=0.5 * np.diag([0.0, 1.0]))


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def test_povm_requires_completeness():
    with pytest.raises(ValueError, match="identity"):
        Povm(outcomes=(0.5 * np.eye(2),))


def test_povm_requires_psd_outcomes():
    bad = np.array([[0.5, 0.8], [0.8, 0.5]])
    good = np.eye(2) - bad
    with pytest.raises(ValueError):
        Povm(outcomes=(bad, good))


def test_trine_is_complete():
    p = trine_povm()
    assert p.n == 3
    total = sum(np.outer(k, k) for k in p.kets)
    assert np.allclose(total, np.eye(2), atol=1e-15)
    p.as_povm()  # revalidates as a general POVM


# ---------------------------------------------------------------------------
# joint distribution
# ---------------------------------------------------------------------------


def test_orthogonal_supports_give_diagonal_table():
    jd = joint_distribution(classical_pair(), BASIS)
    assert np.allclose(jd.p, [[0.5, 0.0], [0.0, 0.5]], atol=0)
    assert np.allclose(jd.row_marginals, [0.5, 0.5], atol=0)
    assert np.allclose(jd.column_marginals, [0.5, 0.5], atol=0)


def test_single_outcome_povm_recovers_priors():
    states = DensityPair(
        rho1=0.3 * np.array([[0.6, 0.1], [0.1, 0.4]]),
        rho2=0.7 * np.array([[0.5, -0.2], [-0.2, 0.5]]),
    )
    jd = joint_distribution(states, Povm(outcomes=(np.eye(2),)))
    assert jd.p[0, 0] == pytest.approx(0.3, abs=1e-15)
    assert jd.p[1, 0] == pytest.approx(0.7, abs=1e-15)


def test_isotropic_states_give_flat_table():
    states = DensityPair(rho1=0.25 * np.eye(2), rho2=0.25 * np.eye(2))
    th = 0.37
    kets = (
        np.array([math.cos(th), math.sin(th)]),
        np.array([-math.sin(th), math.cos(th)]),
    )
    jd = joint_distribution(states, Rank1Povm(kets=kets))
    assert np.allclose(jd.p, 0.25 * np.ones((2, 2)), atol=1e-15)


def test_from_table_rejects_genuinely_negative_entries():
    with pytest.raises(ValueError):
        JointDistribution.from_table(np.array([[0.6, -1e-6], [0.2, 0.2]]))


def test_from_table_clamps_roundoff_negatives():
    jd = JointDistribution.from_table(np.array([[0.5, -1e-15], [0.25, 0.25]]))
    assert jd.p[0, 1] == 0.0


# ---------------------------------------------------------------------------
# mutual information
# ---------------------------------------------------------------------------


def test_perfect_correlation_is_one_bit():
    jd = joint_distribution(classical_pair(), BASIS)
    assert mutual_information(jd) == 1.0


def test_product_table_carries_no_information():
    jd = JointDistribution.from_table(0.25 * np.ones((2, 2)))
    assert mutual_information(jd) == 0.0


def test_matches_direct_formula_on_random_tables():
    rng = np.random.default_rng(8)
    for _ in range(50):
        t = rng.uniform(0.0, 1.0, size=(2, 3))
        t /= t.sum()
        jd = JointDistribution.from_table(t)
        assert mutual_information(jd) == pytest.approx(
            max(mi_bits_of_table(t), 0.0), abs=1e-14
        )


def test_best_orthogonal_measurement_of_mixed_aligned_pair():
    # |0> versus |+> at equal priors; value frozen from a fine sweep
    from qaccess.optimizer import optimize_von_neumann

    states = DensityPair(
        rho1=0.5 * np.diag([1.0, 0.0]),
        rho2=0.5 * np.array([[0.5, 0.5], [0.5, 0.5]]),
    )
    _, bits = optimize_von_neumann(states)
    assert bits == pytest.approx(0.39912396330714, abs=1e-13)
    sweep = vn_sweep_max_bits(states.rho1, states.rho2, 1_000_000)
    assert bits >= sweep - 1e-12
    assert bits <= sweep + 1e-9


def test_information_bounded_by_prior_entropy():
    from qaccess.optimizer import random_density_pair

    for seed in range(50):
        states = random_density_pair(seed)
        jd = joint_distribution(states, BASIS)
        h = binary_entropy_bits(float(np.trace(states.rho1)))
        assert mutual_information(jd) <= h + 1e-9


def test_unitary_covariance_under_shared_rotation():
    states = DensityPair(
        rho1=0.4 * np.array([[0.7, 0.1], [0.1, 0.3]]),
        rho2=0.6 * np.array([[0.45, -0.15], [-0.15, 0.55]]),
    )
    base = mutual_information(joint_distribution(states, trine_povm()))
    rng = np.random.default_rng(17)
    for _ in range(100):
        chi = rng.uniform(0.0, 2.0 * np.pi)
        r = np.array(
            [[math.cos(chi), -math.sin(chi)], [math.sin(chi), math.cos(chi)]]
        )
        rot_states = DensityPair(
            rho1=r @ states.rho1 @ r.T, rho2=r @ states.rho2 @ r.T
        )
        rot_povm = Rank1Povm(kets=tuple(r @ k for k in trine_povm().kets))
        val = mutual_information(joint_distribution(rot_states, rot_povm))
        assert abs(val - base) <= 1e-12


def test_splitting_an_outcome_changes_nothing():
    states = DensityPair(
        rho1=0.4 * np.array([[0.7, 0.1], [0.1, 0.3]]),
        rho2=0.6 * np.array([[0.45, -0.15], [-0.15, 0.55]]),
    )
    base = mutual_information(joint_distribution(states, BASIS))
    for lam in (0.5, 0.25, 0.9):
        k0, k1 = BASIS.kets
        split = Rank1Povm(
            kets=(math.sqrt(lam) * k0, math.sqrt(1.0 - lam) * k0, k1)
        )
        val = mutual_information(joint_distribution(states, split))
        assert abs(val - base) <= 1e-12


# ---------------------------------------------------------------------------
# effective von Neumann detection
# ---------------------------------------------------------------------------


def test_basis_projectors_are_von_neumann():
    assert is_von_neumann(BASIS.as_povm())


def test_trine_is_not_von_neumann():
    assert not is_von_neumann(trine_povm().as_povm())


def test_zero_outcome_is_discarded():
    p = Povm(
        outcomes=(
            np.diag([1.0, 0.0]),
            np.diag([0.0, 1.0]),
            np.zeros((2, 2)),
        )
    )
    assert is_von_neumann(p)


def test_proportional_outcomes_are_merged():
    p = Povm(
        outcomes=(
            (2.0 / 3.0) * np.diag([1.0, 0.0]),
            (1.0 / 3.0) * np.diag([1.0, 0.0]),
            np.diag([0.0, 1.0]),
        )
    )
    assert is_von_neumann(p)


def test_unequal_mixtures_are_not_von_neumann():
    assert not is_von_neumann(Povm(outcomes=(0.5 * np.eye(2), 0.5 * np.eye(2))))


# ---------------------------------------------------------------------------
# the delegating report
# ---------------------------------------------------------------------------


def test_report_for_perfectly_distinguishable_pair():
    rep = accessible_information_report(classical_pair())
    assert rep.best_vn[1] == pytest.approx(1.0, abs=1e-12)
    assert rep.best_trine[1] == pytest.approx(1.0, abs=1e-12)
    assert abs(rep.gap_bits) <= 1e-9


def test_report_for_identical_states():
    rho = 0.5 * np.array([[0.6, 0.15], [0.15, 0.4]])
    rep = accessible_information_report(DensityPair(rho1=rho, rho2=rho))
    assert rep.best_vn[1] == pytest.approx(0.0, abs=1e-12)
    assert rep.best_trine[1] == pytest.approx(0.0, abs=1e-12)


def test_report_for_seeded_mixed_pair():
    from qaccess.optimizer import random_density_pair

    rep = accessible_information_report(random_density_pair(7))
    assert rep.gap_bits <= 1e-6


# ---------------------------------------------------------------------------
# JSON plumbing
# ---------------------------------------------------------------------------


def test_parse_rank1_schema():
    p = parse_povm({"kets": [[1.0, 0.0], [0.0, 1.0]]})
    assert isinstance(p, Rank1Povm)
    assert p.n == 2


def test_parse_general_schema():
    p = parse_povm(
        {"outcomes": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]]}
    )
    assert isinstance(p, Povm)
    assert p.n == 2


def test_parse_errors_name_the_field():
    with pytest.raises(ValueError, match="kets"):
        parse_povm({"kets": [[1.0], [0.0, 1.0]]})
    with pytest.raises(ValueError, match="outcomes|kets"):
        parse_povm({})
