"""Maximization of mutual information over measurements.

Two search spaces: orthogonal (von Neumann) measurements, a one-parameter
family swept by grid plus golden-section refinement; and rank-1 measurements
with up to three outcomes, parameterized by three directions with the weights
solved from the completeness constraint.  Three real rank-1 outcomes suffice
for a real qubit pair, so the gap between the two optima is the quantity the
orthogonal-measurement conjecture predicts to vanish.  A four-outcome stress
search is available for skeptics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import Rank1Povm, is_von_neumann, joint_distribution, mutual_information
from .qstate import DensityPair
from .stationary import BoundaryDistribution, stationarity_residual

__all__ = [
    "VonNeumannParam",
    "TrinePovmParam",
    "VerificationReport",
    "optimize_von_neumann",
    "optimize_trine",
    "verify_conjecture",
    "random_density_pair",
]

VN_GRID = 4096
ANGLE_TOL = 1e-12
ASCENT_TOL_BITS = 1e-12
GAP_TOL = 1e-6
# weights below this are treated as absent outcomes
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class VonNeumannParam:
    """Orthogonal measurement along theta: basis (cos t, sin t), (-sin t, cos t)."""

    theta: float

    def povm(self) -> Rank1Povm:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Rank1Povm(kets=(np.array([c, s]), np.array([-s, c])))


@dataclass(frozen=True)
class TrinePovmParam:
    """Three-outcome rank-1 measurement: weights w_j on directions phi_j.

    Angles live in [0, pi) sorted ascending; the weights solve the
    completeness constraint and are nonnegative.  A zero weight degenerates
    the measurement to fewer effective outcomes.
    """

    angles: tuple
    weights: tuple

    def povm(self) -> Rank1Povm:
        kets = []
        for phi, w in zip(self.angles, self.weights):
            r = math.sqrt(max(w, 0.0))
            kets.append(np.array([r * math.cos(phi), r * math.sin(phi)]))
        return Rank1Povm(kets=tuple(kets))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one conjecture run on one state pair.

    gap_bits = best_trine bits - best_vn bits; collapsed records whether the
    best trine merges to an effective orthogonal measurement;
    stationarity_residuals are |first-order variations| at both optima
    (boundary pairs, where an outcome probability vanishes, are skipped).
    stress_gap_bits is populated only when the four-outcome stress search ran.
    """

    best_vn: tuple
    best_trine: tuple
    gap_bits: float
    collapsed: bool
    stationarity_residuals: tuple
    seed: int
    restarts: int
    tol_gap: float
    stress_gap_bits: float | None = None

    @property
    def max_residual(self) -> float:
        return max(self.stationarity_residuals, default=0.0)

    @property
    def passed(self) -> bool:
        ok = self.gap_bits <= self.tol_gap and self.max_residual <= 1e-6
        if self.gap_bits <= self.tol_gap:
            ok = ok and self.collapsed
        if self.stress_gap_bits is not None:
            ok = ok and self.stress_gap_bits <= self.tol_gap
        return ok

    def to_dict(self) -> dict:
        vn_param, vn_bits = self.best_vn
        trine_param, trine_bits = self.best_trine
        return {
            "best_vn": {"theta": vn_param.theta, "bits": vn_bits},
            "best_trine": {
                "angles": list(trine_param.angles),
                "weights": list(trine_param.weights),
                "bits": trine_bits,
            },
            "gap_bits": self.gap_bits,
            "collapsed": self.collapsed,
            "stationarity_residuals": list(self.stationarity_residuals),
            "seed": self.seed,
            "restarts": self.restarts,
            "tol_gap": self.tol_gap,
            "stress_gap_bits": self.stress_gap_bits,
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# Fast objective evaluation
# ---------------------------------------------------------------------------


def _bloch(states: DensityPair):
    comps = []
    for rho in (states.rho1, states.rho2):
        a, b, c = float(rho[0, 0]), float(rho[0, 1]), float(rho[1, 1])
        comps.append((0.5 * (a + c), 0.5 * (a - c), b))
    return comps


def _mi_table(p: np.ndarray) -> float:
    # bits; zero cells contribute zero
    rows = p.sum(axis=1)
    cols = p.sum(axis=0)
    total = 0.0
    for r in range(p.shape[0]):
        pr = rows[r]
        for j in range(p.shape[1]):
            v = p[r, j]
            if v <= 0.0 or cols[j] <= 0.0:
                continue
            # ratio form: exactly zero when the table is a product
            total += v * math.log2(v / (pr * cols[j]))
    return max(total, 0.0)


def _vn_value(bloch, theta: float) -> float:
    c2, s2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
    p = np.empty((2, 2))
    for r, (m0, mz, mx) in enumerate(bloch):
        v = m0 + mz * c2 + mx * s2
        p[r, 0] = min(max(v, 0.0), 1.0)
        p[r, 1] = min(max(2.0 * m0 - v, 0.0), 1.0)
    return _mi_table(p)


def _vn_grid_values(bloch, thetas: np.ndarray) -> np.ndarray:
    c2 = np.cos(2.0 * thetas)
    s2 = np.sin(2.0 * thetas)
    out = np.zeros_like(thetas)
    # accumulate sum over the 2x2 table of p log2(p / (row col))
    ps = []
    for m0, mz, mx in bloch:
        v = np.clip(m0 + mz * c2 + mx * s2, 0.0, 1.0)
        ps.append((v, np.clip(2.0 * m0 - v, 0.0, 1.0)))
    rows = [ps[0][0] + ps[0][1], ps[1][0] + ps[1][1]]
    cols = [ps[0][0] + ps[1][0], ps[0][1] + ps[1][1]]
    with np.errstate(divide="ignore", invalid="ignore"):
        for r in range(2):
            for j in range(2):
                v = ps[r][j]
                term = v * np.log2(v / (rows[r] * cols[j]))
                out += np.where(v > 0.0, np.nan_to_num(term), 0.0)
    return np.maximum(out, 0.0)


def _solve_weights(angles) -> np.ndarray | None:
    """Weights making three directions a complete measurement, or None.

    Linear system: sum w_j = 2, sum w_j cos(2 phi_j) = 0, sum w_j sin(2 phi_j) = 0.
    Returns None when the system is singular or any weight is negative.
    """
    a = np.array(
        [
            [1.0, 1.0, 1.0],
            [math.cos(2 * angles[0]), math.cos(2 * angles[1]), math.cos(2 * angles[2])],
            [math.sin(2 * angles[0]), math.sin(2 * angles[1]), math.sin(2 * angles[2])],
        ]
    )
    try:
        w = np.linalg.solve(a, np.array([2.0, 0.0, 0.0]))
    except np.linalg.LinAlgError:
        return None
    if float(w.min()) < -1e-10:
        return None
    return np.clip(w, 0.0, None)


def _trine_value(bloch, angles) -> tuple:
    w = _solve_weights(angles)
    if w is None:
        return (-math.inf, None)
    p = np.empty((2, 3))
    for r, (m0, mz, mx) in enumerate(bloch):
        for j in range(3):
            v = w[j] * (m0 + mz * math.cos(2 * angles[j]) + mx * math.sin(2 * angles[j]))
            p[r, j] = min(max(v, 0.0), 1.0)
    return (_mi_table(p), w)


# ---------------------------------------------------------------------------
# Von Neumann optimum
# ---------------------------------------------------------------------------

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _vn_slope(bloch, theta: float):
    """Analytic d(bits)/d(angle); None where the table touches zero."""
    c2, s2 = math.cos(2.0 * theta), math.sin(2.0 * theta)
    ps, gs = [], []
    for m0, mz, mx in bloch:
        a = m0 + mz * c2 + mx * s2
        b = 2.0 * m0 - a
        if a <= 0.0 or b <= 0.0:
            return None
        ps.append((a, b))
        gs.append(2.0 * (mx * c2 - mz * s2))
    c0 = ps[0][0] + ps[1][0]
    c1 = ps[0][1] + ps[1][1]
    if c0 <= 0.0 or c1 <= 0.0:
        return None
    out = 0.0
    for (a, b), g in zip(ps, gs):
        out += g * ((math.log(a) - math.log(c0)) - (math.log(b) - math.log(c1)))
    return out / math.log(2.0)


def _vn_slope_zero(bloch, lo: float, hi: float):
    """Bisect a falling sign change of the slope; None when not bracketed."""
    slo, shi = _vn_slope(bloch, lo), _vn_slope(bloch, hi)
    if slo is None or shi is None or not (slo > 0.0 > shi):
        return None
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        sm = _vn_slope(bloch, mid)
        if sm is None:
            return None
        if sm > 0.0:
            lo = mid
        elif sm < 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def _golden_max(fn, a: float, b: float, tol: float) -> tuple:
    """Golden-section maximization on [a, b]; returns (x, fn(x)) best seen."""
    best_x, best_v = a, fn(a)
    for x in (b,):
        v = fn(x)
        if v > best_v:
            best_x, best_v = x, v
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
        for x, v in ((c, fc), (d, fd)):
            if v > best_v:
                best_x, best_v = x, v
    return best_x, best_v


def optimize_von_neumann(states: DensityPair) -> tuple:
    """Global orthogonal-measurement optimum: (VonNeumannParam, bits).

    Coarse grid of 4096 angles on [0, pi) followed by golden-section
    refinement of the best cell down to an angle width of 1e-12.  The
    returned value never falls below the best grid value, and exact ties
    resolve toward the smallest angle.  Swapping the two outcomes leaves
    the value unchanged, so the angle is reported in [0, pi/2).
    """
    bloch = _bloch(states)
    thetas = np.arange(VN_GRID) * (math.pi / VN_GRID)
    values = _vn_grid_values(bloch, thetas)
    i = int(np.argmax(values))
    grid_theta, grid_val = float(thetas[i]), float(values[i])
    step = math.pi / VN_GRID
    x, v = _golden_max(lambda t: _vn_value(bloch, t), grid_theta - step, grid_theta + step, ANGLE_TOL)
    if v < grid_val or (v == grid_val and (x % math.pi) > grid_theta):
        x, v = grid_theta, grid_val
    # value samples pin a smooth peak only to about sqrt(eps); the slope
    # zero pins it to near machine precision, which angle tracking under
    # rotations needs
    root = _vn_slope_zero(bloch, grid_theta - step, grid_theta + step)
    if root is not None:
        vr = _vn_value(bloch, root)
        if vr >= v - 1e-12:
            x, v = root, max(vr, v)
    theta = x % (0.5 * math.pi)
    return (VonNeumannParam(theta=theta), v)


# ---------------------------------------------------------------------------
# Trine (3-outcome) optimum
# ---------------------------------------------------------------------------


def _canonical_trine(angles, weights) -> TrinePovmParam:
    folded = [(a % math.pi, w) for a, w in zip(angles, weights)]
    folded.sort(key=lambda t: t[0])
    return TrinePovmParam(
        angles=tuple(a for a, _ in folded), weights=tuple(float(w) for _, w in folded)
    )


def _coordinate_ascent(bloch, angles: list, tol_bits: float) -> tuple:
    best, w = _trine_value(bloch, angles)
    step = 0.2
    while step > 1e-9:
        improved = False
        for j in range(3):
            for sgn in (1.0, -1.0):
                cand = list(angles)
                cand[j] = angles[j] + sgn * step
                val, cw = _trine_value(bloch, cand)
                if val > best + tol_bits:
                    angles, best, w = cand, val, cw
                    improved = True
        if not improved:
            step *= 0.5
    return angles, best, w


def optimize_trine(states: DensityPair, restarts: int = 8, seed: int = 0) -> tuple:
    """Best rank-1 measurement with up to three outcomes.

    Multi-start coordinate ascent over the three directions with weights
    solved from completeness at every step (invalid triples rejected).  The
    first start embeds the orthogonal optimum as a zero-weight triple, which
    guarantees the result dominates optimize_von_neumann.  A final polish
    checks whether snapping the near-collapsed triple onto an exactly
    orthogonal one improves the objective.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    bloch = _bloch(states)
    rng = np.random.default_rng(seed)
    vn_param, vn_bits = optimize_von_neumann(states)

    starts = [[vn_param.theta, vn_param.theta + math.pi / 2.0, vn_param.theta + math.pi / 4.0]]
    while len(starts) < restarts:
        starts.append(sorted(rng.uniform(0.0, math.pi, size=3).tolist()))

    best_angles, best_val, best_w = None, -math.inf, None
    for start in starts:
        val0, _ = _trine_value(bloch, start)
        if not math.isfinite(val0):
            start = [start[0], start[0] + math.pi / 2.0, start[0] + math.pi / 4.0]
        angles, val, w = _coordinate_ascent(bloch, list(start), ASCENT_TOL_BITS)
        if val > best_val:
            best_angles, best_val, best_w = angles, val, w

    # polish: if the triple already sits within a hair of the orthogonal
    # optimum, snap to the exactly orthogonal representation when not worse
    snap = [vn_param.theta, vn_param.theta + math.pi / 2.0, vn_param.theta + math.pi / 4.0]
    snap_val, snap_w = _trine_value(bloch, snap)
    if snap_w is None:
        snap = [vn_param.theta, vn_param.theta + math.pi / 2.0, vn_param.theta + 0.7]
        snap_val, snap_w = _trine_value(bloch, snap)
    if snap_w is not None and snap_val >= best_val - 1e-15:
        best_angles, best_val, best_w = snap, snap_val, snap_w

    if best_w is None or (best_val < vn_bits and snap_w is not None):
        # dominance guarantee: the embedded orthogonal triple can only have
        # been lost to roundoff in the weight solve; fall back to it
        best_angles, best_val, best_w = snap, snap_val, snap_w
    return (_canonical_trine(best_angles, best_w), best_val)


# ---------------------------------------------------------------------------
# Four-outcome stress search (skeptic mode)
# ---------------------------------------------------------------------------


def _four_outcome_value(bloch, angles, w) -> float:
    if float(w.min()) < 0.0:
        return -math.inf
    p = np.empty((2, 4))
    for r, (m0, mz, mx) in enumerate(bloch):
        for j in range(4):
            v = w[j] * (m0 + mz * math.cos(2 * angles[j]) + mx * math.sin(2 * angles[j]))
            p[r, j] = min(max(v, 0.0), 1.0)
    return _mi_table(p)


def _best_over_weights(bloch, angles) -> float:
    """Max value over the weight family completing four fixed directions.

    Weights must be re-solved whenever the directions move; reusing a stale
    solution breaks completeness and inflates the value past the physical
    bound.
    """
    a = np.array(
        [[1.0] * 4, [math.cos(2 * x) for x in angles], [math.sin(2 * x) for x in angles]]
    )
    w0, *_ = np.linalg.lstsq(a, np.array([2.0, 0.0, 0.0]), rcond=None)
    null = np.linalg.svd(a)[2][-1]
    # feasible segment of s keeping all weights nonnegative
    lo, hi = -math.inf, math.inf
    for i in range(4):
        if null[i] > 1e-14:
            lo = max(lo, -w0[i] / null[i])
        elif null[i] < -1e-14:
            hi = min(hi, -w0[i] / null[i])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        return -math.inf
    fn = lambda s: _four_outcome_value(bloch, angles, w0 + s * null)
    ss = np.linspace(lo, hi, 17)
    k = int(np.argmax([fn(float(s)) for s in ss]))
    _, v = _golden_max(fn, float(ss[max(k - 1, 0)]), float(ss[min(k + 1, 16)]), 1e-9)
    return v


def _stress_search_4(states: DensityPair, restarts: int, seed: int) -> float:
    """Best value found by a 4-outcome rank-1 search (heuristic)."""
    bloch = _bloch(states)
    rng = np.random.default_rng(seed ^ 0x5EED)
    best = -math.inf
    for _ in range(max(restarts, 1)):
        angles = sorted(rng.uniform(0.0, math.pi, size=4).tolist())
        cur = _best_over_weights(bloch, angles)
        step = 0.1
        while step > 1e-5:
            moved = False
            for j in range(4):
                for sgn in (1.0, -1.0):
                    cand = list(angles)
                    cand[j] += sgn * step
                    v = _best_over_weights(bloch, cand)
                    if v > cur + 1e-13:
                        angles, cur, moved = cand, v, True
            if not moved:
                step *= 0.5
        best = max(best, cur)
    return best


# ---------------------------------------------------------------------------
# Conjecture verification
# ---------------------------------------------------------------------------


def verify_conjecture(
    states: DensityPair,
    restarts: int = 8,
    seed: int = 0,
    tol_gap: float = GAP_TOL,
    stress: bool = False,
) -> VerificationReport:
    """Run both optimizers on one pair and assemble the evidence.

    The reported bit values are recomputed through the audited
    joint-distribution path at each argmax, so the fast search objective and
    the reported numbers cannot drift apart silently.
    """
    vn_param, _ = optimize_von_neumann(states)
    trine_param, _ = optimize_trine(states, restarts=restarts, seed=seed)
    vn_povm = vn_param.povm()
    trine_povm = trine_param.povm()
    vn_bits = mutual_information(joint_distribution(states, vn_povm))
    trine_bits = mutual_information(joint_distribution(states, trine_povm))
    gap = trine_bits - vn_bits

    residuals = []
    for povm, npod in ((vn_povm, 2), (trine_povm, 3)):
        live = [
            j
            for j in range(npod)
            if float(np.dot(povm.kets[j], povm.kets[j])) > WEIGHT_FLOOR
        ]
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                try:
                    residuals.append(
                        abs(stationarity_residual(states, povm, live[i], live[j]))
                    )
                except BoundaryDistribution:
                    # an outcome probability sits at zero; the interior
                    # variational formula does not apply there
                    continue

    collapsed = is_von_neumann(trine_povm.as_povm(), tol=1e-6)
    stress_gap = None
    if stress:
        stress_best = _stress_search_4(states, restarts=restarts, seed=seed)
        stress_gap = stress_best - vn_bits

    return VerificationReport(
        best_vn=(vn_param, vn_bits),
        best_trine=(trine_param, trine_bits),
        gap_bits=gap,
        collapsed=collapsed,
        stationarity_residuals=tuple(residuals),
        seed=seed,
        restarts=restarts,
        tol_gap=tol_gap,
        stress_gap_bits=stress_gap,
    )


def random_density_pair(seed: int, reject_near_pure: bool = False) -> DensityPair:
    """Deterministic random valid pair.

    Prior uniform in [0.1, 0.9]; each state's eigenvalue split uniform on its
    simplex; eigenbasis angle uniform.  With reject_near_pure, states with
    det <= 1e-6 * trace^2 are resampled (the analytic machinery needs mixed
    states; the optimizer does not care).
    """
    rng = np.random.default_rng(seed)
    prior = float(rng.uniform(0.1, 0.9))
    traces = (prior, 1.0 - prior)
    mats = []
    for tr in traces:
        for _ in range(1000):
            lam_min = float(rng.uniform(0.0, 0.5)) * tr
            if not reject_near_pure or lam_min * (tr - lam_min) > 1e-6 * tr * tr:
                break
        theta = float(rng.uniform(0.0, math.pi))
        c, s = math.cos(theta), math.sin(theta)
        r = np.array([[c, -s], [s, c]])
        mats.append(r @ np.diag([tr - lam_min, lam_min]) @ r.T)
    return DensityPair(rho1=mats[0], rho2=mats[1])
