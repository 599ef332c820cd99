"""Stationarity analysis of the mutual information for two-letter ensembles.

The pieces here follow one chain.  A first-order variation of the mutual
information under mixing of two measurement outcomes gives a residual
(``stationarity_residual``) that vanishes at every interior optimum.  Writing
a candidate outcome direction as |0> + t|1> in a frame spanned by the outcome
pair turns the stationarity condition into a single real function f(t) whose
roots are the candidate non-orthogonal outcome directions
(``extract_params``, ``eval_f``).  The second derivative of f is a rational
function whose sign is controlled by a degree-6 polynomial (``build_P``), and
counting sign changes of f between its critical points bounds the number of
roots (``count_roots_of_f``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .polycert import Polynomial, real_roots

__all__ = [
    "StationaryParams",
    "QuadraticTriple",
    "BoundaryDistribution",
    "PureStateDomain",
    "stationarity_residual",
    "extract_params",
    "canonicalize",
    "eval_f",
    "eval_f_derivatives",
    "build_P",
    "FRootCount",
    "count_roots_of_f",
    "random_params",
    "sample_curve",
]

# probabilities at or below this are treated as boundary points
TOL_PROB = 1e-14
# eta - xi^2 at or below this (relative) marks a numerically pure state
TOL_PURE = 1e-10
# all |coefficients of L| below this means the two quadratics coincide
TOL_L_ZERO = 1e-14


class BoundaryDistribution(RuntimeError):
    """A variational residual was requested at a zero-probability boundary."""


class PureStateDomain(RuntimeError):
    """A state is pure (or numerically pure) in the requested frame.

    The root-counting machinery assumes strictly positive quadratics; pure
    states must be handled by the generic optimizer instead.
    """


@dataclass(frozen=True)
class StationaryParams:
    """Scalar parameters of the one-variable stationarity problem.

    alpha_r are the relative weights of the two states in the analysis frame,
    xi_r and eta_r the off-diagonal and diagonal ratios of state r.  The
    combination X = eta1 - xi1^2 is the scale-invariant shape parameter of
    state 1; positivity of both states forces xi_r^2 < eta_r.
    """

    alpha1: float
    alpha2: float
    xi1: float
    eta1: float
    xi2: float
    eta2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "xi1", "eta1", "xi2", "eta2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not (0.0 < self.alpha1 < 1.0 and 0.0 < self.alpha2 < 1.0):
            raise ValueError("weights must satisfy 0 < alpha_r < 1")
        if abs(self.alpha1 + self.alpha2 - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if self.xi1 * self.xi1 >= self.eta1 or self.xi2 * self.xi2 >= self.eta2:
            raise ValueError("positivity requires 0 <= xi^2 < eta")

    @property
    def X(self) -> float:
        return self.eta1 - self.xi1 * self.xi1

    def as_tuple(self):
        return (self.alpha1, self.alpha2, self.xi1, self.eta1, self.xi2, self.eta2)


@dataclass(frozen=True)
class QuadraticTriple:
    """The two state quadratics and their weighted sum.

    q1, q2 are t^2 + 2 t xi_r + eta_r; qs = alpha1 q1 + alpha2 q2.  All three
    are strictly positive on the real line for valid parameters.
    """

    q1: Polynomial
    q2: Polynomial
    qs: Polynomial

    @classmethod
    def from_params(cls, params: StationaryParams) -> "QuadraticTriple":
        a1 = Fraction(params.alpha1)
        a2 = Fraction(params.alpha2)
        q1 = Polynomial([Fraction(params.eta1), 2 * Fraction(params.xi1), Fraction(1)])
        q2 = Polynomial([Fraction(params.eta2), 2 * Fraction(params.xi2), Fraction(1)])
        qs = a1 * q1 + a2 * q2
        return cls(q1=q1, q2=q2, qs=qs)

    @property
    def L(self) -> Polynomial:
        """The Wronskian-like combination q1' q2 - q2' q1 (degree <= 2)."""
        return self.q1.derivative() * self.q2 - self.q2.derivative() * self.q1


# ---------------------------------------------------------------------------
# First-order variation of the mutual information
# ---------------------------------------------------------------------------


def stationarity_residual(states, povm, k: int, l: int) -> float:
    """First-order change of mutual information under mixing outcomes k and l.

    Returns sum_r <k|rho_r|l> * [ln p_rk - ln p_rl + ln p_.l - ln p_.k] in
    natural-log units.  Exactly antisymmetric under swapping k and l: the log
    terms are computed as differences and the matrix element symmetrically,
    so the swapped call returns the exact IEEE negation.

    Raises BoundaryDistribution when any involved probability is at the
    boundary (<= 1e-14): the variational formula assumes interior points.
    """
    from .measure import joint_distribution

    if k == l:
        raise ValueError("outcome indices must differ")
    jd = joint_distribution(states, povm)
    p = jd.p
    n = p.shape[1]
    if not (0 <= k < n and 0 <= l < n):
        raise IndexError("outcome index out of range")
    col = jd.column_marginals
    needed = (p[0, k], p[1, k], p[0, l], p[1, l], col[k], col[l])
    if min(needed) <= TOL_PROB:
        raise BoundaryDistribution(
            f"probabilities at outcomes {k},{l} are at the boundary"
        )
    kets = povm.kets
    # canonical orientation keeps <k|rho|l> bit-identical under index swap
    a, b = (k, l) if k < l else (l, k)
    va, vb = np.asarray(kets[a], float), np.asarray(kets[b], float)
    total = 0.0
    for r, rho in enumerate((states.rho1, states.rho2)):
        elem = float(va @ (np.asarray(rho, float) @ vb))
        # parenthesized as two differences: each negates exactly under the
        # index swap, so the residual is bitwise antisymmetric
        logterm = (math.log(p[r, k]) - math.log(p[r, l])) + (
            math.log(col[l]) - math.log(col[k])
        )
        total += elem * logterm
    return total


def extract_params(states, ket1, ket0) -> StationaryParams:
    """Scalar parameters of the stationarity problem in the frame (ket0, ket1).

    ket0 and ket1 must be orthonormal; candidate outcome directions are
    ket0 + t*ket1.  For each state r the returned values are
    xi_r = <1|rho_r|0>/<1|rho_r|1>, eta_r = <0|rho_r|0>/<1|rho_r|1>, and the
    weight alpha_r = <1|rho_r|1>/<1|(rho1+rho2)|1>.

    Raises PureStateDomain when a state is pure (or numerically pure) in this
    frame, i.e. xi_r^2 >= eta_r - tol: the analysis assumes strictly positive
    quadratics and the caller must fall back to the generic optimizer.
    """
    v0 = np.asarray(ket0, float)
    v1 = np.asarray(ket1, float)
    if abs(v0 @ v0 - 1.0) > 1e-9 or abs(v1 @ v1 - 1.0) > 1e-9:
        raise ValueError("frame vectors must be unit norm")
    if abs(v0 @ v1) > 1e-9:
        raise ValueError("frame vectors must be orthogonal")
    vals = []
    for rho in (states.rho1, states.rho2):
        m = np.asarray(rho, float)
        d1 = float(v1 @ (m @ v1))
        if d1 <= 0.0:
            raise ValueError("frame requires <1|rho|1> > 0 for both states")
        xi = float(v1 @ (m @ v0)) / d1
        eta = float(v0 @ (m @ v0)) / d1
        if eta - xi * xi <= TOL_PURE * max(1.0, abs(eta)):
            raise PureStateDomain(
                "state is pure in this frame; use the generic optimizer"
            )
        vals.append((xi, eta, d1))
    denom = vals[0][2] + vals[1][2]
    return StationaryParams(
        alpha1=vals[0][2] / denom,
        alpha2=vals[1][2] / denom,
        xi1=vals[0][0],
        eta1=vals[0][1],
        xi2=vals[1][0],
        eta2=vals[1][1],
    )


def canonicalize(params: StationaryParams) -> StationaryParams:
    """Affine change of variable t -> sigma t + tau making xi2 = 0, eta2 = 1.

    tau = -xi2 and sigma = sqrt(eta2 - xi2^2); each quadratic maps to
    Q(sigma t + tau)/sigma^2, which preserves positivity and the real-root
    count of f.  Weights are untouched.
    """
    tau = -params.xi2
    sigma_sq = params.eta2 - params.xi2 * params.xi2
    sigma = math.sqrt(sigma_sq)
    xi1 = (params.xi1 + tau) / sigma
    eta1 = (params.eta1 + 2.0 * params.xi1 * tau + tau * tau) / sigma_sq
    return StationaryParams(
        alpha1=params.alpha1,
        alpha2=params.alpha2,
        xi1=xi1,
        eta1=eta1,
        xi2=0.0,
        eta2=1.0,
    )


# ---------------------------------------------------------------------------
# The root-counting function f and its derivatives
# ---------------------------------------------------------------------------


def _q_values(params: StationaryParams, t: float):
    """(Q1, Q2, Qs, D) at t, with D = Q1 - Q2 built coefficient-wise.

    Q_r is evaluated as (t + xi_r)^2 + (eta_r - xi_r^2), which stays accurate
    for large |t|; the difference D must NOT be formed as Q1 - Q2 (that
    cancels catastrophically at large t) but as its own linear polynomial.
    """
    q1 = (t + params.xi1) ** 2 + (params.eta1 - params.xi1 * params.xi1)
    q2 = (t + params.xi2) ** 2 + (params.eta2 - params.xi2 * params.xi2)
    qs = params.alpha1 * q1 + params.alpha2 * q2
    d = 2.0 * (params.xi1 - params.xi2) * t + (params.eta1 - params.eta2)
    return q1, q2, qs, d


def eval_f(params: StationaryParams, t: float) -> float:
    """The stationarity function f(t) = sum_r alpha_r Q_r'(t) ln(Q_r/Q_s)(t).

    Evaluated in the cancellation-safe form
    f = 2 a1 (t+xi1) log1p(a2 D / Qs) + 2 a2 (t+xi2) log1p(-a1 D / Qs):
    the log arguments are exact small ratios, so the large-|t| decay of f is
    resolved instead of drowned in roundoff.  Finite for every real t.
    """
    a1, a2 = params.alpha1, params.alpha2
    _, _, qs, d = _q_values(params, t)
    r = d / qs
    return 2.0 * a1 * (t + params.xi1) * math.log1p(a2 * r) + 2.0 * a2 * (
        t + params.xi2
    ) * math.log1p(-a1 * r)


def eval_f_derivatives(params: StationaryParams, t: float):
    """(f'(t), f''(t)) in closed form.

    f'  = 2 sum_r alpha_r ln(Q_r/Q_s) + a1 a2 L^2 / (Q_s Q1 Q2)
    f'' = a1 a2 L P / (Q1 Q2 Q_s)^2

    with L = Q1' Q2 - Q2' Q1 and P the degree-<=6 polynomial from build_P.
    The log terms use the same log1p form as eval_f.
    """
    a1, a2 = params.alpha1, params.alpha2
    q1, q2, qs, d = _q_values(params, t)
    r = d / qs
    logsum = 2.0 * (a1 * math.log1p(a2 * r) + a2 * math.log1p(-a1 * r))
    lval = _eval_L(params, t)
    fprime = logsum + a1 * a2 * lval * lval / (qs * q1 * q2)
    pval = 0.0
    for c in reversed(_p_float_coeffs(params)):
        pval = pval * t + c
    denom = q1 * q2 * qs
    fsecond = a1 * a2 * lval * pval / (denom * denom)
    return fprime, fsecond


def _fprime(params: StationaryParams, t: float) -> float:
    """f'(t) alone; avoids touching P inside tight bisection loops."""
    a1, a2 = params.alpha1, params.alpha2
    q1, q2, qs, d = _q_values(params, t)
    r = d / qs
    lval = _eval_L(params, t)
    return 2.0 * (a1 * math.log1p(a2 * r) + a2 * math.log1p(-a1 * r)) + (
        a1 * a2 * lval * lval / (qs * q1 * q2)
    )


@lru_cache(maxsize=1024)
def _p_float_coeffs(params: StationaryParams) -> tuple:
    return build_P(params).to_floats()


def _eval_L(params: StationaryParams, t: float) -> float:
    # L = 2[(xi2-xi1) t^2 + (eta2-eta1) t + (xi1 eta2 - xi2 eta1)]
    return 2.0 * (
        (params.xi2 - params.xi1) * t * t
        + (params.eta2 - params.eta1) * t
        + (params.xi1 * params.eta2 - params.xi2 * params.eta1)
    )


def build_P(params: StationaryParams) -> Polynomial:
    """The degree-<=6 polynomial controlling the sign of f''.

    P = 3 L' (Q1 Q2 Qs) - (Q1 Q2 Qs)' L, computed with exact rational
    arithmetic on the (losslessly converted) input coefficients, so dyadic
    inputs give bit-exact integer/rational coefficients.
    """
    triple = QuadraticTriple.from_params(params)
    big_l = triple.L
    m = triple.q1 * triple.q2 * triple.qs
    return 3 * big_l.derivative() * m - m.derivative() * big_l


@dataclass(frozen=True)
class FRootCount:
    """Result of the f-root certificate for one parameter point.

    ``count`` is the number of real roots found, ``roots`` their refined
    locations, ``identically_zero`` flags the degenerate case Q1 == Q2 where
    f vanishes identically (then count = 0 and no roots are reported).
    ``bracket`` is the outer scan radius actually used.
    """

    count: int
    roots: tuple
    identically_zero: bool
    bracket: float


def count_roots_of_f(params: StationaryParams, tol: float = 1e-10) -> FRootCount:
    """Count (and locate) the real roots of f for valid parameters.

    Strategy: f'' changes sign only at odd-multiplicity roots of L * P, so
    between consecutive real roots of L and P (exactly isolated by Sturm
    chains) f' is strictly monotone and has at most one sign change; f is in
    turn strictly monotone between consecutive critical points of f'.  The
    roots of f are the strict sign changes of f across consecutive critical
    values, plus one tangential root for every critical value within a
    relative threshold of zero.  Decay of f beyond the outer bracket is
    verified by sampling before the bracket is trusted.
    """
    triple = QuadraticTriple.from_params(params)
    big_l = triple.L
    if big_l.is_zero or max(abs(float(c)) for c in big_l.coeffs) <= TOL_L_ZERO:
        return FRootCount(count=0, roots=(), identically_zero=True, bracket=0.0)
    big_p = build_P(params)

    knots: list[float] = []
    knots.extend(real_roots(big_l, tol=1e-12))
    if big_p.degree >= 1:
        knots.extend(real_roots(big_p, tol=1e-12))
    knots.sort()

    radius = 10.0 * (
        1.0
        + max(
            abs(params.xi1),
            abs(params.xi2),
            math.sqrt(params.eta1),
            math.sqrt(params.eta2),
        )
    )
    if knots:
        radius = max(radius, 1.5 * max(abs(k) for k in knots) + 1.0)
    radius = _verified_bracket(params, radius)

    nodes = [-radius] + [k for k in knots if -radius < k < radius] + [radius]
    # critical points: one strict sign change of f' possible per panel
    crits: list[float] = []
    fp = [_fprime(params, x) for x in nodes]
    for i in range(len(nodes) - 1):
        a, b = nodes[i], nodes[i + 1]
        fa, fb = fp[i], fp[i + 1]
        if fa == 0.0:
            crits.append(a)
            continue
        if fb != 0.0 and (fa > 0) != (fb > 0):
            crits.append(_bisect(lambda x: _fprime(params, x), a, b, tol))
    if fp[-1] == 0.0:
        crits.append(nodes[-1])
    crits = sorted(set(crits))

    sample = np.linspace(-radius, radius, 257)
    scale = max(1e-300, max(abs(eval_f(params, float(x))) for x in sample))
    zero_thr = 1e-10 * max(1.0, scale)

    if not crits:
        # f monotone on the whole line with zero limits would be identically
        # zero, which was excluded above; treat as no detectable roots
        return FRootCount(count=0, roots=(), identically_zero=False, bracket=radius)

    vals = [eval_f(params, c) for c in crits]
    roots: list[float] = []
    # tangential roots: critical value at zero
    near_zero = [abs(v) <= zero_thr for v in vals]
    for c, nz in zip(crits, near_zero):
        if nz:
            roots.append(c)
    # crossing roots between consecutive critical points
    for i in range(len(crits) - 1):
        if near_zero[i] or near_zero[i + 1]:
            continue
        if (vals[i] > 0) != (vals[i + 1] > 0):
            roots.append(
                _bisect(lambda x: eval_f(params, x), crits[i], crits[i + 1], tol)
            )
    # outermost panels: f runs monotonically to 0 at +-infinity, so it keeps
    # the sign of its last critical value and contributes no further roots
    roots.sort()
    return FRootCount(
        count=len(roots), roots=tuple(roots), identically_zero=False, bracket=radius
    )


def _verified_bracket(params: StationaryParams, radius: float) -> float:
    """Extend the scan radius until |f| decays monotonically past it."""
    for _ in range(8):
        ok = True
        for side in (-1.0, 1.0):
            mags = [abs(eval_f(params, side * radius * (2.0 ** k))) for k in range(5)]
            if any(mags[i + 1] > mags[i] * (1.0 + 1e-9) for i in range(len(mags) - 1)):
                ok = False
                break
        if ok:
            return radius
        radius *= 2.0
    return radius


def _bisect(fn, a: float, b: float, tol: float) -> float:
    fa = fn(a)
    if fa == 0.0:
        return a
    sa = fa > 0
    while b - a > tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == sa:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Sampling helpers
# ---------------------------------------------------------------------------


def random_params(seed: int) -> StationaryParams:
    """Deterministic valid parameter draw for certificate sweeps.

    Weights uniform in [0.02, 0.98]; xi_r uniform in [-4, 4]; eta_r places
    the shape parameter eta_r - xi_r^2 log-uniformly in [1e-2, 10^1.5], which
    spans near-pure to very mixed shapes.
    """
    rng = np.random.default_rng(seed)
    a1 = float(rng.uniform(0.02, 0.98))
    xi1, xi2 = (float(x) for x in rng.uniform(-4.0, 4.0, size=2))
    gap1, gap2 = (10.0 ** float(e) for e in rng.uniform(-2.0, 1.5, size=2))
    return StationaryParams(
        alpha1=a1,
        alpha2=1.0 - a1,
        xi1=xi1,
        eta1=xi1 * xi1 + gap1,
        xi2=xi2,
        eta2=xi2 * xi2 + gap2,
    )


def sample_curve(params: StationaryParams, t_lo: float, t_hi: float, n: int):
    """Arrays (t, f, f', f'') on a uniform grid, for reports and plots."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    ts = np.linspace(t_lo, t_hi, n)
    f = np.empty(n)
    fp = np.empty(n)
    fpp = np.empty(n)
    big_p = build_P(params)
    pflo = big_p.to_floats()
    a1, a2 = params.alpha1, params.alpha2
    for i, t in enumerate(ts):
        t = float(t)
        f[i] = eval_f(params, t)
        q1, q2, qs, d = _q_values(params, t)
        r = d / qs
        lval = _eval_L(params, t)
        fp[i] = 2.0 * (a1 * math.log1p(a2 * r) + a2 * math.log1p(-a1 * r)) + (
            a1 * a2 * lval * lval / (qs * q1 * q2)
        )
        pv = 0.0
        for c in reversed(pflo):
            pv = pv * t + c
        denom = q1 * q2 * qs
        fpp[i] = a1 * a2 * lval * pv / (denom * denom)
    return ts, f, fp, fpp
