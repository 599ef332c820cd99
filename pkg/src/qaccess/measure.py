"""Measurements and information functionals.

POVMs here are lists of real symmetric PSD 2x2 outcome matrices summing to
the identity; the rank-1 variant stores generating 2-vectors instead.  The
joint distribution of (letter, outcome) and its mutual information are the
objective everything else optimizes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Povm",
    "Rank1Povm",
    "JointDistribution",
    "joint_distribution",
    "mutual_information",
    "is_von_neumann",
    "accessible_information_report",
    "parse_povm",
]

TOL_COMPLETE = 1e-9
TOL_PSD = 1e-10
# proportionality threshold for merging outcomes (see is_von_neumann)
TOL_PROPORTIONAL = 1e-8


def _check_completeness(outcomes, tol: float) -> None:
    total = np.zeros((2, 2))
    for m in outcomes:
        total += m
    resid = float(np.max(np.abs(total - np.eye(2))))
    if resid > tol:
        raise ValueError(f"outcomes must sum to the identity (residual {resid:.3e})")


@dataclass(frozen=True)
class Povm:
    """General measurement: outcome matrices summing to the identity."""

    outcomes: tuple

    def __post_init__(self):
        if len(self.outcomes) < 1:
            raise ValueError("a measurement needs at least one outcome")
        mats = []
        for i, m in enumerate(self.outcomes):
            m = np.asarray(m, float)
            if m.shape != (2, 2):
                raise ValueError(f"outcome {i} must be a 2x2 matrix")
            if abs(m[0, 1] - m[1, 0]) > 1e-12:
                raise ValueError(f"outcome {i} must be symmetric")
            m = 0.5 * (m + m.T)
            if np.linalg.eigvalsh(m)[0] < -TOL_PSD:
                raise ValueError(f"outcome {i} is not PSD")
            m.setflags(write=False)
            mats.append(m)
        _check_completeness(mats, TOL_COMPLETE)
        object.__setattr__(self, "outcomes", tuple(mats))

    @property
    def n(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True)
class Rank1Povm:
    """Rank-1 measurement given by generating vectors; Pi_j = |j><j|.

    Kets may be sub-normalized (the weight is folded into the length); a
    zero vector marks an explicitly null outcome.
    """

    kets: tuple

    def __post_init__(self):
        vecs = []
        for i, k in enumerate(self.kets):
            v = np.asarray(k, float)
            if v.shape != (2,):
                raise ValueError(f"ket {i} must be a real 2-vector")
            v = v.copy()
            v.setflags(write=False)
            vecs.append(v)
        if not vecs:
            raise ValueError("a measurement needs at least one outcome")
        _check_completeness([np.outer(v, v) for v in vecs], TOL_COMPLETE)
        object.__setattr__(self, "kets", tuple(vecs))

    @property
    def outcomes(self) -> tuple:
        return tuple(np.outer(v, v) for v in self.kets)

    @property
    def n(self) -> int:
        return len(self.kets)

    def as_povm(self) -> Povm:
        return Povm(outcomes=self.outcomes)


@dataclass(frozen=True)
class JointDistribution:
    """2 x n probability table with its marginals.

    Entries are clamped into [0, 1] (tiny negatives are measurement-operator
    roundoff); marginals are the exact sums of the clamped table.
    """

    p: np.ndarray
    row_marginals: np.ndarray
    column_marginals: np.ndarray

    @classmethod
    def from_table(cls, table) -> "JointDistribution":
        p = np.asarray(table, float)
        if p.ndim != 2 or p.shape[0] != 2:
            raise ValueError("joint table must be 2 x n")
        if float(p.min()) < -1e-12:
            raise ValueError(f"negative probability {float(p.min()):.3e}")
        p = np.clip(p, 0.0, 1.0)
        total = float(p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        p.setflags(write=False)
        rows = p.sum(axis=1)
        cols = p.sum(axis=0)
        rows.setflags(write=False)
        cols.setflags(write=False)
        return cls(p=p, row_marginals=rows, column_marginals=cols)


def joint_distribution(states, povm) -> JointDistribution:
    """p_rj = trace(rho_r Pi_j) for every letter r and outcome j."""
    outs = povm.outcomes
    table = np.empty((2, len(outs)))
    for r, rho in enumerate((states.rho1, states.rho2)):
        rho = np.asarray(rho, float)
        for j, pi in enumerate(outs):
            table[r, j] = float(np.sum(rho * pi))  # trace(A B) for symmetric A, B
    return JointDistribution.from_table(table)


def mutual_information(jd: JointDistribution) -> float:
    """I(letter; outcome) in bits; zero-probability cells contribute zero."""
    p = jd.p
    rows = jd.row_marginals
    cols = jd.column_marginals
    total = 0.0
    for r in range(2):
        for j in range(p.shape[1]):
            v = float(p[r, j])
            if v <= 0.0:
                continue
            # ratio form: exactly zero when the table is a product
            total += v * math.log2(v / (rows[r] * cols[j]))
    return max(total, 0.0)


def _norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m)))


def is_von_neumann(povm, tol: float = 1e-8) -> bool:
    """True when the measurement is effectively a 2-outcome orthogonal one.

    Zero outcomes are discarded and mutually proportional outcomes merged
    (residual test on cross-scaled differences); the survivors must be
    exactly two orthogonal rank-1 projectors with unit trace, within tol.
    """
    merge_tol = max(tol, TOL_PROPORTIONAL)
    groups: list[np.ndarray] = []
    for m in povm.outcomes:
        m = np.asarray(m, float)
        if _norm(m) <= merge_tol:
            continue
        for gi, g in enumerate(groups):
            if _norm(_norm(g) * m - _norm(m) * g) <= merge_tol * (_norm(g) + _norm(m)):
                groups[gi] = g + m
                break
        else:
            groups.append(m.copy())
    if len(groups) != 2:
        return False
    for g in groups:
        if abs(float(np.trace(g)) - 1.0) > tol:
            return False
        # projector test: g^2 = g
        if _norm(g @ g - g) > tol:
            return False
    if _norm(groups[0] @ groups[1]) > tol:
        return False
    return True


def accessible_information_report(states, restarts: int = 8, seed: int = 0):
    """Best von Neumann and best 3-outcome optima for one pair, with the gap.

    Thin wrapper over the optimizer's conjecture verifier; see
    :func:`qaccess.optimizer.verify_conjecture`.
    """
    from .optimizer import verify_conjecture

    return verify_conjecture(states, restarts=restarts, seed=seed)


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------


def parse_povm(obj):
    """Parse {"kets": [[x,y],...]} or {"outcomes": [[[a,b],[b,c]],...]}.

    Returns Rank1Povm for the former, Povm for the latter; ValueError names
    the offending field otherwise.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("povm: expected a JSON object")
    if "kets" in obj:
        kets = obj["kets"]
        if not (isinstance(kets, list) and kets):
            raise ValueError("kets: expected a non-empty array")
        for i, k in enumerate(kets):
            if not (
                isinstance(k, list)
                and len(k) == 2
                and all(isinstance(x, (int, float)) for x in k)
            ):
                raise ValueError(f"kets[{i}]: expected [x, y]")
        return Rank1Povm(kets=tuple(np.asarray(k, float) for k in kets))
    if "outcomes" in obj:
        outs = obj["outcomes"]
        if not (isinstance(outs, list) and outs):
            raise ValueError("outcomes: expected a non-empty array")
        mats = []
        for i, m in enumerate(outs):
            try:
                arr = np.asarray(m, float)
            except (TypeError, ValueError):
                raise ValueError(f"outcomes[{i}]: expected a 2x2 matrix") from None
            if arr.shape != (2, 2):
                raise ValueError(f"outcomes[{i}]: expected a 2x2 matrix")
            mats.append(arr)
        return Povm(outcomes=tuple(mats))
    raise ValueError("povm: need either 'kets' or 'outcomes'")
