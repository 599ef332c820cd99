"""Signal-state representation: validation and reduction to real matrices.

Two unnormalized 2x2 density matrices carry the alphabet; their traces are
the letter priors.  All downstream analysis assumes both matrices are real
symmetric, which a common unitary can always arrange for a qubit pair; this
module performs that reduction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DensityPair",
    "ComplexDensityPair",
    "ValidationResult",
    "validate_pair",
    "to_real_basis",
    "is_pure",
    "parse_state_pair",
    "state_pair_to_json",
]

TOL_PSD = 1e-10
TOL_HERM = 1e-10
TOL_NORM = 1e-9


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class ComplexDensityPair:
    """Raw input pair, possibly complex, prior to the real-basis reduction."""

    rho1: np.ndarray
    rho2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho1", _frozen(np.asarray(self.rho1, complex)))
        object.__setattr__(self, "rho2", _frozen(np.asarray(self.rho2, complex)))
        if self.rho1.shape != (2, 2) or self.rho2.shape != (2, 2):
            raise ValueError("states must be 2x2 matrices")


@dataclass(frozen=True)
class DensityPair:
    """Validated real symmetric pair; traces are the letter priors.

    Construction symmetrizes exactly ((m + m^T)/2) and, only when an
    eigenvalue dips below zero within tolerance, clamps it to zero so that
    near-pure states cannot feed negative probabilities into logarithms.
    """

    rho1: np.ndarray
    rho2: np.ndarray

    def __post_init__(self):
        mats = []
        for name in ("rho1", "rho2"):
            m = np.asarray(getattr(self, name), float)
            if m.shape != (2, 2):
                raise ValueError(f"{name} must be a 2x2 real matrix")
            m = 0.5 * (m + m.T)
            evals = np.linalg.eigvalsh(m)
            if evals[0] < -TOL_PSD:
                raise ValueError(f"{name} is not PSD (eigenvalue {evals[0]:.3e})")
            if evals[0] < 0.0:
                w, v = np.linalg.eigh(m)
                m = (v * np.clip(w, 0.0, None)) @ v.T
                m = 0.5 * (m + m.T)
            if np.trace(m) <= 0.0:
                raise ValueError(f"{name} must have positive trace")
            mats.append(_frozen(m))
        tr = float(np.trace(mats[0]) + np.trace(mats[1]))
        if abs(tr - 1.0) > TOL_NORM:
            raise ValueError(f"traces must sum to 1 (got {tr!r})")
        object.__setattr__(self, "rho1", mats[0])
        object.__setattr__(self, "rho2", mats[1])

    @property
    def priors(self) -> tuple:
        return (float(np.trace(self.rho1)), float(np.trace(self.rho2)))


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


def validate_pair(p: ComplexDensityPair) -> ValidationResult:
    """Check hermiticity, positivity, and normalization; never raises.

    Violations come back as human-readable strings carrying the measured
    residual, one per failed invariant.
    """
    problems = []
    for name, m in (("rho1", p.rho1), ("rho2", p.rho2)):
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > TOL_HERM:
            problems.append(f"{name} not Hermitian (residual {herm:.3e})")
            continue
        evals = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if evals[0] < -TOL_PSD:
            problems.append(f"{name} not PSD (eigenvalue {float(evals[0]):.3e})")
        if float(np.trace(m).real) <= 0.0:
            problems.append(f"{name} trace must be positive")
    tr = float((np.trace(p.rho1) + np.trace(p.rho2)).real)
    if abs(tr - 1.0) > TOL_NORM:
        problems.append(f"traces sum to {tr!r}, expected 1")
    return ValidationResult(ok=not problems, violations=tuple(problems))


def _is_proportional_to_identity(m: np.ndarray, tol: float) -> bool:
    scale = float(np.trace(m).real) / 2.0
    return float(np.max(np.abs(m - scale * np.eye(2)))) <= tol * max(1.0, abs(scale))


def to_real_basis(p: ComplexDensityPair) -> DensityPair:
    """Conjugate both states by one unitary so both become real symmetric.

    The eigenbasis of rho1 makes it real diagonal; a further diagonal phase
    rotation makes rho2's off-diagonal real and nonnegative.  When rho1 is
    proportional to the identity the roles swap (rho2's eigenbasis is used);
    when both are, there is nothing to rotate.  Already-real inputs are
    returned unchanged apart from the sign convention on rho2's off-diagonal.
    Traces and eigenvalue pairs of both states are preserved.
    """
    r1, r2 = p.rho1, p.rho2
    imag_resid = max(float(np.max(np.abs(r1.imag))), float(np.max(np.abs(r2.imag))))
    if imag_resid <= 1e-14:
        m1, m2 = r1.real.copy(), r2.real.copy()
        if m2[0, 1] < 0.0:
            flip = np.diag([1.0, -1.0])
            m1 = flip @ m1 @ flip
            m2 = flip @ m2 @ flip
        return DensityPair(rho1=m1, rho2=m2)

    anchor, other = r1, r2
    swapped = False
    if _is_proportional_to_identity(r1, 1e-12):
        if _is_proportional_to_identity(r2, 1e-12):
            return DensityPair(rho1=r1.real, rho2=r2.real)
        anchor, other = r2, r1
        swapped = True
    off = float(np.max(np.abs(anchor - np.diag(np.diag(anchor).real))))
    if off <= 1e-14:
        # anchor already real diagonal: keep it bit-identical
        a_diag = anchor.copy()
        o_rot = other.copy()
    else:
        _, u = np.linalg.eigh(0.5 * (anchor + anchor.conj().T))
        a_diag = u.conj().T @ anchor @ u
        o_rot = u.conj().T @ other @ u
    z = o_rot[0, 1]
    if abs(z) > 1e-15:
        phase = np.diag([1.0, z.conjugate() / abs(z)])
        o_rot = phase.conj().T @ o_rot @ phase
        a_diag = phase.conj().T @ a_diag @ phase
    m1, m2 = (o_rot, a_diag) if swapped else (a_diag, o_rot)
    m1 = 0.5 * (m1 + m1.conj().T).real
    m2 = 0.5 * (m2 + m2.conj().T).real
    if m2[0, 1] < 0.0:
        flip = np.diag([1.0, -1.0])
        m1 = flip @ m1 @ flip
        m2 = flip @ m2 @ flip
    return DensityPair(rho1=m1, rho2=m2)


def is_pure(rho, tol: float = 1e-10) -> bool:
    """Rank-1 test, scale invariant: det(rho) <= tol * trace(rho)^2."""
    m = np.asarray(rho, float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    tr = m[0, 0] + m[1, 1]
    return det <= tol * tr * tr


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------


def _entry_to_complex(v, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        re, im = v
        if isinstance(re, (int, float)) and isinstance(im, (int, float)):
            return complex(re, im)
    raise ValueError(f"{where}: matrix entries must be numbers or [re, im] pairs")


def parse_state_pair(obj) -> ComplexDensityPair:
    """Build a pair from the JSON schema {"rho1": 2x2, "rho2": 2x2}.

    Entries are bare numbers or [re, im] pairs.  Raises ValueError naming the
    offending field on any structural problem.
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise ValueError("state pair: expected a JSON object")
    mats = []
    for name in ("rho1", "rho2"):
        if name not in obj:
            raise ValueError(f"state pair: missing field {name!r}")
        rows = obj[name]
        if not (isinstance(rows, list) and len(rows) == 2):
            raise ValueError(f"{name}: expected 2 rows")
        m = np.zeros((2, 2), complex)
        for i, row in enumerate(rows):
            if not (isinstance(row, list) and len(row) == 2):
                raise ValueError(f"{name}: row {i} must have 2 entries")
            for j, v in enumerate(row):
                m[i, j] = _entry_to_complex(v, f"{name}[{i}][{j}]")
        mats.append(m)
    return ComplexDensityPair(rho1=mats[0], rho2=mats[1])


def _matrix_to_json(m) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.any(m.imag != 0.0):
        return [[[float(x.real), float(x.imag)] for x in row] for row in m]
    return [[float(x.real) for x in row] for row in m]


def state_pair_to_json(p) -> dict:
    """Serialize a real or complex pair back to the input schema."""
    return {"rho1": _matrix_to_json(p.rho1), "rho2": _matrix_to_json(p.rho2)}
