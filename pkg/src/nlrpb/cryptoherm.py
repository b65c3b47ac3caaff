"""Hidden-hermiticity pairs (H, Theta) and their symmetric forms.

A square matrix H is cryptohermitian with respect to a symmetric
positive definite metric Theta when Theta H = H^T Theta (real
arithmetic, so the adjoint is the transpose).  Its similarity transform
h = Theta^{1/2} H Theta^{-1/2} is then symmetric, and the two
representations convert into each other:

* ``from_crypto``: eigenpairs (lam_n, e_n) of h give a biorthogonal
  system with phi_n = Theta^{-1/2} e_n, eta_n = Theta^{1/2} e_n and
  eps = lam - lam.min().
* ``from_nlrpb``: a system gives back H = b a and Theta = S_eta.

``hermitize`` stores the spectrum shifted so its minimum is exactly
zero, recording the shift, which keeps the stored matrix consistent
with h e_n = spectrum[n] e_n while the original operator is recovered
as h + shift I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import (
    as_matrix,
    default_tolerance,
    jacobi_eigh,
    residual_norm,
    spd_deficit,
    spd_inv_sqrt,
    spd_sqrt,
)
from .pseudoboson import (
    MIN_EPS_GAP,
    BiorthogonalSystem,
    LadderPair,
    build_ladders,
    build_metrics,
    build_system,
)
from .report import Check, VerificationReport

__all__ = [
    "CryptoPair",
    "HermitizedSystem",
    "factorize_h",
    "from_crypto",
    "from_nlrpb",
    "hermitize",
    "spectral_expansions",
    "verify_chwrt",
]

_TINY = 1e-300
_METRIC_SYM_RTOL = 1e-12


@dataclass(frozen=True)
class CryptoPair:
    """Operator with metric; ``h_matrix`` is generally non-symmetric."""

    h_matrix: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        h = as_matrix(self.h_matrix, "h_matrix")
        t = as_matrix(self.theta, "theta")
        if h.shape[0] != h.shape[1] or h.shape != t.shape:
            raise ValidationError(
                f"crypto pair: need square matrices of equal size, got {h.shape} and {t.shape}"
            )
        h.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "h_matrix", h)
        object.__setattr__(self, "theta", t)


@dataclass(frozen=True)
class HermitizedSystem:
    """Symmetric representative with zero-based spectrum.

    ``h`` is the shifted symmetric matrix, so h e_n = spectrum[n] e_n
    with spectrum[0] = 0 and spectrum strictly increasing; ``shift``
    restores the original operator as h + shift I.  Rows of ``e`` are
    the orthonormal eigenvectors.
    """

    h: np.ndarray
    shift: float
    spectrum: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        h = as_matrix(self.h, "h")
        spectrum = np.array(self.spectrum, dtype=float)
        e = as_matrix(self.e, "e")
        n = h.shape[0]
        if h.shape != (n, n) or e.shape != (n, n) or spectrum.shape != (n,):
            raise ValidationError("hermitized system: inconsistent field shapes")
        h.setflags(write=False)
        spectrum.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "shift", float(self.shift))


def verify_chwrt(h_matrix, theta, tolerance=None) -> VerificationReport:
    """Report on Theta being SPD and on the residual Theta H - H^T Theta.

    The cryptohermiticity residual is relative to ||Theta H||_F; the
    metric entry is a positive-definiteness deficit with tolerance 0.
    """
    h = as_matrix(h_matrix, "h_matrix")
    t = as_matrix(theta, "theta")
    if h.shape[0] != h.shape[1]:
        raise ValidationError(f"verify_chwrt: h_matrix must be square, got {h.shape}")
    if t.shape != h.shape:
        raise ValidationError(f"verify_chwrt: dimension mismatch {h.shape} vs {t.shape}")
    n = h.shape[0]
    tol = default_tolerance(n) if tolerance is None else float(tolerance)

    sym_defect = max(0.0, residual_norm(t, t.T) - _METRIC_SYM_RTOL * max(float(np.linalg.norm(t)), 1.0))
    lam = jacobi_eigh((t + t.T) / 2.0).eigenvalues
    metric_residual = max(sym_defect, spd_deficit(lam))

    th = t @ h
    crypto_residual = residual_norm(th, h.T @ t) / max(float(np.linalg.norm(th)), _TINY)

    return VerificationReport(
        (
            Check.from_residual("cryptohermiticity", crypto_residual, tol),
            Check.from_residual("metric_spd", metric_residual, 0.0),
        )
    )


def hermitize(h_matrix, theta, tolerance=None) -> HermitizedSystem:
    """Similarity-transform to the symmetric representative and diagonalize.

    Fails when the pair is not cryptohermitian, when the transform stays
    asymmetric beyond tolerance (a false metric), or when the spectrum
    has a gap at or below MIN_EPS_GAP (degeneracy).
    """
    rep = verify_chwrt(h_matrix, theta, tolerance)
    if not rep.passed:
        worst = max(rep.checks, key=lambda c: (not c.passed, c.residual))
        raise ValidationError(
            f"hermitize: pair is not cryptohermitian "
            f"({worst.name} residual {worst.residual:.3e} > {worst.tolerance:g})"
        )
    h = as_matrix(h_matrix, "h_matrix")
    t = as_matrix(theta, "theta")
    n = h.shape[0]
    tol = default_tolerance(n) if tolerance is None else float(tolerance)
    raw = spd_sqrt(t) @ h @ spd_inv_sqrt(t)
    asym = residual_norm(raw, raw.T)
    if asym > tol * max(float(np.linalg.norm(raw)), 1.0):
        raise ValidationError(
            f"hermitize: transform asymmetric ({asym:.3e}); the metric does not hermitize the operator"
        )
    sym = (raw + raw.T) / 2.0
    eig = jacobi_eigh(sym)
    lam = eig.eigenvalues
    if n > 1:
        gap = float(np.diff(lam).min())
        if gap <= MIN_EPS_GAP:
            raise ValidationError(
                f"hermitize: degenerate spectrum, smallest eigenvalue gap {gap:.3e} <= {MIN_EPS_GAP:g}"
            )
    shift = float(lam[0])
    spectrum = lam - shift
    return HermitizedSystem(sym - shift * np.eye(n), shift, spectrum, eig.eigenvectors.T.copy())


def from_crypto(h_matrix, theta, tolerance=None):
    """Biorthogonal system and ladders from a cryptohermitian pair.

    Constructs phi_n = Theta^{-1/2} e_n and eta_n = Theta^{1/2} e_n,
    which are biorthonormal by the orthonormality of the e_n.
    """
    hs = hermitize(h_matrix, theta, tolerance)
    t = as_matrix(theta, "theta")
    phi = hs.e @ spd_inv_sqrt(t)
    eta = hs.e @ spd_sqrt(t)
    sys = build_system(phi, eta, hs.spectrum, tolerance)
    return sys, build_ladders(sys)


def from_nlrpb(sys: BiorthogonalSystem) -> CryptoPair:
    """Operator H = b a with metric Theta = S_eta."""
    lad = build_ladders(sys)
    met = build_metrics(sys)
    pair = CryptoPair(lad.b @ lad.a, met.s_eta)
    rep = verify_chwrt(pair.h_matrix, pair.theta)
    if not rep.passed:
        raise ValidationError("from_nlrpb: constructed pair failed cryptohermiticity; system data inconsistent")
    return pair


def factorize_h(sys: BiorthogonalSystem, ladders: LadderPair, theta):
    """Similarity-transformed ladders (a_t, b_t) with b_t a_t = h.

    a_t = Theta^{1/2} a Theta^{-1/2} and likewise for b; generally
    b_t != a_t^T even though their product is symmetric.
    """
    t = as_matrix(theta, "theta")
    n = sys.n
    if t.shape != (n, n) or ladders.a.shape != (n, n):
        raise ValidationError("factorize_h: dimensions of system, ladders and theta must agree")
    sq = spd_sqrt(t)
    isq = spd_inv_sqrt(t)
    return sq @ ladders.a @ isq, sq @ ladders.b @ isq


def spectral_expansions(sys: BiorthogonalSystem):
    """Rank-one expansions (H, H^T form, symmetric h).

    H = sum eps[n] |phi_n><eta_n|, its transpose partner
    sum eps[n] |eta_n><phi_n|, and h = sum spectrum[n] |e_n><e_n| with
    the e_n taken from hermitizing (b a, S_eta).  All three are
    isospectral.
    """
    h_op = (sys.phi.T * sys.eps) @ sys.eta
    h_dag = (sys.eta.T * sys.eps) @ sys.phi
    pair = from_nlrpb(sys)
    hs = hermitize(pair.h_matrix, pair.theta)
    h_sym = (hs.e.T * hs.spectrum) @ hs.e
    return h_op, h_dag, h_sym
