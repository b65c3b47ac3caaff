"""Biorthogonal ladder systems in finite dimension.

A system is a strictly increasing sequence ``eps`` with ``eps[0] = 0``
together with two bases ``phi_n``, ``eta_n`` of R^N satisfying
``<phi_n, eta_m> = delta_nm``.  From that data the module builds the
lowering/raising pair

    a = sum_{n=1}^{N-1} sqrt(eps[n])   |phi[n-1]><eta[n]|
    b = sum_{n=0}^{N-2} sqrt(eps[n+1]) |phi[n+1]><eta[n]|

and the frame operators S_phi = sum |phi_n><phi_n| and
S_eta = sum |eta_n><eta_n|, which are positive definite and mutually
inverse.  ``verify_axioms`` reports on the five defining properties:

1. ``a`` annihilates the vacuum ``phi_0``.
2. ``b^T`` annihilates the dual vacuum ``eta_0`` (real arithmetic, so
   the adjoint is the transpose).
3. Ladder relations with factors sqrt(eps), plus biorthonormality.
4. Resolution of identity: sum_n |phi_n><eta_n| = I.
5. Frame bounds: S_phi and S_eta positive definite with S_phi S_eta = I.

The truncation closes the ladder at the top: ``b`` annihilates
``phi[N-1]``, so ladder and commutator identities hold for levels
n <= N-2 only, and ``commutator_defect`` rejects the top level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import as_matrix, as_vector, default_tolerance, jacobi_eigh, spd_deficit
from .report import Check, VerificationReport

__all__ = [
    "MIN_EPS_GAP",
    "BiorthogonalSystem",
    "LadderPair",
    "MetricPair",
    "build_ladders",
    "build_metrics",
    "build_system",
    "commutator_defect",
    "rescale",
    "verify_axioms",
]

#: Smallest admissible gap between consecutive eps values (simple spectrum).
MIN_EPS_GAP = 1e-10

_EPS0_TOL = 1e-12
_TINY = 1e-300


@dataclass(frozen=True)
class BiorthogonalSystem:
    """Spectrum ``eps`` plus row-stacked bases ``phi`` and ``eta``.

    The dataclass only enforces shapes and finiteness; semantic
    validation (monotone eps, biorthonormality) happens in
    ``build_system`` so that verification code can still represent
    deliberately broken data.
    """

    n: int
    eps: np.ndarray
    phi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        eps = as_vector(self.eps, "eps")
        phi = as_matrix(self.phi, "phi")
        eta = as_matrix(self.eta, "eta")
        if self.n != eps.shape[0]:
            raise ValidationError(f"system: n = {self.n} but eps has {eps.shape[0]} entries")
        if phi.shape != (self.n, self.n) or eta.shape != (self.n, self.n):
            raise ValidationError(
                f"system: basis shapes {phi.shape}/{eta.shape} do not match n = {self.n}"
            )
        for name, arr in (("eps", eps), ("phi", phi), ("eta", eta)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class LadderPair:
    """Lowering matrix ``a`` and raising matrix ``b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_matrix(self.b, "b")
        if a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ValidationError(f"ladders: need square matrices of equal size, got {a.shape}/{b.shape}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class MetricPair:
    """Frame operators S_phi and S_eta (mutually inverse when valid)."""

    s_phi: np.ndarray
    s_eta: np.ndarray

    def __post_init__(self):
        s_phi = as_matrix(self.s_phi, "s_phi")
        s_eta = as_matrix(self.s_eta, "s_eta")
        if s_phi.shape[0] != s_phi.shape[1] or s_phi.shape != s_eta.shape:
            raise ValidationError(
                f"metrics: need square matrices of equal size, got {s_phi.shape}/{s_eta.shape}"
            )
        s_phi.setflags(write=False)
        s_eta.setflags(write=False)
        object.__setattr__(self, "s_phi", s_phi)
        object.__setattr__(self, "s_eta", s_eta)


def build_system(phi, eta, eps, tolerance=None) -> BiorthogonalSystem:
    """Validate and freeze a biorthogonal system.

    Requires eps[0] = 0 within 1e-12, strictly increasing eps with gaps
    above MIN_EPS_GAP, and max |<phi_n, eta_m> - delta_nm| within
    tolerance (default_tolerance(N) when not given).
    """
    eps = as_vector(eps, "eps")
    phi = as_matrix(phi, "phi")
    eta = as_matrix(eta, "eta")
    n = eps.shape[0]
    if phi.shape != (n, n) or eta.shape != (n, n):
        raise ValidationError(
            f"build_system: need {n} vectors of dimension {n}; got phi {phi.shape}, eta {eta.shape}"
        )
    if abs(eps[0]) > _EPS0_TOL:
        raise ValidationError(f"build_system: eps[0] must be 0, got {float(eps[0])!r}")
    if n > 1:
        smallest_gap = float(np.diff(eps).min())
        if smallest_gap <= MIN_EPS_GAP:
            raise ValidationError(
                "build_system: eps must increase strictly with gaps above "
                f"{MIN_EPS_GAP:g}; smallest gap {smallest_gap:g}"
            )
    tol = default_tolerance(n) if tolerance is None else float(tolerance)
    dev = float(np.abs(phi @ eta.T - np.eye(n)).max())
    if dev > tol:
        raise ValidationError(
            f"build_system: biorthonormality violated, max |<phi_n, eta_m> - delta_nm| = {dev:.3e} > {tol:g}"
        )
    return BiorthogonalSystem(n, eps, phi, eta)


def build_ladders(sys: BiorthogonalSystem) -> LadderPair:
    """Lowering/raising matrices from the rank-one expansions."""
    if np.any(sys.eps[1:] < 0.0):
        raise ValidationError("build_ladders: eps must be nonnegative")
    root = np.sqrt(sys.eps[1:])
    a = (sys.phi[:-1].T * root) @ sys.eta[1:]
    b = (sys.phi[1:].T * root) @ sys.eta[:-1]
    return LadderPair(a, b)


def build_metrics(sys: BiorthogonalSystem) -> MetricPair:
    """Frame operators as Gram-type sums of rank-one projectors."""
    return MetricPair(sys.phi.T @ sys.phi, sys.eta.T @ sys.eta)


def _row_norms(mat: np.ndarray) -> np.ndarray:
    return np.maximum(np.linalg.norm(mat, axis=1), _TINY)


def verify_axioms(sys: BiorthogonalSystem, ladders: LadderPair, tolerance=None) -> VerificationReport:
    """Residual report for the five axioms (see module docstring).

    Ladder residuals are relative to the norms of the vectors acted on;
    the frame-bound entry is a positive-definiteness deficit with
    tolerance 0, independent of the residual tolerance.
    """
    n = sys.n
    if ladders.a.shape != (n, n):
        raise ValidationError(f"verify_axioms: ladder shape {ladders.a.shape} does not match n = {n}")
    tol = default_tolerance(n) if tolerance is None else float(tolerance)
    phi, eta, eps = sys.phi, sys.eta, sys.eps
    a, b = ladders.a, ladders.b
    nphi = _row_norms(phi)
    neta = _row_norms(eta)
    root = np.sqrt(np.clip(eps, 0.0, None))

    p1 = float(np.linalg.norm(a @ phi[0]) / nphi[0])
    p2 = float(np.linalg.norm(b.T @ eta[0]) / neta[0])

    ladder_residuals = [0.0]
    if n > 1:
        aphi = phi @ a.T  # row n is a phi_n
        bphi = phi @ b.T
        ateta = eta @ a  # row n is a^T eta_n
        bteta = eta @ b
        # a lowers phi_n for n >= 1, b raises phi_n for n <= N-2;
        # the transposes act dually on eta.
        ladder_residuals.extend(
            [
                float((np.linalg.norm(aphi[1:] - root[1:, None] * phi[:-1], axis=1) / nphi[1:]).max()),
                float((np.linalg.norm(bphi[:-1] - root[1:, None] * phi[1:], axis=1) / nphi[:-1]).max()),
                float((np.linalg.norm(ateta[:-1] - root[1:, None] * eta[1:], axis=1) / neta[:-1]).max()),
                float((np.linalg.norm(bteta[1:] - root[1:, None] * eta[:-1], axis=1) / neta[1:]).max()),
            ]
        )

    metrics = build_metrics(sys)
    deficits = [spd_deficit(jacobi_eigh(m).eigenvalues) for m in (metrics.s_phi, metrics.s_eta)]
    eye = np.eye(n)

    checks = (
        Check.from_residual("p1_vacuum_phi", p1, tol),
        Check.from_residual("p2_vacuum_eta", p2, tol),
        Check.from_residual("p3_biorthonormality", float(np.abs(phi @ eta.T - eye).max()), tol),
        Check.from_residual("p3_ladder_relations", max(ladder_residuals), tol),
        Check.from_residual("p4_resolution_of_identity", float(np.linalg.norm(phi.T @ eta - eye)), tol),
        Check.from_residual("p5_frame_bounds", max(deficits), 0.0),
        Check.from_residual(
            "p5_metric_duality", float(np.linalg.norm(metrics.s_phi @ metrics.s_eta - eye)), tol
        ),
    )
    return VerificationReport(checks)


def commutator_defect(sys: BiorthogonalSystem, ladders: LadderPair, n: int) -> float:
    """Relative residual of [a, b] phi_n = (eps[n+1] - eps[n]) phi_n.

    Valid for 0 <= n <= N-2; the top level is rejected because b
    annihilates phi[N-1] under truncation.
    """
    if not 0 <= n <= sys.n - 2:
        raise ValidationError(
            f"commutator_defect: level {n} outside 0..{sys.n - 2}; "
            "the top level is not ladder-closed in finite dimension"
        )
    comm = ladders.a @ ladders.b - ladders.b @ ladders.a
    gap = float(sys.eps[n + 1] - sys.eps[n])
    phi_n = sys.phi[n]
    res = comm @ phi_n - gap * phi_n
    return float(np.linalg.norm(res) / max(np.linalg.norm(phi_n), _TINY))


def rescale(sys: BiorthogonalSystem, nu) -> BiorthogonalSystem:
    """Gauge change phi_n -> phi_n / nu_n, eta_n -> nu_n eta_n (nu_n > 0).

    Biorthonormality and sum_n eps[n] |phi_n><eta_n| are preserved; the
    frame operators change unless nu is constant 1.
    """
    nu = as_vector(nu, "nu")
    if nu.shape[0] != sys.n:
        raise ValidationError(f"rescale: need {sys.n} factors, got {nu.shape[0]}")
    if np.any(nu <= 0.0):
        raise ValidationError("rescale: all factors must be positive")
    return BiorthogonalSystem(sys.n, sys.eps, sys.phi / nu[:, None], sys.eta * nu[:, None])
