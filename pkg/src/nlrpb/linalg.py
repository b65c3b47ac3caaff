"""Dense real linear algebra kernels.

All routines operate on plain ``numpy`` float64 arrays: matrices are
2-d, vectors 1-d, and every entry point rejects NaN/Inf input.  The
symmetric eigensolver is a cyclic Jacobi iteration rather than a LAPACK
call: unconditionally convergent, easy to audit, and at the target
sizes (N <= 64) as accurate as QR while staying fully deterministic,
which the golden tests rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError

__all__ = [
    "COND_LIMIT",
    "SPD_GATE",
    "SymEig",
    "as_matrix",
    "as_vector",
    "default_tolerance",
    "inverse",
    "jacobi_eigh",
    "matmul",
    "residual_norm",
    "spd_deficit",
    "spd_inv_sqrt",
    "spd_sqrt",
]

#: Relative eigenvalue floor under which a symmetric matrix is treated
#: as not positive definite.
SPD_GATE = 1e-12

#: Condition-number ceiling for ``inverse``.
COND_LIMIT = 1e12

_SYM_RTOL = 1e-12
_SIGN_CUTOFF = 1e-12


def default_tolerance(n: int, scale: float = 1.0) -> float:
    """Default absolute residual tolerance for size-``n`` problems.

    Flat 1e-10 up to n = 16; above that it grows as ``n * 1e-12 * scale``
    so checks track both dimension and data magnitude.
    """
    if n <= 16:
        return 1e-10
    return n * 1e-12 * scale


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    """Coerce ``value`` to a finite real 2-d float64 array (a copy)."""
    arr = np.array(value, dtype=float, order="C")
    if arr.ndim != 2 or min(arr.shape) < 1:
        raise ValidationError(f"{name}: expected a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: entries must be finite")
    return arr


def as_vector(value, name: str = "vector") -> np.ndarray:
    """Coerce ``value`` to a finite real 1-d float64 array (a copy)."""
    arr = np.array(value, dtype=float, order="C")
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ValidationError(f"{name}: expected a 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: entries must be finite")
    return arr


def matmul(a, b) -> np.ndarray:
    """Matrix product with an explicit inner-dimension check."""
    a = as_matrix(a, "matmul left operand")
    b = as_matrix(b, "matmul right operand")
    if a.shape[1] != b.shape[0]:
        raise ValidationError(f"matmul: inner dimensions differ ({a.shape} x {b.shape})")
    return a @ b


def residual_norm(a, b) -> float:
    """Frobenius norm of ``a - b`` (the 2-norm for vectors)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValidationError(f"residual_norm: shapes differ ({a.shape} vs {b.shape})")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("residual_norm: entries must be finite")
    return float(np.linalg.norm(a - b))


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are ascending; ``eigenvectors`` holds the orthonormal
    eigenvectors as columns, sign-fixed so that the first component with
    magnitude above 1e-12 is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)


def _fix_signs(vecs: np.ndarray) -> None:
    for j in range(vecs.shape[1]):
        for component in vecs[:, j]:
            if abs(component) > _SIGN_CUTOFF:
                if component < 0.0:
                    vecs[:, j] = -vecs[:, j]
                break


def _offdiag_norm(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat - np.diag(np.diag(mat))))


def jacobi_eigh(a, max_sweeps: int = 100) -> SymEig:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    The input must be symmetric within 1e-12 relative to its Frobenius
    norm; it is exactly symmetrized before iterating.  Raises
    ConvergenceError if the off-diagonal norm has not dropped below
    1e-14 * ||A||_F after ``max_sweeps`` sweeps.
    """
    a = as_matrix(a, "jacobi_eigh")
    n, m = a.shape
    if n != m:
        raise ValidationError(f"jacobi_eigh: matrix must be square, got {a.shape}")
    norm = float(np.linalg.norm(a))
    if residual_norm(a, a.T) > _SYM_RTOL * max(norm, 1.0):
        raise ValidationError("jacobi_eigh: matrix is not symmetric within tolerance")
    s = (a + a.T) / 2.0
    v = np.eye(n)
    if n == 1 or norm == 0.0:
        return SymEig(np.diag(s).copy(), v)
    target = 1e-14 * norm

    for _ in range(max_sweeps):
        if _offdiag_norm(s) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = s[p, q]
                if apq == 0.0:
                    continue
                theta = (s[q, q] - s[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.hypot(theta, 1.0))
                else:
                    t = 1.0 / (theta - math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                cp = s[:, p].copy()
                cq = s[:, q].copy()
                s[:, p] = c * cp - sn * cq
                s[:, q] = sn * cp + c * cq
                rp = s[p, :].copy()
                rq = s[q, :].copy()
                s[p, :] = c * rp - sn * rq
                s[q, :] = sn * rp + c * rq
                s[p, q] = 0.0
                s[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        if _offdiag_norm(s) > target:
            raise ConvergenceError(f"jacobi_eigh: no convergence after {max_sweeps} sweeps")

    lam = np.diag(s).copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    vecs = v[:, order].copy()
    _fix_signs(vecs)
    return SymEig(lam, vecs)


def spd_deficit(eigenvalues) -> float:
    """0.0 when the ascending eigenvalues certify positive definiteness
    (lambda_min > 1e-12 * lambda_max > 0); otherwise a positive deficit.
    """
    lam_min = float(eigenvalues[0])
    lam_max = float(eigenvalues[-1])
    if lam_max <= 0.0:
        return 1.0 - lam_max
    return max(0.0, SPD_GATE * lam_max - lam_min)


def _spd_decomposition(a, name: str) -> SymEig:
    eig = jacobi_eigh(a)
    lam = eig.eigenvalues
    if spd_deficit(lam) > 0.0:
        raise ValidationError(
            f"{name}: matrix is not positive definite "
            f"(smallest eigenvalue {float(lam[0]):.6e}, largest {float(lam[-1]):.6e})"
        )
    return eig


def spd_sqrt(a) -> np.ndarray:
    """Symmetric square root V diag(sqrt(lambda)) V^T of an SPD matrix."""
    eig = _spd_decomposition(a, "spd_sqrt")
    v = eig.eigenvectors
    r = (v * np.sqrt(eig.eigenvalues)) @ v.T
    return (r + r.T) / 2.0


def spd_inv_sqrt(a) -> np.ndarray:
    """Symmetric inverse square root V diag(1/sqrt(lambda)) V^T."""
    eig = _spd_decomposition(a, "spd_inv_sqrt")
    v = eig.eigenvectors
    r = (v / np.sqrt(eig.eigenvalues)) @ v.T
    return (r + r.T) / 2.0


def inverse(a) -> np.ndarray:
    """Inverse of a square matrix with condition estimate below 1e12."""
    a = as_matrix(a, "inverse")
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"inverse: matrix must be square, got {a.shape}")
    cond = float(np.linalg.cond(a))
    if not math.isfinite(cond) or cond >= COND_LIMIT:
        raise ValidationError(f"inverse: condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}")
    return np.linalg.inv(a)
