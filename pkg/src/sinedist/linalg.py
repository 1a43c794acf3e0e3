"""Dense complex linear algebra.

Everything here works on plain ``numpy`` complex arrays.  The Hermitian
eigensolver is a cyclic Jacobi method compiled with numba; every other
quantity in the package (matrix square roots, fidelities, validation of
states and channels) is built on top of it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numba import njit

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DimensionOverflow,
    NonFiniteEntries,
    NotHermitian,
    NotPositive,
    NotSquare,
)

EIG_TOL = 1e-10
CMP_TOL = 1e-9
CLAMP_TOL = 1e-10
EIG_MAX_DIM = 64
KRON_MAX_DIM = 4096
MAX_SWEEPS = 60


@dataclass(frozen=True)
class HermEig:
    """Eigenvalues sorted descending; eigenvectors are the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex128 array with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntries(f"{name} contains NaN or Inf entries")
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def adjoint(m) -> np.ndarray:
    return np.asarray(m).conj().T


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def max_abs_diff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@njit(cache=True)
def _jacobi(a, v, max_sweeps):
    # In-place cyclic Jacobi on a Hermitian matrix `a`; rotations accumulate
    # into `v`.  Returns the number of sweeps used, or -1 on failure.
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        diag = 0.0
        for p in range(n):
            diag += a[p, p].real * a[p, p].real
            for q in range(p + 1, n):
                off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if off == 0.0 or np.sqrt(2.0 * off) <= 1e-16 * np.sqrt(diag + 2.0 * off):
            return sweep
        if sweep == max_sweeps:
            return -1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # skip rotations that cannot change the diagonal in floating point
                if sweep > 3 and abs(app) + 1e3 * g == abs(app) and abs(aqq) + 1e3 * g == abs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                ph = apq / g
                phc = ph.conjugate()
                theta = (aqq - app) / (2.0 * g)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # columns: A <- A U, U = diag(1, conj(ph)) @ [[c, s], [-s, c]]
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
                # rows: A <- U^dag A
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return -1


def hermitian_eig(m, tol: float = EIG_TOL) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises ``NotSquare``, ``NotHermitian`` when the largest entry of
    ``m - m^dag`` exceeds ``tol``, ``DimensionOverflow`` above
    ``EIG_MAX_DIM`` and ``ConvergenceFailure`` if the sweep cap is hit.
    """
    a = as_matrix(m)
    n, k = a.shape
    if n != k:
        raise NotSquare(f"expected a square matrix, got shape {a.shape}")
    if n > EIG_MAX_DIM:
        raise DimensionOverflow(f"eigensolver dimension cap is {EIG_MAX_DIM}, got {n}")
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitian(f"max |m - m^dag| = {err:.3e} exceeds tolerance {tol:.1e}")
    work = 0.5 * (a + a.conj().T)
    vecs = identity(n)
    if _jacobi(work, vecs, MAX_SWEEPS) < 0:
        raise ConvergenceFailure(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    vals = np.real(np.diag(work)).copy()
    order = np.argsort(-vals, kind="stable")
    return HermEig(vals[order], vecs[:, order])


def eigvalsh(m, tol: float = EIG_TOL) -> np.ndarray:
    return hermitian_eig(m, tol).eigenvalues


def psd_sqrt(
    m, clamp_tol: float = CLAMP_TOL, tol: float = EIG_TOL, rank_cutoff: float = 0.0
) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-clamp_tol, 0)`` are treated as roundoff and set to
    zero; anything more negative raises ``NotPositive``.  With
    ``rank_cutoff > 0``, eigenvalues up to ``rank_cutoff * max eigenvalue``
    are zeroed too, so roundoff in the kernel of a rank-deficient matrix does
    not turn into ``sqrt(eps)``-sized entries of the root.
    """
    eig = hermitian_eig(m, tol)
    lam = eig.eigenvalues
    if lam[-1] < -clamp_tol:
        raise NotPositive(f"eigenvalue {lam[-1]:.3e} is below -{clamp_tol:.1e}")
    lam = np.clip(lam, 0.0, None)
    if rank_cutoff > 0.0:
        lam = np.where(lam <= rank_cutoff * lam[0], 0.0, lam)
    v = eig.eigenvectors
    root = (v * np.sqrt(lam)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def kron(a, b, max_dim: int = KRON_MAX_DIM) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise DimensionOverflow(f"kron result {rows}x{cols} exceeds cap {max_dim}")
    return np.kron(a, b)


def partial_trace(
    m, dim_s: int, dim_q: int, keep: Literal["S", "Q"] = "S"
) -> np.ndarray:
    """Trace out one factor of an operator on ``S (x) Q``.

    ``keep="S"`` discards Q (the usual reduction of a purification),
    ``keep="Q"`` discards S.
    """
    a = as_matrix(m)
    if dim_s < 1 or dim_q < 1:
        raise DimensionMismatch("subsystem dimensions must be positive")
    if a.shape != (dim_s * dim_q, dim_s * dim_q):
        raise DimensionMismatch(
            f"operator of shape {a.shape} does not act on a {dim_s}x{dim_q} product space"
        )
    t = a.reshape(dim_s, dim_q, dim_s, dim_q)
    if keep == "S":
        return np.einsum("iaja->ij", t)
    if keep == "Q":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'S' or 'Q', got {keep!r}")


def trace(m) -> complex:
    return complex(np.trace(np.asarray(m)))


def is_effect(t, tol: float = CMP_TOL) -> bool:
    """True when ``0 <= t <= 1`` holds as an operator inequality within ``tol``."""
    lam = eigvalsh(t, tol=max(tol, EIG_TOL))
    return bool(lam[-1] >= -tol and lam[0] <= 1.0 + tol)
