"""Distance measures between quantum states.

The central quantity is the sine distance ``d = sqrt(1 - F)``, where ``F`` is
the Uhlmann fidelity.  The angle ``arccos sqrt(F)`` and the Bures metric
``sqrt(2 - 2 sqrt(F))`` are reported alongside it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, IterationCapTooSmall
from .states import DensityMatrix, PureState, as_density, purify, random_unitary, rng_for

EQUALITY_TOL = 1e-8
# smallest gain the purification search accepts; below it moves are roundoff
_GAIN = 1e-15
_SWEEP_GAIN = 1e-13
# eigenvalues of a state below dim * this * (largest one) count as exact zeros
_RANK_CUTOFF = 4 * np.finfo(float).eps


def _clip01(v: float) -> float:
    return min(1.0, max(0.0, v))


def _check_dims(a, b) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions {a.dim} and {b.dim} differ")


def angle_pure(x: PureState, y: PureState) -> float:
    """``arccos |<x|y>|`` in ``[0, pi/2]``."""
    _check_dims(x, y)
    return math.acos(_clip01(abs(x.overlap(y))))


def sine_pure(x: PureState, y: PureState) -> float:
    # taken straight from the overlap; acos followed by sin loses digits near 0
    _check_dims(x, y)
    ov = abs(x.overlap(y))
    return math.sqrt(_clip01(1.0 - ov * ov))


def _trace_norm(a: np.ndarray) -> float:
    # singular values of `a` are the top half of the spectrum of its
    # Hermitian dilation [[0, a], [a^dag, 0]]
    n = a.shape[0]
    dil = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    dil[:n, n:] = a
    dil[n:, :n] = a.conj().T
    return float(np.sum(la.eigvalsh(dil)[:n]))


def fidelity(sigma, rho, method: Literal["singular", "product"] = "singular") -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(sigma) rho sqrt(sigma)))**2``, clamped to [0, 1].

    ``method="singular"`` (default) evaluates the trace as the sum of singular
    values of ``sqrt(sigma) sqrt(rho)``.  ``method="product"`` sums the square
    roots of the eigenvalues of ``sqrt(sigma) rho sqrt(sigma)``; it loses about
    half the digits when either state is rank deficient.
    """
    sigma = as_density(sigma)
    rho = as_density(rho)
    _check_dims(sigma, rho)
    if sigma is rho or np.array_equal(sigma.matrix, rho.matrix):
        return 1.0
    cutoff = _RANK_CUTOFF * sigma.dim
    rs = la.psd_sqrt(sigma.matrix, rank_cutoff=cutoff)
    if method == "singular":
        s = _trace_norm(rs @ la.psd_sqrt(rho.matrix, rank_cutoff=cutoff))
    elif method == "product":
        prod = rs @ rho.matrix @ rs
        lam = la.eigvalsh(0.5 * (prod + prod.conj().T))
        s = float(np.sum(np.sqrt(np.clip(lam, 0.0, None))))
    else:
        raise ValueError(f"unknown fidelity method {method!r}")
    return _clip01(s * s)


def fidelity_pure_ref(x: PureState, rho) -> float:
    """``<x|rho|x>``, the fidelity between ``|x><x|`` and ``rho``."""
    rho = as_density(rho)
    _check_dims(x, rho)
    return _clip01(x.expectation(rho.matrix).real)


def sine_distance(sigma, rho) -> float:
    return math.sqrt(1.0 - fidelity(sigma, rho))


def angle(sigma, rho) -> float:
    return math.acos(math.sqrt(fidelity(sigma, rho)))


def bures(sigma, rho) -> float:
    return math.sqrt(max(0.0, 2.0 - 2.0 * math.sqrt(fidelity(sigma, rho))))


@dataclass(frozen=True)
class DistanceReport:
    fidelity: float
    sine: float
    angle: float
    bures: float

    @classmethod
    def from_fidelity(cls, f: float) -> "DistanceReport":
        f = _clip01(f)
        root = math.sqrt(f)
        return cls(
            fidelity=f,
            sine=math.sqrt(1.0 - f),
            angle=math.acos(root),
            bures=math.sqrt(max(0.0, 2.0 - 2.0 * root)),
        )


def distance_report(sigma, rho) -> DistanceReport:
    return DistanceReport.from_fidelity(fidelity(sigma, rho))


def states_equal(sigma, rho, tol: float = EQUALITY_TOL) -> bool:
    sigma, rho = as_density(sigma), as_density(rho)
    return sigma.dim == rho.dim and la.max_abs_diff(sigma.matrix, rho.matrix) <= tol


# -- purification search ----------------------------------------------------


@dataclass
class OracleResult:
    value: float
    converged: bool
    sweeps: int
    history: list[float] = field(default_factory=list)


def _ancilla_overlap(xv: np.ndarray, yv: np.ndarray, v: np.ndarray) -> complex:
    n = v.shape[0]
    return complex(np.vdot(xv, np.kron(la.identity(xv.size // n), v) @ yv))


def purification_search(
    sigma,
    rho,
    iterations: int = 3000,
    seed=0,
    restarts: int = 3,
    min_step: float = 1e-8,
) -> OracleResult:
    """Maximise ``|<X|(1 (x) V)|Y>|**2`` over ancilla unitaries ``V``.

    ``X`` and ``Y`` are the fixed purifications from ``purify``; since any two
    purifications of a state differ by a unitary on the ancilla, the maximum
    over ``V`` is the fidelity.  The first restart starts from ``V = 1``,
    later ones from a Haar-random ``V``; each climbs by multiplying it with small Givens rotations, complex plane
    rotations and column phases, halving the step whenever a full sweep over
    those generators brings no improvement.  ``iterations`` caps the total
    number of sweeps over all restarts.
    """
    sigma = as_density(sigma)
    rho = as_density(rho)
    _check_dims(sigma, rho)
    if iterations < 1:
        raise ValueError("iterations must be positive")
    n = sigma.dim
    xv = purify(sigma).state.amplitudes
    yv = purify(rho).state.amplitudes
    # <X|(1 (x) V)|Y> = tr(K) with K = M V^T and M = C_X^dag C_Y, the
    # coefficient matrices of the two purifications
    cx = xv.reshape(n, n)
    cy = yv.reshape(n, n)
    m = cx.conj().T @ cy
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]

    rng = rng_for(seed)
    best, best_w = -1.0, la.identity(n)
    history: list[float] = []
    sweeps = 0
    converged = True
    for r in range(restarts):
        w = random_unitary(n, rng) if r else la.identity(n)
        k = m @ w
        cur = abs(np.trace(k)) ** 2
        step = 0.5
        while step >= min_step and sweeps < iterations:
            sweeps += 1
            start = cur
            c = math.cos(step)
            for ss in (math.sin(step), -math.sin(step)):
                for p, q in pairs:
                    rest = np.trace(k) - k[p, p] - k[q, q]
                    diag = (k[p, p] + k[q, q]) * c
                    for kind, t in (
                        ("rot", rest + diag + (k[p, q] - k[q, p]) * ss),
                        ("irot", rest + diag + 1j * (k[p, q] + k[q, p]) * ss),
                    ):
                        if abs(t) ** 2 <= cur + _GAIN:
                            continue
                        g = la.identity(n)
                        off = -ss if kind == "rot" else 1j * ss
                        g[p, p], g[p, q], g[q, p], g[q, q] = c, off, (ss if kind == "rot" else 1j * ss), c
                        w = w @ g
                        k = m @ w
                        cur = abs(np.trace(k)) ** 2
                        break
                phase = complex(math.cos(step), math.copysign(math.sin(step), ss))
                for p in range(n):
                    t = np.trace(k) + k[p, p] * (phase - 1.0)
                    if abs(t) ** 2 > cur + _GAIN:
                        w[:, p] *= phase
                        k = m @ w
                        cur = abs(np.trace(k)) ** 2
            if cur > best:
                best, best_w = cur, w.copy()
            history.append(best)
            if cur - start <= _SWEEP_GAIN:
                step *= 0.5
        if step >= min_step:
            converged = False
            break
    # (1 (x) V) acting on |Y> corresponds to C_Y V^T, so V = W^T
    value = abs(_ancilla_overlap(xv, yv, best_w.T)) ** 2
    return OracleResult(_clip01(value), converged, sweeps, history)


def fidelity_oracle_purification_search(
    sigma, rho, iterations: int = 3000, seed=0, restarts: int = 3
) -> float:
    """Lower bound on the fidelity from a direct search over purifications.

    Emits ``IterationCapTooSmall`` (a warning) when the sweep budget runs out
    before the step size converges; the best value found is still returned.
    """
    res = purification_search(sigma, rho, iterations=iterations, seed=seed, restarts=restarts)
    if not res.converged:
        warnings.warn(
            f"purification search stopped after {res.sweeps} sweeps before converging",
            IterationCapTooSmall,
            stacklevel=2,
        )
    return res.value
