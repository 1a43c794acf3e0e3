"""State types, the two-state angle parametrization, purification and
seeded random ensembles.

Random objects are drawn from numpy's ``PCG64`` bit generator seeded through
``SeedSequence``, so every generator below is a pure function of its seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import BadRank, DimensionMismatch, InvalidState, ThetaOutOfRange

STATE_TOL = 1e-10


def rng_for(seed) -> np.random.Generator:
    """PCG64 generator for an integer seed or a tuple of integers."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(seed))))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __init__(self, amplitudes, tol: float = STATE_TOL):
        v = np.asarray(amplitudes, dtype=np.complex128)
        if v.ndim != 1 or v.size < 1:
            raise InvalidState(f"amplitudes must be a non-empty vector, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidState("amplitudes contain NaN or Inf")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > tol:
            raise InvalidState(f"pure state norm is {norm!r}, expected 1 within {tol:.0e}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "PureState") -> complex:
        """<self|other>"""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim} differ")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, op) -> complex:
        """<self|op|self>"""
        v = self.amplitudes
        return complex(np.vdot(v, np.asarray(op) @ v))

    def projector(self) -> np.ndarray:
        v = self.amplitudes
        return np.outer(v, v.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector(), validate=False)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator.

    Construction validates the three invariants unless ``validate=False``
    (used internally for matrices that hold them by construction).
    """

    matrix: np.ndarray

    def __init__(self, matrix, validate: bool = True, tol: float = STATE_TOL):
        m = la.as_matrix(matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise InvalidState(f"density matrix must be square, got shape {m.shape}")
        if validate:
            herm = la.hermiticity_error(m)
            if herm > tol:
                raise InvalidState(f"not Hermitian: max |m - m^dag| = {herm:.3e}")
            tr = np.trace(m).real
            if abs(tr - 1.0) > tol:
                raise InvalidState(f"trace is {tr!r}, expected 1 within {tol:.0e}")
            low = la.eigvalsh(m, tol=tol)[-1]
            if low < -tol:
                raise InvalidState(f"not positive semidefinite: eigenvalue {low:.3e}")
        object.__setattr__(self, "matrix", la.frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self) -> la.HermEig:
        return la.hermitian_eig(self.matrix)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(np.trace(self.matrix @ self.matrix).real - 1.0) <= tol


def mixture(q: float, rho: DensityMatrix, omega: DensityMatrix) -> DensityMatrix:
    """``q*rho + (1-q)*omega``; q=1 and q=0 return the inputs unchanged."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixture weight must lie in [0, 1], got {q}")
    if rho.dim != omega.dim:
        raise DimensionMismatch(f"dims {rho.dim} and {omega.dim} differ")
    if q == 1.0 or rho is omega:
        return rho
    if q == 0.0:
        return omega
    return DensityMatrix(q * rho.matrix + (1.0 - q) * omega.matrix, validate=False)


def as_density(state) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density()
    return DensityMatrix(state)


def basis_state(dim: int, index: int) -> PureState:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return PureState(v)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(la.identity(dim) / dim, validate=False)


@dataclass(frozen=True, eq=False)
class StatePairTheta:
    """``x = cos t|0> + sin t|1>``, ``y = sin t|0> + cos t|1>``."""

    theta: float
    x: PureState
    y: PureState


def make_pair(theta: float, dim: int = 2) -> StatePairTheta:
    """Two states with real overlap ``sin 2*theta``, embedded in ``dim`` dims."""
    if not (0.0 <= 2.0 * theta <= math.pi / 2.0 + 1e-15):
        raise ThetaOutOfRange(f"need 0 <= 2*theta <= pi/2, got theta={theta!r}")
    if dim < 2:
        raise DimensionMismatch("the pair needs at least two dimensions")
    c, s = math.cos(theta), math.sin(theta)
    x = np.zeros(dim, dtype=np.complex128)
    y = np.zeros(dim, dtype=np.complex128)
    x[0], x[1] = c, s
    y[0], y[1] = s, c
    return StatePairTheta(theta, PureState(x), PureState(y))


@dataclass(frozen=True, eq=False)
class Purification:
    state: PureState
    dim_s: int
    dim_q: int

    def reduced(self) -> np.ndarray:
        return la.partial_trace(self.state.projector(), self.dim_s, self.dim_q, keep="S")


def purify(sigma) -> Purification:
    """Schmidt-form purification ``sum_j sqrt(l_j) |a_j> (x) |j>``.

    The ancilla basis is the standard one and the global phase is fixed so the
    first nonzero amplitude is real and positive.
    """
    sigma = as_density(sigma)
    n = sigma.dim
    eig = sigma.eig()
    weights = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    # column j of the coefficient matrix is sqrt(l_j) a_j; flattening
    # row-major gives the amplitudes on S (x) Q
    amps = (eig.eigenvectors * weights).reshape(-1)
    amps /= np.linalg.norm(amps)
    nz = np.flatnonzero(np.abs(amps) > 1e-14)
    if nz.size:
        lead = amps[nz[0]]
        amps *= abs(lead) / lead
        amps[nz[0]] = abs(lead)
    return Purification(PureState(amps), n, n)


def schmidt_coefficients(p: Purification) -> np.ndarray:
    coeffs = p.state.amplitudes.reshape(p.dim_s, p.dim_q)
    return np.linalg.svd(coeffs, compute_uv=False)


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2.0)


def random_unitary(dim: int, seed) -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with R's diagonal phases removed."""
    rng = rng_for(seed)
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_isometry(rows: int, cols: int, seed) -> np.ndarray:
    if rows < cols:
        raise DimensionMismatch(f"an isometry needs rows >= cols, got {rows}x{cols}")
    rng = rng_for(seed)
    q, r = np.linalg.qr(ginibre(rng, rows, cols))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure(dim: int, seed) -> PureState:
    rng = rng_for(seed)
    v = ginibre(rng, dim, 1)[:, 0]
    return PureState(v / np.linalg.norm(v))


def random_density(dim: int, rank: int, seed) -> DensityMatrix:
    """Ginibre ensemble of the given rank: ``G G^dag / tr(G G^dag)``."""
    if not 1 <= rank <= dim:
        raise BadRank(f"rank must satisfy 1 <= rank <= dim={dim}, got {rank}")
    rng = rng_for(seed)
    g = ginibre(rng, dim, rank)
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real, validate=False)


def random_hermitian(dim: int, seed) -> np.ndarray:
    g = ginibre(rng_for(seed), dim, dim)
    return 0.5 * (g + g.conj().T)
