"""Quantum operations in operator-sum form and POVM measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import (
    DegeneratePair,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidChannel,
    InvalidPovm,
)
from .states import DensityMatrix, StatePairTheta, as_density

CHANNEL_TOL = 1e-9
POVM_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """``sigma -> sum_mu E_mu sigma E_mu^dag`` with ``sum E^dag E <= 1``.

    The effect-operator bound is enforced at construction, so an invalid
    channel never exists.  ``trace_preserving=True`` additionally demands
    ``sum E^dag E = 1``.
    """

    operators: tuple
    trace_preserving: bool = False

    def __init__(self, operators: Sequence, trace_preserving: bool = False, tol: float = CHANNEL_TOL):
        ops = [la.as_matrix(e, "Kraus operator") for e in operators]
        if not ops:
            raise InvalidChannel("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        for e in ops:
            if e.shape != shape:
                raise DimensionMismatch(f"Kraus operators have shapes {shape} and {e.shape}")
        t = sum(e.conj().T @ e for e in ops)
        lam = la.eigvalsh(0.5 * (t + t.conj().T))
        if lam[0] > 1.0 + tol:
            raise InvalidChannel(
                f"effect operator sum(E^dag E) has eigenvalue {lam[0]:.6g} > 1; "
                "the Kraus set is not trace non-increasing"
            )
        if trace_preserving:
            dev = la.max_abs_diff(t, la.identity(shape[1]))
            if dev > tol:
                raise InvalidChannel(
                    f"trace-preserving channel needs sum(E^dag E) = 1, off by {dev:.3e}"
                )
        object.__setattr__(self, "operators", tuple(la.frozen(e) for e in ops))
        object.__setattr__(self, "trace_preserving", bool(trace_preserving))

    @property
    def dim_in(self) -> int:
        return self.operators[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def effect(self) -> np.ndarray:
        """``T = sum_mu E_mu^dag E_mu``."""
        return sum(e.conj().T @ e for e in self.operators)

    def branch_effects(self) -> list[np.ndarray]:
        return [e.conj().T @ e for e in self.operators]


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([la.identity(dim)], trace_preserving=True)


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([u], trace_preserving=True)


def _input(ch: KrausChannel, sigma) -> DensityMatrix:
    sigma = as_density(sigma)
    if sigma.dim != ch.dim_in:
        raise DimensionMismatch(f"channel input dim {ch.dim_in} but state dim {sigma.dim}")
    return sigma


def apply(ch: KrausChannel, sigma) -> np.ndarray:
    """Unnormalised output ``E(sigma)``; its trace is the success probability."""
    s = _input(ch, sigma).matrix
    out = sum(e @ s @ e.conj().T for e in ch.operators)
    return 0.5 * (out + out.conj().T)


def output_state(ch: KrausChannel, sigma) -> DensityMatrix:
    """Normalised output ``E(sigma) / tr E(sigma)``."""
    out = apply(ch, sigma)
    p = np.trace(out).real
    if p <= 0.0:
        raise ValueError("operation has zero success probability on this input")
    return DensityMatrix(out / p, validate=False)


def success_prob(ch: KrausChannel, sigma) -> float:
    return float(np.trace(apply(ch, sigma)).real)


def success_prob_effect(ch: KrausChannel, sigma) -> float:
    """Same probability computed as ``tr(T sigma)``."""
    s = _input(ch, sigma).matrix
    return float(np.trace(ch.effect() @ s).real)


def branch(ch: KrausChannel, index: int) -> KrausChannel:
    """The single-operator (ideal) operation ``sigma -> E_nu sigma E_nu^dag``."""
    if not 0 <= index < len(ch.operators):
        raise IndexOutOfRange(f"branch index {index} outside 0..{len(ch.operators) - 1}")
    e = ch.operators[index]
    tp = ch.trace_preserving and len(ch.operators) == 1
    return KrausChannel([e], trace_preserving=tp)


def branch_probs(ch: KrausChannel, sigma) -> np.ndarray:
    return np.array([success_prob(branch(ch, i), sigma) for i in range(len(ch))])


def extend(ch: KrausChannel, dim_q: int) -> KrausChannel:
    """Operators ``E_mu (x) 1_Q``, acting on ``S (x) Q``."""
    if dim_q < 1:
        raise DimensionMismatch("ancilla dimension must be positive")
    eye = la.identity(dim_q)
    return KrausChannel([la.kron(e, eye) for e in ch.operators], trace_preserving=ch.trace_preserving)


@dataclass(frozen=True, eq=False)
class Povm:
    elements: tuple

    def __init__(self, elements: Sequence, tol: float = CHANNEL_TOL):
        els = [la.as_matrix(a, "POVM element") for a in elements]
        if not els:
            raise InvalidPovm("a POVM needs at least one element")
        n = els[0].shape[0]
        for i, a in enumerate(els):
            if a.shape != (n, n):
                raise InvalidPovm(f"element {i} has shape {a.shape}, expected {(n, n)}")
            herm = la.hermiticity_error(a)
            if herm > tol:
                raise InvalidPovm(f"element {i} is not Hermitian (max |A - A^dag| = {herm:.3e})")
            low = la.eigvalsh(a, tol=tol)[-1]
            if low < -POVM_CLAMP:
                raise InvalidPovm(f"element {i} is not positive (eigenvalue {low:.3e})")
        dev = la.max_abs_diff(sum(els), la.identity(n))
        if dev > tol:
            raise InvalidPovm(f"elements do not sum to the identity (off by {dev:.3e})")
        object.__setattr__(self, "elements", tuple(la.frozen(a) for a in els))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)


def projective_povm(basis) -> Povm:
    """Rank-one projectors onto the columns of a unitary."""
    u = la.as_matrix(basis)
    return Povm([np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])])


def povm_probs(povm: Povm, sigma) -> np.ndarray:
    """``p_mu = tr(sigma A_mu)``."""
    sigma = as_density(sigma)
    if sigma.dim != povm.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} but state dim {sigma.dim}")
    s = sigma.matrix
    return np.array([np.trace(s @ a).real for a in povm.elements])


def povm_to_channel(povm: Povm) -> KrausChannel:
    """Kraus operators ``sqrt(A_mu)``; trace preserving because the elements sum to 1."""
    return KrausChannel(
        [la.psd_sqrt(a, clamp_tol=POVM_CLAMP) for a in povm.elements], trace_preserving=True
    )


def _require_distinct(pair: StatePairTheta) -> None:
    if abs(math.cos(2.0 * pair.theta)) <= 1e-15:
        raise DegeneratePair("theta = pi/4 makes the two states identical")


def saturating_operation_single(pair: StatePairTheta, which: int = 0) -> KrausChannel:
    """Single Kraus operator ``|which><which|`` (``which`` is 0 or 1).

    Its effect operator is the projector onto the corresponding basis ket of
    the pair's parametrization, which turns the single-operation probability
    bound into an equality.
    """
    _require_distinct(pair)
    if which not in (0, 1):
        raise ValueError("which must be 0 or 1")
    n = pair.x.dim
    e = np.zeros((n, n), dtype=np.complex128)
    e[which, which] = 1.0
    return KrausChannel([e])


def saturating_operation_sum(pair: StatePairTheta) -> KrausChannel:
    """Two operators ``|0><0|`` and ``|1><1|``; saturates the branch-sum bound."""
    _require_distinct(pair)
    n = pair.x.dim
    e0 = np.zeros((n, n), dtype=np.complex128)
    e1 = np.zeros((n, n), dtype=np.complex128)
    e0[0, 0] = 1.0
    e1[1, 1] = 1.0
    return KrausChannel([e0, e1], trace_preserving=(n == 2))


# -- random constructions -----------------------------------------------------


def random_channel(dim_in: int, seed, dim_out: int | None = None, n_ops: int | None = None) -> KrausChannel:
    """Random trace non-increasing operation.

    ``n_ops`` defaults to a uniform draw from ``1..dim_in**2``.  The operators
    are rescaled so the largest eigenvalue of the effect operator is either
    exactly 1 (half the draws, the boundary case) or uniform in ``(0, 1)``.
    """
    from .states import ginibre, rng_for

    rng = rng_for(seed)
    dim_out = dim_in if dim_out is None else dim_out
    k = int(rng.integers(1, dim_in * dim_in + 1)) if n_ops is None else n_ops
    ops = [ginibre(rng, dim_out, dim_in) for _ in range(k)]
    top = la.eigvalsh(sum(e.conj().T @ e for e in ops))[0]
    target = 1.0 if rng.random() < 0.5 else rng.uniform(1e-3, 1.0)
    scale = math.sqrt(target / top) * (1.0 - 1e-12)
    return KrausChannel([scale * e for e in ops])


def random_tp_channel(dim_in: int, seed, dim_out: int | None = None, n_ops: int | None = None) -> KrausChannel:
    """Random trace-preserving operation sliced from a Haar isometry."""
    from .states import random_isometry, rng_for

    rng = rng_for(seed)
    dim_out = dim_in if dim_out is None else dim_out
    least = -(-dim_in // dim_out)
    k = int(rng.integers(least, max(least, dim_in * dim_in) + 1)) if n_ops is None else max(n_ops, least)
    w = random_isometry(k * dim_out, dim_in, rng)
    return KrausChannel([w[i * dim_out:(i + 1) * dim_out] for i in range(k)], trace_preserving=True)


def random_povm(dim: int, seed, n_outcomes: int | None = None) -> Povm:
    """``A_mu = S^{-1/2} B_mu S^{-1/2}`` for random positive ``B_mu`` with sum ``S``."""
    from .states import ginibre, rng_for

    rng = rng_for(seed)
    m = int(rng.integers(2, 2 * dim + 1)) if n_outcomes is None else n_outcomes
    ranks = [int(r) for r in rng.integers(1, dim + 1, size=m)]
    # the sum must be invertible, so the ranks have to cover the space
    while sum(ranks) < dim:
        i = int(rng.integers(0, m))
        ranks[i] = min(dim, ranks[i] + 1)
    bs = []
    for r in ranks:
        g = ginibre(rng, dim, r)
        bs.append(g @ g.conj().T)
    eig = la.hermitian_eig(sum(bs))
    v = eig.eigenvectors
    inv_root = (v / np.sqrt(eig.eigenvalues)) @ v.conj().T
    els = []
    for b in bs:
        a = inv_root @ b @ inv_root
        els.append(0.5 * (a + a.conj().T))
    return Povm(els)
