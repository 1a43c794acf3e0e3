import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from sinedist import linalg as la
from sinedist import states as st
from sinedist.errors import BadRank, InvalidState, ThetaOutOfRange

from conftest import ket, rand_hermitian


def _valid(rho: st.DensityMatrix, tol=1e-10):
    m = rho.matrix
    return (
        la.hermiticity_error(m) <= tol
        and abs(np.trace(m).real - 1) <= tol
        and np.linalg.eigvalsh(m).min() >= -tol
    )


class TestPureState:
    def test_rejects_unnormalised(self):
        with pytest.raises(InvalidState):
            st.PureState([1.0, 1.0])

    def test_rejects_bad_shape(self):
        with pytest.raises(InvalidState):
            st.PureState(np.eye(2))

    def test_immutable(self):
        x = ket(1, 0)
        with pytest.raises(ValueError):
            x.amplitudes[0] = 0

    def test_overlap_and_projector(self):
        x = ket(1, 0)
        y = st.PureState(np.array([1, 1j]) / math.sqrt(2))
        assert abs(x.overlap(y) - 1 / math.sqrt(2)) < 1e-15
        np.testing.assert_allclose(y.projector(), [[0.5, -0.5j], [0.5j, 0.5]], atol=1e-15)


class TestDensityMatrix:
    def test_accepts_valid(self):
        assert st.DensityMatrix(np.diag([0.3, 0.7])).dim == 2

    @pytest.mark.parametrize(
        "m",
        [
            np.array([[0.5, 0.1], [0.0, 0.5]]),  # not Hermitian
            np.diag([0.5, 0.6]),  # trace != 1
            np.diag([1.2, -0.2]),  # negative eigenvalue
        ],
    )
    def test_rejects_invalid(self, m):
        with pytest.raises(InvalidState):
            st.DensityMatrix(m)

    def test_rejects_non_square(self):
        with pytest.raises(InvalidState):
            st.DensityMatrix(np.ones((2, 3)) / 2)

    def test_is_pure(self):
        assert st.basis_state(3, 1).density().is_pure()
        assert not st.maximally_mixed(3).is_pure()

    def test_mixture_endpoints(self):
        a, b = st.random_density(3, 3, 1), st.random_density(3, 2, 2)
        assert st.mixture(1.0, a, b) is a
        assert st.mixture(0.0, a, b) is b
        m = st.mixture(0.25, a, b)
        np.testing.assert_allclose(m.matrix, 0.25 * a.matrix + 0.75 * b.matrix, atol=1e-15)
        with pytest.raises(ValueError):
            st.mixture(1.5, a, b)


class TestMakePair:
    def test_orthogonal_endpoint(self):
        p = st.make_pair(0.0)
        assert abs(p.x.overlap(p.y)) == 0.0

    def test_identical_endpoint(self):
        p = st.make_pair(math.pi / 4)
        assert abs(abs(p.x.overlap(p.y)) - 1.0) < 1e-15

    def test_pi_over_8(self):
        p = st.make_pair(math.pi / 8)
        assert abs(abs(p.x.overlap(p.y)) - math.sin(math.pi / 4)) < 1e-15
        np.testing.assert_allclose(p.x.amplitudes, [math.cos(math.pi / 8), math.sin(math.pi / 8)])

    def test_embedding(self):
        p = st.make_pair(0.3, dim=5)
        assert p.x.dim == 5
        assert np.all(p.x.amplitudes[2:] == 0)

    @pytest.mark.parametrize("theta", [-0.1, math.pi / 4 + 1e-6, 2.0])
    def test_out_of_range(self, theta):
        with pytest.raises(ThetaOutOfRange):
            st.make_pair(theta)

    def test_expectation_difference_identity(self, rng):
        # <x|L|x> - <y|L|y> = (L00 - L11) cos 2t for every Hermitian L
        for _ in range(100):
            theta = rng.uniform(0, math.pi / 4)
            dim = int(rng.integers(2, 6))
            p = st.make_pair(theta, dim)
            op = rand_hermitian(rng, dim)
            lhs = p.x.expectation(op) - p.y.expectation(op)
            rhs = (op[0, 0] - op[1, 1]) * math.cos(2 * theta)
            assert abs(lhs - rhs) <= 1e-10


class TestPurify:
    def test_pure_input(self):
        x = st.random_pure(3, 7)
        pur = st.purify(x.density())
        target = np.kron(x.amplitudes, np.eye(3)[0])
        assert abs(abs(np.vdot(target, pur.state.amplitudes)) - 1.0) < 1e-12

    def test_maximally_mixed(self):
        pur = st.purify(st.maximally_mixed(2))
        np.testing.assert_allclose(st.schmidt_coefficients(pur), [1 / math.sqrt(2)] * 2, atol=1e-15)

    def test_diagonal(self):
        pur = st.purify(st.DensityMatrix(np.diag([0.9, 0.1])))
        np.testing.assert_allclose(st.schmidt_coefficients(pur), [math.sqrt(0.9), math.sqrt(0.1)], atol=1e-15)

    def test_phase_convention(self):
        amps = st.purify(st.random_density(4, 3, 5)).state.amplitudes
        lead = amps[np.flatnonzero(np.abs(amps) > 1e-14)[0]]
        assert lead.imag == 0.0 and lead.real > 0

    def test_round_trip(self):
        for k in range(200):
            dim = 2 + k % 7
            sigma = st.random_density(dim, 1 + k % dim, (7, k))
            pur = st.purify(sigma)
            assert la.max_abs_diff(pur.reduced(), sigma.matrix) <= 1e-9

    def test_deterministic(self):
        sigma = st.random_density(4, 4, 11)
        a = st.purify(sigma).state.amplitudes
        b = st.purify(sigma).state.amplitudes
        assert np.array_equal(a, b)


class TestRandom:
    def test_rank_one_is_pure(self):
        rho = st.random_density(2, 1, 3)
        assert abs(rho.eig().eigenvalues[0] - 1.0) < 1e-12

    def test_full_rank(self):
        rho = st.random_density(4, 4, 3)
        assert _valid(rho)
        assert rho.eig().eigenvalues[-1] > 0

    @pytest.mark.parametrize("rank", [0, 5])
    def test_bad_rank(self, rank):
        with pytest.raises(BadRank):
            st.random_density(4, rank, 0)

    def test_same_seed_bit_identical(self):
        assert np.array_equal(st.random_density(5, 3, 42).matrix, st.random_density(5, 3, 42).matrix)
        assert np.array_equal(st.random_unitary(4, (1, 2)), st.random_unitary(4, (1, 2)))
        assert np.array_equal(st.random_pure(4, 9).amplitudes, st.random_pure(4, 9).amplitudes)

    def test_pcg64_stream(self):
        # the generator is PCG64 seeded through SeedSequence
        expected = np.random.Generator(np.random.PCG64(np.random.SeedSequence(123))).standard_normal(4)
        np.testing.assert_array_equal(st.rng_for(123).standard_normal(4), expected)

    def test_unitary(self):
        for s in range(20):
            u = st.random_unitary(1 + s % 6, s)
            assert la.max_abs_diff(u.conj().T @ u, np.eye(u.shape[0])) <= 1e-10

    def test_isometry(self):
        w = st.random_isometry(6, 3, 0)
        assert la.max_abs_diff(w.conj().T @ w, np.eye(3)) <= 1e-12

    def test_pure_norm(self):
        for s in range(20):
            assert abs(np.linalg.norm(st.random_pure(5, s).amplitudes) - 1.0) <= 1e-10

    def test_distinct_seeds_distinct_states(self):
        for s in range(100):
            x, y = st.random_pure(3, 2 * s), st.random_pure(3, 2 * s + 1)
            assert abs(x.overlap(y)) < 1 - 1e-6


@settings(max_examples=50, deadline=None)
@given(hst.integers(2, 8), hst.integers(0, 2**32 - 1), hst.data())
def test_random_density_invariants(dim, seed, data):
    rank = data.draw(hst.integers(1, dim))
    assert _valid(st.random_density(dim, rank, seed))
