import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as hst

from sinedist import metrics as mt
from sinedist import states as st
from sinedist.errors import DimensionMismatch, IterationCapTooSmall

from conftest import ket

ZERO = st.basis_state(2, 0).density()
ONE = st.basis_state(2, 1).density()
HALF = st.maximally_mixed(2)

# (tr sqrt(sqrt(s) r sqrt(s)))^2 evaluated with mpmath at 40 digits
SIGMA_A = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]])
RHO_A = np.array([[0.4, -0.1j], [0.1j, 0.6]])
FIDELITY_A = 0.823666521865017516
SIGMA_B = np.array([[0.5, 0.1, 0], [0.1, 0.3, 0.05j], [0, -0.05j, 0.2]])
RHO_B = np.diag([0.2, 0.3, 0.5])
FIDELITY_B = 0.853437927670364691


def scipy_fidelity(s, r):
    rs = scipy.linalg.sqrtm(s)
    return float(np.real(np.trace(scipy.linalg.sqrtm(rs @ r @ rs))) ** 2)


class TestPureMeasures:
    def test_angle(self):
        x = ket(1, 0)
        assert mt.angle_pure(x, x) == 0.0
        assert mt.angle_pure(x, ket(0, 1)) == pytest.approx(math.pi / 2, abs=1e-15)
        p = st.make_pair(math.pi / 8)
        assert mt.angle_pure(p.x, p.y) == pytest.approx(math.pi / 4, abs=1e-15)

    def test_sine(self):
        x = ket(1, 0)
        assert mt.sine_pure(x, x) == 0.0
        assert mt.sine_pure(x, ket(0, 1)) == 1.0
        p = st.make_pair(math.pi / 8)
        assert mt.sine_pure(p.x, p.y) == pytest.approx(math.cos(math.pi / 4), abs=1e-15)

    def test_sine_is_cos_two_theta(self):
        for theta in np.linspace(0, math.pi / 4, 33):
            p = st.make_pair(theta)
            assert abs(mt.sine_pure(p.x, p.y) - math.cos(2 * theta)) <= 1e-12

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mt.sine_pure(ket(1, 0), ket(1, 0, 0))


class TestFidelity:
    def test_identical(self):
        rho = st.random_density(4, 3, 1)
        assert mt.fidelity(rho, rho) == 1.0

    def test_orthogonal(self):
        assert mt.fidelity(ZERO, ONE) == 0.0

    def test_commuting_case(self):
        assert abs(mt.fidelity(HALF, ZERO) - 0.5) <= 1e-15

    def test_high_precision_values(self):
        assert abs(mt.fidelity(SIGMA_A, RHO_A) - FIDELITY_A) <= 1e-13
        assert abs(mt.fidelity(SIGMA_B, RHO_B) - FIDELITY_B) <= 1e-13

    def test_matches_scipy(self):
        for k in range(50):
            dim = 2 + k % 5
            s, r = st.random_density(dim, dim, (1, k)), st.random_density(dim, dim, (2, k))
            assert abs(mt.fidelity(s, r) - scipy_fidelity(s.matrix, r.matrix)) <= 1e-10

    def test_product_method_agrees(self):
        for k in range(50):
            dim = 2 + k % 5
            s, r = st.random_density(dim, dim, (3, k)), st.random_density(dim, dim, (4, k))
            assert abs(mt.fidelity(s, r) - mt.fidelity(s, r, method="product")) <= 1e-9
        with pytest.raises(ValueError):
            mt.fidelity(HALF, ZERO, method="nope")

    def test_pure_pure_consistency(self):
        for k in range(100):
            dim = 2 + k % 5
            x, y = st.random_pure(dim, (5, k)), st.random_pure(dim, (6, k))
            assert abs(mt.fidelity(x, y) - abs(x.overlap(y)) ** 2) <= 1e-9
            assert abs(mt.sine_distance(x, y) - mt.sine_pure(x, y)) <= 1e-8

    def test_pure_reference(self):
        x = ket(1, 0)
        assert mt.fidelity_pure_ref(x, x.density()) == pytest.approx(1.0, abs=1e-15)
        assert mt.fidelity_pure_ref(x, HALF) == pytest.approx(0.5, abs=1e-15)
        assert mt.fidelity_pure_ref(x, st.DensityMatrix(np.diag([0.3, 0.7]))) == pytest.approx(0.3, abs=1e-15)
        for k in range(30):
            dim = 2 + k % 4
            y, rho = st.random_pure(dim, (7, k)), st.random_density(dim, 1 + k % dim, (8, k))
            assert abs(mt.fidelity_pure_ref(y, rho) - mt.fidelity(y, rho)) <= 1e-9

    def test_unitary_invariance(self):
        for k in range(20):
            s, r = st.random_density(4, 2, (9, k)), st.random_density(4, 4, (10, k))
            u = st.random_unitary(4, (11, k))
            su = st.DensityMatrix(u @ s.matrix @ u.conj().T, validate=False)
            ru = st.DensityMatrix(u @ r.matrix @ u.conj().T, validate=False)
            assert abs(mt.fidelity(s, r) - mt.fidelity(su, ru)) <= 1e-10

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mt.fidelity(HALF, st.maximally_mixed(3))


class TestDistances:
    def test_sine_examples(self):
        assert mt.sine_distance(HALF, HALF) == 0.0
        assert mt.sine_distance(ZERO, ONE) == 1.0
        assert abs(mt.sine_distance(HALF, ZERO) - math.sqrt(0.5)) <= 1e-12

    def test_report_identical(self):
        assert mt.distance_report(HALF, HALF) == mt.DistanceReport(1.0, 0.0, 0.0, 0.0)

    def test_report_orthogonal(self):
        rep = mt.distance_report(ZERO, ONE)
        assert (rep.fidelity, rep.sine) == (0.0, 1.0)
        assert rep.angle == pytest.approx(math.pi / 2, abs=1e-15)
        assert rep.bures == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_report_half(self):
        rep = mt.distance_report(HALF, ZERO)
        assert abs(rep.fidelity - 0.5) <= 1e-12
        assert abs(rep.sine - math.sqrt(0.5)) <= 1e-12
        assert abs(rep.angle - math.pi / 4) <= 1e-12
        assert abs(rep.bures - math.sqrt(2 - math.sqrt(2))) <= 1e-12

    def test_individual_functions_match_report(self):
        s, r = st.random_density(3, 3, 1), st.random_density(3, 2, 2)
        rep = mt.distance_report(s, r)
        assert rep.sine == mt.sine_distance(s, r)
        assert rep.angle == mt.angle(s, r)
        assert rep.bures == mt.bures(s, r)

    def test_from_fidelity_clamps(self):
        rep = mt.DistanceReport.from_fidelity(1.0 + 1e-15)
        assert rep.fidelity == 1.0 and rep.sine == 0.0

    def test_identity_of_indiscernibles(self):
        for k in range(50):
            dim = 2 + k % 5
            s = st.random_density(dim, dim, (12, k))
            far = st.random_density(dim, dim, (13, k))
            assert mt.sine_distance(s, far) > 1e-7
            assert not mt.states_equal(s, far, tol=1e-5)
            # support-preserving perturbation of size 1e-10
            h = st.random_hermitian(dim, (14, k))
            h -= np.trace(h) / dim * np.eye(dim)
            near = st.DensityMatrix(s.matrix + 1e-10 * h / np.abs(h).max())
            assert mt.sine_distance(s, near) <= 1e-7
            assert mt.states_equal(s, near, tol=1e-5)

    def test_states_equal(self):
        assert mt.states_equal(HALF, st.DensityMatrix(np.eye(2) / 2))
        assert not mt.states_equal(HALF, ZERO)
        assert not mt.states_equal(HALF, st.maximally_mixed(3))


class TestOracle:
    def test_identical_pure(self):
        x = st.random_pure(3, 1).density()
        assert abs(mt.fidelity_oracle_purification_search(x, x) - 1.0) <= 1e-9

    def test_half_vs_zero(self):
        assert abs(mt.fidelity_oracle_purification_search(HALF, ZERO) - 0.5) <= 1e-6

    def test_agrees_with_closed_form(self):
        for k in range(6):
            dim = 2 + k % 3
            s, r = st.random_density(dim, dim, (15, k)), st.random_density(dim, 1 + k % dim, (16, k))
            assert abs(mt.fidelity_oracle_purification_search(s, r, seed=k) - mt.fidelity(s, r)) <= 1e-6

    def test_never_exceeds_fidelity(self):
        for k in range(5):
            s, r = st.random_density(3, 3, (17, k)), st.random_density(3, 3, (18, k))
            res = mt.purification_search(s, r, seed=k)
            f = mt.fidelity(s, r)
            assert res.converged
            assert max(res.history) <= f + 1e-9
            assert all(b >= a for a, b in zip(res.history, res.history[1:]))

    def test_iteration_cap_warns(self):
        s, r = st.random_density(3, 3, 1), st.random_density(3, 3, 2)
        with pytest.warns(IterationCapTooSmall):
            value = mt.fidelity_oracle_purification_search(s, r, iterations=2)
        assert 0.0 <= value <= mt.fidelity(s, r) + 1e-9

    def test_converged_run_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            mt.fidelity_oracle_purification_search(HALF, ZERO)

    def test_deterministic(self):
        s, r = st.random_density(3, 3, 3), st.random_density(3, 3, 4)
        assert mt.purification_search(s, r, seed=5).value == mt.purification_search(s, r, seed=5).value

    def test_bad_iterations(self):
        with pytest.raises(ValueError):
            mt.purification_search(HALF, ZERO, iterations=0)


@settings(max_examples=80, deadline=None)
@given(hst.integers(2, 6), hst.integers(0, 2**32 - 1), hst.floats(0, 1))
def test_metric_properties(dim, seed, q):
    s, r, w = (st.random_density(dim, 1 + (seed >> k) % dim, (seed, k)) for k in range(3))
    d_sr, d_rs = mt.sine_distance(s, r), mt.sine_distance(r, s)
    d_sw, d_rw = mt.sine_distance(s, w), mt.sine_distance(r, w)
    assert 0.0 <= d_sr <= 1.0
    assert abs(d_sr - d_rs) <= 1e-10
    assert d_sr <= d_sw + d_rw + 1e-8
    mix = st.mixture(q, r, w)
    assert mt.sine_distance(s, mix) ** 2 <= q * d_sr**2 + (1 - q) * d_sw**2 + 1e-8
    f_mix = mt.fidelity(s, mix)
    assert f_mix >= q * mt.fidelity(s, r) + (1 - q) * mt.fidelity(s, w) - 1e-8


@settings(max_examples=60, deadline=None)
@given(hst.integers(2, 6), hst.integers(0, 2**32 - 1), hst.floats(0, 1))
def test_pure_reference_properties(dim, seed, q):
    x = st.random_pure(dim, (seed, 0)).density()
    r, w = st.random_density(dim, dim, (seed, 1)), st.random_density(dim, 1, (seed, 2))
    mix = st.mixture(q, r, w)
    f_r, f_w, f_m = mt.fidelity(x, r), mt.fidelity(x, w), mt.fidelity(x, mix)
    assert abs(f_m - q * f_r - (1 - q) * f_w) <= 1e-9
    d = [math.sqrt(1 - f) for f in (f_r, f_w, f_m)]
    assert d[2] >= q * d[0] + (1 - q) * d[1] - 1e-8
