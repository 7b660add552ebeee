import numpy as np
import pytest
from hypothesis import given, strategies as st

import levmirror as lm
from levmirror.spectra import TransferData, commutator_defect

from conftest import random_stable_points
from oracles import one_port_reflection

P = np.eye(4)[[1, 0, 3, 2]]  # swaps (b, b^+) and (a, a^+)

omegas = st.floats(1e-2, 1e10)


def test_decoupled_transfer_at_zero_frequency():
    OM, D, k, G = 20.0, -3e6, 1.35e7, 1e4
    A = lm.drift_matrix(OM, 0.0, D, k, G)
    T = lm.transfer_matrix(A, 0.0).T_plus
    expected = np.diag([1 / (G / 2 + 1j * OM), 1 / (G / 2 - 1j * OM),
                        1 / (k / 2 + 1j * D), 1 / (k / 2 - 1j * D)])
    np.testing.assert_allclose(T, expected, rtol=1e-14, atol=0)


def test_inverse_residual(blue, rng):
    w = np.exp(rng.uniform(np.log(1e-1), np.log(1e10), 100))
    data = lm.transfer_matrix(blue.A, w)
    eye = np.eye(4)
    for sign, T in ((1, data.T_plus), (-1, data.T_minus)):
        M = -1j * sign * w[:, None, None] * eye - blue.A
        res = np.linalg.norm(M @ T - eye, ord=np.inf, axis=(1, 2))
        norm_M = np.linalg.norm(M, ord=np.inf, axis=(1, 2))
        norm_T = np.linalg.norm(T, ord=np.inf, axis=(1, 2))
        assert np.all(res < 1e-12 * norm_M * norm_T)
    assert data.residual < 1e-14


@given(omegas)
def test_negative_frequency_is_conjugate_swap(w):
    A = lm.linearize(lm.SystemParams.reference()).A
    data = lm.transfer_matrix(A, w)
    np.testing.assert_allclose(data.T_minus, P @ data.T_plus.conj() @ P,
                               rtol=1e-9, atol=1e-9 * np.abs(data.T_plus).max())


def test_scalar_and_vector_paths_agree(blue):
    w = np.array([1.0, 2.2e5, 1e8])
    vec = lm.transfer_matrix(blue.A, w)
    for n, x in enumerate(w):
        one = lm.transfer_matrix(blue.A, x)
        np.testing.assert_array_equal(one.T_plus, vec.T_plus[n])
        assert one.omega == x


def test_extended_precision_agrees(blue):
    w = 2.2e5
    f = lm.transfer_matrix(blue.A, w)
    h = lm.transfer_matrix(blue.A, w, dps=30)
    Th = np.array(h.T_plus.tolist(), dtype=complex)
    np.testing.assert_allclose(Th, f.T_plus, rtol=1e-8, atol=1e-8 * np.abs(Th).max())
    assert h.residual < 1e-25
    with pytest.raises(ValueError):
        lm.transfer_matrix(blue.A, [1.0, 2.0], dps=30)


def test_singular_frequency_reported():
    # undamped uncoupled mirror: pole at omega = -Omega_M
    A = lm.drift_matrix(20.0, 0.0, 1e6, 1e6, 0.0)
    with pytest.raises(lm.NumericalError) as info:
        lm.transfer_matrix(A, np.array([5.0, 20.0, 40.0]))
    assert abs(info.value.omega) == 20.0
    with pytest.raises(lm.NumericalError):
        lm.transfer_matrix(A, 20.0, dps=20)


class TestIOCoefficients:
    def test_decoupled_has_no_cross_terms(self):
        A = lm.drift_matrix(20.0, 0.0, -5e6, 1.35e7, 1e4)
        co = lm.io_coefficients(lm.transfer_matrix(A, np.geomspace(1, 1e9, 50)), 1.35e7, 1e4)
        for s in (1, -1):
            for f in (1, -1):
                assert np.all(co.get("B", "a", s, f) == 0)
                assert np.all(co.get("A", "b", s, f) == 0)

    @given(st.floats(-1e8, 1e8), st.floats(-1e9, 1e9), st.floats(1e4, 1e9))
    def test_decoupled_cavity_is_one_port_reflection(self, D, w, k):
        A = lm.drift_matrix(20.0, 0.0, D, k, 1e4)
        co = lm.io_coefficients(lm.transfer_matrix(A, w), k, 1e4)
        r = one_port_reflection(k, D, w)
        for s in (1, -1):
            # T43 = 0 without coupling, so both quadrature signs coincide
            assert co.get("A", "a", s) == pytest.approx(r, rel=1e-12, abs=1e-12)

    def test_full_reflection_on_resonance(self):
        A = lm.drift_matrix(20.0, 0.0, 0.0, 1.35e7, 1e4)
        co = lm.io_coefficients(lm.transfer_matrix(A, 0.0), 1.35e7, 1e4)
        assert co.get("A", "a", 1) == pytest.approx(-1.0, abs=1e-15)

    def test_consistency_across_grid(self, blue):
        w = np.geomspace(1e-2 * blue.Omega_M, 1e3 * blue.g_C, 400)
        co = lm.io_coefficients(lm.transfer_matrix(blue.A, w), blue.kappa, blue.Gamma)
        assert co.consistency_deviation < 1e-10

    def test_consistency_extended_precision(self, blue):
        co = lm.io_coefficients(lm.transfer_matrix(blue.A, 221624.0, dps=30), blue.kappa, blue.Gamma)
        assert co.consistency_deviation < 1e-25

    def test_transcription_error_detected(self, blue):
        good = lm.transfer_matrix(blue.A, 1e5)
        other = lm.transfer_matrix(blue.A, 2e5)
        bad = TransferData(good.omega, good.T_plus, other.T_minus, good.residual)
        with pytest.raises(lm.ConsistencyError):
            lm.io_coefficients(bad, blue.kappa, blue.Gamma)

    def test_far_sidebands_reflect(self, blue):
        # leading correction is rate / |omega|, i.e. 1e-6 for the cavity here
        w = 1e6 * max(blue.kappa, blue.Omega_M)
        co = lm.io_coefficients(lm.transfer_matrix(blue.A, w), blue.kappa, blue.Gamma)
        for s in (1, -1):
            for f in (1, -1):
                assert abs(co.get("B", "b", s, f) - 1) < 1e-6
                dev = abs(co.get("A", "a", s, f) - 1)
                assert dev == pytest.approx(blue.kappa / w, rel=1e-5)

    def test_continuity(self, blue):
        dw = 1e-3 * blue.Omega_M
        w = np.arange(1000) * dw + 0.5 * blue.Omega_M
        co = lm.io_coefficients(lm.transfer_matrix(blue.A, w), blue.kappa, blue.Gamma)
        for key, vals in co.plus.items():
            steps = np.abs(np.diff(vals))
            deriv = np.abs(np.gradient(vals, dw))
            assert np.all(steps <= 10 * dw * np.maximum(deriv[1:], deriv[:-1]) + 1e-12), key

    def test_commutators_preserved_extended(self):
        for p, w, model in random_stable_points(20, seed=3):
            co = lm.io_coefficients(lm.transfer_matrix(model.A, w, dps=30), model.kappa, model.Gamma)
            assert commutator_defect(co) < 1e-8, (p, w)

    def test_commutators_preserved_off_resonance(self, blue):
        w = np.geomspace(1e6, 1e11, 50)
        co = lm.io_coefficients(lm.transfer_matrix(blue.A, w), blue.kappa, blue.Gamma)
        assert np.max(commutator_defect(co)) < 1e-8
