import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

import levmirror as lm
from levmirror.gaussian_state import reflection_matrix, symplectic_form, vacuum_covariance

from conftest import random_stable_points
from oracles import oracle_commutators, sigma_oracle

DPS = 30


def cs_scale(s):
    d = np.abs(np.diagonal(s, axis1=-2, axis2=-1))
    return np.sqrt(d[..., :, None] * d[..., None, :])


def decoupled(omega, dps=None):
    model = lm.LinearizedModel(19.8, 0.0, -9.6e6, 1.35e7, 1e4)
    return lm.sideband_covariance(model, omega, dps=dps)


class TestVacuum:
    @pytest.mark.parametrize("dps", [None, DPS])
    def test_decoupled_is_vacuum(self, dps):
        cov = decoupled(3e5, dps)
        np.testing.assert_allclose(cov.sigma, vacuum_covariance(), atol=1e-15)
        assert lm.entanglement_entropy(cov).E2 == pytest.approx(0.0, abs=1e-14)
        assert lm.purity_check(cov) < 1e-14
        assert np.allclose(lm.quadrature_variances(cov), 0.5, atol=1e-15)
        lo, hi = lm.max_squeezing(lm.submatrices(cov)[0])
        assert lo == pytest.approx(0.5) and hi == pytest.approx(0.5)
        assert np.all(lm.submatrices(cov)[2] == 0)

    def test_decoupled_grid(self):
        cov = decoupled(np.geomspace(1e-1, 1e10, 100))
        assert np.allclose(cov.sigma, vacuum_covariance(), atol=1e-14)
        assert np.all(lm.entanglement_entropy(cov).E2 < 1e-13)


class TestOracle:
    def test_quadrature_commutators(self, blue):
        # the oracle's quadratures are canonical in the assumed symplectic form
        for w in (1.0, 221624.0, 3e7):
            comm = oracle_commutators(blue.A, w, blue.kappa, blue.Gamma)
            np.testing.assert_allclose(comm, 1j * symplectic_form(), atol=1e-15)

    def test_float_case_table(self):
        for p, w, model in random_stable_points(25, seed=11):
            s = lm.sideband_covariance(model, w).sigma
            ref = sigma_oracle(model.A, w, model.kappa, model.Gamma)
            assert np.all(np.abs(s - ref) <= 1e-10 * cs_scale(ref)), (p, w)

    def test_extended_case_table(self):
        for p, w, model in random_stable_points(5, seed=12):
            cov = lm.sideband_covariance(model, w, dps=DPS)
            ref = sigma_oracle(model.A, w, model.kappa, model.Gamma, dps=DPS)
            with mp.workdps(DPS):
                for i in range(8):
                    for k in range(8):
                        tol = mp.mpf(10) ** -25 * mp.sqrt(abs(ref[i, i] * ref[k, k]))
                        assert abs(cov.sigma_hp[i, k] - ref[i, k]) <= tol

    def test_vectorized_matches_pointwise(self, blue):
        w = np.geomspace(1.0, 1e10, 40)
        grid = lm.sideband_covariance(blue, w).sigma
        for n, x in enumerate(w):
            one = lm.sideband_covariance(blue, x).sigma
            assert np.all(np.abs(grid[n] - one) <= 1e-13 * cs_scale(one))


class TestStructure:
    def test_symmetric(self, blue):
        s = lm.sideband_covariance(blue, np.geomspace(1, 1e10, 200)).sigma
        assert np.abs(s - np.swapaxes(s, 1, 2)).max() <= 1e-12
        assert np.all(np.diagonal(s, axis1=1, axis2=2) >= 0)

    def test_submatrices_partition(self, blue):
        s = lm.sideband_covariance(blue, 2e5).sigma
        sb, sa, up = lm.submatrices(s)
        again = np.block([[sb, up], [up.T, sa]])
        np.testing.assert_array_equal(again, s)

    def test_blocks_positive_semidefinite(self):
        for p, w, model in random_stable_points(50, seed=5):
            cov = lm.sideband_covariance(model, w, dps=DPS)
            for blk in lm.submatrices(cov.sigma_hp)[:2]:
                assert lm.max_squeezing(blk)[0] > 0

    def test_correlations_at_peak(self, blue):
        cov = lm.sideband_covariance(blue, 221624.0)
        assert np.abs(lm.submatrices(cov)[2]).max() > 1.0
        v = cov.sigma
        assert v[0, 0] == pytest.approx(v[2, 2], rel=1e-10)

    def test_reflection_symmetry(self, blue):
        D = reflection_matrix()
        w = np.geomspace(1e-1, 1e10, 200)
        plus = lm.sideband_covariance(blue, w).sigma
        minus = lm.sideband_covariance(blue, -w).sigma
        assert np.all(np.abs(minus - D @ plus @ D) <= 1e-10 * cs_scale(plus))

    def test_asymmetry_detected(self, blue):
        from levmirror.gaussian_state import _check_symmetry
        s = lm.sideband_covariance(blue, 1e5).sigma.copy()
        s[0, 1] *= 1 + 1e-6
        with pytest.raises(lm.ConsistencyError):
            _check_symmetry(s, 1e-10)


class TestPhysicality:
    def test_properties_at_random_points(self):
        omega_s = symplectic_form()
        for p, w, model in random_stable_points(20, seed=21):
            cov = lm.sideband_covariance(model, w, dps=DPS)
            ent = lm.entanglement_entropy(cov)
            assert ent.discrepancy < 1e-6
            assert ent.E2_from_a >= 0 and ent.E2_from_b >= 0
            assert lm.purity_check(cov) < 1e-6
            assert lm.uncertainty_min_eigenvalue(cov) >= -1e-8
            lm.quadrature_variances(cov)  # C/S equality, raises otherwise

    def test_squeezing_respects_uncertainty_bound(self):
        # for x the smallest eigenvector, y = Omega x gives
        # lambda_min * lambda_max >= (x^T Omega y)^2 / 4 = 1/4
        for p, w, model in random_stable_points(20, seed=31):
            cov = lm.sideband_covariance(model, w, dps=DPS)
            for blk in lm.submatrices(cov.sigma_hp)[:2]:
                lo, hi = lm.max_squeezing(blk)
                assert lo * hi >= 0.25 * (1 - 1e-9)

    def test_variances_bounded_by_eigenvalues(self, blue):
        s = lm.sideband_covariance(blue, np.geomspace(1e3, 1e8, 100)).sigma
        var = lm.quadrature_variances(s, rtol=1e-8)
        lo_b, hi_b = lm.max_squeezing(s[:, :4, :4])
        lo_a, hi_a = lm.max_squeezing(s[:, 4:, 4:])
        for v in (var.Q_b, var.P_b):
            assert np.all(v >= lo_b * (1 - 1e-9)) and np.all(v <= hi_b * (1 + 1e-9))
        for v in (var.Q_a, var.P_a):
            assert np.all(v >= lo_a * (1 - 1e-9)) and np.all(v <= hi_a * (1 + 1e-9))

    def test_zeroed_correlations_break_purity(self, blue):
        cov = lm.sideband_covariance(blue, 221624.0, dps=DPS)
        s = cov.sigma_hp.copy()
        for i in range(4):
            for k in range(4, 8):
                s[i, k] = s[k, i] = 0
        with mp.workdps(DPS):
            assert lm.purity_check(s) > 1e-6

    def test_unphysical_state_rejected(self):
        with pytest.raises(lm.UnphysicalStateError):
            lm.entanglement_entropy(0.1 * np.eye(8))

    def test_cs_mismatch_rejected(self):
        s = vacuum_covariance()
        s[2, 2] = 0.6
        with pytest.raises(lm.ConsistencyError):
            lm.quadrature_variances(s)

    def test_float_and_extended_agree_off_peak(self, blue):
        w = 3e7
        f = lm.entanglement_entropy(lm.sideband_covariance(blue, w))
        h = lm.entanglement_entropy(lm.sideband_covariance(blue, w, dps=DPS))
        assert f.E2 == pytest.approx(h.E2, rel=1e-9)


@given(st.floats(np.log(6e-4), np.log(0.1)))
def test_entropy_routes_agree(logp):
    model = lm.linearize(lm.SystemParams.reference(p_tilde=float(np.exp(logp))))
    if not lm.stability(model).stable:
        return
    w = np.geomspace(1e-2 * model.Omega_M, 1e3 * model.g_C, 50)
    ent = lm.entanglement_entropy(lm.sideband_covariance(model, w))
    # float64 determinants of the strongly squeezed blocks limit agreement
    assert np.all(ent.discrepancy < 1e-6)


def peak_E2(p, n=400):
    model = lm.linearize(lm.SystemParams.reference(p_tilde=p))
    w = np.geomspace(1e-2 * model.Omega_M, 1e3 * model.g_C, n)
    return lm.entanglement_entropy(lm.sideband_covariance(model, w)).E2.max()


def test_peak_entanglement_decreases_with_power():
    peaks = [peak_E2(p) for p in (0.005, 0.02, 0.05)]
    assert peaks[0] > peaks[1] > peaks[2]
