import numpy as np
import pytest
from hypothesis import given, strategies as st

import levmirror as lm
from levmirror.steady_state import Branch, cavity_detuning, discriminant

from oracles import rootfind_steady_state

# Reference parameters, P~ = 0.0017; frozen from the root-finding oracle.
DELTA_BLUE = -9598835.14951602
DELTA_RED = 9598835.302925622
Q_BLUE = 4.973265241263274e-08
Q_RED = 5.02673476038992e-08
NC_BLUE = 2.5908996792927765e15
P_MIN = 5.624994375e-4

powers = st.floats(6e-4, 1.0).map(float)


class TestReferencePoint:
    def test_frozen_values(self, reference):
        blue, red = lm.solve_branches(reference)
        assert blue.label is Branch.BLUE and red.label is Branch.RED
        assert blue.Delta == pytest.approx(DELTA_BLUE, rel=1e-12)
        assert red.Delta == pytest.approx(DELTA_RED, rel=1e-12)
        assert blue.q == pytest.approx(Q_BLUE, rel=1e-11)
        assert red.q == pytest.approx(Q_RED, rel=1e-11)
        assert blue.N_c == pytest.approx(NC_BLUE, rel=1e-11)
        assert blue.alpha == pytest.approx(np.sqrt(blue.N_c))
        assert blue.p == 0.0

    @pytest.mark.parametrize("branch", ["blue", "red"])
    def test_matches_root_finding_oracle(self, reference, branch):
        d, q, n = rootfind_steady_state(0.05, 1050e-9, 1.35e7, 0.0017, branch=branch)
        ss = lm.steady_state(reference, branch)
        assert ss.Delta == pytest.approx(float(d), rel=1e-12)
        assert ss.q == pytest.approx(float(q), rel=1e-11)
        assert ss.N_c == pytest.approx(float(n), rel=1e-11)

    def test_blue_is_lower_mirror_position(self, reference):
        blue, red = lm.solve_branches(reference)
        assert blue.q < red.q

    def test_residuals(self, reference):
        for ss in lm.solve_branches(reference):
            assert lm.residual(ss, reference).max_abs() < 1e-10

    def test_residual_detects_wrong_photon_number(self, reference):
        from dataclasses import replace
        ss = lm.steady_state(reference)
        bad = replace(ss, N_c=ss.N_c * (1 + 1e-6))
        assert lm.residual(bad, reference).max_abs() > 1e-7


class TestClosedForms:
    @given(powers)
    def test_oracle_agreement(self, p):
        params = lm.SystemParams.reference(p_tilde=p)
        for label in ("blue", "red"):
            d, q, n = rootfind_steady_state(0.05, 1050e-9, 1.35e7, p, branch=label)
            ss = lm.steady_state(params, label)
            assert ss.Delta == pytest.approx(float(d), rel=1e-10)
            assert ss.N_c == pytest.approx(float(n), rel=1e-10)

    @given(powers)
    def test_detuning_forms_agree(self, p):
        params = lm.SystemParams.reference(p_tilde=p)
        for ss in lm.solve_branches(params):
            direct = lm.detuning_closed_form(params, ss.label)
            from_q = cavity_detuning(ss.q, params)
            assert direct == pytest.approx(from_q, rel=1e-10)
            assert direct == pytest.approx(ss.Delta, rel=1e-14)

    @given(powers, st.floats(1e-9, 1e-6))
    def test_detuning_signs(self, p, ratio):
        params = lm.SystemParams.reference(p_tilde=p)
        params = params.replace(kappa=ratio * params.Omega_L)
        try:
            blue, red = lm.solve_branches(params)
        except lm.NoRealSteadyState:
            return
        assert blue.Delta < 0 < red.Delta

    @given(powers)
    def test_mass_independence(self, p):
        a = lm.solve_branches(lm.SystemParams.reference(p_tilde=p))
        b = lm.solve_branches(lm.SystemParams.reference(p_tilde=p, m_ref=0.37))
        for x, y in zip(a, b):
            assert x.Delta == pytest.approx(y.Delta, rel=1e-13)
            assert x.q == pytest.approx(y.q, rel=1e-12)
            assert y.N_c / x.N_c == pytest.approx(370.0, rel=1e-12)


class TestThreshold:
    def test_frozen_threshold(self, reference):
        assert lm.threshold_power(reference) == pytest.approx(P_MIN, rel=1e-12)

    def test_bisection_agrees(self, reference):
        a = lm.threshold_power(reference)
        b = lm.threshold_power_bisect(reference)
        assert abs(a - b) / a < 1e-10

    def test_threshold_ignores_stored_power(self, reference):
        assert lm.threshold_power(reference.replace(p_tilde=0.3)) == lm.threshold_power(reference)

    def test_below_threshold_raises(self, reference):
        params = reference.replace(p_tilde=0.9 * P_MIN)
        with pytest.raises(lm.NoRealSteadyState) as info:
            lm.solve_branches(params)
        assert info.value.discriminant < 0
        assert info.value.params is params

    def test_branches_merge_at_threshold(self, reference):
        # the branch splitting goes as sqrt(p - p_min)
        gaps = []
        for eps in (1e-4, 1e-6):
            blue, red = lm.solve_branches(reference.replace(p_tilde=P_MIN * (1 + eps)))
            assert blue.Delta < 0 < red.Delta
            gaps.append(red.Delta - blue.Delta)
        assert gaps[0] / gaps[1] == pytest.approx(10.0, rel=1e-3)

    def test_not_found(self, reference):
        with pytest.raises(lm.ThresholdNotFound):
            lm.threshold_power_bisect(reference, p_max=1e-4)

    @given(st.floats(1e-4, 10.0), st.floats(1e-4, 10.0))
    def test_discriminant_affine_in_power(self, p1, p2):
        params = lm.SystemParams.reference()
        d0 = discriminant(params, 1e-300)
        d1, d2 = discriminant(params, p1), discriminant(params, p2)
        assert (d1 - d0) / p1 == pytest.approx((d2 - d0) / p2, rel=1e-9)

    def test_single_sign_change(self, reference):
        ps = np.geomspace(1e-8, 1.0, 500)
        signs = np.sign([discriminant(reference, p) for p in ps])
        assert np.count_nonzero(np.diff(signs)) == 1


def test_branch_parse():
    assert Branch.parse("RED") is Branch.RED
    assert Branch.parse(Branch.BLUE) is Branch.BLUE
    with pytest.raises(ValueError):
        Branch.parse("green")
