import numpy as np
import pytest

from dicascade.degree_model import JointDegreePMF
from dicascade.epidemic_sim import EpidemicParams
from dicascade.meanfield import (
    ClassState,
    IntegrationError,
    MeanFieldForm,
    absolute_to_conditional,
    conditional_to_absolute,
    integrate,
    rhs,
)

SINGLE = JointDegreePMF.from_dict({(1, 1): 1.0})
PAIR = JointDegreePMF.from_dict({(1, 2): 0.5, (2, 1): 0.5})


def logistic(t, i0, rate=1.0):
    return i0 / (i0 + (1 - i0) * np.exp(-rate * t))


class TestRhs:
    def test_logistic_midpoint(self):
        di, dr = rhs(ClassState(SINGLE, [0.5], [0.0]), EpidemicParams(1, 0, 0.5, 1))
        assert di[0] == pytest.approx(0.25)
        assert dr[0] == 0.0

    def test_balance_point(self):
        di, dr = rhs(ClassState(SINGLE, [0.5], [0.0]), EpidemicParams(1, 0.5, 0.5, 1))
        assert di[0] == pytest.approx(0.0, abs=1e-15)
        assert dr[0] == pytest.approx(0.25)

    def test_two_classes_by_hand(self):
        state = ClassState(PAIR, [0.1, 0.05], [0.0, 0.0])
        di, dr = rhs(state, EpidemicParams(1, 0.5, 0.1, 1))
        # sum l' i = 2*0.1 + 1*0.05 = 0.25, E L = 1.5
        assert di[PAIR.index(1, 2)] == pytest.approx((0.5 - 0.1) * 0.25 / 1.5 - 0.05)
        assert di[PAIR.index(1, 2)] == pytest.approx(0.0166667, abs=1e-7)
        assert di[PAIR.index(2, 1)] == pytest.approx(2 * (0.5 - 0.05) * 0.25 / 1.5 - 0.025)
        np.testing.assert_allclose(dr, [0.05, 0.025])

    def test_conditioned_form_by_hand(self):
        state = ClassState(PAIR, [0.2, 0.1], [0.0, 0.0], MeanFieldForm.CONDITIONED)
        di, _ = rhs(state, EpidemicParams(1, 0.5, 0.1, 1))
        # sum l' f i = 2*0.5*0.2 + 1*0.5*0.1 = 0.25
        assert di[0] == pytest.approx(1 * 0.8 * 0.25 / 1.5 - 0.1)

    def test_forms_agree_after_scaling(self, fig1_left_pmf):
        rng = np.random.default_rng(0)
        f = fig1_left_pmf.p
        i = f * rng.uniform(0, 0.5, len(f))
        r = f * rng.uniform(0, 0.5, len(f))
        params = EpidemicParams(1, 0.5, 0.05, 1)
        absolute = ClassState(fig1_left_pmf, i, r)
        di_a, dr_a = rhs(absolute, params)
        di_c, dr_c = rhs(absolute_to_conditional(absolute), params)
        np.testing.assert_allclose(di_c * f, di_a, rtol=1e-12, atol=1e-18)
        np.testing.assert_allclose(dr_c * f, dr_a, rtol=1e-12, atol=1e-18)

    def test_no_out_degree(self):
        pmf = JointDegreePMF.from_dict({(1, 0): 1.0})
        with pytest.raises(ValueError):
            rhs(ClassState(pmf, [0.1], [0.0]), EpidemicParams(1, 0, 0.1, 1))


class TestIntegrate:
    def test_logistic_oracle(self):
        params = EpidemicParams(1.0, 0.0, 0.05, 10.0)
        traj = integrate(ClassState(SINGLE, [0.05], [0.0]), params, dt=1e-3)
        assert np.max(np.abs(traj.i - logistic(traj.grid, 0.05))) < 1e-8

    def test_zero_initial_state_is_fixed(self):
        traj = integrate(ClassState(PAIR, [0, 0], [0, 0]), EpidemicParams(1, 0.5, 0, 5), dt=1e-2)
        assert np.all(traj.class_i == 0) and np.all(traj.class_r == 0)

    def test_no_recovery_keeps_r_zero(self, fig1_left_pmf):
        init = ClassState.uniform_seed(fig1_left_pmf, 0.05)
        traj = integrate(init, EpidemicParams(1, 0, 0.05, 3), dt=1e-2)
        assert np.all(traj.class_r == 0.0)

    def test_trajectory_invariants(self, fig1_left_pmf):
        init = ClassState.uniform_seed(fig1_left_pmf, 0.05)
        traj = integrate(init, EpidemicParams(1, 0.5, 0.05, 10), dt=1e-2, grid=np.linspace(0, 10, 201))
        f = fig1_left_pmf.p
        s = f - traj.class_i - traj.class_r
        assert np.all(traj.class_i >= 0) and np.all(traj.class_r >= 0)
        assert np.all(s >= -1e-9)
        assert np.all(np.diff(s, axis=0) <= 1e-12)
        assert np.all(np.diff(traj.class_r, axis=0) >= 0)
        assert np.max(np.abs(traj.i - traj.class_i.sum(axis=1))) <= 1e-12

    @pytest.mark.parametrize("pmf_name", ["pair", "fig1"])
    def test_forms_give_the_same_dynamics(self, pmf_name, fig1_left_pmf):
        pmf = PAIR if pmf_name == "pair" else fig1_left_pmf
        init = ClassState.uniform_seed(pmf, 0.05)
        params = EpidemicParams(1.0, 0.5, 0.05, 5.0)
        grid = np.linspace(0, 5, 51)
        a = integrate(init, params, MeanFieldForm.ABSOLUTE, dt=1e-3, grid=grid)
        c = integrate(absolute_to_conditional(init), params, MeanFieldForm.CONDITIONED, dt=1e-3, grid=grid)
        assert np.max(np.abs(a.class_i - c.class_i)) <= 1e-6
        assert np.max(np.abs(a.class_r - c.class_r)) <= 1e-6

    def test_rk4_fourth_order(self, fig1_left_pmf):
        init = ClassState.uniform_seed(fig1_left_pmf, 0.05)
        params = EpidemicParams(1.0, 0.5, 0.05, 10.0)
        grid = np.linspace(0, 10, 101)
        dt = 0.05

        def run(h):
            t = integrate(init, params, dt=h, grid=grid)
            return np.hstack([t.class_i, t.class_r])

        ref = run(dt / 16)
        ratio = np.abs(run(dt) - ref).max() / np.abs(run(dt / 2) - ref).max()
        assert 8 <= ratio <= 32

    def test_oversized_step_is_an_error(self):
        pmf = JointDegreePMF.from_dict({(10, 10): 1.0})
        with pytest.raises(IntegrationError):
            integrate(ClassState(pmf, [0.05], [0.0]), EpidemicParams(50, 0, 0.05, 5), dt=0.5)

    def test_rejects_infeasible_initial_state(self):
        with pytest.raises(ValueError):
            integrate(ClassState(PAIR, [0.6, 0.0], [0, 0]), EpidemicParams(1, 0, 0.1, 1))


class TestConversions:
    def test_half_infected(self):
        f = PAIR.p
        cond = absolute_to_conditional(ClassState(PAIR, f / 2, np.zeros(2)))
        np.testing.assert_allclose(cond.i, 0.5)

    def test_fully_infected(self):
        st = ClassState(PAIR, [1.0, 1.0], [0.0, 0.0], MeanFieldForm.CONDITIONED)
        np.testing.assert_array_equal(conditional_to_absolute(st).i, PAIR.p)

    def test_round_trip(self, fig1_left_pmf):
        rng = np.random.default_rng(1)
        f = fig1_left_pmf.p
        for _ in range(50):
            i = f * rng.uniform(0, 1, len(f))
            r = (f - i) * rng.uniform(0, 1, len(f))
            back = conditional_to_absolute(absolute_to_conditional(ClassState(fig1_left_pmf, i, r)))
            assert np.max(np.abs(back.i - i)) < 1e-15
            assert np.max(np.abs(back.r - r)) < 1e-15
