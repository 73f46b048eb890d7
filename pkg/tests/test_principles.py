import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plaphydro.constitutive import AquiferHead, Identity, PowerRoot
from plaphydro.domains import Interval, Radial
from plaphydro.errors import DomainError, UnsupportedError
from plaphydro.principles import (
    ScpInstance,
    SmpCounterexample,
    comparison_check,
    demonstrate_smp_failure,
    demonstrate_waiting_time,
    positivity_horizon,
    psi_right_bump,
    scp_f_s,
    scp_hat_g,
    scp_horizon,
    smp_profile,
    smp_rhs,
)
from plaphydro.principles import _flux_x_fd, _v_hat_flux_x_closed
from plaphydro.solver import NumericsConfig, ProblemSpec, solve


def d4(F, x, h):
    """Fourth-order central first derivative."""
    return (-F(x + 2 * h) + 8 * F(x + h) - 8 * F(x - h) + F(x - 2 * h)) / (12 * h)


class TestSmpConstruction:
    def test_rhs_against_differences(self):
        ce = SmpCounterexample(3.0, 4.0, 4.0)
        x, t, h = 0.5, 0.01, 1e-3
        vx = lambda y: d4(lambda z: smp_profile(ce, z, t), y, h / 4)  # noqa: E731
        flux = lambda y: np.abs(vx(y)) ** (ce.p - 2) * vx(y)  # noqa: E731
        vt = d4(lambda s: smp_profile(ce, x, s), t, h)
        expected = 1.0 * vt - d4(flux, x, h)
        assert smp_rhs(ce, x, t) == pytest.approx(expected, abs=1e-8)

    def test_zero_on_left(self):
        ce = SmpCounterexample(3.0, 4.0, 4.0)
        xs = np.linspace(-1, 0, 11)
        assert np.all(smp_rhs(ce, xs, 0.1) == 0.0)
        assert np.all(smp_profile(ce, xs, 0.1) == 0.0)

    def test_profile_positive_on_right(self):
        ce = SmpCounterexample(3.0, 4.0, 4.0)
        assert np.all(smp_profile(ce, np.linspace(0.01, 0.99, 50), 0.05) > 0)

    def test_outer_region_positive_for_any_t(self):
        ce = SmpCounterexample(3.0, 4.0, 4.0)
        x = np.linspace(ce.outer_threshold + 1e-3, 0.999, 50)
        for t in (1e-3, 1.0, 100.0):
            assert np.all(smp_rhs(ce, x, t) > 0)

    def test_horizon_reference_value(self):
        t0 = positivity_horizon(SmpCounterexample(3.0, 4.0, 4.0))
        assert t0 == pytest.approx(0.17273, rel=2e-3)

    def test_larger_kmin_extends_horizon(self):
        base = positivity_horizon(SmpCounterexample(3.0, 4.0, 4.0))
        assert positivity_horizon(SmpCounterexample(3.0, 4.0, 4.0, kmin=2.0)) > base

    def test_smaller_gamma_keeps_positive_horizon(self):
        assert positivity_horizon(SmpCounterexample(3.0, 4.0, 1.0)) > 0

    @settings(max_examples=20, deadline=None)
    @given(st.sampled_from([(3.0, 4.0, 4.0), (3.0, 4.0, 1.0), (4.0, 3.0, 2.0), (5.0, 3.0, 3.0)]), st.floats(0.0, 1.0))
    def test_rhs_nonnegative_below_horizon(self, params, frac):
        ce = SmpCounterexample(*params)
        t0 = positivity_horizon(ce)
        assert np.min(smp_rhs(ce, np.linspace(-1, 1, 2001), frac * t0)) >= 0

    def test_rejects_singular_range(self):
        with pytest.raises(UnsupportedError, match="p > 2"):
            SmpCounterexample(1.5, 4.0, 4.0)

    @pytest.mark.parametrize("beta,gamma", [(2.0, 1.0), (4.0, 5.0), (4.0, 0.0)])
    def test_rejects_bad_exponents(self, beta, gamma):
        with pytest.raises(DomainError):
            SmpCounterexample(3.0, beta, gamma)

    def test_rejects_infinite_b_prime(self):
        with pytest.raises(UnsupportedError):
            SmpCounterexample(3.0, 4.0, 4.0, b=PowerRoot(1.0, 2.0))


@pytest.fixture(scope="module")
def smp_report():
    return demonstrate_smp_failure(SmpCounterexample(3.0, 4.0, 4.0), nodes=201)


class TestSmpDemonstration:
    def test_verdict(self, smp_report):
        assert smp_report["violated"]
        assert smp_report["verdict"].startswith("SMP violated")
        assert all(smp_report["checks"].values())

    def test_residual(self, smp_report):
        assert smp_report["analytic_residual_max"] < 1e-6

    def test_left_and_right(self, smp_report):
        assert smp_report["solver_left_max"] <= 1e-6
        assert smp_report["solver_right_max"] > 1e-3 * smp_report["t_horizon"]

    def test_horizon_guard(self):
        ce = SmpCounterexample(3.0, 4.0, 4.0)
        with pytest.raises(DomainError):
            demonstrate_smp_failure(ce, nodes=101, t_horizon=10.0)

    def test_aquifer_b(self):
        ce = SmpCounterexample(3.0, 4.0, 4.0, b=AquiferHead(0.0347, 3.0, 1.0))
        assert 0 < ce.kmin < AquiferHead(0.0347, 3.0, 1.0).prime_at_zero()
        rep = demonstrate_smp_failure(ce, nodes=201)
        assert rep["violated"]


class TestScpPieces:
    def test_f_s_example(self):
        inst = ScpInstance(5.0, 2.0, 3.0)
        assert scp_f_s(inst, 0.5) == pytest.approx(8.0, rel=1e-14)
        assert scp_f_s(inst, 0.0) == 0.0

    def test_f_s_even(self):
        inst = ScpInstance(4.0, 2.0, 3.0)
        x = np.linspace(0, 1, 21)
        assert np.array_equal(scp_f_s(inst, x), scp_f_s(inst, -x))

    @pytest.mark.parametrize("p,alpha", [(5.0, 2.0), (4.0, 2.5), (3.0, 3.0)])
    def test_f_s_against_differences(self, p, alpha):
        inst = ScpInstance(p, alpha, alpha + 1.0)

        def flux(y):
            ux = -alpha * np.abs(y) ** (alpha - 1) * np.sign(y)
            return np.abs(ux) ** (p - 2) * ux

        x = np.linspace(0.1, 0.9, 9)
        assert np.allclose(scp_f_s(inst, x), -d4(flux, x, 1e-3), atol=1e-8, rtol=0)

    def test_closed_flux_derivative_matches_fd(self):
        inst = ScpInstance(4.0, 2.0, 3.0)
        x = np.concatenate([np.linspace(-0.95, -0.05, 19), np.linspace(0.05, 0.95, 19)])
        for t in (0.0, 0.5, 1.0):
            closed = _v_hat_flux_x_closed(inst, x, t)
            fd = _flux_x_fd(inst, x, t, h=1e-3)
            assert np.max(np.abs(closed - fd)) < 1e-7

    def test_endpoints_finite(self):
        inst = ScpInstance(4.0, 2.0, 3.0)
        assert np.all(inst.v_hat(np.array([-1.0, 1.0]), 0.5) == 0.0)
        g, _ = scp_hat_g(inst, np.array([-1.0, 1.0]), 1e-3)
        assert np.all(np.isfinite(g))

    def test_bound_holds_for_small_C_and_t(self):
        inst = ScpInstance(4.0, 2.0, 3.0, C=0.1)
        _, ok = scp_hat_g(inst, np.linspace(-1, 1, 2001)[1:-1], 1e-3)
        assert np.all(ok)

    def test_horizon_positive(self):
        assert scp_horizon(ScpInstance(4.0, 2.0, 3.0)) > 0

    def test_large_C_shrinks_horizon(self):
        assert scp_horizon(ScpInstance(5.0, 2.0, 3.0, C=1e6)) < 1e-6

    def test_invalid_instance(self):
        with pytest.raises(DomainError, match="invalid waiting-time instance"):
            ScpInstance(4.0, 1.5, 3.0)
        with pytest.raises(DomainError, match="invalid waiting-time instance"):
            ScpInstance(4.0, 2.0, 2.0)

    def test_psi_bump_restricted_to_right(self):
        psi = psi_right_bump(3.0, 1.0)
        assert np.all(psi(np.linspace(-1, 0, 11), 0.0) == 0.0)
        assert np.all(psi(np.linspace(0.1, 0.9, 9), 0.0) > 0.0)


@pytest.fixture(scope="module")
def scp_report():
    return demonstrate_waiting_time(ScpInstance(4.0, 2.0, 3.0), nodes=201)


class TestWaitingTime:
    def test_all_checks(self, scp_report):
        assert scp_report["status"] == "ok"
        assert all(scp_report["checks"].values()), scp_report["checks"]

    def test_pinned_at_zero(self, scp_report):
        assert scp_report["difference_at_zero"] <= scp_report["tol"]
        assert scp_report["max_difference"] > 10 * scp_report["tol"]

    def test_identical_psi_gives_identical_runs(self):
        bump = psi_right_bump(3.0, 1.0)
        inst = ScpInstance(4.0, 2.0, 3.0, psi1=bump, psi2=bump)
        # the harness refuses equal psi (hypotheses need distinct data), so solve directly
        assert demonstrate_waiting_time(inst, nodes=101)["status"] == "rejected"
        runs = [
            solve(ProblemSpec(Interval(-1.0, 1.0), inst.p, 1.0, inst.b, inst.source(i), inst.u, 2e-3), 101, NumericsConfig(dt=2e-5))
            for i in (1, 2)
        ]
        assert runs[0].values.tobytes() == runs[1].values.tobytes()

    def test_rejects_horizon_beyond_bound(self):
        rep = demonstrate_waiting_time(ScpInstance(5.0, 2.0, 3.0, C=1e6), nodes=101, t_horizon=1e-3)
        assert rep["status"] == "rejected"
        assert "hypothesis (i) violated" in rep["reason"]


class TestComparisonCheck:
    def _problem(self, f=0.0, u0=None, p=3.0):
        u0 = u0 if u0 is not None else (lambda x: np.sin(np.pi * x))
        return ProblemSpec(Interval(0.0, 1.0), p, 1.0, Identity(), f, u0, 0.05)

    def test_larger_source_passes(self):
        rep = comparison_check(self._problem(0.0), self._problem(0.1), resolution=65, numerics=NumericsConfig(dt=5e-3))
        assert rep["passed"]
        assert not rep["identical"]

    def test_equal_data_identical(self):
        rep = comparison_check(self._problem(), self._problem(), resolution=65, numerics=NumericsConfig(dt=5e-3))
        assert rep["passed"] and rep["identical"]

    def test_mismatch_rejected(self):
        with pytest.raises(DomainError):
            comparison_check(self._problem(p=3.0), self._problem(p=2.5), resolution=65)
        other = ProblemSpec(Radial(1, 1.0), 3.0, 1.0, Identity(), 0.0, 0.0, 0.05)
        with pytest.raises(DomainError):
            comparison_check(self._problem(), other, resolution=65)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_ordered_pairs(self, seed):
        rng = np.random.default_rng(seed)
        k = rng.integers(1, 4)
        amp_a = rng.uniform(0.1, 1.0)
        amp_b = amp_a + rng.uniform(0.0, 1.0)
        fa = rng.uniform(0.0, 1.0)
        fb = fa + rng.uniform(0.0, 1.0)
        p = float(rng.choice([1.5, 2.0, 3.0, 4.0]))
        ua = lambda x: amp_a * np.sin(np.pi * x) ** 2 * np.abs(np.sin(k * np.pi * x))  # noqa: E731
        ub = lambda x: amp_b * np.sin(np.pi * x) ** 2 * np.abs(np.sin(k * np.pi * x))  # noqa: E731
        rep = comparison_check(
            self._problem(fa, ua, p), self._problem(fb, ub, p), resolution=65, numerics=NumericsConfig(dt=5e-3)
        )
        assert rep["passed"], rep
