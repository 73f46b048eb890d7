import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plaphydro.barenblatt import (
    SelfSimilarSolution,
    eval_solution,
    front_radius,
    make_solution,
    normalize_mass,
    pde_residual,
    profile_mass,
    shifted_solution,
    similarity_exponents,
)
from plaphydro.constitutive import PowerRoot
from plaphydro.domains import Interval, Radial
from plaphydro.errors import DomainError, UnsupportedError

# (N, k, p) samples covering the three regimes
COMPACT = [(1, 1.0, 3.0), (2, 1.0, 2.5), (3, 0.8, 3.0), (1, 2.0, 1.8)]
EXPONENTIAL = [(1, 1.0, 2.0), (2, 2.0, 1.5), (3, 0.5, 3.0)]
FAT_TAIL = [(1, 0.5, 1.8), (1, 1.0, 1.7), (2, 0.8, 2.0)]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.floats(0.3, 3.0), st.floats(1.2, 4.0))
def test_exponent_identity(N, k, p):
    try:
        lam, mu = similarity_exponents(N, k, p)
    except UnsupportedError:
        return
    assert lam > 0
    assert mu == pytest.approx(N * k * lam, rel=1e-14)


@pytest.mark.parametrize("N,k,p", EXPONENTIAL)
def test_exponential_regime_lambda(N, k, p):
    sol = SelfSimilarSolution(N, k, p)
    assert sol.regime == "exponential"
    assert 1.0 / sol.lam == p


@pytest.mark.parametrize("N,k,p", COMPACT + EXPONENTIAL + FAT_TAIL)
def test_first_integral(N, k, p):
    sol = SelfSimilarSolution(N, k, p, 0.7)
    top = 0.98 * sol.s_front if sol.regime == "compact" else 5.0
    s = np.linspace(1e-3, top, 100)
    d = sol.profile_derivative(s)
    lhs = np.abs(d) ** (p - 2) * d + sol.lam * s * sol.profile(s) ** (1.0 / k)
    assert np.max(np.abs(lhs)) < 1e-9


def test_profile_derivative_matches_fd():
    sol = SelfSimilarSolution(1, 1.0, 3.0)
    s = np.linspace(0.1, 0.9 * sol.s_front, 20)
    h = 1e-5
    fd = (sol.profile(s + h) - sol.profile(s - h)) / (2 * h)
    assert np.allclose(fd, sol.profile_derivative(s), atol=1e-8)


@pytest.mark.parametrize("N,k,p", COMPACT)
def test_compact_support(N, k, p):
    sol = SelfSimilarSolution(N, k, p, 1.3)
    sf = sol.s_front
    assert sf == pytest.approx((sol.C / sol.kappa) ** ((p - 1) / p), rel=1e-14)
    assert np.all(sol.profile(np.linspace(sf, 3 * sf, 20)) == 0.0)
    assert np.all(sol.profile(np.linspace(0.0, 0.999 * sf, 50)) > 0.0)


def test_non_compact_regimes_are_positive():
    for N, k, p in EXPONENTIAL + FAT_TAIL:
        sol = SelfSimilarSolution(N, k, p)
        assert np.all(sol.profile(np.linspace(0, 5, 50)) > 0)
        with pytest.raises(UnsupportedError, match="no finite front"):
            front_radius(sol, 1.0)


class TestFront:
    def test_known_value(self):
        # kappa = 1/6 for (1, 1, 3): front at t = 1 is 6^(2/3)
        sol = SelfSimilarSolution(1, 1.0, 3.0, 1.0)
        assert sol.kappa == pytest.approx(1.0 / 6.0, rel=1e-14)
        assert front_radius(sol, 1.0) == pytest.approx(6.0 ** (2.0 / 3.0), rel=1e-13)

    @pytest.mark.parametrize("N,k,p", COMPACT)
    def test_power_growth(self, N, k, p):
        sol = SelfSimilarSolution(N, k, p)
        for t in (0.1, 1.0, 7.0):
            assert front_radius(sol, 2 * t) / front_radius(sol, t) == pytest.approx(2**sol.lam, rel=1e-13)

    def test_outside_front_is_zero(self):
        sol = SelfSimilarSolution(2, 1.0, 2.5)
        rf = front_radius(sol, 0.4)
        assert np.all(eval_solution(sol, np.linspace(rf, 2 * rf, 10), 0.4) == 0.0)

    def test_rejects_nonpositive_time(self):
        sol = SelfSimilarSolution(1, 1.0, 3.0)
        with pytest.raises(DomainError):
            eval_solution(sol, 0.1, 0.0)
        with pytest.raises(DomainError):
            front_radius(sol, -1.0)


@pytest.mark.parametrize("N,k,p", COMPACT + EXPONENTIAL + FAT_TAIL)
def test_value_at_origin(N, k, p):
    sol = SelfSimilarSolution(N, k, p, 0.8)
    t = 0.37
    expected = t ** (-sol.mu) * (sol.C if sol.regime == "exponential" else sol.C**sol.gamma_exp)
    assert eval_solution(sol, 0.0, t) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from(COMPACT + EXPONENTIAL + FAT_TAIL),
    st.floats(0.05, 20.0),
    st.floats(0.0, 3.0),
    st.floats(0.1, 5.0),
)
def test_self_scaling(params, c, r, t):
    sol = SelfSimilarSolution(*params)
    lhs = eval_solution(sol, c**sol.lam * r, c * t)
    rhs = c ** (-sol.mu) * eval_solution(sol, r, t)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


class TestNormalization:
    def test_heat_physical_mode(self):
        # int_0^inf C exp(-s^2/4) ds = C sqrt(pi)
        assert normalize_mass(SelfSimilarSolution(1, 1.0, 2.0), "physical") == pytest.approx(
            1.0 / math.sqrt(math.pi), rel=1e-9
        )

    @pytest.mark.parametrize("N,k,p", COMPACT + EXPONENTIAL + [(1, 1.0, 1.7)])
    @pytest.mark.parametrize("mode", ["profile", "physical"])
    def test_fixed_point(self, N, k, p, mode):
        sol = make_solution(N, k, p, mode)
        assert profile_mass(sol, mode) == pytest.approx(1.0, abs=1e-8)

    def test_compact_mass_increases_with_C(self):
        a = profile_mass(SelfSimilarSolution(1, 1.0, 3.0, 1.0))
        b = profile_mass(SelfSimilarSolution(1, 1.0, 3.0, 2.0))
        assert b > a

    def test_divergent_tail(self):
        # gamma_exp * q must exceed N for a convergent tail
        sol = SelfSimilarSolution(1, 0.2, 2.0)
        assert sol.regime == "fat-tail"
        with pytest.raises(UnsupportedError):
            profile_mass(sol, "profile")

    def test_explicit_constant(self):
        assert make_solution(1, 1.0, 3.0, 2.5).C == 2.5

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            profile_mass(SelfSimilarSolution(1, 1.0, 3.0), "volume")


class TestResidual:
    def test_heat_case(self):
        sol = SelfSimilarSolution(1, 1.0, 2.0)
        assert pde_residual(sol, np.linspace(0.1, 2.0, 15), np.linspace(1.0, 2.0, 5), 1e-3) < 1e-6

    def test_compact_order(self):
        sol = SelfSimilarSolution(1, 1.0, 3.0)
        r = np.linspace(0.2, 1.5, 9)
        t = np.array([1.0, 1.5])
        res = [pde_residual(sol, r, t, h) for h in (4e-2, 2e-2, 1e-2)]
        assert res[0] > res[1] > res[2]
        assert math.log2(res[1] / res[2]) >= 1.5

    @settings(max_examples=15, deadline=None)
    @given(st.sampled_from(COMPACT + EXPONENTIAL + FAT_TAIL))
    def test_monotone_under_refinement(self, params):
        sol = SelfSimilarSolution(*params)
        t = np.array([1.0, 1.4])
        top = 0.7 * front_radius(sol, 1.0) if sol.regime == "compact" else 1.5
        r = np.linspace(0.2 * top, top, 7)
        res = [pde_residual(sol, r, t, h) for h in (2e-2, 1e-2, 5e-3)]
        assert res[0] > res[1] > res[2]

    def test_standoff_enforced(self):
        sol = SelfSimilarSolution(1, 1.0, 3.0)
        with pytest.raises(DomainError):
            pde_residual(sol, [1e-4], [1.0], 1e-3)
        with pytest.raises(DomainError):
            pde_residual(sol, [front_radius(sol, 1.0)], [1.0], 1e-3)


class TestShifted:
    def _make(self):
        sol = SelfSimilarSolution(1, 1.0, 3.0, 0.05)
        return shifted_solution(sol, 0.0, 0.01, Interval(-1.0, 1.0))

    def test_initial_support(self):
        sh = self._make()
        rf = sh.front(0.0)
        x = np.linspace(-1, 1, 2001)
        u0 = sh.u0(x)
        assert np.all(u0[np.abs(x) < 0.999 * rf] > 0)
        assert np.all(u0[np.abs(x) >= rf] == 0)

    def test_zero_outside_growing_ball(self):
        sh = self._make()
        t = 0.5 * sh.horizon_max
        x = np.linspace(-1, 1, 2001)
        assert np.all(sh(x, t)[np.abs(x) >= sh.front(t)] == 0)

    def test_mass_constant(self):
        sh = self._make()
        m0 = sh.mass(0.0)
        for t in np.linspace(0, 0.9 * sh.horizon_max, 5):
            assert sh.mass(t) == pytest.approx(m0, rel=1e-6)

    def test_b_is_power_root(self):
        assert self._make().b() == PowerRoot(1.0, 1.0)

    def test_horizon_rejection(self):
        sol = SelfSimilarSolution(1, 1.0, 3.0, 0.05)
        with pytest.raises(UnsupportedError, match="maximal admissible horizon"):
            shifted_solution(sol, 0.0, 0.01, Interval(-1.0, 1.0), horizon=1e3)

    def test_requires_compact(self):
        with pytest.raises(UnsupportedError):
            shifted_solution(SelfSimilarSolution(1, 1.0, 2.0), 0.0, 0.1, Interval(-1.0, 1.0))

    def test_radial_dimension_check(self):
        with pytest.raises(DomainError):
            shifted_solution(SelfSimilarSolution(2, 1.0, 3.0), 0.0, 0.01, Radial(3, 1.0))
