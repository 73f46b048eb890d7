import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plaphydro.constitutive import (
    AquiferHead,
    ConstitutiveLaw,
    HeadTransform,
    Identity,
    PowerRoot,
    b_eval,
    b_from_record,
    b_prime,
    b_prime_lower_bound,
    flux_from_gradient,
    head_to_u,
    leibenson_b,
    smp_condition,
    source_to_f,
    u_to_head,
)
from plaphydro.errors import DomainError, UnsupportedError

FAMILIES = [
    Identity(),
    PowerRoot(1.0, 2.0),
    PowerRoot(3.0, 0.5),
    AquiferHead(0.0347, 1.5397, 1.0),
    AquiferHead(0.2, 3.0, 0.0),
    AquiferHead(0.9, 2.0, 2.5),
]


class TestBValues:
    def test_identity(self):
        assert b_eval(Identity(), 2.0) == 2.0

    def test_square_root(self):
        assert b_eval(PowerRoot(1.0, 2.0), 4.0) == pytest.approx(2.0, rel=1e-15)

    def test_aquifer_substitution(self):
        # 0.5 * 2^1 * [(3 + 1)^(1/2) - 1] = 1
        assert b_eval(AquiferHead(0.5, 2.0, 1.0), 3.0) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("b", FAMILIES, ids=lambda b: b.kind)
    def test_zero_at_zero(self, b):
        assert b_eval(b, 0.0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            b_eval(Identity(), -1e-3)

    def test_prime_examples(self):
        assert b_prime(Identity(), 5.0) == 1.0
        assert b_prime(PowerRoot(1.0, 2.0), 4.0) == pytest.approx(0.25)
        assert b_prime(AquiferHead(0.5, 2.0, 1.0), 3.0) == pytest.approx(0.25)

    def test_prime_rejects_zero(self):
        with pytest.raises(DomainError):
            b_prime(PowerRoot(1.0, 2.0), 0.0)

    @pytest.mark.parametrize("b", FAMILIES, ids=lambda b: b.kind)
    def test_prime_matches_central_differences(self, b):
        s = np.linspace(0.5, 10.0, 50)
        errs = []
        for h in (1e-2, 5e-3):
            fd = (b_eval(b, s + h) - b_eval(b, s - h)) / (2 * h)
            errs.append(np.max(np.abs(fd - b_prime(b, s)) / np.abs(b_prime(b, s))))
        # second order: halving h cuts the error by about 4
        assert errs[1] < 1e-4
        assert errs[1] <= errs[0] / 3.5 or errs[1] < 1e-12

    def test_prime_at_zero_values(self):
        b = AquiferHead(0.0347, 1.5, 2.0)
        expected = 0.0347 * 3.0 ** (1.5 - 2.0) * 2.0 ** (-1.0 / 0.5)
        assert b.prime_at_zero() == pytest.approx(expected, rel=1e-14)
        assert math.isinf(PowerRoot(1.0, 2.0).prime_at_zero())
        assert b_prime(b, 1e-12) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(FAMILIES),
    st.floats(1e-6, 1e3),
    st.floats(1e-6, 1e3),
)
def test_b_strictly_increasing(b, s1, s2):
    if s1 == s2:
        return
    lo, hi = min(s1, s2), max(s1, s2)
    if hi / lo - 1 < 1e-9:
        return
    assert b_eval(b, hi) > b_eval(b, lo)
    assert b_prime(b, lo) > 0


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FAMILIES), st.floats(1e-8, 1e4))
def test_b_inverse_round_trip(b, s):
    assert float(b.inverse(b_eval(b, s))) == pytest.approx(s, rel=1e-12)


class TestFlux:
    def test_zero_gradient(self):
        assert np.array_equal(flux_from_gradient(ConstitutiveLaw(0.7, 0.54), [0.0, 0.0]), [0.0, 0.0])

    def test_darcy(self):
        assert np.allclose(flux_from_gradient(ConstitutiveLaw(2.0, 1.0), [1.0, 0.0]), [-2.0, 0.0])

    def test_quadratic(self):
        assert np.allclose(flux_from_gradient(ConstitutiveLaw(1.0, 2.0), [3.0, 4.0]), [-15.0, -20.0])

    def test_invalid_law(self):
        with pytest.raises(DomainError):
            ConstitutiveLaw(-1.0, 1.0)

    def test_darcy_reduces_to_linear(self):
        law = ConstitutiveLaw(0.3, 1.0)
        assert law.is_darcy
        assert law.discharge(0.25) == pytest.approx(0.075)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 10.0), st.floats(0.1, 3.0), st.integers(0, 2**31 - 1))
def test_flux_magnitude_and_direction(c, m, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(100, 2)) * 3.0
    q = flux_from_gradient(ConstitutiveLaw(c, m), g)
    norm = np.linalg.norm(g, axis=1)
    assert np.allclose(np.linalg.norm(q, axis=1), c * norm**m, rtol=1e-12)
    assert np.allclose(np.sum(q * g, axis=1), -c * norm ** (m + 1), rtol=1e-12)


class TestHeadTransform:
    def test_reference_depth_maps_to_zero(self):
        assert head_to_u(HeadTransform(2.0, 1.0), 1.0) == 0.0

    def test_square_for_p2(self):
        assert head_to_u(HeadTransform(2.0, 0.0), 3.0) == pytest.approx(9.0)

    def test_round_trip(self):
        tf = HeadTransform(1.5397, 2.0)
        assert u_to_head(tf, head_to_u(tf, 2.7)) == pytest.approx(2.7, rel=1e-12)

    def test_out_of_domain(self):
        tf = HeadTransform(2.0, 1.0)
        with pytest.raises(DomainError):
            head_to_u(tf, -0.1)
        with pytest.raises(DomainError):
            u_to_head(tf, -1.5)

    def test_source_factor(self):
        assert source_to_f(2.0, 3.0) == pytest.approx(6.0)
        assert source_to_f(2.0, 0.0) == 0.0
        assert source_to_f(3.0, 1.0) == pytest.approx(2.25)
        with pytest.raises(DomainError):
            source_to_f(1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.05, 4.0), st.floats(0.0, 5.0), st.floats(0.0, 50.0))
def test_head_transform_round_trip(p, H, du):
    tf = HeadTransform(p, H)
    u = du - H ** tf.q * 0.5
    if u < tf.u_min:
        return
    back = head_to_u(tf, u_to_head(tf, u))
    assert back == pytest.approx(u, rel=1e-12, abs=1e-12 * max(1.0, H**tf.q))


def _manufactured_residuals(p, H, phi, c, x, t, h):
    """Finite-difference residuals of the head and u equations at (x, t)."""
    q = p / (p - 1.0)
    m = p - 1.0

    def hhat(xx, tt):
        return H + 0.4 * np.exp(-tt) * (1.2 + np.sin(1.3 * xx))

    def u(xx, tt):
        return hhat(xx, tt) ** q - H**q

    b = AquiferHead(phi, p, H)
    ght = 0.0  # any source; residuals are compared with the same source
    dt_h = (hhat(x, t + h) - hhat(x, t - h)) / (2 * h)

    def head_flux(xx):
        g = (hhat(xx + h / 2, t) - hhat(xx - h / 2, t)) / h
        return hhat(xx, t) * np.abs(g) ** (m - 1) * g

    div_h = (head_flux(x + h / 2) - head_flux(x - h / 2)) / h
    res_head = phi * dt_h - c * div_h - ght

    dt_b = (b_eval(b, u(x, t + h)) - b_eval(b, u(x, t - h))) / (2 * h)

    def u_flux(xx):
        g = (u(xx + h / 2, t) - u(xx - h / 2, t)) / h
        return np.abs(g) ** (p - 2) * g

    div_u = (u_flux(x + h / 2) - u_flux(x - h / 2)) / h
    res_u = dt_b - c * div_u - q ** (p - 1) * ght
    return res_head, res_u


def test_head_and_u_equations_are_consistent():
    p, H, phi, c = 1.5397, 1.0, 0.0347, 0.0048
    x, t = 0.7, 0.3
    q = p / (p - 1.0)
    errs = []
    for h in (4e-2, 2e-2, 1e-2):
        res_head, res_u = _manufactured_residuals(p, H, phi, c, x, t, h)
        errs.append(abs(q ** (1 - p) * res_u - res_head))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 1.9


class TestSmpCondition:
    def test_identity_holds(self):
        assert smp_condition(Identity(), 1.5) == "holds"

    def test_steep_power_root_fails(self):
        assert smp_condition(PowerRoot(1.0, 3.0), 1.5) == "fails"

    def test_aquifer_with_depth_holds(self):
        assert smp_condition(AquiferHead(0.0347, 1.8, 1.0), 1.8) == "holds"

    def test_aquifer_without_depth_fails(self):
        assert smp_condition(AquiferHead(0.0347, 1.8, 0.0), 1.8) == "fails"

    def test_boundary_case_holds(self):
        # k(p - 1) = 1: g(s) = (1/k) / |log s|^(p-1) -> 0
        assert smp_condition(PowerRoot(1.0, 2.0), 1.5) == "holds"

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_outside_regime(self, p):
        with pytest.raises(UnsupportedError):
            smp_condition(Identity(), p)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 1.99), st.floats(0.05, 20.0))
def test_smp_sign_rule_for_power_root(p, k):
    exponent = (1.0 - k * (p - 1.0)) / k
    verdict = smp_condition(PowerRoot(1.0, k), p)
    assert verdict == ("fails" if exponent < 0 else "holds")


def test_lower_bound_on_range():
    b = AquiferHead(0.0347, 1.5397, 1.0)
    kmin = b_prime_lower_bound(b, 4.0)
    grid = np.linspace(1e-9, 4.0, 2001)
    assert kmin > 0
    assert kmin <= np.min(b_prime(b, grid)) * (1 + 1e-12)
    assert b_prime_lower_bound(Identity(), 10.0) == 1.0


def test_leibenson_preset():
    b = leibenson_b(0.5)
    s = np.linspace(0.1, 3.0, 7)
    assert np.allclose(b_prime(b, s), s**-0.5)


def test_records_round_trip():
    for b in FAMILIES:
        assert b_from_record(b.to_record()) == b
    assert b_from_record({"kind": "leibenson", "kappa": 0.5}) == leibenson_b(0.5)
    with pytest.raises(DomainError):
        b_from_record({"kind": "tabulated"})
