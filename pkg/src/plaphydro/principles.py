"""Counterexamples to the strong maximum and comparison principles for p > 2.

Two one-dimensional constructions on (-1, 1):

* SMP: v(x, t) = t x^beta (1 - x^gamma) for x in (0, 1) and 0 otherwise is a
  solution with zero initial data and the nonnegative source
  f = b'(v) v_t - (|v_x|^(p-2) v_x)_x, yet it vanishes identically on (-1, 0].

* SCP: the stationary u = 1 - |x|^alpha solves -(|u'|^(p-2) u')' = f_s.
  Perturbing the source on x > 0 only leaves the solution pinned at x = 0
  for a waiting time, because the flux degenerates there.

The harnesses below build these objects, check the inequalities that make
them work on a grid, and reproduce them with the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constitutive import BFunction, Identity, b_prime_lower_bound
from .domains import Interval
from .errors import DomainError, SolverError, UnsupportedError
from .solver import NumericsConfig, ProblemSpec, residual_norms, solve

__all__ = [
    "SmpCounterexample",
    "ScpInstance",
    "smp_rhs",
    "smp_profile",
    "positivity_horizon",
    "demonstrate_smp_failure",
    "scp_f_s",
    "scp_hat_g",
    "scp_horizon",
    "demonstrate_waiting_time",
    "comparison_check",
    "psi_zero",
    "psi_right_bump",
]


def _b_prime_on(b: BFunction, v: np.ndarray) -> np.ndarray:
    """b'(v) with the right limit b'(0+) at v = 0."""
    v = np.asarray(v, dtype=float)
    pos = v > 0
    out = np.full(v.shape, b.prime_at_zero())
    if np.any(pos):
        out[pos] = b._prime(v[pos])
    return out


def _check_b_bounded(b: BFunction):
    b0 = b.prime_at_zero()
    if not (math.isfinite(b0) and b0 > 0):
        raise UnsupportedError("these constructions need 0 < b'(0+) < inf")


# ----------------------------------------------------------------------
# SMP counterexample
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SmpCounterexample:
    """Parameters of v = t x^beta (1 - x^gamma) on (0, 1), zero on (-1, 0].

    ``kmin`` is a lower bound of b' on the range of v; when omitted it is
    computed from the range attained up to ``t_range``.
    """

    p: float
    beta: float
    gamma: float
    b: BFunction = field(default_factory=Identity)
    kmin: float | None = None
    t_range: float = 1.0

    def __post_init__(self):
        if self.p <= 2:
            raise UnsupportedError(
                "SMP counterexamples need p > 2; for 1 < p < 2 the strong maximum principle holds "
                "under the b'(s) condition (see constitutive.smp_condition)"
            )
        if not self.beta > max(2.0, self.p / (self.p - 2.0)):
            raise DomainError("need beta > max(2, p/(p-2))")
        if not (0.0 < self.gamma <= self.beta):
            raise DomainError("need 0 < gamma <= beta")
        if not (self.beta - 1.0) * (self.p - 2.0) - 2.0 > 0:
            raise DomainError("need (beta - 1)(p - 2) - 2 > 0")
        _check_b_bounded(self.b)
        if self.kmin is None:
            s_max = self.t_range * self.profile_max
            object.__setattr__(self, "kmin", b_prime_lower_bound(self.b, s_max))
        if not self.kmin > 0:
            raise DomainError("kmin must be positive")

    @property
    def profile_max(self) -> float:
        """max over (0, 1) of x^beta (1 - x^gamma)."""
        x = (self.beta / (self.beta + self.gamma)) ** (1.0 / self.gamma)
        return x**self.beta * (1.0 - x**self.gamma)

    @property
    def outer_threshold(self) -> float:
        """Beyond this x the flux term alone keeps f positive."""
        bg = self.beta + self.gamma
        return (self.beta * (self.beta - 1.0) / (bg * (bg - 1.0))) ** (1.0 / self.gamma)


def smp_profile(ce: SmpCounterexample, x, t):
    """The analytic solution v(x, t)."""
    x = np.asarray(x, dtype=float)
    xp = np.clip(x, 0.0, None)
    out = np.where(x > 0, np.asarray(t, dtype=float) * xp**ce.beta * (1.0 - xp**ce.gamma), 0.0)
    return float(out) if out.ndim == 0 else out


def smp_rhs(ce: SmpCounterexample, x, t):
    """f = b'(v) v_t - (|v_x|^(p-2) v_x)_x, zero for x <= 0."""
    x_in = np.asarray(x, dtype=float)
    if np.any(np.abs(x_in) > 1):
        raise DomainError("x must lie in [-1, 1]")
    x_arr = np.atleast_1d(x_in)
    t = float(t)
    p, beta, gamma = ce.p, ce.beta, ce.gamma
    out = np.zeros_like(x_arr)
    pos = x_arr > 0
    xp = x_arr[pos]
    v = t * xp**beta * (1.0 - xp**gamma)
    vt = xp**beta * (1.0 - xp**gamma)
    vx = t * xp ** (beta - 1.0) * (beta - (beta + gamma) * xp**gamma)
    vxx = t * (beta * (beta - 1.0) * xp ** (beta - 2.0) - (beta + gamma) * (beta + gamma - 1.0) * xp ** (beta + gamma - 2.0))
    flux_x = (p - 1.0) * np.abs(vx) ** (p - 2.0) * vxx
    out[pos] = _b_prime_on(ce.b, v) * vt - flux_x
    return float(out[0]) if x_in.ndim == 0 else out


def _smp_bracket(ce: SmpCounterexample, x: np.ndarray, t: float) -> np.ndarray:
    """Lower bound of f / (kmin x^beta), the bracket whose sign controls f."""
    p, beta, gamma = ce.p, ce.beta, ce.gamma
    bg = beta + gamma
    coef = (p - 1.0) * beta ** (p - 1.0) * (beta - 1.0) / ce.kmin
    return (1.0 - x**gamma) - coef * t ** (p - 1.0) * x ** ((beta - 1.0) * (p - 2.0) - 2.0) * np.abs(
        1.0 - bg / beta * x**gamma
    ) ** (p - 2.0) * (1.0 - bg * (bg - 1.0) / (beta * (beta - 1.0)) * x**gamma)


def _largest_good_time(good: Callable[[float], bool], rtol: float, t_cap: float = 1e6) -> float:
    """Largest t with good(t) by doubling then bisection; good must be monotone."""
    lo, hi = 0.0, 1.0
    while good(hi):
        lo, hi = hi, hi * 2.0
        if hi > t_cap:
            return lo
    if lo == 0.0:
        lo = hi
        while not good(lo):
            hi = lo
            lo /= 2.0
            if lo < 1e-300:
                raise UnsupportedError("no positive horizon: the inequality fails for every t > 0")
    while (hi - lo) > rtol * lo:
        mid = 0.5 * (lo + hi)
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo


def positivity_horizon(ce: SmpCounterexample, n: int = 2001, rtol: float = 1e-3) -> float:
    """Largest t0 (to relative ``rtol``) for which the bracket is > 0 on the grid for all t <= t0."""
    x = np.linspace(0.0, 1.0, n)[1:-1]
    # min over x of the bracket is nonincreasing in t, so bisection applies
    return _largest_good_time(lambda t: bool(np.min(_smp_bracket(ce, x, t)) > 0), rtol)


def demonstrate_smp_failure(
    ce: SmpCounterexample,
    nodes: int = 401,
    dt: float | None = None,
    t_horizon: float | None = None,
    numerics: NumericsConfig | None = None,
) -> dict:
    """Residual check of v plus a solver run from zero initial data.

    Returns a JSON-ready report with the three findings and a verdict.
    """
    t0 = positivity_horizon(ce)
    if t_horizon is None:
        t_horizon = t0
    if t_horizon > t0:
        raise DomainError(f"t_horizon {t_horizon!r} exceeds the positivity horizon {t0!r}")
    domain = Interval(-1.0, 1.0)
    f = lambda x, t: smp_rhs(ce, x, t)  # noqa: E731
    problem = ProblemSpec(domain, ce.p, 1.0, ce.b, f, 0.0, t_horizon)

    xs = np.concatenate([np.linspace(-0.9, -0.1, 9), np.linspace(0.1, 0.9, 17)])
    ts = np.linspace(0.01, 1.0, 5) * t_horizon
    res_max, res_rms = residual_norms(lambda x, t: smp_profile(ce, x, t), problem, (xs, ts))

    if numerics is None:
        numerics = NumericsConfig(dt=dt if dt is not None else t_horizon / 200)
    traj = solve(problem, nodes, numerics)
    x = traj.coords[0]
    left = x <= -0.05
    right = (x > 0) & (x < 1)
    left_max = float(np.max(np.abs(traj.values[:, left])))
    right_max = float(np.max(traj.values[-1, right]))
    grid_rhs = smp_rhs(ce, np.linspace(-1, 1, 2001), t_horizon)
    v_final = smp_profile(ce, x, t_horizon)

    checks = {
        "residual_below_1e-6": res_max < 1e-6,
        "left_stays_zero": left_max <= 1e-6,
        "right_grows": right_max > 1e-3 * t_horizon,
        "rhs_nonnegative": bool(np.min(grid_rhs) >= 0),
    }
    violated = all(checks.values())
    return {
        "p": ce.p,
        "beta": ce.beta,
        "gamma": ce.gamma,
        "b": ce.b.to_record(),
        "kmin": ce.kmin,
        "b_range": [0.0, ce.t_range * ce.profile_max],
        "positivity_horizon": t0,
        "t_horizon": t_horizon,
        "analytic_residual_max": res_max,
        "analytic_residual_rms": res_rms,
        "solver_left_max": left_max,
        "solver_right_max": right_max,
        "solver_vs_analytic_max": float(np.max(np.abs(traj.values[-1] - v_final))),
        "nodes": nodes,
        "checks": checks,
        "verdict": (
            "SMP violated: nonnegative f, zero initial data, solution not everywhere positive"
            if violated
            else "inconclusive: at least one check failed"
        ),
        "violated": violated,
    }


# ----------------------------------------------------------------------
# SCP waiting time
# ----------------------------------------------------------------------


def psi_zero(x, t):
    return np.zeros_like(np.asarray(x, dtype=float))


def psi_right_bump(beta: float, gamma: float, scale: float = 0.5) -> Callable:
    """scale |x|^beta (1 - |x|^gamma) on x > 0, zero on x <= 0."""

    def psi(x, t):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        return np.where(x > 0, scale * ax**beta * (1.0 - ax**gamma), 0.0)

    return psi


@dataclass(frozen=True)
class ScpInstance:
    """Data of the waiting-time construction around u = 1 - |x|^alpha.

    The sources are h_i = f_s + |x|^beta psi_i(x, t).  ``C`` is the
    smallness constant of the supersolution bound.
    """

    p: float
    alpha: float
    beta: float
    C: float = 0.1
    psi1: Callable = psi_zero
    psi2: Callable | None = None
    b: BFunction = field(default_factory=Identity)
    kmin: float | None = None

    def __post_init__(self):
        problems = []
        if not self.p > 2:
            problems.append("need p > 2")
        elif not self.alpha >= max(2.0, self.p / (self.p - 2.0)):
            problems.append(f"need alpha >= max(2, p/(p-2)) = {max(2.0, self.p / (self.p - 2.0)):g}")
        if not self.beta > self.alpha:
            problems.append("need beta > alpha")
        if not self.C > 0:
            problems.append("need C > 0")
        if problems:
            raise DomainError("invalid waiting-time instance: " + "; ".join(problems))
        _check_b_bounded(self.b)
        if self.psi2 is None:
            object.__setattr__(self, "psi2", psi_right_bump(self.beta, self.gamma))
        if self.kmin is None:
            # v-hat stays in [0, 1 + t max|x|^beta(1 - |x|^gamma)] <= [0, 2] for t <= 1
            object.__setattr__(self, "kmin", b_prime_lower_bound(self.b, 2.0))

    @property
    def gamma(self) -> float:
        return self.beta - self.alpha

    def u(self, x):
        return 1.0 - np.abs(np.asarray(x, dtype=float)) ** self.alpha

    def v_hat(self, x, t):
        ax = np.abs(np.asarray(x, dtype=float))
        return 1.0 - ax**self.alpha + t * ax**self.beta * (1.0 - ax**self.gamma)

    def source(self, i: int) -> Callable:
        psi = self.psi1 if i == 1 else self.psi2

        def h(x, t):
            x = np.asarray(x, dtype=float)
            return scp_f_s(self, x) + np.abs(x) ** self.beta * psi(x, t)

        return h


def scp_f_s(inst: ScpInstance, x):
    """f_s = -(|u'|^(p-2) u')' for u = 1 - |x|^alpha."""
    p, a = inst.p, inst.alpha
    ax = np.abs(np.asarray(x, dtype=float))
    out = (p - 1.0) * a ** (p - 1.0) * (a - 1.0) * ax ** ((a - 1.0) * (p - 2.0) + a - 2.0)
    return float(out) if out.ndim == 0 else out


def _v_hat_flux(inst: ScpInstance, x, t):
    """|v_x|^(p-2) v_x for v-hat, odd in x."""
    p, a, be, ga = inst.p, inst.alpha, inst.beta, inst.gamma
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    dx = -a * ax ** (a - 1.0) + t * (be * ax ** (be - 1.0) - (be + ga) * ax ** (be + ga - 1.0))
    vx = np.sign(x) * dx
    return np.abs(vx) ** (p - 2.0) * vx


def _v_hat_flux_x_closed(inst: ScpInstance, x, t):
    p, a, be, ga = inst.p, inst.alpha, inst.beta, inst.gamma
    ax = np.abs(np.asarray(x, dtype=float))
    dx = -a * ax ** (a - 1.0) + t * (be * ax ** (be - 1.0) - (be + ga) * ax ** (be + ga - 1.0))
    dxx = -a * (a - 1.0) * ax ** (a - 2.0) + t * (
        be * (be - 1.0) * ax ** (be - 2.0) - (be + ga) * (be + ga - 1.0) * ax ** (be + ga - 2.0)
    )
    # even in x: sign factors of v_x and v_xx cancel
    return (p - 1.0) * np.abs(dx) ** (p - 2.0) * dxx


def _flux_x_fd(inst: ScpInstance, x, t, h=1e-3):
    """Fourth-order central difference of the closed-form flux.

    ``h`` may be an array; callers near x = 0 keep the stencil on one side of
    the kink by passing h <= |x|/2.
    """
    F = lambda y: _v_hat_flux(inst, y, t)  # noqa: E731
    x = np.asarray(x, dtype=float)
    return (-F(x + 2 * h) + 8 * F(x + h) - 8 * F(x - h) + F(x - 2 * h)) / (12 * h)


def _flux_x_fd_one_sided(inst: ScpInstance, x, t, h=1e-3, side=1.0):
    F = lambda y: _v_hat_flux(inst, y, t)  # noqa: E731
    x = np.asarray(x, dtype=float)
    s = side * h
    return (-25 * F(x) + 48 * F(x + s) - 36 * F(x + 2 * s) + 16 * F(x + 3 * s) - 3 * F(x + 4 * s)) / (12 * s)


def scp_hat_g(inst: ScpInstance, x, t, near_zero: float = 1e-2):
    """Return (g_hat, bound_ok) for the supersolution v-hat.

    g_hat = b'(v_hat) d_t v_hat - (|v_hat_x|^(p-2) v_hat_x)_x and bound_ok
    tells whether g_hat - f_s >= (1/2)|x|^beta (1 - |x|^gamma + (C/kmin) t).
    The flux derivative uses the closed form except within ``near_zero`` of
    x = 0, where a fourth-order difference of the flux is used.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ax = np.abs(x)
    flux_x = _v_hat_flux_x_closed(inst, x, t)
    near = ax < near_zero
    if np.any(near):
        xn = x[near]
        # the flux has a kink at 0, so the symmetric stencil there must be tiny
        h = np.where(xn == 0, 1e-6, np.minimum(near_zero / 8, np.abs(xn) / 2.5))
        flux_x[near] = _flux_x_fd(inst, xn, t, h=h)
    at_end = ax >= 1.0
    if np.any(at_end):
        # one-sided, pointing into the interval
        flux_x[at_end] = _flux_x_fd_one_sided(inst, x[at_end], t, h=1e-3, side=-np.sign(x[at_end]))
    vt = ax**inst.beta * (1.0 - ax**inst.gamma)
    g_hat = _b_prime_on(inst.b, np.maximum(inst.v_hat(x, t), 0.0)) * vt - flux_x
    rhs = 0.5 * ax**inst.beta * (1.0 - ax**inst.gamma + inst.C / inst.kmin * t)
    ok = g_hat - scp_f_s(inst, x) - rhs >= -1e-12 * (1.0 + np.abs(g_hat))
    return g_hat, ok


def scp_horizon(inst: ScpInstance, n: int = 2001, rtol: float = 1e-3, t_cap: float = 1.0) -> float:
    """Largest t (capped at ``t_cap``) for which the bound holds on an n-node grid for all t' <= t.

    Raises UnsupportedError when the bound fails at every t > 0, which
    signals that C is too large for hypothesis (i).
    """
    x = np.linspace(-1.0, 1.0, n)[1:-1]
    # the bound is checked at a ladder of earlier times as well: monotonicity
    # in t is not guaranteed pointwise
    def good(t):
        return all(bool(np.all(scp_hat_g(inst, x, s)[1])) for s in np.linspace(0.0, t, 9)[1:])

    if good(t_cap):
        return t_cap
    return _largest_good_time(good, rtol, t_cap=t_cap)


def _psi_hypotheses(inst: ScpInstance, t_horizon: float, n: int = 2001) -> dict:
    x = np.linspace(-1.0, 1.0, n)
    ax = np.abs(x)
    ordered, bounded_ct, bounded_ckt, distinct = True, True, True, True
    for t in np.linspace(0.0, t_horizon, 11)[1:]:
        p1, p2 = inst.psi1(x, t), inst.psi2(x, t)
        ordered &= bool(np.all(p1 >= -1e-15) and np.all(p1 <= p2 + 1e-15))
        # two readings of the bound: with and without the |x|^beta factor
        bounded_ct &= bool(np.all(p2 <= 0.5 * ax**inst.beta * (1 - ax**inst.gamma + inst.C * t) + 1e-15))
        bounded_ckt &= bool(np.all(p2 <= 0.5 * (1 - ax**inst.gamma + inst.C / inst.kmin * t) + 1e-15))
    for t in (1e-6 * t_horizon, 1e-3 * t_horizon):
        distinct &= bool(np.max(inst.psi2(x, t) - inst.psi1(x, t)) > 0)
    return {
        "ordered": ordered,
        "bound_with_C_t": bounded_ct,
        "bound_with_C_over_kmin_t": bounded_ckt,
        "distinct_on_every_slab": distinct,
    }


def demonstrate_waiting_time(
    inst: ScpInstance,
    nodes: int = 401,
    t_horizon: float | None = None,
    dt: float | None = None,
    tol: float | None = None,
    tol_u: float = 1e-3,
    numerics: NumericsConfig | None = None,
) -> dict:
    """Solve with both sources and check ordering, separation and pinning at x = 0.

    ``tol`` defaults to 1e-6 times max|u0|; ``tol_u`` bounds the distance to
    the stationary u on (-1, 0], which includes discretization error.
    """
    try:
        t_max = scp_horizon(inst)
    except UnsupportedError:
        return {
            "status": "rejected",
            "reason": "hypothesis (i) violated: the supersolution bound fails for every t > 0; choose a smaller C",
            "p": inst.p,
            "alpha": inst.alpha,
            "beta": inst.beta,
            "C": inst.C,
        }
    if t_horizon is None:
        t_horizon = t_max
    if t_horizon > t_max:
        return {
            "status": "rejected",
            "reason": (
                f"hypothesis (i) violated: the supersolution bound fails before t = {t_horizon:g} "
                f"(verified only up to {t_max:g}); choose a smaller C or a shorter horizon"
            ),
            "p": inst.p,
            "alpha": inst.alpha,
            "beta": inst.beta,
            "C": inst.C,
            "verified_horizon": t_max,
        }
    hyp = _psi_hypotheses(inst, t_horizon)
    if not (hyp["ordered"] and hyp["distinct_on_every_slab"] and hyp["bound_with_C_over_kmin_t"]):
        return {"status": "rejected", "reason": "the psi data violate the hypotheses", "hypotheses": hyp}

    domain = Interval(-1.0, 1.0)
    scale = 1.0
    tol = 1e-6 * scale if tol is None else tol
    if numerics is None:
        numerics = NumericsConfig(dt=dt if dt is not None else t_horizon / 100)
    runs = []
    for i in (1, 2):
        pb = ProblemSpec(domain, inst.p, 1.0, inst.b, inst.source(i), inst.u, t_horizon)
        runs.append(solve(pb, nodes, numerics))
    w1, w2 = runs[0].values, runs[1].values
    x = runs[0].coords[0]
    i0 = int(np.argmin(np.abs(x)))
    left = x <= 0
    u = inst.u(x)
    diff = w2 - w1
    left_zero = bool(np.all(inst.psi1(x[left], t_horizon) == 0) and np.all(inst.psi2(x[left], t_horizon) == 0))
    checks = {
        "ordered": bool(np.all(w1 <= w2 + tol)),
        "distinct": bool(np.max(np.abs(diff)) > 10 * tol),
        "pinned_at_zero": bool(np.max(np.abs(diff[:, i0])) <= tol),
    }
    if left_zero:
        checks["left_identical"] = bool(np.max(np.abs(diff[:, left])) <= tol)
        checks["left_equals_u"] = bool(
            max(np.max(np.abs(w1[:, left] - u[left])), np.max(np.abs(w2[:, left] - u[left]))) <= tol_u
        )
    return {
        "status": "ok",
        "p": inst.p,
        "alpha": inst.alpha,
        "beta": inst.beta,
        "gamma": inst.gamma,
        "C": inst.C,
        "kmin": inst.kmin,
        "b": inst.b.to_record(),
        "verified_horizon": t_max,
        "t_horizon": t_horizon,
        "tol": tol,
        "tol_u": tol_u,
        "hypotheses": hyp,
        "max_difference": float(np.max(np.abs(diff))),
        "difference_at_zero": float(np.max(np.abs(diff[:, i0]))),
        "left_difference": float(np.max(np.abs(diff[:, left]))),
        "left_distance_to_u": float(max(np.max(np.abs(w1[:, left] - u[left])), np.max(np.abs(w2[:, left] - u[left])))),
        "checks": checks,
        "waiting_time_observed": all(checks.values()),
    }


_COMPARABLE = ("domain", "p", "c", "b", "T")


def comparison_check(
    problem_a: ProblemSpec,
    problem_b: ProblemSpec,
    resolution: int = 201,
    numerics: NumericsConfig | None = None,
    tol: float | None = None,
) -> dict:
    """Discrete weak comparison: problem_a has data below problem_b.

    Returns a report whose ``passed`` entry is True when u_a <= u_b + tol at
    every node and saved step.  Specs may differ only in f and u0.
    """
    for name in _COMPARABLE:
        if getattr(problem_a, name) != getattr(problem_b, name):
            raise DomainError(f"problems differ in {name!r}; only f and u0 may differ")
    ta = solve(problem_a, resolution, numerics)
    tb = solve(problem_b, resolution, numerics)
    scale = max(float(np.max(np.abs(ta.values))), float(np.max(np.abs(tb.values))), 1e-300)
    tol = 1e-8 * scale if tol is None else tol
    gap = float(np.max(ta.values - tb.values))
    return {"passed": gap <= tol, "max_violation": gap, "tol": tol, "identical": bool(np.array_equal(ta.values, tb.values))}
