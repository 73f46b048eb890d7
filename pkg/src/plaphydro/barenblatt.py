"""Radially symmetric self-similar solutions of d/dt w^(1/k) = Delta_p w.

In radial form the equation reads

    d/dt w^(1/k) = r^(1-N) d/dr ( r^(N-1) |w_r|^(p-2) w_r ),

and the ansatz w(r, t) = t^(-mu) B(r t^(-lambda)) with

    lambda = 1 / ((N k + 1)(p - 1) + 1 - N),    mu = N k lambda

turns it into an ODE with the first integral

    |B'|^(p-2) B' + lambda s B^(1/k) = 0.

With a = 1/(k(p-1)) and q = p/(p-1) this integrates to

    a < 1 (compact):      B = [max(0, C - kappa s^q)]^(1/(1-a))
    a = 1 (exponential):  B = C exp(-((p-1)/p) lambda^(1/(p-1)) s^q)
    a > 1 (fat tail):     B = [C + kappa s^q]^(1/(1-a))

where kappa = |1 - a| ((p-1)/p) lambda^(1/(p-1)).  The choice mu = N k lambda
is the one that conserves int w^(1/k) r^(N-1) dr, so the w^(1/k) mass, not
the w mass, is constant in time unless k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

from .domains import Interval, Radial, Rectangle
from .errors import DomainError, UnsupportedError

__all__ = [
    "SelfSimilarSolution",
    "ShiftedSolution",
    "similarity_exponents",
    "profile_params",
    "make_solution",
    "normalize_mass",
    "profile_mass",
    "eval_solution",
    "front_radius",
    "pde_residual",
    "shifted_solution",
]

COMPACT = "compact"
EXPONENTIAL = "exponential"
FAT_TAIL = "fat-tail"

_REGIME_RTOL = 1e-12
# alternative spelling accepted for the profile-mass mode
_MODE_ALIASES = {"paper": "profile"}


def _check_inputs(N, k, p):
    if int(N) != N or N < 1:
        raise DomainError("N must be an integer >= 1")
    if not (k > 0 and p > 1):
        raise DomainError("need k > 0 and p > 1")


def _regime(k: float, p: float) -> str:
    kp = k * (p - 1.0)
    if math.isclose(kp, 1.0, rel_tol=_REGIME_RTOL):
        return EXPONENTIAL
    return COMPACT if kp > 1.0 else FAT_TAIL


def similarity_exponents(N: int, k: float, p: float) -> tuple[float, float]:
    """Return (lambda, mu) for w = t^(-mu) B(r t^(-lambda))."""
    _check_inputs(N, k, p)
    if _regime(k, p) == EXPONENTIAL:
        # (Nk + 1)(p - 1) + 1 - N collapses to p
        lam = 1.0 / p
    else:
        denom = (N * k + 1.0) * (p - 1.0) + 1.0 - N
        if not denom > 0:
            raise UnsupportedError("no positive similarity exponent for these (N, k, p)")
        lam = 1.0 / denom
    return lam, N * k * lam


def profile_params(N: int, k: float, p: float) -> tuple[float | None, float]:
    """Return (gamma_exp, kappa) of the profile.

    In the exponential regime gamma_exp is ``None`` and kappa is the
    coefficient in the exponent, ((p-1)/p) lambda^(1/(p-1)).
    """
    lam, _ = similarity_exponents(N, k, p)
    a = 1.0 / (k * (p - 1.0))
    base = ((p - 1.0) / p) * lam ** (1.0 / (p - 1.0))
    regime = _regime(k, p)
    if regime == EXPONENTIAL:
        return None, base
    return 1.0 / (1.0 - a), abs(1.0 - a) * base


@dataclass(frozen=True)
class SelfSimilarSolution:
    """Barenblatt-type solution for one (N, k, p) with profile constant C."""

    N: int
    k: float
    p: float
    C: float = 1.0
    normalization: str = "explicit"
    regime: str = field(init=False)
    lam: float = field(init=False)
    mu: float = field(init=False)
    gamma_exp: float | None = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        lam, mu = similarity_exponents(self.N, self.k, self.p)
        gamma_exp, kappa = profile_params(self.N, self.k, self.p)
        if not self.C > 0:
            raise DomainError("profile constant C must be positive")
        object.__setattr__(self, "regime", _regime(self.k, self.p))
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "gamma_exp", gamma_exp)
        object.__setattr__(self, "kappa", kappa)

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def s_front(self) -> float:
        """Edge of the profile support (compact regime only)."""
        if self.regime != COMPACT:
            raise UnsupportedError("no finite front outside the compact regime")
        return (self.C / self.kappa) ** (1.0 / self.q)

    def profile(self, s: ArrayLike):
        s_arr = np.abs(np.asarray(s, dtype=float))
        sq = s_arr**self.q
        if self.regime == COMPACT:
            # exact zero from the front on, not a roundoff-sized remainder
            out = np.where(s_arr < self.s_front, np.maximum(self.C - self.kappa * sq, 0.0), 0.0) ** self.gamma_exp
        elif self.regime == EXPONENTIAL:
            out = self.C * np.exp(-self.kappa * sq)
        else:
            out = (self.C + self.kappa * sq) ** self.gamma_exp
        return float(out) if np.ndim(s) == 0 else out

    def profile_derivative(self, s: ArrayLike):
        """Closed-form B'(s) for s >= 0."""
        s_arr = np.asarray(s, dtype=float)
        dsq = self.q * s_arr ** (self.q - 1.0)
        if self.regime == COMPACT:
            inner = np.maximum(self.C - self.kappa * s_arr**self.q, 0.0)
            out = np.where(
                inner > 0,
                -self.gamma_exp * self.kappa * dsq * inner ** (self.gamma_exp - 1.0),
                0.0,
            )
        elif self.regime == EXPONENTIAL:
            out = -self.kappa * dsq * self.profile(s_arr)
        else:
            inner = self.C + self.kappa * s_arr**self.q
            out = self.gamma_exp * self.kappa * dsq * inner ** (self.gamma_exp - 1.0)
        return float(out) if np.ndim(s) == 0 else out

    def __call__(self, r, t):
        return eval_solution(self, r, t)


def _mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in ("profile", "physical"):
        raise DomainError(f"unknown normalization mode {mode!r}")
    return mode


def make_solution(N: int, k: float, p: float, normalization="profile") -> SelfSimilarSolution:
    """Build a solution normalized by ``"profile"``, ``"physical"`` or an explicit C."""
    if isinstance(normalization, str):
        normalization = _mode(normalization)
        sol = SelfSimilarSolution(N, k, p, 1.0, normalization)
        return replace(sol, C=normalize_mass(sol, normalization))
    return SelfSimilarSolution(N, k, p, float(normalization), "explicit")


def profile_mass(sol: SelfSimilarSolution, mode: str = "profile") -> float:
    """int_0^inf B(s) s^(N-1) ds (``profile``) or int B^(1/k) s^(N-1) ds (``physical``)."""
    power = 1.0 if _mode(mode) == "profile" else 1.0 / sol.k
    if sol.regime == FAT_TAIL and abs(sol.gamma_exp) * power * sol.q <= sol.N:
        raise UnsupportedError("the tail integral diverges for this regime and mode")

    def integrand(s):
        return sol.profile(s) ** power * s ** (sol.N - 1)

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    if sol.regime == COMPACT:
        val, _ = integrate.quad(integrand, 0.0, sol.s_front, **opts)
        return val
    # split at the profile scale so the adaptive rule sees the bulk
    scale = (sol.C / sol.kappa) ** (1.0 / sol.q) if sol.regime == FAT_TAIL else sol.kappa ** (-1.0 / sol.q)
    head, _ = integrate.quad(integrand, 0.0, scale, **opts)
    tail, _ = integrate.quad(integrand, scale, np.inf, **opts)
    return head + tail


def normalize_mass(sol: SelfSimilarSolution, mode: str = "profile") -> float:
    """Profile constant C for which ``profile_mass(sol, mode) == 1``.

    The mass is monotone in C (increasing for compact and exponential
    profiles, decreasing in the fat-tail regime where C sits in the
    denominator), so a bracket is grown by doubling and bisected in log C.
    """
    direction = -1.0 if sol.regime == FAT_TAIL else 1.0

    def excess(log_c):
        # increasing in log_c whatever the regime
        return direction * (profile_mass(replace(sol, C=math.exp(log_c)), mode) - 1.0)

    lo = hi = 0.0
    f_lo = f_hi = excess(0.0)
    step = math.log(2.0)
    for _ in range(400):
        if f_hi >= 0:
            break
        lo, f_lo = hi, f_hi
        hi += step
        f_hi = excess(hi)
    else:
        raise UnsupportedError("could not bracket the normalization constant")
    for _ in range(400):
        if f_lo <= 0:
            break
        hi, f_hi = lo, f_lo
        lo -= step
        f_lo = excess(lo)
    else:
        raise UnsupportedError("could not bracket the normalization constant")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = excess(mid)
        if f_mid == 0 or hi - lo < 1e-15:
            return math.exp(mid)
        if f_mid < 0:
            lo = mid
        else:
            hi = mid
    return math.exp(0.5 * (lo + hi))


def eval_solution(sol: SelfSimilarSolution, r: ArrayLike, t):
    """w(r, t) = t^(-mu) B(r t^(-lambda)) for t > 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("the self-similar solution is evaluated for t > 0 only")
    r_arr = np.asarray(r, dtype=float)
    out = t_arr ** (-sol.mu) * sol.profile(r_arr * t_arr ** (-sol.lam))
    return float(out) if np.ndim(out) == 0 else out


def front_radius(sol: SelfSimilarSolution, t):
    """t^lambda (C/kappa)^((p-1)/p), compact regime only."""
    if sol.regime != COMPACT:
        raise UnsupportedError("no finite front outside the compact regime")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise DomainError("front_radius needs t > 0")
    out = t_arr**sol.lam * sol.s_front
    return float(out) if np.ndim(out) == 0 else out


def pde_residual(sol: SelfSimilarSolution, r: ArrayLike, t: ArrayLike, h: float) -> float:
    """Max finite-difference residual of the radial equation over r x t samples.

    Central differences of step h are used in both r and t, so the residual
    is O(h^2) wherever w is smooth.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(r < h):
        raise DomainError("samples must stay at least h away from r = 0")
    if np.any(t <= h):
        raise DomainError("samples must satisfy t > h")
    if sol.regime == COMPACT and np.any(r[:, None] > front_radius(sol, t[None, :] - h) - 3 * h):
        raise DomainError("samples must stay at least 3h inside the front")
    R, T = np.meshgrid(r, t, indexing="ij")
    inv_k = 1.0 / sol.k
    dt_term = (eval_solution(sol, R, T + h) ** inv_k - eval_solution(sol, R, T - h) ** inv_k) / (2 * h)

    def weighted_flux(rf):
        wr = (eval_solution(sol, rf + h / 2, T) - eval_solution(sol, rf - h / 2, T)) / h
        return rf ** (sol.N - 1) * np.abs(wr) ** (sol.p - 2.0) * wr

    div = (weighted_flux(R + h / 2) - weighted_flux(R - h / 2)) / h / R ** (sol.N - 1)
    return float(np.max(np.abs(dt_term - div)))


@dataclass(frozen=True)
class ShiftedSolution:
    """u(x, t) = w(|x - x0|, t + sigma), an exact solution with f = 0 on a domain.

    Valid for t <= ``horizon_max``, the time after which the front would
    reach the boundary.
    """

    sol: SelfSimilarSolution
    x0: tuple
    sigma: float
    domain: object
    dist: float
    horizon_max: float

    def b(self):
        from .constitutive import PowerRoot

        return PowerRoot(1.0, self.sol.k)

    def radius(self, x) -> np.ndarray:
        if isinstance(self.domain, Rectangle):
            X, Y = x
            return np.hypot(np.asarray(X) - self.x0[0], np.asarray(Y) - self.x0[1])
        return np.abs(np.asarray(x, dtype=float) - self.x0[0])

    def __call__(self, x, t):
        return eval_solution(self.sol, self.radius(x), np.asarray(t, dtype=float) + self.sigma)

    def u0(self, x):
        return self(x, 0.0)

    def front(self, t):
        return front_radius(self.sol, np.asarray(t, dtype=float) + self.sigma)

    def mass(self, t) -> float:
        """int_Omega b(u(x, t)) dx by adaptive quadrature in the radius."""
        sol = self.sol
        tt = float(t) + self.sigma
        rf = float(front_radius(sol, tt))
        val, _ = integrate.quad(
            lambda r: eval_solution(sol, r, tt) ** (1.0 / sol.k) * r ** (sol.N - 1),
            0.0,
            rf,
            epsabs=1e-13,
            epsrel=1e-12,
            limit=400,
        )
        if isinstance(self.domain, Interval):
            return 2.0 * val
        if isinstance(self.domain, Rectangle):
            return 2.0 * math.pi * val
        return val


def shifted_solution(sol: SelfSimilarSolution, x0, sigma: float, domain, horizon: float | None = None) -> ShiftedSolution:
    """Translate a compact-support solution by x0 in space and sigma in time.

    The front stays inside the domain while
    t + sigma < (kappa/C)^((p-1)/(p lambda)) dist(x0, boundary)^(1/lambda).
    """
    if sol.regime != COMPACT:
        raise UnsupportedError("shifted solutions require the compact regime")
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    if isinstance(domain, Interval) and sol.N != 1:
        raise DomainError("an Interval domain needs N = 1")
    if isinstance(domain, Rectangle) and sol.N != 2:
        raise DomainError("a Rectangle domain needs N = 2")
    if isinstance(domain, Radial) and domain.N != sol.N:
        raise DomainError("Radial domain dimension does not match N")
    x0_t = tuple(float(v) for v in np.atleast_1d(np.asarray(x0, dtype=float)))
    dist = domain.distance_to_boundary(x0_t if isinstance(domain, Rectangle) else x0_t[0])
    t_exit = (sol.kappa / sol.C) ** ((sol.p - 1.0) / (sol.p * sol.lam)) * dist ** (1.0 / sol.lam)
    horizon_max = t_exit - sigma
    if horizon_max <= 0:
        raise UnsupportedError(f"front already outside the domain at t = 0; need sigma < {t_exit!r}")
    if horizon is not None and horizon >= horizon_max:
        raise UnsupportedError(
            f"front leaves the domain before t = {horizon!r}; maximal admissible horizon is {horizon_max!r}"
        )
    return ShiftedSolution(sol, x0_t, float(sigma), domain, dist, horizon_max)
