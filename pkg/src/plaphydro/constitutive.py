"""Time nonlinearities b(s), flux laws and the head <-> u change of variables.

The doubly nonlinear problem solved throughout the package is

    d/dt b(u) - c * div(|grad u|^(p-2) grad u) = f,

and for a phreatic aquifer the water table h satisfies

    phi * dh/dt - c * div(h |grad h|^(m-1) grad h) = g,    p = m + 1.

The substitution u = h^(p/(p-1)) - H^(p/(p-1)) maps the second equation onto
the first with ``AquiferHead`` as b and f = (p/(p-1))^(p-1) g.

Classes
-------
Identity, PowerRoot, AquiferHead
    The three families of b.
ConstitutiveLaw
    Power-type pressure-to-velocity law q = c (dh/dL)^m.
HeadTransform
    Maps between water-table height and the p-Laplacian variable u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError, UnsupportedError

__all__ = [
    "BFunction",
    "Identity",
    "PowerRoot",
    "AquiferHead",
    "ConstitutiveLaw",
    "HeadTransform",
    "b_eval",
    "b_prime",
    "b_prime_lower_bound",
    "flux_from_gradient",
    "head_to_u",
    "u_to_head",
    "source_to_f",
    "smp_condition",
    "leibenson_b",
    "b_from_record",
]


def _as_float_array(s: ArrayLike) -> np.ndarray:
    return np.asarray(s, dtype=float)


def _scalar_or_array(x: np.ndarray, like: ArrayLike):
    return float(x) if np.ndim(like) == 0 else x


class BFunction:
    """Base class for b: [0, inf) -> [0, inf) with b(0) = 0 and b' > 0 on (0, inf).

    Subclasses implement ``_value``, ``_prime``, ``_inverse`` and
    ``_inverse_prime`` on nonnegative float arrays.
    """

    kind = "abstract"

    def __call__(self, s: ArrayLike):
        return b_eval(self, s)

    # subclass hooks, arrays only
    def _value(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _prime(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inverse(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inverse_prime(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def prime_at_zero(self) -> float:
        """Right limit b'(0+), possibly ``inf`` or 0."""
        raise NotImplementedError

    def inverse(self, theta: ArrayLike):
        """b^{-1}(theta) for theta >= 0."""
        t = _as_float_array(theta)
        if np.any(t < 0):
            raise DomainError("b^{-1} is defined for theta >= 0 only")
        return _scalar_or_array(self._inverse(t), theta)

    def inverse_prime(self, theta: ArrayLike):
        """Derivative of b^{-1}; finite (possibly 0) at theta = 0."""
        t = _as_float_array(theta)
        if np.any(t < 0):
            raise DomainError("b^{-1} is defined for theta >= 0 only")
        return _scalar_or_array(self._inverse_prime(t), theta)

    def odd_value(self, s: np.ndarray) -> np.ndarray:
        """Odd extension sign(s) b(|s|), used by the solver on undershoots."""
        return np.sign(s) * self._value(np.abs(s))

    def odd_inverse(self, theta: np.ndarray) -> np.ndarray:
        return np.sign(theta) * self._inverse(np.abs(theta))

    def odd_inverse_prime(self, theta: np.ndarray) -> np.ndarray:
        return self._inverse_prime(np.abs(theta))

    def to_record(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(BFunction):
    """b(s) = s."""

    kind = "identity"

    def _value(self, s):
        return s.copy()

    def _prime(self, s):
        return np.ones_like(s)

    def _inverse(self, theta):
        return theta.copy()

    def _inverse_prime(self, theta):
        return np.ones_like(theta)

    def prime_at_zero(self):
        return 1.0

    def to_record(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class PowerRoot(BFunction):
    """b(s) = scale * s^(1/k).

    ``PowerRoot(1, k)`` is the time nonlinearity of the Barenblatt problem
    d/dt u^(1/k) = Delta_p u.
    """

    scale: float = 1.0
    k: float = 1.0
    kind = "power_root"

    def __post_init__(self):
        if not (self.scale > 0 and self.k > 0):
            raise DomainError("PowerRoot needs scale > 0 and k > 0")

    def _value(self, s):
        return self.scale * s ** (1.0 / self.k)

    def _prime(self, s):
        return (self.scale / self.k) * s ** (1.0 / self.k - 1.0)

    def _inverse(self, theta):
        return (theta / self.scale) ** self.k

    def _inverse_prime(self, theta):
        if self.k < 1.0:
            # inverse is concave with infinite slope at 0; clip for the solver
            theta = np.maximum(theta, 1e-300)
        return (self.k / self.scale) * (theta / self.scale) ** (self.k - 1.0)

    def prime_at_zero(self):
        if self.k > 1.0:
            return math.inf
        if self.k == 1.0:
            return self.scale
        return 0.0

    def to_record(self):
        return {"kind": self.kind, "scale": self.scale, "k": self.k}


@dataclass(frozen=True)
class AquiferHead(BFunction):
    """b(s) = phi (p/(p-1))^(p-1) [(s + H^(p/(p-1)))^((p-1)/p) - H].

    Water-table form of b: with u = h^(p/(p-1)) - H^(p/(p-1)) one has
    b(u) = phi (p/(p-1))^(p-1) (h - H).

    Args:
        phi_eff: Effective porosity in (0, 1).
        p: Exponent of the p-Laplacian, p = m + 1 > 1.
        H: Depth of the surrounding open water body (m), H >= 0.
    """

    phi_eff: float
    p: float
    H: float = 0.0
    kind = "aquifer_head"

    def __post_init__(self):
        if not (0.0 < self.phi_eff < 1.0):
            raise DomainError("phi_eff must lie in (0, 1)")
        if not self.p > 1.0:
            raise DomainError("AquiferHead needs p > 1")
        if not self.H >= 0.0:
            raise DomainError("AquiferHead needs H >= 0")

    @property
    def q(self) -> float:
        """Conjugate-type exponent p/(p-1)."""
        return self.p / (self.p - 1.0)

    @property
    def _coef(self) -> float:
        return self.phi_eff * self.q ** (self.p - 1.0)

    def _value(self, s):
        if self.H > 0:
            # H [(1 + s/H^q)^(1/q) - 1] without cancellation for small s
            return self._coef * self.H * np.expm1(np.log1p(s / self.H**self.q) / self.q)
        return self._coef * s ** (1.0 / self.q)

    def _prime(self, s):
        # d/ds (s + H^q)^(1/q) = (1/q)(s + H^q)^(-1/p)
        return self.phi_eff * self.q ** (self.p - 2.0) * (s + self.H**self.q) ** (-1.0 / self.p)

    def _inverse(self, theta):
        if self.H > 0:
            return self.H**self.q * np.expm1(self.q * np.log1p(theta / (self._coef * self.H)))
        return (theta / self._coef) ** self.q

    def _inverse_prime(self, theta):
        return (self.q / self._coef) * (self.H + theta / self._coef) ** (self.q - 1.0)

    def prime_at_zero(self):
        if self.H == 0.0:
            return math.inf
        return self.phi_eff * self.q ** (self.p - 2.0) * self.H ** (-1.0 / (self.p - 1.0))

    def to_record(self):
        return {"kind": self.kind, "phi_eff": self.phi_eff, "p": self.p, "H": self.H}


def b_eval(b: BFunction, s: ArrayLike):
    """Evaluate b at s >= 0 (scalar or array)."""
    arr = _as_float_array(s)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("b is defined on [0, inf) only")
    return _scalar_or_array(b._value(arr), s)


def b_prime(b: BFunction, s: ArrayLike):
    """Analytic derivative b'(s) for s > 0."""
    arr = _as_float_array(s)
    if np.any(arr <= 0) or np.any(~np.isfinite(arr)):
        raise DomainError("b' is evaluated on (0, inf) only; use prime_at_zero() for s = 0")
    return _scalar_or_array(b._prime(arr), s)


def b_prime_lower_bound(b: BFunction, s_max: float) -> float:
    """Infimum of b' over [0, s_max].

    A global positive lower bound does not exist for ``AquiferHead`` since
    b'(s) -> 0 as s -> inf, so callers supply the range the solution attains.
    """
    if not (s_max > 0 and math.isfinite(s_max)):
        raise DomainError("s_max must be a positive finite number")
    if isinstance(b, Identity):
        return 1.0
    if isinstance(b, PowerRoot):
        if b.k >= 1.0:
            return float(b._prime(np.asarray(s_max)))
        return 0.0
    if isinstance(b, AquiferHead):
        # b' is decreasing in s
        return float(b._prime(np.asarray(s_max)))
    grid = np.linspace(0.0, s_max, 2001)[1:]
    return float(min(b.prime_at_zero(), np.min(b._prime(grid))))


@dataclass(frozen=True)
class ConstitutiveLaw:
    """Power-type law q = c (dh/dL)^m; m = 1 is Darcy's law."""

    c: float
    m: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.m > 0):
            raise DomainError("ConstitutiveLaw needs c > 0 and m > 0")

    @property
    def is_darcy(self) -> bool:
        return self.m == 1.0

    def discharge(self, head_loss_per_length: ArrayLike):
        """Scalar form q = c (dh/dL)^m for a nonnegative head loss per length."""
        g = _as_float_array(head_loss_per_length)
        if np.any(g < 0):
            raise DomainError("head loss per length must be nonnegative")
        return _scalar_or_array(self.c * g**self.m, head_loss_per_length)

    def flux(self, grad: ArrayLike) -> np.ndarray:
        return flux_from_gradient(self, grad)


def flux_from_gradient(law: ConstitutiveLaw, grad: ArrayLike) -> np.ndarray:
    """Vector law q = -c |grad h|^(m-1) grad h, and q = 0 where grad h = 0.

    ``grad`` may be a single vector or an array whose last axis holds the
    components.
    """
    g = _as_float_array(grad)
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    safe = np.where(norm > 0, norm, 1.0)
    factor = np.where(norm > 0, law.c * safe ** (law.m - 1.0), 0.0)
    return -factor * g


@dataclass(frozen=True)
class HeadTransform:
    """u = h^(p/(p-1)) - H^(p/(p-1)) and its inverse."""

    p: float
    H: float = 0.0

    def __post_init__(self):
        if not self.p > 1.0:
            raise DomainError("HeadTransform needs p > 1")
        if not self.H >= 0.0:
            raise DomainError("HeadTransform needs H >= 0")

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def u_min(self) -> float:
        """Value of u for a dry aquifer (h = 0)."""
        return -(self.H**self.q)


def head_to_u(t: HeadTransform, hhat: ArrayLike):
    h = _as_float_array(hhat)
    if np.any(h < 0):
        raise DomainError("water-table height must be nonnegative")
    return _scalar_or_array(h**t.q - t.H**t.q, hhat)


def u_to_head(t: HeadTransform, u: ArrayLike):
    arr = _as_float_array(u)
    shifted = arr + t.H**t.q
    # tolerate round-off just below the dry state
    tol = 1e-14 * max(1.0, t.H**t.q)
    if np.any(shifted < -tol):
        raise DomainError(f"u must be >= {t.u_min!r}")
    return _scalar_or_array(np.maximum(shifted, 0.0) ** (1.0 / t.q), u)


def source_to_f(p: float, ghat: ArrayLike):
    """Right-hand side of the u-equation from the water-table source term."""
    if not p > 1.0:
        raise DomainError("source_to_f needs p > 1")
    g = _as_float_array(ghat)
    return _scalar_or_array((p / (p - 1.0)) ** (p - 1.0) * g, ghat)


def smp_condition(b: BFunction, p: float) -> str:
    """Classify lim_{s->0+} s^(2-p) b'(s) / |log s|^(p-1) for 1 < p < 2.

    Returns "holds" when the limit is 0 (strong maximum principle is
    guaranteed), "fails" when it is a positive constant or +inf, and
    "inconclusive" for families without a closed-form limit.
    """
    if not (1.0 < p < 2.0):
        raise UnsupportedError("the SMP criterion is stated for 1 < p < 2 only")
    if isinstance(b, Identity):
        # s^(2-p) / |log s|^(p-1) -> 0
        return "holds"
    if isinstance(b, PowerRoot):
        # s^((1 - k(p-1))/k) / |log s|^(p-1), times scale/k
        exponent = (1.0 - b.k * (p - 1.0)) / b.k
        return "fails" if exponent < 0 else "holds"
    if isinstance(b, AquiferHead):
        if b.H > 0:
            return "holds"
        # b'(s) ~ s^(-1/p): exponent 2 - p - 1/p = -(p-1)^2/p < 0
        return "fails"
    return "inconclusive"


def leibenson_b(kappa: float = 0.5) -> PowerRoot:
    """b with b'(s) = s^(-kappa), i.e. u^(-kappa) du/dt = d/dt b(u)."""
    if not (0.0 <= kappa < 1.0):
        raise DomainError("kappa must lie in [0, 1)")
    k = 1.0 / (1.0 - kappa)
    return PowerRoot(scale=k, k=k)


def b_from_record(record: dict) -> BFunction:
    """Build a b family from a tagged config record such as {kind = "identity"}."""
    rec = dict(record)
    kind = rec.pop("kind", None)
    try:
        if kind == "identity":
            if rec:
                raise TypeError(f"unexpected keys {sorted(rec)}")
            return Identity()
        if kind == "power_root":
            return PowerRoot(**rec)
        if kind == "aquifer_head":
            return AquiferHead(**rec)
        if kind == "leibenson":
            return leibenson_b(**rec)
    except TypeError as exc:
        raise DomainError(f"bad fields for b of kind {kind!r}: {exc}") from None
    raise DomainError(f"unknown b kind {kind!r}")
