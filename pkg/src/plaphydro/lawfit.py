"""Flow-law fits for fracture networks and the groundwater equation they imply.

Simulated fracture flow gives pairs (inlet velocity, gradient of the mean
total mechanical energy).  Fitting y = alpha u (Darcy) or y = beta u^gamma
(power law) and composing with the inlet area turns the fit into an aquifer
law q = K (dh/dL)^e, which in turn fixes the exponent p = e + 1 of the
doubly nonlinear water-table equation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .constitutive import AquiferHead, ConstitutiveLaw
from .errors import ConfigError, DomainError, SolverError

__all__ = [
    "RHO_WATER",
    "G_STANDARD",
    "FlowDataset",
    "FitResult",
    "AquiferLaw",
    "GroundwaterPde",
    "total_energy",
    "piezometric_head",
    "average_total_energy",
    "fit_darcy",
    "fit_power",
    "rmse",
    "derive_aquifer_law",
    "build_groundwater_pde",
    "load_dataset",
    "EMBEDDED",
]

RHO_WATER = 1000.0
G_STANDARD = 9.8066

EMBEDDED = {"spic-2d": "spic_2d.csv", "spic-3d": "spic_3d.csv"}


@dataclass(frozen=True)
class FlowDataset:
    """Rows of (v_inlet [m/s], e_grad [J/m^3 per m]) plus metadata.

    ``meta`` keys used downstream: ``id``, ``label``, ``A_inlet``,
    ``phi_eff``, ``rmse_ddof`` (divisor offset for the reported RMSE).
    """

    v_inlet: np.ndarray
    e_grad: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        u = np.asarray(self.v_inlet, dtype=float)
        y = np.asarray(self.e_grad, dtype=float)
        object.__setattr__(self, "v_inlet", u)
        object.__setattr__(self, "e_grad", y)
        if u.shape != y.shape or u.ndim != 1 or u.size == 0:
            raise ConfigError("v_inlet and e_grad must be equal-length nonempty 1D arrays")
        problems = []
        for i in range(u.size):
            if not (np.isfinite(u[i]) and u[i] > 0):
                problems.append(f"row {i + 1}: v_inlet must be positive")
            if not (np.isfinite(y[i]) and y[i] > 0):
                problems.append(f"row {i + 1}: e_grad must be positive")
            if i > 0 and not u[i] > u[i - 1]:
                problems.append(f"row {i + 1}: v_inlet must be strictly increasing")
        if problems:
            raise ConfigError(problems)

    @property
    def n(self) -> int:
        return int(self.v_inlet.size)

    @property
    def rmse_ddof(self) -> int:
        return int(self.meta.get("rmse_ddof", 1))


@dataclass(frozen=True)
class FitResult:
    law: str
    params: dict
    rmse: float
    n: int
    residuals: np.ndarray
    trace: list = field(default_factory=list)
    dataset_id: str | None = None

    def evaluate(self, u):
        u = np.asarray(u, dtype=float)
        if self.law == "darcy":
            return self.params["alpha"] * u
        return self.params["beta"] * u ** self.params["gamma"]

    def invert(self, y):
        y = np.asarray(y, dtype=float)
        if self.law == "darcy":
            return y / self.params["alpha"]
        return (y / self.params["beta"]) ** (1.0 / self.params["gamma"])

    def to_record(self) -> dict:
        return {
            "law": self.law,
            "parameters": dict(self.params),
            "rmse": self.rmse,
            "n": self.n,
            "residuals": [float(r) for r in self.residuals],
            "trace": list(self.trace),
            "dataset": self.dataset_id,
        }


@dataclass(frozen=True)
class AquiferLaw:
    """q = K (dh/dL)^e with the constants it was derived from."""

    K: float
    e: float
    rho: float = RHO_WATER
    g: float = G_STANDARD
    A_inlet: float = 1.0
    fit_id: str | None = None

    def __post_init__(self):
        if not (self.K > 0 and self.e > 0):
            raise DomainError("AquiferLaw needs K > 0 and e > 0")

    def as_constitutive(self) -> ConstitutiveLaw:
        return ConstitutiveLaw(self.K, self.e)

    def discharge(self, head_loss_per_length):
        return self.as_constitutive().discharge(head_loss_per_length)

    def to_record(self) -> dict:
        return {"K": self.K, "e": self.e, "rho": self.rho, "g": self.g, "A_inlet": self.A_inlet, "fit": self.fit_id}


@dataclass(frozen=True)
class GroundwaterPde:
    """phi dh/dt - K div(h |grad h|^(e-1) grad h) = g for the water table h.

    The factor h is the saturated thickness above the bedrock.  Under
    u = h^q - H^q with q = p/(p-1) and p = e + 1 this is the doubly
    nonlinear equation d_t b(u) - K Delta_p u = q^(p-1) g with the aquifer b.
    """

    phi_eff: float
    K: float
    grad_exponent: float
    p: float

    def b(self, H: float = 0.0) -> AquiferHead:
        return AquiferHead(self.phi_eff, self.p, H)

    def flux(self, h, grad):
        """Discharge per unit width -K h |grad h|^(e-1) grad h, zero at zero gradient."""
        q = ConstitutiveLaw(self.K, self.grad_exponent + 1.0).flux(grad)
        return np.asarray(h, dtype=float)[..., None] * q if np.ndim(grad) > np.ndim(h) else np.asarray(h) * q

    def to_record(self) -> dict:
        return {"phi_eff": self.phi_eff, "K": self.K, "grad_exponent": self.grad_exponent, "p": self.p}


# ----------------------------------------------------------------------
# energies and heads
# ----------------------------------------------------------------------


def _check_rho_g(rho, g):
    if not (rho > 0 and g > 0):
        raise DomainError("rho and g must be positive")


def total_energy(z, P, v, rho: float = RHO_WATER, g: float = G_STANDARD):
    """Total mechanical energy per unit volume z rho g + P + rho v^2 / 2."""
    _check_rho_g(rho, g)
    return np.asarray(z) * rho * g + np.asarray(P) + 0.5 * rho * np.asarray(v) ** 2


def piezometric_head(z, P, rho: float = RHO_WATER, g: float = G_STANDARD):
    _check_rho_g(rho, g)
    return np.asarray(z) + np.asarray(P) / (rho * g)


def average_total_energy(intervals) -> float:
    """Mean of E_T over a union of cross-section intervals.

    ``intervals`` is a sequence of (coords, values) pairs, each with at
    least two samples; the mean is the trapezoidal integral over the union
    divided by its total length.
    """
    num = den = 0.0
    count = 0
    for coords, values in intervals:
        x = np.asarray(coords, dtype=float)
        e = np.asarray(values, dtype=float)
        if x.size < 2 or x.shape != e.shape:
            raise DomainError("each interval needs at least two (coordinate, value) samples")
        num += float(np.trapezoid(e, x)) if hasattr(np, "trapezoid") else float(np.trapz(e, x))
        den += float(x[-1] - x[0])
        count += 1
    if count == 0 or not den > 0:
        raise DomainError("empty cross-section")
    return num / den


# ----------------------------------------------------------------------
# fits
# ----------------------------------------------------------------------


def rmse(residuals, ddof: int = 1) -> float:
    """sqrt(sum r^2 / (n - ddof))."""
    r = np.asarray(residuals, dtype=float)
    if r.size < 2:
        raise DomainError("rmse needs at least two residuals")
    if not 0 <= ddof < r.size:
        raise DomainError("ddof must lie in [0, n)")
    return float(np.sqrt(np.sum(r**2) / (r.size - ddof)))


def _reported_rmse(r: np.ndarray, ddof: int) -> float:
    if r.size < 2:
        return float(np.sqrt(np.mean(r**2)))
    return rmse(r, ddof)


def fit_darcy(ds: FlowDataset) -> FitResult:
    """Least squares through the origin, alpha = sum(u y) / sum(u^2)."""
    u, y = ds.v_inlet, ds.e_grad
    suu = float(np.dot(u, u))
    if suu == 0:
        raise DomainError("degenerate dataset: sum of u^2 is zero")
    alpha = float(np.dot(u, y)) / suu
    r = alpha * u - y
    return FitResult("darcy", {"alpha": alpha}, _reported_rmse(r, ds.rmse_ddof), ds.n, r, [], ds.meta.get("id"))


def fit_power(ds: FlowDataset, max_iter: int = 200, rtol: float = 1e-10) -> FitResult:
    """Raw-scale least squares for y = beta u^gamma.

    Starts from the log-log regression line and refines with Gauss-Newton,
    halving the step (up to 30 times) until the objective decreases.
    """
    u, y = ds.v_inlet, ds.e_grad
    if ds.n < 3:
        raise DomainError("power fit needs at least three rows")
    lu = np.log(u)
    gamma, logb = np.polyfit(lu, np.log(y), 1)
    params = np.array([math.exp(logb), gamma])

    def resid(pr):
        return pr[0] * u ** pr[1] - y

    def sse(pr):
        return float(np.sum(resid(pr) ** 2))

    trace = [{"iter": 0, "beta": params[0], "gamma": params[1], "sse": sse(params)}]
    for it in range(1, max_iter + 1):
        r = resid(params)
        up = u ** params[1]
        J = np.column_stack([up, params[0] * up * lu])
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        f0 = sse(params)
        lam = 1.0
        for _ in range(30):
            trial = params + lam * step
            if trial[0] > 0 and sse(trial) <= f0:
                break
            lam *= 0.5
        else:
            trial = params
        change = float(np.max(np.abs(trial - params) / np.abs(trial)))
        params = trial
        trace.append({"iter": it, "beta": params[0], "gamma": params[1], "sse": sse(params), "step": lam})
        if change < rtol:
            break
    else:
        raise SolverError(f"power fit did not converge in {max_iter} iterations", residual_history=trace)
    r = resid(params)
    return FitResult(
        "power",
        {"beta": float(params[0]), "gamma": float(params[1])},
        _reported_rmse(r, ds.rmse_ddof),
        ds.n,
        r,
        trace,
        ds.meta.get("id"),
    )


def derive_aquifer_law(fit: FitResult, A_inlet: float, rho: float = RHO_WATER, g: float = G_STANDARD) -> AquiferLaw:
    """Compose q = A v with v = f^-1(rho g dh/dL)."""
    _check_rho_g(rho, g)
    if not A_inlet > 0:
        raise DomainError("A_inlet must be positive")
    if fit.law == "darcy":
        return AquiferLaw(A_inlet * rho * g / fit.params["alpha"], 1.0, rho, g, A_inlet, fit.dataset_id)
    beta, gamma = fit.params["beta"], fit.params["gamma"]
    return AquiferLaw(A_inlet * (rho * g / beta) ** (1.0 / gamma), 1.0 / gamma, rho, g, A_inlet, fit.dataset_id)


def build_groundwater_pde(law: AquiferLaw, phi_eff: float) -> GroundwaterPde:
    if not (0.0 < phi_eff < 1.0):
        raise DomainError("phi_eff must lie in (0, 1)")
    return GroundwaterPde(phi_eff, law.K, law.e - 1.0, law.e + 1.0)


# ----------------------------------------------------------------------
# datasets
# ----------------------------------------------------------------------


def _coerce_meta(value: str):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def _parse_csv(text: str, origin: str) -> FlowDataset:
    meta: dict = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(io.StringIO(text), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                meta[key.strip()] = _coerce_meta(value.strip())
            continue
        fields = next(csv.reader([stripped]))
        if not header_seen:
            if [f.strip() for f in fields] != ["v_inlet", "e_grad"]:
                raise ConfigError(f"{origin}: line {lineno}: expected header 'v_inlet,e_grad'")
            header_seen = True
            continue
        if len(fields) != 2:
            raise ConfigError(f"{origin}: row {len(rows) + 1} (line {lineno}): expected two columns")
        try:
            rows.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise ConfigError(f"{origin}: row {len(rows) + 1} (line {lineno}): non-numeric value") from None
    if not header_seen or not rows:
        raise ConfigError(f"{origin}: no data rows")
    arr = np.array(rows)
    meta.setdefault("id", origin)
    try:
        return FlowDataset(arr[:, 0], arr[:, 1], meta)
    except ConfigError as exc:
        raise ConfigError([f"{origin}: {v}" for v in exc.violations]) from None


def load_dataset(source) -> FlowDataset:
    """Load an embedded table by id ('spic-2d', 'spic-3d') or a CSV path."""
    if isinstance(source, str) and source in EMBEDDED:
        text = resources.files(__package__).joinpath("data").joinpath(EMBEDDED[source]).read_text()
        return _parse_csv(text, source)
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"dataset {source!r} is neither an embedded id nor a readable file")
    return _parse_csv(path.read_text(), str(path))
