"""Turn run configurations and named presets into solver inputs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barenblatt import SelfSimilarSolution, shifted_solution
from .constitutive import HeadTransform, b_from_record, head_to_u, leibenson_b, source_to_f
from .config import RunConfig
from .domains import Interval, Radial, Rectangle
from .errors import ConfigError, DomainError, UnsupportedError
from .lawfit import build_groundwater_pde, derive_aquifer_law, fit_power, load_dataset
from .principles import SmpCounterexample, smp_rhs
from .solver import GriddedField, NumericsConfig, ProblemSpec

__all__ = ["Expanded", "build_domain", "build_problem", "build_numerics", "expand_scenario", "SCENARIOS"]


@dataclass
class Expanded:
    problem: ProblemSpec
    resolution: object
    numerics: NumericsConfig
    info: dict


def build_domain(section: dict):
    kind = section["kind"]
    if kind == "interval":
        return Interval(section["a"], section["b"])
    if kind == "radial":
        return Radial(section["N"], section["r_max"])
    return Rectangle(section["a1"], section["b1"], section["a2"], section["b2"])


def _sine(domain, amplitude):
    if isinstance(domain, Interval):
        a, b = domain.a, domain.b
        return lambda x: amplitude * np.sin(np.pi * (np.asarray(x) - a) / (b - a))
    if isinstance(domain, Radial):
        R = domain.r_max
        return lambda r: amplitude * np.cos(0.5 * np.pi * np.asarray(r) / R)
    d = domain
    return lambda X: amplitude * np.sin(np.pi * (X[0] - d.a1) / (d.b1 - d.a1)) * np.sin(np.pi * (X[1] - d.a2) / (d.b2 - d.a2))


def _bump(domain, amplitude, radius, x0):
    def dist(x):
        if isinstance(domain, Rectangle):
            return np.hypot(x[0] - x0[0], x[1] - x0[1])
        return np.abs(np.asarray(x, dtype=float) - x0[0])

    return lambda x: amplitude * np.clip(1.0 - (dist(x) / radius) ** 2, 0.0, None) ** 2


def _as_point(domain, x0):
    if x0 is None:
        if isinstance(domain, Interval):
            return (0.5 * (domain.a + domain.b),)
        if isinstance(domain, Radial):
            return (0.0,)
        return (0.5 * (domain.a1 + domain.b1), 0.5 * (domain.a2 + domain.b2))
    return tuple(np.atleast_1d(np.asarray(x0, dtype=float)))


def _initial(entry, domain, p, b):
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return float(entry)
    if not isinstance(entry, dict):
        raise ConfigError("u0 must be a number or an inline table")
    entry = dict(entry)
    if "csv" in entry:
        return GriddedField.from_csv(entry["csv"])
    preset = entry.pop("preset", None)
    if preset == "sine":
        return _sine(domain, float(entry.get("amplitude", 1.0)))
    if preset == "bump":
        return _bump(domain, float(entry.get("amplitude", 1.0)), float(entry.get("radius", 0.25)), _as_point(domain, entry.get("x0")))
    if preset == "barenblatt":
        N = domain.N if isinstance(domain, Radial) else domain.dim
        sol = SelfSimilarSolution(N, float(entry.get("k", 1.0)), p, float(entry.get("C", 1.0)))
        x0 = _as_point(domain, entry.get("x0"))
        shifted = shifted_solution(sol, x0 if len(x0) > 1 else x0[0], float(entry.get("sigma", 0.05)), domain)
        if shifted.b().to_record() != b.to_record():
            raise ConfigError(f"barenblatt initial data with k = {sol.k:g} needs b = {shifted.b().to_record()}")
        return shifted.u0
    raise ConfigError(f"unknown u0 preset {preset!r}")


def _source(entry, domain, p, b):
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return float(entry)
    if not isinstance(entry, dict):
        raise ConfigError("f must be a number or an inline table")
    entry = dict(entry)
    if "csv" in entry:
        return GriddedField.from_csv(entry["csv"])
    preset = entry.pop("preset", None)
    if preset == "constant":
        return float(entry.get("value", 0.0))
    if preset == "smp":
        ce = SmpCounterexample(p, float(entry["beta"]), float(entry["gamma"]), b)
        return lambda x, t: smp_rhs(ce, x, t)
    raise ConfigError(f"unknown f preset {preset!r}")


def build_numerics(section: dict) -> NumericsConfig:
    kw = {k: v for k, v in section.items() if v is not None}
    return NumericsConfig(**kw)


def build_problem(cfg: RunConfig) -> Expanded:
    """ProblemSpec, resolution and numerics for a solve configuration."""
    try:
        domain = build_domain(cfg.values["domain"])
        prob = cfg.values["problem"]
        record = dict(prob["b"])
        if record.get("kind") == "aquifer_head":
            record.setdefault("p", prob["p"])
        b = b_from_record(record)
        problem = ProblemSpec(
            domain,
            prob["p"],
            prob["c"],
            b,
            _source(prob["f"], domain, prob["p"], b),
            _initial(prob["u0"], domain, prob["p"], b),
            prob["T"],
        )
        numerics = build_numerics(cfg.values["numerics"])
    except (DomainError, UnsupportedError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return Expanded(problem, cfg.values["output"]["resolution"], numerics, {"b": b.to_record(), "domain": domain.to_record()})


# ----------------------------------------------------------------------
# named presets
# ----------------------------------------------------------------------


def _aquifer_pde(law_source: str):
    ds = load_dataset(law_source)
    fit = fit_power(ds)
    if "A_inlet" not in ds.meta or "phi_eff" not in ds.meta:
        raise ConfigError(f"dataset {law_source!r} lacks A_inlet/phi_eff metadata needed for an aquifer law")
    law = derive_aquifer_law(fit, float(ds.meta["A_inlet"]))
    return build_groundwater_pde(law, float(ds.meta["phi_eff"])), law


def _ditch(params: dict):
    L, H, mound = params["L"], params["H"], params["mound"]
    pde, law = _aquifer_pde(params["law"])
    tf = HeadTransform(pde.p, H)
    domain = Interval(-L / 2, L / 2)
    u0 = lambda x: head_to_u(tf, H + mound * np.cos(np.pi * np.asarray(x) / L) ** 2)  # noqa: E731
    f = float(source_to_f(pde.p, params["recharge"]))
    problem = ProblemSpec(domain, pde.p, pde.K, pde.b(H), f, u0, params["T"])
    info = {"groundwater_pde": pde.to_record(), "aquifer_law": law.to_record(), "H": H, "head_transform_q": tf.q}
    return problem, info


def _field(params: dict):
    Lx, Ly, H, mound = params["Lx"], params["Ly"], params["H"], params["mound"]
    pde, law = _aquifer_pde(params["law"])
    tf = HeadTransform(pde.p, H)
    domain = Rectangle(0.0, Lx, 0.0, Ly)

    def u0(X):
        return head_to_u(tf, H + mound * np.sin(np.pi * X[0] / Lx) * np.sin(np.pi * X[1] / Ly))

    f = float(source_to_f(pde.p, params["recharge"]))
    problem = ProblemSpec(domain, pde.p, pde.K, pde.b(H), f, u0, params["T"])
    info = {"groundwater_pde": pde.to_record(), "aquifer_law": law.to_record(), "H": H, "head_transform_q": tf.q}
    return problem, info


def _leibenson(params: dict):
    b = leibenson_b(params["kappa"])
    domain = Radial(params["N"], params["r_max"])
    R = 0.5 * params["r_max"]
    u0 = lambda r: np.clip(1.0 - (np.asarray(r) / R) ** 2, 0.0, None) ** 2  # noqa: E731
    problem = ProblemSpec(domain, params["p"], 1.0, b, 0.0, u0, params["T"])
    return problem, {"b": b.to_record(), "kappa": params["kappa"]}


SCENARIOS = {
    "ditch-drainage": {
        "builder": _ditch,
        "defaults": {"L": 10.0, "H": 1.0, "mound": 0.5, "law": "spic-2d", "recharge": 0.0, "T": 30.0},
        "numerics": {"dt": 0.5},
        "resolution": 201,
        "description": "strip field between two parallel ditches, water table relaxing to the ditch level",
    },
    "field-2d": {
        "builder": _field,
        "defaults": {"Lx": 20.0, "Ly": 10.0, "H": 1.0, "mound": 0.5, "law": "spic-2d", "recharge": 0.0, "T": 20.0},
        "numerics": {"dt": 0.5},
        "resolution": (41, 21),
        "description": "rectangular field with fixed boundary head",
    },
    "leibenson": {
        "builder": _leibenson,
        "defaults": {"kappa": 0.5, "p": 1.5, "N": 3, "r_max": 1.0, "T": 0.05},
        "numerics": {"dt": 1e-3},
        "resolution": 101,
        "description": "turbulent filtration of gas, radially symmetric in R^3",
    },
}


def expand_scenario(cfg: RunConfig | None = None, scenario_id: str | None = None) -> Expanded:
    """Fill a preset with defaults, then with values from ``cfg``."""
    sec = dict(cfg.values.get("scenario", {})) if cfg is not None else {}
    sid = sec.pop("id", scenario_id)
    if sid not in SCENARIOS:
        raise ConfigError(f"unknown scenario {sid!r} (known: {', '.join(SCENARIOS)})")
    preset = SCENARIOS[sid]
    stray = [k for k in sec if k not in preset["defaults"]]
    if stray:
        lines = cfg.lines if cfg is not None else {}
        raise ConfigError(
            [f"line {lines.get(('scenario', k))}: key {k!r} does not apply to scenario {sid!r}" for k in stray]
        )
    params = {**preset["defaults"], **sec}
    num_sec = dict(NumericsConfig().__dict__)
    num_sec.update(preset["numerics"])
    if cfg is not None:
        num_sec.update({k: v for k, v in cfg.values.get("numerics", {}).items() if v is not None})
    resolution = preset["resolution"]
    if cfg is not None and cfg.get("output", "resolution") is not None:
        resolution = cfg.get("output", "resolution")
    try:
        problem, info = preset["builder"](params)
        numerics = build_numerics(num_sec)
    except (DomainError, UnsupportedError) as exc:
        raise ConfigError(str(exc)) from None
    info = {"scenario": sid, "parameters": params, "p": problem.p, **info}
    return Expanded(problem, resolution, numerics, info)
