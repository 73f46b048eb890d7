"""Command-line entry point.

Every command prints a single JSON line
``{"command", "status", "key_results", "artifact_paths"}`` and exits with 0
on success, 1 on invalid input and 2 on a numerical failure.  Relative
output paths are resolved against ``$PLAPHYDRO_OUT`` (default: the current
directory).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .barenblatt import SelfSimilarSolution, eval_solution, front_radius, make_solution
from .config import SCENARIO_SCHEMA, SOLVE_SCHEMA, parse_config, tomllib
from .constitutive import AquiferHead, Identity, PowerRoot, leibenson_b, smp_condition
from .errors import ConfigError, DomainError, SolverError, UnsupportedError
from .lawfit import build_groundwater_pde, derive_aquifer_law, fit_darcy, fit_power, load_dataset
from .principles import ScpInstance, SmpCounterexample, demonstrate_smp_failure, demonstrate_waiting_time
from .scenarios import SCENARIOS, build_problem, expand_scenario
from .solver import solve

__all__ = ["main", "write_trajectory_csv", "write_manifest"]

OUT_ENV = "PLAPHYDRO_OUT"

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------


def _out_root() -> Path:
    return Path(os.environ.get(OUT_ENV, "."))


def _resolve(path: str | None, default: str) -> Path:
    p = Path(path if path is not None else default)
    if not p.is_absolute():
        p = _out_root() / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _fmt(v) -> str:
    return repr(float(v))


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def write_trajectory_csv(path: Path, traj) -> Path:
    """Rows (t, x, u) or (t, x, y, u) for every saved time."""
    lines = []
    if len(traj.coords) == 1:
        lines.append("t,x,u")
        x = traj.coords[0]
        for t, row in zip(traj.times, traj.values):
            ts = _fmt(t)
            lines.extend(f"{ts},{_fmt(xi)},{_fmt(ui)}" for xi, ui in zip(x, row))
    else:
        lines.append("t,x,y,u")
        X, Y = np.meshgrid(*traj.coords, indexing="ij")
        for t, field in zip(traj.times, traj.values):
            ts = _fmt(t)
            lines.extend(f"{ts},{_fmt(a)},{_fmt(b)},{_fmt(u)}" for a, b, u in zip(X.ravel(), Y.ravel(), field.ravel()))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_manifest(path: Path, command: str, config: dict, results: dict) -> Path:
    """JSON manifest with the tool version and the config echo; no timestamps."""
    doc = {"tool": "plaphydro", "version": __version__, "command": command, "config": config, "results": results}
    path.write_text(json.dumps(_to_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


def _write_csv(path: Path, header: list[str], columns) -> Path:
    rows = [",".join(header)]
    rows.extend(",".join(_fmt(v) for v in vals) for vals in zip(*columns))
    path.write_text("\n".join(rows) + "\n")
    return path


def _trajectory_summary(traj) -> dict:
    m = traj.mass_series()
    return {
        "steps": len(traj.diagnostics) - 1,
        "saved_times": len(traj.times),
        "final_time": float(traj.times[-1]),
        "final_max": float(np.max(traj.values[-1])),
        "final_min": float(np.min(traj.values[-1])),
        "mass_initial": float(m[0]),
        "mass_final": float(m[-1]),
        "max_nonlinear_iterations": max(d.iterations for d in traj.diagnostics),
    }


def _diagnostics_record(traj) -> dict:
    return {
        "times": traj.times,
        "mass_series": traj.mass_series(),
        "support_series": traj.support_series(),
        "steps": [
            {"step": d.step, "t": d.t, "dt": d.dt, "iterations": d.iterations, "residual": d.residual, "method": d.method}
            for d in traj.diagnostics
        ],
    }


# ----------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------


def _parse_sweep(item: str, schema: dict):
    key, sep, values = item.partition("=")
    if not sep or not values:
        raise ConfigError(f"--sweep expects key=v1,v2,... (got {item!r})")
    if "." in key:
        section, _, name = key.partition(".")
    else:
        owners = [s for s, fields in schema.items() if key in fields]
        if len(owners) != 1:
            raise ConfigError(f"--sweep key {key!r} is ambiguous or unknown; use section.key")
        section, name = owners[0], key
    if name not in schema.get(section, {}):
        raise ConfigError(f"--sweep key {section}.{name} is not a config key")
    return section, name, [v.strip() for v in values.split(",") if v.strip()]


def _literal(value: str) -> str:
    """TOML literal for a sweep value; bare quantities such as 1e-3 s become strings."""
    try:
        tomllib.loads(f"v = {value}")
        return value
    except tomllib.TOMLDecodeError:
        return json.dumps(value)


def _override(text: str, section: str, key: str, literal: str) -> str:
    """Replace (or insert) ``key`` in ``[section]`` of the config text."""
    lines = text.splitlines()
    current = None
    header_at = None
    for i, line in enumerate(lines):
        s = line.strip()
        m = re.match(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]", s)
        if m:
            current = m.group(1)
            if current == section:
                header_at = i
            continue
        if current == section and re.match(rf"^{re.escape(key)}\s*=", s):
            lines[i] = f"{key} = {literal}"
            return "\n".join(lines) + "\n"
    if header_at is None:
        lines += ["", f"[{section}]", f"{key} = {literal}"]
    else:
        lines.insert(header_at + 1, f"{key} = {literal}")
    return "\n".join(lines) + "\n"


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", text).strip("_")


def _expand_sweeps(text: str, sweeps: list[str], schema: dict) -> list[tuple[str, str]]:
    """(suffix, text) for every combination, in a fixed order."""
    variants = [("", text)]
    for item in sweeps:
        section, name, values = _parse_sweep(item, schema)
        variants = [
            (f"{suffix}__{name}-{_slug(v)}", _override(t, section, name, _literal(v))) for suffix, t in variants for v in values
        ]
    return variants


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------


def _run_config_text(text: str, suffix: str, default_name: str, out_dir: str | None, scenario_id: str | None = None):
    if scenario_id is not None and not text.strip():
        cfg = None
        exp = expand_scenario(None, scenario_id)
    else:
        cfg = parse_config(text, SCENARIO_SCHEMA if scenario_id is not None else None)
        exp = expand_scenario(cfg) if cfg.kind == "scenario" else build_problem(cfg)
    name = (cfg.get("output", "name") if cfg is not None else None) or default_name
    name = f"{name}{suffix}"
    traj = solve(exp.problem, exp.resolution, exp.numerics)
    base = Path(out_dir) if out_dir else Path(".")
    csv_path = write_trajectory_csv(_resolve(str(base / f"{name}.csv"), ""), traj)
    echo = cfg.echo() if cfg is not None else {"kind": "scenario", "text": "", "values": {"scenario": {"id": scenario_id}}}
    results = {"summary": _trajectory_summary(traj), "problem": exp.info, "diagnostics": _diagnostics_record(traj)}
    man_path = write_manifest(_resolve(str(base / f"{name}.json"), ""), "solve" if scenario_id is None else "scenario", echo, results)
    return {"name": name, **results["summary"], **({"p": exp.info["p"]} if "p" in exp.info else {})}, [str(csv_path), str(man_path)]


def _run_many(text: str, sweeps, default_name, out_dir, scenario_id=None):
    schema = SCENARIO_SCHEMA if (scenario_id is not None or "[scenario]" in text) else SOLVE_SCHEMA
    variants = _expand_sweeps(text, sweeps or [], schema)
    if len(variants) == 1:
        res, paths = _run_config_text(variants[0][1], "", default_name, out_dir, scenario_id)
        return res, paths
    with ThreadPoolExecutor(max_workers=min(len(variants), os.cpu_count() or 1)) as pool:
        futures = [pool.submit(_run_config_text, t, suffix, default_name, out_dir, scenario_id) for suffix, t in variants]
        outcomes = [f.result() for f in futures]
    return {"runs": [r for r, _ in outcomes]}, [p for _, paths in outcomes for p in paths]


def cmd_solve(args):
    text = Path(args.config).read_text(encoding="utf-8")
    return _run_many(text, args.sweep, "run", args.out_dir)


def cmd_scenario(args):
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        if args.id:
            raise ConfigError("give either --id or --config, not both")
    elif args.id:
        if args.id not in SCENARIOS:
            raise ConfigError(f"unknown scenario {args.id!r} (known: {', '.join(SCENARIOS)})")
        text = f'[scenario]\nid = "{args.id}"\n' if args.sweep else ""
    else:
        raise ConfigError("scenario needs --id or --config")
    return _run_many(text, args.sweep, args.id or "scenario", args.out_dir, scenario_id=args.id or "config")


def cmd_barenblatt(args):
    if args.C is not None:
        sol = SelfSimilarSolution(args.n, args.k, args.p, args.C)
    else:
        sol = make_solution(args.n, args.k, args.p, args.normalization)
    times = args.t
    if any(t <= 0 for t in times):
        raise DomainError("times must be positive")
    if sol.regime == "compact":
        s_max = args.smax if args.smax is not None else 1.2 * sol.s_front
    else:
        s_max = args.smax if args.smax is not None else 10.0
    s = np.linspace(0.0, s_max, args.samples)
    profile_path = _write_csv(_resolve(args.out, "barenblatt_profile.csv"), ["s", "B"], [s, sol.profile(s)])
    r_max = float(np.max(np.atleast_1d(front_radius(sol, max(times))))) * 1.2 if sol.regime == "compact" else s_max * max(times) ** sol.lam
    r = np.linspace(0.0, r_max, args.samples)
    cols = [[], [], []]
    for t in times:
        cols[0].extend(r)
        cols[1].extend([t] * r.size)
        cols[2].extend(eval_solution(sol, r, t))
    sol_path = _write_csv(profile_path.with_name(profile_path.stem + "_solution.csv"), ["r", "t", "w"], cols)
    res = {
        "N": sol.N,
        "k": sol.k,
        "p": sol.p,
        "regime": sol.regime,
        "lambda": sol.lam,
        "mu": sol.mu,
        "gamma_exp": sol.gamma_exp,
        "kappa": sol.kappa,
        "C": sol.C,
    }
    if sol.regime == "compact":
        res["front_radius"] = {repr(t): float(front_radius(sol, t)) for t in times}
    man_path = write_manifest(profile_path.with_suffix(".json"), "barenblatt", {"argv": vars_echo(args)}, res)
    return res, [str(profile_path), str(sol_path), str(man_path)]


def cmd_fit(args):
    ds = load_dataset(args.data)
    laws = ["darcy", "power"] if args.law == "both" else [args.law]
    fits = {name: (fit_darcy(ds) if name == "darcy" else fit_power(ds)) for name in laws}
    A = args.A if args.A is not None else ds.meta.get("A_inlet")
    phi = args.phi_eff if args.phi_eff is not None else ds.meta.get("phi_eff")
    key = {"dataset": ds.meta.get("id"), "n": ds.n, "rmse_ddof": ds.rmse_ddof}
    report = {"dataset": ds.meta, "fits": {}}
    for name, fit in fits.items():
        entry = {"parameters": fit.params, "rmse": fit.rmse}
        rec = fit.to_record()
        if A is not None:
            law = derive_aquifer_law(fit, float(A), args.rho, args.g)
            rec["derived_law"] = law.to_record()
            entry["K"], entry["e"] = law.K, law.e
            if phi is not None:
                pde = build_groundwater_pde(law, float(phi))
                rec["pde"] = pde.to_record()
                entry["pde"] = pde.to_record()
        key[name] = entry
        report["fits"][name] = rec
    path = _resolve(args.out, f"fit_{_slug(str(ds.meta.get('id')))}.json")
    write_manifest(path, "fit", {"argv": vars_echo(args)}, report)
    return key, [str(path)]


def _b_from_args(args, p=None):
    kind = args.b
    if kind == "identity":
        return Identity()
    if kind == "power_root":
        return PowerRoot(args.scale, args.k)
    if kind == "leibenson":
        return leibenson_b(args.kappa)
    if kind == "aquifer_head":
        return AquiferHead(args.phi_eff, args.b_p if args.b_p is not None else p, args.H)
    raise ConfigError(f"unknown b kind {kind!r}")


def cmd_smp_check(args):
    b = _b_from_args(args, args.p)
    verdict = smp_condition(b, args.p)
    return {"b": b.to_record(), "p": args.p, "condition": verdict}, []


def cmd_smp_counterexample(args):
    b = _b_from_args(args, args.p)
    ce = SmpCounterexample(args.p, args.beta, args.gamma, b)
    report = demonstrate_smp_failure(ce, nodes=args.nodes)
    path = _resolve(args.out, "smp_counterexample.json")
    write_manifest(path, "smp-counterexample", {"argv": vars_echo(args)}, report)
    keys = ("positivity_horizon", "kmin", "analytic_residual_max", "solver_left_max", "solver_right_max", "verdict", "violated")
    return {k: report[k] for k in keys}, [str(path)]


def cmd_scp_waiting_time(args):
    b = _b_from_args(args, args.p)
    inst = ScpInstance(args.p, args.alpha, args.beta, args.C, b=b)
    report = demonstrate_waiting_time(inst, nodes=args.nodes, t_horizon=args.t_horizon)
    path = _resolve(args.out, "scp_waiting_time.json")
    write_manifest(path, "scp-waiting-time", {"argv": vars_echo(args)}, report)
    if report["status"] != "ok":
        raise ConfigError(report["reason"])
    keys = ("verified_horizon", "t_horizon", "max_difference", "difference_at_zero", "checks", "waiting_time_observed")
    return {k: report[k] for k in keys}, [str(path)]


def cmd_plot_data(args):
    if args.trajectory:
        data = np.genfromtxt(args.trajectory, delimiter=",", names=True)
        times = np.unique(data["t"])
        t = times[-1] if args.time is None else times[np.argmin(np.abs(times - args.time))]
        sel = data[data["t"] == t]
        cols = ["x", "y", "u"] if "y" in data.dtype.names else ["x", "u"]
        arrays = [sel[c] for c in cols]
        default = f"{Path(args.trajectory).stem}_t{_slug(format(float(t), '.6g'))}.dat"
        key = {"time": float(t), "rows": int(sel.size)}
    else:
        ds = load_dataset(args.data)
        cols = ["v_inlet", "e_grad"]
        arrays = [ds.v_inlet, ds.e_grad]
        if args.law != "none":
            fit = fit_darcy(ds) if args.law == "darcy" else fit_power(ds)
            cols.append(f"{args.law}_fit")
            arrays.append(fit.evaluate(ds.v_inlet))
        default = f"{_slug(str(ds.meta.get('id')))}_{args.law}.dat"
        key = {"dataset": ds.meta.get("id"), "rows": ds.n}
    path = _resolve(args.out, default)
    echo = json.dumps(_to_jsonable(vars_echo(args)), sort_keys=True)
    lines = [f"# plaphydro {__version__} plot-data {echo}", "# " + " ".join(cols)]
    lines.extend(" ".join(_fmt(v) for v in row) for row in zip(*arrays))
    path.write_text("\n".join(lines) + "\n")
    return {**key, "columns": cols}, [str(path)]


def vars_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "handler"}


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def _add_b_args(p, default="identity"):
    p.add_argument("--b", default=default, choices=["identity", "power_root", "leibenson", "aquifer_head"])
    p.add_argument("--k", type=float, default=2.0, help="power_root exponent")
    p.add_argument("--scale", type=float, default=1.0, help="power_root prefactor")
    p.add_argument("--kappa", type=float, default=0.5, help="leibenson exponent")
    p.add_argument("--phi-eff", dest="phi_eff", type=float, default=0.0347)
    p.add_argument("--H", type=float, default=1.0, help="open-water depth in m (aquifer b)")
    p.add_argument("--b-p", dest="b_p", type=float, default=None, help="p of the aquifer b (defaults to --p)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plaphydro", description="Doubly nonlinear p-Laplacian groundwater toolkit")
    parser.add_argument("--version", action="version", version=f"plaphydro {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="run the solver on a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--sweep", action="append", help="section.key=v1,v2,... (repeatable)")
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("scenario", help="run a named preset")
    p.add_argument("--id", choices=sorted(SCENARIOS))
    p.add_argument("--config")
    p.add_argument("--sweep", action="append")
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(handler=cmd_scenario)

    p = sub.add_parser("barenblatt", help="self-similar profile and solution samples")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--C", type=float)
    p.add_argument("--normalization", default="profile", choices=["profile", "physical"])
    p.add_argument("--t", type=float, nargs="+", default=[1.0])
    p.add_argument("--smax", type=float)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_barenblatt)

    p = sub.add_parser("fit", help="fit Darcy and power laws to a flow dataset")
    p.add_argument("--data", required=True, help="embedded id (spic-2d, spic-3d) or CSV path")
    p.add_argument("--law", default="both", choices=["darcy", "power", "both"])
    p.add_argument("--A", type=float, help="inlet area in m^2 (default: dataset metadata)")
    p.add_argument("--phi-eff", dest="phi_eff", type=float)
    p.add_argument("--rho", type=float, default=1000.0)
    p.add_argument("--g", type=float, default=9.8066)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("smp-check", help="classify the strong maximum principle condition for 1 < p < 2")
    p.add_argument("--p", type=float, required=True)
    _add_b_args(p)
    p.set_defaults(handler=cmd_smp_check)

    p = sub.add_parser("smp-counterexample", help="build and verify the p > 2 counterexample")
    p.add_argument("--p", type=float, default=3.0)
    p.add_argument("--beta", type=float, default=4.0)
    p.add_argument("--gamma", type=float, default=4.0)
    p.add_argument("--nodes", type=int, default=401)
    p.add_argument("--out")
    _add_b_args(p)
    p.set_defaults(handler=cmd_smp_counterexample)

    p = sub.add_parser("scp-waiting-time", help="waiting-time demonstration at x = 0")
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=3.0)
    p.add_argument("--C", type=float, default=0.1)
    p.add_argument("--t-horizon", dest="t_horizon", type=float)
    p.add_argument("--nodes", type=int, default=401)
    p.add_argument("--out")
    _add_b_args(p)
    p.set_defaults(handler=cmd_scp_waiting_time)

    p = sub.add_parser("plot-data", help="plain numeric columns for plotting")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data")
    src.add_argument("--trajectory")
    p.add_argument("--law", default="power", choices=["darcy", "power", "none"])
    p.add_argument("--time", type=float)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_plot_data)
    return parser


def _emit(command, status, key_results, paths):
    line = json.dumps(
        _to_jsonable({"command": command, "status": status, "key_results": key_results, "artifact_paths": paths}),
        sort_keys=True,
    )
    print(line)


def main(argv=None) -> int:
    parser = build_parser()
    command = None
    try:
        args = parser.parse_args(argv)
        command = args.command
        if command is None:
            raise _UsageError("a command is required")
        key, paths = args.handler(args)
    except _UsageError as exc:
        _emit(command, "error", {"errors": [str(exc)]}, [])
        return EXIT_INVALID
    except ConfigError as exc:
        _emit(command, "error", {"errors": exc.violations}, [])
        return EXIT_INVALID
    except (DomainError, UnsupportedError, FileNotFoundError, ValueError) as exc:
        _emit(command, "error", {"errors": [str(exc)]}, [])
        return EXIT_INVALID
    except SolverError as exc:
        _emit(command, "failed", {"errors": [str(exc)], "step": exc.step}, [])
        return EXIT_NUMERIC
    _emit(command, "ok", key, paths)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
