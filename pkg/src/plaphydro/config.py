"""Run configuration files: sectioned ``key = value`` text.

The format is a line-oriented subset of TOML.  Each value must fit on one
line and is parsed as a TOML value (numbers, strings, booleans, arrays,
inline tables).  Lengths and times are written as strings with a unit, e.g.
``L = "10 m"`` or ``T = "0.5 h"``; a bare number there is rejected.

Example::

    [domain]
    kind = "interval"
    a = "0 m"
    b = "1 m"

    [problem]
    p = 2.0
    c = 1.0
    T = "0.1 s"
    b = { kind = "identity" }
    u0 = { preset = "sine", amplitude = 1.0 }
    f = 0.0

    [numerics]
    dt = "1e-4 s"

    [output]
    resolution = 257
    name = "heat"
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "parse_quantity", "LENGTH_UNITS", "TIME_UNITS", "SOLVE_SCHEMA", "SCENARIO_SCHEMA"]

LENGTH_UNITS = {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "km": 1e3}
TIME_UNITS = {"s": 1.0, "min": 60.0, "h": 3600.0, "d": 86400.0}
_UNITS = {"length": LENGTH_UNITS, "time": TIME_UNITS}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]+)\s*$")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_quantity(value, kind: str) -> float:
    """Convert ``"10 m"`` / ``"2 min"`` to SI; raises ValueError with a reason."""
    units = _UNITS[kind]
    if not isinstance(value, str):
        raise ValueError(f"needs a unit ({'/'.join(units)}), e.g. \"1 {next(iter(units))}\"")
    m = _QUANTITY.match(value)
    if not m:
        raise ValueError(f"cannot read {value!r} as a {kind} with unit")
    number, unit = m.groups()
    if unit not in units:
        raise ValueError(f"unknown {kind} unit {unit!r} (use one of {', '.join(units)})")
    return float(number) * units[unit]


# field kinds: number, posint, bool, str, length, time, any, resolution
@dataclass(frozen=True)
class Field:
    kind: str
    required: bool = False
    default: object = None


SOLVE_SCHEMA = {
    "domain": {
        "kind": Field("str", True),
        "a": Field("length"),
        "b": Field("length"),
        "N": Field("posint"),
        "r_max": Field("length"),
        "a1": Field("length"),
        "b1": Field("length"),
        "a2": Field("length"),
        "b2": Field("length"),
    },
    "problem": {
        "p": Field("number", True),
        "c": Field("number", False, 1.0),
        "T": Field("time", True),
        "b": Field("any", False, {"kind": "identity"}),
        "u0": Field("any", False, 0.0),
        "f": Field("any", False, 0.0),
    },
    "numerics": {
        "dt": Field("time", True),
        "adaptive": Field("bool", False, False),
        "dt_min": Field("time"),
        "dt_max": Field("time"),
        "eps_reg": Field("number"),
        "tol_nonlinear": Field("number", False, 1e-10),
        "max_iters": Field("posint", False, 50),
        "jacobian_floor": Field("number", False, 1e-12),
        "save_every": Field("posint", False, 1),
    },
    "output": {
        "resolution": Field("resolution", True),
        "name": Field("str", False, "run"),
    },
}

_DOMAIN_KEYS = {"interval": ("a", "b"), "radial": ("N", "r_max"), "rectangle": ("a1", "b1", "a2", "b2")}

SCENARIO_SCHEMA = {
    "scenario": {
        "id": Field("str", True),
        "L": Field("length"),
        "Lx": Field("length"),
        "Ly": Field("length"),
        "H": Field("length"),
        "mound": Field("length"),
        "law": Field("str"),
        "recharge": Field("number"),
        "kappa": Field("number"),
        "p": Field("number"),
        "N": Field("posint"),
        "r_max": Field("length"),
        "T": Field("time"),
    },
    "numerics": SOLVE_SCHEMA["numerics"] | {"dt": Field("time")},
    "output": {"resolution": Field("resolution"), "name": Field("str", False, None)},
}


@dataclass
class RunConfig:
    """Validated configuration.

    ``values[section][key]`` holds SI floats for lengths and times;
    ``raw`` keeps the values as written and ``text`` the file verbatim.
    """

    text: str
    values: dict
    raw: dict
    lines: dict = field(default_factory=dict)
    kind: str = "solve"

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def echo(self) -> dict:
        return {"kind": self.kind, "text": self.text, "values": self.raw}


def _read_lines(text: str):
    """Yield (lineno, section, key, raw_value) and collect syntax errors."""
    errors = []
    entries = []
    section = None
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            m = re.match(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]\s*(#.*)?$", stripped)
            if not m:
                errors.append(f"line {lineno}: malformed section header")
                continue
            section = m.group(1)
            if section in seen:
                errors.append(f"line {lineno}: section [{section}] appears twice")
            seen.add(section)
            continue
        key, sep, rest = stripped.partition("=")
        key = key.strip()
        if not sep or not _KEY.match(key):
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        if section is None:
            errors.append(f"line {lineno}: key {key!r} outside any section")
            continue
        try:
            value = tomllib.loads(f"v = {rest.strip()}")["v"]
        except tomllib.TOMLDecodeError as exc:
            errors.append(f"line {lineno}: cannot parse value of {key!r}: {exc}")
            continue
        entries.append((lineno, section, key, value))
    return entries, errors


def _convert(value, fld: Field, where: str):
    kind = fld.kind
    if kind in ("length", "time"):
        return parse_quantity(value, kind)
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError("must be a number")
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return float(value)
    if kind == "posint":
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError("must be a positive integer")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            raise ValueError("must be true or false")
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ValueError("must be a string")
        return value
    if kind == "resolution":
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, list) and len(value) == 2 and all(isinstance(v, int) for v in value):
            return tuple(value)
        raise ValueError("must be an integer or a pair of integers")
    return value


def _convert_record(value, key: str):
    """Unit handling inside inline tables (b records and u0/f presets)."""
    if not isinstance(value, dict):
        return value
    out = {}
    for k, v in value.items():
        if k in ("H", "x0", "radius", "r_max"):
            out[k] = parse_quantity(v, "length")
        elif k in ("sigma",):
            out[k] = parse_quantity(v, "time")
        else:
            out[k] = v
    return out


def parse_config(text: str, schema: dict | None = None) -> RunConfig:
    """Parse and validate; every problem found is reported with its line.

    Without an explicit ``schema`` a file containing a ``[scenario]``
    section is validated as a scenario, anything else as a solve run.
    """
    entries, errors = _read_lines(text)
    if schema is None:
        is_scenario = any(sec == "scenario" for _, sec, _, _ in entries)
        schema = SCENARIO_SCHEMA if is_scenario else SOLVE_SCHEMA
    kind = "scenario" if schema is SCENARIO_SCHEMA else "solve"
    values: dict = {}
    raw: dict = {}
    lines: dict = {}
    for lineno, section, key, value in entries:
        if section not in schema:
            errors.append(f"line {lineno}: unknown section [{section}]")
            continue
        fld = schema[section].get(key)
        if fld is None:
            errors.append(f"line {lineno}: unknown key {key!r} in [{section}]")
            continue
        if key in values.get(section, {}):
            errors.append(f"line {lineno}: duplicate key {key!r} in [{section}]")
            continue
        try:
            conv = _convert(value, fld, f"[{section}] {key}")
            if fld.kind == "any":
                conv = _convert_record(value, key)
        except ValueError as exc:
            errors.append(f"line {lineno}: [{section}] {key} {exc}")
            continue
        values.setdefault(section, {})[key] = conv
        raw.setdefault(section, {})[key] = value
        lines[(section, key)] = lineno
    for section, fields in schema.items():
        for key, fld in fields.items():
            present = key in values.get(section, {})
            if fld.required and not present:
                errors.append(f"missing required key {key!r} in [{section}]")
            elif not present and fld.default is not None:
                values.setdefault(section, {})[key] = fld.default
    if kind == "solve":
        errors.extend(_check_solve(values, lines))
    if errors:
        raise ConfigError(errors)
    return RunConfig(text, values, raw, lines, kind)


def _check_solve(values: dict, lines: dict) -> list:
    errs = []
    dom = values.get("domain", {})
    kind = dom.get("kind")
    if kind is not None:
        if kind not in _DOMAIN_KEYS:
            errs.append(f"line {lines.get(('domain', 'kind'))}: unknown domain kind {kind!r}")
        else:
            for key in _DOMAIN_KEYS[kind]:
                if key not in dom:
                    errs.append(f"missing required key {key!r} in [domain] for kind {kind!r}")
            for key in dom:
                if key != "kind" and key not in _DOMAIN_KEYS[kind]:
                    errs.append(f"line {lines.get(('domain', key))}: key {key!r} does not apply to a {kind} domain")
    prob = values.get("problem", {})
    p = prob.get("p")
    if p is not None and not p > 1:
        errs.append(f"line {lines.get(('problem', 'p'))}: p must be > 1 (got {p:g})")
    c = prob.get("c")
    if c is not None and not c > 0:
        errs.append(f"line {lines.get(('problem', 'c'))}: c must be positive")
    T = prob.get("T")
    if T is not None and not T > 0:
        errs.append(f"line {lines.get(('problem', 'T'))}: T must be positive")
    b = prob.get("b")
    if b is not None and not (isinstance(b, dict) and "kind" in b):
        errs.append(f"line {lines.get(('problem', 'b'))}: b must be an inline table with a 'kind'")
    elif isinstance(b, dict) and b.get("kind") == "aquifer_head" and p is not None and b.get("p", p) != p:
        errs.append(f"line {lines.get(('problem', 'b'))}: aquifer b has p = {b.get('p')} but the problem has p = {p}")
    num = values.get("numerics", {})
    dt = num.get("dt")
    if dt is not None and not dt > 0:
        errs.append(f"line {lines.get(('numerics', 'dt'))}: dt must be positive")
    res = values.get("output", {}).get("resolution")
    if res is not None and min(res if isinstance(res, tuple) else (res,)) < 16:
        errs.append(f"line {lines.get(('output', 'resolution'))}: resolution must be at least 16 nodes")
    return errs
