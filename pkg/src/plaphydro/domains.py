"""Computational domains and uniform node grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["Interval", "Radial", "Rectangle", "domain_from_record"]


@dataclass(frozen=True)
class Interval:
    """Open interval (a, b) in meters with u = 0 at both ends."""

    a: float
    b: float
    kind = "interval"
    dim = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError("Interval needs a < b")

    @property
    def measure(self) -> float:
        return self.b - self.a

    def nodes(self, n: int) -> np.ndarray:
        return np.linspace(self.a, self.b, n)

    def distance_to_boundary(self, x0) -> float:
        x0 = float(np.asarray(x0).reshape(-1)[0])
        if not self.a < x0 < self.b:
            raise DomainError("point lies outside the interval")
        return min(x0 - self.a, self.b - x0)

    def to_record(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Radial:
    """Ball of radius r_max in R^N, described by r in [0, r_max].

    Measures are taken with the weight r^(N-1) (the surface factor of the
    unit sphere is left out), so for N = 1 this is the half line [0, r_max].
    """

    N: int
    r_max: float
    kind = "radial"
    dim = 1

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("Radial needs an integer dimension N >= 1")
        if not self.r_max > 0:
            raise DomainError("Radial needs r_max > 0")

    @property
    def measure(self) -> float:
        return self.r_max**self.N / self.N

    def nodes(self, n: int) -> np.ndarray:
        return np.linspace(0.0, self.r_max, n)

    def distance_to_boundary(self, x0) -> float:
        if np.any(np.asarray(x0, dtype=float) != 0.0):
            raise DomainError("radial domains only support solutions centred at the origin")
        return self.r_max

    def to_record(self):
        return {"kind": self.kind, "N": self.N, "r_max": self.r_max}


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle (a1, b1) x (a2, b2) in meters."""

    a1: float
    b1: float
    a2: float
    b2: float
    kind = "rectangle"
    dim = 2

    def __post_init__(self):
        if not (self.a1 < self.b1 and self.a2 < self.b2):
            raise DomainError("Rectangle needs a1 < b1 and a2 < b2")

    @property
    def measure(self) -> float:
        return (self.b1 - self.a1) * (self.b2 - self.a2)

    def nodes(self, n) -> tuple[np.ndarray, np.ndarray]:
        nx, ny = (n, n) if np.ndim(n) == 0 else n
        return np.linspace(self.a1, self.b1, nx), np.linspace(self.a2, self.b2, ny)

    def distance_to_boundary(self, x0) -> float:
        x, y = (float(v) for v in x0)
        if not (self.a1 < x < self.b1 and self.a2 < y < self.b2):
            raise DomainError("point lies outside the rectangle")
        return min(x - self.a1, self.b1 - x, y - self.a2, self.b2 - y)

    def to_record(self):
        return {"kind": self.kind, "a1": self.a1, "b1": self.b1, "a2": self.a2, "b2": self.b2}


def domain_from_record(record: dict):
    rec = dict(record)
    kind = rec.pop("kind", None)
    cls = {"interval": Interval, "radial": Radial, "rectangle": Rectangle}.get(kind)
    if cls is None:
        raise DomainError(f"unknown domain kind {kind!r}")
    try:
        return cls(**rec)
    except TypeError as exc:
        raise DomainError(f"bad fields for domain {kind!r}: {exc}") from None


def sphere_factor(N: int) -> float:
    """Surface area of the unit sphere in R^N (2 for N = 1)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)
