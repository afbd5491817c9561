"""Small callable data objects: constants, steps, and tabulated profiles.

Scenario data (initial profiles, boundary data) must be recognisable as
constant when they are, since several checks only apply to constant data.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.value)

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.value, self.value)


@dataclass(frozen=True)
class Step:
    """``left`` for s < at, ``right`` for s >= at."""

    left: float
    right: float
    at: float = 0.5

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s < self.at, self.left, self.right)

    @property
    def bounds(self) -> tuple[float, float]:
        return (min(self.left, self.right), max(self.left, self.right))


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation through (nodes, values); constant extension outside."""

    nodes: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.values) or len(self.nodes) < 1:
            raise ValueError("table needs matching, non-empty node and value columns")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("table nodes must be strictly increasing")

    def __call__(self, s):
        return np.interp(np.asarray(s, dtype=float), self.nodes, self.values)

    @property
    def bounds(self) -> tuple[float, float]:
        return (min(self.values), max(self.values))

    @classmethod
    def from_csv(cls, path: str | Path) -> PiecewiseLinear:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]  # header
        nodes = tuple(float(r[0]) for r in rows)
        values = tuple(float(r[1]) for r in rows)
        return cls(nodes, values)


@dataclass(frozen=True)
class PiecewiseConstant:
    """Value ``values[j]`` on the j-th of ``len(values)`` equal subintervals of [0, 1]."""

    values: tuple[float, ...]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        n = len(self.values)
        idx = np.clip((s * n).astype(int), 0, n - 1)
        return np.asarray(self.values)[idx]

    @property
    def bounds(self) -> tuple[float, float]:
        return (min(self.values), max(self.values))

    @classmethod
    def random(cls, rng: np.random.Generator, pieces: int = 32, lo: float = 0.0, hi: float = 1.0):
        return cls(tuple(rng.uniform(lo, hi, size=pieces)))


def sampled_bounds(fn, lo: float = 0.0, hi: float = 1.0, n: int = 4097) -> tuple[float, float]:
    """Declared bounds of ``fn`` if it carries them, otherwise sampled extrema."""
    b = getattr(fn, "bounds", None)
    if b is not None:
        return tuple(b)
    vals = np.asarray(fn(np.linspace(lo, hi, n)), dtype=float)
    return float(vals.min()), float(vals.max())


def as_function(value):
    if callable(value):
        return value
    return Constant(float(value))
