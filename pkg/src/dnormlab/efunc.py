"""Bounded functions on [0, 1]: the arguments of a D-norm.

A function is represented by its values on a uniform grid over [0, 1] plus an
optional list of spikes (t, x) at exact, possibly off-grid, locations.  Spikes
are never snapped to the grid: every supremum or product below iterates over
grid points and spikes together, so a spike at t = 1/3 keeps its exact
location.  Away from grid points and spikes the function is taken to be 0,
which makes finite step functions (all grid values 0, a few spikes) exact
representations of themselves.

Instances are immutable; operations return new objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateSpikeError, GridMismatchError, PreconditionError

DEFAULT_RESOLUTION = 200


@dataclass(frozen=True)
class GridConfig:
    """Uniform grid on [0, 1] with `resolution` + 1 points."""

    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not isinstance(self.resolution, int) or self.resolution < 1:
            raise PreconditionError("grid resolution must be a positive integer")

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.arange(self.resolution + 1) / self.resolution
        pts.flags.writeable = False
        return pts

    def on_grid(self, t: float) -> bool:
        """True if t coincides exactly with a grid point (no snapping)."""
        k = round(t * self.resolution)
        return 0 <= k <= self.resolution and t == k / self.resolution


@dataclass(frozen=True, eq=False)
class EFunction:
    """Grid values plus exact spikes; immutable."""

    grid: GridConfig
    values: np.ndarray
    spikes: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.resolution + 1,):
            raise PreconditionError(
                f"values must have shape ({self.grid.resolution + 1},), got {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("grid values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        spikes = tuple((float(t), float(x)) for t, x in self.spikes)
        seen = {}
        for i, (t, x) in enumerate(spikes):
            if not (0.0 <= t <= 1.0):
                raise PreconditionError(f"spike location {t} outside [0, 1]")
            if not (np.isfinite(t) and np.isfinite(x)):
                raise PreconditionError("spike entries must be finite")
            if t in seen:
                raise DuplicateSpikeError(
                    f"duplicate spike location t={t} (indices {seen[t]} and {i})"
                )
            seen[t] = i
        object.__setattr__(self, "spikes", spikes)

    # -- evaluation ---------------------------------------------------------

    def values_at(self, t: np.ndarray | Sequence[float]) -> np.ndarray:
        """Evaluate at arbitrary points: spike value, else grid value, else 0."""
        t = np.ascontiguousarray(t, dtype=np.float64)
        T = self.grid.resolution
        k = np.rint(t * T).astype(np.int64)
        np.clip(k, 0, T, out=k)
        on = t == k / T
        out = np.where(on, self.values[k], 0.0)
        for ts, xs in self.spikes:
            out = np.where(t == ts, xs, out)
        return out

    @cached_property
    def support_t(self) -> np.ndarray:
        """Grid points followed by off-grid spike locations."""
        off = [t for t, _ in self.spikes if not self.grid.on_grid(t)]
        pts = np.concatenate([self.grid.points, np.asarray(off, dtype=np.float64)])
        pts.flags.writeable = False
        return pts

    @cached_property
    def support_values(self) -> np.ndarray:
        """Function values at `support_t` (on-grid spikes override grid values)."""
        vals = self.values.copy()
        off = []
        for t, x in self.spikes:
            if self.grid.on_grid(t):
                vals[round(t * self.grid.resolution)] = x
            else:
                off.append(x)
        out = np.concatenate([vals, np.asarray(off, dtype=np.float64)])
        out.flags.writeable = False
        return out

    def nonzero_support(self) -> tuple[np.ndarray, np.ndarray]:
        """(t, value) pairs where the function is nonzero."""
        mask = self.support_values != 0.0
        return self.support_t[mask], self.support_values[mask]

    def is_nonpositive(self) -> bool:
        return bool(np.all(self.support_values <= 0.0))


# -- constructors -----------------------------------------------------------


def make_step_function(
    points: Iterable[tuple[float, float]], grid: GridConfig | None = None
) -> EFunction:
    """Finite step function sum_i x_i * 1_{t_i}: zero grid plus spikes.

    Duplicate t_i values raise DuplicateSpikeError naming the offending index.
    """
    grid = grid or GridConfig()
    return EFunction(grid, np.zeros(grid.resolution + 1), tuple(points))


def constant_function(c: float, grid: GridConfig | None = None) -> EFunction:
    grid = grid or GridConfig()
    return EFunction(grid, np.full(grid.resolution + 1, float(c)))


def zero_function(grid: GridConfig | None = None) -> EFunction:
    return constant_function(0.0, grid)


def from_callable(fn, grid: GridConfig | None = None) -> EFunction:
    grid = grid or GridConfig()
    return EFunction(grid, np.asarray([fn(t) for t in grid.points], dtype=np.float64))


# -- norms and pointwise algebra -------------------------------------------


def sup_norm(f: EFunction) -> float:
    return float(np.max(np.abs(f.support_values)))


def scale(f: EFunction, c: float) -> EFunction:
    c = float(c)
    return EFunction(f.grid, f.values * c, tuple((t, x * c) for t, x in f.spikes))


def pointwise_abs(f: EFunction) -> EFunction:
    return EFunction(f.grid, np.abs(f.values), tuple((t, abs(x)) for t, x in f.spikes))


def _check_grids(f: EFunction, g: EFunction) -> None:
    if f.grid.resolution != g.grid.resolution:
        raise GridMismatchError(
            f"grid resolutions differ: {f.grid.resolution} vs {g.grid.resolution}"
        )


def _binary(f: EFunction, g: EFunction, op) -> EFunction:
    _check_grids(f, g)
    values = op(f.values, g.values)
    spike_ts = sorted({t for t, _ in f.spikes} | {t for t, _ in g.spikes})
    spikes = []
    for t in spike_ts:
        ft = float(f.values_at(np.asarray([t]))[0])
        gt = float(g.values_at(np.asarray([t]))[0])
        spikes.append((t, float(op(ft, gt))))
    return EFunction(f.grid, values, tuple(spikes))


def pointwise_max(f: EFunction, g: EFunction) -> EFunction:
    return _binary(f, g, np.maximum)


def pointwise_add(f: EFunction, g: EFunction) -> EFunction:
    return _binary(f, g, np.add)


def dominates(f: EFunction, g: EFunction) -> bool:
    """True if |f| >= |g| at every grid point and spike of either function."""
    _check_grids(f, g)
    ts = np.concatenate([f.support_t, g.support_t])
    return bool(np.all(np.abs(f.values_at(ts)) >= np.abs(g.values_at(ts))))


# -- JSON schema ------------------------------------------------------------
#
# Full form:   {"grid_resolution": T, "values": [...T+1 floats...],
#               "spikes": [[t, x], ...]}
# Step form:   {"step": [[t, x], ...], "grid_resolution": T?}
# Constant:    {"const": c, "grid_resolution": T?}   (convenience shorthand)


def to_dict(f: EFunction) -> dict:
    return {
        "grid_resolution": f.grid.resolution,
        "values": [float(v) for v in f.values],
        "spikes": [[t, x] for t, x in f.spikes],
    }


def from_dict(d: dict) -> EFunction:
    if not isinstance(d, dict):
        raise PreconditionError("function descriptor must be a JSON object")
    grid = GridConfig(int(d.get("grid_resolution", DEFAULT_RESOLUTION)))
    if "step" in d:
        return make_step_function([(float(t), float(x)) for t, x in d["step"]], grid)
    if "const" in d:
        return constant_function(float(d["const"]), grid)
    if "values" not in d:
        raise PreconditionError(
            "function descriptor needs 'values', 'step', or 'const'"
        )
    spikes = tuple((float(t), float(x)) for t, x in d.get("spikes", []))
    return EFunction(grid, np.asarray(d["values"], dtype=np.float64), spikes)


def from_json(text: str) -> EFunction:
    return from_dict(json.loads(text))


# -- standard probe set -----------------------------------------------------


def standard_probes(grid: GridConfig | None = None) -> list[tuple[str, EFunction]]:
    """The nine-probe battery used throughout the verification suite.

    Constants, single spikes, two-spike steps, a smooth ramp, and the zero
    function; every probe is nonpositive so it is valid for df checks as well.
    """
    grid = grid or GridConfig()
    probes = [
        ("zero", zero_function(grid)),
        ("const_-1", constant_function(-1.0, grid)),
        ("const_-0.5", constant_function(-0.5, grid)),
        ("spike_0", make_step_function([(0.0, -2.0)], grid)),
        ("spike_0.5", make_step_function([(0.5, -2.0)], grid)),
        ("spike_1", make_step_function([(1.0, -2.0)], grid)),
        ("twospike_1_1", make_step_function([(0.2, -1.0), (0.8, -1.0)], grid)),
        ("twospike_1_3", make_step_function([(0.2, -1.0), (0.8, -3.0)], grid)),
        ("ramp", from_callable(lambda t: -(1.0 + t) / 2.0, grid)),
    ]
    return probes
