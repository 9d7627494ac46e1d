"""Brownian driver paths on uniform grids.

Coordinates of a cylindrical Brownian motion are simulated as independent
scalar walks with Gaussian increments on a uniform grid.  Increments are
the primary data (paths are their prefix sums), which keeps telescoping
identities exact in grid arithmetic.  Randomness is addressed per
(stream, coordinate, batch) through counter-based substreams, so enlarging
the coordinate count or replaying a batch never disturbs other draws.

Stopping times land on grid indices; a time that never triggers is capped
at the horizon index n (the sentinel).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import substream

__all__ = [
    "PathGrid",
    "BrownianBundle",
    "BrownianBatch",
    "StoppingTimeSpec",
    "simulate_increments",
    "simulate_bundle",
    "simulate_batch",
    "coarsen_increments",
    "paths_from_increments",
    "running_abs_max",
    "quadratic_variation",
    "path_functionals",
    "hitting_index",
    "stop_indices",
    "batch_to_csv",
]


@dataclass(frozen=True)
class PathGrid:
    """Uniform grid on [0, horizon] with ``steps`` increments."""

    horizon: float
    steps: int

    def __post_init__(self):
        if not (self.horizon > 0.0 and np.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.steps + 1)

    def index_of(self, t: float) -> int:
        """Grid index of a time that must sit on the grid."""
        k = int(round(t / self.dt))
        if not (0 <= k <= self.steps) or abs(k * self.dt - t) > 1e-9 * max(self.horizon, 1.0):
            raise ValueError(f"time {t} is not aligned with the grid (dt={self.dt})")
        return k

    def refined(self, factor: int) -> "PathGrid":
        return PathGrid(self.horizon, self.steps * factor)


def simulate_increments(
    seed: int, stream, coords: int, grid: PathGrid, replicates: int
) -> np.ndarray:
    """Gaussian increments, shape (replicates, coords, steps).

    ``stream`` is a label path (tuple) naming the substream; each
    coordinate draws from its own child stream, so increasing ``coords``
    extends a bundle without changing existing coordinates.
    """
    if coords < 1:
        raise ValueError(f"coords must be >= 1, got {coords}")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    stream = tuple(stream) if isinstance(stream, (tuple, list)) else (stream,)
    scale = np.sqrt(grid.dt)
    out = np.empty((replicates, coords, grid.steps))
    for j in range(coords):
        rng = substream(seed, *stream, "coord", j)
        out[:, j, :] = rng.standard_normal((replicates, grid.steps))
    out *= scale
    return out


def paths_from_increments(increments: np.ndarray) -> np.ndarray:
    """Prefix-sum paths with the zero start prepended (last axis grows by 1)."""
    inc = np.asarray(increments, dtype=float)
    shape = inc.shape[:-1] + (inc.shape[-1] + 1,)
    out = np.zeros(shape)
    np.cumsum(inc, axis=-1, out=out[..., 1:])
    return out


def coarsen_increments(increments: np.ndarray, factor: int) -> np.ndarray:
    """Sum consecutive groups of ``factor`` increments (shared-driver coarsening)."""
    inc = np.asarray(increments, dtype=float)
    n = inc.shape[-1]
    if n % factor:
        raise ValueError(f"cannot coarsen {n} increments by factor {factor}")
    shaped = inc.reshape(inc.shape[:-1] + (n // factor, factor))
    return shaped.sum(axis=-1)


@dataclass(frozen=True)
class BrownianBundle:
    """A simulated driver: grid, per-coordinate increments and paths."""

    grid: PathGrid
    coords: int
    increments: np.ndarray  # (coords, steps)
    seed: int
    stream: tuple = ()
    _paths: np.ndarray = field(default=None, repr=False)

    @property
    def paths(self) -> np.ndarray:  # (coords, steps + 1)
        return self._paths

    def coordinate(self, j: int) -> np.ndarray:
        return self._paths[j]


def simulate_bundle(seed: int, coords: int, grid: PathGrid, stream=("bundle",)) -> BrownianBundle:
    """One driver realization with per-coordinate substreams."""
    inc = simulate_increments(seed, stream, coords, grid, replicates=1)[0]
    return BrownianBundle(
        grid=grid,
        coords=coords,
        increments=inc,
        seed=seed,
        stream=tuple(stream),
        _paths=paths_from_increments(inc),
    )


@dataclass(frozen=True)
class BrownianBatch:
    """A batch of driver realizations: increments (reps, coords, steps)."""

    grid: PathGrid
    coords: int
    replicates: int
    increments: np.ndarray
    seed: int
    stream: tuple = ()
    _paths: np.ndarray = field(default=None, repr=False)

    @property
    def paths(self) -> np.ndarray:  # (reps, coords, steps + 1)
        return self._paths

    def coarsened(self, factor: int) -> "BrownianBatch":
        """The same driver watched on a grid coarser by ``factor``."""
        inc = coarsen_increments(self.increments, factor)
        return BrownianBatch(
            grid=PathGrid(self.grid.horizon, self.grid.steps // factor),
            coords=self.coords,
            replicates=self.replicates,
            increments=inc,
            seed=self.seed,
            stream=self.stream,
            _paths=paths_from_increments(inc),
        )


def simulate_batch(
    seed: int, stream, coords: int, grid: PathGrid, replicates: int
) -> BrownianBatch:
    """A batch of driver realizations with per-coordinate substreams."""
    inc = simulate_increments(seed, stream, coords, grid, replicates)
    return BrownianBatch(
        grid=grid,
        coords=coords,
        replicates=replicates,
        increments=inc,
        seed=seed,
        stream=tuple(stream) if isinstance(stream, (tuple, list)) else (stream,),
        _paths=paths_from_increments(inc),
    )


# ---------------------------------------------------------------------------
# path functionals


def running_abs_max(paths: np.ndarray) -> np.ndarray:
    """Running supremum of |path| along the last axis."""
    return np.maximum.accumulate(np.abs(paths), axis=-1)


def quadratic_variation(increments: np.ndarray) -> np.ndarray:
    """Pathwise quadratic variation: prefix sums of squared increments."""
    inc = np.asarray(increments, dtype=float)
    shape = inc.shape[:-1] + (inc.shape[-1] + 1,)
    out = np.zeros(shape)
    np.cumsum(inc * inc, axis=-1, out=out[..., 1:])
    return out


def path_functionals(bundle: BrownianBundle) -> dict:
    """Running |sup|, terminal value and quadratic variation per coordinate."""
    return {
        "running_abs_max": running_abs_max(bundle.paths),
        "terminal": bundle.paths[..., -1],
        "quadratic_variation": quadratic_variation(bundle.increments),
    }


# ---------------------------------------------------------------------------
# stopping times


@dataclass(frozen=True)
class StoppingTimeSpec:
    """Grid stopping rule.

    kinds: ``deterministic`` (params: T), ``first_exit_abs`` (params:
    level, coord — first grid index where |B| reaches the level, capped at
    the horizon), ``triple_norm`` (params: level — resolved by the caller
    against a seminorm path, strict crossing).
    """

    kind: str
    params: dict

    def __post_init__(self):
        known = {"deterministic", "first_exit_abs", "triple_norm"}
        if self.kind not in known:
            raise ValueError(f"unknown stopping time kind {self.kind!r}")


def hitting_index(values: np.ndarray, level: float, mode: str = "weak") -> tuple[np.ndarray, np.ndarray]:
    """First index along the last axis where values reach ``level``.

    mode "weak" triggers at >= level, "strict" at > level.  Returns
    (indices, hit): indices carry the sentinel n for paths that never
    trigger; ``hit`` marks genuine crossings.
    """
    values = np.asarray(values)
    if mode == "weak":
        mask = values >= level
    elif mode == "strict":
        mask = values > level
    else:
        raise ValueError(f"unknown hitting mode {mode!r}")
    hit = mask.any(axis=-1)
    idx = mask.argmax(axis=-1)
    sentinel = values.shape[-1] - 1
    idx = np.where(hit, idx, sentinel)
    return idx.astype(np.int64), hit


def stop_indices(spec: StoppingTimeSpec, grid: PathGrid, paths: np.ndarray) -> np.ndarray:
    """Grid indices of a stopping rule applied to driver paths.

    ``paths`` has shape (..., coords, steps + 1); the result drops the
    coordinate axis.  Deterministic rules must land on the grid.
    """
    if spec.kind == "deterministic":
        k = grid.index_of(float(spec.params["T"]))
        base = paths.shape[:-2] if paths.ndim >= 2 else ()
        return np.full(base, k, dtype=np.int64)
    if spec.kind == "first_exit_abs":
        coord = int(spec.params.get("coord", 0))
        level = float(spec.params["level"])
        track = np.abs(paths[..., coord, :])
        idx, _ = hitting_index(track, level, mode="weak")
        return idx
    raise ValueError(f"stopping kind {spec.kind!r} needs a seminorm path; use hitting_index")


def batch_to_csv(path, batch: BrownianBatch) -> None:
    """Dump driver paths as rows (replicate, coordinate, k, value)."""
    import csv

    values = batch.paths
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("replicate", "coordinate", "k", "value"))
        for r in range(values.shape[0]):
            for c in range(values.shape[1]):
                for k in range(values.shape[2]):
                    writer.writerow((r, c, k, repr(float(values[r, c, k]))))
