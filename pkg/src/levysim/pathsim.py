"""Discrete-grid simulation of Levy paths and exponential-Levy asset paths."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .models import LevyModel, sample_increment
from .rng import RngStream


@dataclass(frozen=True)
class PathGrid:
    """Uniform grid t_i = i T / N, i = 0..N."""

    T: float
    N: int

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError("horizon T must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("step count N must be a positive integer")
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return self.T / self.N

    @property
    def times(self) -> np.ndarray:
        t = np.arange(self.N + 1) * self.h
        t[-1] = self.T
        return t


@dataclass(frozen=True)
class SamplePath:
    grid: PathGrid
    l_values: np.ndarray
    model: LevyModel
    stream_id: int = 0


@dataclass(frozen=True)
class AssetPath:
    grid: PathGrid
    s_values: np.ndarray
    s0: float
    rate: float
    risk_neutral: bool


def simulate_path(spec: LevyModel, grid: PathGrid, stream: RngStream) -> SamplePath:
    """Cumulative sum of N independent increments, starting from L_0 = 0."""
    spec.check()
    steps = np.asarray(sample_increment(spec, grid.h, stream, grid.N), dtype=float)
    values = np.empty(grid.N + 1)
    values[0] = 0.0
    np.cumsum(steps, out=values[1:])
    return SamplePath(grid=grid, l_values=values, model=spec, stream_id=stream.stream_id)


def asset_path(path: SamplePath, s0: float, rate: float = 0.0, risk_neutral: bool = False) -> AssetPath:
    """S_t = s0 exp(omega t + L_t) with omega the mean correction, or s0 exp(L_t)."""
    if not (math.isfinite(s0) and s0 > 0):
        raise DomainError("s0 must be positive")
    log_s = path.l_values
    if risk_neutral:
        log_s = log_s + path.model.mean_correction(rate) * path.grid.times
    return AssetPath(grid=path.grid, s_values=s0 * np.exp(log_s), s0=float(s0),
                     rate=float(rate), risk_neutral=risk_neutral)


def _simulate_chunk(args):
    spec, grid, seed, ids = args
    return [simulate_path(spec, grid, RngStream(seed, k)).l_values for k in ids]


def simulate_batch(spec: LevyModel, grid: PathGrid, n_paths: int, seed: int,
                   workers: int = 1, executor: Optional[ProcessPoolExecutor] = None) -> list:
    """``n_paths`` paths; path k draws from stream (seed, k).

    The result depends only on ``(spec, grid, n_paths, seed)``, not on the
    number of workers.
    """
    if int(n_paths) != n_paths or n_paths < 1:
        raise DomainError("n_paths must be a positive integer")
    spec.check()
    n_paths = int(n_paths)
    if workers <= 1 or n_paths == 1:
        chunks = [_simulate_chunk((spec, grid, seed, range(n_paths)))]
    else:
        bounds = np.linspace(0, n_paths, min(workers, n_paths) + 1).astype(int)
        jobs = [(spec, grid, seed, range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]
        if executor is not None:
            chunks = list(executor.map(_simulate_chunk, jobs))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(_simulate_chunk, jobs))
    values = [v for chunk in chunks for v in chunk]
    return [SamplePath(grid=grid, l_values=v, model=spec, stream_id=k) for k, v in enumerate(values)]
