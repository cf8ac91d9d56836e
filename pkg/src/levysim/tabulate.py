"""Inverse-CDF tables built from a characteristic function.

Used for increments whose law is known only through its characteristic
function: the CGMY time change and GH increments over steps other than 1.
The CDF is recovered with a cosine expansion on a bounded interval, summed
by a type-I discrete sine transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.fft import dst

from .errors import DomainError
from .rng import sample_uniform

MIN_NODES = 2048
MAX_NODES = 2**22
TAIL_MASS = 1e-6
CF_FLOOR = 1e-13


@dataclass(frozen=True)
class TabulatedLaw:
    """Piecewise-linear inverse CDF on ``grid``."""

    grid: np.ndarray
    cdf: np.ndarray

    def quantile(self, p):
        return np.interp(p, self.cdf, self.grid)

    def sample(self, stream, size=None):
        u = sample_uniform(stream, size)
        out = self.quantile(u)
        return float(out) if size is None else out

    def cdf_at(self, x):
        return np.interp(x, self.grid, self.cdf, left=0.0, right=1.0)


def chernoff_bounds(log_mgf: Callable[[float], float], mean: float, sd: float,
                    z_lower: float, z_upper: float, tail_mass: float = TAIL_MASS):
    """Interval outside which each tail carries less than ``tail_mass``.

    Uses P(X > x) <= E[e^{zX}] e^{-zx} at half of the available exponential
    moment range on either side.  ``z_lower`` may be 0 for a positive
    variable, in which case the lower end is returned as 0.
    """
    target = math.log(tail_mass)

    def edge(z):
        # smallest x with log_mgf(z) - z x <= target
        return (log_mgf(z) - target) / z

    z_hi = min(0.5 * z_upper, 40.0 / sd) if math.isfinite(z_upper) else 40.0 / sd
    upper = max(edge(z_hi), mean + 6.0 * sd)
    if z_lower == 0:
        lower = 0.0
    else:
        z_lo = max(0.5 * z_lower, -40.0 / sd) if math.isfinite(z_lower) else -40.0 / sd
        lower = min(edge(z_lo), mean - 6.0 * sd)
    return lower, upper


def _required_frequency(cf, scale):
    # first frequency (on a doubling ladder) past which |cf| stays under CF_FLOOR
    u = 1.0 / scale
    for _ in range(200):
        probe = u * np.array([1.0, 1.25, 1.5, 1.75, 2.0])
        if np.all(np.abs(cf(probe)) < CF_FLOOR):
            return u
        u *= 2.0
    raise DomainError("characteristic function does not decay; cannot tabulate")


def tabulate_from_cf(cf: Callable[[np.ndarray], np.ndarray], lower: float, upper: float,
                     scale: float, min_nodes: int = MIN_NODES, max_nodes: int = MAX_NODES) -> TabulatedLaw:
    """Tabulate the CDF of a law with characteristic function ``cf`` on [lower, upper].

    ``scale`` is a rough spread of the law (e.g. its standard deviation) and
    seeds the search for the truncation frequency.
    """
    if not upper > lower:
        raise DomainError("empty tabulation interval")
    width = upper - lower
    u_max = _required_frequency(cf, scale)
    terms = int(math.ceil(u_max * width / math.pi)) + 2
    n = max(min_nodes, 1 << (terms - 1).bit_length())
    if n > max_nodes:
        raise DomainError(f"tabulation needs {n} nodes, above the cap of {max_nodes}")
    k = np.arange(1, n)
    freq = k * math.pi / width
    coef = (2.0 / width) * np.real(cf(freq) * np.exp(-1j * freq * lower))
    sine_coef = coef * width / (k * math.pi)
    grid = lower + width * np.arange(n + 1) / n
    cdf = np.empty(n + 1)
    cdf[0] = 0.0
    # A_0 / 2 = 1 / width since cf(0) = 1
    cdf[1:n] = (np.arange(1, n) * width / n) / width + 0.5 * dst(sine_coef, type=1)
    cdf[n] = 1.0
    cdf = np.clip(np.maximum.accumulate(cdf), 0.0, 1.0)
    return TabulatedLaw(grid=grid, cdf=cdf)
