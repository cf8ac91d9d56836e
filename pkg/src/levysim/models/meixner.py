"""Meixner process."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy import integrate

from .. import rng
from ..errors import DomainError, NotTractableError
from ..specfun import complex_log1p, log_gamma_complex
from .base import LevyModel, LevyTriplet, MgfDomain, finite, require

_LOG2 = math.log(2.0)


def _log_cosh(w):
    """log cosh(w) for complex w, stable for large |Re w|."""
    w = np.where(np.real(w) < 0, -w, w)
    return w + complex_log1p(np.exp(-2.0 * w)) - _LOG2


@dataclass(frozen=True)
class Meixner(LevyModel):
    """Meixner process with E[e^{iuL_t}] = (cos(beta/2) / cosh((alpha u - i beta)/2))^{2 delta t}."""

    alpha: float = 1.0
    beta: float = 0.0
    delta: float = 1.0
    name: ClassVar[str] = "meixner"

    def problems(self):
        out = []
        require(finite(self.alpha) and self.alpha > 0, "alpha > 0 violated", out)
        require(finite(self.beta) and -math.pi < self.beta < math.pi, "-pi < beta < pi violated", out)
        require(finite(self.delta) and self.delta > 0, "delta > 0 violated", out)
        return out

    def mgf_domain(self):
        a, b = self.alpha, self.beta
        return MgfDomain(lower=(-math.pi - b) / a, upper=(math.pi - b) / a,
                         martingale_constraint="alpha + beta < pi")

    def _psi(self, u):
        a, b, d = self.alpha, self.beta, self.delta
        half = 0.5 * a * u
        # cosh(w - i b/2) / cos(b/2) = 1 + 2 sinh^2(w/2) - i sinh(w) tan(b/2), w = alpha u / 2
        with np.errstate(over="ignore", invalid="ignore"):
            near = 2.0 * d * complex_log1p(2.0 * np.sinh(0.5 * half) ** 2 - 1j * np.sinh(half) * math.tan(0.5 * b))
        far = 2.0 * d * (_log_cosh(half - 0.5j * b) - math.log(math.cos(0.5 * b)))
        return np.where(np.abs(np.real(half)) <= 20.0, near, far)

    def mean(self):
        return self.alpha * self.delta * math.tan(0.5 * self.beta)

    def variance(self):
        return self.alpha**2 * self.delta / (2.0 * math.cos(0.5 * self.beta) ** 2)

    def jump_density(self, x):
        a, b, d = self.alpha, self.beta, self.delta
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            safe = np.where(x != 0, x, 1.0)
            # delta e^{bx/a} / (x sinh(pi x / a)), written with e^{-pi|x|/a} for large |x|
            ax = np.abs(safe)
            val = 2.0 * d * np.exp(b * safe / a - math.pi * ax / a) / (ax * -np.expm1(-2.0 * math.pi * ax / a))
        return np.where(x != 0, val, np.nan)

    def levy_triplet(self):
        self.check()
        f = self.jump_density
        tail = (integrate.quad(lambda x: x * float(f(x)), 1.0, np.inf, limit=400)[0]
                + integrate.quad(lambda x: x * float(f(x)), -np.inf, -1.0, limit=400)[0])
        return LevyTriplet(drift=self.mean() - tail, sigma=0.0, jump_density=f)

    def density(self, x, t=1.0):
        """Density of L_t; the family is closed under convolution in delta."""
        self.check()
        t = float(t)
        if t <= 0:
            raise DomainError("density requires t > 0")
        a, b = self.alpha, self.beta
        dt = self.delta * t
        x = np.asarray(x, dtype=float)
        log_c = 2.0 * dt * math.log(2.0 * math.cos(0.5 * b)) - math.log(2.0 * a * math.pi) - math.lgamma(2.0 * dt)
        log_g = np.real(log_gamma_complex(dt + 1j * x / a))
        return np.exp(log_c + b * x / a + 2.0 * log_g)

    def sample(self, h, stream, size=None):
        """Acceptance-rejection draw; only the symmetric case is supported."""
        self.check()
        if self.beta != 0.0:
            raise NotTractableError("meixner: sampling is implemented for beta = 0 only")
        return rng.sample_meixner_increment(h, self.alpha, 0.0, self.delta, stream, size)
