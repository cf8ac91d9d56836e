"""Brownian motion, Poisson, compound Poisson, Merton and Kou models."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, ClassVar, Optional

import numpy as np
from scipy import integrate

from .. import rng
from ..errors import DomainError, InvalidModelError
from ..specfun import complex_expm1
from .base import LevyModel, LevyTriplet, MgfDomain, finite, require

_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# jump laws


class JumpLaw:
    """Law F of the individual jump sizes of a compound Poisson process."""

    def cf(self, u):
        raise NotImplementedError

    def density(self, x):
        raise NotImplementedError

    def sum_of(self, counts, stream):
        """Sum of ``counts[i]`` independent jumps, elementwise."""
        raise NotImplementedError

    def mgf_domain(self) -> MgfDomain:
        return MgfDomain(lower=0.0, upper=0.0, lower_closed=True, upper_closed=True)

    def problems(self) -> list:
        return []

    def moments(self):
        """(E[xi], E[xi^2])."""
        raise NotImplementedError


@dataclass(frozen=True)
class NormalJump(JumpLaw):
    mu_xi: float = 0.0
    sigma_xi: float = 1.0

    def problems(self):
        out = []
        require(finite(self.mu_xi), "mu_xi finite violated", out)
        require(finite(self.sigma_xi) and self.sigma_xi > 0, "sigma_xi > 0 violated", out)
        return out

    def _log_cf(self, u):
        return 1j * u * self.mu_xi - 0.5 * (self.sigma_xi * u) ** 2

    def cf(self, u):
        return np.exp(self._log_cf(np.asarray(u, dtype=complex)))

    def one_minus_cf(self, u):
        return -complex_expm1(self._log_cf(np.asarray(u, dtype=complex)))

    def density(self, x):
        z = (np.asarray(x, dtype=float) - self.mu_xi) / self.sigma_xi
        return np.exp(-0.5 * z * z) / (_SQRT_2PI * self.sigma_xi)

    def sum_of(self, counts, stream):
        counts = np.asarray(counts)
        z = rng.sample_normal(stream, counts.shape)
        return self.mu_xi * counts + self.sigma_xi * np.sqrt(counts) * z

    def mgf_domain(self):
        return MgfDomain()

    def moments(self):
        return self.mu_xi, self.mu_xi**2 + self.sigma_xi**2


@dataclass(frozen=True)
class DoubleExpJump(JumpLaw):
    """Up-jumps Exp(theta1) with probability p, down-jumps Exp(theta2) otherwise.

    Density p theta1 e^{-theta1 x} 1{x>0} + (1-p) theta2 e^{theta2 x} 1{x<0}.
    """

    p: float = 0.5
    theta1: float = 1.0
    theta2: float = 1.0

    def problems(self):
        out = []
        require(finite(self.p) and 0.0 <= self.p <= 1.0, "0 <= p <= 1 violated", out)
        require(finite(self.theta1) and self.theta1 > 0, "theta1 > 0 violated", out)
        require(finite(self.theta2) and self.theta2 > 0, "theta2 > 0 violated", out)
        return out

    def cf(self, u):
        return 1.0 - self.one_minus_cf(u)

    def one_minus_cf(self, u):
        u = np.asarray(u, dtype=complex)
        iu = 1j * u
        return self.p * (-iu) / (self.theta1 - iu) + (1.0 - self.p) * iu / (self.theta2 + iu)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            up = self.p * self.theta1 * np.exp(-self.theta1 * np.abs(x))
            down = (1.0 - self.p) * self.theta2 * np.exp(-self.theta2 * np.abs(x))
        return np.where(x > 0, up, np.where(x < 0, down, 0.0))

    def sum_of(self, counts, stream):
        counts = np.asarray(counts, dtype=np.int64)
        ups = rng.sample_binomial(counts, self.p, stream, counts.shape)
        up_sum = rng.sample_gamma(ups, self.theta1, stream, counts.shape)
        down_sum = rng.sample_gamma(counts - ups, self.theta2, stream, counts.shape)
        return up_sum - down_sum

    def mgf_domain(self):
        return MgfDomain(lower=-self.theta2, upper=self.theta1,
                         martingale_constraint="theta1 > 1")

    def moments(self):
        m1 = self.p / self.theta1 - (1.0 - self.p) / self.theta2
        m2 = 2.0 * self.p / self.theta1**2 + 2.0 * (1.0 - self.p) / self.theta2**2
        return m1, m2


@dataclass(frozen=True)
class GenericJump(JumpLaw):
    """Jump law given by a density and a sampler.

    ``sampler(n, stream)`` returns ``n`` jump sizes.  Without ``cf_fn`` the
    characteristic function is obtained by quadrature of the density over
    ``support``.
    """

    density_fn: Callable = None
    sampler: Callable = None
    cf_fn: Optional[Callable] = None
    support: tuple = (-math.inf, math.inf)

    def problems(self):
        out = []
        require(callable(self.density_fn), "jump density callable violated", out)
        require(callable(self.sampler), "jump sampler callable violated", out)
        return out

    def density(self, x):
        return np.asarray(self.density_fn(np.asarray(x, dtype=float)), dtype=float)

    def cf(self, u):
        if self.cf_fn is not None:
            return np.asarray(self.cf_fn(np.asarray(u)), dtype=complex)
        u = np.atleast_1d(np.asarray(u, dtype=complex))
        lo, hi = self.support
        out = np.empty(u.shape, dtype=complex)
        for i, ui in enumerate(u.flat):
            # complex u (e.g. u = -i for the mean correction) enters through e^{iux}
            kernel = lambda x, ui=ui: cmath.exp(1j * ui * x) * float(self.density_fn(x))  # noqa: E731
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                re = integrate.quad(lambda x: kernel(x).real, lo, hi, limit=400)[0]
                im = integrate.quad(lambda x: kernel(x).imag, lo, hi, limit=400)[0]
            out.flat[i] = re + 1j * im
        return out

    def one_minus_cf(self, u):
        return 1.0 - self.cf(u)

    def sum_of(self, counts, stream):
        counts = np.asarray(counts, dtype=np.int64)
        flat = counts.ravel()
        total = int(flat.sum())
        jumps = np.asarray(self.sampler(total, stream), dtype=float) if total else np.zeros(0)
        owner = np.repeat(np.arange(flat.size), flat)
        sums = np.bincount(owner, weights=jumps, minlength=flat.size)
        return sums.reshape(counts.shape)

    def moments(self):
        lo, hi = self.support
        m1 = integrate.quad(lambda x: x * float(self.density_fn(x)), lo, hi, limit=400)[0]
        m2 = integrate.quad(lambda x: x * x * float(self.density_fn(x)), lo, hi, limit=400)[0]
        return m1, m2


def _truncated_first_moment(law: JumpLaw) -> float:
    # int_{|x|<1} x F(dx)
    neg = integrate.quad(lambda x: x * float(law.density(x)), -1.0, 0.0)[0]
    pos = integrate.quad(lambda x: x * float(law.density(x)), 0.0, 1.0)[0]
    return neg + pos


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class BrownianMotion(LevyModel):
    """L_t = mu t + sigma W_t."""

    mu: float = 0.0
    sigma: float = 1.0
    name: ClassVar[str] = "bm"

    def problems(self):
        out = []
        require(finite(self.mu), "mu finite violated", out)
        require(finite(self.sigma) and self.sigma >= 0, "sigma >= 0 violated", out)
        return out

    def mgf_domain(self):
        return MgfDomain()

    def _psi(self, u):
        return 0.5 * self.sigma**2 * u * u - 1j * u * self.mu

    def mean(self):
        return self.mu

    def variance(self):
        return self.sigma**2

    def levy_triplet(self):
        self.check()
        return LevyTriplet(drift=self.mu, sigma=self.sigma)

    def density(self, x, t=1.0):
        self.check()
        t = float(t)
        if t <= 0:
            raise DomainError("density requires t > 0")
        if self.sigma == 0:
            raise DomainError("degenerate Brownian motion (sigma = 0) has no density")
        s = self.sigma * math.sqrt(t)
        z = (np.asarray(x, dtype=float) - self.mu * t) / s
        return np.exp(-0.5 * z * z) / (_SQRT_2PI * s)

    def sample(self, h, stream, size=None):
        self.check()
        z = rng.sample_normal(stream, size)
        return self.mu * h + self.sigma * math.sqrt(h) * z


@dataclass(frozen=True)
class PoissonProcess(LevyModel):
    lam: float = 1.0
    name: ClassVar[str] = "poisson"
    param_aliases: ClassVar[dict] = {"lambda": "lam"}
    finite_activity: ClassVar[bool] = True

    def problems(self):
        out = []
        require(finite(self.lam) and self.lam > 0, "lambda > 0 violated", out)
        return out

    def mgf_domain(self):
        return MgfDomain()

    def _psi(self, u):
        return -self.lam * complex_expm1(1j * u)

    def mean(self):
        return self.lam

    def variance(self):
        return self.lam

    def levy_triplet(self):
        self.check()
        return LevyTriplet(drift=0.0, sigma=0.0, atoms=((1.0, self.lam),),
                           symbolic=f"{self.lam!r} * dirac(1)")

    def sample(self, h, stream, size=None):
        self.check()
        return rng.sample_poisson_count(self.lam * h, stream, size)


@dataclass(frozen=True)
class CompoundPoisson(LevyModel):
    """Sum of N_t i.i.d. jumps drawn from ``jump_law``."""

    lam: float = 1.0
    jump_law: JumpLaw = NormalJump()
    name: ClassVar[str] = "cpp"
    param_aliases: ClassVar[dict] = {"lambda": "lam"}
    finite_activity: ClassVar[bool] = True

    @classmethod
    def from_params(cls, params):
        params = dict(params)
        jump = {k: params.pop(k) for k in ("mu_xi", "sigma_xi") if k in params}
        unknown = [k for k in params if k != "lambda"]
        if unknown:
            raise InvalidModelError([f"unknown parameter {k!r} for model cpp" for k in unknown])
        if "lambda" not in params:
            raise InvalidModelError(["missing parameter 'lambda' for model cpp"])
        law = NormalJump(**{k: float(v) for k, v in jump.items()})
        return cls(lam=float(params["lambda"]), jump_law=law)

    def params(self):
        out = {"lambda": self.lam}
        if isinstance(self.jump_law, NormalJump):
            out.update(mu_xi=self.jump_law.mu_xi, sigma_xi=self.jump_law.sigma_xi)
        return out

    def problems(self):
        out = []
        require(finite(self.lam) and self.lam > 0, "lambda > 0 violated", out)
        if not isinstance(self.jump_law, JumpLaw):
            out.append("jump_law is a JumpLaw violated")
        else:
            out += self.jump_law.problems()
        return out

    def mgf_domain(self):
        return self.jump_law.mgf_domain()

    def _psi(self, u):
        return self.lam * self.jump_law.one_minus_cf(u)

    def mean(self):
        return self.lam * self.jump_law.moments()[0]

    def variance(self):
        return self.lam * self.jump_law.moments()[1]

    def levy_triplet(self):
        self.check()
        lam, law = self.lam, self.jump_law
        return LevyTriplet(
            drift=lam * _truncated_first_moment(law),
            sigma=0.0,
            jump_density=lambda x: lam * law.density(x),
        )

    def sample(self, h, stream, size=None):
        self.check()
        counts = np.asarray(rng.sample_poisson_count(self.lam * h, stream, size))
        out = self.jump_law.sum_of(counts, stream)
        return float(out) if size is None else out


class _JumpDiffusion(LevyModel):
    """Brownian motion with drift plus an independent compound Poisson part."""

    finite_activity: ClassVar[bool] = False

    def _jumps(self) -> CompoundPoisson:
        raise NotImplementedError

    def _diffusion_problems(self):
        out = []
        require(finite(self.mu), "mu finite violated", out)
        require(finite(self.sigma) and self.sigma >= 0, "sigma >= 0 violated", out)
        require(finite(self.lam) and self.lam > 0, "lambda > 0 violated", out)
        return out

    def mgf_domain(self):
        return self._jumps().mgf_domain()

    def _psi(self, u):
        return 0.5 * self.sigma**2 * u * u - 1j * u * self.mu + self._jumps()._psi(u)

    def mean(self):
        return self.mu + self._jumps().mean()

    def variance(self):
        return self.sigma**2 + self._jumps().variance()

    def levy_triplet(self):
        self.check()
        jumps = self._jumps().levy_triplet()
        return LevyTriplet(drift=self.mu + jumps.drift, sigma=self.sigma,
                           jump_density=jumps.jump_density)

    def sample(self, h, stream, size=None):
        self.check()
        z = np.asarray(rng.sample_normal(stream, size))
        counts = np.asarray(rng.sample_poisson_count(self.lam * h, stream, size))
        jumps = self._jumps().jump_law.sum_of(counts, stream)
        out = self.mu * h + self.sigma * math.sqrt(h) * z + jumps
        return float(out) if size is None else out


@dataclass(frozen=True)
class Merton(_JumpDiffusion):
    mu: float = 0.0
    sigma: float = 1.0
    lam: float = 1.0
    mu_xi: float = 0.0
    sigma_xi: float = 1.0
    name: ClassVar[str] = "merton"
    param_aliases: ClassVar[dict] = {"lambda": "lam"}

    def _jumps(self):
        return CompoundPoisson(self.lam, NormalJump(self.mu_xi, self.sigma_xi))

    def problems(self):
        return self._diffusion_problems() + NormalJump(self.mu_xi, self.sigma_xi).problems()


@dataclass(frozen=True)
class Kou(_JumpDiffusion):
    mu: float = 0.0
    sigma: float = 1.0
    lam: float = 1.0
    p: float = 0.5
    theta1: float = 1.0
    theta2: float = 1.0
    name: ClassVar[str] = "kou"
    param_aliases: ClassVar[dict] = {"lambda": "lam"}

    def _jumps(self):
        return CompoundPoisson(self.lam, DoubleExpJump(self.p, self.theta1, self.theta2))

    def problems(self):
        return self._diffusion_problems() + DoubleExpJump(self.p, self.theta1, self.theta2).problems()
