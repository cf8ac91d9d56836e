"""Pure-jump models built by subordinating Brownian motion: VG, CGMY, GH, NIG."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar

import numpy as np
from scipy import integrate

from .. import rng
from ..errors import DomainError, NotTractableError
from ..specfun import (
    complex_expm1,
    complex_log1p,
    gamma_real,
    h_y_kernel,
    log_bessel_k,
)
from ..tabulate import TabulatedLaw, chernoff_bounds, tabulate_from_cf
from .base import LevyModel, LevyTriplet, MgfDomain, finite, require

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _tail_first_moment(density, upper_only=False) -> float:
    """int_{|x|>=1} x nu(dx) for a jump density with exponential tails."""
    pos = integrate.quad(lambda x: x * float(density(x)), 1.0, np.inf, limit=400)[0]
    if upper_only:
        return pos
    neg = integrate.quad(lambda x: x * float(density(x)), -np.inf, -1.0, limit=400)[0]
    return pos + neg


# ---------------------------------------------------------------------------
# auxiliary densities


def gig_density(x, p: float, a: float, b: float):
    """GIG(p, a, b) density (a/b)^{p/2} / (2 K_p(sqrt(ab))) x^{p-1} e^{-(ax + b/x)/2}."""
    if not (a > 0 and b > 0):
        raise DomainError("GIG density requires a > 0 and b > 0")
    x = np.asarray(x, dtype=float)
    log_norm = 0.5 * p * math.log(a / b) - math.log(2.0) - float(log_bessel_k(p, math.sqrt(a * b)))
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = np.where(x > 0, x, 1.0)
        log_f = log_norm + (p - 1.0) * np.log(xs) - 0.5 * (a * xs + b / xs)
    return np.where(x > 0, np.exp(log_f), 0.0)


def gamma_density(x, shape: float, rate: float):
    """Gamma density rate^shape / Gamma(shape) x^{shape-1} e^{-rate x}."""
    if not (shape > 0 and rate > 0):
        raise DomainError("gamma density requires positive shape and rate")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = np.where(x > 0, x, 1.0)
        log_f = shape * math.log(rate) - math.lgamma(shape) + (shape - 1.0) * np.log(xs) - rate * xs
    return np.where(x > 0, np.exp(log_f), 0.0)


def _direct_table(model: LevyModel, h: float) -> TabulatedLaw:
    """Inverse-CDF table of L_h computed straight from exp(-h Psi)."""
    dom = model.mgf_domain()
    mean = h * model.mean()
    sd = math.sqrt(h * model.variance())

    def log_mgf(z):
        return float(np.real(-h * model.char_exponent(-1j * z)))

    lower, upper = chernoff_bounds(log_mgf, mean, sd, dom.lower, dom.upper)
    return tabulate_from_cf(lambda u: np.exp(-h * model.char_exponent(u)), lower, upper, sd)


# ---------------------------------------------------------------------------
# variance gamma


# |Y| at or below which CGMY increments are drawn from the Y = 0 law
SMALL_Y = 1e-4

def _expm1_ratio(a, z):
    """expm1(a z) / a, equal to z at a = 0; ``z`` may be complex."""
    if abs(a) < 1e-150:
        return z
    if np.iscomplexobj(z):
        return complex_expm1(a * np.asarray(z)) / a
    return np.expm1(a * z) / a


@dataclass(frozen=True)
class VarianceGamma(LevyModel):
    """Brownian motion with drift ``theta`` and volatility ``sigma`` run on a
    gamma clock of unit mean rate and variance rate ``nu``."""

    sigma: float = 1.0
    nu: float = 1.0
    theta: float = 0.0
    name: ClassVar[str] = "vg"

    def problems(self):
        out = []
        require(finite(self.sigma) and self.sigma > 0, "sigma > 0 violated", out)
        require(finite(self.nu) and self.nu > 0, "nu > 0 violated", out)
        require(finite(self.theta), "theta finite violated", out)
        return out

    def cgm(self):
        """(C, G, M) of the equivalent difference-of-gamma representation."""
        root = math.sqrt(0.25 * self.theta**2 * self.nu**2 + 0.5 * self.sigma**2 * self.nu)
        half = 0.5 * self.theta * self.nu
        return 1.0 / self.nu, 1.0 / (root - half), 1.0 / (root + half)

    def mgf_domain(self):
        _, G, M = self.cgm()
        return MgfDomain(lower=-G, upper=M,
                         martingale_constraint="1 - theta*nu - sigma^2*nu/2 > 0")

    def _psi(self, u):
        return complex_log1p(-1j * u * self.theta * self.nu + 0.5 * self.sigma**2 * self.nu * u * u) / self.nu

    def mean(self):
        return self.theta

    def variance(self):
        return self.sigma**2 + self.theta**2 * self.nu

    def levy_triplet(self):
        self.check()
        C, G, M = self.cgm()
        drift = C / (M * G) * (M * math.expm1(-G) - G * math.expm1(-M))
        return LevyTriplet(drift=drift, sigma=0.0, jump_density=_tempered_density(C, G, M, 0.0))

    def sample(self, h, stream, size=None):
        """Gamma-subordinated Brownian motion."""
        self.check()
        clock = np.asarray(rng.sample_gamma(h / self.nu, 1.0 / self.nu, stream, size))
        z = np.asarray(rng.sample_normal(stream, size))
        out = self.theta * clock + self.sigma * np.sqrt(clock) * z
        return float(out) if size is None else out

    def sample_gamma_difference(self, h, stream, size=None):
        """Same law drawn as Gamma(Ch, M) - Gamma(Ch, G)."""
        self.check()
        C, G, M = self.cgm()
        up = np.asarray(rng.sample_gamma(C * h, M, stream, size))
        down = np.asarray(rng.sample_gamma(C * h, G, stream, size))
        out = up - down
        return float(out) if size is None else out


def _tempered_density(C, G, M, Y):
    def density(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            base = C / ax ** (1.0 + Y)
            val = np.where(x > 0, base * np.exp(-M * ax), base * np.exp(-G * ax))
        return np.where(x == 0, np.nan, val)

    return density


# ---------------------------------------------------------------------------
# CGMY


@dataclass(frozen=True)
class CGMY(LevyModel):
    """Tempered stable process with Levy density C e^{-Mx} x^{-1-Y} (x > 0),
    C e^{-G|x|} |x|^{-1-Y} (x < 0).

    Y = 0 and Y = 1 are handled through the limits of the exponent.
    """

    C: float = 1.0
    G: float = 1.0
    M: float = 1.0
    Y: float = 0.5
    name: ClassVar[str] = "cgmy"

    def problems(self):
        out = []
        require(finite(self.C) and self.C > 0, "C > 0 violated", out)
        require(finite(self.G) and self.G > 0, "G > 0 violated", out)
        require(finite(self.M) and self.M > 0, "M > 0 violated", out)
        require(finite(self.Y) and self.Y < 2, "Y < 2 violated", out)
        return out

    @property
    def finite_activity(self):
        return self.Y < 0

    def mgf_domain(self):
        return MgfDomain(lower=-self.G, upper=self.M, martingale_constraint="M > 1")

    def gamma_neg_y(self) -> float:
        """Gamma(-Y) = Gamma(2 - Y) / ((-Y)(1 - Y))."""
        Y = self.Y
        if Y in (0.0, 1.0):
            raise DomainError("Gamma(-Y) has a pole at Y in {0, 1}")
        return gamma_real(2.0 - Y) / ((-Y) * (1.0 - Y))

    def _psi(self, u):
        # Gamma(-Y) has poles at Y = 0 and Y = 1; both are divided out exactly so
        # the exponent is continuous in Y and the limits need no special case.
        C, G, M, Y = self.C, self.G, self.M, self.Y
        log_g = complex_log1p(1j * u / G)
        log_m = complex_log1p(-1j * u / M)
        if Y < 0.5:
            return C * gamma_real(1.0 - Y) * (G**Y * _expm1_ratio(Y, log_g) + M**Y * _expm1_ratio(Y, log_m))
        eps = Y - 1.0
        # with w = z(1 + s): w^Y - z^Y - (w - z) = (w - z) expm1(eps log w) + z^Y expm1(eps log(1 + s))
        lw_g = math.log(G) + log_g
        lw_m = math.log(M) + log_m
        gap = (1j * u * (_expm1_ratio(eps, lw_g) - _expm1_ratio(eps, lw_m))
               + G**Y * _expm1_ratio(eps, log_g) + M**Y * _expm1_ratio(eps, log_m))
        return -C * gamma_real(2.0 - Y) / Y * gap

    def mean(self):
        C, G, M, Y = self.C, self.G, self.M, self.Y
        eps = Y - 1.0
        return C * gamma_real(2.0 - Y) * (_expm1_ratio(eps, math.log(G)) - _expm1_ratio(eps, math.log(M)))

    def variance(self):
        C, G, M, Y = self.C, self.G, self.M, self.Y
        return C * gamma_real(2.0 - Y) * (M ** (Y - 2.0) + G ** (Y - 2.0))

    def levy_triplet(self):
        self.check()
        dens = _tempered_density(self.C, self.G, self.M, self.Y)
        drift = self.mean() - _tail_first_moment(dens)
        return LevyTriplet(drift=drift, sigma=0.0, jump_density=dens)

    # -- time-change representation (0 < Y < 2) -----------------------------

    @property
    def skew(self) -> float:
        return 0.5 * (self.G - self.M)

    @property
    def spread(self) -> float:
        return 0.5 * (self.G + self.M)

    def subordinator_density(self, y):
        """Levy density of the clock T with L = A T + W(T), A = (G-M)/2, B = (G+M)/2.

        f(y) = K y^{-1-Y/2} exp(-(B^2 - A^2) y / 2) Gamma(Y) h_Y(B sqrt(y)) / (Gamma(Y/2) 2^{Y/2-1})
        with K = C sqrt(2 pi) / (Gamma((Y+1)/2) 2^{(Y+1)/2}).
        """
        Y = self.Y
        if not 0 < Y < 2:
            raise DomainError("the Brownian time change needs 0 < Y < 2")
        y = np.asarray(y, dtype=float)
        A, B = self.skew, self.spread
        K = self.C * _SQRT_2PI / (math.gamma(0.5 * (Y + 1.0)) * 2.0 ** (0.5 * (Y + 1.0)))
        norm = math.gamma(Y) / (math.gamma(0.5 * Y) * 2.0 ** (0.5 * Y - 1.0))
        return K * y ** (-1.0 - 0.5 * Y) * np.exp(-0.5 * (B * B - A * A) * y) * norm * h_y_kernel(B * np.sqrt(y), Y)

    def subordinator_laplace_exponent(self, lam):
        """phi(lam) with E[exp(-lam T_t)] = exp(-t phi(lam)); ``lam`` may be complex."""
        C, G, M, Y = self.C, self.G, self.M, self.Y
        A, B = self.skew, self.spread
        w = np.sqrt(np.asarray(A * A - 2.0 * np.asarray(lam, dtype=complex)))
        logs = (math.log(G), math.log(M), np.log(B + w), np.log(B - w))
        if Y < 0.5:
            r = [_expm1_ratio(Y, v) for v in logs]
            return -C * gamma_real(1.0 - Y) * (r[0] + r[1] - r[2] - r[3])
        # (B + w) + (B - w) = G + M, so the Y = 1 pole cancels as in the exponent
        eps = Y - 1.0
        gap = (G * _expm1_ratio(eps, math.log(G)) + M * _expm1_ratio(eps, math.log(M))
               - (B + w) * _expm1_ratio(eps, np.log(B + w)) - (B - w) * _expm1_ratio(eps, np.log(B - w)))
        return C * gamma_real(2.0 - Y) / Y * gap

    def subordinator_moments(self):
        """(E[T_1], Var[T_1]) by quadrature of the time-change Levy density."""
        f = self.subordinator_density

        def moment(k):
            g = lambda y: y**k * float(f(y))  # noqa: E731
            return integrate.quad(g, 0.0, 1.0, limit=400)[0] + integrate.quad(g, 1.0, np.inf, limit=400)[0]

        return moment(1), moment(2)

    def sample(self, h, stream, size=None):
        self.check()
        Y = self.Y
        if abs(Y) <= SMALL_Y:
            # gamma-difference limit; sup |Phi_Y - Phi_0| is of order |Y|
            up = np.asarray(rng.sample_gamma(self.C * h, self.M, stream, size))
            down = np.asarray(rng.sample_gamma(self.C * h, self.G, stream, size))
            out = up - down
        elif Y < 0:
            out = self._sample_compound(h, stream, size)
        else:
            table, is_clock = _cgmy_table(self, float(h))
            if table is None:
                out = self._sample_tempered_stable(h, stream, size)
            elif is_clock:
                clock = np.asarray(table.sample(stream, size))
                z = np.asarray(rng.sample_normal(stream, size))
                out = self.skew * clock + np.sqrt(clock) * z
            else:
                out = np.asarray(table.sample(stream, size))
        return float(out) if size is None else out

    def _sample_tempered_stable(self, h, stream, size):
        # 0 < Y < 1: difference of two exponentially tilted stable subordinators
        scale = -h * self.C * self.gamma_neg_y()
        up = np.asarray(rng.sample_tempered_stable(self.Y, scale, self.M, stream, size))
        down = np.asarray(rng.sample_tempered_stable(self.Y, scale, self.G, stream, size))
        return up - down

    def _sample_compound(self, h, stream, size):
        # Y < 0: finite activity with Gamma(-Y, M) up-jumps and Gamma(-Y, G) down-jumps
        C, G, M, Y = self.C, self.G, self.M, self.Y
        g = gamma_real(-Y)
        n_up = np.asarray(rng.sample_poisson_count(C * g * M**Y * h, stream, size))
        n_down = np.asarray(rng.sample_poisson_count(C * g * G**Y * h, stream, size))
        shape = n_up.shape
        up = rng.sample_gamma(-Y * n_up, M, stream, shape)
        down = rng.sample_gamma(-Y * n_down, G, stream, shape)
        return np.asarray(up) - np.asarray(down)


@lru_cache(maxsize=64)
def _cgmy_table(model: CGMY, h: float):
    """Inverse-CDF table for the CGMY clock over a step h.

    Falls back to tabulating the increment itself when the clock's
    characteristic function decays too slowly for the node cap.  Returns
    ``(None, False)`` when neither fits and 0 < Y < 1, in which case the
    increment is drawn exactly as a difference of tempered stable variables.
    """
    m1, m2 = model.subordinator_moments()
    mean, sd = h * m1, math.sqrt(h * m2)
    z_max = 0.5 * model.G * model.M  # exp(zT) is integrable for z < (B^2 - A^2)/2

    def log_mgf(z):
        return float(np.real(-h * model.subordinator_laplace_exponent(-z)))

    def cf(s):
        return np.exp(-h * model.subordinator_laplace_exponent(-1j * np.asarray(s)))

    _, upper = chernoff_bounds(log_mgf, mean, sd, 0.0, z_max)
    try:
        return tabulate_from_cf(cf, 0.0, upper, sd), True
    except DomainError:
        pass
    try:
        return _direct_table(model, h), False
    except DomainError:
        if 0 < model.Y < 1:
            return None, False
        raise


# ---------------------------------------------------------------------------
# generalized hyperbolic and NIG


@dataclass(frozen=True)
class GeneralizedHyperbolic(LevyModel):
    alpha: float = 1.0
    beta: float = 0.0
    delta: float = 1.0
    mu: float = 0.0
    lambda_gh: float = 1.0
    name: ClassVar[str] = "gh"
    param_aliases: ClassVar[dict] = {"lambda": "lambda_gh"}

    def problems(self):
        out = []
        require(finite(self.alpha) and self.alpha > 0, "alpha > 0 violated", out)
        require(finite(self.delta) and self.delta > 0, "delta > 0 violated", out)
        require(finite(self.beta) and abs(self.beta) < self.alpha, "|beta| < alpha violated", out)
        require(finite(self.mu), "mu finite violated", out)
        require(finite(self.lambda_gh), "lambda finite violated", out)
        return out

    @property
    def gamma(self) -> float:
        return math.sqrt(self.alpha**2 - self.beta**2)

    @property
    def zeta(self) -> float:
        return self.delta * self.gamma

    def mgf_domain(self):
        closed = self.lambda_gh < 0
        op = ">=" if closed else ">"
        return MgfDomain(lower=-self.alpha - self.beta, upper=self.alpha - self.beta,
                         lower_closed=closed, upper_closed=closed,
                         martingale_constraint=f"alpha^2 {op} (beta+1)^2")

    def _psi(self, u):
        lam, d, b = self.lambda_gh, self.delta, self.beta
        a = self.alpha**2 - b * b
        shift = u * u - 2j * b * u  # w - a with w = alpha^2 - (beta + iu)^2
        w = a + shift
        at_branch = w == 0
        w_safe = np.where(at_branch, 1.0, w)
        out = 0.5 * lam * complex_log1p(shift / a) - (
            log_bessel_k(lam, d * np.sqrt(w_safe)) - log_bessel_k(lam, d * math.sqrt(a))
        ) - 1j * u * self.mu
        if np.any(at_branch):
            # w -> 0 limit, finite only for lambda < 0
            limit = (
                -0.5 * lam * math.log(a)
                - (math.lgamma(-lam) - math.log(2.0))
                - lam * math.log(0.5 * d)
                + float(log_bessel_k(lam, d * math.sqrt(a)))
            )
            out = np.where(at_branch, limit - 1j * u * self.mu, out)
        return out

    def _bessel_ratio(self, shift: int) -> float:
        z = self.zeta
        return float(np.exp(log_bessel_k(self.lambda_gh + shift, z) - log_bessel_k(self.lambda_gh, z)))

    def mean(self):
        return self.mu + self.beta * self.delta**2 * self._bessel_ratio(1) / self.zeta

    def variance(self):
        r1 = self._bessel_ratio(1)
        r2 = self._bessel_ratio(2)
        return self.delta**2 * (r1 / self.zeta + (self.beta / self.gamma) ** 2 * (r2 - r1 * r1))

    def levy_triplet(self):
        self.check()
        return LevyTriplet(drift=self.mean(), sigma=0.0, truncation="centered",
                           symbolic="nu^GH: Bessel J/Y integral, not evaluated")

    def density(self, x, t=1.0):
        self.check()
        if not math.isclose(float(t), 1.0):
            raise NotTractableError("gh: density is available for t = 1 only")
        lam, al, d = self.lambda_gh, self.alpha, self.delta
        x = np.asarray(x, dtype=float)
        q = np.hypot(d, x - self.mu)
        log_c = (lam * math.log(self.gamma) - lam * math.log(d) + (0.5 - lam) * math.log(al)
                 - 0.5 * math.log(2.0 * math.pi) - float(log_bessel_k(lam, self.zeta)))
        with np.errstate(invalid="ignore"):
            log_f = log_c + (lam - 0.5) * np.log(q) + log_bessel_k(lam - 0.5, al * q) + self.beta * (x - self.mu)
        return np.where(np.isinf(x), 0.0, np.exp(log_f))

    def sample(self, h, stream, size=None):
        self.check()
        if math.isclose(float(h), 1.0, rel_tol=0.0, abs_tol=1e-14):
            a = self.alpha**2 - self.beta**2
            clock = np.asarray(rng.sample_gig(self.lambda_gh, a, self.delta**2, stream, size))
            z = np.asarray(rng.sample_normal(stream, size))
            out = self.mu + self.beta * clock + np.sqrt(clock) * z
        else:
            out = np.asarray(_gh_table(self, float(h)).sample(stream, size))
        return float(out) if size is None else out


@lru_cache(maxsize=64)
def _gh_table(model: GeneralizedHyperbolic, h: float) -> TabulatedLaw:
    return _direct_table(model, h)


@dataclass(frozen=True)
class NIG(LevyModel):
    """Normal inverse Gaussian: the GH model with lambda = -1/2."""

    alpha: float = 1.0
    beta: float = 0.0
    delta: float = 1.0
    mu: float = 0.0
    name: ClassVar[str] = "nig"

    def problems(self):
        return self.as_gh().problems()

    def as_gh(self) -> GeneralizedHyperbolic:
        return GeneralizedHyperbolic(self.alpha, self.beta, self.delta, self.mu, -0.5)

    @property
    def gamma(self) -> float:
        return math.sqrt(self.alpha**2 - self.beta**2)

    def mgf_domain(self):
        return self.as_gh().mgf_domain()

    def _psi(self, u):
        a = self.alpha**2 - self.beta**2
        shift = u * u - 2j * self.beta * u
        root_a = math.sqrt(a)
        # sqrt(w) - sqrt(a) = (w - a) / (sqrt(w) + sqrt(a))
        return self.delta * shift / (np.sqrt(a + shift) + root_a) - 1j * u * self.mu

    def mean(self):
        return self.mu + self.beta * self.delta / self.gamma

    def variance(self):
        return self.delta * self.alpha**2 / self.gamma**3

    def jump_density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            safe = np.where(ax > 0, ax, 1.0)
            val = self.delta * self.alpha / (math.pi * safe) * np.exp(self.beta * x + log_bessel_k(1, self.alpha * safe))
        return np.where(ax > 0, val, np.nan)

    def levy_triplet(self):
        self.check()
        drift = self.mean() - _tail_first_moment(self.jump_density)
        return LevyTriplet(drift=drift, sigma=0.0, jump_density=self.jump_density)

    def density(self, x, t=1.0):
        """NIG density; the family is closed under convolution so any t > 0 works."""
        self.check()
        t = float(t)
        if t <= 0:
            raise DomainError("density requires t > 0")
        d, mu, al = self.delta * t, self.mu * t, self.alpha
        x = np.asarray(x, dtype=float)
        q = np.hypot(d, x - mu)
        with np.errstate(invalid="ignore"):
            log_f = (math.log(al * d / math.pi) + log_bessel_k(1, al * q) - np.log(q)
                     + d * self.gamma + self.beta * (x - mu))
        return np.where(np.isinf(x), 0.0, np.exp(log_f))

    def sample(self, h, stream, size=None):
        """Inverse-Gaussian subordination: mu h + beta T + W(T), T ~ IG(delta h / gamma, (delta h)^2)."""
        self.check()
        dh = self.delta * h
        clock = np.asarray(rng.sample_inverse_gaussian(dh / self.gamma, dh * dh, stream, size))
        z = np.asarray(rng.sample_normal(stream, size))
        out = self.mu * h + self.beta * clock + np.sqrt(clock) * z
        return float(out) if size is None else out
