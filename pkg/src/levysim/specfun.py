"""Special functions used by the model formulas.

* ``bessel_k`` / ``log_bessel_k`` -- modified Bessel function of the second
  kind for real order and real or complex argument with positive real part.
* ``log_gamma_complex`` -- Lanczos log-gamma on the right half-plane.
* ``h_y_kernel`` -- the integral kernel of the CGMY time change.

Everything here is a pure function of its inputs and vectorises over numpy
arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError

__all__ = [
    "QuadratureSpec",
    "bessel_k",
    "log_bessel_k",
    "log_gamma_complex",
    "gamma_complex",
    "gamma_real",
    "h_y_kernel",
    "complex_log1p",
    "complex_expm1",
]

_ASYMPTOTIC_ABS = 30.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for the trapezoid-type quadratures in this module.

    ``truncation_bound`` is the relative integrand level at which the
    infinite range is cut off.  With ``scheme_id="adaptive"`` the node count
    is doubled until two successive estimates agree to ``rtol``.
    """

    node_count: int = 256
    truncation_bound: float = 1e-16
    scheme_id: str = "fixed-node"
    rtol: float = 1e-14

    def __post_init__(self):
        if int(self.node_count) < 16:
            raise DomainError(f"node_count must be >= 16, got {self.node_count}")
        if not self.truncation_bound > 0:
            raise DomainError("truncation_bound must be positive")
        if self.scheme_id not in ("adaptive", "fixed-node"):
            raise DomainError(f"unknown quadrature scheme {self.scheme_id!r}")

    @property
    def log_cutoff(self) -> float:
        return math.log(self.truncation_bound) - 4.0


DEFAULT_QUADRATURE = QuadratureSpec()


# ---------------------------------------------------------------------------
# small complex helpers


def complex_log1p(z):
    """log(1 + z) without cancellation for small complex ``z``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    re = 0.5 * np.log1p(x * (2.0 + x) + y * y)
    im = np.arctan2(y, 1.0 + x)
    return re + 1j * im


def complex_expm1(z):
    """exp(z) - 1 without cancellation for small complex ``z``."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    half = np.sin(0.5 * y)
    re = np.expm1(x) * np.cos(y) - 2.0 * half * half
    im = np.exp(x) * np.sin(y)
    return re + 1j * im


def _logsumexp_weighted(log_terms, weights, axis=-1):
    # log(sum w * exp(a)) for complex a, stabilised by the largest real part
    m = np.max(log_terms.real, axis=axis, keepdims=True)
    s = np.sum(weights * np.exp(log_terms - m), axis=axis)
    return np.squeeze(m, axis=axis) + np.log(s)


# ---------------------------------------------------------------------------
# Bessel K


def _check_bessel_args(order, z):
    order = float(order)
    if not math.isfinite(order):
        raise DomainError(f"Bessel order must be finite, got {order}")
    z = np.asarray(z)
    # z = +inf is allowed and gives K = 0
    if not np.all(np.isfinite(z) | (np.real(z) == np.inf) & (np.imag(z) == 0)):
        raise DomainError("Bessel argument must be finite or +inf")
    if np.any(np.real(z) <= 0):
        raise DomainError("Bessel K requires an argument with positive real part")
    return abs(order), z


def _asymptotic_log_k(nu, z):
    """Large-argument expansion; returns (log K, converged mask)."""
    mu = 4.0 * nu * nu
    total = np.ones_like(z, dtype=complex)
    term = np.ones_like(z, dtype=complex)
    converged = np.zeros(z.shape, dtype=bool)
    prev = np.full(z.shape, np.inf)
    for k in range(1, 80):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        mag = np.abs(term)
        growing = mag > prev
        # a diverging tail means the series is not usable at this (nu, z)
        active = ~converged & ~growing
        total = np.where(active, total + term, total)
        converged |= active & (mag <= 1e-17 * np.abs(total))
        prev = np.where(active, mag, prev)
        if np.all(converged | growing):
            break
    log_k = 0.5 * np.log(np.pi / (2.0 * z)) - z + np.log(total)
    return log_k, converged


def _integral_log_k(nu, z, quad):
    """log K via the trapezoid rule on K = int_0^inf exp(-z cosh t) cosh(nu t) dt."""
    x = z.real
    theta = np.abs(np.angle(z))
    peak_t = np.arcsinh(nu / x)
    # log integrand bound: -x cosh t + nu t
    peak_val = -x * np.cosh(peak_t) + nu * peak_t
    cutoff = quad.log_cutoff
    upper = peak_t + 1.0
    for _ in range(200):
        val = -x * np.cosh(upper) + nu * upper
        need = val > peak_val + cutoff
        if not np.any(need):
            break
        upper = np.where(need, upper * 1.5 + 0.5, upper)
    # trapezoid error ~ exp(-2 pi d / h) with d the half-width of the analytic strip
    strip = np.maximum(np.pi / 2 - theta, 0.05)
    h_max = 2.0 * np.pi * strip / 40.0

    def estimate(nodes):
        n = np.maximum(nodes, np.ceil(upper / h_max)).astype(int)
        n_max = int(np.max(n)) if n.size else nodes
        j = np.arange(n_max + 1)
        step = upper / n
        t = step[..., None] * j
        w = np.where(j <= n[..., None], 1.0, 0.0)
        w[..., 0] = 0.5
        w = w * np.where(j == n[..., None], 0.5, 1.0)
        nt = nu * t
        log_cosh = nt + np.log1p(np.exp(-2.0 * nt)) - math.log(2.0)
        # e^{-z} is factored out so the principal log of the sum stays on a continuous branch
        half = np.sinh(0.5 * t)
        log_terms = -z[..., None] * (2.0 * half * half) + log_cosh
        log_terms = np.where(w > 0, log_terms, -np.inf)
        return -z + _logsumexp_weighted(log_terms, w) + np.log(step)

    nodes = int(quad.node_count)
    with np.errstate(over="ignore", invalid="ignore"):
        result = estimate(nodes)
    if quad.scheme_id == "adaptive":
        for _ in range(8):
            nodes *= 2
            with np.errstate(over="ignore", invalid="ignore"):
                refined = estimate(nodes)
            done = np.all(np.abs(refined - result) <= quad.rtol * np.maximum(1.0, np.abs(refined)))
            result = refined
            if done:
                break
    return result


def log_bessel_k(order, z, quad: QuadratureSpec = DEFAULT_QUADRATURE):
    """Natural log of the modified Bessel function K_order(z).

    ``z`` may be real (> 0) or complex with positive real part.  For complex
    input the imaginary part of the result is the argument of K modulo 2 pi.
    Arguments with ``|z| > 30`` use the asymptotic expansion when it
    converges; everything else uses the cosh-integral representation.
    """
    nu, z = _check_bessel_args(order, z)
    shape = z.shape
    is_complex = np.iscomplexobj(z)
    zc = z.astype(complex).ravel()
    out = np.empty(zc.shape, dtype=complex)
    at_inf = np.isinf(zc.real)
    out[at_inf] = -np.inf
    big = (np.abs(zc) > _ASYMPTOTIC_ABS) & ~at_inf
    todo = ~big & ~at_inf
    if np.any(big):
        log_k, ok = _asymptotic_log_k(nu, zc[big])
        vals = out[big]
        vals[ok] = log_k[ok]
        out[big] = vals
        idx = np.flatnonzero(big)[~ok]
        todo[idx] = True
    if np.any(todo):
        out[todo] = _integral_log_k(nu, zc[todo], quad)
    if not is_complex:
        out = out.real
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def bessel_k(order, z, quad: QuadratureSpec = DEFAULT_QUADRATURE):
    """Modified Bessel function of the second kind, K_order(z).

    Even in the order, positive for real ``z > 0``, zero at ``z = +inf``.
    Raises ``DomainError`` for other non-finite input or ``Re(z) <= 0``.
    """
    return np.exp(log_bessel_k(order, z, quad))


# ---------------------------------------------------------------------------
# Gamma function

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos(z):
    # valid for Re(z) >= 0.5
    z = z - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        series = series + c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def log_gamma_complex(z):
    """log Gamma(z) for ``Re(z) > 0``.

    The branch of the imaginary part is not normalised; only
    ``exp(log_gamma_complex(z)) == Gamma(z)`` is guaranteed.
    """
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("log_gamma_complex requires finite input")
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise PoleError("Gamma has a pole at non-positive integers")
    if np.any(z.real <= 0):
        raise DomainError("log_gamma_complex requires Re(z) > 0")
    small = z.real < 0.5
    shifted = np.where(small, z + 1.0, z)
    out = _lanczos(shifted)
    out = np.where(small, out - np.log(z), out)
    # Gamma(1) = Gamma(2) = 1 exactly
    out = np.where((z == 1.0) | (z == 2.0), 0.0, out)
    return out[()] if out.ndim == 0 else out


def gamma_complex(z):
    return np.exp(log_gamma_complex(z))


def gamma_real(x: float) -> float:
    """Gamma(x) for real non-integer-pole ``x``, including negative arguments.

    Negative arguments are lifted with Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1)).
    """
    x = float(x)
    if x <= 0 and x == round(x):
        raise PoleError(f"Gamma has a pole at {x}")
    denom = 1.0
    while x <= 0:
        denom *= x
        x += 1.0
    return float(np.exp(log_gamma_complex(x)).real) / denom


# ---------------------------------------------------------------------------
# h_Y kernel


def _h_y_log_integral(z, Y, quad, nodes):
    # exp-sinh substitution y = exp(pi/2 sinh s) absorbs the y^(Y-1) endpoint singularity
    lo = -math.asinh(2.0 * (-quad.log_cutoff + 10.0) / (Y * math.pi))
    y_hi = math.sqrt(2.0 * (-quad.log_cutoff + 10.0)) + 1.0
    hi = math.asinh(2.0 * math.log(y_hi) / math.pi)
    s = np.linspace(lo, hi, nodes + 1)
    w = np.ones_like(s)
    w[0] = w[-1] = 0.5
    log_y = 0.5 * math.pi * np.sinh(s)
    y = np.exp(log_y)
    log_jac = log_y + np.log(0.5 * math.pi * np.cosh(s))
    log_terms = -0.5 * y * y - np.multiply.outer(z, y) + (Y - 1.0) * log_y + log_jac
    step = (hi - lo) / nodes
    return _logsumexp_weighted(log_terms, w).real + math.log(step)


def h_y_kernel(z, Y: float, quad: QuadratureSpec = DEFAULT_QUADRATURE):
    """h_Y(z) = (1/Gamma(Y)) int_0^inf exp(-y^2/2 - y z) y^(Y-1) dy for Y > 0."""
    Y = float(Y)
    if not (math.isfinite(Y) and Y > 0):
        raise DomainError(f"h_Y requires Y > 0, got {Y}")
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)) or np.any(z < 0):
        raise DomainError("h_Y requires finite z >= 0")
    nodes = int(quad.node_count)
    log_val = _h_y_log_integral(z, Y, quad, nodes)
    if quad.scheme_id == "adaptive":
        for _ in range(6):
            nodes *= 2
            refined = _h_y_log_integral(z, Y, quad, nodes)
            done = np.all(np.abs(refined - log_val) <= quad.rtol)
            log_val = refined
            if done:
                break
    out = np.exp(log_val - float(log_gamma_complex(Y).real))
    return out[()] if out.ndim == 0 else out
