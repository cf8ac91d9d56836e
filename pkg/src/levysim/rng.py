"""Seeded random streams and the distributional samplers used by the models.

A :class:`RngStream` is identified by ``(seed, stream_id)``; two streams with
the same pair produce bitwise-identical draws.  Every sampler takes its
parameters first, the stream second, and an optional ``size``.  With
``size=None`` a scalar is returned.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SamplerFailure
from .specfun import log_gamma_complex

__all__ = [
    "RngStream",
    "MAX_REJECTION_ROUNDS",
    "MAX_STABLE_PIECES",
    "sample_uniform",
    "sample_normal",
    "sample_exponential",
    "sample_gamma",
    "sample_binomial",
    "sample_poisson_count",
    "sample_inverse_gaussian",
    "sample_gig",
    "sample_meixner_increment",
    "sample_positive_stable",
    "sample_tempered_stable",
]

MAX_REJECTION_ROUNDS = 10**6
MAX_STABLE_PIECES = 10**4
_POISSON_DIRECT_MEAN = 1000.0  # above this, counts come from numpy's Poisson draw
_STABLE_BLOCK = 2**22  # proposals held in memory at once


class RngStream:
    """Deterministic random stream built from a 64-bit seed and a stream id.

    Streams with different ids are derived through numpy's ``SeedSequence``
    spawn keys and are statistically independent.  A stream must not be
    shared between threads.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        seed = int(seed)
        stream_id = int(stream_id)
        if not (0 <= seed < 2**64 and 0 <= stream_id < 2**64):
            raise DomainError("seed and stream_id must be 64-bit unsigned integers")
        self.seed = seed
        self.stream_id = stream_id
        seq = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _out(x, size):
    if size is None:
        return x.item() if isinstance(x, np.ndarray) else x
    return x


def _shape(size):
    if size is None:
        return ()
    return (size,) if np.isscalar(size) else tuple(size)


def _positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return arr


def sample_uniform(stream: RngStream, size=None):
    """Uniform draws on the open interval (0, 1)."""
    k = stream.generator.integers(0, 2**52, size=_shape(size), dtype=np.int64)
    return _out((k + 0.5) * 2.0**-52, size)


def sample_normal(stream: RngStream, size=None):
    return _out(np.asarray(stream.generator.standard_normal(_shape(size))), size)


def sample_exponential(rate, stream: RngStream, size=None):
    rate = _positive("rate", rate)
    draws = stream.generator.standard_exponential(_shape(size)) / rate
    return _out(np.asarray(draws), size)


def sample_gamma(shape, rate, stream: RngStream, size=None):
    """Gamma(shape, rate) draws (mean ``shape / rate``).

    ``shape`` may be an array; entries equal to zero yield exact zeros, which
    lets compound sums with an empty jump count pass straight through.
    """
    shape = np.asarray(shape, dtype=float)
    rate = _positive("rate", rate)
    if not np.all(np.isfinite(shape)) or np.any(shape < 0):
        raise DomainError(f"gamma shape must be non-negative, got {shape}")
    if size is None and shape.ndim == 0 and shape <= 0:
        raise DomainError("gamma shape must be positive")
    out_shape = _shape(size) if size is not None else np.broadcast_shapes(shape.shape, rate.shape)
    draws = stream.generator.standard_gamma(np.broadcast_to(shape, out_shape)) / rate
    return _out(np.asarray(draws), size)


def sample_binomial(n, p, stream: RngStream, size=None):
    n = np.asarray(n)
    p = float(p)
    if np.any(n < 0) or not np.all(n == np.floor(n)):
        raise DomainError(f"binomial n must be a non-negative integer, got {n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binomial p must lie in [0, 1], got {p}")
    out_shape = _shape(size) if size is not None else n.shape
    draws = stream.generator.binomial(np.broadcast_to(n.astype(np.int64), out_shape), p)
    return _out(np.asarray(draws), size)


def sample_poisson_count(mean, stream: RngStream, size=None):
    """Poisson count by summing exponential inter-arrival times.

    Arrivals are counted while the running sum of ``-log(U)`` stays below
    ``mean``.  Means above 1000 use numpy's Poisson generator instead, since
    the inter-arrival loop costs one pass per arrival.  ``mean`` may be an
    array matching ``size``.
    """
    mean = np.asarray(mean, dtype=float)
    if not np.all(np.isfinite(mean)) or np.any(mean < 0):
        raise DomainError(f"Poisson mean must be non-negative, got {mean}")
    out_shape = _shape(size) if size is not None else mean.shape
    mean = np.broadcast_to(mean, out_shape).ravel()
    count = np.zeros(mean.size, dtype=np.int64)
    total = np.zeros(mean.size)
    large = np.flatnonzero(mean > _POISSON_DIRECT_MEAN)
    if large.size:
        count[large] = stream.generator.poisson(mean[large])
    active = np.flatnonzero((mean > 0) & (mean <= _POISSON_DIRECT_MEAN))
    while active.size:
        total[active] -= np.log(sample_uniform(stream, active.size))
        arrived = total[active] < mean[active]
        count[active[arrived]] += 1
        active = active[arrived]
    return _out(count.reshape(out_shape), size)


def sample_inverse_gaussian(mean_param, shape_param, stream: RngStream, size=None):
    """Inverse Gaussian IG(mean, shape) by the transformation-with-roots method."""
    mu = _positive("inverse Gaussian mean", mean_param)
    lam = _positive("inverse Gaussian shape", shape_param)
    out_shape = _shape(size) if size is not None else np.broadcast_shapes(mu.shape, lam.shape)
    mu = np.broadcast_to(mu, out_shape)
    lam = np.broadcast_to(lam, out_shape)
    nu = sample_normal(stream, out_shape) ** 2
    mu_nu = mu * nu
    root = np.sqrt(mu_nu * (4.0 * lam + mu_nu))
    x = mu * (1.0 + (mu_nu - root) / (2.0 * lam))
    # guards against x = 0 from rounding when lam / mu is tiny
    x = np.maximum(x, np.finfo(float).tiny)
    u = sample_uniform(stream, out_shape)
    draws = np.where(u <= mu / (mu + x), x, mu * mu / x)
    return _out(np.asarray(draws), size)


def _gig_psi(x, alpha, lam):
    return -alpha * (np.cosh(x) - 1.0) - lam * (np.expm1(x) - x)


def _gig_dpsi(x, alpha, lam):
    return -alpha * np.sinh(x) - lam * np.expm1(x)


def _gig_standard(lam, omega, stream, n):
    """Draws of log(X / m) for X ~ GIG(lam, omega, omega), lam >= 0 (Devroye's method)."""
    alpha = math.sqrt(omega * omega + lam * lam) - lam
    x = -float(_gig_psi(1.0, alpha, lam))
    if 0.5 <= x <= 2.0:
        t = 1.0
    elif x > 2.0:
        t = math.sqrt(2.0 / (alpha + lam))
    else:
        t = math.log(4.0 / (alpha + 2.0 * lam))
    x = -float(_gig_psi(-1.0, alpha, lam))
    if 0.5 <= x <= 2.0:
        s = 1.0
    elif x > 2.0:
        s = math.sqrt(4.0 / (alpha * math.cosh(1.0) + lam))
    else:
        cand = math.log(1.0 + 1.0 / alpha + math.sqrt(1.0 / alpha**2 + 2.0 / alpha))
        s = cand if lam == 0 else min(1.0 / lam, cand)

    eta = -float(_gig_psi(t, alpha, lam))
    zeta = -float(_gig_dpsi(t, alpha, lam))
    theta = -float(_gig_psi(-s, alpha, lam))
    xi = float(_gig_dpsi(-s, alpha, lam))
    p = 1.0 / xi
    r = 1.0 / zeta
    td = t - r * eta
    sd = s - p * theta
    q = td + sd

    out = np.empty(n)
    pending = np.arange(n)
    for _ in range(MAX_REJECTION_ROUNDS):
        if pending.size == 0:
            return out
        k = pending.size
        u = sample_uniform(stream, k) * (p + q + r)
        v = sample_uniform(stream, k)
        w = sample_uniform(stream, k)
        cand = np.where(
            u < q,
            -sd + q * v,
            np.where(u < q + r, td - r * np.log(v), -sd + p * np.log(v)),
        )
        with np.errstate(over="ignore"):
            envelope = np.where(
                cand > td,
                np.exp(-eta - zeta * (cand - t)),
                np.where(cand < -sd, np.exp(-theta + xi * (cand + s)), 1.0),
            )
            accept = w * envelope <= np.exp(_gig_psi(cand, alpha, lam))
        out[pending[accept]] = cand[accept]
        pending = pending[~accept]
    raise SamplerFailure("GIG rejection sampler exceeded its iteration cap")


def sample_gig(p, a, b, stream: RngStream, size=None):
    """Generalised inverse Gaussian draws with density

        (a/b)^(p/2) / (2 K_p(sqrt(ab))) x^(p-1) exp(-(a x + b/x) / 2),  x > 0.
    """
    p = float(p)
    a = float(_positive("GIG a", a))
    b = float(_positive("GIG b", b))
    if not math.isfinite(p):
        raise DomainError("GIG p must be finite")
    n = int(np.prod(_shape(size)))
    lam = abs(p)
    omega = math.sqrt(a * b)
    log_draw = _gig_standard(lam, omega, stream, n)
    mode_scale = lam / omega + math.sqrt(1.0 + (lam / omega) ** 2)
    x = np.exp(log_draw) * mode_scale
    if p < 0:
        x = 1.0 / x
    x = x * math.sqrt(b / a)
    return _out(x.reshape(_shape(size)), size)


def sample_meixner_increment(t, alpha, m, delta, stream: RngStream, size=None):
    """Symmetric Meixner increment over time ``t``, shifted by ``t * m``.

    The draw targets the density proportional to |Gamma(t delta + i v / alpha)|^2.
    Proposals are V = (alpha/2) max(sqrt(2r), 2r) Q with Q a ratio of two
    U(-1, 1) variates; the flat body (|Q| < 1) and the 1/Q^2 tails use the
    two acceptance tests below.
    """
    t = float(_positive("t", t))
    alpha = float(_positive("alpha", alpha))
    delta = float(_positive("delta", delta))
    m = float(m)
    r = t * delta
    shift = t * m
    n = int(np.prod(_shape(size)))
    scale = 0.5 * alpha * max(math.sqrt(2.0 * r), 2.0 * r)
    log_body = 2.0 * float(log_gamma_complex(r).real)
    log_tail = (
        math.log(max(1.0, 2.0 * r))
        + 2.0 * math.log(alpha)
        + 2.0 * float(log_gamma_complex(r + 1.0).real)
        - math.log(2.0 * r)
    )

    out = np.empty(n)
    pending = np.arange(n)
    for _ in range(MAX_REJECTION_ROUNDS):
        if pending.size == 0:
            return _out(out.reshape(_shape(size)), size)
        k = pending.size
        q = (2.0 * sample_uniform(stream, k) - 1.0) / (2.0 * sample_uniform(stream, k) - 1.0)
        v = scale * q
        log_u = np.log(sample_uniform(stream, k))
        log_target = 2.0 * log_gamma_complex(r + 1j * v / alpha).real
        body = np.abs(q) < 1.0
        with np.errstate(divide="ignore"):
            accept = np.where(
                body,
                log_body + log_u < log_target,
                log_tail + log_u < log_target + 2.0 * np.log(np.abs(v)),
            )
        out[pending[accept]] = v[accept] + shift
        pending = pending[~accept]
    raise SamplerFailure("Meixner rejection sampler exceeded its iteration cap")


def _log_positive_stable(a, stream, n):
    # Kanter's representation, kept in logs: S^{a/(1-a)} = A(U) / E
    u = math.pi * sample_uniform(stream, n)
    e = stream.generator.standard_exponential(n)
    log_a = (a / (1.0 - a)) * np.log(np.sin(a * u)) + np.log(np.sin((1.0 - a) * u)) - np.log(np.sin(u)) / (1.0 - a)
    return (1.0 - a) / a * (log_a - np.log(e))


def sample_positive_stable(index, stream: RngStream, size=None):
    """Positive stable S with E[exp(-lam S)] = exp(-lam^index), 0 < index < 1 (Kanter)."""
    a = float(index)
    if not 0 < a < 1:
        raise DomainError("positive stable index must lie in (0, 1)")
    n = int(np.prod(_shape(size)))
    with np.errstate(over="ignore"):
        s = np.exp(_log_positive_stable(a, stream, n))
    return _out(s.reshape(_shape(size)), size)


def sample_tempered_stable(index, scale, tilt, stream: RngStream, size=None):
    """Exponentially tilted positive stable law, 0 < index < 1.

    Laplace transform exp(-scale [(tilt + lam)^index - tilt^index]).  The
    target is split into k independent pieces with stable proposals and
    acceptance probability exp(-scale tilt^index / k) >= 1/2 each.  Raises
    :class:`SamplerFailure` when k exceeds ``MAX_STABLE_PIECES``.
    """
    a = float(index)
    scale = float(_positive("scale", scale))
    tilt = float(_positive("tilt", tilt))
    if not 0 < a < 1:
        raise DomainError("tempered stable index must lie in (0, 1)")
    mass = scale * tilt**a
    if not mass / math.log(2.0) <= MAX_STABLE_PIECES:
        raise SamplerFailure(f"tempered stable sampler needs more than {MAX_STABLE_PIECES} pieces "
                             f"(scale * tilt^index = {mass:.3g})")
    pieces = max(1, math.ceil(mass / math.log(2.0)))
    log_piece_scale = math.log(scale / pieces) / a
    n = int(np.prod(_shape(size)))
    out = np.zeros(n)
    block = max(1, min(pieces, _STABLE_BLOCK // max(n, 1)))
    done = 0
    while done < pieces:
        k = min(block, pieces - done)
        draws = np.empty(n * k)
        pending = np.arange(n * k)
        for _ in range(MAX_REJECTION_ROUNDS):
            if pending.size == 0:
                break
            with np.errstate(over="ignore"):
                s = np.exp(log_piece_scale + _log_positive_stable(a, stream, pending.size))
                accept = np.log(sample_uniform(stream, pending.size)) < -tilt * s
            draws[pending[accept]] = s[accept]
            pending = pending[~accept]
        else:
            raise SamplerFailure("tempered stable sampler exceeded its iteration cap")
        out += draws.reshape(n, k).sum(axis=1)
        done += k
    return _out(out.reshape(_shape(size)), size)
