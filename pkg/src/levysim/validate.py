"""Statistical checks of the samplers against the analytic side of each model.

Each check returns a :class:`ValidationReport`; reports serialize to one
line of ``key=value`` fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import DomainError
from .models import CGMY, LevyModel, make_model, sample_increment
from .rng import RngStream

ECF_U_GRID = np.arange(-5.0, 5.0 + 1e-9, 0.5)
ECF_FACTOR = 4.0
# CGMY increments for 0 < Y < 2 come from a numerically inverted table
ECF_FACTOR_TABULATED = 6.0
MOMENT_Z = 3.0
FD_STEP = 1e-5
KS_MIN_SIZE = 100

# Models whose exp(L_T) has a usable Monte Carlo standard error at the
# default parameters.  Poisson(100) and CPP(100) produce lognormal-type
# mixtures with variance ratios around e^{300}.
MARTINGALE_MODELS = ("bm", "merton", "kou", "vg", "cgmy", "nig", "gh", "meixner")
# Parameter overrides for the martingale check.  At the default alpha = beta + 1
# GH (lambda > 0) has no exponential moment of order one, and NIG has one but
# E[S_T^2] is infinite, so the Monte Carlo standard error is meaningless.
MARTINGALE_OVERRIDES = {"gh": {"alpha": 4.0}, "nig": {"alpha": 3.0}}


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of one check.

    ``kind == "max"`` means pass iff ``statistic <= threshold``;
    ``kind == "pvalue"`` means pass iff ``statistic >= threshold``.
    """

    test_name: str
    statistic: float
    threshold: float
    passed: bool
    n_samples: int
    model: str
    seed: Optional[int]
    kind: str = "max"
    note: str = ""

    def to_line(self) -> str:
        fields = [
            f"test={self.test_name}",
            f"model={self.model}",
            f"statistic={self.statistic:.6g}",
            f"threshold={self.threshold:.6g}",
            f"pass={'true' if self.passed else 'false'}",
            f"seed={self.seed}",
            f"n={self.n_samples}",
        ]
        if self.note:
            fields.append(f"note={self.note.replace(' ', '_')}")
        return " ".join(fields)


def _report(name, stat, thr, n, model, seed, kind="max", note=""):
    passed = bool(stat <= thr) if kind == "max" else bool(stat >= thr)
    return ValidationReport(name, float(stat), float(thr), passed, int(n), model, seed, kind, note)


# ---------------------------------------------------------------------------
# empirical characteristic function


def empirical_cf(samples, u):
    """(1/n) sum_j exp(i u x_j); vectorized over ``u``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("empirical CF of an empty sample")
    u_arr = np.asarray(u, dtype=float)
    flat = u_arr.ravel()
    out = np.empty(flat.size, dtype=complex)
    for k, uk in enumerate(flat):
        if uk == 0:
            out[k] = 1.0
        else:
            ux = uk * x
            out[k] = complex(np.cos(ux).mean(), np.sin(ux).mean())
    out = out.reshape(u_arr.shape)
    return out[()] if out.ndim == 0 else out


def draw(spec: LevyModel, t: float, n: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """n independent copies of L_t from stream (seed, stream_id)."""
    return np.asarray(sample_increment(spec, t, RngStream(seed, stream_id), n), dtype=float)


def ecf_factor(spec: LevyModel) -> float:
    if isinstance(spec, CGMY) and 0 < spec.Y < 2:
        return ECF_FACTOR_TABULATED
    return ECF_FACTOR


def ecf_gof(spec: LevyModel, t: float = 1.0, n: int = 100_000, u_grid: Sequence[float] = ECF_U_GRID,
            seed: int = 0, factor: Optional[float] = None, sampler_spec: Optional[LevyModel] = None):
    """max_u |ECF(u) - Phi(u; t)| against ``factor / sqrt(n)``.

    ``sampler_spec`` draws from a different model than the one whose CF is
    the target; it exists for negative controls.
    """
    if n < 1000:
        raise DomainError("ecf_gof needs n >= 1000")
    factor = ecf_factor(spec) if factor is None else factor
    x = draw(sampler_spec or spec, t, n, seed)
    u = np.asarray(u_grid, dtype=float)
    stat = np.max(np.abs(empirical_cf(x, u) - spec.char_function(u, t)))
    return _report("ecf_gof", stat, factor / math.sqrt(n), n, spec.describe(), seed,
                   note=f"max|ECF-CF| over {u.size} points, threshold {factor:g}/sqrt(n)")


# ---------------------------------------------------------------------------
# moments


def fd_moments(spec: LevyModel, step: float = FD_STEP):
    """(E[L_1], Var[L_1]) = (i Psi'(0), Psi''(0)) by central differences."""
    plus, minus = spec.char_exponent(step), spec.char_exponent(-step)
    mean = float(np.real(1j * (plus - minus) / (2.0 * step)))
    var = float(np.real((plus + minus) / step**2))  # Psi(0) = 0
    return mean, var


def moment_check(spec: LevyModel, t: float = 1.0, n: int = 100_000, seed: int = 0):
    """Sample mean and variance of L_t against t times the finite-difference moments.

    The statistic is the larger of the two standardized deviations.
    """
    if n < 10_000:
        raise DomainError("moment_check needs n >= 10^4")
    mean1, var1 = fd_moments(spec)
    x = draw(spec, t, n, seed)
    m, v = x.mean(), x.var(ddof=1)
    centred = x - m
    se_mean = math.sqrt(v / n)
    se_var = math.sqrt(max(np.mean(centred**4) - v * v, 0.0) / n)
    z_mean = abs(m - t * mean1) / se_mean if se_mean > 0 else (0.0 if m == t * mean1 else math.inf)
    z_var = abs(v - t * var1) / se_var if se_var > 0 else (0.0 if abs(v - t * var1) < 1e-12 else math.inf)
    return _report("moment_check", max(z_mean, z_var), MOMENT_Z, n, spec.describe(), seed,
                   note=f"z_mean={z_mean:.3g} z_var={z_var:.3g}")


# ---------------------------------------------------------------------------
# martingale


def martingale_check(spec: LevyModel, rate: float = 0.05, s0: float = 100.0, T: float = 1.0,
                     n: int = 100_000, seed: int = 0, apply_correction: bool = True):
    """|mean(S_T) / (s0 e^{rT}) - 1| against three Monte Carlo standard errors.

    ``apply_correction=False`` drops omega and serves as a negative control.
    """
    omega = spec.mean_correction(rate)
    x = draw(spec, T, n, seed)
    s_T = s0 * np.exp((omega * T if apply_correction else 0.0) + x)
    target = s0 * math.exp(rate * T)
    stat = abs(s_T.mean() / target - 1.0)
    thr = MOMENT_Z * s_T.std(ddof=1) / math.sqrt(n) / target
    return _report("martingale_check", stat, thr, n, spec.describe(), seed,
                   note="" if apply_correction else "omega omitted")


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov and chi-square


def _check_sample(x, name):
    x = np.asarray(x, dtype=float).ravel()
    if x.size < KS_MIN_SIZE:
        raise DomainError(f"{name} needs at least {KS_MIN_SIZE} points")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} contains non-finite values")
    return np.sort(x)


def ks_two_sample(a, b):
    """(statistic, asymptotic p-value) of the two-sample KS test."""
    a = _check_sample(a, "first sample")
    b = _check_sample(b, "second sample")
    if a[0] == a[-1] and b[0] == b[-1]:
        raise DomainError("both samples are degenerate")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = math.sqrt(a.size * b.size / (a.size + b.size))
    return d, float(stats.kstwobign.sf(d * en))


def ks_against_cdf(samples, cdf: Callable):
    """(statistic, asymptotic p-value) of the one-sample KS test."""
    x = _check_sample(samples, "sample")
    if x[0] == x[-1]:
        raise DomainError("sample is degenerate")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    k = np.arange(1, n + 1)
    d = float(max(np.max(k / n - f), np.max(f - (k - 1) / n)))
    return d, float(stats.kstwobign.sf(d * math.sqrt(n)))


def cdf_from_density(density: Callable, support=(-np.inf, np.inf), lo=None, hi=None,
                     nodes: int = 200_001, tol: float = 1e-6):
    """CDF evaluator built by cumulative quadrature of ``density``.

    The body [lo, hi] uses a fine trapezoid grid and the tails use adaptive
    quadrature; the total mass must be 1 within ``tol``.
    """
    a, b = support
    lo = a if lo is None else max(lo, a)
    hi = b if hi is None else min(hi, b)
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise DomainError("cdf_from_density needs a finite body interval")
    f = lambda x: float(density(x))  # noqa: E731
    left = integrate.quad(f, a, lo, limit=400)[0] if lo > a else 0.0
    right = integrate.quad(f, hi, b, limit=400)[0] if hi < b else 0.0
    grid = np.linspace(lo, hi, nodes)
    vals = np.asarray(density(grid), dtype=float)
    body = integrate.cumulative_trapezoid(vals, grid, initial=0.0)
    total = left + body[-1] + right
    if abs(total - 1.0) > tol:
        raise DomainError(f"density integrates to {total:.8f}, not 1")
    cum = left + body

    def cdf(x):
        return np.interp(x, grid, cum, left=left, right=left + body[-1]) / total

    return cdf


def ks_against_density(samples, density: Callable, support=(-np.inf, np.inf), tol: float = 1e-6):
    """KS test of ``samples`` against the CDF obtained by integrating ``density``."""
    x = _check_sample(samples, "sample")
    spread = x[-1] - x[0]
    cdf = cdf_from_density(density, support, x[0] - 0.01 * spread, x[-1] + 0.01 * spread, tol=tol)
    return ks_against_cdf(x, cdf)


def chi_square_counts(counts, pmf: Callable[[np.ndarray], np.ndarray], min_expected: float = 5.0):
    """(statistic, p-value) of a chi-square test of integer ``counts`` against ``pmf``.

    Cells with expected count below ``min_expected`` are merged into the tails.
    """
    counts = np.asarray(counts).astype(np.int64).ravel()
    n = counts.size
    lo, hi = int(counts.min()), int(counts.max())
    support = np.arange(lo, hi + 1)
    observed = np.bincount(counts - lo, minlength=support.size).astype(float)
    expected = n * np.asarray(pmf(support), dtype=float)
    expected[0] += n * float(np.sum(pmf(np.arange(0, lo)))) if lo > 0 else 0.0
    expected[-1] = n - expected[:-1].sum()
    obs_cells, exp_cells = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_cells.append(acc_o)
            exp_cells.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and exp_cells:
        obs_cells[-1] += acc_o
        exp_cells[-1] += acc_e
    obs_cells, exp_cells = np.array(obs_cells), np.array(exp_cells)
    if obs_cells.size < 2:
        raise DomainError("too few cells for a chi-square test")
    stat = float(np.sum((obs_cells - exp_cells) ** 2 / exp_cells))
    return stat, float(stats.chi2.sf(stat, obs_cells.size - 1))


# ---------------------------------------------------------------------------
# suite


def run_suite(names: Sequence[str], n: int = 100_000, seed: int = 0, t: float = 1.0,
              rate: float = 0.05, params: Optional[dict] = None) -> list:
    """ecf_gof and moment_check for each named model, plus martingale_check
    where the risk-neutral measure exists."""
    reports = []
    for name in names:
        spec = make_model(name, (params or {}).get(name))
        reports.append(ecf_gof(spec, t=t, n=n, seed=seed))
        reports.append(moment_check(spec, t=t, n=n, seed=seed + 1))
        if name in MARTINGALE_MODELS:
            mspec = spec
            if name in MARTINGALE_OVERRIDES and not (params or {}).get(name):
                mspec = make_model(name, MARTINGALE_OVERRIDES[name])
            if not mspec.validate(risk_neutral=True):
                reports.append(martingale_check(mspec, rate=rate, n=n, seed=seed + 2))
    return reports
