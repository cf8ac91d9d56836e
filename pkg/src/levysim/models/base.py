"""Common contract shared by the ten model classes."""

from __future__ import annotations

import math
from dataclasses import MISSING, dataclass, fields
from typing import Callable, ClassVar, Optional

import numpy as np

from ..errors import (
    DomainError,
    InvalidModelError,
    MartingaleCorrectionUnavailable,
    NotTractableError,
)


@dataclass(frozen=True)
class LevyTriplet:
    """Drift, Gaussian coefficient and jump measure of a Levy process.

    ``drift`` follows the unit-ball truncation

        Psi(u) = -i drift u + sigma^2 u^2 / 2 + int (1 - e^{iux} + iux 1{|x|<1}) nu(dx)

    unless ``truncation == "centered"``, in which case the compensator runs
    over all jump sizes and ``drift`` equals E[L_1].  ``jump_density`` is
    ``None`` when the measure has no evaluable density; ``atoms`` lists point
    masses as ``(location, mass)`` pairs and ``symbolic`` describes measures
    that are reported only in closed form.
    """

    drift: float
    sigma: float
    jump_density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    atoms: tuple = ()
    truncation: str = "unit-ball"
    symbolic: Optional[str] = None

    @property
    def gaussian_variance(self) -> float:
        return self.sigma**2

    @property
    def has_jumps(self) -> bool:
        return self.jump_density is not None or bool(self.atoms) or self.symbolic is not None


@dataclass(frozen=True)
class CfCurve:
    u_grid: np.ndarray
    t: float
    values: np.ndarray
    risk_neutral: bool = False
    rate: Optional[float] = None


@dataclass(frozen=True)
class MgfDomain:
    """Interval of real z with E[exp(z L_1)] finite.

    Endpoints are included only when the matching ``*_closed`` flag is set.
    """

    lower: float = -math.inf
    upper: float = math.inf
    lower_closed: bool = False
    upper_closed: bool = False
    # name of the constraint that makes z = 1 admissible, for diagnostics
    martingale_constraint: str = ""

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        lo = (z >= self.lower) if self.lower_closed else (z > self.lower)
        hi = (z <= self.upper) if self.upper_closed else (z < self.upper)
        return lo & hi


class LevyModel:
    """Base class.  Subclasses are frozen dataclasses holding parameters."""

    name: ClassVar[str] = ""
    # CLI / config parameter name -> dataclass field
    param_aliases: ClassVar[dict] = {}
    finite_activity: ClassVar[bool] = False

    # -- parameter handling -------------------------------------------------

    @classmethod
    def from_params(cls, params: dict):
        """Build from a CLI-style mapping such as ``{"lambda": 2.0}``."""
        names = {f.name for f in fields(cls) if f.init}
        kwargs = {}
        unknown = []
        for key, value in params.items():
            target = cls.param_aliases.get(key, key)
            if target not in names:
                unknown.append(key)
                continue
            kwargs[target] = float(value)
        if unknown:
            raise InvalidModelError([f"unknown parameter {k!r} for model {cls.name}" for k in unknown])
        missing = [n for n in names if n not in kwargs and _field_default(cls, n) is None]
        if missing:
            raise InvalidModelError([f"missing parameter {m!r} for model {cls.name}" for m in missing])
        return cls(**kwargs)

    def params(self) -> dict:
        reverse = {v: k for k, v in self.param_aliases.items()}
        return {reverse.get(f.name, f.name): getattr(self, f.name) for f in fields(self) if f.init}

    def describe(self) -> str:
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in self.params().items())
        return f"{self.name}({inner})"

    # -- validation ---------------------------------------------------------

    def problems(self) -> list:
        """Violated parameter constraints, one message each."""
        return []

    def mgf_domain(self) -> MgfDomain:
        return MgfDomain(martingale_constraint="")

    def risk_neutral_problems(self) -> list:
        if self.mgf_domain().contains(1.0):
            return []
        constraint = self.mgf_domain().martingale_constraint or "E[exp(L_1)] < inf"
        return [f"{constraint} violated"]

    def validate(self, risk_neutral: bool = False) -> list:
        issues = list(self.problems())
        if not issues and risk_neutral:
            issues += self.risk_neutral_problems()
        return issues

    def check(self, risk_neutral: bool = False):
        issues = self.validate(risk_neutral)
        if issues:
            raise InvalidModelError(issues)
        return self

    # -- characteristic exponent --------------------------------------------

    def _psi(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def char_exponent(self, u):
        """Psi(u) with E[exp(i u L_t)] = exp(-t Psi(u)).

        ``u`` may be complex as long as ``-Im(u)`` lies in the exponential
        moment domain of the model.
        """
        self.check()
        u = np.asarray(u, dtype=complex)
        if np.any(u.imag != 0):
            ok = self.mgf_domain().contains(-u.imag)
            if not np.all(ok):
                raise DomainError(
                    f"{self.name}: u outside the strip where Psi is finite "
                    f"(need -Im(u) in the exponential-moment domain)"
                )
        out = np.asarray(self._psi(u), dtype=complex)
        # Psi(0) = 0 exactly
        out = np.where(u == 0, 0.0 + 0.0j, out)
        return out[()] if out.ndim == 0 else out

    def char_function(self, u, t: float, risk_neutral: bool = False, rate: float = 0.0):
        t = float(t)
        if t < 0:
            raise DomainError("horizon t must be non-negative")
        if risk_neutral:
            self.check(risk_neutral=True)
        u = np.asarray(u, dtype=complex)
        if t == 0:
            out = np.ones(u.shape, dtype=complex)
            return out[()] if out.ndim == 0 else out
        expo = -t * np.asarray(self.char_exponent(u))
        if risk_neutral:
            expo = expo + 1j * u * self.mean_correction(rate) * t
        out = np.exp(expo)
        return out[()] if out.ndim == 0 else out

    def mean_correction(self, rate: float = 0.0) -> float:
        """omega = rate + Psi(-i), so that exp(omega t + L_t) has mean exp(rate t)."""
        self.check()
        issues = self.risk_neutral_problems()
        if issues:
            raise MartingaleCorrectionUnavailable(f"{self.name}: " + "; ".join(issues))
        return float(rate) + float(np.real(self.char_exponent(-1j)))

    # -- moments ------------------------------------------------------------

    def mean(self) -> float:
        raise NotTractableError(f"{self.name}: no closed-form mean")

    def variance(self) -> float:
        raise NotTractableError(f"{self.name}: no closed-form variance")

    # -- triplet / density / sampling ---------------------------------------

    def levy_triplet(self) -> LevyTriplet:
        raise NotImplementedError

    def density(self, x, t: float = 1.0):
        raise NotTractableError(f"{self.name}: the law of L_t has no tractable density")

    def sample(self, h: float, stream, size=None):
        raise NotImplementedError


def _field_default(cls, name):
    for f in fields(cls):
        if f.name == name and f.default is not MISSING:
            return f.default
    return None


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (int, float)) else str(v)


def require(cond: bool, message: str, out: list):
    if not cond:
        out.append(message)


def finite(*values) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)
