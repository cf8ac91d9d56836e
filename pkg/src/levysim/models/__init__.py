"""The ten Levy models and a functional front end over them.

Every model is a frozen dataclass deriving from :class:`LevyModel`, so a
model instance doubles as the model specification passed around the
package.
"""

from __future__ import annotations

from .base import CfCurve, LevyModel, LevyTriplet, MgfDomain
from .jump_diffusion import (
    BrownianMotion,
    CompoundPoisson,
    DoubleExpJump,
    GenericJump,
    JumpLaw,
    Kou,
    Merton,
    NormalJump,
    PoissonProcess,
)
from .meixner import Meixner
from .subordinated import CGMY, NIG, GeneralizedHyperbolic, VarianceGamma, gamma_density, gig_density
from ..errors import InvalidModelError

MODELS = {
    cls.name: cls
    for cls in (BrownianMotion, PoissonProcess, CompoundPoisson, Merton, Kou,
                VarianceGamma, CGMY, NIG, GeneralizedHyperbolic, Meixner)
}

# Figure-caption parameter sets.  Kou uses finite-mean up-jumps (theta1 > 1)
# so that the same set is usable under the risk-neutral measure.
DEFAULT_PARAMS = {
    "bm": {"mu": 0.5, "sigma": 0.5},
    "poisson": {"lambda": 100.0},
    "cpp": {"lambda": 100.0, "mu_xi": 0.0, "sigma_xi": 1.0},
    "merton": {"mu": 0.5, "sigma": 0.75, "lambda": 1.5, "mu_xi": 0.0, "sigma_xi": 1.0},
    "kou": {"mu": 0.5, "sigma": 0.75, "lambda": 1.5, "p": 0.5, "theta1": 3.0, "theta2": 2.0},
    "vg": {"sigma": 0.75, "nu": 0.5, "theta": 0.1},
    "cgmy": {"C": 5.0, "G": 25.0, "M": 25.0, "Y": 1.0},
    "nig": {"alpha": 2.0, "beta": 1.0, "delta": 1.5, "mu": 0.0},
    "gh": {"alpha": 2.0, "beta": 1.0, "delta": 1.5, "mu": 0.0, "lambda": 1.0},
    "meixner": {"alpha": 0.5, "beta": 0.0, "delta": 4.0},
}


def make_model(name: str, params: dict | None = None) -> LevyModel:
    """Build a model from its registry name and a CLI-style parameter map.

    Missing parameters fall back to :data:`DEFAULT_PARAMS`.
    """
    if name not in MODELS:
        raise InvalidModelError([f"unknown model {name!r}; expected one of {', '.join(MODELS)}"])
    merged = dict(DEFAULT_PARAMS[name])
    merged.update(params or {})
    return MODELS[name].from_params(merged)


def default_model(name: str) -> LevyModel:
    return make_model(name)


def validate(spec: LevyModel, risk_neutral: bool = False) -> list:
    """List of violated constraints; empty when the parameters are usable."""
    return spec.validate(risk_neutral)


def char_exponent(spec: LevyModel, u):
    return spec.char_exponent(u)


def char_function(spec: LevyModel, u, t: float, risk_neutral: bool = False, rate: float = 0.0):
    return spec.char_function(u, t, risk_neutral=risk_neutral, rate=rate)


def cf_curve(spec: LevyModel, u_grid, t: float, risk_neutral: bool = False, rate: float = 0.0) -> CfCurve:
    import numpy as np

    u = np.asarray(u_grid, dtype=float)
    values = np.asarray(spec.char_function(u, t, risk_neutral=risk_neutral, rate=rate), dtype=complex)
    return CfCurve(u_grid=u, t=float(t), values=values, risk_neutral=risk_neutral,
                   rate=float(rate) if risk_neutral else None)


def mean_correction(spec: LevyModel, rate: float = 0.0) -> float:
    return spec.mean_correction(rate)


def levy_triplet(spec: LevyModel) -> LevyTriplet:
    return spec.levy_triplet()


def density(spec: LevyModel, x, t: float = 1.0):
    return spec.density(x, t)


def sample_increment(spec: LevyModel, h: float, stream, size=None):
    """One increment L_{t+h} - L_t (or ``size`` independent ones)."""
    if not h > 0:
        from ..errors import DomainError

        raise DomainError("step h must be positive")
    return spec.sample(h, stream, size)


__all__ = [
    "CGMY", "NIG", "BrownianMotion", "CfCurve", "CompoundPoisson", "DEFAULT_PARAMS",
    "DoubleExpJump", "GeneralizedHyperbolic", "GenericJump", "JumpLaw", "Kou", "LevyModel",
    "LevyTriplet", "MODELS", "Meixner", "Merton", "MgfDomain", "NormalJump", "PoissonProcess",
    "VarianceGamma", "cf_curve", "char_exponent", "char_function", "default_model", "density",
    "gamma_density", "gig_density", "levy_triplet", "make_model", "mean_correction",
    "sample_increment", "validate",
]
