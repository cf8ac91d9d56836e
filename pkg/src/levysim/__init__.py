"""Simulation and characteristic functions of Levy processes.

Ten models (Brownian motion, Poisson, compound Poisson, Merton, Kou,
variance gamma, CGMY, generalized hyperbolic, NIG, Meixner) share one
contract: parameter validation, characteristic exponent, risk-neutral mean
correction, Levy triplet, density where tractable, and an increment sampler.
"""

from . import errors, rng, specfun
from .models import DEFAULT_PARAMS, MODELS, make_model
from .pathsim import PathGrid, asset_path, simulate_batch, simulate_path
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PARAMS", "MODELS", "PathGrid", "RngStream", "asset_path", "errors", "make_model",
    "rng", "simulate_batch", "simulate_path", "specfun",
]
