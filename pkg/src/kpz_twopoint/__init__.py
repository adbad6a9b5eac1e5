"""Exact distribution theory and stochastic simulation of the stationary TASEP
two-point function, cross-validated against each other at desk scale."""

__version__ = "0.1.0"

from . import airy_limit, finite_time, fredholm, specialfn, tasep  # noqa: F401
