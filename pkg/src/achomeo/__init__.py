"""Exact computations with absolutely continuous interval homeomorphisms.

Piecewise-linear maps with rational breakpoints carry everything; the ρ
metric, fixed-point dynamics, conjugators and the two-generator
construction are built on top of :mod:`achomeo.plcore`.
"""

from .acmetric import Partition, rho_exact, rho_sampled_lower, rho_upper_bound, uniform_dist
from .plcore import Interval, PLFunction, PLHomeo, compose, from_points, identity, inverse, power

__all__ = [
    "Interval",
    "PLFunction",
    "PLHomeo",
    "Partition",
    "compose",
    "from_points",
    "identity",
    "inverse",
    "power",
    "rho_exact",
    "rho_sampled_lower",
    "rho_upper_bound",
    "uniform_dist",
]
