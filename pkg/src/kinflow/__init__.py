"""Kinetic (alpha-mass density) model of 2D turbulent flow.

The unknown is a density over space x velocity, stored as an array of
shape ``(M1, M2, n1, n2)``: interior space nodes first, velocity nodes last.
"""

from kinflow.errors import (
    ConfigurationError,
    ConvergenceError,
    KinflowError,
    StabilityError,
)
from kinflow.grid import (
    SpaceGrid,
    TimeGrid,
    VelocityGrid,
    build_space_grid,
    build_time_grid,
    build_velocity_grid,
    trapezoid_weights,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "KinflowError",
    "SpaceGrid",
    "StabilityError",
    "TimeGrid",
    "VelocityGrid",
    "build_space_grid",
    "build_time_grid",
    "build_velocity_grid",
    "trapezoid_weights",
]
