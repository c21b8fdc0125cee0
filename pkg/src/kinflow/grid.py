"""Space, velocity and time grids.

Space: ``Mi`` interior unknowns per dimension at ``x = h*(k+1)``,
``k = 0..Mi-1``, with ``h = Li/(Mi+1)``; the physical boundary
``x in {0, Li}`` carries Dirichlet data and is not an unknown.

Velocity: nodes ``l = -MR..PR`` (inclusive) per dimension at
``alpha = ah*l``, so the velocity rectangle is ``[-ah*MR, ah*PR]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kinflow.errors import ConfigurationError


@dataclass(frozen=True)
class SpaceGrid:
    L1: float
    L2: float
    M1: int
    M2: int

    @property
    def h1(self) -> float:
        return self.L1 / (self.M1 + 1)

    @property
    def h2(self) -> float:
        return self.L2 / (self.M2 + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.M1, self.M2)

    @property
    def x1(self) -> np.ndarray:
        """Interior node coordinates along dimension 1."""
        return self.h1 * np.arange(1, self.M1 + 1)

    @property
    def x2(self) -> np.ndarray:
        return self.h2 * np.arange(1, self.M2 + 1)

    @property
    def x1_full(self) -> np.ndarray:
        """Coordinates including both boundary nodes (length ``M1+2``)."""
        return self.h1 * np.arange(self.M1 + 2)

    @property
    def x2_full(self) -> np.ndarray:
        return self.h2 * np.arange(self.M2 + 2)

    def coordinate(self, k1: int, k2: int) -> tuple[float, float]:
        if not (0 <= k1 < self.M1 and 0 <= k2 < self.M2):
            raise IndexError(f"space index ({k1}, {k2}) outside {self.shape}")
        return (self.h1 * (k1 + 1), self.h2 * (k2 + 1))

    def nearest_index(self, x1: float, x2: float) -> tuple[int, int]:
        k1 = int(np.clip(round(x1 / self.h1) - 1, 0, self.M1 - 1))
        k2 = int(np.clip(round(x2 / self.h2) - 1, 0, self.M2 - 1))
        return (k1, k2)


@dataclass(frozen=True)
class VelocityGrid:
    ah1: float
    ah2: float
    MR1: int
    PR1: int
    MR2: int
    PR2: int

    @property
    def n1(self) -> int:
        return self.MR1 + self.PR1 + 1

    @property
    def n2(self) -> int:
        return self.MR2 + self.PR2 + 1

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def q(self) -> int:
        """Index of the last velocity block; there are ``q+1`` nodes."""
        return self.n1 * self.n2 - 1

    @property
    def l1(self) -> np.ndarray:
        return np.arange(-self.MR1, self.PR1 + 1)

    @property
    def l2(self) -> np.ndarray:
        return np.arange(-self.MR2, self.PR2 + 1)

    @property
    def alpha1(self) -> np.ndarray:
        return self.ah1 * self.l1

    @property
    def alpha2(self) -> np.ndarray:
        return self.ah2 * self.l2

    @property
    def D1(self) -> float:
        return -self.ah1 * self.MR1

    @property
    def G1(self) -> float:
        return self.ah1 * self.PR1

    @property
    def D2(self) -> float:
        return -self.ah2 * self.MR2

    @property
    def G2(self) -> float:
        return self.ah2 * self.PR2

    @property
    def area(self) -> float:
        return (self.G1 - self.D1) * (self.G2 - self.D2)

    def alpha_mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Velocity components on the ``(n1, n2)`` node array."""
        return np.meshgrid(self.alpha1, self.alpha2, indexing="ij")

    def norms(self) -> np.ndarray:
        a1, a2 = self.alpha_mesh()
        return np.hypot(a1, a2)

    def position(self, l1: int, l2: int) -> tuple[int, int]:
        """Array position of velocity index pair ``(l1, l2)``."""
        if not (-self.MR1 <= l1 <= self.PR1 and -self.MR2 <= l2 <= self.PR2):
            raise IndexError(f"velocity index ({l1}, {l2}) outside grid")
        return (l1 + self.MR1, l2 + self.MR2)

    def index(self, i1: int, i2: int) -> tuple[int, int]:
        """Inverse of :meth:`position`."""
        return (i1 - self.MR1, i2 - self.MR2)

    def nearest_index(self, a1: float, a2: float) -> tuple[int, int]:
        l1 = int(np.clip(round(a1 / self.ah1), -self.MR1, self.PR1))
        l2 = int(np.clip(round(a2 / self.ah2), -self.MR2, self.PR2))
        return (l1, l2)


@dataclass(frozen=True)
class TimeGrid:
    T: float
    N: int

    @property
    def tau(self) -> float:
        return self.T / self.N

    def t(self, n: int) -> float:
        return n * self.tau


def build_space_grid(L1: float, L2: float, M1: int, M2: int) -> SpaceGrid:
    for name, value in (("L1", L1), ("L2", L2)):
        if not (np.isfinite(value) and value > 0):
            raise ConfigurationError(f"{name}: must be > 0, got {value}")
    for name, value in (("M1", M1), ("M2", M2)):
        if int(value) != value or value < 1:
            raise ConfigurationError(f"{name}: must be an integer >= 1, got {value}")
    return SpaceGrid(float(L1), float(L2), int(M1), int(M2))


def build_velocity_grid(
    ah1: float, ah2: float, MR1: int, PR1: int, MR2: int, PR2: int
) -> VelocityGrid:
    for name, value in (("ah1", ah1), ("ah2", ah2)):
        if not (np.isfinite(value) and value > 0):
            raise ConfigurationError(f"{name}: must be > 0, got {value}")
    for name, value in (("MR1", MR1), ("PR1", PR1), ("MR2", MR2), ("PR2", PR2)):
        if int(value) != value or value < 0:
            raise ConfigurationError(f"{name}: must be an integer >= 0, got {value}")
    return VelocityGrid(float(ah1), float(ah2), int(MR1), int(PR1), int(MR2), int(PR2))


def build_time_grid(T: float, N: int) -> TimeGrid:
    if not (np.isfinite(T) and T > 0):
        raise ConfigurationError(f"T: must be > 0, got {T}")
    if int(N) != N or N < 1:
        raise ConfigurationError(f"N: must be an integer >= 1, got {N}")
    return TimeGrid(float(T), int(N))


def _trapezoid_1d(n: int, step: float) -> np.ndarray:
    c = np.ones(n)
    if n > 1:
        c[0] = c[-1] = 0.5
    return step * c


def trapezoid_weights(vg: VelocityGrid) -> np.ndarray:
    """Tensor trapezoid weights on the ``(n1, n2)`` velocity nodes.

    A dimension with a single node gets the full step as its weight, so a
    degenerate grid still integrates to something nonzero.
    """
    return np.outer(_trapezoid_1d(vg.n1, vg.ah1), _trapezoid_1d(vg.n2, vg.ah2))
