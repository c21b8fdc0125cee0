"""Manufactured solution for convergence and mass-budget checks.

The exact density is

    rho(t, x, alpha) = A(t, x) + alpha1 * B(t, x2)

with ``A = 2 + exp(-2 nu pi^2 t) cos(pi x1 + 0.3) cos(pi x2 - 0.2)`` (a heat
equation solution) and ``B = 0.5 cos(t) sin(2 x2 + 0.5)``. On a velocity
grid symmetric in alpha1 its moments are ``rho_E ~ A`` and
``p ~ (B(x2), 0)``, which satisfy the Euler mass law exactly, so the source
term carries no net mass and the discrete budget residual must vanish
under refinement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kinflow.grid import SpaceGrid, TimeGrid, VelocityGrid, build_space_grid, build_time_grid
from kinflow.mixer import mixer_field
from kinflow.scheme import BoundaryData
from kinflow.solver import KineticProblem

PI = np.pi


@dataclass(frozen=True)
class ManufacturedSolution:
    nu: float
    kappa: float

    def _decay(self, t):
        return np.exp(-2.0 * self.nu * PI**2 * t)

    def parts(self, t: float, x1: np.ndarray, x2: np.ndarray):
        """A, B and the derivatives the source needs, on a broadcast of x1, x2."""
        e = self._decay(t)
        c1, s1 = np.cos(PI * x1 + 0.3), np.sin(PI * x1 + 0.3)
        c2, s2 = np.cos(PI * x2 - 0.2), np.sin(PI * x2 - 0.2)
        A = 2.0 + e * c1 * c2
        A_t = -2.0 * self.nu * PI**2 * e * c1 * c2
        A_x1 = -PI * e * s1 * c2
        A_x2 = -PI * e * c1 * s2
        lap_A = -2.0 * PI**2 * e * c1 * c2
        arg = 2.0 * x2 + 0.5
        B = 0.5 * np.cos(t) * np.sin(arg)
        B_t = -0.5 * np.sin(t) * np.sin(arg)
        B_x2 = np.cos(t) * np.cos(arg)
        B_x2x2 = -2.0 * np.cos(t) * np.sin(arg)
        return A, A_t, A_x1, A_x2, lap_A, B, B_t, B_x2, B_x2x2

    def exact(self, t: float, x1: np.ndarray, x2: np.ndarray, vg: VelocityGrid) -> np.ndarray:
        """Density on the tensor grid ``x1 x x2 x velocity``."""
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        A, *_ , B, _, _, _ = self.parts(t, X1, X2)
        a1, _ = vg.alpha_mesh()
        return A[..., None, None] + a1 * B[..., None, None]

    def transport(self, t: float, x1: np.ndarray, x2: np.ndarray, vg: VelocityGrid) -> np.ndarray:
        """``rho_t + alpha . grad rho - nu lap rho`` evaluated exactly."""
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        A, A_t, A_x1, A_x2, lap_A, B, B_t, B_x2, B_x2x2 = (
            v[..., None, None] for v in self.parts(t, X1, X2)
        )
        a1, a2 = vg.alpha_mesh()
        rho_t = A_t + a1 * B_t
        grad1 = A_x1
        grad2 = A_x2 + a1 * B_x2
        lap = lap_A + a1 * B_x2x2
        return rho_t + a1 * grad1 + a2 * grad2 - self.nu * lap

    def boundary(self, sg: SpaceGrid, vg: VelocityGrid, tg: TimeGrid) -> BoundaryData:
        x1f, x2f = sg.x1_full, sg.x2_full
        zero, one1, one2 = np.zeros(1), np.array([sg.L1]), np.array([sg.L2])
        return BoundaryData(
            left=lambda n: self.exact(tg.t(n), zero, x2f, vg)[0],
            right=lambda n: self.exact(tg.t(n), one1, x2f, vg)[0],
            bottom=lambda n: self.exact(tg.t(n), x1f, zero, vg)[:, 0],
            top=lambda n: self.exact(tg.t(n), x1f, one2, vg)[:, 0],
        )

    def problem(self, sg: SpaceGrid, vg: VelocityGrid, tg: TimeGrid) -> KineticProblem:
        problem = KineticProblem(sg, vg, tg, self.nu, self.kappa, self.boundary(sg, vg, tg))
        w = problem.weights
        cache: dict[int, np.ndarray] = {}

        def source(n: int) -> np.ndarray:
            if n not in cache:
                t = tg.t(n)
                exact = self.exact(t, sg.x1, sg.x2, vg)
                cache[n] = self.transport(t, sg.x1, sg.x2, vg) - mixer_field(
                    exact, vg, w, self.kappa
                )
                cache.pop(n - 2, None)
            return cache[n]

        problem.source = source
        return problem


def refinement_levels(
    levels: int = 3, M0: int = 7, N0: int = 8, T: float = 0.5, L: float = 1.0
) -> list[tuple[SpaceGrid, TimeGrid]]:
    """Joint ``(h, tau) -> (h/2, tau/2)`` sequence on the square ``[0, L]^2``."""
    out = []
    M, N = M0, N0
    for _ in range(levels):
        out.append((build_space_grid(L, L, M, M), build_time_grid(T, N)))
        M, N = 2 * M + 1, 2 * N
    return out


def observed_orders(errors: list[float]) -> list[float]:
    return [float(np.log2(a / b)) for a, b in zip(errors, errors[1:])]
