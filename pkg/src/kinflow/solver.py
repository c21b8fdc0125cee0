"""Time integration: Picard sweeps over the mixer, Richardson inner solves.

Each time step solves the nonlinear Crank-Nicolson system

    A u^{n+1} = B u^n + tau/2 (F(u^{n+1}) + F(u^n)) + DIR

by freezing ``F`` at the previous Picard iterate and solving the linear
system ``A x = f`` with Richardson iteration ``x += s (f - A x)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from kinflow.errors import ConvergenceError, StabilityError
from kinflow.grid import SpaceGrid, TimeGrid, VelocityGrid, trapezoid_weights
from kinflow.mixer import mixer_field
from kinflow.scheme import (
    BoundaryData,
    SchemeCoefficients,
    apply_A,
    assemble_rhs,
    coefficients,
    dirichlet_terms,
)

log = logging.getLogger(__name__)

Source = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class SolverSettings:
    """Iteration controls.

    ``s=None`` selects the optimal relaxation ``1/d``. ``tol_picard=None``
    selects ``1e-8 * (1 + max|u^n|)`` per step.
    """

    s: float | None = None
    tol_linear: float = 1e-10
    max_linear_iters: int = 500
    tol_picard: float | None = None
    max_picard_iters: int = 50

    def __post_init__(self):
        if self.s is not None and not self.s > 0:
            raise ValueError(f"s must be > 0 or auto, got {self.s}")
        if not self.tol_linear > 0:
            raise ValueError("tol_linear must be > 0")
        if self.tol_picard is not None and not self.tol_picard > 0:
            raise ValueError("tol_picard must be > 0")
        if self.max_linear_iters < 1 or self.max_picard_iters < 1:
            raise ValueError("iteration caps must be >= 1")

    def picard_tolerance(self, u_n: np.ndarray) -> float:
        if self.tol_picard is not None:
            return self.tol_picard
        return 1e-8 * (1.0 + float(np.max(np.abs(u_n), initial=0.0)))


@dataclass
class StepReport:
    picard_iters: int
    linear_iters_total: int
    final_picard_delta: float
    final_linear_residual: float
    nor: float


def nor_bound(coeffs: SchemeCoefficients) -> float:
    """``max_l (|a1|+|a2|+|b1|+|b2|) / d``; Richardson converges if < 1."""
    return float(np.max(_nor_per_node(coeffs)))


def _nor_per_node(coeffs: SchemeCoefficients) -> np.ndarray:
    off = np.abs(coeffs.a1) + np.abs(coeffs.a2) + np.abs(coeffs.b1) + np.abs(coeffs.b2)
    return off / coeffs.d


def worst_node(coeffs: SchemeCoefficients) -> tuple[int, int]:
    """Velocity index pair where the NOR maximum is attained."""
    per = _nor_per_node(coeffs)
    i1, i2 = np.unravel_index(int(np.argmax(per)), per.shape)
    return coeffs.vg.index(int(i1), int(i2))


def optimal_s(coeffs: SchemeCoefficients) -> float:
    return 1.0 / coeffs.d


def check_nor(coeffs: SchemeCoefficients) -> float:
    nor = nor_bound(coeffs)
    if not nor < 1.0:
        node = worst_node(coeffs)
        raise StabilityError(
            f"NOR = {nor:.6g} >= 1 (worst velocity node l = {node}); "
            "reduce tau or refine the velocity grid",
            nor=nor,
            worst_node=node,
        )
    return nor


def richardson_solve(
    f: np.ndarray,
    coeffs: SchemeCoefficients,
    settings: SolverSettings = SolverSettings(),
    x0: np.ndarray | None = None,
    callback: Callable[[np.ndarray], None] | None = None,
) -> tuple[np.ndarray, int, float]:
    """Solve ``A x = f`` by Richardson iteration started from ``x0 = f``.

    Returns ``(x, iterations, max|f - A x|)``. ``callback`` sees every
    iterate including the start.
    """
    check_nor(coeffs)
    if not np.all(np.isfinite(f)):
        raise ValueError("right-hand side is not finite")
    s = optimal_s(coeffs) if settings.s is None else settings.s
    x = np.array(f if x0 is None else x0, dtype=float)
    r = f - apply_A(x, coeffs)
    res = float(np.max(np.abs(r)))
    if callback is not None:
        callback(x)
    k = 0
    while res > settings.tol_linear:
        if k == settings.max_linear_iters:
            raise ConvergenceError(
                f"Richardson did not reach {settings.tol_linear:g} in {k} iterations "
                f"(residual {res:.3e})",
                kind="linear",
                last_value=res,
            )
        x = x + s * r
        r = f - apply_A(x, coeffs)
        res = float(np.max(np.abs(r)))
        k += 1
        if callback is not None:
            callback(x)
    return x, k, res


@dataclass
class KineticProblem:
    """Everything a time step needs besides the current density."""

    sg: SpaceGrid
    vg: VelocityGrid
    tg: TimeGrid
    nu: float
    kappa: float
    boundary: BoundaryData
    source: Source | None = None
    workers: int = 1
    weights: np.ndarray = field(init=False)
    coeffs: SchemeCoefficients = field(init=False)

    def __post_init__(self):
        self.weights = trapezoid_weights(self.vg)
        self.coeffs = coefficients(self.sg, self.vg, self.tg.tau, self.nu)

    @property
    def field_shape(self) -> tuple[int, int, int, int]:
        return self.sg.shape + self.vg.shape

    def mixer(self, u: np.ndarray) -> np.ndarray:
        return mixer_field(u, self.vg, self.weights, self.kappa, self.workers)

    def source_sum(self, n: int) -> np.ndarray | None:
        if self.source is None:
            return None
        return self.source(n) + self.source(n + 1)

    def rhs(self, u_n: np.ndarray, F_n: np.ndarray, u_p: np.ndarray, n: int) -> np.ndarray:
        """Right-hand side of the fixed-point system for iterate ``u_p``."""
        dir_ = dirichlet_terms(n, self.boundary, self.coeffs, self.sg, self.tg.N)
        return assemble_rhs(u_n, F_n, self.mixer(u_p), dir_, self.coeffs, self.source_sum(n))


def fixed_point_residual(
    problem: KineticProblem, u_n: np.ndarray, u_np1: np.ndarray, n: int
) -> float:
    """``max|A u^{n+1} - B u^n - tau/2 (F^{n+1} + F^n) - DIR|`` for an accepted step."""
    f = problem.rhs(u_n, problem.mixer(u_n), u_np1, n)
    return float(np.max(np.abs(apply_A(u_np1, problem.coeffs) - f)))


def time_step(
    problem: KineticProblem,
    u_n: np.ndarray,
    n: int,
    settings: SolverSettings = SolverSettings(),
) -> tuple[np.ndarray, StepReport]:
    """Advance ``u_n`` from level ``n`` to ``n+1``."""
    if u_n.shape != problem.field_shape:
        raise ValueError(f"density shape {u_n.shape} != {problem.field_shape}")
    if not np.all(np.isfinite(u_n)):
        raise ValueError(f"density at level {n} is not finite")
    nor = check_nor(problem.coeffs)
    tol = settings.picard_tolerance(u_n)

    coeffs = problem.coeffs
    dir_ = dirichlet_terms(n, problem.boundary, coeffs, problem.sg, problem.tg.N)
    src = problem.source_sum(n)
    F_n = problem.mixer(u_n)

    u_p = u_n
    linear_total = 0
    delta = np.inf
    for p in range(1, settings.max_picard_iters + 1):
        F_p = problem.mixer(u_p)
        f = assemble_rhs(u_n, F_n, F_p, dir_, coeffs, src)
        x, iters, res = richardson_solve(f, coeffs, settings)
        linear_total += iters
        delta = float(np.max(np.abs(x - u_p)))
        u_p = x
        if delta <= tol:
            return u_p, StepReport(p, linear_total, delta, res, nor)
    raise ConvergenceError(
        f"Picard iteration did not reach {tol:.3e} in {settings.max_picard_iters} sweeps "
        f"(last delta {delta:.3e})",
        kind="picard",
        last_value=delta,
    )


Observer = Callable[[int, np.ndarray, "StepReport | None"], None]


@dataclass
class SimulationResult:
    u: np.ndarray
    reports: list[StepReport]


def run_simulation(
    problem: KineticProblem,
    initial: np.ndarray,
    settings: SolverSettings = SolverSettings(),
    observers: Iterable[Observer] = (),
    steps: int | None = None,
) -> SimulationResult:
    """Advance ``initial`` through ``steps`` (default ``N``) time steps.

    Every observer is called as ``obs(n, u, report)`` at level 0 (report
    ``None``) and after each step. Step failures are re-raised with the
    failing level in ``err.step``.
    """
    observers = list(observers)
    check_nor(problem.coeffs)
    nsteps = problem.tg.N if steps is None else steps
    u = np.array(initial, dtype=float)
    if u.shape != problem.field_shape:
        raise ValueError(f"initial density shape {u.shape} != {problem.field_shape}")
    for obs in observers:
        obs(0, u, None)
    reports: list[StepReport] = []
    for n in range(nsteps):
        try:
            u, rep = time_step(problem, u, n, settings)
        except ConvergenceError as err:
            err.step = n
            raise
        reports.append(rep)
        log.debug("step %d: %d picard sweeps, %d linear iterations", n + 1, rep.picard_iters, rep.linear_iters_total)
        for obs in observers:
            obs(n + 1, u, rep)
    return SimulationResult(u, reports)
