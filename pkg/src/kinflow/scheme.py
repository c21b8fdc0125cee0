"""Crank-Nicolson finite-difference operators for one time step.

Per velocity node the left-hand operator is the 5-point stencil

    d*u[k] + a1*u[k1-1] + b1*u[k1+1] + a2*u[k2-1] + b2*u[k2+1]

and the right-hand operator uses ``(d1; -a1, -b1, -a2, -b2)``. Neighbours
outside the interior contribute nothing here; their known Dirichlet values
enter through :func:`dirichlet_terms`. Velocity nodes never couple in these
operators, so the global matrices are block diagonal over velocity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from kinflow.grid import SpaceGrid, VelocityGrid

SideData = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class NodeCoefficients:
    a1: float
    b1: float
    a2: float
    b2: float
    d: float
    d1: float


@dataclass(frozen=True)
class SchemeCoefficients:
    """Stencil coefficients for every velocity node.

    ``a1, b1, a2, b2`` are ``(n1, n2)`` arrays; ``d`` and ``d1`` do not
    depend on velocity and are scalars.
    """

    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    d: float
    d1: float
    lambda1: float
    lambda2: float
    mu1: float
    mu2: float
    nu: float
    tau: float
    vg: VelocityGrid

    def at(self, l1: int, l2: int) -> NodeCoefficients:
        i1, i2 = self.vg.position(l1, l2)
        return NodeCoefficients(
            float(self.a1[i1, i2]),
            float(self.b1[i1, i2]),
            float(self.a2[i1, i2]),
            float(self.b2[i1, i2]),
            self.d,
            self.d1,
        )


def coefficients(sg: SpaceGrid, vg: VelocityGrid, tau: float, nu: float) -> SchemeCoefficients:
    if not tau > 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    if not nu >= 0:
        raise ValueError(f"nu must be >= 0, got {nu}")
    lam1 = tau / sg.h1
    lam2 = tau / sg.h2
    mu1 = lam1 / sg.h1
    mu2 = lam2 / sg.h2
    al1, al2 = vg.alpha_mesh()
    adv1 = lam1 * al1 / 4.0
    adv2 = lam2 * al2 / 4.0
    return SchemeCoefficients(
        a1=-adv1 - nu * mu1 / 2.0,
        b1=adv1 - nu * mu1 / 2.0,
        a2=-adv2 - nu * mu2 / 2.0,
        b2=adv2 - nu * mu2 / 2.0,
        d=1.0 + nu * (mu1 + mu2),
        d1=1.0 - nu * (mu1 + mu2),
        lambda1=lam1,
        lambda2=lam2,
        mu1=mu1,
        mu2=mu2,
        nu=nu,
        tau=tau,
        vg=vg,
    )


def _check_field(u: np.ndarray, coeffs: SchemeCoefficients) -> None:
    if u.ndim != 4 or u.shape[2:] != coeffs.a1.shape:
        raise ValueError(
            f"density field shape {u.shape} incompatible with velocity grid {coeffs.a1.shape}"
        )


def _stencil(u, centre, a1, b1, a2, b2):
    y = centre * u
    y[1:] += a1 * u[:-1]
    y[:-1] += b1 * u[1:]
    y[:, 1:] += a2 * u[:, :-1]
    y[:, :-1] += b2 * u[:, 1:]
    return y


def apply_A(u: np.ndarray, coeffs: SchemeCoefficients) -> np.ndarray:
    """Left-hand (implicit level) operator applied matrix-free."""
    _check_field(u, coeffs)
    return _stencil(u, coeffs.d, coeffs.a1, coeffs.b1, coeffs.a2, coeffs.b2)


def apply_B(u: np.ndarray, coeffs: SchemeCoefficients) -> np.ndarray:
    """Right-hand (explicit level) operator applied matrix-free."""
    _check_field(u, coeffs)
    return _stencil(u, coeffs.d1, -coeffs.a1, -coeffs.b1, -coeffs.a2, -coeffs.b2)


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet density on the four sides of the space rectangle.

    Each side is a callable ``n -> array`` of shape ``(Mt + 2, n1, n2)``:
    values at time level ``n`` along the side at tangential nodes
    ``j = 0..Mt+1`` (coordinate ``h_t * j``), where ``Mt`` is the interior
    count of the tangential dimension. ``j = 0`` and ``j = Mt+1`` are the
    corners; the scheme itself only reads ``j = 1..Mt``.

    left/right run along x2 (``x1 = 0`` / ``x1 = L1``); bottom/top run
    along x1 (``x2 = 0`` / ``x2 = L2``).
    """

    left: SideData
    right: SideData
    bottom: SideData
    top: SideData

    def side(self, name: str, n: int) -> np.ndarray:
        return np.asarray(getattr(self, name)(n), dtype=float)


def zero_boundary(sg: SpaceGrid, vg: VelocityGrid) -> BoundaryData:
    along2 = np.zeros((sg.M2 + 2, vg.n1, vg.n2))
    along1 = np.zeros((sg.M1 + 2, vg.n1, vg.n2))
    return BoundaryData(
        left=lambda n: along2,
        right=lambda n: along2,
        bottom=lambda n: along1,
        top=lambda n: along1,
    )


def dirichlet_terms(
    n: int,
    bd: BoundaryData,
    coeffs: SchemeCoefficients,
    sg: SpaceGrid,
    N: int | None = None,
) -> np.ndarray:
    """Boundary contributions moved to the right-hand side for step n -> n+1.

    Uses side data at levels ``n`` and ``n+1``. Contributions from two sides
    add up at corner-adjacent nodes.
    """
    if n < 0 or (N is not None and n > N - 1):
        raise ValueError(f"time level {n} outside 0..{'N-1' if N is None else N - 1}")
    vs = coeffs.a1.shape
    out = np.zeros((sg.M1, sg.M2) + vs)

    def both(name: str, count: int) -> np.ndarray:
        s = bd.side(name, n) + bd.side(name, n + 1)
        if s.shape != (count + 2,) + vs:
            raise ValueError(f"{name} boundary data has shape {s.shape}, expected {(count + 2,) + vs}")
        return s[1:-1]

    out[0, :] += -coeffs.a1 * both("left", sg.M2)
    out[-1, :] += -coeffs.b1 * both("right", sg.M2)
    out[:, 0] += -coeffs.a2 * both("bottom", sg.M1)
    out[:, -1] += -coeffs.b2 * both("top", sg.M1)
    return out


def assemble_rhs(
    u_n: np.ndarray,
    F_n: np.ndarray,
    F_p: np.ndarray,
    dir_: np.ndarray,
    coeffs: SchemeCoefficients,
    source_sum: np.ndarray | None = None,
) -> np.ndarray:
    """``B u^n + tau/2 (F(u^p) + F(u^n)) + DIR`` (+ ``tau/2 (S^n + S^{n+1})``).

    ``F_n`` and ``F_p`` already carry the mixer strength. ``source_sum`` is
    ``S^n + S^{n+1}`` for manufactured-solution runs.
    """
    if not (u_n.shape == F_n.shape == F_p.shape == dir_.shape):
        raise ValueError(
            f"shape mismatch: u {u_n.shape}, F_n {F_n.shape}, F_p {F_p.shape}, dir {dir_.shape}"
        )
    half = coeffs.tau / 2.0
    f = apply_B(u_n, coeffs) + half * (F_p + F_n) + dir_
    if source_sum is not None:
        f = f + half * source_sum
    return f
