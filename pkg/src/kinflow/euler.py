"""Velocity moments of the density and the mass budget over the domain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kinflow.grid import SpaceGrid, VelocityGrid
from kinflow.scheme import BoundaryData

EPS_DIV = 1e-12


def _check(u: np.ndarray, w: np.ndarray) -> None:
    if u.shape[-2:] != w.shape:
        raise ValueError(f"density velocity shape {u.shape[-2:]} != weights {w.shape}")


def euler_density(u: np.ndarray, w: np.ndarray, kappa: float) -> np.ndarray:
    _check(u, w)
    return kappa * np.sum(u * w, axis=(-2, -1))


def euler_impulse(u: np.ndarray, vg: VelocityGrid, w: np.ndarray, kappa: float) -> np.ndarray:
    """Impulse density with components stacked on the last axis."""
    _check(u, w)
    a1, a2 = vg.alpha_mesh()
    p1 = kappa * np.sum(u * (w * a1), axis=(-2, -1))
    p2 = kappa * np.sum(u * (w * a2), axis=(-2, -1))
    return np.stack([p1, p2], axis=-1)


def euler_velocity(
    p: np.ndarray, rho: np.ndarray, eps_div: float = EPS_DIV
) -> tuple[np.ndarray, np.ndarray]:
    """``v = p / rho`` where ``rho > eps_div``.

    Returns ``(v, defined)``; undefined entries of ``v`` are NaN.
    """
    if p.shape[:-1] != rho.shape:
        raise ValueError(f"impulse shape {p.shape} does not match density {rho.shape}")
    defined = rho > eps_div
    safe = np.where(defined, rho, 1.0)
    v = np.where(defined[..., None], p / safe[..., None], np.nan)
    return v, defined


def unit_velocity_field(
    v: np.ndarray, defined: np.ndarray, eps_div: float = EPS_DIV
) -> tuple[np.ndarray, np.ndarray]:
    speed = np.hypot(v[..., 0], v[..., 1])
    ok = defined & (np.nan_to_num(speed) > eps_div)
    safe = np.where(ok, speed, 1.0)
    unit = np.where(ok[..., None], v / safe[..., None], np.nan)
    return unit, ok


def vorticity(v: np.ndarray, defined: np.ndarray, sg: SpaceGrid) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference curl ``dv2/dx1 - dv1/dx2`` on the interior nodes.

    A node gets a value only when its four neighbours all carry a defined
    velocity; edge rows of the grid are therefore always undefined.
    """
    omega = np.full(defined.shape, np.nan)
    ok = np.zeros(defined.shape, dtype=bool)
    if defined.shape[0] < 3 or defined.shape[1] < 3:
        return omega, ok
    ok[1:-1, 1:-1] = (
        defined[2:, 1:-1] & defined[:-2, 1:-1] & defined[1:-1, 2:] & defined[1:-1, :-2]
    )
    dv2 = (v[2:, 1:-1, 1] - v[:-2, 1:-1, 1]) / (2 * sg.h1)
    dv1 = (v[1:-1, 2:, 0] - v[1:-1, :-2, 0]) / (2 * sg.h2)
    inner = ok[1:-1, 1:-1]
    omega[1:-1, 1:-1] = np.where(inner, dv2 - dv1, np.nan)
    return omega, ok


def _trap(n: int) -> np.ndarray:
    c = np.ones(n)
    if n > 1:
        c[0] = c[-1] = 0.5
    return c


def region_impulse(
    p: np.ndarray, region: tuple[tuple[int, int], tuple[int, int]], sg: SpaceGrid
) -> tuple[float, float]:
    """Trapezoid integral of the impulse density over an index rectangle.

    ``region = ((k1_start, k1_stop), (k2_start, k2_stop))`` with half-open
    ranges into the interior node array.
    """
    (i0, i1), (j0, j1) = region
    if not (0 <= i0 < i1 <= p.shape[0] and 0 <= j0 < j1 <= p.shape[1]):
        raise ValueError(f"region {region} is empty or outside grid {p.shape[:2]}")
    wt = np.outer(_trap(i1 - i0), _trap(j1 - j0)) * sg.h1 * sg.h2
    sub = p[i0:i1, j0:j1]
    return (float(np.sum(wt * sub[..., 0])), float(np.sum(wt * sub[..., 1])))


def extend_with_boundary(
    interior: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    bottom: np.ndarray,
    top: np.ndarray,
) -> np.ndarray:
    """Pad an interior field with boundary values to ``(M1+2, M2+2, ...)``.

    Side arrays include their corner endpoints; each corner takes the mean
    of the two sides meeting there.
    """
    M1, M2 = interior.shape[:2]
    out = np.zeros((M1 + 2, M2 + 2) + interior.shape[2:])
    out[1:-1, 1:-1] = interior
    out[0, 1:-1] = left[1:-1]
    out[-1, 1:-1] = right[1:-1]
    out[1:-1, 0] = bottom[1:-1]
    out[1:-1, -1] = top[1:-1]
    out[0, 0] = 0.5 * (left[0] + bottom[0])
    out[0, -1] = 0.5 * (left[-1] + top[0])
    out[-1, 0] = 0.5 * (right[0] + bottom[-1])
    out[-1, -1] = 0.5 * (right[-1] + top[-1])
    return out


def extended_moments(
    u: np.ndarray,
    bd: BoundaryData,
    n: int,
    vg: VelocityGrid,
    w: np.ndarray,
    kappa: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Density and impulse on the full grid, boundary nodes from Dirichlet data."""
    ext = extend_with_boundary(
        u, bd.side("left", n), bd.side("right", n), bd.side("bottom", n), bd.side("top", n)
    )
    return euler_density(ext, w, kappa), euler_impulse(ext, vg, w, kappa)


@dataclass(frozen=True)
class MassBudget:
    """Terms of ``dm/dt + (impulse flux) + (diffusive flux) = 0`` over the domain.

    ``diffusive_flux`` is the outward diffusive mass flux
    ``-nu * boundary_integral(n . grad rho)``.
    """

    mass: float
    dm_dt: float
    impulse_flux: float
    diffusive_flux: float

    @property
    def residual(self) -> float:
        return self.dm_dt + self.impulse_flux + self.diffusive_flux


def domain_mass(rho_ext: np.ndarray, sg: SpaceGrid) -> float:
    wt = np.outer(_trap(rho_ext.shape[0]), _trap(rho_ext.shape[1]))
    return float(np.sum(wt * rho_ext) * sg.h1 * sg.h2)


def _side_integral(values: np.ndarray, step: float) -> float:
    return float(np.sum(_trap(values.shape[0]) * values) * step)


def outward_impulse_flux(p_ext: np.ndarray, sg: SpaceGrid) -> float:
    return (
        -_side_integral(p_ext[0, :, 0], sg.h2)
        + _side_integral(p_ext[-1, :, 0], sg.h2)
        - _side_integral(p_ext[:, 0, 1], sg.h1)
        + _side_integral(p_ext[:, -1, 1], sg.h1)
    )


def outward_normal_gradient_integral(rho_ext: np.ndarray, sg: SpaceGrid) -> float:
    """Boundary integral of ``n . grad rho`` with one-sided 2nd-order differences."""
    h1, h2 = sg.h1, sg.h2
    R = rho_ext
    left = (3 * R[0] - 4 * R[1] + R[2]) / (2 * h1)
    right = (3 * R[-1] - 4 * R[-2] + R[-3]) / (2 * h1)
    bottom = (3 * R[:, 0] - 4 * R[:, 1] + R[:, 2]) / (2 * h2)
    top = (3 * R[:, -1] - 4 * R[:, -2] + R[:, -3]) / (2 * h2)
    return (
        _side_integral(left, h2)
        + _side_integral(right, h2)
        + _side_integral(bottom, h1)
        + _side_integral(top, h1)
    )


def mass_budget(
    rho_n: np.ndarray,
    rho_np1: np.ndarray,
    p_mid: np.ndarray,
    sg: SpaceGrid,
    nu: float,
    tau: float,
) -> MassBudget:
    """Mass balance over one step from boundary-extended fields.

    All inputs live on the ``(M1+2, M2+2)`` grid including boundary nodes
    (see :func:`extended_moments`). ``p_mid`` is the mean impulse of levels
    ``n`` and ``n+1``; the diffusive flux uses the mean density likewise.
    """
    shape = (sg.M1 + 2, sg.M2 + 2)
    if rho_n.shape != shape or rho_np1.shape != shape or p_mid.shape != shape + (2,):
        raise ValueError(
            f"budget fields must be boundary-extended {shape}; got "
            f"{rho_n.shape}, {rho_np1.shape}, {p_mid.shape}"
        )
    m_n = domain_mass(rho_n, sg)
    m_np1 = domain_mass(rho_np1, sg)
    rho_mid = 0.5 * (rho_n + rho_np1)
    return MassBudget(
        mass=m_np1,
        dm_dt=(m_np1 - m_n) / tau,
        impulse_flux=outward_impulse_flux(p_mid, sg),
        diffusive_flux=-nu * outward_normal_gradient_integral(rho_mid, sg),
    )


def step_budget(
    u_n: np.ndarray,
    u_np1: np.ndarray,
    n: int,
    bd: BoundaryData,
    sg: SpaceGrid,
    vg: VelocityGrid,
    w: np.ndarray,
    kappa: float,
    nu: float,
    tau: float,
) -> MassBudget:
    """Mass budget for the step ``n -> n+1`` straight from densities."""
    rho_a, p_a = extended_moments(u_n, bd, n, vg, w, kappa)
    rho_b, p_b = extended_moments(u_np1, bd, n + 1, vg, w, kappa)
    return mass_budget(rho_a, rho_b, 0.5 * (p_a + p_b), sg, nu, tau)
