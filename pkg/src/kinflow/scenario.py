"""Initial and boundary data generators.

The "collision" scenario starts from an empty domain and feeds four streams
through the four sides. Each stream has a triangular profile along its
side (zero at the corners, one at the midpoint) scaled by a height that
grows linearly with the time level, and it populates only inward-pointing
velocity nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from kinflow.errors import ConfigurationError
from kinflow.grid import SpaceGrid, VelocityGrid
from kinflow.scheme import BoundaryData

SIDES = ("left", "right", "bottom", "top")

# Inward normal of each side as (component index, sign).
_INWARD = {"left": (0, 1), "right": (0, -1), "bottom": (1, 1), "top": (1, -1)}


def triangle(s: np.ndarray, length: float) -> np.ndarray:
    """Unit hat on ``[0, length]``: 0 at the ends, 1 at the midpoint."""
    return np.clip(1.0 - np.abs(2.0 * np.asarray(s) / length - 1.0), 0.0, None)


def default_band(side: str, vg: VelocityGrid) -> list[tuple[int, int]]:
    """Fastest inward node with zero tangential velocity."""
    comp, sign = _INWARD[side]
    if comp == 0:
        l1 = vg.PR1 if sign > 0 else -vg.MR1
        return [(l1, 0)] if l1 != 0 else []
    l2 = vg.PR2 if sign > 0 else -vg.MR2
    return [(0, l2)] if l2 != 0 else []


def inward_band(side: str, vg: VelocityGrid) -> list[tuple[int, int]]:
    """Every node whose velocity points into the domain through ``side``."""
    comp, sign = _INWARD[side]
    band = []
    for l1 in vg.l1:
        for l2 in vg.l2:
            normal = (l1, l2)[comp]
            if sign * normal > 0:
                band.append((int(l1), int(l2)))
    return band


@dataclass(frozen=True)
class CollisionParams:
    ramp_rate: float = 0.2
    base_height: float = 0.0
    bands: dict[str, list[tuple[int, int]]] | None = None
    sides_enabled: tuple[bool, bool, bool, bool] = (True, True, True, True)
    band_mode: str = field(default="fastest")

    def height(self, n: int) -> float:
        return self.base_height + self.ramp_rate * n


def _resolve_bands(params: CollisionParams, vg: VelocityGrid) -> dict[str, list[tuple[int, int]]]:
    if params.band_mode not in ("fastest", "inward"):
        raise ConfigurationError(f"band_mode must be 'fastest' or 'inward', got {params.band_mode!r}")
    pick = default_band if params.band_mode == "fastest" else inward_band
    bands = {side: pick(side, vg) for side in SIDES}
    if params.bands:
        for side, nodes in params.bands.items():
            if side not in _INWARD:
                raise ConfigurationError(f"unknown side {side!r}")
            comp, sign = _INWARD[side]
            for node in nodes:
                vg.position(*node)
                alpha = (node[0] * vg.ah1, node[1] * vg.ah2)[comp]
                if not sign * alpha > 0:
                    raise ConfigurationError(
                        f"velocity node {node} points out of the domain on the {side} side"
                    )
            bands[side] = [tuple(n) for n in nodes]
    return bands


def collision_boundary(params: CollisionParams, sg: SpaceGrid, vg: VelocityGrid) -> BoundaryData:
    if params.ramp_rate < 0 or params.base_height < 0:
        raise ConfigurationError("collision heights must be nonnegative")
    bands = _resolve_bands(params, vg)
    along = {
        "left": triangle(sg.x2_full, sg.L2),
        "right": triangle(sg.x2_full, sg.L2),
        "bottom": triangle(sg.x1_full, sg.L1),
        "top": triangle(sg.x1_full, sg.L1),
    }
    shapes = {}
    for side, enabled in zip(SIDES, params.sides_enabled):
        mask = np.zeros(vg.shape)
        if enabled:
            for node in bands[side]:
                mask[vg.position(*node)] = 1.0
        shapes[side] = along[side][:, None, None] * mask

    def side_fn(side: str):
        base = shapes[side]
        return lambda n: params.height(n) * base

    return BoundaryData(*(side_fn(s) for s in SIDES))


def empty_initial(sg: SpaceGrid, vg: VelocityGrid) -> np.ndarray:
    return np.zeros(sg.shape + vg.shape)


def uniform_initial(sg: SpaceGrid, vg: VelocityGrid, c: float) -> np.ndarray:
    if not np.isfinite(c):
        raise ConfigurationError(f"uniform value must be finite, got {c}")
    return np.full(sg.shape + vg.shape, float(c))


def constant_boundary(sg: SpaceGrid, vg: VelocityGrid, c: float) -> BoundaryData:
    """Every side held at the constant density ``c`` on every velocity node."""
    along2 = np.full((sg.M2 + 2,) + vg.shape, float(c))
    along1 = np.full((sg.M1 + 2,) + vg.shape, float(c))
    return BoundaryData(
        left=lambda n: along2, right=lambda n: along2, bottom=lambda n: along1, top=lambda n: along1
    )
