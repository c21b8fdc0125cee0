import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kinflow.errors import ConfigurationError
from kinflow.euler import euler_density
from kinflow.grid import build_space_grid, build_time_grid, build_velocity_grid, trapezoid_weights
from kinflow.mixer import mixer_field
from kinflow.scenario import (
    SIDES,
    CollisionParams,
    collision_boundary,
    constant_boundary,
    default_band,
    empty_initial,
    inward_band,
    triangle,
    uniform_initial,
)
from kinflow.solver import KineticProblem, run_simulation

SG = build_space_grid(1.0, 1.0, 9, 9)
VG = build_velocity_grid(1.0, 1.0, 2, 2, 2, 2)


def test_triangle_shape():
    s = np.linspace(0, 2.0, 5)
    np.testing.assert_allclose(triangle(s, 2.0), [0, 0.5, 1, 0.5, 0])


@pytest.mark.parametrize("side", SIDES)
def test_endpoints_vanish(side):
    bd = collision_boundary(CollisionParams(ramp_rate=0.7, base_height=1.0), SG, VG)
    for n in (0, 5, 50):
        arr = bd.side(side, n)
        assert not arr[0].any() and not arr[-1].any()


@pytest.mark.parametrize("side", SIDES)
def test_midpoint_height(side):
    bd = collision_boundary(CollisionParams(ramp_rate=0.2), SG, VG)
    mid = (SG.M1 + 1) // 2
    assert not bd.side(side, 0).any()
    arr = bd.side(side, 10)
    for node in default_band(side, VG):
        assert arr[mid][VG.position(*node)] == pytest.approx(2.0)
    assert np.count_nonzero(arr[mid]) == 1


def test_default_bands():
    assert default_band("left", VG) == [(2, 0)]
    assert default_band("right", VG) == [(-2, 0)]
    assert default_band("bottom", VG) == [(0, 2)]
    assert default_band("top", VG) == [(0, -2)]


def test_outward_band_rejected():
    with pytest.raises(ConfigurationError):
        collision_boundary(CollisionParams(bands={"left": [(-1, 0)]}), SG, VG)
    with pytest.raises(ConfigurationError):
        collision_boundary(CollisionParams(bands={"top": [(0, 0)]}), SG, VG)
    with pytest.raises(ConfigurationError):
        collision_boundary(CollisionParams(ramp_rate=-1.0), SG, VG)


@pytest.mark.parametrize("mode", ["fastest", "inward"])
def test_left_side_never_feeds_outward_nodes(mode):
    bd = collision_boundary(CollisionParams(ramp_rate=1.0, band_mode=mode), SG, VG)
    left = bd.side("left", 20)
    a1, _ = VG.alpha_mesh()
    assert not left[..., a1 <= 0].any()
    if mode == "inward":
        assert len(inward_band("left", VG)) == 2 * VG.n2
        assert left[..., a1 > 0].any(axis=0).all()


def test_disabled_sides_are_zero():
    params = CollisionParams(ramp_rate=1.0, sides_enabled=(True, False, True, False))
    bd = collision_boundary(params, SG, VG)
    assert bd.side("left", 3).any() and bd.side("bottom", 3).any()
    assert not bd.side("right", 3).any() and not bd.side("top", 3).any()


@given(st.floats(0, 10), st.floats(0, 5))
def test_monotone_inflow(ramp, base):
    bd = collision_boundary(CollisionParams(ramp_rate=ramp, base_height=base), SG, VG)
    totals = [sum(bd.side(s, n).sum() for s in SIDES) for n in range(6)]
    assert all(b >= a for a, b in zip(totals, totals[1:]))


def test_empty_initial():
    u = empty_initial(SG, VG)
    assert u.shape == (9, 9, 5, 5) and not u.any()
    assert not euler_density(u, trapezoid_weights(VG), 1.0).any()


def test_uniform_initial():
    w = trapezoid_weights(VG)
    np.testing.assert_array_equal(uniform_initial(SG, VG, 0.0), empty_initial(SG, VG))
    rho = euler_density(uniform_initial(SG, VG, 1.0), w, 2.0)
    np.testing.assert_allclose(rho, 2.0 * VG.area)
    with pytest.raises(ConfigurationError):
        uniform_initial(SG, VG, float("nan"))
    # norms vary over the grid, so a constant slice is not a mixer fixed point
    assert np.abs(mixer_field(uniform_initial(SG, VG, 1.0), VG, w, 1.0)).max() > 0
    single = build_velocity_grid(1.0, 1.0, 0, 0, 0, 0)
    u = uniform_initial(SG, single, 1.0)
    assert not mixer_field(u, single, trapezoid_weights(single), 1.0).any()


def test_constant_boundary():
    bd = constant_boundary(SG, VG, 0.5)
    for side in SIDES:
        assert np.all(bd.side(side, 7) == 0.5)


def test_boundary_data_dihedral_symmetry():
    bd = collision_boundary(CollisionParams(ramp_rate=1.0), SG, VG)
    n = 4
    left, right, bottom, top = (bd.side(s, n) for s in SIDES)
    # mirror x1 -> L - x1 swaps left/right and flips alpha1
    np.testing.assert_array_equal(right, left[:, ::-1, :])
    # transpose swaps left/bottom and the two velocity axes
    np.testing.assert_array_equal(bottom, np.swapaxes(left, 1, 2))
    np.testing.assert_array_equal(top, np.swapaxes(right, 1, 2))


def test_density_dihedral_symmetry_end_to_end():
    sg = build_space_grid(1.0, 1.0, 11, 11)
    vg = build_velocity_grid(1.0, 1.0, 1, 1, 1, 1)
    problem = KineticProblem(
        sg, vg, build_time_grid(0.2, 20), 0.05, 1.0,
        collision_boundary(CollisionParams(ramp_rate=0.5), sg, vg),
    )
    res = run_simulation(problem, empty_initial(sg, vg))
    rho = euler_density(res.u, problem.weights, 1.0)
    scale = np.abs(rho).max()
    assert scale > 0
    for img in (rho[::-1], rho[:, ::-1], rho.T, rho[::-1, ::-1].T):
        assert np.abs(img - rho).max() <= 1e-6 * scale
