import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinflow.euler import (
    MassBudget,
    domain_mass,
    euler_density,
    euler_impulse,
    euler_velocity,
    extend_with_boundary,
    mass_budget,
    region_impulse,
    step_budget,
    unit_velocity_field,
    vorticity,
)
from kinflow.grid import build_space_grid, build_velocity_grid, trapezoid_weights
from kinflow.mixer import mixer_field
from kinflow.scheme import zero_boundary

VG = build_velocity_grid(0.5, 0.7, 1, 1, 1, 1)
SG = build_space_grid(1.0, 2.0, 6, 5)
W = trapezoid_weights(VG)


@pytest.mark.parametrize("kappa", [0.0, 1.0, 2.5])
@pytest.mark.parametrize("c", [0.0, 1.0, 3.25])
def test_density_constant(kappa, c):
    u = np.full(SG.shape + VG.shape, c)
    expected = kappa * c * VG.area
    np.testing.assert_allclose(euler_density(u, W, kappa), expected, rtol=1e-14, atol=0)


def test_density_matches_loop_oracle():
    u = np.random.default_rng(0).normal(size=(4, 3) + VG.shape)
    rho = euler_density(u, W, 1.7)
    for k1 in range(4):
        for k2 in range(3):
            acc = 0.0
            for i in range(VG.n1):
                for j in range(VG.n2):
                    acc += W[i, j] * u[k1, k2, i, j]
            assert rho[k1, k2] == pytest.approx(1.7 * acc, rel=1e-13)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        euler_density(np.zeros((2, 2, 4, 4)), W, 1.0)
    with pytest.raises(ValueError):
        euler_impulse(np.zeros((2, 2, 4, 4)), VG, W, 1.0)
    with pytest.raises(ValueError):
        euler_velocity(np.zeros((2, 2, 2)), np.zeros((3, 2)))


def test_impulse_symmetric_is_zero():
    u = np.random.default_rng(1).uniform(size=(3, 3) + VG.shape)
    u = u + u[:, :, ::-1, ::-1]
    np.testing.assert_allclose(euler_impulse(u, VG, W, 1.0), 0.0, atol=1e-15)
    assert not euler_impulse(np.zeros_like(u), VG, W, 1.0).any()


def test_impulse_single_node():
    u = np.zeros((2, 2) + VG.shape)
    i, j = VG.position(1, 0)
    u[..., i, j] = 1.0
    p = euler_impulse(u, VG, W, 2.0)
    np.testing.assert_allclose(p[..., 0], 2.0 * W[i, j] * VG.ah1)
    np.testing.assert_allclose(p[..., 1], 0.0)


def test_linearity():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=(2, 3, 3) + VG.shape)
    for f in (lambda u: euler_density(u, W, 1.3), lambda u: euler_impulse(u, VG, W, 1.3)):
        np.testing.assert_allclose(f(2 * a - 3 * b), 2 * f(a) - 3 * f(b), atol=1e-13)


def test_velocity_examples():
    v, ok = euler_velocity(np.array([[2.0, 0.0], [1.0, 1.0]]), np.array([2.0, 0.0]))
    np.testing.assert_array_equal(v[0], [1.0, 0.0])
    assert ok.tolist() == [True, False]
    assert np.isnan(v[1]).all()


def test_velocity_mask_and_homogeneity():
    rng = np.random.default_rng(3)
    u = rng.uniform(size=(5, 5) + VG.shape)
    u[0, 0] = 0.0
    u[1, 2] = 1e-16
    rho, p = euler_density(u, W, 1.0), euler_impulse(u, VG, W, 1.0)
    v, ok = euler_velocity(p, rho, 1e-12)
    np.testing.assert_array_equal(ok, rho > 1e-12)
    v2, ok2 = euler_velocity(4 * p, 4 * rho, 1e-12)
    np.testing.assert_array_equal(ok, ok2)
    np.testing.assert_allclose(v2[ok], v[ok], rtol=1e-14)


def test_unit_velocity():
    v = np.array([[3.0, 4.0], [0.0, 0.0], [np.nan, np.nan]])
    unit, ok = unit_velocity_field(v, np.array([True, True, False]))
    np.testing.assert_allclose(unit[0], [0.6, 0.8])
    assert ok.tolist() == [True, False, False]
    unit2, _ = unit_velocity_field(7.0 * v, np.array([True, True, False]))
    np.testing.assert_allclose(unit2[0], unit[0])


def _coords(sg):
    return np.meshgrid(sg.x1, sg.x2, indexing="ij")


def test_vorticity_uniform_and_rotation():
    X1, X2 = _coords(SG)
    defined = np.ones(SG.shape, dtype=bool)
    uniform = np.stack([np.full(SG.shape, 0.3), np.full(SG.shape, -1.1)], axis=-1)
    om, ok = vorticity(uniform, defined, SG)
    assert ok[1:-1, 1:-1].all() and not ok[0].any() and not ok[:, -1].any()
    np.testing.assert_allclose(om[ok], 0.0, atol=1e-14)
    rot = np.stack([-(X2 - 0.4), X1 - 0.6], axis=-1)
    om, ok = vorticity(rot, defined, SG)
    np.testing.assert_allclose(om[ok], 2.0, rtol=1e-12)


def test_vorticity_stencil_oracle_and_mask():
    rng = np.random.default_rng(4)
    v = rng.normal(size=SG.shape + (2,))
    defined = rng.uniform(size=SG.shape) > 0.2
    om, ok = vorticity(v, defined, SG)
    for k1 in range(SG.M1):
        for k2 in range(SG.M2):
            inner = 0 < k1 < SG.M1 - 1 and 0 < k2 < SG.M2 - 1
            nb = inner and all(
                defined[k1 + a, k2 + b] for a, b in ((1, 0), (-1, 0), (0, 1), (0, -1))
            )
            assert ok[k1, k2] == nb
            if nb:
                ref = (v[k1 + 1, k2, 1] - v[k1 - 1, k2, 1]) / (2 * SG.h1) - (
                    v[k1, k2 + 1, 0] - v[k1, k2 - 1, 0]
                ) / (2 * SG.h2)
                assert om[k1, k2] == pytest.approx(ref, rel=1e-13, abs=1e-13)
            else:
                assert np.isnan(om[k1, k2])


def test_region_impulse():
    p0 = np.zeros(SG.shape + (2,))
    assert region_impulse(p0, ((0, 6), (0, 5)), SG) == (0.0, 0.0)
    p1 = np.zeros(SG.shape + (2,))
    p1[..., 0] = 1.0
    px, py = region_impulse(p1, ((0, 6), (0, 5)), SG)
    # trapezoid over the interior nodes spans (M-1) h per dimension
    assert px == pytest.approx(5 * SG.h1 * 4 * SG.h2)
    assert py == 0.0
    rng = np.random.default_rng(5)
    p = rng.normal(size=SG.shape + (2,))
    acc = [0.0, 0.0]
    for k1 in range(1, 4):
        for k2 in range(2, 5):
            wt = (0.5 if k1 in (1, 3) else 1.0) * (0.5 if k2 in (2, 4) else 1.0)
            for c in range(2):
                acc[c] += wt * p[k1, k2, c] * SG.h1 * SG.h2
    got = region_impulse(p, ((1, 4), (2, 5)), SG)
    assert got == pytest.approx(tuple(acc), rel=1e-13)
    with pytest.raises(ValueError):
        region_impulse(p, ((2, 2), (0, 3)), SG)
    with pytest.raises(ValueError):
        region_impulse(p, ((0, 7), (0, 3)), SG)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 5.0))
def test_mixer_neutral_at_euler_level(seed, kappa):
    u = np.random.default_rng(seed).uniform(0, 2, size=(3, 2) + VG.shape)
    F = mixer_field(u, VG, W, kappa)
    rho = euler_density(F, W, kappa)
    scale = kappa * np.sum(W * np.abs(F), axis=(-2, -1))
    assert np.all(np.abs(rho) <= 1e-12 * np.maximum(scale, 1e-300))


def test_budget_zero_fields():
    shape = (SG.M1 + 2, SG.M2 + 2)
    b = mass_budget(np.zeros(shape), np.zeros(shape), np.zeros(shape + (2,)), SG, 0.1, 0.01)
    assert b == MassBudget(0.0, 0.0, 0.0, 0.0)
    assert b.residual == 0.0


def test_budget_static_field():
    shape = (SG.M1 + 2, SG.M2 + 2)
    rho = np.full(shape, 1.5)
    b = mass_budget(rho, rho, np.zeros(shape + (2,)), SG, 0.3, 0.01)
    assert b.dm_dt == 0.0 and b.impulse_flux == 0.0
    assert abs(b.diffusive_flux) < 1e-13
    assert b.mass == pytest.approx(1.5 * SG.L1 * SG.L2)
    assert b.residual == b.dm_dt + b.impulse_flux + b.diffusive_flux


def test_budget_shape_check():
    with pytest.raises(ValueError):
        mass_budget(np.zeros(SG.shape), np.zeros(SG.shape), np.zeros(SG.shape + (2,)), SG, 0.1, 0.1)


def test_budget_fluxes_on_linear_fields():
    sg = build_space_grid(1.0, 1.0, 7, 7)
    xf1, xf2 = np.meshgrid(sg.x1_full, sg.x2_full, indexing="ij")
    # p = (x1, 0): outward flux = integral over the right side of 1 = 1
    p = np.stack([xf1, np.zeros_like(xf1)], axis=-1)
    rho = xf2**2  # n . grad rho integrates to 2 on the top side, 0 on the bottom
    b = mass_budget(rho, rho, p, sg, 0.5, 0.1)
    assert b.impulse_flux == pytest.approx(1.0, rel=1e-14)
    assert b.diffusive_flux == pytest.approx(-0.5 * 2.0, rel=1e-12)
    assert domain_mass(np.ones_like(rho), sg) == pytest.approx(1.0)


def test_extend_corners_are_means():
    interior = np.zeros((2, 3))
    left, right = np.array([1.0, 0, 0, 0, 3.0]), np.array([5.0, 0, 0, 0, 7.0])
    bottom, top = np.array([2.0, 0, 0, 6.0]), np.array([4.0, 0, 0, 8.0])
    ext = extend_with_boundary(interior, left, right, bottom, top)
    assert ext[0, 0] == 1.5 and ext[0, -1] == 3.5 and ext[-1, 0] == 5.5 and ext[-1, -1] == 7.5


def test_step_budget_zero_scenario():
    sg = build_space_grid(1, 1, 4, 4)
    u = np.zeros(sg.shape + VG.shape)
    b = step_budget(u, u, 0, zero_boundary(sg, VG), sg, VG, W, 1.0, 0.1, 0.01)
    assert (b.mass, b.dm_dt, b.impulse_flux, b.diffusive_flux, b.residual) == (0, 0, 0, 0, 0)
