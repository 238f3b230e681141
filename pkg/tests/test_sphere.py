import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from spherelab.sphere import (
    QuadratureGrid,
    SpherePoint,
    TangentVector,
    ball_volume,
    exp_map,
    geodesic_distance,
    integrate_periodic,
    log_map,
    pole_frame,
    random_points,
    slerp,
    stereographic_inverse,
    stereographic_project,
)

E = np.eye(4)


def test_sphere_point_normalizes_and_rejects():
    p = SpherePoint([1 + 1e-10, 0, 0, 0])
    assert abs(np.linalg.norm(p.coords) - 1) < 1e-12
    assert p.dim == 3
    with pytest.raises(ValueError):
        SpherePoint([2, 0, 0, 0])
    assert SpherePoint.normalized([3, 4, 0, 0]).coords[1] == pytest.approx(0.8)


def test_tangent_vector_orthogonality():
    base = SpherePoint(E[0])
    TangentVector(base, E[1])
    with pytest.raises(ValueError):
        TangentVector(base, [0.5, 1, 0, 0])


@pytest.mark.parametrize(
    "p, q, d", [(E[0], E[1], math.pi / 2), (E[0], E[0], 0.0), (E[0], -E[0], math.pi)]
)
def test_geodesic_distance_cases(p, q, d):
    assert geodesic_distance(p, q) == pytest.approx(d, abs=1e-15)


def test_geodesic_distance_broadcasts_and_clamps():
    p = np.array([1.0, 1e-17, 0, 0])
    assert geodesic_distance(p * (1 + 1e-15), p) == 0.0
    d = geodesic_distance(np.tile(E[0], (5, 1)), E[1])
    assert d.shape == (5,)


def test_exp_map_examples():
    assert np.allclose(exp_map((E[0], E[1]), math.pi / 2), E[1], atol=1e-15)
    assert np.allclose(exp_map((E[0], E[1]), 0.0), E[0])
    r = math.sqrt(2) / 2
    assert np.allclose(exp_map((E[0], E[2]), math.pi / 4), [r, 0, r, 0], atol=1e-15)
    out = exp_map(TangentVector(SpherePoint(E[0]), E[1]), 1.0)
    assert isinstance(out, SpherePoint)
    with pytest.raises(ValueError):
        exp_map((E[0], 2 * E[1]), 1.0)


def test_log_map_examples():
    v = log_map(E[0], E[1])
    assert np.allclose(v.dir, E[1])
    with pytest.raises(ValueError):
        log_map(E[0], -E[0])
    with pytest.raises(ValueError):
        log_map(E[0], E[0])


def test_exp_log_roundtrip_random():
    rng = np.random.default_rng(0)
    P, Q = random_points(rng, 100), random_points(rng, 100)
    for p, q in zip(P, Q):
        v = log_map(p, q)
        assert np.allclose(exp_map(v, geodesic_distance(p, q)).coords, q, atol=1e-9)


def test_ball_volume():
    assert ball_volume(math.pi) == 2 * math.pi**2
    assert ball_volume(math.pi / 2) == pytest.approx(math.pi**2, rel=1e-15)
    oracle, _ = quad(lambda t: 4 * math.pi * math.sin(t) ** 2, 0, 0.3, epsabs=1e-14)
    assert ball_volume(0.3) == pytest.approx(oracle, abs=1e-12)
    assert ball_volume(0.3) == pytest.approx(0.111079, abs=1e-6)
    with pytest.raises(ValueError):
        ball_volume(4.0)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_pole_frame_is_positive_orthonormal(seed):
    pole = random_points(np.random.default_rng(seed), 1)[0]
    F = pole_frame(pole)
    assert np.allclose(F @ F.T, np.eye(4), atol=1e-12)
    assert np.linalg.det(F) == pytest.approx(1.0)
    assert np.allclose(F[-1], pole)


def test_stereographic_examples():
    pole = E[3]
    assert np.allclose(stereographic_project(-pole, pole), 0)
    assert np.linalg.norm(stereographic_project(E[0], pole)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        stereographic_project(pole, pole)


def test_stereographic_roundtrip_random():
    rng = np.random.default_rng(1)
    pole = random_points(rng, 1)[0]
    P = random_points(rng, 100)
    P = P[geodesic_distance(P, pole) > 1e-3]
    back = stereographic_inverse(stereographic_project(P, pole), pole)
    assert np.max(np.abs(back - P)) < 1e-10


def test_integrate_periodic():
    g = QuadratureGrid(64, 64)
    U, V = g.mesh()
    assert integrate_periodic(np.ones(g.shape), g) == pytest.approx(4 * math.pi**2, rel=1e-15)
    assert integrate_periodic(np.sin(U) ** 2, g) == pytest.approx(2 * math.pi**2, rel=1e-14)
    assert abs(integrate_periodic(np.cos(3 * U) * np.cos(5 * V), g)) < 1e-12
    with pytest.raises(ValueError):
        integrate_periodic(np.ones((3, 3)), g)


def test_quadrature_grid_minimum():
    with pytest.raises(ValueError):
        QuadratureGrid(4, 64)


def test_slerp_endpoints_and_midpoint():
    m = slerp(E[0], E[1], 0.5)
    assert np.allclose(m, [math.sqrt(0.5), math.sqrt(0.5), 0, 0])
    assert np.allclose(slerp(E[0], E[1], 0.0), E[0])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_triangle_inequality(seed):
    p, q, r = random_points(np.random.default_rng(seed), 3)
    assert geodesic_distance(p, r) <= geodesic_distance(p, q) + geodesic_distance(q, r) + 1e-12


def test_ball_volume_symmetry_exact():
    assert 2 * ball_volume(math.pi / 2) == ball_volume(math.pi)


@given(st.integers(0, 2**32 - 1), st.floats(-10, 10))
@settings(max_examples=50, deadline=None)
def test_exp_map_unit_norm(seed, t):
    rng = np.random.default_rng(seed)
    p = random_points(rng, 1)[0]
    d = rng.standard_normal(4)
    d -= (d @ p) * p
    d /= np.linalg.norm(d)
    assert abs(np.linalg.norm(exp_map((p, d), t)) - 1) < 1e-12
