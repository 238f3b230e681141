import math
import warnings

import numpy as np
import pytest
from conftest import dumbbell_torus_points
from hypothesis import given, settings
from hypothesis import strategies as st

from spherelab.immersions import (
    GridSurface,
    area,
    clifford_torus,
    curvature_field,
    fourier_torus,
    geodesic_sphere,
    rotation_torus,
)
from spherelab.sphere import QuadratureGrid, ball_volume, geodesic_distance
from spherelab.tubes import (
    BeyondFocalRadiusWarning,
    FocalReport,
    TubeSpec,
    curvature_focal_radius,
    focal_radius,
    reach_details,
    reach_estimate,
    tube_volume_closed,
    tube_volume_numeric,
    verify_inequality_chain,
)

TWO_PI_SQ = 2 * math.pi**2
HALF_PI = math.pi / 2
G128 = QuadratureGrid(128, 128)


def test_tube_spec_range():
    with pytest.raises(ValueError):
        TubeSpec(clifford_torus(), 0.0)
    with pytest.raises(ValueError):
        TubeSpec(clifford_torus(), math.pi / 2)


@pytest.mark.parametrize(
    "S, expected",
    [(clifford_torus(), math.pi / 4), (rotation_torus(math.pi / 6), math.pi / 6),
     (rotation_torus(1.2), math.pi / 2 - 1.2), (geodesic_sphere(math.pi / 3), math.pi / 3)],
)
def test_curvature_focal_radius(S, expected):
    assert curvature_focal_radius(S, G128) == pytest.approx(expected, abs=1e-12)


def test_reach_clifford_and_equator():
    assert reach_estimate(clifford_torus()) >= math.pi / 4 - 5e-3
    assert reach_estimate(geodesic_sphere(math.pi / 2)) == pytest.approx(math.pi / 2, abs=5e-3)


def test_reach_too_coarse():
    with pytest.raises(ValueError, match="too coarse"):
        reach_details(clifford_torus(), resolution=8, tolerance=1e-4)


def test_focal_report_examples():
    fr = focal_radius(clifford_torus())
    assert isinstance(fr, FocalReport)
    assert fr.focal_radius == pytest.approx(math.pi / 4, abs=5e-3)
    assert focal_radius(rotation_torus(0.5)).focal_radius == pytest.approx(0.5, abs=5e-3)
    assert focal_radius(geodesic_sphere(math.pi / 3)).focal_radius == pytest.approx(math.pi / 3, abs=5e-3)


@given(st.integers(0, 2**31 - 1), st.floats(0.0, 0.099))
@settings(max_examples=5, deadline=None)
def test_focal_radius_theorem_random_tori(seed, amp):
    fr = focal_radius(fourier_torus(seed, amp))
    assert fr.focal_radius <= math.pi / 4 + 5e-3
    assert fr.focal_radius <= fr.curvature_focal + 1e-12


# pinched neck -------------------------------------------------------------------


def _profile_normal_scan(n_base=256, n_cloud=4096, t_max=0.3, dt=2.5e-4, slack=2e-3):
    """Brute-force local feature size of the dumbbell torus.

    The surface is invariant under rotation in the (x0, x1) plane, so the
    meridian slice at angle 0 carries all the geometry: for a query point
    in that half-space the closest point of every orbit lies on the slice.
    Walk along each normal segment and stop at the first t whose endpoint
    is closer than t to some sample of the surface.
    """
    cloud = dumbbell_torus_points(1, n_cloud)[0]
    base = dumbbell_torus_points(1, n_base)[0]
    step = n_cloud // n_base
    tangent = np.roll(cloud, -1, 0) - np.roll(cloud, 1, 0)
    # normal to the meridian inside the 3-sphere spanned by x0, x2, x3
    prof = cloud[:, [0, 2, 3]]
    nrm3 = np.cross(prof, tangent[:, [0, 2, 3]])
    nrm3 /= np.linalg.norm(nrm3, axis=1, keepdims=True)
    nrm = np.zeros_like(cloud)
    nrm[:, [0, 2, 3]] = nrm3
    nrm = nrm[::step]
    ts = np.arange(dt, t_max, dt)
    best = t_max
    for sign in (1, -1):
        for k in range(0, len(ts), 16):
            t = ts[k:k + 16]
            Q = np.cos(t)[:, None, None] * base + sign * np.sin(t)[:, None, None] * nrm
            d = np.arccos(np.clip(np.max(Q.reshape(-1, 4) @ cloud.T, axis=1), -1, 1)).reshape(len(t), n_base)
            hit = d < t[:, None] - slack
            if hit.any():
                best = min(best, float(t[np.argmax(hit.any(1))]))
                break
    return best


def test_pinched_neck_reach_below_curvature_focal():
    pts = dumbbell_torus_points(128, 128)
    S = GridSurface(pts, "dumbbell")
    cfocal = curvature_focal_radius(S, G128)
    rr = reach_details(S, 64)
    half_neck = geodesic_distance(pts[0, 32], pts[0, 96]) / 2
    scan = _profile_normal_scan()
    # the waist points share a normal geodesic by mirror symmetry
    assert rr.reach == pytest.approx(half_neck, abs=5e-3)
    assert rr.reach == pytest.approx(scan, abs=5e-3)
    assert rr.reach < cfocal - 0.05
    fr = focal_radius(S, G128)
    assert fr.binding == "reach"
    assert fr.focal_radius == pytest.approx(rr.reach)


# tube volumes -------------------------------------------------------------------


def test_clifford_tube_fills_sphere():
    vol = tube_volume_numeric(TubeSpec(clifford_torus(), math.pi / 4), G128)
    assert vol == pytest.approx(TWO_PI_SQ, abs=1e-6)


def test_rotation_tube_volume():
    S = rotation_torus(math.pi / 6)
    vol = tube_volume_numeric(TubeSpec(S, 0.3), G128)
    assert vol == pytest.approx(math.sin(0.6) * math.pi**2 * math.sqrt(3), abs=1e-6)
    assert vol == pytest.approx(9.652, abs=1e-3)


@pytest.mark.parametrize("rho, r", [(math.pi / 3, 0.2), (1.0, 0.5), (2.0, 0.3)])
def test_sphere_tube_matches_ball_difference(rho, r):
    S = geodesic_sphere(rho)
    oracle = ball_volume(rho + r) - ball_volume(rho - r)
    assert tube_volume_numeric(TubeSpec(S, r), G128) == pytest.approx(oracle, abs=1e-6)
    assert tube_volume_closed(TubeSpec(S, r), G128) == pytest.approx(oracle, abs=1e-9)


@pytest.mark.parametrize("seed", [0, 11])
def test_numeric_matches_closed_on_perturbed_tori(seed):
    spec = TubeSpec(fourier_torus(seed, 0.05), 0.4)
    num = tube_volume_numeric(spec, G128)
    assert num == pytest.approx(tube_volume_closed(spec, G128), abs=1e-6 * (1 + num))


def test_thin_shell_limit():
    S = rotation_torus(0.9)
    A = area(S, G128)
    for r in (1e-3, 1e-4):
        assert tube_volume_numeric(TubeSpec(S, r), G128) / r == pytest.approx(2 * A, rel=1e-5)


def test_beyond_focal_radius_warns():
    with pytest.warns(BeyondFocalRadiusWarning):
        tube_volume_numeric(TubeSpec(rotation_torus(0.3), 0.5), G128)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tube_volume_numeric(TubeSpec(rotation_torus(0.3), 0.29), G128)


def test_tube_volume_needs_quadrature_nodes():
    with pytest.raises(ValueError):
        tube_volume_numeric(TubeSpec(clifford_torus(), 0.3), G128, n_t=2)


# inequality chain ----------------------------------------------------------------


def test_chain_clifford_equalities():
    chain = verify_inequality_chain(clifford_torus(), math.pi / 4, QuadratureGrid(256, 256))
    assert not chain.vacuous and chain.passed
    for e in chain.entries:
        assert e.applicable
        assert abs(e.lhs - e.rhs) < 1e-6, e.name


def test_chain_rotation_sixth():
    chain = verify_inequality_chain(rotation_torus(math.pi / 6), math.pi / 6, G128)
    assert chain.passed
    for name in ("(1)", "(4)", "(5)", "(6)"):
        e = chain.entry(name)
        assert e.applicable and e.holds and e.slack > 1e-3
    # sin(2r) < cot(r) below pi/4, so the tube-volume comparison is not available
    for name in ("(2)", "(3)"):
        assert not chain.entry(name).applicable
    assert not chain.entry("(3)").holds


def test_chain_perturbed_torus_at_focal_radius():
    S = fourier_torus(7, 0.03)
    fr = focal_radius(S, G128)
    chain = verify_inequality_chain(S, fr.focal_radius, G128, focal=fr)
    assert chain.passed
    assert all(e.slack >= -1e-6 for e in chain.entries if e.applicable)


def test_chain_vacuous_beyond_focal():
    chain = verify_inequality_chain(clifford_torus(), 1.0, G128)
    assert chain.vacuous and chain.passed
    assert not any(e.applicable for e in chain.entries)
    assert "vacuous" in str(chain).lower() or chain.vacuous


def test_chain_rejects_spheres():
    with pytest.raises(ValueError):
        verify_inequality_chain(geodesic_sphere(1.0), 0.5)


@pytest.mark.parametrize("S", [clifford_torus(), rotation_torus(0.4), fourier_torus(8, 0.04)])
def test_focal_report_properties(S):
    fr = focal_radius(S, G128)
    assert fr.focal_radius <= HALF_PI + 1e-9
    cf = curvature_field(S, G128)
    kmax = np.max(np.maximum(np.abs(cf.k1), np.abs(cf.k2)))
    assert kmax <= 1 / math.tan(fr.focal_radius) + 1e-6


def test_tube_volume_monotone_and_bounded():
    S = fourier_torus(8, 0.04)
    fr = focal_radius(S, G128)
    radii = np.linspace(0.05, fr.focal_radius, 8)
    vols = [tube_volume_numeric(TubeSpec(S, r), G128, focal=fr) for r in radii]
    assert all(b >= a for a, b in zip(vols, vols[1:]))
    assert max(vols) <= ball_volume(math.pi) + 1e-6

