import csv
import math

import numpy as np
import pytest
from scipy.optimize import minimize

from spherelab.acceptance import small_circle
from spherelab.immersions import great_circle, hopf_pair, torus_knot_curve
from spherelab.links import (
    CurvePair,
    FourierLoopFamily,
    LinkingError,
    SearchConfig,
    choose_pole,
    complement_convexity_check,
    design_points,
    extremal_search,
    gehring_check,
    linking_integral,
    linking_number,
    set_distance,
    softmin_surrogate,
    write_trajectory_csv,
)
from spherelab.sphere import geodesic_distance

HALF_PI = math.pi / 2
AXIS = ((0, 0, 1, 0), (0, 0, 0, 1))


def unlinked_circles():
    return CurvePair(small_circle(np.array([1.0, 0, 0, 0]), 0.3), small_circle(np.array([-1.0, 0, 0, 0]), 0.3))


def test_hopf_distance():
    a, b = hopf_pair()
    assert set_distance(a, b, refine=True) == pytest.approx(HALF_PI, abs=1e-10)
    assert set_distance(a, b) == pytest.approx(HALF_PI, abs=1e-10)


def test_singleton_distance():
    p, q = np.array([[1.0, 0, 0, 0]]), np.array([[0.6, 0.8, 0, 0]])
    assert set_distance(p, q) == pytest.approx(geodesic_distance(p[0], q[0]))


def test_random_pair_distance_against_brute_force():
    fam = FourierLoopFamily.perturbed_hopf(0.3, 2, seed=5)
    A, B = fam.curves()
    fine = 2048
    u = 2 * np.pi * np.arange(fine) / fine
    PA, PB = A(u), B(u)
    best, ij = -2.0, None
    for s in range(0, fine, 256):
        G = PA[s:s + 256] @ PB.T
        k = int(np.argmax(G))
        if G.flat[k] > best:
            best, ij = G.flat[k], (s + k // fine, k % fine)

    def dist(x):
        return float(np.arccos(np.clip(A(np.array([x[0]]))[0] @ B(np.array([x[1]]))[0], -1, 1)))

    polished = minimize(dist, [u[ij[0]], u[ij[1]]], method="Nelder-Mead",
                        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000}).fun
    assert polished <= np.arccos(best) + 1e-12
    assert set_distance(A, B, refine=True) == pytest.approx(polished, abs=1e-6)


def test_curve_pair_requires_disjoint():
    a = great_circle()
    with pytest.raises(ValueError):
        CurvePair(a, a)


def test_design_points():
    P = design_points()
    assert P.shape == (600, 4)
    assert np.allclose(np.linalg.norm(P, axis=1), 1)
    G = P @ P.T - 2 * np.eye(600)
    assert np.max(G) < 1 - 1e-6


def test_linking_hopf():
    lk = linking_number(CurvePair.hopf())
    assert abs(lk) == 1
    assert abs(linking_integral(CurvePair.hopf()) - lk) < 0.01


def test_linking_unlinked_circles():
    assert linking_number(unlinked_circles()) == 0


def test_torus_knot_against_axis():
    pair = CurvePair(torus_knot_curve(2, 3, math.pi / 4), great_circle(AXIS))
    assert linking_number(pair) == 2
    pair = CurvePair(torus_knot_curve(3, 2, math.pi / 4), great_circle(AXIS))
    assert linking_number(pair) == 3


def test_linking_independent_of_pole():
    pair = FourierLoopFamily.perturbed_hopf(0.1, 3, seed=9).pair()
    base = linking_number(pair)
    rng = np.random.default_rng(2)
    poles = design_points()[rng.choice(600, 10, replace=False)]
    for pole in poles:
        if min(np.min(geodesic_distance(pair.A.samples(), pole)), np.min(geodesic_distance(pair.B.samples(), pole))) > 0.2:
            assert linking_number(pair, pole) == base
    assert linking_number(pair.refined(2)) == base


def test_pole_choice_clearance():
    pair = CurvePair.hopf()
    pole = choose_pole(pair.A.samples(), pair.B.samples())
    assert min(np.min(geodesic_distance(pair.A.samples(), pole)),
               np.min(geodesic_distance(pair.B.samples(), pole))) > 0.2


def test_linking_rejects_pole_on_curve():
    pair = CurvePair.hopf()
    with pytest.raises((LinkingError, ValueError)):
        linking_number(pair, pair.A.samples()[0])


def test_gehring_reports():
    g = gehring_check(CurvePair.hopf())
    assert g.linked and g.bound_satisfied and g.saturated
    g = gehring_check(FourierLoopFamily.perturbed_hopf(0.05, 3, seed=42).pair())
    assert g.linked and g.bound_satisfied and g.distance < HALF_PI
    g = gehring_check(unlinked_circles())
    assert not g.linked and g.linking == 0


# convexity probes ------------------------------------------------------------------


def test_convexity_point():
    rep = complement_convexity_check([[1.0, 0, 0, 0]], 3 * math.pi / 5, 1000)
    assert not rep.empty and rep.n_pairs == 1000 and rep.violations == 0


def test_convexity_small_circle():
    A = small_circle(np.array([0, 0, 1.0, 0]), 0.3).samples(100)
    rep = complement_convexity_check(A, 0.52 * math.pi, 1000)
    assert not rep.empty and rep.violations == 0


def test_convexity_hopf_circle_empty():
    a, _ = hopf_pair()
    rep = complement_convexity_check(a.samples(256), 0.55 * math.pi, 100)
    assert rep.empty and rep.n_pairs == 0


def test_convexity_requires_large_radius():
    with pytest.raises(ValueError):
        complement_convexity_check([[1.0, 0, 0, 0]], 0.3, 300, seed=1)


def test_convexity_is_seeded():
    A = [[1.0, 0, 0, 0]]
    r1 = complement_convexity_check(A, 3 * math.pi / 5, 200, seed=3)
    r2 = complement_convexity_check(A, 3 * math.pi / 5, 200, seed=3)
    assert r1 == r2


# extremal search ---------------------------------------------------------------------


@pytest.mark.parametrize("beta", [20.0, 500.0])
def test_softmin_brackets_sampled_minimum(beta):
    fam = FourierLoopFamily.perturbed_hopf(0.1, 2, seed=1)
    val, grad = softmin_surrogate(fam.coef, fam.K, beta, 64)
    assert grad.shape == fam.coef.shape
    A, B = fam.curves()
    dmin = set_distance(A.samples(64), B.samples(64))
    assert dmin - 1e-12 <= val <= dmin + math.log(64 * 64) / beta


def test_softmin_gradient_matches_finite_differences():
    fam = FourierLoopFamily.perturbed_hopf(0.1, 2, seed=4)
    beta, m = 30.0, 48
    _, grad = softmin_surrogate(fam.coef, fam.K, beta, m)
    rng = np.random.default_rng(0)
    d = rng.standard_normal(fam.coef.shape)
    h = 1e-6
    fp, _ = softmin_surrogate(fam.coef + h * d, fam.K, beta, m)
    fm, _ = softmin_surrogate(fam.coef - h * d, fam.K, beta, m)
    assert (fp - fm) / (2 * h) == pytest.approx(np.sum(grad * d), rel=1e-5)


def test_extremal_search_from_perturbed_hopf(tmp_path):
    res = extremal_search(FourierLoopFamily.perturbed_hopf(0.05, 3, seed=42), SearchConfig())
    assert HALF_PI - 0.05 <= res.best_distance <= HALF_PI + 1e-6
    dist = [r.distance for r in res.trajectory]
    assert all(b >= a for a, b in zip(dist, dist[1:]))
    assert len({r.linking for r in res.trajectory}) == 1
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, res.trajectory)
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == len(res.trajectory)
    assert float(rows[-1]["distance"]) == pytest.approx(dist[-1])


def test_extremal_search_from_torus_knot_stays_below_bound():
    A, B = torus_knot_curve(2, 3, math.pi / 4), great_circle(AXIS)
    fam = FourierLoopFamily.from_curves(A, B, 3)
    res = extremal_search(fam, SearchConfig(betas=(20.0, 100.0), max_iter=40))
    assert all(r.distance <= HALF_PI + 1e-6 for r in res.trajectory)
    assert all(r.linking == 2 for r in res.trajectory)


def test_extremal_search_at_hopf_converges_immediately():
    a, b = hopf_pair()
    res = extremal_search(FourierLoopFamily.from_curves(a, b, 1), SearchConfig(K=1, max_iter=20))
    assert res.best_distance == pytest.approx(HALF_PI, abs=1e-9)


def test_extremal_search_is_deterministic():
    cfg = SearchConfig(betas=(20.0,), max_iter=15)
    fam = FourierLoopFamily.perturbed_hopf(0.1, 2, seed=3)
    r1, r2 = extremal_search(fam, cfg), extremal_search(fam, cfg)
    assert r1.trajectory == r2.trajectory


def test_family_shape_checked():
    with pytest.raises(ValueError):
        FourierLoopFamily(np.zeros((2, 3, 4)), 2)


def test_set_distance_symmetric_and_subset_monotone():
    fam = FourierLoopFamily.perturbed_hopf(0.2, 2, seed=12)
    A, B = (c.samples(200) for c in fam.curves())
    assert set_distance(A, B) == set_distance(B, A)
    assert set_distance(A[::3], B) >= set_distance(A, B)
