"""The end-to-end acceptance suite behind ``spherelab verify-all``.

Each criterion returns a :class:`Criterion` holding named checks; every
check carries the tolerance it was judged at.  All randomness is derived
from the single configured seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .bands import band_width, build_tube_band
from .immersions import (
    ClosedCurve,
    area,
    curvature_field,
    fourier_torus,
    gauss_bonnet_characteristic,
    geodesic_sphere,
    great_circle,
    hopf_pair,
    rotation_torus,
    torus_knot_curve,
    willmore_energy,
    clifford_torus,
)
from .links import (
    CurvePair,
    FourierLoopFamily,
    LinkingError,
    SearchConfig,
    complement_convexity_check,
    distance_to_set,
    extremal_search,
    linking_number,
    set_distance,
)
from .sphere import QuadratureGrid, ball_volume, pole_frame, random_points
from .tubes import TubeSpec, focal_radius, tube_volume_closed, tube_volume_numeric, verify_inequality_chain

TWO_PI_SQ = 2 * math.pi**2
HALF_PI = math.pi / 2


@dataclass
class Check:
    name: str
    value: object
    tolerance: float | None
    passed: bool | None  # None: informational

    @property
    def verdict(self) -> str:
        return "info" if self.passed is None else ("pass" if self.passed else "fail")


@dataclass
class Criterion:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)

    def check(self, name, value, tolerance, passed):
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        self.checks.append(Check(name, value, tolerance, None if passed is None else bool(passed)))

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)


@dataclass
class SuiteConfig:
    seed: int = 42
    grid: int = 256
    fast_grid: int = 128
    reach_resolution: int = 64
    n_random_tori: int = 20
    n_random_pairs: int = 50
    n_poles: int = 20
    n_probe_pairs: int = 1000


class Suite:
    def __init__(self, cfg: SuiteConfig | None = None):
        self.cfg = cfg or SuiteConfig()
        self.rng = np.random.default_rng(self.cfg.seed)
        self._tori = None
        self._focal = {}

    # shared fixtures -------------------------------------------------------

    def random_tori(self):
        if self._tori is None:
            rng = np.random.default_rng([self.cfg.seed, 1])
            seeds = rng.integers(0, 2**31, self.cfg.n_random_tori)
            amps = rng.uniform(0.01, 0.09, self.cfg.n_random_tori)
            self._tori = [fourier_torus(int(s), float(a)) for s, a in zip(seeds, amps)]
        return self._tori

    def focal(self, S):
        key = (S.name, S.params)
        if key not in self._focal:
            self._focal[key] = focal_radius(S, QuadratureGrid(self.cfg.fast_grid, self.cfg.fast_grid),
                                            self.cfg.reach_resolution)
        return self._focal[key]

    # criteria --------------------------------------------------------------

    def c1_volume(self):
        c = Criterion(1, "volume calibration")
        c.check("ball_volume(pi)", ball_volume(math.pi), 0.0, ball_volume(math.pi) == TWO_PI_SQ)
        num, _ = quad(lambda t: 4 * math.pi * math.sin(t) ** 2, 0, math.pi, epsabs=1e-13, epsrel=1e-13)
        c.check("quad 4pi sin^2 on [0,pi]", num, 1e-9, abs(num - TWO_PI_SQ) <= 1e-9)
        for s in (0.3, 1.0, 2.5):
            num, _ = quad(lambda t: 4 * math.pi * math.sin(t) ** 2, 0, s, epsabs=1e-13, epsrel=1e-13)
            c.check(f"ball_volume({s}) vs quadrature", ball_volume(s) - num, 1e-9, abs(ball_volume(s) - num) <= 1e-9)
        return c

    def c2_clifford(self):
        c = Criterion(2, "Clifford constants")
        S = clifford_torus()
        g = QuadratureGrid(self.cfg.grid, self.cfg.grid)
        A, W, chi = area(S, g), willmore_energy(S, g), gauss_bonnet_characteristic(S, g)
        cf = curvature_field(S, g)
        kerr = max(np.abs(cf.k1 - 1).max(), np.abs(cf.k2 + 1).max())
        fr = self.focal(S).focal_radius
        c.check("area", A, 1e-8, abs(A - TWO_PI_SQ) <= 1e-8)
        c.check("willmore", W, 1e-8, abs(W - TWO_PI_SQ) <= 1e-8)
        c.check("principal curvature error", kerr, 1e-9, kerr <= 1e-9)
        c.check("focal radius", fr, 5e-3, abs(fr - math.pi / 4) <= 5e-3)
        c.check("gauss-bonnet chi", chi, 1e-8, abs(chi) <= 1e-8)
        return c

    def c3_tube_formula(self):
        c = Criterion(3, "tube formula")
        g = QuadratureGrid(self.cfg.fast_grid, self.cfg.fast_grid)
        cases = [(0.3, 0.1), (0.3, 0.3), (0.5, 0.25), (0.5, 0.5), (0.7, 0.4), (math.pi / 4, 0.3),
                 (math.pi / 4, math.pi / 4), (1.0, 0.2), (1.0, 0.57), (1.2, 0.35)]
        for a, r in cases:
            S = rotation_torus(a)
            assert r <= min(a, HALF_PI - a) + 1e-12
            vol = tube_volume_numeric(TubeSpec(S, r), g)
            closed = math.sin(2 * r) * area(S, g)
            err = abs(vol - closed)
            c.check(f"rotation a={a:.4f} r={r:.4f}", err, 1e-6 * (1 + vol), err <= 1e-6 * (1 + vol))
        rho, r = math.pi / 3, 0.2
        vol = tube_volume_numeric(TubeSpec(geodesic_sphere(rho), r), g)
        oracle = ball_volume(rho + r) - ball_volume(rho - r)
        c.check("sphere vs ball difference", abs(vol - oracle), 1e-6, abs(vol - oracle) <= 1e-6)
        closed = tube_volume_closed(TubeSpec(geodesic_sphere(rho), r), g)
        c.check("sphere closed form vs ball difference", abs(closed - oracle), 1e-6, abs(closed - oracle) <= 1e-6)
        return c

    def c4_chain(self):
        c = Criterion(4, "inequality chain")
        g = QuadratureGrid(self.cfg.fast_grid, self.cfg.fast_grid)
        S = clifford_torus()
        rep = verify_inequality_chain(S, math.pi / 4, g, focal=self.focal(S))
        for e in rep.entries:
            c.check(f"clifford {e.name} equality", e.slack, 1e-6, e.applicable and e.equality)
        for S in self.random_tori():
            fr = self.focal(S)
            rep = verify_inequality_chain(S, fr.focal_radius, g, focal=fr)
            worst = min(e.slack for e in rep.entries if e.applicable)
            c.check(f"fourier_torus{S.params} worst slack", worst, 1e-6, not rep.vacuous and worst >= -1e-6)
        return c

    def c5_willmore(self):
        c = Criterion(5, "Willmore bound")
        g = QuadratureGrid(self.cfg.fast_grid, self.cfg.fast_grid)
        for a in np.round(np.arange(0.3, 1.2001, 0.1), 10):
            W = willmore_energy(rotation_torus(float(a)), g)
            c.check(f"rotation a={a:.1f}", W - TWO_PI_SQ, 1e-6, W >= TWO_PI_SQ - 1e-6)
        for S in self.random_tori():
            W = willmore_energy(S, g)
            c.check(f"fourier_torus{S.params}", W - TWO_PI_SQ, 1e-6, W >= TWO_PI_SQ - 1e-6)
        for rho in (0.3, 1.0, HALF_PI, 2.5):
            W = willmore_energy(geodesic_sphere(rho), g)
            c.check(f"sphere rho={rho:.4f}", W - 4 * math.pi, 1e-8, abs(W - 4 * math.pi) <= 1e-8)
        return c

    def c6_focal(self):
        c = Criterion(6, "focal radius bound")
        for a in (0.3, 0.5, math.pi / 4, 1.0):
            fr = self.focal(rotation_torus(a)).focal_radius
            want = min(a, HALF_PI - a)
            c.check(f"rotation a={a:.4f}", fr - want, 5e-3, abs(fr - want) <= 5e-3)
        tested = [rotation_torus(float(a)) for a in np.round(np.arange(0.3, 1.2001, 0.1), 10)]
        for S in tested + self.random_tori():
            fr = self.focal(S).focal_radius
            c.check(f"{S.name}{S.params} <= pi/4", fr, 5e-3, fr <= math.pi / 4 + 5e-3)
        return c

    def random_linked_pairs(self):
        rng = np.random.default_rng([self.cfg.seed, 7])
        pairs = []
        while len(pairs) < self.cfg.n_random_pairs:
            K = int(rng.integers(1, 4))
            amp = float(rng.uniform(0.05, 0.5))
            fam = FourierLoopFamily.perturbed_hopf(amp, K, int(rng.integers(0, 2**31)))
            Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
            try:
                fam = FourierLoopFamily(fam.coef @ Q.T, K, fam.seed)
                pair = fam.pair(256)
                lk = linking_number(pair)
            except (ValueError, LinkingError):
                continue
            if lk != 0:
                pairs.append((fam, pair, lk))
        return pairs

    def c7_gehring(self):
        c = Criterion(7, "Gehring bound")
        worst = -math.inf
        for fam, pair, lk in self.random_linked_pairs():
            d = set_distance(pair.A, pair.B, refine=True)
            worst = max(worst, d)
        c.check(f"max distance over {self.cfg.n_random_pairs} linked pairs", worst, 1e-6, worst <= HALF_PI + 1e-6)
        hp = CurvePair.hopf()
        d = set_distance(hp.A, hp.B, refine=True)
        lk = linking_number(hp)
        c.check("hopf distance", d, 1e-10, abs(d - HALF_PI) <= 1e-10)
        c.check("hopf linking", lk, 0, abs(lk) == 1)
        t0 = time.perf_counter()
        res = extremal_search(FourierLoopFamily.perturbed_hopf(0.05, 3, self.cfg.seed), SearchConfig(seed=self.cfg.seed))
        elapsed = time.perf_counter() - t0
        traj = [r.distance for r in res.trajectory]
        c.check("extremal search distance", res.best_distance, 0.05, res.best_distance >= HALF_PI - 0.05)
        c.check("extremal search below bound", res.best_distance, 1e-6, res.best_distance <= HALF_PI + 1e-6)
        c.check("extremal trajectory nondecreasing", bool(np.all(np.diff(traj) >= 0)), None, np.all(np.diff(traj) >= 0))
        c.check("extremal search within 5 minutes", elapsed < 300, None, elapsed < 300)
        return c

    def c8_linking(self):
        c = Criterion(8, "linking robustness")
        rng = np.random.default_rng([self.cfg.seed, 8])
        a, b = hopf_pair()
        knot = CurvePair(torus_knot_curve(2, 3, math.pi / 4), great_circle(((0, 0, 1, 0), (0, 0, 0, 1))))
        z1 = knot.A.samples(4096)[:, :2]
        ang = np.unwrap(np.arctan2(z1[:, 1], z1[:, 0]))
        winding = int(round((ang[-1] - ang[0] + (ang[1] - ang[0])) / (2 * math.pi)))
        tests = [("hopf", CurvePair(a, b)), ("torus knot vs axis", knot)]
        for k in range(3):
            fam = FourierLoopFamily.perturbed_hopf(0.2, 3, int(rng.integers(0, 2**31)))
            tests.append((f"perturbed hopf {k}", fam.pair(256)))
        small = CurvePair(great_circle(((1, 0, 0, 0), (0, 1, 0, 0))),
                          small_circle(np.array([0, 0, 1, 0.0]), 0.3))
        tests.append(("unlinked", small))
        for name, pair in tests:
            base = linking_number(pair)
            stable = linking_number(pair.refined(2)) == base
            XA, XB = pair.A.samples(pair.m_A), pair.B.samples(pair.m_B)
            poles = []
            while len(poles) < self.cfg.n_poles:
                p = random_points(rng, 1)[0]
                if min(distance_to_set(p, XA)[0], distance_to_set(p, XB)[0]) > 0.2:
                    poles.append(p)
            for p in poles:
                stable &= linking_number(pair, pole=p) == base
            c.check(f"{name} linking {base} stable", base, 0, stable)
        lk = linking_number(knot)
        c.check("torus knot vs winding oracle", lk, 0, lk == winding)
        return c

    def c9_convexity(self):
        c = Criterion(9, "complement convexity")
        n = self.cfg.n_probe_pairs
        point = np.array([[1.0, 0, 0, 0]])
        circle = small_circle(np.array([1.0, 0, 0, 0]), 0.3).samples(100)
        rng = np.random.default_rng([self.cfg.seed, 9])
        wobble = _wobbly_circle(rng, np.array([0, 1.0, 0, 0]), 0.4, 0.08)
        cases = [("point", point, 3 * math.pi / 5), ("small circle", circle, 0.52 * math.pi),
                 ("sampled curve", wobble, 0.52 * math.pi)]
        for name, A, r in cases:
            rep = complement_convexity_check(A, r, n, seed=self.cfg.seed)
            c.check(f"{name} violations", rep.violations, 0, not rep.empty and rep.n_pairs == n and rep.violations == 0)
        a, _ = hopf_pair()
        rep = complement_convexity_check(a.samples(256), 0.55 * math.pi, n, seed=self.cfg.seed)
        c.check("hopf circle complement empty", rep.empty, None, rep.empty)
        return c

    def c10_band_width(self):
        c = Criterion(10, "band width")
        S = clifford_torus()
        fr = self.focal(S)
        widths = []
        for r in (0.3, 0.5, 0.7, 0.98 * math.pi / 4):
            band = build_tube_band(S, min(r, 0.98 * fr.focal_radius), fr)
            w64 = band_width(band, 64).width
            w32 = band_width(band, 32).width
            widths.append(w64)
            c.check(f"r={band.r:.4f} width vs 2r", w64 / (2 * band.r) - 1, 0.02, abs(w64 - 2 * band.r) <= 0.02 * 2 * band.r)
            c.check(f"r={band.r:.4f} width 32->64 nonincreasing", w64 - w32, 1e-12, w64 <= w32 + 1e-12)
            if r == 0.7:
                w128 = band_width(band, 128).width
                c.check(f"r={band.r:.4f} width 64->128 nonincreasing", w128 - w64, 1e-12, w128 <= w64 + 1e-12)
        c.check("family maximum", max(widths), 0.02, max(widths) <= HALF_PI * 1.02)
        return c

    def run(self):
        return [self.c1_volume(), self.c2_clifford(), self.c3_tube_formula(), self.c4_chain(), self.c5_willmore(),
                self.c6_focal(), self.c7_gehring(), self.c8_linking(), self.c9_convexity(), self.c10_band_width()]


def small_circle(center, radius, m=256):
    """Circle of geodesic radius ``radius`` about ``center``."""
    e1, e2 = pole_frame(center)[:2]
    return ClosedCurve(
        lambda u: math.cos(radius) * center + math.sin(radius) * (np.cos(u)[..., None] * e1 + np.sin(u)[..., None] * e2),
        lambda u: math.sin(radius) * (-np.sin(u)[..., None] * e1 + np.cos(u)[..., None] * e2),
        "small_circle",
        m,
    )


def _wobbly_circle(rng, center, radius, amp, m=200):
    """Samples of a small circle with a random low-order ambient wobble."""
    e1, e2, e3 = pole_frame(center)[:3]
    u = 2 * math.pi * np.arange(m) / m
    k = np.arange(1, 4)
    co = rng.standard_normal((3, 3)) * amp / 3
    wob = np.cos(np.outer(u, k)) @ co[:, :1] * e3 + np.sin(np.outer(u, k)) @ co[:, 1:2] * e1 \
        + np.cos(np.outer(u, k)) @ co[:, 2:3] * e2
    Y = math.cos(radius) * center + math.sin(radius) * (np.cos(u)[:, None] * e1 + np.sin(u)[:, None] * e2) + wob
    return ClosedCurve.from_samples(Y, "wobbly_circle").samples()


def verify_all(cfg: SuiteConfig | None = None) -> list[Criterion]:
    return Suite(cfg).run()
