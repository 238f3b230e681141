"""Distances and linking between closed curves in S^3.

Linking is decided algebraically: the curves are stereographically
projected from a pole far from both and the Gauss double integral is
evaluated with the periodic trapezoidal rule.  A nonzero linking number
is taken as the certificate of being linked.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .immersions import ClosedCurve, hopf_pair
from .sphere import pole_frame, random_points, slerp

HALF_PI = math.pi / 2


class LinkingError(ValueError):
    pass


def _points(S) -> np.ndarray:
    if isinstance(S, ClosedCurve):
        return S.samples()
    pts = np.atleast_2d(np.asarray(S, dtype=float))
    if pts.size == 0:
        raise ValueError("empty set")
    return pts


def _max_inner(P, Q, block=2048):
    """For each row of P, the largest inner product with a row of Q (and its index)."""
    best = np.empty(len(P))
    idx = np.empty(len(P), dtype=int)
    for s in range(0, len(P), block):
        G = P[s:s + block] @ Q.T
        k = np.argmax(G, axis=1)
        idx[s:s + block] = k
        best[s:s + block] = G[np.arange(len(k)), k]
    return best, idx


def distance_to_set(X, A) -> np.ndarray:
    """Distance from each point of X to the sampled set A."""
    best, _ = _max_inner(np.atleast_2d(X), _points(A))
    return np.arccos(np.clip(best, -1.0, 1.0))


@dataclass
class CurvePair:
    A: ClosedCurve
    B: ClosedCurve
    m_A: int = 256
    m_B: int = 256

    def __post_init__(self):
        if coarse_distance(self.A.samples(self.m_A), self.B.samples(self.m_B)) <= 1e-4:
            raise ValueError("curves of a pair must be disjoint")

    @classmethod
    def hopf(cls, m: int = 256) -> "CurvePair":
        a, b = hopf_pair()
        return cls(a, b, m, m)

    def refined(self, factor: int = 2) -> "CurvePair":
        return CurvePair(self.A, self.B, self.m_A * factor, self.m_B * factor)


def coarse_distance(P, Q) -> float:
    best, _ = _max_inner(_points(P), _points(Q))
    return float(np.arccos(np.clip(best.max(), -1.0, 1.0)))


def _refine_pairs(A: ClosedCurve, B: ClosedCurve, u, w, tol=1e-10, max_iter=5000):
    """Backtracking gradient descent of d(A(u), B(w)) from several starts at once."""

    def dist(u, w):
        return np.arccos(np.clip(np.sum(A(u) * B(w), axis=-1), -1.0, 1.0))

    def grad(u, w):
        a, b = A(u), B(w)
        ip = np.sum(a * b, axis=-1, keepdims=True)
        ta = b - ip * a  # unnormalized log_a(b)
        tb = a - ip * b
        na = np.linalg.norm(ta, axis=-1)
        nb = np.linalg.norm(tb, axis=-1)
        gu = -np.sum(ta * A.derivative(u), axis=-1) / na
        gw = -np.sum(tb * B.derivative(w), axis=-1) / nb
        return gu, gw

    f = dist(u, w)
    step = np.full(u.shape, 0.1)
    active = np.ones(u.shape, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        gu, gw = grad(u, w)
        gn = np.hypot(gu, gw)
        active &= gn * step >= tol
        if not active.any():
            break
        un = np.where(active, u - step * gu, u)
        wn = np.where(active, w - step * gw, w)
        fn = dist(un, wn)
        ok = active & (fn < f)
        u, w, f = np.where(ok, un, u), np.where(ok, wn, w), np.where(ok, fn, f)
        step = np.where(ok, step * 2.0, np.where(active, step * 0.5, step))
    return f, u, w


def set_distance(A, B, refine: bool = False, starts: int = 8) -> float:
    """Minimum geodesic distance between two sampled sets.

    With ``refine`` both arguments must be curves with continuous
    evaluators; the best sample pairs are then polished by local descent
    on the two curve parameters, so the result never exceeds the sampled
    minimum.
    """
    P, Q = _points(A), _points(B)
    best, idx = _max_inner(P, Q)
    coarse = float(np.arccos(np.clip(best.max(), -1.0, 1.0)))
    if not refine:
        return coarse
    if not (isinstance(A, ClosedCurve) and isinstance(B, ClosedCurve) and A.continuous and B.continuous):
        raise ValueError("refinement needs curves with parameter evaluators")
    order = np.argsort(-best, kind="stable")
    picks, taken = [], set()
    for i in order:
        key = (int(i) * 16 // len(P))
        if key in taken:
            continue
        taken.add(key)
        picks.append(int(i))
        if len(picks) == starts:
            break
    picks = np.array(picks)
    u = A.params()[picks]
    w = B.params()[idx[picks]]
    f, _, _ = _refine_pairs(A, B, u.astype(float), w.astype(float))
    return float(min(coarse, f.min()))


# ---------------------------------------------------------------------------
# linking number
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def design_points() -> np.ndarray:
    """The 600 vertices of the 120-cell, a deterministic spherical design on S^3."""
    phi = (1 + math.sqrt(5)) / 2
    s5 = math.sqrt(5)
    every = list(itertools.permutations(range(4)))
    even = [p for p in every if _parity(p) == 0]
    groups = [
        ((0, 0, 2, 2), every),
        ((1, 1, 1, s5), every),
        ((phi**-2, phi, phi, phi), every),
        ((1 / phi, 1 / phi, 1 / phi, phi**2), every),
        ((0, phi**-2, 1, phi**2), even),
        ((0, 1 / phi, phi, s5), even),
        ((1 / phi, 1, phi, 2), even),
    ]
    pts = set()
    for base, perms in groups:
        for signs in itertools.product((1, -1), repeat=4):
            v = [b * s for b, s in zip(base, signs)]
            for p in perms:
                pts.add(tuple(round(v[k], 12) + 0.0 for k in p))
    arr = np.array(sorted(pts)) / math.sqrt(8)
    assert arr.shape == (600, 4)
    return arr


def _parity(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


def choose_pole(P, Q, min_clearance: float = 0.2) -> np.ndarray:
    D = design_points()
    clear = np.minimum(distance_to_set(D, P), distance_to_set(D, Q))
    k = int(np.argmax(clear))
    if clear[k] <= min_clearance:
        raise LinkingError("no admissible projection pole")
    return D[k]


def _project_with_derivative(X, dX, pole):
    frame = pole_frame(pole)
    y = X @ frame.T
    dy = dX @ frame.T
    s = (1.0 - y[:, -1])[:, None]
    x = y[:, :-1] / s
    dx = dy[:, :-1] / s + y[:, :-1] * dy[:, -1:] / s**2
    return x, dx


def linking_integral(pair: CurvePair, pole=None) -> float:
    """Raw Gauss linking integral of the projected curves."""
    uA, uB = pair.A.params(pair.m_A), pair.B.params(pair.m_B)
    XA, XB = pair.A(uA), pair.B(uB)
    if pole is None:
        pole = choose_pole(XA, XB)
    else:
        pole = np.asarray(pole, dtype=float)
        if min(distance_to_set(pole, XA)[0], distance_to_set(pole, XB)[0]) <= 0.2:
            raise LinkingError("pole too close to one of the curves")
    a, da = _project_with_derivative(XA, pair.A.derivative(uA), pole)
    b, db = _project_with_derivative(XB, pair.B.derivative(uB), pole)
    diff = a[:, None, :] - b[None, :, :]
    cross = np.cross(da[:, None, :], db[None, :, :])
    r3 = np.linalg.norm(diff, axis=-1) ** 3
    integrand = np.sum(diff * cross, axis=-1) / r3
    h = (2 * math.pi / pair.m_A) * (2 * math.pi / pair.m_B)
    return math.fsum(integrand.ravel().tolist()) * h / (4 * math.pi)


def linking_number(pair: CurvePair, pole=None) -> int:
    raw = linking_integral(pair, pole)
    k = round(raw)
    if abs(raw - k) > 0.1:
        raise LinkingError(f"linking integral {raw:.4f} is not near an integer; increase resolution")
    return int(k)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class GehringReport:
    linking: int
    distance: float
    linked: bool
    bound_satisfied: bool
    saturated: bool


def gehring_check(pair: CurvePair, tol: float = 1e-6) -> GehringReport:
    lk = linking_number(pair)
    d = set_distance(pair.A.with_resolution(pair.m_A), pair.B.with_resolution(pair.m_B),
                     refine=pair.A.continuous and pair.B.continuous)
    linked = lk != 0
    return GehringReport(
        linking=lk,
        distance=d,
        linked=linked,
        bound_satisfied=(not linked) or d <= HALF_PI + tol,
        saturated=linked and abs(d - HALF_PI) <= tol,
    )


@dataclass
class ConvexityReport:
    r: float
    empty: bool
    n_pairs: int
    violations: int
    draws: int
    worst_slack: float


def complement_convexity_check(A, r: float, n_pairs: int = 1000, seed: int = 42, max_draws: int = 10**6,
                               n_probe: int = 64, slack: float = 1e-6) -> ConvexityReport:
    """Probe geodesic convexity of the complement of the open r-neighbourhood of A.

    Pairs of points of the complement are drawn by rejection sampling and
    the minimizing arc between them is checked at ``n_probe`` points.
    """
    if r <= HALF_PI + 1e-6:
        raise ValueError("the complement is only claimed convex for r > pi/2")
    P = _points(A)
    rng = np.random.default_rng(seed)
    members, draws = [], 0
    need = 2 * n_pairs
    batch = 100_000
    while draws < max_draws and sum(len(m) for m in members) < need:
        n = min(batch, max_draws - draws)
        x = random_points(rng, n)
        draws += n
        members.append(x[distance_to_set(x, P) >= r])
    M = np.concatenate(members)[:need]
    if len(M) < 2:
        return ConvexityReport(r, True, 0, 0, draws, math.inf)
    pairs = len(M) // 2
    s = np.linspace(0.0, 1.0, n_probe)
    pts = np.concatenate([slerp(M[2 * k], M[2 * k + 1], s) for k in range(pairs)])
    d = distance_to_set(pts, P).reshape(pairs, n_probe)
    margin = d - r
    violations = int(np.sum(np.any(margin < -slack, axis=1)))
    return ConvexityReport(r, False, pairs, violations, draws, float(margin.min()))


# ---------------------------------------------------------------------------
# Fourier loop families and extremal search
# ---------------------------------------------------------------------------


def _basis(u, K):
    cols = [np.ones_like(u)]
    dcols = [np.zeros_like(u)]
    for k in range(1, K + 1):
        cols += [np.cos(k * u), np.sin(k * u)]
        dcols += [-k * np.sin(k * u), k * np.cos(k * u)]
    return np.stack(cols, -1), np.stack(dcols, -1)


def _fourier_curve(coef, K, name):
    coef = np.array(coef, dtype=float)

    def fn(u):
        b, _ = _basis(np.asarray(u, dtype=float), K)
        y = b @ coef
        return y / np.linalg.norm(y, axis=-1, keepdims=True)

    def dfn(u):
        b, db = _basis(np.asarray(u, dtype=float), K)
        y, dy = b @ coef, db @ coef
        r = np.linalg.norm(y, axis=-1, keepdims=True)
        x = y / r
        return dy / r - x * np.sum(x * dy, axis=-1, keepdims=True) / r

    return ClosedCurve(fn, dfn, name)


@dataclass
class FourierLoopFamily:
    """Two loops given by truncated ambient Fourier series, projected to S^3.

    ``coef`` has shape (2, 2K+1, 4): constant term, then cos/sin pairs.
    """

    coef: np.ndarray
    K: int
    seed: int = 0

    def __post_init__(self):
        self.coef = np.array(self.coef, dtype=float)
        if self.coef.shape != (2, 2 * self.K + 1, 4):
            raise ValueError(f"coefficients must have shape (2, {2 * self.K + 1}, 4)")
        u = np.linspace(0, 2 * math.pi, 1024, endpoint=False)
        b, _ = _basis(u, self.K)
        if np.min(np.linalg.norm(b @ self.coef[0], axis=-1)) <= 0.1 or \
                np.min(np.linalg.norm(b @ self.coef[1], axis=-1)) <= 0.1:
            raise ValueError("ambient loop passes too close to the origin to project")

    def curves(self):
        return (_fourier_curve(self.coef[0], self.K, "loop_a"), _fourier_curve(self.coef[1], self.K, "loop_b"))

    def pair(self, m: int = 256) -> CurvePair:
        a, b = self.curves()
        return CurvePair(a, b, m, m)

    @classmethod
    def from_curves(cls, A: ClosedCurve, B: ClosedCurve, K: int, seed: int = 0) -> "FourierLoopFamily":
        m = max(64, 4 * K + 8)
        u = 2 * math.pi * np.arange(m) / m
        coef = []
        for C in (A, B):
            F = np.fft.rfft(C(u), axis=0) / m
            rows = [F[0].real]
            for k in range(1, K + 1):
                rows += [2 * F[k].real, -2 * F[k].imag]
            coef.append(rows)
        return cls(np.array(coef), K, seed)

    @classmethod
    def perturbed_hopf(cls, amplitude: float, K: int = 3, seed: int = 42) -> "FourierLoopFamily":
        """Hopf pair with every coefficient jittered by ``amplitude`` times a unit Gaussian."""
        a, b = hopf_pair()
        fam = cls.from_curves(a, b, K, seed)
        rng = np.random.default_rng(seed)
        return cls(fam.coef + amplitude * rng.standard_normal(fam.coef.shape), K, seed)


@dataclass
class SearchConfig:
    K: int = 3
    betas: tuple = (20.0, 50.0, 100.0, 200.0, 500.0)
    m: int = 96
    m_link: int = 128
    max_iter: int = 200
    step0: float = 0.02
    gain_tol: float = 1e-8
    seed: int = 42


@dataclass
class TrajectoryRow:
    iteration: int
    beta: float
    surrogate: float
    distance: float
    linking: int


@dataclass
class SearchResult:
    best_distance: float
    family: FourierLoopFamily
    trajectory: list[TrajectoryRow] = field(default_factory=list)
    config: SearchConfig | None = None


def softmin_surrogate(coef, K, beta, m):
    """Softmin of pairwise sample distances and its gradient in the coefficients."""
    u = 2 * math.pi * np.arange(m) / m
    b, _ = _basis(u, K)
    YA, YB = b @ coef[0], b @ coef[1]
    rA = np.linalg.norm(YA, axis=1, keepdims=True)
    rB = np.linalg.norm(YB, axis=1, keepdims=True)
    XA, XB = YA / rA, YB / rB
    G = np.clip(XA @ XB.T, -1 + 1e-15, 1 - 1e-15)
    d = np.arccos(G)
    z = -beta * d
    zmax = z.max()
    e = np.exp(z - zmax)
    total = e.sum()
    value = -(zmax + math.log(total / d.size)) / beta
    w = e / total  # d value / d d_ij
    c = -w / np.sqrt(1.0 - G * G)  # d value / d G_ij
    gXA = c @ XB
    gXB = c.T @ XA
    gYA = (gXA - XA * np.sum(XA * gXA, axis=1, keepdims=True)) / rA
    gYB = (gXB - XB * np.sum(XB * gXB, axis=1, keepdims=True)) / rB
    return float(value), np.stack([b.T @ gYA, b.T @ gYB])


def _true_distance(fam: FourierLoopFamily, m: int) -> float:
    a, b = fam.curves()
    return set_distance(a.with_resolution(m), b.with_resolution(m), refine=True)


def _linking_or_none(fam: FourierLoopFamily, m: int):
    try:
        return linking_number(fam.pair(m))
    except (LinkingError, ValueError):
        return None


def extremal_search(family: FourierLoopFamily, config: SearchConfig | None = None) -> SearchResult:
    """Maximize the distance between two linked loops by annealed softmin ascent.

    Steps are accepted only if they raise the surrogate, do not lower the
    true (refined) distance, and keep the linking number.
    """
    cfg = config or SearchConfig(K=family.K)
    lk0 = _linking_or_none(family, cfg.m_link)
    if not lk0:
        raise ValueError("extremal search needs a linked starting configuration")
    fam = family
    dist = _true_distance(fam, cfg.m)
    rows = []
    it = 0
    for beta in cfg.betas:
        val, grad = softmin_surrogate(fam.coef, fam.K, beta, cfg.m)
        rows.append(TrajectoryRow(it, beta, val, dist, lk0))
        step = cfg.step0
        for _ in range(cfg.max_iter):
            gn = float(np.linalg.norm(grad))
            if gn < 1e-14 or step < 1e-7:
                break
            try:
                cand = FourierLoopFamily(fam.coef + step * grad / gn, fam.K, fam.seed)
            except ValueError:
                step *= 0.5
                continue
            cval, cgrad = softmin_surrogate(cand.coef, cand.K, beta, cfg.m)
            if cval <= val:
                step *= 0.5
                continue
            cdist = _true_distance(cand, cfg.m)
            if cdist < dist or _linking_or_none(cand, cfg.m_link) != lk0:
                step *= 0.5
                continue
            it += 1
            gain = cval - val
            fam, val, grad, dist = cand, cval, cgrad, cdist
            rows.append(TrajectoryRow(it, beta, val, dist, lk0))
            step *= 1.5
            if gain < cfg.gain_tol:
                break
    return SearchResult(dist, fam, rows, cfg)


def write_trajectory_csv(path, trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "beta", "surrogate", "distance", "linking"])
        for row in trajectory:
            w.writerow([row.iteration, repr(row.beta), repr(row.surrogate), repr(row.distance), row.linking])
