"""Tube bands over surfaces in S^3: graph-based width and level-set curvature."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .immersions import SurfaceImmersion, curvature_field
from .sphere import QuadratureGrid
from .tubes import FocalReport, focal_radius

FOCAL_FRACTION = 0.98
STENCIL_ANISOTROPY = 0.08


@dataclass
class Band:
    """The region {exp(t N(u, v)) : |t| <= r} over a core surface.

    The face Y- sits at t = -r and Y+ at t = +r.
    """

    surface: SurfaceImmersion
    r: float
    focal: float

    def lattice(self, grid: QuadratureGrid, n_t: int):
        """Ambient images of the Fermi lattice, shape (n_u, n_v, n_t, 4)."""
        cf = curvature_field(self.surface, grid)
        t = np.linspace(-self.r, self.r, n_t)
        X, N = cf.samples.jet.X, cf.normal
        pts = np.cos(t)[:, None] * X[:, :, None, :] + np.sin(t)[:, None] * N[:, :, None, :]
        factor = (np.cos(t) - cf.k1[..., None] * np.sin(t)) * (np.cos(t) - cf.k2[..., None] * np.sin(t))
        if np.any(factor <= 0):
            raise ValueError("Fermi chart degenerates inside the band")
        return pts, t


def build_tube_band(S: SurfaceImmersion, r: float, focal=None) -> Band:
    """Band of half-thickness r over S; r must stay below 0.98 of the focal radius."""
    if focal is None:
        focal = focal_radius(S)
    fr = focal.focal_radius if isinstance(focal, FocalReport) else float(focal)
    if not 0 < r <= FOCAL_FRACTION * fr:
        raise ValueError(f"band radius {r!r} exceeds {FOCAL_FRACTION} x focal radius {fr:.6g}")
    return Band(S, float(r), fr)


@dataclass
class GridGraph:
    n_vertices: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    shape: tuple[int, int, int]

    def matrix(self):
        n = self.n_vertices
        return coo_matrix((self.weights, (self.rows, self.cols)), shape=(n, n)).tocsr()


def _half_stencil():
    offs = [o for o in itertools.product((-1, 0, 1), repeat=3) if o > (0, 0, 0)]
    assert len(offs) == 13
    return offs


def build_grid_graph(pts: np.ndarray, periodic_u: bool) -> GridGraph:
    """26-neighbour lattice graph weighted by ambient geodesic distance."""
    n_u, n_v, n_t = pts.shape[:3]
    index = np.arange(n_u * n_v * n_t).reshape(n_u, n_v, n_t)
    rows, cols, wts = [], [], []
    for du, dv, dt in _half_stencil():
        i = np.arange(n_u)
        j = np.arange(n_v)
        k = np.arange(n_t)
        i2 = (i + du) % n_u if periodic_u else i + du
        j2 = (j + dv) % n_v
        k2 = k + dt
        iu = (i2 >= 0) & (i2 < n_u)
        kk = (k2 >= 0) & (k2 < n_t)
        a = index[np.ix_(i[iu], j, k[kk])]
        b = index[np.ix_(i2[iu], j2, k2[kk])]
        pa = pts[np.ix_(i[iu], j, k[kk])]
        pb = pts[np.ix_(i2[iu], j2, k2[kk])]
        chord = np.linalg.norm(pa - pb, axis=-1)
        rows.append(a.ravel())
        cols.append(b.ravel())
        wts.append((2 * np.arcsin(np.minimum(chord / 2, 1.0))).ravel())
    w = np.concatenate(wts)
    if np.any(w <= 0):
        raise ValueError("lattice has coincident vertices")
    return GridGraph(index.size, np.concatenate(rows), np.concatenate(cols), w, (n_u, n_v, n_t))


@dataclass
class BandWidth:
    r: float
    resolution: int
    n_t: int
    width: float
    error_bound: float


def band_width(band: Band, resolution: int = 64, n_t: int | None = None) -> BandWidth:
    """Shortest lattice path from Y- to Y+.

    The lattice path length is an upper bound on the intrinsic width;
    ``error_bound`` is the worst-case metrication error of the stencil.
    """
    n_t = n_t or resolution // 2 + 1
    grid = QuadratureGrid(resolution, resolution)
    pts, _ = band.lattice(grid, n_t)
    graph = build_grid_graph(pts, periodic_u=band.surface.topology == "torus")
    mat = graph.matrix()
    n_comp, _ = connected_components(mat, directed=False)
    if n_comp != 1:
        raise ValueError("band lattice graph is disconnected; increase resolution")
    index = np.arange(graph.n_vertices).reshape(graph.shape)
    sources = index[:, :, 0].ravel()
    targets = index[:, :, -1].ravel()
    dist = dijkstra(mat, directed=False, indices=sources, min_only=True)
    width = float(dist[targets].min())
    return BandWidth(band.r, resolution, n_t, width, STENCIL_ANISOTROPY * width)


@dataclass
class LevelSetProbe:
    level: float
    t: float
    min_curvature: float
    max_curvature: float
    k1_range: tuple[float, float]
    k2_range: tuple[float, float]

    @property
    def strictly_convex(self) -> bool:
        return self.min_curvature > 0


def levelset_convexity_probe(band: Band, level: float, grid: QuadratureGrid | None = None) -> LevelSetProbe:
    """Principal curvatures of the level set at distance ``level`` from Y-.

    Inside a tube band this level set is the parallel surface at signed
    distance t = level - r from the core; curvatures are taken with the
    normal pointing away from Y-.  The probe only records values.
    """
    if not 0 < level < 2 * band.r:
        raise ValueError(f"level {level!r} must lie strictly inside (0, {2 * band.r!r})")
    cf = curvature_field(band.surface, grid or QuadratureGrid())
    t = level - band.r
    c, s = math.cos(t), math.sin(t)
    k1 = (cf.k1 * c + s) / (c - cf.k1 * s)
    k2 = (cf.k2 * c + s) / (c - cf.k2 * s)
    lo, hi = np.minimum(k1, k2), np.maximum(k1, k2)
    return LevelSetProbe(
        level=level,
        t=t,
        min_curvature=float(lo.min()),
        max_curvature=float(hi.max()),
        k1_range=(float(hi.min()), float(hi.max())),
        k2_range=(float(lo.min()), float(lo.max())),
    )
