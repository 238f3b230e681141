"""Focal radius, tube volumes and the tube/Willmore inequality chain for tori in S^3."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .immersions import SurfaceImmersion, curvature_field
from .sphere import QuadratureGrid

TWO_PI_SQ = 2 * math.pi**2
CHAIN_SLACK = 1e-6


class BeyondFocalRadiusWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TubeSpec:
    surface: SurfaceImmersion
    r: float

    def __post_init__(self):
        if not 0 < self.r < math.pi / 2:
            raise ValueError(f"tube radius must lie in (0, pi/2), got {self.r!r}")


@dataclass(frozen=True)
class FocalReport:
    curvature_focal: float
    reach_estimate: float
    focal_radius: float
    argmin: tuple[float, float]
    tolerance: float
    binding: str  # "curvature" or "reach"

    def __post_init__(self):
        if self.focal_radius > min(self.curvature_focal, self.reach_estimate) + 1e-15:
            raise ValueError("focal radius exceeds one of its estimates")
        if self.focal_radius > math.pi / 2 + 1e-9:
            raise ValueError("focal radius above pi/2")


def _curvature_focal(S: SurfaceImmersion, grid: QuadratureGrid):
    cf = curvature_field(S, grid)
    kmax = np.maximum(np.abs(cf.k1), np.abs(cf.k2))
    focal = np.arctan2(1.0, kmax)
    i, j = np.unravel_index(np.argmin(focal), focal.shape)
    return float(focal[i, j]), (float(cf.samples.u[i]), float(cf.samples.v[j]))


def curvature_focal_radius(S: SurfaceImmersion, grid: QuadratureGrid | None = None) -> float:
    """Smallest first focal distance arctan(1/|k_i|) over the sample nodes."""
    return _curvature_focal(S, grid or QuadratureGrid())[0]


@dataclass
class ReachResult:
    reach: float
    pair: tuple[tuple[float, float], tuple[float, float]] | None
    spacing: float
    uncertainty: float


def _grid_spacing(X):
    """Largest geodesic distance between parameter-neighbouring samples."""
    du = np.sum(X * np.roll(X, -1, axis=0), axis=-1)[:-1]
    dv = np.sum(X * np.roll(X, -1, axis=1), axis=-1)
    return float(np.arccos(np.clip(min(du.min(), dv.min()), -1, 1)))


def reach_details(S: SurfaceImmersion, resolution: int = 64, tolerance: float = 5e-3, window: int = 4,
                  block: int = 512) -> ReachResult:
    """Global normal-injectivity radius of a sampled surface.

    For base points p, q the normal geodesic t -> cos t p + sin t N_p
    becomes closer to q than to p once t exceeds
    ``arctan2(1 - <p,q>, <N_p,q>)``; the tube of radius r is injective on
    the samples iff no pair violates this below r.  Pairs closer than
    ``window`` grid spacings with agreeing normals lie on the same local
    sheet; their collisions are the curvature focal points, accounted for
    separately, so they are skipped.  Close pairs on opposite-facing
    sheets (a pinched neck) are kept.
    """
    if isinstance(S, SurfaceImmersion) and hasattr(S, "native_grid") and S.native_grid.n_u < resolution:
        resolution = S.native_grid.n_u
    grid = QuadratureGrid(resolution, resolution)
    cf = curvature_field(S, grid)
    X = cf.samples.jet.X
    spacing = _grid_spacing(X)
    uncertainty = 0.5 * spacing**2
    if uncertainty > tolerance:
        raise ValueError(
            f"resolution {resolution} too coarse: sample spacing {spacing:.3g} gives uncertainty "
            f"{uncertainty:.3g} > tolerance {tolerance:.3g}"
        )
    P = X.reshape(-1, 4)
    Nrm = cf.normal.reshape(-1, 4)
    near = math.cos(window * spacing)
    best, arg = math.pi / 2, None
    for s in range(0, len(P), block):
        G = P[s:s + block] @ P.T
        D = Nrm[s:s + block] @ P.T
        one = 1.0 - G
        t = np.minimum(np.arctan2(one, D), np.arctan2(one, -D))
        same_sheet = (G > near) & (Nrm[s:s + block] @ Nrm.T > 0)
        t[same_sheet] = np.inf
        k = int(np.argmin(t))
        if t.flat[k] < best:
            best = float(t.flat[k])
            arg = (s + k // len(P), k % len(P))
    pair = None
    if arg is not None:
        n_v = grid.n_v
        uv = lambda idx: (float(cf.samples.u[idx // n_v]), float(cf.samples.v[idx % n_v]))  # noqa: E731
        pair = (uv(arg[0]), uv(arg[1]))
    return ReachResult(best, pair, spacing, uncertainty)


def reach_estimate(S: SurfaceImmersion, resolution: int = 64, tolerance: float = 5e-3) -> float:
    return reach_details(S, resolution, tolerance).reach


def focal_radius(S: SurfaceImmersion, grid: QuadratureGrid | None = None, resolution: int = 64,
                 tolerance: float = 5e-3) -> FocalReport:
    """Combine the curvature focal distance and the global reach."""
    grid = grid or QuadratureGrid()
    cfocal, cuv = _curvature_focal(S, grid)
    rr = reach_details(S, resolution, tolerance)
    if rr.reach < cfocal:
        value, uv, binding = rr.reach, rr.pair[0], "reach"
    else:
        value, uv, binding = cfocal, cuv, "curvature"
    return FocalReport(cfocal, rr.reach, value, uv, max(tolerance, rr.uncertainty), binding)


def _focal_value(focal) -> float:
    return focal.focal_radius if isinstance(focal, FocalReport) else float(focal)


def tube_volume_numeric(spec: TubeSpec, grid: QuadratureGrid | None = None, n_t: int = 32, focal=None) -> float:
    """Volume of the r-tube from the Fermi area element, integrated over surface x [-r, r].

    ``focal`` (a :class:`FocalReport` or a number) is only used to flag
    radii beyond the focal radius; when omitted the curvature focal
    distance on the same grid is used.
    """
    if n_t < 4:
        raise ValueError("n_t must be at least 4")
    grid = grid or QuadratureGrid()
    cf = curvature_field(spec.surface, grid)
    limit = _focal_value(focal) if focal is not None else float(
        np.min(np.arctan2(1.0, np.maximum(np.abs(cf.k1), np.abs(cf.k2)))))
    if spec.r > limit + 1e-9:
        warnings.warn(f"beyond focal radius: r={spec.r:.6g} > {limit:.6g}; volume overcounts",
                      BeyondFocalRadiusWarning, stacklevel=2)
    x, w = np.polynomial.legendre.leggauss(n_t)
    t = spec.r * x
    w = spec.r * w
    c, s = np.cos(t), np.sin(t)
    # per node: sum_k w_k (c_k - k1 s_k)(c_k - k2 s_k)
    a0 = w @ (c * c)
    a1 = w @ (c * s)
    a2 = w @ (s * s)
    inner = a0 - (cf.k1 + cf.k2) * a1 + cf.k1 * cf.k2 * a2
    return cf.integrate(inner)


def tube_volume_closed(spec: TubeSpec, grid: QuadratureGrid | None = None, surface_area: float | None = None) -> float:
    """sin(2r) area + 2 pi chi (r - sin r cos r)."""
    from .immersions import area

    r = spec.r
    A = area(spec.surface, grid or QuadratureGrid()) if surface_area is None else surface_area
    chi = spec.surface.euler_characteristic
    return math.sin(2 * r) * A + 2 * math.pi * chi * (r - math.sin(r) * math.cos(r))


@dataclass
class ChainEntry:
    name: str
    lhs: float
    rhs: float
    relation: str  # "<=" or ">="
    applicable: bool
    slack: float = field(init=False)
    holds: bool = field(init=False)

    def __post_init__(self):
        self.slack = self.rhs - self.lhs if self.relation == "<=" else self.lhs - self.rhs
        self.holds = self.slack >= -CHAIN_SLACK

    @property
    def equality(self) -> bool:
        return abs(self.slack) <= CHAIN_SLACK


@dataclass
class ChainReport:
    surface: str
    r: float
    focal_radius: float
    vacuous: bool
    entries: list[ChainEntry]

    @property
    def passed(self) -> bool:
        return self.vacuous or all(e.holds for e in self.entries if e.applicable)

    def entry(self, name: str) -> ChainEntry:
        """Look up an entry by full name or by its label, e.g. ``"(3)"``."""
        for e in self.entries:
            if e.name == name or e.name.split(" ", 1)[0] == name:
                return e
        raise KeyError(name)

    def __str__(self):
        lines = [f"chain for {self.surface} at r={self.r:.10g} (focal {self.focal_radius:.10g})"
                 + (" [vacuous]" if self.vacuous else "")]
        for e in self.entries:
            tag = "n/a" if not e.applicable else ("ok" if e.holds else "FAIL")
            lines.append(f"  {e.name:28s} {e.lhs:.12g} {e.relation} {e.rhs:.12g}  [{tag}]")
        return "\n".join(lines)


def verify_inequality_chain(S: SurfaceImmersion, r: float, grid: QuadratureGrid | None = None, focal=None,
                            n_t: int = 32) -> ChainReport:
    """Evaluate both sides of the tube-volume / Willmore chain for a torus.

    Relations (2) and (3) rest on sin(2r) >= cot(r), so they are only
    asserted for r >= pi/4.  Everything is vacuous beyond the focal radius.
    """
    if S.topology != "torus":
        raise ValueError("the inequality chain is stated for tori only")
    if not 0 < r < math.pi / 2:
        raise ValueError(f"radius must lie in (0, pi/2), got {r!r}")
    grid = grid or QuadratureGrid()
    if focal is None:
        focal = focal_radius(S, grid)
    fr = _focal_value(focal)
    vacuous = r > fr + 1e-9

    cf = curvature_field(S, grid)
    A = cf.integrate(np.ones_like(cf.k1))
    W = cf.integrate(1.0 + cf.mean**2)
    sq = cf.integrate(0.5 * (cf.k1**2 + cf.k2**2))
    kmax = float(np.max(np.maximum(np.abs(cf.k1), np.abs(cf.k2))))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BeyondFocalRadiusWarning)
        vol = tube_volume_numeric(TubeSpec(S, r), grid, n_t, focal=fr)
    cot = 1.0 / math.tan(r)
    wide = r >= math.pi / 4 - 1e-12
    ok = not vacuous
    entries = [
        ChainEntry("(1) tube volume", vol, TWO_PI_SQ, "<=", ok),
        ChainEntry("(2) sin2r area vs cot area", math.sin(2 * r) * A, cot * A, ">=", ok and wide),
        ChainEntry("(3) cot area", cot * A, TWO_PI_SQ, "<=", ok and wide),
        ChainEntry("(4) Willmore", W, TWO_PI_SQ, ">=", ok),
        ChainEntry("(5) Willmore vs mean square", W, sq, "<=", ok),
        ChainEntry("(6) cot^2 area", TWO_PI_SQ, cot * cot * A, "<=", ok),
        ChainEntry("curvature bound", kmax, cot, "<=", ok),
    ]
    return ChainReport(S.name, r, fr, vacuous, entries)
