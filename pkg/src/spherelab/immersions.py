"""Parametrized curves and surfaces in S^3 and their extrinsic geometry.

Surfaces are parametrized over ``(u, v)``.  Tori live on the periodic square
``[0, 2pi)^2`` and are integrated with the trapezoidal rule.  Spheres use
polar coordinates ``u in (0, pi)``, ``v in [0, 2pi)``; the polar direction
is integrated with Gauss-Legendre nodes, which never touch the degenerate
poles.

Sign conventions
----------------
The unit normal is the generalized cross product of ``(X, X_u, X_v)``,
normalized.  The second fundamental form is ``h_ij = <X_ij, N>`` and the
principal curvatures are the eigenvalues of ``g^-1 h``.  With this choice
the parallel surface ``cos(t) X + sin(t) N`` has area element
``(cos t - k1 sin t)(cos t - k2 sin t) dA``, so a positive curvature k
focuses normals at distance ``arctan(1/k)`` on the ``+N`` side.  Spheres are
parametrized so that ``N`` points to the center (``k = cot(rho)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .sphere import QuadratureGrid, SpherePoint, TangentVector, integrate_periodic, pole_frame

DET_TOL = 1e-10


class DegenerateMetricError(ValueError):
    pass


class GridFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# derivative bundles
# ---------------------------------------------------------------------------


@dataclass
class Jet:
    """Position and first/second parameter derivatives, arrays of shape (..., 4)."""

    X: np.ndarray
    Xu: np.ndarray
    Xv: np.ndarray
    Xuu: np.ndarray
    Xuv: np.ndarray
    Xvv: np.ndarray


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def radial_projection(Y: Jet) -> Jet:
    """Jet of X = Y/|Y| from the jet of an ambient map Y."""
    r = np.linalg.norm(Y.X, axis=-1)
    X = Y.X / r[..., None]
    ru = _dot(X, Y.Xu)
    rv = _dot(X, Y.Xv)
    ruu = (_dot(Y.Xu, Y.Xu) + _dot(Y.X, Y.Xuu)) / r - ru * ru / r
    ruv = (_dot(Y.Xu, Y.Xv) + _dot(Y.X, Y.Xuv)) / r - ru * rv / r
    rvv = (_dot(Y.Xv, Y.Xv) + _dot(Y.X, Y.Xvv)) / r - rv * rv / r
    R = r[..., None]
    ru_, rv_ = ru[..., None], rv[..., None]

    def second(Yab, Ya, Yb, ra, rb, rab):
        return Yab / R - (Ya * rb + Yb * ra) / R**2 - Y.X * rab[..., None] / R**2 + 2 * Y.X * ra * rb / R**3

    return Jet(
        X=X,
        Xu=Y.Xu / R - Y.X * ru_ / R**2,
        Xv=Y.Xv / R - Y.X * rv_ / R**2,
        Xuu=second(Y.Xuu, Y.Xu, Y.Xu, ru_, ru_, ruu),
        Xuv=second(Y.Xuv, Y.Xu, Y.Xv, ru_, rv_, ruv),
        Xvv=second(Y.Xvv, Y.Xv, Y.Xv, rv_, rv_, rvv),
    )


def cross4(a, b, c):
    """Generalized cross product in R^4: the vector N with <N, x> = det(x, a, b, c)."""
    m = np.stack([a, b, c], axis=-2)
    cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    comps = [(-1) ** i * np.linalg.det(m[..., cols[i]]) for i in range(4)]
    return np.stack(comps, axis=-1)


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------


@dataclass
class SurfaceSamples:
    u: np.ndarray
    v: np.ndarray
    jet: Jet
    weights: np.ndarray  # quadrature weight of each node in parameter space
    topology: str
    grid: QuadratureGrid

    def integrate(self, values) -> float:
        """Integrate per-node values times the parameter weights (not times dA)."""
        values = np.asarray(values, dtype=float)
        if self.topology == "torus":
            return integrate_periodic(values, self.grid)
        return math.fsum((values * self.weights).ravel().tolist())


class SurfaceImmersion:
    """Immersion of a torus or sphere into S^3 with exact derivatives.

    ``jet_fn(u, v)`` returns a :class:`Jet` for broadcastable parameter arrays.
    """

    def __init__(self, name: str, topology: str, jet_fn: Callable[[np.ndarray, np.ndarray], Jet], params=()):
        if topology not in ("torus", "sphere"):
            raise ValueError(f"unknown topology {topology!r}")
        self.name = name
        self.topology = topology
        self.params = tuple(params)
        self._jet_fn = jet_fn

    def __repr__(self):
        return f"SurfaceImmersion({self.name!r}, {self.topology}, params={self.params})"

    @property
    def euler_characteristic(self) -> int:
        return 0 if self.topology == "torus" else 2

    def jet(self, u, v) -> Jet:
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        return self._jet_fn(u, v)

    def __call__(self, u, v):
        return self.jet(u, v).X

    def nodes(self, grid: QuadratureGrid):
        """Parameter nodes and parameter-space quadrature weights."""
        if self.topology == "torus":
            u, v = grid.nodes()
            w = np.full(grid.shape, grid.cell_area)
            return u, v, w
        x, wx = np.polynomial.legendre.leggauss(grid.n_u)
        u = 0.5 * math.pi * (x + 1.0)
        v = 2 * math.pi * np.arange(grid.n_v) / grid.n_v
        w = np.outer(0.5 * math.pi * wx, np.full(grid.n_v, 2 * math.pi / grid.n_v))
        return u, v, w

    def sample(self, grid: QuadratureGrid) -> SurfaceSamples:
        u, v, w = self.nodes(grid)
        U, V = np.meshgrid(u, v, indexing="ij")
        return SurfaceSamples(u, v, self.jet(U, V), w, self.topology, grid)


class GridSurface(SurfaceImmersion):
    """Torus known only through samples on a uniform periodic grid.

    Derivatives are periodic 4th-order central differences with step equal
    to the grid spacing; evaluation is only possible at grid nodes.
    """

    def __init__(self, points, name: str = "grid"):
        pts = np.array(points, dtype=float)
        if pts.ndim != 3 or pts.shape[2] != 4:
            raise GridFormatError(f"expected samples of shape (n_u, n_v, 4), got {pts.shape}")
        n_u, n_v = pts.shape[:2]
        if n_u < 8 or n_v < 8:
            raise GridFormatError("grid surfaces need at least 8x8 samples")
        norms = np.linalg.norm(pts, axis=-1)
        bad = np.argwhere(np.abs(norms - 1.0) > 1e-8)
        if bad.size:
            i, j = bad[0]
            raise GridFormatError(
                f"row {i * n_v + j + 2} (i={i}, j={j}) has norm {float(norms[i, j]):.6g}, expected 1"
            )
        pts /= norms[..., None]
        super().__init__(name, "torus", self._grid_jet, params=(n_u, n_v))
        self.points = pts
        self.shape = (n_u, n_v)
        self._full = self._fd_jet()
        det = self._det()
        bad = np.argwhere(det <= DET_TOL)
        if bad.size:
            i, j = bad[0]
            raise DegenerateMetricError(f"degenerate metric at node i={i}, j={j} (det g = {det[i, j]:.3e})")

    def _fd_jet(self) -> Jet:
        X = self.points
        hu = 2 * math.pi / self.shape[0]
        hv = 2 * math.pi / self.shape[1]

        def d1(f, axis, h):
            r = lambda k: np.roll(f, -k, axis=axis)  # noqa: E731  f[i+k]
            return (-r(2) + 8 * r(1) - 8 * r(-1) + r(-2)) / (12 * h)

        def d2(f, axis, h):
            r = lambda k: np.roll(f, -k, axis=axis)  # noqa: E731
            return (-r(2) + 16 * r(1) - 30 * f + 16 * r(-1) - r(-2)) / (12 * h * h)

        Xu = d1(X, 0, hu)
        return Jet(X, Xu, d1(X, 1, hv), d2(X, 0, hu), d1(Xu, 1, hv), d2(X, 1, hv))

    def _det(self):
        j = self._full
        E, F, G = _dot(j.Xu, j.Xu), _dot(j.Xu, j.Xv), _dot(j.Xv, j.Xv)
        return E * G - F * F

    def _indices(self, u, v):
        out = []
        for p, n in ((u, self.shape[0]), (v, self.shape[1])):
            k = np.asarray(p) * n / (2 * math.pi)
            ki = np.rint(k)
            if np.any(np.abs(k - ki) > 1e-9):
                raise ValueError("grid surfaces can only be evaluated at grid nodes")
            out.append(ki.astype(int) % n)
        return out

    def _grid_jet(self, u, v) -> Jet:
        i, j = self._indices(u, v)
        f = self._full
        return Jet(*(a[i, j] for a in (f.X, f.Xu, f.Xv, f.Xuu, f.Xuv, f.Xvv)))

    def sample(self, grid: QuadratureGrid) -> SurfaceSamples:
        n_u, n_v = self.shape
        if n_u % grid.n_u or n_v % grid.n_v:
            raise ValueError(f"grid {grid.shape} does not divide the sampled grid {self.shape}")
        su, sv = n_u // grid.n_u, n_v // grid.n_v
        f = self._full
        jet = Jet(*(a[::su, ::sv] for a in (f.X, f.Xu, f.Xv, f.Xuu, f.Xuv, f.Xvv)))
        u, v = grid.nodes()
        return SurfaceSamples(u, v, jet, np.full(grid.shape, grid.cell_area), "torus", grid)

    @property
    def native_grid(self) -> QuadratureGrid:
        return QuadratureGrid(*self.shape)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


class ClosedCurve:
    """Closed curve u -> S^3 on [0, 2pi) with derivative access.

    ``fn(u)`` returns positions and ``dfn(u)`` derivatives, both (..., 4).
    """

    def __init__(self, fn, dfn, name: str = "curve", m: int = 256, continuous: bool = True):
        self._fn = fn
        self._dfn = dfn
        self.name = name
        self.m = int(m)
        self.continuous = continuous

    def __repr__(self):
        return f"ClosedCurve({self.name!r}, m={self.m})"

    def __call__(self, u):
        return self._fn(np.asarray(u, dtype=float))

    def derivative(self, u):
        return self._dfn(np.asarray(u, dtype=float))

    def params(self, m: int | None = None) -> np.ndarray:
        m = self.m if m is None else m
        return 2 * math.pi * np.arange(m) / m

    def samples(self, m: int | None = None) -> np.ndarray:
        return self(self.params(m))

    def with_resolution(self, m: int) -> "ClosedCurve":
        if not self.continuous and m != self.m:
            raise ValueError("sampled curves cannot be resampled")
        return ClosedCurve(self._fn, self._dfn, self.name, m, self.continuous)

    def check(self):
        if np.linalg.norm(self(0.0) - self(2 * math.pi * (1 - 1e-12))) > 1e-9:
            raise ValueError(f"{self.name} is not closed")
        speed = np.linalg.norm(self.derivative(self.params()), axis=-1)
        if np.min(speed) <= 1e-6:
            raise ValueError(f"{self.name} is not regular")
        return self

    @classmethod
    def from_samples(cls, points, name: str = "sampled") -> "ClosedCurve":
        """Curve through uniformly spaced samples, evaluable at the sample nodes."""
        pts = np.array(points, dtype=float)
        pts /= np.linalg.norm(pts, axis=-1, keepdims=True)
        m = len(pts)
        h = 2 * math.pi / m
        r = lambda k: np.roll(pts, -k, axis=0)  # noqa: E731
        der = (-r(2) + 8 * r(1) - 8 * r(-1) + r(-2)) / (12 * h)

        def index(u):
            k = u * m / (2 * math.pi)
            ki = np.rint(k)
            if np.any(np.abs(k - ki) > 1e-9):
                raise ValueError("sampled curves can only be evaluated at their nodes")
            return ki.astype(int) % m

        return cls(lambda u: pts[index(u)], lambda u: der[index(u)], name, m, continuous=False)


# ---------------------------------------------------------------------------
# built-in families
# ---------------------------------------------------------------------------


def rotation_torus(a: float) -> SurfaceImmersion:
    """The flat torus (cos a e^{iu}, sin a e^{iv}), 0 < a < pi/2."""
    if not 0 < a < math.pi / 2:
        raise ValueError(f"rotation torus needs 0 < a < pi/2, got {a!r}")
    ca, sa = math.cos(a), math.sin(a)

    def jet(u, v):
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        z = np.zeros_like(u)
        X = np.stack([ca * cu, ca * su, sa * cv, sa * sv], -1)
        Xu = np.stack([-ca * su, ca * cu, z, z], -1)
        Xv = np.stack([z, z, -sa * sv, sa * cv], -1)
        Xuu = np.stack([-ca * cu, -ca * su, z, z], -1)
        Xvv = np.stack([z, z, -sa * cv, -sa * sv], -1)
        return Jet(X, Xu, Xv, Xuu, np.zeros_like(X), Xvv)

    return SurfaceImmersion("rotation_torus", "torus", jet, (a,))


def clifford_torus() -> SurfaceImmersion:
    s = rotation_torus(math.pi / 4)
    s.name, s.params = "clifford_torus", ()
    return s


def geodesic_sphere(rho: float, center=(1.0, 0.0, 0.0, 0.0)) -> SurfaceImmersion:
    """Distance sphere of radius rho about ``center``; normal points to the center."""
    if not 0 < rho < math.pi:
        raise ValueError(f"geodesic sphere needs 0 < rho < pi, got {rho!r}")
    c = SpherePoint.normalized(center).coords
    e1, e2, e3 = pole_frame(c)[:3]
    cr, sr = math.cos(rho), math.sin(rho)

    def jet(u, v):
        # v is the polar angle argument order chosen so that N points inward
        su, cu, sv, cv = np.sin(u), np.cos(u), np.sin(v), np.cos(v)
        o = lambda a, b, cc: a[..., None] * e1 + b[..., None] * e2 + cc[..., None] * e3  # noqa: E731
        z = np.zeros_like(u)
        X = cr * c + sr * o(su * cv, su * sv, cu)
        Xu = sr * o(cu * cv, cu * sv, -su)
        Xv = sr * o(-su * sv, su * cv, z)
        Xuu = sr * o(-su * cv, -su * sv, -cu)
        Xuv = sr * o(-cu * sv, cu * cv, z)
        Xvv = sr * o(-su * cv, -su * sv, z)
        return Jet(X, Xu, Xv, Xuu, Xuv, Xvv)

    surf = SurfaceImmersion("geodesic_sphere", "sphere", jet, (rho, *c))
    # fix the orientation so that the cross-product normal points to the center
    probe = surf.jet(np.array(1.0), np.array(0.5))
    n = cross4(probe.X, probe.Xu, probe.Xv)
    if n @ c < 0:
        surf._jet_fn = lambda u, v, _j=jet: _flip_v(_j, u, v)
    return surf


def _flip_v(jet_fn, u, v):
    j = jet_fn(u, -v)
    return Jet(j.X, j.Xu, -j.Xv, j.Xuu, -j.Xuv, j.Xvv)


def _fourier_modes(order: int = 2):
    modes = []
    for m in range(-order, order + 1):
        for n in range(0, order + 1):
            if (n > 0 or m > 0) and abs(m) + n <= order + 1:
                modes.append((m, n))
    return modes


def fourier_torus(seed: int, amplitude: float) -> SurfaceImmersion:
    """Clifford torus plus a random low-order ambient perturbation, renormalized.

    The perturbation P satisfies |P| <= 1 everywhere, so ``amplitude``
    bounds the ambient displacement before projection.
    """
    if not 0 <= amplitude < 0.1:
        raise ValueError(f"fourier torus amplitude must lie in [0, 0.1), got {amplitude!r}")
    rng = np.random.default_rng(seed)
    modes = np.array(_fourier_modes(), dtype=float)
    cc = rng.standard_normal((len(modes), 4))
    ss = rng.standard_normal((len(modes), 4))
    scale = np.sum(np.linalg.norm(cc, axis=1) + np.linalg.norm(ss, axis=1))
    cc, ss = cc / scale, ss / scale
    base = clifford_torus()

    def jet(u, v):
        b = base.jet(u, v)
        ph = u[..., None] * modes[:, 0] + v[..., None] * modes[:, 1]
        C, S = np.cos(ph), np.sin(ph)
        m, n = modes[:, 0], modes[:, 1]

        def comb(fc, fs):
            return amplitude * (fc @ cc + fs @ ss)

        P = comb(C, S)
        Pu = comb(-m * S, m * C)
        Pv = comb(-n * S, n * C)
        Puu = comb(-m * m * C, -m * m * S)
        Puv = comb(-m * n * C, -m * n * S)
        Pvv = comb(-n * n * C, -n * n * S)
        Y = Jet(b.X + P, b.Xu + Pu, b.Xv + Pv, b.Xuu + Puu, b.Xuv + Puv, b.Xvv + Pvv)
        return radial_projection(Y)

    return SurfaceImmersion("fourier_torus", "torus", jet, (seed, amplitude))


def great_circle(frame=None, name: str = "great_circle") -> ClosedCurve:
    """cos(u) e1 + sin(u) e2 for an orthonormal pair ``frame = (e1, e2)``."""
    if frame is None:
        frame = ((1, 0, 0, 0), (0, 1, 0, 0))
    e1, e2 = (np.asarray(f, dtype=float) for f in frame)
    if abs(np.linalg.norm(e1) - 1) > 1e-10 or abs(np.linalg.norm(e2) - 1) > 1e-10 or abs(e1 @ e2) > 1e-10:
        raise ValueError("great circle frame must be orthonormal")
    return ClosedCurve(
        lambda u: np.cos(u)[..., None] * e1 + np.sin(u)[..., None] * e2,
        lambda u: -np.sin(u)[..., None] * e1 + np.cos(u)[..., None] * e2,
        name,
    )


def hopf_pair() -> tuple[ClosedCurve, ClosedCurve]:
    """Dual great circles {(e^{iu}, 0)} and {(0, e^{iu})}."""
    a = great_circle(((1, 0, 0, 0), (0, 1, 0, 0)), "hopf_a")
    b = great_circle(((0, 0, 1, 0), (0, 0, 0, 1)), "hopf_b")
    return a, b


def torus_knot_curve(p: int, q: int, a: float = math.pi / 4) -> ClosedCurve:
    """(cos a e^{ipu}, sin a e^{iqu}), a (p, q) torus knot on the rotation torus."""
    if p <= 0 or q <= 0 or math.gcd(p, q) != 1:
        raise ValueError(f"torus knot needs coprime positive integers, got ({p}, {q})")
    if not 0 < a < math.pi / 2:
        raise ValueError(f"torus knot needs 0 < a < pi/2, got {a!r}")
    ca, sa = math.cos(a), math.sin(a)

    def fn(u):
        return np.stack([ca * np.cos(p * u), ca * np.sin(p * u), sa * np.cos(q * u), sa * np.sin(q * u)], -1)

    def dfn(u):
        return np.stack(
            [-p * ca * np.sin(p * u), p * ca * np.cos(p * u), -q * sa * np.sin(q * u), q * sa * np.cos(q * u)], -1
        )

    return ClosedCurve(fn, dfn, f"torus_knot({p},{q})")


_BUILTINS = {
    "clifford_torus": lambda *a: clifford_torus(*a),
    "rotation_torus": lambda a: rotation_torus(a),
    "geodesic_sphere": lambda rho, *c: geodesic_sphere(rho, c if c else (1.0, 0.0, 0.0, 0.0)),
    "fourier_torus": lambda seed, amp: fourier_torus(int(seed), amp),
    "great_circle": lambda *f: great_circle((f[:4], f[4:8]) if f else None),
    "hopf_pair": lambda: hopf_pair(),
    "torus_knot_curve": lambda p, q, a=math.pi / 4: torus_knot_curve(_as_int(p), _as_int(q), a),
}


def _as_int(x) -> int:
    if float(x) != int(x):
        raise ValueError(f"expected an integer, got {x!r}")
    return int(x)


def make_builtin(name: str, params: Sequence[float] = ()):
    """Construct a named built-in surface or curve."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown built-in {name!r}; choose from {sorted(_BUILTINS)}") from None
    try:
        return factory(*params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {name}: {exc}") from None


# ---------------------------------------------------------------------------
# grid file format
# ---------------------------------------------------------------------------


def save_grid_surface(path, points) -> None:
    """Write samples of shape (n_u, n_v, 4) in the plain-text grid format."""
    pts = np.asarray(points, dtype=float)
    n_u, n_v = pts.shape[:2]
    lines = [f"{n_u} {n_v}"]
    for i in range(n_u):
        for j in range(n_v):
            lines.append(f"{i} {j} " + " ".join(format(x, ".17g") for x in pts[i, j]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_grid_points(path) -> np.ndarray:
    text = Path(path).read_text().splitlines()
    if not text:
        raise GridFormatError(f"{path}: empty file")
    try:
        n_u, n_v = (int(t) for t in text[0].split())
    except ValueError:
        raise GridFormatError(f"{path}: row 1: header must be 'n_u n_v'") from None
    rows = [ln for ln in text[1:] if ln.strip()]
    if len(rows) != n_u * n_v:
        raise GridFormatError(f"{path}: expected {n_u * n_v} sample rows, found {len(rows)}")
    pts = np.empty((n_u, n_v, 4))
    for k, ln in enumerate(rows):
        parts = ln.split()
        try:
            i, j = int(parts[0]), int(parts[1])
            vals = [float(x) for x in parts[2:]]
        except (ValueError, IndexError):
            raise GridFormatError(f"{path}: row {k + 2}: cannot parse {ln!r}") from None
        if len(vals) != 4 or (i, j) != divmod(k, n_v):
            raise GridFormatError(f"{path}: row {k + 2}: expected 'i j x0 x1 x2 x3' for index {divmod(k, n_v)}")
        pts[i, j] = vals
    return pts


def load_grid_surface(path, name: str | None = None) -> GridSurface:
    pts = read_grid_points(path)
    try:
        return GridSurface(pts, name or Path(path).stem)
    except GridFormatError as exc:
        raise GridFormatError(f"{path}: {exc}") from None


def sample_to_grid(surface: SurfaceImmersion, n_u: int, n_v: int | None = None) -> np.ndarray:
    grid = QuadratureGrid(n_u, n_v or n_u)
    U, V = grid.mesh()
    return surface(U, V)


# ---------------------------------------------------------------------------
# curvature pipeline
# ---------------------------------------------------------------------------


@dataclass
class CurvatureField:
    """Per-node extrinsic geometry of a sampled surface."""

    samples: SurfaceSamples
    normal: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    k1: np.ndarray
    k2: np.ndarray

    @property
    def dA(self):
        return np.sqrt(self.E * self.G - self.F**2)

    @property
    def mean(self):
        return 0.5 * (self.k1 + self.k2)

    @property
    def extrinsic_gauss(self):
        return self.k1 * self.k2

    def integrate(self, values) -> float:
        return self.samples.integrate(np.asarray(values) * self.dA)


def _principal(E, F, G, L, M, N):
    det = E * G - F * F
    if np.any(det <= DET_TOL):
        raise DegenerateMetricError(f"degenerate metric (min det g = {np.min(det):.3e})")
    # shape operator g^-1 h; this discriminant stays accurate at umbilics
    a11 = (G * L - F * M) / det
    a12 = (G * M - F * N) / det
    a21 = (E * M - F * L) / det
    a22 = (E * N - F * M) / det
    H = 0.5 * (a11 + a22)
    disc = np.sqrt(np.maximum(0.25 * (a11 - a22) ** 2 + a12 * a21, 0.0))
    return H + disc, H - disc


def _forms(jet: Jet):
    n = cross4(jet.X, jet.Xu, jet.Xv)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    E, F, G = _dot(jet.Xu, jet.Xu), _dot(jet.Xu, jet.Xv), _dot(jet.Xv, jet.Xv)
    L, M, N = _dot(jet.Xuu, n), _dot(jet.Xuv, n), _dot(jet.Xvv, n)
    return n, E, F, G, L, M, N


def curvature_field(S: SurfaceImmersion, grid: QuadratureGrid) -> CurvatureField:
    samples = S.sample(grid)
    n, E, F, G, L, M, N = _forms(samples.jet)
    k1, k2 = _principal(E, F, G, L, M, N)
    return CurvatureField(samples, n, E, F, G, L, M, N, k1, k2)


@dataclass(frozen=True)
class CurvatureFrame:
    point: SpherePoint
    normal: TangentVector
    g: np.ndarray
    h: np.ndarray
    k1: float
    k2: float

    @property
    def H(self) -> float:
        return 0.5 * (self.k1 + self.k2)

    @property
    def extrinsic_gauss(self) -> float:
        return self.k1 * self.k2


def curvature_frame(S: SurfaceImmersion, u: float, v: float) -> CurvatureFrame:
    jet = S.jet(u, v)
    n, E, F, G, L, M, N = _forms(jet)
    k1, k2 = _principal(E, F, G, L, M, N)
    p = SpherePoint(jet.X)
    n = n - (n @ p.coords) * p.coords
    return CurvatureFrame(
        point=p,
        normal=TangentVector(p, n / np.linalg.norm(n)),
        g=np.array([[E, F], [F, G]], dtype=float),
        h=np.array([[L, M], [M, N]], dtype=float),
        k1=float(k1),
        k2=float(k2),
    )


def area(S: SurfaceImmersion, grid: QuadratureGrid | None = None) -> float:
    grid = grid or QuadratureGrid()
    samples = S.sample(grid)
    j = samples.jet
    E, F, G = _dot(j.Xu, j.Xu), _dot(j.Xu, j.Xv), _dot(j.Xv, j.Xv)
    return samples.integrate(np.sqrt(np.maximum(E * G - F * F, 0.0)))


def willmore_energy(S: SurfaceImmersion, grid: QuadratureGrid | None = None) -> float:
    """Integral of 1 + H^2 over the surface, H the mean curvature in S^3."""
    cf = curvature_field(S, grid or QuadratureGrid())
    return cf.integrate(1.0 + cf.mean**2)


def gauss_bonnet_characteristic(S: SurfaceImmersion, grid: QuadratureGrid | None = None) -> float:
    """(1/2pi) times the integral of the intrinsic curvature 1 + k1 k2."""
    cf = curvature_field(S, grid or QuadratureGrid())
    return cf.integrate(1.0 + cf.extrinsic_gauss) / (2 * math.pi)
