"""Primitives for the round unit sphere S^n embedded in R^(n+1).

Points are unit vectors in ambient coordinates.  Every function accepts
either a :class:`SpherePoint` / :class:`TangentVector` or a plain array,
and most of them broadcast over leading axes so that whole sample grids
can be processed at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-8


def _coords(p):
    return np.asarray(getattr(p, "coords", p), dtype=float)


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^n stored as a unit vector of length n+1.

    The constructor renormalizes its input; inputs whose norm is off by
    more than 1e-8 are rejected rather than silently projected.
    """

    coords: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.size < 2:
            raise ValueError("a sphere point needs at least two coordinates")
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"coordinates have norm {norm!r}, expected 1")
        c = c / norm
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "dim", c.size - 1)

    @classmethod
    def normalized(cls, coords) -> "SpherePoint":
        c = np.asarray(coords, dtype=float)
        return cls(c / np.linalg.norm(c))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True)
class TangentVector:
    base: SpherePoint
    dir: np.ndarray

    def __post_init__(self):
        d = np.array(self.dir, dtype=float).reshape(-1)
        if d.size != self.base.coords.size:
            raise ValueError("direction and base point differ in dimension")
        if abs(float(d @ self.base.coords)) > 1e-10 * max(1.0, np.linalg.norm(d)):
            raise ValueError("direction is not orthogonal to the base point")
        d.setflags(write=False)
        object.__setattr__(self, "dir", d)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform periodic grid on [0, 2pi)^2 used by the trapezoidal rule."""

    n_u: int = 64
    n_v: int = 64

    def __post_init__(self):
        if self.n_u < 8 or self.n_v < 8:
            raise ValueError("quadrature grids need at least 8 samples per direction")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_u, self.n_v)

    @property
    def cell_area(self) -> float:
        return (2 * math.pi / self.n_u) * (2 * math.pi / self.n_v)

    def nodes(self):
        u = 2 * math.pi * np.arange(self.n_u) / self.n_u
        v = 2 * math.pi * np.arange(self.n_v) / self.n_v
        return u, v

    def mesh(self):
        u, v = self.nodes()
        return np.meshgrid(u, v, indexing="ij")


def geodesic_distance(p, q):
    """Great-circle distance arccos<p, q>, broadcasting over leading axes."""
    a, b = _coords(p), _coords(q)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    ip = np.clip(np.sum(a * b, axis=-1), -1.0, 1.0)
    d = np.arccos(ip)
    return float(d) if np.ndim(d) == 0 else d


def exp_map(v, t):
    """Point reached after walking a distance t along the unit tangent v.

    ``v`` is a :class:`TangentVector` or a pair ``(base, dir)`` of arrays.
    """
    if isinstance(v, TangentVector):
        base, d = v.base.coords, v.dir
    else:
        base, d = (np.asarray(x, dtype=float) for x in v)
    n = np.linalg.norm(d, axis=-1)
    if np.any(np.abs(n - 1.0) > 1e-10):
        raise ValueError("exp_map needs a unit direction")
    t = np.asarray(t, dtype=float)[..., None]
    out = np.cos(t) * base + np.sin(t) * d
    out = out / np.linalg.norm(out, axis=-1, keepdims=True)
    if isinstance(v, TangentVector) and out.ndim == 1:
        return SpherePoint(out)
    return out


def log_map(p, q) -> TangentVector:
    """Unit initial direction at p of the minimizing geodesic towards q."""
    a, b = _coords(p), _coords(q)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    w = b - (a @ b) * a
    nw = np.linalg.norm(w)
    if nw < 1e-10:
        raise ValueError("log_map undefined: points coincide or are antipodal")
    base = p if isinstance(p, SpherePoint) else SpherePoint(a)
    d = w / nw
    d = d - (d @ base.coords) * base.coords
    return TangentVector(base, d / np.linalg.norm(d))


def ball_volume(s: float) -> float:
    """Volume of a geodesic ball of radius s in S^3, i.e. pi*(2s - sin 2s)."""
    if not 0.0 <= s <= math.pi:
        raise ValueError(f"radius {s!r} outside [0, pi]")
    return math.pi * (2 * s - math.sin(2 * s))


def pole_frame(pole) -> np.ndarray:
    """Positively oriented orthonormal frame (e_1, ..., e_n, pole) as rows.

    All charts built from these frames induce the same orientation, which
    keeps the sign of linking integrals independent of the pole.
    """
    c = _coords(pole)
    dim = c.size
    m = np.eye(dim)
    m[:, 0] = c
    q, _ = np.linalg.qr(m)
    if q[:, 0] @ c < 0:
        q = -q
    frame = np.vstack([q[:, 1:].T, c])
    if np.linalg.det(frame) < 0:
        frame[0] = -frame[0]
    return frame


def stereographic_project(p, pole):
    """Stereographic image of p from ``pole`` in R^n (coordinates of pole's complement)."""
    frame = pole_frame(pole)
    y = _coords(p) @ frame.T
    denom = 1.0 - y[..., -1]
    if np.any(denom < 1 - math.cos(1e-6)):
        raise ValueError("point too close to the projection pole")
    return y[..., :-1] / denom[..., None]


def stereographic_inverse(x, pole):
    frame = pole_frame(pole)
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    y = np.concatenate([2 * x, r2 - 1.0], axis=-1) / (r2 + 1.0)
    return y @ frame


def integrate_periodic(f, grid: QuadratureGrid) -> float:
    """Trapezoidal rule for samples of a doubly periodic function.

    Samples are summed in row-major order with exactly rounded
    summation (``math.fsum``), so the result does not depend on how the
    samples were produced.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != grid.shape:
        raise ValueError(f"sample shape {f.shape} does not match grid {grid.shape}")
    return math.fsum(f.ravel().tolist()) * grid.cell_area


def random_points(rng: np.random.Generator, n: int, dim: int = 3) -> np.ndarray:
    """Uniform samples on S^dim."""
    x = rng.standard_normal((n, dim + 1))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def slerp(p, q, s):
    """Points at fractions ``s`` along the minimizing arc from p to q."""
    a, b = _coords(p), _coords(q)
    d = geodesic_distance(a, b)
    s = np.asarray(s, dtype=float)[..., None]
    if d < 1e-15:
        return np.broadcast_to(a, s.shape[:-1] + a.shape).copy()
    return (np.sin((1 - s) * d) * a + np.sin(s * d) * b) / math.sin(d)
