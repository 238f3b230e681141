"""Command line front end.

    spherelab <command> [--config PATH] [--out PATH] [--format json|csv]
              [--seed N] [--resolution N] [--radius X] [--surface NAME[:params]]
              [--pair NAME[:params]]

Exit status: 0 when every assertion passes, 2 when an assertion fails,
1 on bad input.  Reports are written atomically.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
import time
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .acceptance import Suite, SuiteConfig, small_circle
from .bands import band_width, build_tube_band
from .immersions import (
    GridFormatError,
    area,
    clifford_torus,
    curvature_field,
    fourier_torus,
    gauss_bonnet_characteristic,
    geodesic_sphere,
    great_circle,
    load_grid_surface,
    rotation_torus,
    torus_knot_curve,
    willmore_energy,
)
from .links import (
    CurvePair,
    FourierLoopFamily,
    SearchConfig,
    complement_convexity_check,
    extremal_search,
    gehring_check,
    linking_integral,
    linking_number,
    set_distance,
    write_trajectory_csv,
)
from .sphere import QuadratureGrid
from .tubes import (
    BeyondFocalRadiusWarning,
    TubeSpec,
    focal_radius,
    tube_volume_closed,
    tube_volume_numeric,
    verify_inequality_chain,
)

COMMANDS = (
    "surface-report", "tube-volume", "focal-radius", "verify-chain", "link-distance", "link-number",
    "gehring-search", "convexity-check", "band-width", "verify-all",
)
HALF_PI = math.pi / 2
TWO_PI_SQ = 2 * math.pi**2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = ""
    surface: str | None = None
    pair: str | None = None
    radius: float | None = None
    resolution: int = 64
    grid: int = 256
    seed: int = 42
    tolerance: float = 5e-3
    n_pairs: int = 1000
    set: str = "point"
    trajectory: str | None = None
    format: str = "json"
    out: str | None = None
    determinism: bool = True

    def validate(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise InputError(f"unknown format {self.format!r}")
        if self.resolution < 8 or self.grid < 8:
            raise InputError("resolution and grid must be at least 8")
        if self.radius is not None and not 0 < self.radius < HALF_PI:
            raise InputError(f"radius {self.radius!r} outside (0, pi/2)")
        if self.n_pairs < 1:
            raise InputError("n_pairs must be positive")


@dataclass
class Result:
    name: str
    value: object
    tolerance: float | None
    verdict: str  # pass | fail | info


@dataclass
class Report:
    command: str
    config: dict
    results: list[Result] = field(default_factory=list)
    duration_ms: float = 0.0
    version: str = __version__

    def add(self, name, value, tolerance=None, passed=None):
        if hasattr(value, "item"):
            value = value.item()
        verdict = "info" if passed is None else ("pass" if passed else "fail")
        self.results.append(Result(name, value, tolerance, verdict))

    @property
    def failed(self) -> bool:
        return any(r.verdict == "fail" for r in self.results)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "value", "tolerance", "verdict"])
        for r in self.results:
            w.writerow([r.name, repr(r.value) if isinstance(r.value, float) else r.value,
                        "" if r.tolerance is None else repr(r.tolerance), r.verdict])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        d["results"] = [Result(**r) for r in d["results"]]
        return cls(**d)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


_SURFACES = {
    "clifford": clifford_torus, "clifford_torus": clifford_torus,
    "rotation": rotation_torus, "rotation_torus": rotation_torus,
    "sphere": geodesic_sphere, "geodesic_sphere": geodesic_sphere,
    "fourier": lambda seed, amp: fourier_torus(int(seed), amp),
}
_SURFACES["fourier_torus"] = _SURFACES["fourier"]


def parse_surface(spec: str, degrees: bool = False):
    name, _, rest = spec.partition(":")
    if name in ("grid", "file"):
        if not rest:
            raise InputError("grid surfaces need a path: grid:PATH")
        try:
            return load_grid_surface(rest)
        except OSError as exc:
            raise InputError(f"cannot read {rest}: {exc}") from None
    if name not in _SURFACES:
        raise InputError(f"unknown surface {name!r}")
    try:
        params = [float(x) for x in rest.split(",") if x]
    except ValueError:
        raise InputError(f"bad surface parameters in {spec!r}") from None
    if degrees and name in ("rotation", "rotation_torus", "sphere", "geodesic_sphere") and params:
        params[0] = math.radians(params[0])
    try:
        return _SURFACES[name](*params)
    except TypeError as exc:
        raise InputError(f"bad surface parameters in {spec!r}: {exc}") from None


def parse_pair(spec: str, seed: int) -> tuple[CurvePair, FourierLoopFamily | None]:
    name, _, rest = spec.partition(":")
    try:
        params = [float(x) for x in rest.split(",") if x]
    except ValueError:
        raise InputError(f"bad pair parameters in {spec!r}") from None
    if name == "hopf":
        return CurvePair.hopf(), None
    if name in ("perturbed-hopf", "perturbed_hopf"):
        fam = FourierLoopFamily.perturbed_hopf(params[0] if params else 0.05, 3, seed)
        return fam.pair(), fam
    if name in ("torus-knot", "torus_knot"):
        p, q = (int(x) for x in (params or [2, 3]))
        A = torus_knot_curve(p, q, math.pi / 4)
        B = great_circle(((0, 0, 1, 0), (0, 0, 0, 1)))
        return CurvePair(A, B), FourierLoopFamily.from_curves(A, B, max(p, q), seed)
    raise InputError(f"unknown pair {name!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="spherelab", description="Geometry of curves, surfaces and bands in S^3")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="flat YAML key/value file; flags override its values")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--seed", type=int)
    p.add_argument("--resolution", type=int, help="reach / band / search resolution")
    p.add_argument("--grid", type=int, help="quadrature grid size per direction")
    p.add_argument("--radius", type=float, help="tube or band radius (radians)")
    p.add_argument("--degrees", action="store_true", help="read --radius and angular surface parameters as degrees")
    p.add_argument("--surface", help="clifford | rotation:A | sphere:RHO | fourier:SEED,AMP | grid:PATH")
    p.add_argument("--pair", help="hopf | perturbed-hopf:AMP | torus-knot:P,Q")
    p.add_argument("--set", help="convexity probe set: point | small-circle | hopf-circle")
    p.add_argument("--n-pairs", dest="n_pairs", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--trajectory", help="CSV path for the extremal search trajectory")
    p.add_argument("--no-determinism", dest="determinism", action="store_false", default=None,
                   help="verify-all: skip the second run used for the determinism check")
    return p


_INT_KEYS = {"resolution", "grid", "seed", "n_pairs"}
_FLOAT_KEYS = {"radius", "tolerance"}


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            if isinstance(value, bool) or float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if key in _FLOAT_KEYS:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if key == "determinism":
            if not isinstance(value, bool):
                raise ValueError
            return value
    except (TypeError, ValueError):
        raise InputError(f"config: bad value {value!r} for {key}") from None
    return str(value)


def resolve_config(argv) -> tuple[RunConfig, bool]:
    """Merge the optional YAML file with command-line flags (flags win) and validate."""
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise InputError("config file must be a flat key/value mapping")
        known = {f.name for f in fields(RunConfig)}
        for k, v in loaded.items():
            key = str(k).replace("-", "_")
            if key not in known or isinstance(v, (dict, list)):
                raise InputError(f"config: unknown or non-scalar key {k!r}")
            values[key] = _coerce(key, v)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    values["command"] = args.command
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise InputError(str(exc)) from None
    if args.degrees and cfg.radius is not None:
        cfg.radius = math.radians(cfg.radius)
    cfg.validate()
    return cfg, args.degrees


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _surface_report(cfg, rep, S, degrees):
    g = QuadratureGrid(cfg.grid, cfg.grid)
    cf = curvature_field(S, g)
    A = area(S, g)
    W = willmore_energy(S, g)
    chi = gauss_bonnet_characteristic(S, g)
    rep.add("area", A, 1e-8)
    rep.add("willmore", W, 1e-8)
    rep.add("willmore_minus_area", W - A, 1e-8)
    rep.add("gauss_bonnet_chi", chi, 1e-6)
    rep.add("euler_characteristic", S.euler_characteristic, 0)
    rep.add("k1_min", float(cf.k1.min()), 1e-9)
    rep.add("k1_max", float(cf.k1.max()), 1e-9)
    rep.add("k2_min", float(cf.k2.min()), 1e-9)
    rep.add("k2_max", float(cf.k2.max()), 1e-9)


def _focal_report(cfg, rep, S, degrees):
    fr = focal_radius(S, QuadratureGrid(cfg.grid, cfg.grid), cfg.resolution, cfg.tolerance)
    rep.add("curvature_focal", fr.curvature_focal, 1e-9)
    rep.add("reach_estimate", fr.reach_estimate, fr.tolerance)
    rep.add("focal_radius", fr.focal_radius, fr.tolerance, fr.focal_radius <= HALF_PI + 1e-9)
    if S.topology == "torus":
        rep.add("focal_radius_le_quarter_pi", fr.focal_radius, fr.tolerance, fr.focal_radius <= math.pi / 4 + fr.tolerance)
    rep.add("binding", fr.binding, None)
    spacing = 2 * math.pi / cfg.resolution
    rep.add("argmin_u", fr.argmin[0], spacing)
    rep.add("argmin_v", fr.argmin[1], spacing)
    return fr


def _tube_volume(cfg, rep, S, degrees):
    g = QuadratureGrid(cfg.grid, cfg.grid)
    fr = focal_radius(S, g, cfg.resolution, cfg.tolerance)
    r = cfg.radius if cfg.radius is not None else 0.9 * fr.focal_radius
    spec = TubeSpec(S, r)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BeyondFocalRadiusWarning)
        vol = tube_volume_numeric(spec, g, focal=fr)
    closed = tube_volume_closed(spec, g)
    beyond = r > fr.focal_radius + 1e-9
    rep.add("radius", r, 0.0)
    rep.add("focal_radius", fr.focal_radius, fr.tolerance)
    rep.add("beyond_focal_radius", beyond, None)
    rep.add("volume_numeric", vol, 1e-6 * (1 + abs(vol)))
    rep.add("volume_closed", closed, 1e-6 * (1 + abs(vol)))
    tol = 1e-6 * (1 + abs(vol))
    rep.add("volume_difference", abs(vol - closed), tol, None if beyond else abs(vol - closed) <= tol)
    rep.add("volume_le_sphere", vol, 1e-6, None if beyond else vol <= TWO_PI_SQ + 1e-6)


def _verify_chain(cfg, rep, S, degrees):
    g = QuadratureGrid(cfg.grid, cfg.grid)
    fr = focal_radius(S, g, cfg.resolution, cfg.tolerance)
    r = cfg.radius if cfg.radius is not None else fr.focal_radius
    chain = verify_inequality_chain(S, r, g, focal=fr)
    rep.add("radius", r, 0.0)
    rep.add("focal_radius", fr.focal_radius, fr.tolerance)
    rep.add("vacuous", chain.vacuous, None)
    for e in chain.entries:
        key = "chain." + re.sub(r"[^0-9A-Za-z^]+", "_", e.name).strip("_")
        rep.add(f"{key}.lhs", e.lhs, 1e-6)
        rep.add(f"{key}.rhs", e.rhs, 1e-6)
        rep.add(f"{key}.slack", e.slack, 1e-6, e.holds if e.applicable and not chain.vacuous else None)


def _band_width(cfg, rep, S, degrees):
    fr = focal_radius(S, QuadratureGrid(min(cfg.grid, 128), min(cfg.grid, 128)), 64, cfg.tolerance)
    r = cfg.radius if cfg.radius is not None else 0.7
    try:
        band = build_tube_band(S, r, fr)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    bw = band_width(band, cfg.resolution)
    rep.add("r", bw.r, 0.0)
    rep.add("resolution", bw.resolution, None)
    rep.add("n_t", bw.n_t, None)
    rep.add("width", bw.width, bw.error_bound, bw.width <= HALF_PI * 1.02)
    rep.add("error_bound", bw.error_bound, None)
    rep.add("width_minus_2r", bw.width - 2 * bw.r, bw.error_bound)


def _pair_distance(cfg, rep, pair):
    d = set_distance(pair.A, pair.B, refine=True)
    rep.add("distance", d, 1e-10)
    return d


def _probe_set(cfg):
    name = cfg.set.replace("_", "-")
    if name == "point":
        A, r = [[1.0, 0, 0, 0]], cfg.radius or 3 * math.pi / 5
    elif name == "small-circle":
        A, r = small_circle(np.array([1.0, 0, 0, 0]), 0.3).samples(100), cfg.radius or 0.52 * math.pi
    elif name == "hopf-circle":
        A, r = CurvePair.hopf().A.samples(256), cfg.radius or 0.55 * math.pi
    else:
        raise InputError(f"unknown probe set {cfg.set!r}")
    return A, r


DEFAULT_PAIRS = {"gehring-search": "perturbed-hopf:0.1"}


def execute(cfg: RunConfig, degrees: bool = False) -> Report:
    """Run one command and collect its report (duration left at zero)."""
    cmd = cfg.command
    extra_chain = cmd == "verify-all" and (cfg.surface is not None or cfg.radius is not None)
    cfg = replace(cfg, surface=cfg.surface or "clifford", pair=cfg.pair or DEFAULT_PAIRS.get(cmd, "hopf"))
    rep = Report(cmd, {k: v for k, v in sorted(asdict(cfg).items()) if k != "out"})
    if cmd in ("surface-report", "tube-volume", "focal-radius", "verify-chain", "band-width"):
        S = parse_surface(cfg.surface, degrees)
        {"surface-report": _surface_report, "tube-volume": _tube_volume, "focal-radius": _focal_report,
         "verify-chain": _verify_chain, "band-width": _band_width}[cmd](cfg, rep, S, degrees)
    elif cmd == "link-distance":
        pair, _ = parse_pair(cfg.pair, cfg.seed)
        _pair_distance(cfg, rep, pair)
    elif cmd == "link-number":
        pair, _ = parse_pair(cfg.pair, cfg.seed)
        g = gehring_check(pair)
        rep.add("linking_integral", linking_integral(pair), 0.1)
        rep.add("linking_number", linking_number(pair), 0)
        rep.add("distance", g.distance, 1e-10)
        rep.add("gehring_bound", g.bound_satisfied, 1e-6, g.bound_satisfied)
    elif cmd == "gehring-search":
        pair, fam = parse_pair(cfg.pair, cfg.seed)
        if fam is None:
            fam = FourierLoopFamily.from_curves(pair.A, pair.B, 3, cfg.seed)
        res = extremal_search(fam, SearchConfig(K=fam.K, seed=cfg.seed))
        if cfg.trajectory:
            write_trajectory_csv(cfg.trajectory, res.trajectory)
        rep.add("betas", list(res.config.betas), None)
        rep.add("iterations", res.trajectory[-1].iteration, None)
        rep.add("start_distance", res.trajectory[0].distance, 1e-10)
        rep.add("best_distance", res.best_distance, 1e-10, res.best_distance <= HALF_PI + 1e-6)
        rep.add("linking", res.trajectory[-1].linking, 0)
    elif cmd == "convexity-check":
        A, r = _probe_set(cfg)
        c = complement_convexity_check(A, r, cfg.n_pairs, cfg.seed)
        rep.add("r", r, 0.0)
        rep.add("empty", c.empty, None)
        rep.add("pairs", c.n_pairs, None)
        rep.add("violations", c.violations, 0, c.violations == 0)
        rep.add("worst_margin", c.worst_slack if math.isfinite(c.worst_slack) else None, 1e-6)
    elif cmd == "verify-all":
        _verify_all(cfg, rep, degrees, extra_chain)
    return rep


def _suite_results(cfg):
    suite = Suite(SuiteConfig(seed=cfg.seed, grid=cfg.grid, reach_resolution=cfg.resolution, n_probe_pairs=cfg.n_pairs))
    out = []
    for crit in suite.run():
        out.append(Result(f"C{crit.number} {crit.title}", crit.passed, None, "pass" if crit.passed else "fail"))
        for c in crit.checks:
            out.append(Result(f"C{crit.number}.{c.name}", c.value, c.tolerance, c.verdict))
    return out


def _verify_all(cfg, rep, degrees, extra_chain):
    results = _suite_results(cfg)
    rep.results.extend(results)
    if cfg.determinism:
        again = _suite_results(cfg)
        same = json.dumps([asdict(r) for r in results]) == json.dumps([asdict(r) for r in again])
        rep.add("C11 determinism", same, None, same)
    if extra_chain:
        S = parse_surface(cfg.surface, degrees)
        g = QuadratureGrid(min(cfg.grid, 128), min(cfg.grid, 128))
        fr = focal_radius(S, g, cfg.resolution, cfg.tolerance)
        r = cfg.radius if cfg.radius is not None else fr.focal_radius
        if S.topology == "torus":
            chain = verify_inequality_chain(S, r, g, focal=fr)
            rep.add("configured chain vacuous", chain.vacuous, None)
            rep.add("configured chain", chain.passed, 1e-6, chain.passed)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(argv=None) -> int:
    """Parse arguments, dispatch, write the report; returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg, degrees = resolve_config(argv)
    except InputError as exc:
        print(f"spherelab: error: {exc}", file=sys.stderr)
        return 1
    start = time.perf_counter()
    try:
        rep = execute(cfg, degrees)
    except (InputError, GridFormatError, ValueError) as exc:
        print(f"spherelab: error: {exc}", file=sys.stderr)
        return 1
    rep.duration_ms = round((time.perf_counter() - start) * 1000, 3)
    text = rep.to_json() if cfg.format == "json" else rep.to_csv()
    if cfg.out:
        try:
            write_atomic(cfg.out, text)
        except OSError as exc:
            print(f"spherelab: error: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 2 if rep.failed else 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
