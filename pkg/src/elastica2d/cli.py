"""``elastica2d`` command-line tool.

    elastica2d <weierstrass|solve|annulus|meshgen|verify> --config FILE
               [--out DIR] [--lambda X] [--refine N] [--seed N]

Exit codes: 0 success, 1 usage or config error, 2 numerical failure
(module error or a failed in-process cross-check).
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
import time
import warnings
from dataclasses import fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .annulus import (
    Curve,
    StripFamily,
    annulus_map,
    annulus_residual,
    solve_annulus_params,
    strip_map,
    traction_residual,
)
from .complex_analytic import AnalyticExpr, Monomial, wirtinger_fd
from .config import (
    ConfigError,
    as_complex,
    as_float,
    as_half_integer,
    as_int,
    json_dumps,
    lam_of,
    load_config,
    parse_datum_fields,
    parse_mesh_shape,
    record,
)
from .elasticity import (
    PotentialV,
    analytic_stability,
    energy_and_gradient,
    energy_area_identity,
    rigid_fit,
    wirtinger_fields,
)
from .errors import Elastica2DError
from .mesh import (
    DeformedState,
    TriangleMesh,
    annulus_mesh,
    circle_projector,
    disk_mesh,
    format_mesh,
    format_state,
    load_mesh,
    parse_mesh,
    rectangle_mesh,
    subdivide,
)
from .solver import Constraints, SolverConfig, linear_blend, minimize, ramp_solve, smooth_perturbation
from .svg import curves_figure, mesh_figure
from .weierstrass import (
    WeierstrassDatum,
    arg_laplacian,
    build_elastic_map,
    compensating_k,
    g_of,
    melting_defect,
    special_map,
)

log = logging.getLogger("elastica2d")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
G_TOL = 1e-9
TRACTION_TOL = 1e-10
RIGID_TOL = 1e-6


class CheckFailed(Exception):
    """An in-process cross-check did not hold (exit code 2)."""


def _fmt(x: float) -> str:
    return repr(float(x))


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    p = out / name
    p.write_text(text)
    return p


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _build_mesh(spec: dict, refine: int) -> TriangleMesh:
    shape = spec["shape"]
    if shape == "disk":
        mesh = disk_mesh(spec["radius"], spec["resolution"], spec["center"])
        project = circle_projector([spec["radius"]], spec["center"])
    elif shape == "rectangle":
        mesh = rectangle_mesh(spec["width"], spec["height"], spec["nx"], spec["ny"], spec["origin"])
        project = None
    else:
        mesh = annulus_mesh(spec["r1"], spec["r2"], spec["resolution"], spec["layers"])
        project = circle_projector([spec["r1"], spec["r2"]])
    for _ in range(refine):
        mesh = subdivide(mesh, project)
    return mesh


def _datum(rec: dict, lam: float, where: str = "") -> WeierstrassDatum:
    h, zeros = parse_datum_fields(rec, where)
    return WeierstrassDatum(h, lam, zeros)


# -- weierstrass ------------------------------------------------------------

def _region(spec, where="region"):
    rec = record(spec, where, required=("shape",), optional=("radius", "center", "x", "y", "grid", "lines"))
    out = {"grid": as_int(rec.get("grid", 41), f"{where}.grid", 2),
           "lines": as_int(rec.get("lines", 16), f"{where}.lines", 2)}
    if rec["shape"] == "disk":
        if "x" in rec or "y" in rec:
            raise ConfigError(f"{where}: x/y only apply to rect regions")
        out["radius"] = as_float(rec.get("radius", 1.0), f"{where}.radius", positive=True)
        c = as_complex(rec.get("center", 0), f"{where}.center")
        out["box"] = (c.real - out["radius"], c.real + out["radius"], c.imag - out["radius"], c.imag + out["radius"])
        out["inside"] = lambda z: np.abs(z - c) <= out["radius"] * (1 + 1e-12)
    elif rec["shape"] == "rect":
        if "radius" in rec or "center" in rec:
            raise ConfigError(f"{where}: radius/center only apply to disk regions")
        xs = [as_float(v, f"{where}.x") for v in rec.get("x", [-1, 1])]
        ys = [as_float(v, f"{where}.y") for v in rec.get("y", [-1, 1])]
        if len(xs) != 2 or len(ys) != 2 or not (xs[0] < xs[1] and ys[0] < ys[1]):
            raise ConfigError(f"{where}: x and y must be increasing pairs")
        out["box"] = (xs[0], xs[1], ys[0], ys[1])
        out["inside"] = lambda z: np.ones(np.shape(z), dtype=bool)
    else:
        raise ConfigError(f"{where}.shape: expected 'disk' or 'rect'")
    return out


def _grid_lines(region, n_samples=241):
    x0, x1, y0, y1 = region["box"]
    t = np.linspace(0.0, 1.0, n_samples)
    lines = []
    for s in np.linspace(0.0, 1.0, region["lines"] + 1):
        lines.append(x0 + s * (x1 - x0) + 1j * (y0 + t * (y1 - y0)))
        lines.append(x0 + t * (x1 - x0) + 1j * (y0 + s * (y1 - y0)))
    out = []
    for z in lines:
        z = z.astype(complex)
        z[~region["inside"](z)] = np.nan
        out.append(z)
    return out


def _k_text(k, lam) -> str:
    lines = [f"# k(z) = {k.k}", f"# lambda = {_fmt(lam)}", f"# poles {len(k.pole_centers)}"]
    for p in k.pole_centers:
        order = max(-t.power for t in k.k.terms if isinstance(t, Monomial) and t.center == p)
        lines.append(f"pole {_fmt(p.real)} {_fmt(p.imag)} order {order}")
    for t in k.k.terms:
        lines.append(f"term {_fmt(t.coeff.real)} {_fmt(t.coeff.imag)} {t.power} "
                     f"{_fmt(t.center.real)} {_fmt(t.center.imag)}")
    return "\n".join(lines) + "\n"


def cmd_weierstrass(cfg: dict, args) -> int:
    rec = record(cfg, "config", required=("h",), optional=("lambda", "zeros", "region", "seed"))
    lam = lam_of(rec, args.lam)
    region = _region(rec.get("region", {"shape": "disk", "radius": 1.0}))
    datum = _datum(rec, lam)
    k = compensating_k(datum)
    fmap = build_elastic_map(datum, k)
    out = Path(args.out)
    _write(out, "k.txt", _k_text(k, lam))

    x0, x1, y0, y1 = region["box"]
    gx = np.linspace(x0, x1, region["grid"])
    gy = np.linspace(y0, y1, region["grid"])
    Z = (gx[None, :] + 1j * gy[:, None]).ravel()
    Z = Z[region["inside"](Z)]
    f, fz, fzb = fmap.f(Z), fmap.fz(Z), fmap.fzbar(Z)
    g = g_of(fmap, Z)
    ref = 0.5 * (1 + lam) * fmap.h(Z) ** 2
    V = PotentialV.lambda_(lam)
    s = 1 + V.d1(np.abs(fz) ** 2)
    rows = [(z.real, z.imag, w.real, w.imag, abs(a), abs(b), q.real, q.imag, si)
            for z, w, a, b, q, si in zip(Z, f, fz, fzb, g, s)]
    _write(out, "samples.csv", _csv(["re_z", "im_z", "re_f", "im_f", "abs_fz", "abs_fzbar",
                                     "re_g", "im_g", "s"], rows))

    ref_lines = _grid_lines(region)
    img_lines = []
    for z in ref_lines:
        w = np.full(z.shape, np.nan, dtype=complex)
        ok = np.isfinite(z)
        if ok.any():
            w[ok] = fmap.f(z[ok])
        img_lines.append(w)
    dots = [fmap.f(complex(p)) for p, _ in datum.zeros if region["inside"](np.array([p]))[0]]
    _write(out, "figure.svg", curves_figure(ref_lines, img_lines, dots=dots, title="Weierstrass map"))

    # g has no value at the branch points themselves
    keep = ~np.asarray(fmap.is_branch(Z), dtype=bool)
    err = float(np.max(np.abs(g - ref)[keep] / (1 + np.abs(g[keep])))) if keep.any() else 0.0
    print(f"samples: {len(Z)}  poles of k: {len(k.pole_centers)}  max g residual: {err:.3e}")
    if not err < G_TOL:
        raise CheckFailed(f"g differs from (1+lambda)/2 h^2 by {err:.3e}")
    return EXIT_OK


# -- solve ------------------------------------------------------------------

def _select(spec, mesh: TriangleMesh, where: str) -> np.ndarray:
    if spec == "boundary":
        return np.asarray(mesh.boundary, dtype=int)
    if spec == "all":
        return np.arange(mesh.n_vertices)
    rec = record(spec, where, optional=("indices", "halfplane", "boundary_only"))
    if ("indices" in rec) == ("halfplane" in rec):
        raise ConfigError(f"{where}: give exactly one of indices, halfplane")
    if "indices" in rec:
        idx = rec["indices"]
        if not isinstance(idx, list):
            raise ConfigError(f"{where}.indices: expected a list")
        out = np.array([as_int(i, f"{where}.indices", 0) for i in idx], dtype=int)
        if out.size and out.max() >= mesh.n_vertices:
            raise ConfigError(f"{where}.indices: index out of range")
    else:
        hp = record(rec["halfplane"], f"{where}.halfplane", required=("normal", "offset"))
        n = as_complex(hp["normal"], f"{where}.halfplane.normal")
        if n == 0:
            raise ConfigError(f"{where}.halfplane.normal: must be nonzero")
        c = as_float(hp["offset"], f"{where}.halfplane.offset")
        z = mesh.vertices
        tol = 1e-9 * mesh.diameter * abs(n)
        out = np.nonzero(n.real * z.real + n.imag * z.imag <= c + tol)[0]
    if rec.get("boundary_only", False):
        out = np.intersect1d(out, mesh.boundary)
    return np.unique(out)


def _transform(spec, lam: float, where: str):
    """Returns ``(fn, oracle_map or None)``."""
    if spec == "identity":
        return (lambda z: np.asarray(z, dtype=complex)), None
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError(f"{where}: expected 'identity', {{'affine': ..}} or {{'weierstrass': ..}}")
    (kind, body), = spec.items()
    if kind == "affine":
        rec = record(body, f"{where}.affine", optional=("rotate_deg", "about", "scale", "translate"))
        ang = math.radians(as_float(rec.get("rotate_deg", 0.0), f"{where}.affine.rotate_deg"))
        about = as_complex(rec.get("about", 0), f"{where}.affine.about")
        scale = as_float(rec.get("scale", 1.0), f"{where}.affine.scale", positive=True)
        shift = as_complex(rec.get("translate", 0), f"{where}.affine.translate")
        r = scale * complex(math.cos(ang), math.sin(ang))
        return (lambda z: about + r * (np.asarray(z, dtype=complex) - about) + shift), None
    if kind == "weierstrass":
        rec = record(body, f"{where}.weierstrass", required=("h",), optional=("zeros",))
        datum = _datum(rec, lam, f"{where}.weierstrass")
        fmap = build_elastic_map(datum, compensating_k(datum))
        return fmap.f, fmap
    raise ConfigError(f"{where}: unknown transform {kind!r}")


def _solver_config(spec, where="solver") -> SolverConfig:
    names = [f.name for f in fields(SolverConfig)]
    rec = record(spec, where, optional=names)
    kw = {}
    for name in names:
        if name in rec:
            if name in ("max_iters", "history", "ramp_steps"):
                kw[name] = as_int(rec[name], f"{where}.{name}", 1)
            else:
                kw[name] = as_float(rec[name], f"{where}.{name}", positive=True)
    try:
        return SolverConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def cmd_solve(cfg: dict, args) -> int:
    rec = record(cfg, "config", required=("mesh",),
                 optional=("lambda", "pins", "init", "perturb", "seed", "solver"))
    lam = lam_of(rec, args.lam)
    refine = args.refine or 0
    if isinstance(rec["mesh"], str):
        path = Path(rec["mesh"])
        if not path.is_absolute():
            path = Path(args.config).parent / path
        try:
            mesh = load_mesh(path)
        except OSError as exc:
            raise ConfigError(f"cannot read mesh {path}: {exc.strerror}") from exc
        for _ in range(refine):
            mesh = subdivide(mesh)
    else:
        mesh = _build_mesh(parse_mesh_shape(rec["mesh"], "mesh"), refine)
    scfg = _solver_config(rec.get("solver", {}))

    pins, oracle = {}, None
    pin_specs = rec.get("pins", [])
    if not isinstance(pin_specs, list):
        raise ConfigError("pins: expected a list")
    for i, p in enumerate(pin_specs):
        w = f"pins[{i}]"
        pr = record(p, w, required=("select",), optional=("transform",))
        idx = _select(pr["select"], mesh, f"{w}.select")
        fn, om = _transform(pr.get("transform", "identity"), lam, f"{w}.transform")
        oracle = om or oracle
        vals = np.atleast_1d(fn(mesh.vertices[idx]))
        pins.update(zip(idx.tolist(), vals.tolist()))

    init = rec.get("init", "identity")
    if init not in ("identity", "blend"):
        raise ConfigError("init: expected 'identity' or 'blend'")
    pos = linear_blend(mesh, pins) if init == "blend" else mesh.vertices.copy()
    seed = None
    if "perturb" in rec:
        pr = record(rec["perturb"], "perturb", required=("amplitude",), optional=("modes",))
        amp = as_float(pr["amplitude"], "perturb.amplitude", nonneg=True)
        modes = as_int(pr.get("modes", 4), "perturb.modes", 1)
        seed = args.seed if args.seed is not None else rec.get("seed")
        if seed is None:
            raise ConfigError("seed is required for perturbation runs")
        seed = as_int(seed, "seed", 0)
        pos = pos + smooth_perturbation(mesh, amp, modes, np.random.default_rng(seed))

    V = PotentialV.lambda_(lam)
    cons = Constraints(pins)
    out = Path(args.out)
    t0 = time.perf_counter()
    if pins:
        state, rep = ramp_solve(mesh, cons, V, scfg, DeformedState(pos))[-1]
    else:
        state, rep = minimize(mesh, DeformedState(pos), cons, V, scfg)
    elapsed = time.perf_counter() - t0

    report = rep.as_dict()
    report.update({"lambda": lam, "n_vertices": mesh.n_vertices, "n_triangles": mesh.n_triangles,
                   "n_pinned": len(pins), "ramp_steps": scfg.ramp_steps, "refine": refine,
                   "energy_per_area": rep.final_energy / mesh.area})
    if seed is not None:
        report["seed"] = seed
    if oracle is not None and len(mesh.interior):
        err = np.abs(state.positions - oracle.f(mesh.vertices))[mesh.interior]
        zb = mesh.vertices[mesh.boundary]
        radius = float(np.max(np.abs(zb - mesh.vertices.mean())))
        report["max_interior_error"] = float(err.max()) / radius
        print(f"max interior deviation from analytic map: {report['max_interior_error']:.6e} (domain radius units)")
    if not pins:
        _, _, resid = rigid_fit(mesh, state)
        fz, fzb = wirtinger_fields(mesh, state)
        report["rigid_residual"] = resid
        report["max_abs_fz_minus_1"] = float(np.max(np.abs(np.abs(fz) - 1)))
        report["max_abs_fzbar"] = float(np.max(np.abs(fzb)))
        report["rigid_motion"] = bool(resid < RIGID_TOL)
    stab = rep.stability
    report["triangles"] = [{"index": t, "abs_fz": float(stab.fz_abs[t]), "s": float(stab.s[t]),
                            "class": str(stab.flags[t])} for t in range(mesh.n_triangles)]
    _write(out, "state.txt", format_state(state))
    _write(out, "report.json", json_dumps(report))
    dots = [state.positions[v] for v in sorted(rep.winding)]
    cen = state.positions[mesh.triangles].mean(axis=1)
    dots += [cen[t] for t in stab.branch_triangles]
    _write(out, "figure.svg", mesh_figure(mesh, state.positions, stab.flags, dots, title="deformed mesh"))
    print(f"E = {rep.final_energy:.6e}  iters = {rep.iters}  converged = {rep.converged}  "
          f"branch vertices = {len(rep.winding)}  ({elapsed:.2f}s)")
    if not rep.converged:
        raise CheckFailed(f"solver stopped after {rep.iters} iterations with grad norm {rep.grad_norm:.3e}")
    return EXIT_OK


# -- annulus ----------------------------------------------------------------

def cmd_annulus(cfg: dict, args) -> int:
    family = cfg.get("family", "annulus")
    lam = lam_of(cfg, args.lam)
    out = Path(args.out)
    V = PotentialV.lambda_(lam)
    refine = args.refine or 0
    if family == "annulus":
        rec = record(cfg, "config", required=("r1", "r2", "n"),
                     optional=("family", "lambda", "resolution", "samples"))
        r1 = as_float(rec["r1"], "r1", positive=True)
        r2 = as_float(rec["r2"], "r2", positive=True)
        if r1 > r2:
            raise ConfigError("require r1 < r2")
        n = as_half_integer(rec["n"], "n")
        res = as_int(rec.get("resolution", 48), "resolution", 3)
        samples = as_int(rec.get("samples", 256), "samples", 4)
        fam = solve_annulus_params(r1, r2, n, lam)
        fmap = annulus_map(fam, warn=False)
        rr = np.linspace(r1, r2, 4001)
        hole = float(np.min(np.abs(fam.profile(rr))))
        params = [("family", "annulus"), ("n", str(n)), ("lambda", _fmt(lam)), ("r1", _fmt(r1)),
                  ("r2", _fmt(r2)), ("c", _fmt(fam.c)), ("c2", _fmt(fam.c**2)), ("alpha", _fmt(fam.alpha)),
                  ("winding", str(fam.winding)), ("hole_radius", _fmt(hole)),
                  ("residual_r1", _fmt(annulus_residual(fam, r1))),
                  ("residual_r2", _fmt(annulus_residual(fam, r2)))]
        curves = [("inner", Curve.circle(r1)), ("outer", Curve.circle(r2))]
        mesh = annulus_mesh(r1, r2, res)
        for _ in range(refine):
            mesh = subdivide(mesh, circle_projector([r1, r2]))
    elif family == "strip":
        rec = record(cfg, "config", required=("n",),
                     optional=("family", "lambda", "c", "alpha", "x1", "x2", "resolution", "samples"))
        n = as_int(rec["n"], "n", 1)
        res = as_int(rec.get("resolution", 48), "resolution", 3)
        samples = as_int(rec.get("samples", 256), "samples", 4)
        if "c" in rec:
            if "x1" in rec or "x2" in rec:
                raise ConfigError("give either c (and alpha) or x1 and x2, not both")
            c = as_float(rec["c"], "c", positive=True)
            if "alpha" not in rec:
                raise ConfigError("strip with c requires alpha")
            fam = StripFamily.from_coefficients(n, c, as_float(rec["alpha"], "alpha"), lam)
        elif "x1" in rec and "x2" in rec:
            x1, x2 = as_float(rec["x1"], "x1"), as_float(rec["x2"], "x2")
            if not x1 < x2:
                raise ConfigError("require x1 < x2")
            fam = StripFamily.from_domain(n, x1, x2, lam)
        else:
            raise ConfigError("strip needs c and alpha, or x1 and x2")
        fmap = strip_map(fam)
        params = [("family", "strip"), ("n", str(n)), ("lambda", _fmt(lam)), ("c", _fmt(fam.c)),
                  ("alpha", _fmt(fam.alpha)), ("b", _fmt(fam.b)), ("x1", _fmt(fam.x1)), ("x2", _fmt(fam.x2)),
                  ("exp_x1", _fmt(math.exp(fam.x1))), ("exp_x2", _fmt(math.exp(fam.x2))),
                  ("winding", str(n)),
                  ("hole_radius", _fmt(float(np.min(np.abs(fam.radius(np.linspace(fam.x1, fam.x2, 4001)))))))]
        curves = [("left", Curve.vertical(fam.x1)), ("right", Curve.vertical(fam.x2))]
        ny = max(3, res)
        nx = max(1, round(ny * (fam.x2 - fam.x1) / (2 * math.pi)))
        mesh = rectangle_mesh(fam.x2 - fam.x1, 2 * math.pi, nx, ny, fam.x1)
        for _ in range(refine):
            mesh = subdivide(mesh)
    else:
        raise ConfigError("family: expected 'annulus' or 'strip'")

    rows, worst = [], 0.0
    for name, curve in curves:
        t = np.linspace(curve.t0, curve.t1, samples, endpoint=False)
        z = curve.point(t)
        gp = curve.tangent(t)
        fz, fzb = np.asarray(fmap.fz(z)), np.asarray(fmap.fzbar(z))
        res_v = np.abs(lam * (1 - 1 / np.abs(fz)) * fz * gp - fzb * np.conj(gp))
        worst = max(worst, traction_residual(fmap, curve, lam, samples))
        rows += [(name, ti, zi.real, zi.imag, ri) for ti, zi, ri in zip(t, z, res_v)]
    params.append(("max_traction_residual", _fmt(worst)))
    _write(out, "params.txt", "".join(f"{k} {v}\n" for k, v in params))
    _write(out, "traction.csv", _csv(["boundary", "t", "re_z", "im_z", "residual"], rows))
    stab = analytic_stability(mesh, fmap.fz, V)
    _write(out, "figure.svg", mesh_figure(mesh, fmap.f(mesh.vertices), stab.flags,
                                          title=f"{family} family, winding {dict(params)['winding']}"))
    summary = dict(params)
    print(f"c = {summary['c']}  alpha = {summary['alpha']}  winding = {summary['winding']}  "
          f"max traction residual = {worst:.3e}")
    if not worst < TRACTION_TOL:
        raise CheckFailed(f"traction residual {worst:.3e} exceeds {TRACTION_TOL}")
    return EXIT_OK


# -- meshgen ----------------------------------------------------------------

def cmd_meshgen(cfg: dict, args) -> int:
    spec = parse_mesh_shape(cfg, "config", extra=("output",))
    name = cfg.get("output", "mesh.txt")
    if not isinstance(name, str) or not name or Path(name).name != name:
        raise ConfigError("output: expected a plain file name")
    mesh = _build_mesh(spec, args.refine or 0)
    text = format_mesh(mesh)
    reloaded = parse_mesh(text)
    if reloaded.n_triangles != mesh.n_triangles or not np.all(reloaded.areas > 0):
        raise CheckFailed("written mesh does not reload cleanly")
    _write(Path(args.out), name, text)
    loops = reloaded.boundary_loops()
    print(f"vertices {mesh.n_vertices}  triangles {mesh.n_triangles}  boundary vertices {len(mesh.boundary)}  "
          f"boundary loops {len(loops)}  euler {mesh.euler_characteristic()}")
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _check_weierstrass(rng, lam):
    h = AnalyticExpr.polynomial([-1, 0, 0, 0, 1])
    datum = WeierstrassDatum(h, 1.0, [(1, 1), (-1, 1), (1j, 1), (-1j, 1)])
    k = compensating_k(datum)
    coeff_err = max(abs(t.coeff - 0.1) for t in k.k.terms) if len(k.k.terms) == 4 else math.inf
    d2 = WeierstrassDatum(AnalyticExpr.from_roots([(0.3 + 0.2j, 1), (-0.5j, 2)], 1.5), lam,
                          [(0.3 + 0.2j, 1), (-0.5j, 2)])
    fmap = build_elastic_map(d2, compensating_k(d2))
    z = rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)
    g = g_of(fmap, z)
    gerr = float(np.max(np.abs(g - 0.5 * (1 + lam) * d2.h(z) ** 2) / (1 + np.abs(g))))
    return {"k_coefficient_error": coeff_err, "g_identity_error": gerr,
            "pass": coeff_err < 1e-12 and gerr < G_TOL}


def _check_odd_zero(rng, lam):
    fmap = special_map("odd_zero", 1.0)
    x = np.linspace(-0.8, 0.8, 21)
    z = (x[None, :] + 1j * x[:, None]).ravel()
    z = z[np.abs(z) <= 0.8]
    fz, _ = wirtinger_fd(fmap.f, z)
    g = 2 * fz - fz / np.abs(fz)
    err = float(np.max(np.abs(g - (z**2 + 1))))
    return {"g_error": err, "pass": err < 1e-7}


def _check_annulus(rng, lam):
    fam = solve_annulus_params(1, 2, 1, 1.0)
    fmap = annulus_map(fam)
    tr = max(traction_residual(fmap, Curve.circle(1), 1.0), traction_residual(fmap, Curve.circle(2), 1.0))
    perr = max(abs(fam.c**2 - 5 / 14), abs(fam.alpha + 4 / 21))
    return {"param_error": perr, "traction": tr, "pass": perr < 1e-12 and tr < TRACTION_TOL}


def _check_strip(rng, lam):
    fam = StripFamily.from_coefficients(1, 1.0, -15 / 32, 1.0)
    err = max(abs(math.exp(fam.x1) - 0.75), abs(math.exp(fam.x2) - 1.25))
    fmap = strip_map(fam)
    tr = max(traction_residual(fmap, Curve.vertical(fam.x1), 1.0),
             traction_residual(fmap, Curve.vertical(fam.x2), 1.0))
    return {"domain_error": err, "traction": tr, "pass": err < 1e-12 and tr < TRACTION_TOL}


def _random_state(mesh, rng, amp=0.2):
    return mesh.vertices * complex(*rng.normal(1, 0.3, 2)) + amp * (
        rng.normal(size=mesh.n_vertices) + 1j * rng.normal(size=mesh.n_vertices))


def _check_gradient(rng, lam):
    mesh = disk_mesh(1.0, 12)
    V = PotentialV.lambda_(lam)
    pos = _random_state(mesh, rng)
    _, g = energy_and_gradient(mesh, pos, V)
    h = 1e-6
    worst = 0.0
    for i in rng.choice(mesh.n_vertices, 8, replace=False):
        for d in (1, 1j):
            p, m = pos.copy(), pos.copy()
            p[i] += h * d
            m[i] -= h * d
            fd = (energy_and_gradient(mesh, p, V, False)[0] - energy_and_gradient(mesh, m, V, False)[0]) / (2 * h)
            an = g[i].real if d == 1 else g[i].imag
            worst = max(worst, abs(fd - an) / max(abs(an), 1e-8))
    return {"max_relative_error": worst, "pass": worst < 1e-5}


def _check_energy_area(rng, lam):
    mesh = disk_mesh(1.0, 12)
    V = PotentialV.lambda_(lam)
    worst = 0.0
    for _ in range(5):
        lhs, rhs = energy_area_identity(mesh, _random_state(mesh, rng), V)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    return {"max_relative_error": worst, "pass": worst < 1e-10}


def _check_melting(rng, lam):
    fmap = special_map("melting", lam)
    z = (0.3 + rng.uniform(0, 1, 50)) * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
    defect = float(np.max(np.abs(melting_defect(fmap, z))))
    lap = arg_laplacian(fmap, z)
    border = special_map("borderline", lam, H=AnalyticExpr.polynomial([0, 0, 0.5]))
    lap_b = arg_laplacian(border, z)
    ok = defect < 1e-10 and np.all(np.abs(lap - 4) < 1e-3) and np.all(np.abs(lap_b) < 1e-3)
    return {"modulus_defect": defect, "laplacian_melting_max_dev": float(np.max(np.abs(lap - 4))),
            "laplacian_borderline_max": float(np.max(np.abs(lap_b))), "pass": bool(ok)}


CHECKS = {
    "weierstrass": _check_weierstrass,
    "odd_zero": _check_odd_zero,
    "annulus": _check_annulus,
    "strip": _check_strip,
    "gradient": _check_gradient,
    "energy_area": _check_energy_area,
    "melting": _check_melting,
}


def cmd_verify(cfg: dict, args) -> int:
    rec = record(cfg, "config", optional=("checks", "seed", "lambda"))
    names = rec.get("checks", list(CHECKS))
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ConfigError("checks: expected a list of names")
    bad = [n for n in names if n not in CHECKS]
    if bad:
        raise ConfigError(f"checks: unknown {', '.join(bad)}; choose from {', '.join(CHECKS)}")
    seed = as_int(args.seed if args.seed is not None else rec.get("seed", 0), "seed", 0)
    lam = lam_of(rec, args.lam)
    results = {}
    for name in names:
        results[name] = CHECKS[name](np.random.default_rng(seed), lam)
        print(f"{'PASS' if results[name]['pass'] else 'FAIL'}  {name}")
    _write(Path(args.out), "verify.json", json_dumps({"seed": seed, "lambda": lam, "results": results}))
    failed = [n for n, r in results.items() if not r["pass"]]
    if failed:
        raise CheckFailed(f"failed checks: {', '.join(failed)}")
    return EXIT_OK


COMMANDS = {
    "weierstrass": cmd_weierstrass,
    "solve": cmd_solve,
    "annulus": cmd_annulus,
    "meshgen": cmd_meshgen,
    "verify": cmd_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elastica2d", description="Elastic maps of planar domains: closed forms and discrete solves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="override lambda")
    p.add_argument("--refine", type=int, default=None, help="uniform mesh subdivisions")
    p.add_argument("--seed", type=int, default=None, help="override the random seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.refine is not None and args.refine < 0:
            raise ConfigError("--refine must be nonnegative")
        if args.lam is not None and not (math.isfinite(args.lam) and args.lam > 0):
            raise ConfigError("--lambda must be positive")
        cfg = load_config(args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except Elastica2DError as exc:
        step = getattr(exc, "step", None)
        where = f" at ramp step {step}" if step else ""
        print(f"{type(exc).__name__}{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
