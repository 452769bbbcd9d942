"""Config-driven pipeline: mesh, solve, symmetrize, verify, report.

Subcommands: run (single case), convergence (refinement study), mesh
(generate and export only), selftest (deterministic suite over the bundled
configs plus quick property checks).  Exit codes: 0 all checks hold, 1
error, 2 at least one check violated.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import plots
from .compare import (CheckEntry, ComparisonReport, default_tolerance,
                      verify_L1, verify_isoperimetric, verify_level_inequality,
                      verify_min_comparison, verify_pointwise)
from .fem import ScalarField, field_stats, integrate_product, solve_poisson_robin
from .geometry import Manifold, inverse_ball_area
from .mesh import (AnnularSector, BoundaryField, ConeDisk, Disk, Ellipse,
                   GeodesicPolygon, Polygon, SphericalCap, build_mesh,
                   export_mesh, refine)
from .radial import beta_bar, radial_distribution, solve_radial
from .rearrange import (ExactDistribution, default_levels, distribution_function,
                        hardy_littlewood_check, rearranged_profile,
                        schwarz_profile)

ALL_CHECKS = ("l1", "pointwise", "boundary_min", "isoperimetric",
              "level_inequality")


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key path."""


# ---------------------------------------------------------------------------
# config parsing


def _need(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigError(f"{path}.{key}: missing required key")
    return obj[key]


def _num(obj: dict, key: str, path: str, default=None, positive=False):
    if key not in obj:
        if default is not None:
            return default
        raise ConfigError(f"{path}.{key}: missing required key")
    v = obj[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key}: must be positive, got {v}")
    return float(v)


def load_config(source) -> dict:
    """Parse and validate a config from a path, bundled name, or dict."""
    if isinstance(source, dict):
        raw = source
    else:
        text = _resolve_config_text(str(source))
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config: invalid JSON ({e})") from None
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")

    cfg = {}
    cfg["name"] = str(raw.get("name", "case"))

    man = _need(raw, "manifold", "config")
    kind = _need(man, "kind", "config.manifold")
    if kind == "plane":
        m = Manifold.plane()
    elif kind == "sphere":
        m = Manifold.sphere(_num(man, "kappa", "config.manifold", positive=True))
    elif kind == "cone":
        frac = _num(man, "fraction", "config.manifold", positive=True)
        if frac >= 1.0:
            raise ConfigError("config.manifold.fraction: must lie in (0, 1)")
        m = Manifold.cone(frac)
    else:
        raise ConfigError(f"config.manifold.kind: unknown kind {kind!r}")
    cfg["manifold"] = m

    cfg["domain"] = _parse_domain(_need(raw, "domain", "config"), m)
    cfg["h"] = _num(raw, "h", "config", positive=True)
    refol = raw.get("refinements", 0)
    if not isinstance(refol, int) or isinstance(refol, bool) or not 0 <= refol <= 5:
        raise ConfigError("config.refinements: must be an integer in [0, 5]")
    cfg["refinements"] = refol

    checks = raw.get("checks", list(ALL_CHECKS))
    if not isinstance(checks, list) or not set(checks) <= set(ALL_CHECKS):
        raise ConfigError(
            f"config.checks: must be a subset of {sorted(ALL_CHECKS)}")
    cfg["checks"] = tuple(checks)

    cfg["f"] = _parse_source(raw.get("f", {"type": "constant", "value": 1.0}))
    cfg["beta"] = _parse_beta(raw.get("beta", {"type": "constant", "value": 1.0}))
    cfg["seed"] = int(raw.get("seed", 0))
    cfg["output"] = raw.get("output")
    cfg["raw"] = raw
    return cfg


def _resolve_config_text(source: str) -> str:
    p = Path(source)
    if p.exists():
        return p.read_text()
    res = importlib.resources.files("symcomp") / "configs" / f"{source}.json"
    if res.is_file():
        return res.read_text()
    raise ConfigError(f"config: no file {source!r} and no bundled config "
                      f"with that name")


def _parse_domain(dom: dict, m: Manifold):
    shape = _need(dom, "shape", "config.domain")
    path = "config.domain"
    if shape == "disk":
        return Disk(_num(dom, "radius", path, positive=True))
    if shape == "ellipse":
        return Ellipse(_num(dom, "a", path, positive=True),
                       _num(dom, "b", path, positive=True))
    if shape == "polygon":
        verts = _need(dom, "vertices", path)
        try:
            return Polygon(tuple(tuple(map(float, v)) for v in verts))
        except (TypeError, ValueError):
            raise ConfigError(f"{path}.vertices: expected a list of [x, y] "
                              f"pairs") from None
    if shape == "annular_sector":
        return AnnularSector(_num(dom, "r_in", path, positive=True),
                             _num(dom, "r_out", path, positive=True),
                             _num(dom, "angle", path, positive=True),
                             _num(dom, "start_angle", path, default=0.0))
    if shape == "spherical_cap":
        return SphericalCap(_num(dom, "r0", path, positive=True), m.kappa)
    if shape == "geodesic_polygon":
        dirs = _need(dom, "directions", path)
        try:
            return GeodesicPolygon(
                tuple(tuple(map(float, v)) for v in dirs), m.kappa)
        except (TypeError, ValueError):
            raise ConfigError(f"{path}.directions: expected a list of "
                              f"[x, y, z] unit vectors") from None
    if shape == "cone_disk":
        return ConeDisk(_num(dom, "center_distance", path, positive=True),
                        _num(dom, "radius", path, positive=True))
    raise ConfigError(f"{path}.shape: unknown shape {shape!r}")


def _parse_source(f: dict):
    typ = _need(f, "type", "config.f")
    if typ == "constant":
        val = _num(f, "value", "config.f", positive=True)
        return ("constant", val)
    if typ == "radial":
        expr = str(_need(f, "expression", "config.f"))
        return ("radial", expr)
    if typ == "file":
        return ("file", str(_need(f, "path", "config.f")))
    raise ConfigError(f"config.f.type: unknown type {typ!r}")


def _parse_beta(b: dict):
    typ = _need(b, "type", "config.beta")
    if typ == "constant":
        val = _num(b, "value", "config.beta")
        if val <= 0:
            raise ConfigError(f"config.beta.value: must be positive, got {val}")
        return ("constant", val)
    if typ == "arcs":
        arcs = _need(b, "arcs", "config.beta")
        out = []
        for k, a in enumerate(arcs):
            try:
                t0, t1, val = float(a[0]), float(a[1]), float(a[2])
            except (TypeError, ValueError, IndexError):
                raise ConfigError(f"config.beta.arcs[{k}]: expected "
                                  f"[t_start, t_end, value]") from None
            if val <= 0:
                raise ConfigError(f"config.beta.arcs[{k}]: value must be "
                                  f"positive, got {val}")
            out.append((t0, t1, val))
        return ("arcs", tuple(out))
    if typ == "file":
        return ("file", str(_need(b, "path", "config.beta")))
    raise ConfigError(f"config.beta.type: unknown type {typ!r}")


_EXPR_NS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt,
            "abs": np.abs, "pi": math.pi, "log": np.log, "tanh": np.tanh}


def _radial_coordinate(mesh, m: Manifold) -> np.ndarray:
    if m.kind == "sphere":
        # geodesic distance from the chart pole (0, 0, 1/sqrt(kappa))
        a = math.sqrt(m.kappa)
        z = np.clip(mesh.vertices[:, 2] * a, -1.0, 1.0)
        return np.arccos(z) / a
    return np.linalg.norm(mesh.vertices, axis=1)


def make_source_field(mesh, m: Manifold, fspec) -> ScalarField:
    kind, payload = fspec
    if kind == "constant":
        return ScalarField.constant(mesh, payload)
    if kind == "radial":
        r = _radial_coordinate(mesh, m)
        try:
            vals = eval(payload, {"__builtins__": {}}, {**_EXPR_NS, "r": r})
        except Exception as e:
            raise ConfigError(f"config.f.expression: evaluation failed ({e})")
        vals = np.broadcast_to(np.asarray(vals, dtype=float),
                               (mesh.num_vertices,)).copy()
        if np.any(vals < 0.0):
            raise ConfigError("config.f.expression: source must be nonnegative")
        return ScalarField(mesh, vals)
    vals = np.loadtxt(payload, dtype=float, ndmin=1)
    if len(vals) != mesh.num_vertices:
        raise ConfigError(f"config.f.path: file has {len(vals)} values, mesh "
                          f"has {mesh.num_vertices} vertices")
    return ScalarField(mesh, vals)


def make_beta_field(mesh, bspec) -> BoundaryField:
    kind, payload = bspec
    if kind == "constant":
        return BoundaryField.constant(mesh, payload)
    if kind == "arcs":
        return BoundaryField.from_arcs(mesh, payload)
    vals = np.loadtxt(payload, dtype=float, ndmin=1)
    if len(vals) != len(mesh.boundary):
        raise ConfigError(f"config.beta.path: file has {len(vals)} values, "
                          f"mesh has {len(mesh.boundary)} boundary edges")
    return BoundaryField(vals)


# ---------------------------------------------------------------------------
# pipeline


def run_case(cfg: dict, tol_scale: float = 0.5):
    """Solve one configuration and run its checks.

    Returns (report, artifacts) where artifacts maps file names to text
    payloads (mesh file, CSVs, SVGs).
    """
    m = cfg["manifold"]
    mesh = build_mesh(cfg["domain"], m, cfg["h"])
    for _ in range(cfg["refinements"]):
        mesh = refine(mesh)
    f = make_source_field(mesh, m, cfg["f"])
    beta = make_beta_field(mesh, cfg["beta"])

    u = solve_poisson_robin(mesh, f, beta)
    stats = field_stats(u)
    theta = m.theta

    fstar = rearranged_profile(f)
    bb = beta_bar(beta, mesh, m)
    R0 = inverse_ball_area(m.kappa, m.dim, mesh.area / theta)
    v = solve_radial(schwarz_profile(fstar, theta, m), m, m.dim, R0, bb)
    u0 = stats.boundary_min
    v0 = v.boundary_value

    levels = default_levels(u)
    mu_u = distribution_function(u, levels)
    mu_v = radial_distribution(v, levels)
    ladder = np.linspace(0.5 * u0, stats.max, 64)
    mu_u_lad = ExactDistribution.from_field(u).mu(ladder)
    mu_v_lad = radial_distribution(v, ladder)

    entries = []
    for name in cfg["checks"]:
        if name == "l1":
            entries.append(verify_L1(
                stats, v, theta, m,
                default_tolerance(mesh.h, theta * _trapz_l1(v), tol_scale)))
        elif name == "pointwise":
            from .rearrange import DistributionData
            lad_u = DistributionData(levels=ladder, measures=mu_u_lad,
                                     total_measure=mesh.area)
            entries.append(verify_pointwise(
                lad_u, mu_v_lad, theta,
                default_tolerance(mesh.h, mesh.area, tol_scale)))
        elif name == "boundary_min":
            entries.append(verify_min_comparison(
                u0, v0, default_tolerance(mesh.h, v0, tol_scale)))
        elif name == "isoperimetric":
            iso = np.linspace(u0 + 0.05 * (stats.max - u0),
                              stats.max - 0.05 * (stats.max - u0), 16)
            entries.append(verify_isoperimetric(
                u, iso, theta, m,
                default_tolerance(mesh.h, mesh.perimeter, tol_scale)))
        elif name == "level_inequality":
            entries.append(verify_level_inequality(
                u, beta, fstar, theta, m, 2,
                default_tolerance(mesh.h, theta * stats.max, tol_scale)))

    case = {
        "name": cfg["name"],
        "manifold": {"kind": m.kind, "kappa": m.kappa,
                     "cone_angle_fraction": m.cone_angle_fraction},
        "h": mesh.h,
        "refinements": cfg["refinements"],
        "theta": theta,
        "area": mesh.area,
        "perimeter": mesh.perimeter,
        "vertices": mesh.num_vertices,
        "u_max": stats.max,
        "u_L1": stats.L1,
        "u_boundary_min": u0,
        "v_center": float(v.values[0]),
        "v_boundary": v0,
        "beta_bar": bb,
        "comparison_radius": R0,
        "tol_scale": tol_scale,
        "seed": cfg["seed"],
    }
    report = ComparisonReport(case=case, entries=entries)

    ush = schwarz_profile(rearranged_profile(u), theta, m)
    artifacts = {
        "mesh.txt": export_mesh(mesh, beta),
        "solution.csv": _solution_csv(mesh, u),
        "distribution.csv": _distribution_csv(levels, mu_u.measures,
                                              theta * mu_v.measures),
        "radial.csv": _radial_csv(v, ush),
        "report.json": report.to_json(),
        "report.csv": report.to_csv(),
        "plot_distribution.svg": plots.line_chart(
            [("mu_u", levels, mu_u.measures),
             ("theta mu_v", levels, theta * mu_v.measures)],
            f"{cfg['name']}: distribution comparison", "level t", "measure"),
        "plot_profiles.svg": plots.line_chart(
            [("u_sharp", ush.r, ush.values), ("v", v.r, v.values)],
            f"{cfg['name']}: radial profiles", "geodesic radius", "value"),
    }
    return report, artifacts


def _trapz_l1(v) -> float:
    from .radial import radial_lp_norm
    return radial_lp_norm(v, 1)


def _solution_csv(mesh, u) -> str:
    dim = mesh.vertices.shape[1]
    header = ",".join(["x", "y", "z"][:dim]) + ",u"
    rows = [header]
    for p, val in zip(mesh.vertices, u.values):
        rows.append(",".join(f"{c:.17g}" for c in p) + f",{val:.17g}")
    return "\n".join(rows) + "\n"


def _distribution_csv(levels, mu_u, theta_mu_v) -> str:
    rows = ["t,mu_u,theta_mu_v"]
    for t, a, b in zip(levels, mu_u, theta_mu_v):
        rows.append(f"{t:.17g},{a:.17g},{b:.17g}")
    return "\n".join(rows) + "\n"


def _radial_csv(v, ush) -> str:
    rows = ["r,v,u_sharp"]
    us = ush(v.r)
    for r, a, b in zip(v.r, v.values, us):
        rows.append(f"{r:.17g},{a:.17g},{b:.17g}")
    return "\n".join(rows) + "\n"


def _write_artifacts(out_dir: Path, artifacts: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.items():
        (out_dir / name).write_text(text)


# ---------------------------------------------------------------------------
# convergence study


def run_convergence(cfg: dict, levels: int, tol_scale: float = 0.5):
    """Refinement study: check margins and oracle errors per level, with
    empirical orders from log2 ratios."""
    if levels < 2:
        raise ConfigError("config.refinements: convergence needs >= 2 levels")
    m = cfg["manifold"]
    mesh = build_mesh(cfg["domain"], m, cfg["h"])
    oracle = _oracle_for(cfg)

    rows = []
    for lev in range(levels):
        if lev > 0:
            mesh = refine(mesh)
        f = make_source_field(mesh, m, cfg["f"])
        beta = make_beta_field(mesh, cfg["beta"])
        u = solve_poisson_robin(mesh, f, beta)
        stats = field_stats(u)
        theta = m.theta
        fstar = rearranged_profile(f)
        bb = beta_bar(beta, mesh, m)
        R0 = inverse_ball_area(m.kappa, m.dim, mesh.area / theta)
        v = solve_radial(schwarz_profile(fstar, theta, m), m, m.dim, R0, bb)
        u0 = stats.boundary_min
        ladder = np.linspace(0.5 * u0, stats.max, 64)
        lad_u = ExactDistribution.from_field(u).mu(ladder)
        lad_v = radial_distribution(v, ladder)

        row = {
            "level": lev,
            "h": mesh.h,
            "vertices": mesh.num_vertices,
            "area_error": (abs(mesh.area - cfg["domain"].area)
                           if cfg["domain"].area is not None else None),
            "l1_margin": float(theta * _trapz_l1(v) - stats.L1),
            "pointwise_margin": float(np.min(theta * lad_v.measures - lad_u)),
            "boundary_min_margin": float(v.boundary_value - u0),
        }
        if oracle is not None:
            r = _radial_coordinate(mesh, m)
            row["linf_error"] = float(np.max(np.abs(u.values - oracle(r))))
        rows.append(row)

    orders = {}
    for key in ("area_error", "linf_error", "l1_margin", "pointwise_margin"):
        vals = [r.get(key) for r in rows]
        if any(x is None for x in vals):
            continue
        vals = [abs(x) for x in vals]
        if min(vals) <= 0.0:
            continue
        orders[key] = [float(np.log2(vals[k] / vals[k + 1]))
                       for k in range(len(vals) - 1)]
    return rows, orders


def _oracle_for(cfg: dict):
    """Closed-form nodal oracle u(r) when one exists for this config."""
    m, dom = cfg["manifold"], cfg["domain"]
    fk, fv = cfg["f"]
    bk, bv = cfg["beta"]
    if fk != "constant" or bk != "constant":
        return None
    if m.kind == "plane" and isinstance(dom, Disk) and \
            np.allclose(getattr(dom, "center", (0.0, 0.0)), 0.0):
        R, beta = dom.radius, bv
        return lambda r: fv * ((R ** 2 - r ** 2) / 4.0 + R / (2.0 * beta))
    if m.kind == "sphere" and isinstance(dom, SphericalCap):
        from .radial import closed_form_cap
        prof = closed_form_cap(m.kappa, dom.r0, bv, num=4097)
        return lambda r: fv * prof(r)
    return None


def _convergence_artifacts(cfg: dict, rows, orders):
    keys = sorted({k for r in rows for k in r if r[k] is not None})
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join(
            "" if r.get(k) is None else
            (str(r[k]) if isinstance(r[k], int) else f"{r[k]:.17g}")
            for k in keys))
    csv = "\n".join(lines) + "\n"

    hs = [r["h"] for r in rows]
    series = []
    for key in ("linf_error", "area_error", "l1_margin", "pointwise_margin"):
        vals = [r.get(key) for r in rows]
        if any(v is None or abs(v) <= 0.0 for v in vals):
            continue
        series.append((key, np.asarray(hs), np.abs(vals)))
    svg = plots.line_chart(series, f"{cfg['name']}: refinement convergence",
                           "h", "error / margin", logx=True, logy=True) \
        if series else plots.line_chart([("h", np.asarray(hs), np.asarray(hs))],
                                        "refinement levels", "h", "h")
    payload = json.dumps({"case": cfg["name"], "rows": rows, "orders": orders},
                         indent=2, sort_keys=True, allow_nan=False) + "\n"
    return {"convergence.csv": csv, "convergence.json": payload,
            "plot_convergence.svg": svg}


# ---------------------------------------------------------------------------
# selftest

SELFTEST_CASES = ("disk_equality", "square_robin", "ellipse_robin",
                  "lshape_robin", "sphere_cap", "cone_theta")


def run_selftest(out_dir: Path):
    """Deterministic suite: every bundled config (coarsened for speed) plus
    rearrangement property checks; aggregate report is bitwise reproducible."""
    summary = {"cases": [], "properties": []}
    all_ok = True
    for name in SELFTEST_CASES:
        cfg = load_config(name)
        cfg["h"] = max(cfg["h"], 0.05)
        report, artifacts = run_case(cfg)
        _write_artifacts(out_dir / name, artifacts)
        ok = report.ok
        all_ok = all_ok and ok
        summary["cases"].append({"name": name, "all_hold": ok,
                                 "checks": [(e.name, e.verdict, e.margin)
                                            for e in report.entries]})
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")

    cfg = load_config("disk_equality")
    cfg["h"] = 0.08
    m = cfg["manifold"]
    mesh = build_mesh(cfg["domain"], m, cfg["h"])
    rng = np.random.default_rng(cfg["seed"])
    worst_hl = math.inf
    for _ in range(10):
        a = ScalarField(mesh, rng.uniform(0.0, 1.0, mesh.num_vertices))
        b = ScalarField(mesh, rng.uniform(0.0, 1.0, mesh.num_vertices))
        worst_hl = min(worst_hl, hardy_littlewood_check(a, b))
        d = ExactDistribution.from_field(a)
        ex = integrate_product(a, ScalarField.constant(mesh, 1.0))
        if abs(d.moment(1) - ex) > 1e-9 * max(abs(ex), 1.0):
            all_ok = False
    hl_ok = worst_hl >= -1e-8
    all_ok = all_ok and hl_ok
    summary["properties"].append({"name": "hardy_littlewood",
                                  "worst_margin": worst_hl, "ok": hl_ok})
    print(f"[{'PASS' if hl_ok else 'FAIL'}] hardy_littlewood "
          f"(worst margin {worst_hl:.3e})")

    summary["all_hold"] = all_ok
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "selftest_report.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True, allow_nan=False) + "\n")
    return 0 if all_ok else 2


# ---------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="symcomp",
        description="verify symmetrization comparison inequalities for the "
                    "Robin Poisson problem on 2-D space forms")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one config and check it")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--tol-scale", type=float, default=0.5)

    p_conv = sub.add_parser("convergence", help="refinement study")
    p_conv.add_argument("config")
    p_conv.add_argument("--out", default=None)
    p_conv.add_argument("--levels", type=int, default=3)
    p_conv.add_argument("--tol-scale", type=float, default=0.5)

    p_mesh = sub.add_parser("mesh", help="generate and export the mesh only")
    p_mesh.add_argument("config")
    p_mesh.add_argument("--out", default=None)

    p_self = sub.add_parser("selftest", help="deterministic invariant suite")
    p_self.add_argument("--out", default="selftest_out")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            report, artifacts = run_case(cfg, tol_scale=args.tol_scale)
            out = Path(args.out or cfg.get("output") or f"out_{cfg['name']}")
            _write_artifacts(out, artifacts)
            for e in report.entries:
                print(f"{e.name}: {e.verdict} (margin {e.margin:.6e}, "
                      f"tol {e.tolerance:.6e})")
            print(f"report written to {out}")
            return 0 if report.ok else 2
        if args.command == "convergence":
            cfg = load_config(args.config)
            rows, orders = run_convergence(cfg, args.levels,
                                           tol_scale=args.tol_scale)
            out = Path(args.out or cfg.get("output") or f"out_{cfg['name']}")
            _write_artifacts(out, _convergence_artifacts(cfg, rows, orders))
            for key, vals in sorted(orders.items()):
                print(f"{key}: orders {['%.2f' % v for v in vals]}")
            print(f"study written to {out}")
            return 0
        if args.command == "mesh":
            cfg = load_config(args.config)
            m = cfg["manifold"]
            mesh = build_mesh(cfg["domain"], m, cfg["h"])
            for _ in range(cfg["refinements"]):
                mesh = refine(mesh)
            beta = make_beta_field(mesh, cfg["beta"])
            out = Path(args.out or cfg.get("output") or f"out_{cfg['name']}")
            _write_artifacts(out, {"mesh.txt": export_mesh(mesh, beta)})
            print(f"mesh with {mesh.num_vertices} vertices written to {out}")
            return 0
        return run_selftest(Path(args.out))
    except (ConfigError,) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
