"""Command-line front end.

One subcommand per experiment family.  Flags carry the whole configuration;
an optional plain `key=value` file supplies defaults and flags override it.
Every run ends by writing a manifest that lists the produced files with
content hashes, so reruns can be compared byte for byte.

Exit codes: 0 when every verdict is Holds or HoldsWithEquality, 2 when any
check is Violated, 1 for execution errors (an Inconclusive verdict counts as
a failure to certify and lands here too).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import serialize as ser
from .checks import check_isoperimetric, check_nagy
from .domains import Ball, ConcentricAnnulus, EccentricAnnulus, PolygonWithHoles
from .fem2d import SECOND_NEUMANN, p2_eig, plap_eig_descent, richardson
from .mesh import INNER, OUTER, annulus_mesh, disk_mesh
from .nodal import nodal_counterexample, nodal_radial_candidate
from .params import ProblemParams, Side
from .polygon import parallel_profile_polygon
from .profiles import parallel_profile_exact, parallel_profile_mc
from .radial import (
    DIRICHLET,
    NEUMANN,
    ROBIN,
    SECOND,
    BoundaryCondition,
    RadialProblem,
    solve_first_radial,
    solve_second_radial,
)
from .report import VERDICT_EQUALITY, VERDICT_HOLDS, VERDICT_VIOLATED
from .transplant import build_maps, check_map_lemmas, reference_problem, verify_rfk

_SIDES = {"outer": Side.FromOuter, "inner": Side.FromInner}


def _fmt(x: float) -> str:
    return ("%g" % x).replace("+", "").replace("-", "m").replace(".", "_")


def _outdir(args) -> str:
    d = args.outdir or os.environ.get("RFKCERT_OUTDIR", ".")
    os.makedirs(d, exist_ok=True)
    return d


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _coerce(parser_defaults: dict, raw: dict) -> dict:
    out = {}
    for key, val in raw.items():
        if key not in parser_defaults:
            raise ValueError(f"unknown config key {key!r}")
        ref = parser_defaults[key]
        if isinstance(ref, bool):
            out[key] = val.lower() in ("1", "true", "yes", "on")
        elif isinstance(ref, int):
            out[key] = int(val)
        elif isinstance(ref, float):
            out[key] = float(val)
        else:
            out[key] = val
    return out


def _domain(args):
    if getattr(args, "polygon", None):
        loops = ser.read_polygon(args.polygon)
        return PolygonWithHoles(loops[0], tuple(loops[1:]))
    if args.R0 <= 0.0:
        return Ball(args.R1, N=args.N)
    if args.e > 0.0:
        return EccentricAnnulus(args.R0, args.R1, args.e, N=args.N)
    return ConcentricAnnulus(args.R0, args.R1, N=args.N)


def _grid(args, domain=None) -> int:
    if args.grid is not None:
        return args.grid
    if isinstance(domain, PolygonWithHoles) or getattr(args, "polygon", None):
        # contouring tolerance dominates; extra levels only cost time
        return 512
    return 2048


def _profile(args, domain, side):
    grid = _grid(args, domain)
    if isinstance(domain, PolygonWithHoles):
        return parallel_profile_polygon(domain, side, grid_size=grid,
                                        field_resolution=args.field_res)
    if getattr(args, "mc", False):
        return parallel_profile_mc(domain, side, grid, args.samples, args.seed)
    return parallel_profile_exact(domain, side, grid)


def _params(args, robin_k=None):
    n = 2 if getattr(args, "polygon", None) else args.N
    return ProblemParams(N=n, p=args.p, robin_k=robin_k)


def _bc(kind: str, k: float | None) -> BoundaryCondition:
    if kind == ROBIN:
        if k is None:
            raise ValueError("a robin condition needs --robin-k")
        return BoundaryCondition.robin(k)
    return BoundaryCondition(kind)


def _exit_code(verdicts) -> int:
    if any(v == VERDICT_VIOLATED for v in verdicts):
        return 2
    if all(v in (VERDICT_HOLDS, VERDICT_EQUALITY) for v in verdicts):
        return 0
    return 1


def _anchor2d(args, side):
    """Planar lower leg for the sandwich, extrapolated from h and h/2."""
    tags = (OUTER,) if side == Side.FromOuter else (INNER,)
    vals = []
    for h in (args.h2d, args.h2d / 2.0):
        mesh = annulus_mesh(args.R0, args.R1, e=args.e, h=h)
        vals.append(p2_eig(mesh, dirichlet_tags=tags).eigenvalue)
    lam, tol = richardson(*vals)
    return lam, tol


# subcommand bodies; each returns (produced files, verdicts)

def cmd_radial(args, outdir):
    params = ProblemParams(N=args.N, p=args.p)
    prob = RadialProblem(
        params=params, r0=args.R0, r1=args.R1,
        bc_inner=_bc(args.bc_inner, args.robin_k),
        bc_outer=_bc(args.bc_outer, args.robin_k),
    )
    solve = solve_second_radial if args.mode == SECOND else solve_first_radial
    pair = solve(prob)
    return ser.write_radial_pair(os.path.join(outdir, "radial_pair.csv"), pair), []


def cmd_profile(args, outdir):
    side = _SIDES[args.side]
    prof = _profile(args, _domain(args), side)
    return ser.write_profile(os.path.join(outdir, "profile.csv"), prof), []


def cmd_maps(args, outdir):
    side = _SIDES[args.side]
    prof = _profile(args, _domain(args), side)
    maps = build_maps(prof, _params(args))
    path = os.path.join(outdir, "maps.csv")
    ser.write_csv(path, "delta,s_eff,t,T,v,V",
                   (maps.delta, maps.s_eff, maps.t, maps.T, maps.v, maps.V))
    sidecar = ser.write_json(os.path.join(outdir, "maps.json"), {
        "side": maps.side, "t_omega": maps.t_omega, "T_sharp": maps.T_sharp,
        "depth_sharp": maps.depth_sharp, "clip_count": maps.clip_count,
        "reference": {"R0": getattr(maps.reference, "R0", 0.0),
                      "R1": maps.reference.R1},
        "meta": maps.meta,
    })
    return [path, sidecar], []


def _cmd_verify_theorem(args, outdir, side):
    anchor = None
    tol = None
    if args.anchor2d:
        if args.p != 2.0 or args.N != 2:
            raise ValueError("the planar anchor needs p = 2 and N = 2")
        anchor, tol = _anchor2d(args, side)
    rep = verify_rfk(_domain(args), _params(args), side, grid_size=_grid(args),
                     anchor=anchor)
    if tol is not None:
        rep.meta["anchor_disc_tol"] = tol
    name = "theorem1" if side == Side.FromOuter else "theorem2"
    path = ser.write_json(
        os.path.join(outdir, f"{name}_N{args.N}_p{_fmt(args.p)}_e{_fmt(args.e)}.json"),
        rep.to_dict())
    return [path], [rep.verdict]


def _cmd_verify_theorem3(args, outdir):
    if not args.polygon:
        raise ValueError("verify theorem3 needs --polygon")
    domain = _domain(args)
    sides = [_SIDES[args.side]] if args.side != "both" else [Side.FromOuter, Side.FromInner]
    produced, verdicts = [], []
    for side in sides:
        prof = _profile(args, domain, side)
        rep = verify_rfk(None, _params(args), side, profile=prof)
        tag = "outer" if side == Side.FromOuter else "inner"
        produced.append(ser.write_json(
            os.path.join(outdir, f"theorem3_{tag}_p{_fmt(args.p)}.json"), rep.to_dict()))
        verdicts.append(rep.verdict)
    return produced, verdicts


def _cmd_verify_nagy(args, outdir):
    side = _SIDES[args.side]
    rep = check_nagy(_profile(args, _domain(args), side), _params(args))
    path = ser.write_report(os.path.join(outdir, "nagy_report.json"), rep)
    return [path], [rep.verdict]


def _random_annulus(rng):
    n = int(rng.integers(2, 4))
    r0 = float(rng.uniform(0.2, 1.0))
    width = float(rng.uniform(0.5, 2.0))
    e = float(rng.uniform(0.1, 0.98)) * width
    return EccentricAnnulus(r0, r0 + width, e, N=n)


def _cmd_verify_iso(args, outdir):
    params_n = args.N
    if args.random > 0:
        rng = np.random.default_rng(args.seed)
        rows, produced, verdicts = [], [], []
        for i in range(args.random):
            if i < 2:
                # pin the equality case into every batch
                dom = ConcentricAnnulus(0.5, 1.5 + 0.5 * i, N=2 + i % 2)
            else:
                dom = _random_annulus(rng)
            prof = parallel_profile_exact(dom, Side.FromOuter, _grid(args))
            rep = check_isoperimetric(prof, ProblemParams(N=dom.N, p=args.p))
            e = getattr(dom, "e", 0.0)
            rows.append((i, dom.N, dom.R0, dom.R1, e, rep.worst_margin, rep.verdict))
            verdicts.append(rep.verdict)
        path = os.path.join(outdir, "iso_batch.csv")
        with open(path, "w") as fh:
            fh.write("index,N,R0,R1,e,worst_margin,verdict\n")
            for i, n, r0, r1, e, margin, verdict in rows:
                fh.write(f"{i},{n},{r0!r},{r1!r},{e!r},{margin!r},{verdict}\n")
        summary = ser.write_json(os.path.join(outdir, "iso_summary.json"), {
            "count": args.random, "seed": args.seed,
            "verdicts": sorted(set(verdicts)),
            "equality_indices": [r[0] for r in rows if r[-1] == VERDICT_EQUALITY],
        })
        return [path, summary], verdicts
    prof = _profile(args, _domain(args), Side.FromOuter)
    rep = check_isoperimetric(prof, ProblemParams(N=params_n, p=args.p))
    path = ser.write_report(os.path.join(outdir, "iso_report.json"), rep)
    return [path], [rep.verdict]


def _cmd_verify_lemmas(args, outdir):
    side = _SIDES[args.side]
    prof = _profile(args, _domain(args), side)
    reports = check_map_lemmas(prof, _params(args))
    path = ser.write_json(os.path.join(outdir, "lemmas.json"),
                          {name: rep.to_dict() for name, rep in reports.items()})
    return [path], [rep.verdict for rep in reports.values()]


def cmd_verify(args, outdir):
    what = args.what
    if what == "theorem1":
        return _cmd_verify_theorem(args, outdir, Side.FromOuter)
    if what == "theorem2":
        return _cmd_verify_theorem(args, outdir, Side.FromInner)
    if what == "theorem3":
        return _cmd_verify_theorem3(args, outdir)
    if what == "nagy":
        return _cmd_verify_nagy(args, outdir)
    if what == "iso":
        return _cmd_verify_iso(args, outdir)
    if what == "lemmas":
        return _cmd_verify_lemmas(args, outdir)
    raise ValueError(f"unknown verify target {what!r}")


def cmd_oracle2d(args, outdir):
    if args.polygon:
        raise ValueError("the planar oracle runs on disks and annuli")
    if args.R0 > 0.0:
        mesh = annulus_mesh(args.R0, args.R1, e=args.e, h=args.h)
    else:
        if args.e != 0.0:
            raise ValueError("a ball has no hole to shift")
        mesh = disk_mesh(args.R1, args.h)
    tags = {"outer": (OUTER,), "inner": (INNER,), "both": (OUTER, INNER),
            "none": ()}[args.dirichlet]
    if args.solver == "descent":
        pair = plap_eig_descent(mesh, tags, args.p, seed=args.seed)
    else:
        if args.p != 2.0:
            raise ValueError("the p2 solver is the p = 2 path; use --solver descent")
        mode = SECOND_NEUMANN if args.mode == "second-neumann" else "first"
        pair = p2_eig(mesh, dirichlet_tags=tags, mode=mode)
    produced = ser.write_plane_pair(os.path.join(outdir, "plane_pair.csv"), pair)
    if args.write_mesh:
        produced.append(ser.write_mesh(os.path.join(outdir, "mesh.txt"), mesh))
    return produced, []


def cmd_nodal(args, outdir):
    domain = _domain(args)
    params = ProblemParams(N=args.N, p=args.p)
    if args.what == "candidate":
        cand = nodal_radial_candidate(domain, params, args.which, args.normalization)
        path = ser.write_json(
            os.path.join(outdir, f"nodal_candidate_{args.which}.json"), {
                "which": cand.which, "candidate_value": cand.candidate_value,
                "split_radius": cand.split_radius,
                "inner_value": cand.inner_value, "outer_value": cand.outer_value,
                "normalization": cand.normalization, "meta": cand.meta,
            })
        return [path], []
    rep = nodal_counterexample(domain, params, args.s, args.which,
                               grid_size=_grid(args), h2d=args.h2d,
                               normalization=args.normalization)
    path = ser.write_report(
        os.path.join(outdir, f"nodal_{args.which}_s{_fmt(args.s)}.json"), rep)
    return [path], [rep.verdict]


def _sweep_point(args, e):
    domain = EccentricAnnulus(args.R0, args.R1, e, N=2) if e > 0 \
        else ConcentricAnnulus(args.R0, args.R1, N=2)
    vals = []
    for h in (args.h2d, args.h2d / 2.0):
        mesh = annulus_mesh(args.R0, args.R1, e=e, h=h)
        vals.append(p2_eig(mesh, dirichlet_tags=(OUTER,)).eigenvalue)
    lam, tol = richardson(*vals)
    rep = verify_rfk(domain, ProblemParams(N=2, p=args.p), Side.FromOuter,
                     grid_size=_grid(args))
    return {"e": e, "nu1_oracle": lam, "disc_tol": tol,
            "transplant_quotient": rep.quotient, "reference": rep.reference,
            "verdict": rep.verdict}


def cmd_sweep(args, outdir):
    if args.quantity != "nu1":
        raise ValueError(f"unsupported sweep quantity {args.quantity!r}")
    if args.axis != "e":
        raise ValueError(f"unsupported sweep axis {args.axis!r}")
    if args.p != 2.0 or args.N != 2:
        raise ValueError("the nu1 sweep runs the planar oracle: p = 2, N = 2")
    points = np.linspace(args.start, args.stop, args.steps)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        rows = list(pool.map(lambda e: _sweep_point(args, float(e)), points))
    produced = []
    csv_path = os.path.join(outdir, "sweep_nu1.csv")
    with open(csv_path, "w") as fh:
        fh.write("e,nu1_oracle,transplant_quotient,reference\n")
        for row in rows:
            fh.write(",".join(repr(row[k]) for k in
                              ("e", "nu1_oracle", "transplant_quotient", "reference")) + "\n")
    produced.append(csv_path)
    for i, row in enumerate(rows):
        produced.append(ser.write_json(
            os.path.join(outdir, f"sweep_nu1_{i:03d}.json"), row))
    return produced, [row["verdict"] for row in rows]


def cmd_elasticity(args, outdir):
    params = ProblemParams(N=args.N, p=args.p, robin_k=args.k)
    rep = verify_rfk(_domain(args), params, Side.FromOuter, grid_size=_grid(args))
    if args.dirichlet_limit:
        ref_dom = ConcentricAnnulus(args.R0, args.R1, N=args.N) if args.R0 > 0 \
            else Ball(args.R1, N=args.N)
        robin = solve_first_radial(reference_problem(ref_dom, params, Side.FromOuter))
        dirich = solve_first_radial(reference_problem(
            ref_dom, ProblemParams(N=args.N, p=args.p), Side.FromOuter))
        rep.meta["dirichlet_limit"] = {
            "robin_value": robin.lam, "dirichlet_value": dirich.lam,
            "rel_gap": abs(robin.lam - dirich.lam) / dirich.lam,
        }
    path = ser.write_json(os.path.join(outdir, f"elasticity_k{_fmt(args.k)}.json"),
                          rep.to_dict())
    return [path], [rep.verdict]


_COMMANDS = {
    "radial": cmd_radial,
    "profile": cmd_profile,
    "maps": cmd_maps,
    "verify": cmd_verify,
    "oracle2d": cmd_oracle2d,
    "nodal": cmd_nodal,
    "sweep": cmd_sweep,
    "elasticity": cmd_elasticity,
}


def _build_parser():
    top = argparse.ArgumentParser(prog="rfkcert",
                                  description="numerical certificates for reverse "
                                              "Faber-Krahn inequalities")
    top.add_argument("--config", help="key=value defaults file; flags override it")
    sub = top.add_subparsers(dest="command", required=True)
    by_name = {}

    def add_parser(name, **kw):
        by_name[name] = sub.add_parser(name, **kw)
        return by_name[name]

    def common(p, side_default=None):
        p.add_argument("--R0", type=float, default=0.0)
        p.add_argument("--R1", type=float, default=1.0)
        p.add_argument("--e", type=float, default=0.0)
        p.add_argument("--N", type=int, default=2)
        p.add_argument("--p", type=float, default=2.0)
        p.add_argument("--polygon", default=None,
                       help="loop file; first loop is the outer boundary")
        p.add_argument("--grid", type=int, default=None,
                       help="profile grid points (default 2048, polygons 512)")
        p.add_argument("--field-res", type=int, default=640)
        p.add_argument("--mc", action="store_true",
                       help="estimate the profile by sampling instead of closed form")
        p.add_argument("--samples", type=int, default=200000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--outdir", default=None)
        if side_default:
            p.add_argument("--side", choices=("outer", "inner"), default=side_default)

    p = add_parser("radial", help="solve one radial eigenproblem")
    common(p)
    p.add_argument("--bc-inner", choices=(DIRICHLET, NEUMANN, ROBIN), default=NEUMANN)
    p.add_argument("--bc-outer", choices=(DIRICHLET, NEUMANN, ROBIN), default=DIRICHLET)
    p.add_argument("--robin-k", type=float, default=None)
    p.add_argument("--mode", choices=("first", "second"), default="first")

    p = add_parser("profile", help="emit a parallel-set profile")
    common(p, side_default="outer")

    p = add_parser("maps", help="emit the length and volume maps")
    common(p, side_default="outer")

    p = add_parser("verify", help="run one certification check")
    p.add_argument("what", choices=("theorem1", "theorem2", "theorem3",
                                    "nagy", "iso", "lemmas"))
    common(p)
    p.add_argument("--side", choices=("outer", "inner", "both"), default="outer")
    p.add_argument("--anchor2d", action="store_true",
                   help="add the planar lower leg (p = 2, N = 2 only)")
    p.add_argument("--h2d", type=float, default=0.04)
    p.add_argument("--random", type=int, default=0,
                   help="iso only: check this many seeded random annuli")

    p = add_parser("oracle2d", help="planar eigensolve")
    common(p)
    p.add_argument("--h", type=float, default=0.02)
    p.add_argument("--dirichlet", choices=("outer", "inner", "both", "none"),
                   default="outer")
    p.add_argument("--mode", choices=("first", "second-neumann"), default="first")
    p.add_argument("--solver", choices=("p2", "descent"), default="p2")
    p.add_argument("--write-mesh", action="store_true")

    p = add_parser("nodal", help="radial candidates and shifted splits")
    p.add_argument("what", choices=("candidate", "counterexample"))
    common(p)
    p.add_argument("--which", choices=("mu2", "nu2", "tau2"), required=True)
    p.add_argument("--s", type=float, default=0.05)
    p.add_argument("--h2d", type=float, default=0.03)
    p.add_argument("--normalization", choices=("p", "p-1"), default="p")

    p = add_parser("sweep", help="scalar quantity along one axis")
    p.add_argument("quantity", choices=("nu1",))
    common(p)
    p.add_argument("--axis", default="e")
    p.add_argument("--from", dest="start", type=float, default=0.0)
    p.add_argument("--to", dest="stop", type=float, default=1.2)
    p.add_argument("--steps", type=int, default=7)
    p.add_argument("--h2d", type=float, default=0.04)
    p.add_argument("--jobs", type=int, default=1)

    p = add_parser("elasticity", help="Robin variant of the outer check")
    common(p)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--dirichlet-limit", action="store_true",
                   help="also report the distance to the Dirichlet value")

    return top, by_name


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = _build_parser()
    # apply config-file defaults before the real parse; they must land on the
    # active subparser, whose own defaults would otherwise win
    probe, _ = parser.parse_known_args(argv)
    if probe.config:
        defaults = {k: v for k, v in vars(probe).items()
                    if k not in ("config", "command", "what", "quantity")}
        try:
            overrides = _coerce(defaults, _load_config(probe.config))
        except Exception as exc:  # noqa: BLE001
            print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
                  file=sys.stderr)
            return 1
        subparsers[probe.command].set_defaults(**overrides)
    args = parser.parse_args(argv)
    outdir = _outdir(args)
    produced = []
    try:
        produced, verdicts = _COMMANDS[args.command](args, outdir)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        ser.write_manifest(outdir, [], stale=produced,
                           extra={"command": args.command, "error": str(exc)})
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    config = {k: v for k, v in vars(args).items()
              if k not in ("outdir", "config", "command") and v is not None}
    if "polygon" in config:
        config["polygon"] = os.path.basename(config["polygon"])
    ser.write_manifest(outdir, produced,
                       extra={"command": args.command, "config": config})
    return _exit_code(verdicts)


if __name__ == "__main__":
    sys.exit(main())
