"""Command-line front end.

Exit codes: 0 success, 2 input-validation error, 3 size/budget error.
Surface CSVs carry columns s,t,value,envelope_value; region CSVs carry
r1,r2.  Headers record the units and the full config for provenance.
Outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import tempfile

import numpy as np

from . import coupling as cpl
from . import dsbs
from . import exchange
from . import hyper
from . import singleletter as sl
from . import typegraph as tg
from . import verify
from .probcore import Dist, JointDist, JointNType, dist_from_json_dict
from .typegraph import SizeBudgetError


class ValidationError(ValueError):
    pass


def _git_describe():
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _load_json_arg(text):
    """Inline JSON or a path to a JSON file."""
    if text.strip().startswith("{"):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _joint_arg(text) -> JointDist:
    d = dist_from_json_dict(_load_json_arg(text))
    if not isinstance(d, JointDist):
        raise ValidationError("expected a joint (2-D) probability table")
    return d


def _dist_arg(text) -> Dist:
    d = dist_from_json_dict(_load_json_arg(text))
    if not isinstance(d, Dist):
        raise ValidationError("expected a 1-D probability vector")
    return d


def _counts_arg(text) -> np.ndarray:
    try:
        rows = [[int(v) for v in row.split(",")] for row in text.split(";")]
        a = np.array(rows, dtype=np.int64)
    except ValueError as exc:
        raise ValidationError(f"bad counts {text!r}: {exc}") from exc
    if a.ndim != 2:
        raise ValidationError("counts must be a 2-D table")
    return a


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".typeflow-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text):
    if getattr(args, "out", None):
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _config_dict(args):
    skip = {"func", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _json_out(args, payload):
    payload = dict(payload)
    payload["config"] = _config_dict(args)
    payload["git_describe"] = _git_describe()
    _emit(args, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def _csv_out(args, header_cols, rows, units):
    lines = [
        f"# units: {units}",
        f"# config: {json.dumps(_config_dict(args), sort_keys=True)}",
        f"# git: {_git_describe()}",
        ",".join(header_cols),
    ]
    for row in rows:
        lines.append(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row))
    _emit(args, "\n".join(lines) + "\n")


# -- commands ----------------------------------------------------------------


def cmd_exponent(args):
    t = _joint_arg(args.joint)
    if args.r1 < 0 or args.r2 < 0:
        raise ValidationError("rates must be nonnegative")
    if args.dry_run:
        return _json_out(args, {"valid": True})
    solver = sl.SingleLetterSolver(t, seed=args.seed)
    f = solver.f_star(args.r1, args.r2, refine=args.refine)
    witness = [
        {"weight": w, "kernel": k.tolist()} for w, k in solver.witness(args.r1, args.r2)
    ]
    _json_out(args, {
        "f_star": f,
        "e_star": max(args.r1 + args.r2 - f, 0.0),
        "g_star": max(solver.measures["H_XY"] - f, 0.0),
        "witness": witness,
        "units": "nats",
    })


def cmd_region(args):
    t = _joint_arg(args.joint)
    if args.dry_run:
        return _json_out(args, {"valid": True})
    if args.kind == "biclique":
        pts = sl.biclique_region_star(t, resolution=args.resolution)
    else:
        # boundary of the zero-penalty rate region: r2(r1) by bisection on
        # membership
        m = sl.SingleLetterSolver(t, seed=args.seed)
        r1_max = m.measures["H_X"]
        pts = []
        for r1 in np.linspace(0.0, r1_max, max(2, int(round(r1_max / args.resolution)) + 1)):
            lo, hi = 0.0, m.measures["H_Y"]
            if m.e_star(r1, lo) <= 1e-6:
                pts.append((float(r1), 0.0))
                continue
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if m.e_star(r1, mid) <= 1e-6:
                    hi = mid
                else:
                    lo = mid
            pts.append((float(r1), 0.5 * (lo + hi)))
    _csv_out(args, ["r1", "r2"], [(float(a), float(b)) for a, b in pts], "nats")


def cmd_coupling(args):
    p = _joint_arg(args.p)
    qx = _dist_arg(args.qx)
    qy = _dist_arg(args.qy)
    if len(qx) != p.shape[0] or len(qy) != p.shape[1]:
        raise ValidationError("marginal sizes do not match the joint table")
    if args.dry_run:
        return _json_out(args, {"valid": True})
    res = cpl.min_kl_coupling(cpl.CouplingProblem(qx, qy, p))
    payload = {"value": res.value, "iterations": res.iterations, "units": "nats"}
    if res.coupling is not None:
        payload["coupling"] = res.coupling.to_json_dict()
    if res.certificate is not None:
        payload["infeasibility_certificate"] = {
            "x_set": list(res.certificate[0]), "y_neighborhood": list(res.certificate[1])}
    _json_out(args, payload)


def _surface_for(args):
    if args.rho is not None:
        params = dsbs.DsbsParams(args.rho)
        base = dsbs.phi_surface if args.which in ("phi", "theta-lower") else dsbs.psi_surface
        surf = base(params, args.grid)
        units = "bits"
    else:
        if args.p is None:
            raise ValidationError("surface needs --p or --rho")
        p = _joint_arg(args.p)
        g = np.linspace(0.0, args.smax, args.grid)
        fn = cpl.phi if args.which in ("phi", "theta-lower") else cpl.psi
        surf = cpl.surface_from_function(lambda s, t: fn(p, s, t), g, g, args.which)
        units = "nats"
    return surf, units


def cmd_surface(args):
    if args.dry_run:
        if args.rho is None and args.p is not None:
            _joint_arg(args.p)
        elif args.rho is not None and not 0 < args.rho < 1:
            raise ValidationError("rho must lie in (0, 1)")
        return _json_out(args, {"valid": True})
    surf, units = _surface_for(args)
    if args.which in ("phi", "theta-lower"):
        env = cpl.lower_convex_envelope(surf)
    else:
        env = cpl.upper_concave_envelope(surf)
    if args.which == "theta-lower":
        vals = np.array([[cpl.theta_lower_star(surf, s, t) for t in surf.t_grid]
                         for s in surf.s_grid])
    elif args.which == "theta-upper":
        vals = np.array([[cpl.theta_upper_star(surf, s, t) for t in surf.t_grid]
                         for s in surf.s_grid])
    else:
        vals = surf.values
    rows = []
    for i, s in enumerate(surf.s_grid):
        for j, t in enumerate(surf.t_grid):
            rows.append((float(s), float(t), float(vals[i, j]), float(env.values[i, j])))
    _csv_out(args, ["s", "t", "value", "envelope_value"], rows, units)


def cmd_bruteforce(args):
    counts = _counts_arg(args.counts)
    if int(counts.sum()) != args.n:
        raise ValidationError(f"counts sum to {counts.sum()}, expected n={args.n}")
    t = JointNType(counts, args.n)
    if args.dry_run:
        return _json_out(args, {"valid": True})
    g = tg.build_graph(t)
    rep = tg.gamma_n(g, args.m1, args.m2, mode=args.mode, minimize=args.minimize)
    _json_out(args, {
        "A_size": rep.A_size, "B_size": rep.B_size, "edges": rep.edges,
        "density": rep.density, "method": rep.method,
        "A": list(rep.A), "B": list(rep.B),
        "graph": {"x_vertices": len(g.x_vertices), "y_vertices": len(g.y_vertices),
                  "edges": g.edge_count()},
    })


def cmd_dsbs(args):
    if not 0 < args.rho < 1:
        raise ValidationError("rho must lie in (0, 1)")
    if args.dry_run:
        return _json_out(args, {"valid": True})
    params = dsbs.DsbsParams(args.rho)
    surf = (dsbs.phi_surface if args.surface == "phi" else dsbs.psi_surface)(params, args.grid)
    env = (cpl.lower_convex_envelope if args.surface == "phi"
           else cpl.upper_concave_envelope)(surf)
    rows = []
    for i, s in enumerate(surf.s_grid):
        for j, t in enumerate(surf.t_grid):
            rows.append((float(s), float(t), float(surf.values[i, j]), float(env.values[i, j])))
    _csv_out(args, ["s", "t", "value", "envelope_value"], rows, "bits")


def cmd_bac(args):
    if args.eps < 0:
        raise ValidationError("eps must be nonnegative")
    if args.dry_run:
        return _json_out(args, {"valid": True})
    if args.eps == 0:
        rho_best, r2 = dsbs.bac_r2_max(step=args.step)
        _json_out(args, {"rho_best": rho_best, "r2_bound": r2, "units": "bits"})
    else:
        params = dsbs.DsbsParams(args.rho)
        residual = dsbs.bac_bound(params, args.r2, eps=args.eps)
        _json_out(args, {"rho": args.rho, "r2": args.r2, "eps": args.eps,
                         "residual": residual, "ruled_out": residual < 0,
                         "units": "bits"})


def cmd_hyper(args):
    try:
        pv, qv = (float(v) for v in args.pq.split(","))
        pq = hyper.HolderPair(pv, qv)
    except ValueError as exc:
        raise ValidationError(f"bad --pq {args.pq!r}: {exc}") from exc
    if args.rho is not None:
        params = dsbs.DsbsParams(args.rho)
        p = params.joint()
    elif args.p is not None:
        p = _joint_arg(args.p)
    else:
        raise ValidationError("hyper needs --p or --rho")
    if args.dry_run:
        return _json_out(args, {"valid": True})
    which = args.check_region
    grid = np.linspace(0.0, 1.0, args.grid)
    if args.rho is not None:
        surf = (dsbs.phi_surface if which == "forward" else dsbs.psi_surface)(
            dsbs.DsbsParams(args.rho), args.grid)
    else:
        fn = cpl.phi if which == "forward" else cpl.psi
        surf = cpl.surface_from_function(lambda s, t: fn(p, s, t), grid, grid, which)
    if args.alpha > 0 or args.beta > 0:
        member = hyper.restricted_region_member(pq, args.alpha, args.beta, which, surf)
        lam = (hyper.lambda_lower if which == "forward" else hyper.lambda_upper)(
            surf, pq, args.alpha, args.beta)
        payload = {"member": bool(member), "lambda": lam}
    else:
        cone = hyper.ConeModel(surf, "lower" if which == "forward" else "upper")
        member = hyper.region_member(pq, which, cone)
        payload = {"member": bool(member)}
        if not member:
            for a in np.linspace(0.0, 1.0, 721):
                cv = cone.direction_value(a, 1 - a)
                pv_ = pq.plane(a, 1 - a)
                bad = pv_ > cv + 1e-6 if which == "forward" else pv_ < cv - 1e-6
                if bad:
                    payload["witness"] = {"e1": float(a), "e2": float(1 - a),
                                          "plane": pv_, "cone": cv}
                    break
    _json_out(args, payload)


def cmd_exchange(args):
    try:
        u = np.loadtxt(args.matrix, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ValidationError(f"cannot read matrix: {exc}") from exc
    try:
        sp = exchange.SubspacePair(u, args.n1)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    if args.dry_run:
        return _json_out(args, {"valid": True})
    J, f1, f2 = exchange.exchange_partition(sp)
    Jc = [i for i in range(sp.n) if i not in J]
    res1 = max(float(np.abs(f1(row[J]) - row).max()) for row in sp.top)
    res2 = max(float(np.abs(f2(row[Jc]) - row).max()) for row in sp.bottom)
    _json_out(args, {"J": list(J), "J_complement": Jc,
                     "residuals": {"top": res1, "bottom": res2}})


def cmd_verify(args):
    names = None if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    if args.dry_run:
        return _json_out(args, {"valid": True, "suites": names or "all"})
    results = verify.run_all(names)
    if not results:
        raise ValidationError(f"no such suite: {args.suite}")
    width = max(len(r["name"]) for r in results)
    lines = []
    for r in results:
        lines.append(f"{r['name']:<{width}}  {'PASS' if r['passed'] else 'FAIL'}")
    lines.append("")
    summary = {"results": [{k: _jsonable(v) for k, v in r.items()} for r in results]}
    _emit(args, "\n".join(lines) + json.dumps(
        {**summary, "config": _config_dict(args), "git_describe": _git_describe()},
        indent=2, sort_keys=True, default=str) + "\n")
    if not all(r["passed"] for r in results):
        sys.exit(1)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


# -- parser ------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="typeflow")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (atomic write); default stdout")
        p.add_argument("--seed", type=int, default=2024)
        p.add_argument("--dry-run", action="store_true",
                       help="validate inputs without computing")

    p = sub.add_parser("exponent", help="single-letter exponents at a rate pair")
    p.add_argument("--joint", required=True, help="JointDist JSON (inline or path)")
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--r2", type=float, required=True)
    p.add_argument("--refine", type=int, default=2)
    common(p)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("region", help="rate-region boundary polyline (CSV)")
    p.add_argument("--joint", required=True)
    p.add_argument("--kind", choices=["biclique", "hk"], default="biclique")
    p.add_argument("--resolution", type=float, default=0.01)
    common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("coupling", help="minimum-KL coupling of two marginals")
    p.add_argument("--p", required=True, help="reference JointDist JSON")
    p.add_argument("--qx", required=True, help="x-marginal Dist JSON")
    p.add_argument("--qy", required=True, help="y-marginal Dist JSON")
    common(p)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("surface", help="exponent surface samples (CSV)")
    p.add_argument("--p", help="reference JointDist JSON")
    p.add_argument("--rho", type=float, help="symmetric binary shortcut")
    p.add_argument("--which", choices=["phi", "psi", "theta-lower", "theta-upper"],
                   default="phi")
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--smax", type=float, default=1.0,
                   help="grid endpoint for general tables (nats)")
    common(p)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("bruteforce", help="exact/greedy subgraph density at tiny n")
    p.add_argument("--counts", required=True, help="joint counts, rows ; separated")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--m2", type=int, required=True)
    p.add_argument("--mode", choices=["exact", "greedy"], default="exact")
    p.add_argument("--minimize", action="store_true")
    common(p)
    p.set_defaults(func=cmd_bruteforce)

    p = sub.add_parser("dsbs", help="symmetric binary surfaces (CSV, bits)")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--surface", choices=["phi", "psi"], default="phi")
    p.add_argument("--grid", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_dsbs)

    p = sub.add_parser("bac", help="zero-error adder-channel rate bound")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=0.6933)
    p.add_argument("--r2", type=float, default=0.4177)
    p.add_argument("--step", type=float, default=1e-3)
    common(p)
    p.set_defaults(func=cmd_bac)

    p = sub.add_parser("hyper", help="strengthened Hoelder-pair region checks")
    p.add_argument("--p", help="reference JointDist JSON")
    p.add_argument("--rho", type=float, help="symmetric binary shortcut")
    p.add_argument("--check-region", choices=["forward", "reverse"], default="forward")
    p.add_argument("--pq", required=True, help="comma pair, e.g. 1.9,1.9")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_hyper)

    p = sub.add_parser("exchange", help="coordinate partition for a subspace split")
    p.add_argument("--matrix", required=True, help="CSV file with the orthogonal matrix")
    p.add_argument("--n1", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_exchange)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("--suite", default="all",
                   help="'all' or comma-separated suite names")
    common(p)
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv=None):
    threads = os.environ.get("TYPEFLOW_THREADS")
    limiter = None
    if threads:
        try:
            from threadpoolctl import threadpool_limits
            limiter = threadpool_limits(limits=int(threads))
        except (ImportError, ValueError):
            pass
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    except (ValueError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
    except SizeBudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        sys.exit(3)
    finally:
        if limiter is not None:
            limiter.unregister()
    sys.exit(0)


if __name__ == "__main__":
    main()
