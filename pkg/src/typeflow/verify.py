"""Acceptance checks binding the modules together.

Each check_* function returns a dict with at least {"name", "passed",
"detail"}.  run_all() executes every check (or a named subset) and is what
both the CLI `verify` command and the test suite drive.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import coupling as cpl
from . import dsbs
from . import exchange
from . import hyper
from . import singleletter as sl
from . import typegraph as tg
from .probcore import Dist, JointDist, JointNType, enumerate_ntypes, info_measures


def _result(name, passed, **detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _random_joint(rng, kx, ky):
    return JointDist(rng.dirichlet(np.ones(kx * ky)).reshape(kx, ky))


# -- 1 -----------------------------------------------------------------------

def check_bac_bound():
    t0 = time.time()
    rho_best, r2 = dsbs.bac_r2_max()
    ok = abs(rho_best - 0.6933) <= 0.003 and abs(r2 - 0.4177) <= 5e-4 and r2 < 0.4228
    return _result("bac_bound", ok, rho_best=rho_best, r2_bound=r2,
                   seconds=round(time.time() - t0, 1))


# -- 2 -----------------------------------------------------------------------

def check_pstar_vs_coupling_solver():
    t0 = time.time()
    worst_val, worst_p = 0.0, 0.0
    alphas = np.linspace(0.04, 0.96, 20)
    for rho in (0.3, 0.6, 0.9):
        params = dsbs.DsbsParams(rho)
        p = params.joint()
        for a in alphas:
            for b in alphas:
                res = cpl.min_kl_coupling(cpl.CouplingProblem(
                    Dist(np.array([a, 1 - a])), Dist(np.array([b, 1 - b])), p))
                closed = dsbs.dd(params, a, b)
                worst_val = max(worst_val, abs(res.value / dsbs.LN2 - closed))
                worst_p = max(worst_p, abs(res.coupling.probs[0, 0] - dsbs.p_star(params, a, b)))
    ok = worst_val <= 1e-6 and worst_p <= 1e-6
    return _result("pstar_vs_coupling_solver", ok, max_value_err=worst_val,
                   max_p_err=worst_p, seconds=round(time.time() - t0, 1))


# -- 3 -----------------------------------------------------------------------

def check_coupling_symmetry_inequality():
    worst_eq, worst_ineq = 0.0, -math.inf
    grid = np.linspace(0.01, 0.5, 50)
    for rho in (0.3, 0.6, 0.9):
        params = dsbs.DsbsParams(rho)
        for a in grid:
            for b in grid:
                v = dsbs.dd(params, a, b)
                v_flip = dsbs.dd(params, 1 - a, 1 - b)
                anti = dsbs.dd(params, a, 1 - b)
                anti_flip = dsbs.dd(params, 1 - a, b)
                worst_eq = max(worst_eq, abs(v - v_flip), abs(anti - anti_flip))
                worst_ineq = max(worst_ineq, v - anti)
    ok = worst_eq <= 1e-9 and worst_ineq <= 1e-9
    return _result("coupling_symmetry_inequality", ok, max_equality_err=worst_eq,
                   max_order_violation=worst_ineq)


# -- helpers for the surface-based checks -----------------------------------

def _theta_grids(params, grid=64):
    phis = dsbs.phi_surface(params, grid)
    psis = dsbs.psi_surface(params, grid)
    phil = cpl.lower_convex_envelope(phis)
    psiu = cpl.upper_concave_envelope(psis)
    # quadrant extremes over the same lattice
    tl = phil.values.copy()
    for i in range(tl.shape[0] - 2, -1, -1):
        tl[i, :] = np.minimum(tl[i, :], tl[i + 1, :])
    for j in range(tl.shape[1] - 2, -1, -1):
        tl[:, j] = np.minimum(tl[:, j], tl[:, j + 1])
    tu = psiu.values.copy()
    for i in range(1, tu.shape[0]):
        tu[i, :] = np.maximum(tu[i, :], tu[i - 1, :])
    for j in range(1, tu.shape[1]):
        tu[:, j] = np.maximum(tu[:, j], tu[:, j - 1])
    return phis, psis, phil, psiu, tl, tu


# -- 4 -----------------------------------------------------------------------

def check_prop4_sandwich():
    worst_f, worst_r = -math.inf, -math.inf
    for rho in (0.5, 0.9):
        params = dsbs.DsbsParams(rho)
        phis, psis, phil, psiu, tl, tu = _theta_grids(params, 61)
        g = phis.s_grid
        idx = range(0, len(g), 2)  # 31 anchors per axis
        for i in idx:
            for j in idx:
                fwd, rev = dsbs.prop4_bounds(params, g[i], g[j])
                worst_f = max(worst_f, fwd - tl[i, j])
                worst_r = max(worst_r, tu[i, j] - rev)
    ok = worst_f <= 1e-6 and worst_r <= 1e-6
    return _result("prop4_sandwich", ok, max_forward_violation=worst_f,
                   max_reverse_violation=worst_r)


# -- 5 -----------------------------------------------------------------------

def check_ordering_chain():
    worst = -math.inf
    for rho in (0.5, 0.9):
        params = dsbs.DsbsParams(rho)
        phis, psis, phil, psiu, tl, tu = _theta_grids(params, 64)
        chain = [tl, phil.values, phis.values, psis.values, psiu.values, tu]
        for a, b in zip(chain[:-1], chain[1:]):
            worst = max(worst, float((a - b).max()))
    return _result("ordering_chain", worst <= 1e-6, max_violation=worst)


# -- 6 -----------------------------------------------------------------------

def check_density_exponent_converse(n_max=5):
    worst = -math.inf
    checked = 0
    for n in range(1, n_max + 1):
        for t in enumerate_ntypes((2, 2), n):
            g = tg.build_graph(t)
            solver = sl.SingleLetterSolver(t.to_joint_dist(),
                                           lam_grid=[0.0, 0.5, 2.0], n_random_starts=1)
            for m1 in range(1, len(g.x_vertices) + 1):
                for m2 in range(1, len(g.y_vertices) + 1):
                    r1 = math.log(m1) / n
                    r2 = math.log(m2) / n
                    e_n = tg.exponent_n(g, r1, r2)
                    e_s = solver.e_star(r1, r2)
                    if e_n < e_s - 1e-3:
                        e_s = solver.e_star(r1, r2, refine=4)
                    worst = max(worst, e_s - e_n)
                    checked += 1
    ok = worst <= 1e-3
    # code-construction density never beats the exhaustive optimum
    t = JointNType(np.array([[1, 1], [1, 1]]), 4)
    g = tg.build_graph(t)
    p_xyw = JointNType(np.array([[[1, 0], [1, 0]], [[0, 1], [0, 1]]]), 4)
    w_seq = (0, 0, 1, 1)
    A, B, bound = tg.achievability_code(g, p_xyw, w_seq)
    exact = tg.gamma_n(g, len(A), len(B), mode="exact").density
    ok = ok and bound <= exact + 1e-12
    return _result("density_exponent_converse", ok, max_gap=worst, pairs=checked,
                   code_bound=bound, code_exact=exact)


# -- 7 -----------------------------------------------------------------------

def check_mutual_information_identity():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(50):
        t = _random_joint(rng, 2, 2 if i % 2 == 0 else 3)
        m = info_measures(t)
        solver = sl.SingleLetterSolver(t, lam_grid=[0.0, 1.0], n_random_starts=1)
        worst = max(worst, abs(solver.e_star(m["H_X"], m["H_Y"]) - m["I_XY"]))
    return _result("mutual_information_identity", worst <= 1e-3, max_err=worst)


# -- 8 -----------------------------------------------------------------------

def check_rate_profile_harness():
    rng = np.random.default_rng(7)
    totals = {}
    for i in range(100):
        t = _random_joint(rng, 2, 2 if i % 2 == 0 else 3)
        solver = sl.SingleLetterSolver(t, lam_grid=[0.0, 0.5, 2.0], n_random_starts=1)
        rep = sl.lemma2_harness(t, trials=20, rng=rng, solver=solver)
        for k, v in rep.items():
            if k != "samples":
                totals[k] = totals.get(k, 0) + v
    ok = all(v == 0 for v in totals.values())
    return _result("rate_profile_harness", ok, **totals)


# -- 9 -----------------------------------------------------------------------

def _points_to_segments(pts, seg_a, seg_b):
    """Min distance from each point to the union of segments (a_k, b_k)."""
    pts = np.asarray(pts, float)
    seg_a = np.asarray(seg_a, float)
    seg_b = np.asarray(seg_b, float)
    d = seg_b - seg_a  # (m, 2)
    den = np.maximum((d * d).sum(axis=1), 1e-300)
    diff = pts[:, None, :] - seg_a[None, :, :]  # (n, m, 2)
    s = np.clip((diff * d[None, :, :]).sum(axis=2) / den[None, :], 0.0, 1.0)
    proj = seg_a[None, :, :] + s[:, :, None] * d[None, :, :]
    return np.linalg.norm(pts[:, None, :] - proj, axis=2).min(axis=1)


def _hausdorff_to_segment(points, a, b):
    """Symmetric Hausdorff distance between the polyline through the sorted
    points and the segment ab, via exact point-to-segment projections."""
    pts = np.asarray(sorted(points), float)
    a, b = np.asarray(a, float), np.asarray(b, float)
    fwd = _points_to_segments(pts, a[None, :], b[None, :]).max()
    seg_samples = np.linspace(0, 1, 400)[:, None] * (b - a) + a
    rev = _points_to_segments(seg_samples, pts[:-1], pts[1:]).max()
    return max(float(fwd), float(rev))


def check_triangle_region():
    params = dsbs.DsbsParams(0.6)
    t_dsbs = params.joint()
    ok = sl.triangle_condition(t_dsbs)
    # uniform marginals, equal alphabet sizes
    ok = ok and sl.triangle_condition(JointDist(np.array([[0.3, 0.2], [0.2, 0.3]])))
    # uniform independent with unequal sizes
    ok = ok and sl.triangle_condition(JointDist(np.full((2, 3), 1 / 6)))
    rng = np.random.default_rng(11)
    false_count = 0
    trials = 200
    for _ in range(trials):
        t = _random_joint(rng, 2, 2)
        try:
            if not sl.triangle_condition(t):
                false_count += 1
        except ValueError:
            false_count += 1
    frac_false = false_count / trials
    ok = ok and frac_false >= 0.95
    m = info_measures(t_dsbs)
    h = m["H_X_given_Y"]
    frontier = [p for p in sl.biclique_region_star(t_dsbs, resolution=0.01) ]
    dist = _hausdorff_to_segment(frontier, (h, 0.0), (0.0, m["H_Y_given_X"]))
    ok = ok and dist <= 1e-3
    return _result("triangle_region", ok, fraction_false=frac_false, hausdorff=dist)


# -- 10 ----------------------------------------------------------------------

def check_exchange_partitions():
    rng = np.random.default_rng(2024)
    worst = 0.0
    failures = 0
    for n in range(4, 11):
        for _ in range(200):
            q, _ = np.linalg.qr(rng.normal(size=(n, n)))
            for n1 in range(1, n):
                sp = exchange.SubspacePair(q, n1)
                try:
                    J, f1, f2 = exchange.exchange_partition(sp)
                except RuntimeError:
                    failures += 1
                    continue
                Jc = [i for i in range(n) if i not in J]
                for row in sp.top:
                    worst = max(worst, float(np.abs(f1(row[J]) - row).max()))
                for row in sp.bottom:
                    worst = max(worst, float(np.abs(f2(row[Jc]) - row).max()))
    ok = failures == 0 and worst <= 1e-8
    return _result("exchange_partitions", ok, failures=failures, max_residual=worst)


# -- 11 ----------------------------------------------------------------------

def check_hyper_regions(rho=0.7):
    params = dsbs.DsbsParams(rho)
    # log-spaced grid reaching tiny radii: the homogenized chord slopes
    # converge to the origin cone linearly in the radius, so uniform grids
    # are far too coarse for the limit
    g = np.concatenate([[0.0], np.geomspace(1e-6, 1.0, 120)])
    phis = cpl.surface_from_function(
        lambda s, t: dsbs.phi_psi_dsbs(params, s, t)[0], g, g, "phi")
    psis = cpl.surface_from_function(
        lambda s, t: dsbs.phi_psi_dsbs(params, s, t)[1], g, g, "psi")
    cone_f = hyper.ConeModel(phis, "lower")
    cone_r = hyper.ConeModel(psis, "upper")
    rng = np.random.default_rng(5)
    mis = 0
    for _ in range(25):
        u = math.exp(rng.uniform(math.log(0.3), math.log(3.0)))
        for f, expect in ((1.01, True), (0.99, False)):
            p = 1 + rho * math.sqrt(f) * u
            q = 1 + rho * math.sqrt(f) / u
            got = hyper.region_member(hyper.HolderPair(p, q), "forward", cone_f, tol=2e-4)
            if got != expect:
                mis += 1
    for _ in range(25):
        u = math.exp(rng.uniform(math.log(0.8), math.log(1.25)))
        for f, expect in ((1.01, True), (0.99, False)):
            p = 1 - rho * math.sqrt(f) * u
            q = 1 - rho * math.sqrt(f) / u
            if not (0 < p <= 1 and 0 < q <= 1):
                continue
            got = hyper.region_member(hyper.HolderPair(p, q), "reverse", cone_r, tol=2e-4)
            if got != expect:
                mis += 1
    worst_lam = math.inf
    r = rho * math.sqrt(1.2)
    for u in (0.5, 1.0, 2.0):
        pf = 1 + r * u
        qf = 1 + r / u
        for ab in ((0.0, 0.0), (0.2, 0.1), (0.5, 0.5)):
            worst_lam = min(worst_lam,
                            hyper.lambda_lower(phis, hyper.HolderPair(pf, qf), *ab))
    # reverse pairs must keep both 1-p and 1-q in (0, 1): u in [r, 1/r]
    for u in np.linspace(r * 1.05, 1 / (r * 1.05), 3):
        pr = 1 - r * u
        qr = 1 - r / u
        for ab in ((0.0, 0.0), (0.2, 0.1), (0.5, 0.5)):
            worst_lam = min(worst_lam,
                            hyper.lambda_upper(psis, hyper.HolderPair(pr, qr), *ab))
    ok = mis == 0 and worst_lam >= -1e-9
    return _result("hyper_regions", ok, misclassified=mis, min_lambda=worst_lam)


# -- 12 ----------------------------------------------------------------------

def check_axis_discontinuity():
    params = dsbs.DsbsParams(0.9)
    ok = True
    margins = {}
    worst_cross = 0.0
    for e1 in (0.25, 0.5, 1.0):
        margin = dsbs.discontinuity_check(params, e1)
        margins[e1] = margin
        ok = ok and margin > 0.05
        direct = dsbs.theta_upper_axis_direct(params, e1)
        worst_cross = max(worst_cross, abs(dsbs.theta_upper_axis(params, e1) - direct))
    ok = ok and worst_cross <= 1e-4
    return _result("axis_discontinuity", ok, margins=margins, route_gap=worst_cross)


# -- 13 ----------------------------------------------------------------------

def check_sphere_pair_premises():
    out = {}
    ok = True
    for rho in (0.3, 0.6, 0.9):
        rep = dsbs.prop6_premise_check(dsbs.DsbsParams(rho), grid=40)
        out[rho] = (rep["convexity_violations"], rep["concavity_violations"])
        ok = ok and rep["convexity_violations"] == 0 and rep["concavity_violations"] == 0
    return _result("sphere_pair_premises", ok, violations=out)


ALL_CHECKS = [
    check_bac_bound,
    check_pstar_vs_coupling_solver,
    check_coupling_symmetry_inequality,
    check_prop4_sandwich,
    check_ordering_chain,
    check_density_exponent_converse,
    check_mutual_information_identity,
    check_rate_profile_harness,
    check_triangle_region,
    check_exchange_partitions,
    check_hyper_regions,
    check_axis_discontinuity,
    check_sphere_pair_premises,
]


def run_all(names=None):
    results = []
    for fn in ALL_CHECKS:
        short = fn.__name__.removeprefix("check_")
        if names and short not in names:
            continue
        results.append(fn())
    return results
