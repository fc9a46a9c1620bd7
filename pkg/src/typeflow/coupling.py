"""Minimum-relative-entropy couplings and the small-set expansion exponents.

The workhorse is the I-projection of a reference joint distribution onto
the polytope of couplings with prescribed marginals, computed by iterative
proportional fitting.  On top of it sit the sphere-constrained surfaces
phi (best case) and psi (worst case), their convex/concave envelopes via
3-D hulls, and the quadrant-anchored exponents obtained from the
envelopes.  Everything in nats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.spatial import ConvexHull, QhullError

from .probcore import Dist, JointDist, kl_div

IPF_TOL = 1e-11
IPF_MAX_ITERS = 100_000


@dataclass(frozen=True)
class CouplingProblem:
    qx: Dist
    qy: Dist
    p: JointDist


@dataclass
class MinKLResult:
    value: float
    coupling: JointDist | None
    certificate: tuple | None = None  # (S, N(S)) witnessing infeasibility
    iterations: int = 0


def _hall_certificate(qx, qy, support):
    """A set S of x-symbols with qx(S) > qy(neighborhood(S)), or None."""
    sx = [i for i in np.nonzero(qx > 0)[0]]
    for r in range(1, len(sx) + 1):
        for S in itertools.combinations(sx, r):
            nbrs = np.nonzero(support[list(S)].any(axis=0))[0]
            if qx[list(S)].sum() > qy[nbrs].sum() + 1e-12:
                return tuple(S), tuple(int(j) for j in nbrs)
    return None


def min_kl_coupling(cp: CouplingProblem, tol=IPF_TOL, max_iters=IPF_MAX_ITERS) -> MinKLResult:
    """I-projection of cp.p onto the couplings of (cp.qx, cp.qy).

    Iterative proportional fitting on the support of p; at a finite optimum
    the coupling factorizes as a(x) b(y) p(x, y).  Infeasible support
    (no coupling lives inside supp(p)) gives value +inf plus a violated
    neighborhood-mass certificate.
    """
    qx, qy, p = cp.qx.probs, cp.qy.probs, cp.p.probs
    support = (p > 0) & (qx[:, None] > 0) & (qy[None, :] > 0)
    # rows/cols carrying q-mass must keep some support
    if np.any((qx > 0) & ~support.any(axis=1)) or np.any((qy > 0) & ~support.any(axis=0)):
        return MinKLResult(math.inf, None, _hall_certificate(qx, qy, p > 0))
    cert = _hall_certificate(qx, qy, p > 0)
    if cert is not None:
        return MinKLResult(math.inf, None, cert)
    cert = _hall_certificate(qy, qx, (p > 0).T)
    if cert is not None:
        return MinKLResult(math.inf, None, cert)
    q = np.where(support, p, 0.0)
    q /= q.sum()
    it = 0
    for it in range(1, max_iters + 1):
        rows = q.sum(axis=1)
        scale = np.divide(qx, rows, out=np.zeros_like(qx), where=rows > 0)
        q *= scale[:, None]
        cols = q.sum(axis=0)
        scale = np.divide(qy, cols, out=np.zeros_like(qy), where=cols > 0)
        q *= scale[None, :]
        err = max(np.abs(q.sum(axis=1) - qx).max(), np.abs(q.sum(axis=0) - qy).max())
        if err <= tol:
            break
    q = np.clip(q, 0.0, None)
    q /= q.sum()
    return MinKLResult(kl_div(q.ravel(), p.ravel()), JointDist(q), None, it)


def factorization_residual(result: MinKLResult, p: JointDist):
    """Max deviation of log(coupling/p) from a rank-one (row + column)
    pattern on the common support; near zero at a converged fixed point."""
    q = result.coupling.probs
    mask = (q > 0) & (p.probs > 0)
    logr = np.where(mask, np.log(np.where(mask, q, 1.0) / np.where(mask, p.probs, 1.0)), 0.0)
    # fit logr ~ u(x) + v(y) on the support by least squares
    idx = np.argwhere(mask)
    a = np.zeros((len(idx), q.shape[0] + q.shape[1]))
    for k, (i, j) in enumerate(idx):
        a[k, i] = 1.0
        a[k, q.shape[0] + j] = 1.0
    b = np.array([logr[i, j] for i, j in idx])
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    return float(np.abs(a @ sol - b).max())


# ---------------------------------------------------------------------------
# KL spheres and the phi / psi surfaces


def binary_sphere(px: Dist, s, tol=1e-12):
    """Parameters a with D((a, 1-a) || px) = s, for binary px; 0, 1, or 2
    solutions returned as sorted floats."""
    if s < 0:
        return []
    p0 = float(px.probs[0])
    if s == 0:
        return [p0]

    def d(a):
        return kl_div(np.array([a, 1 - a]), px.probs)

    out = []
    # left branch [0, p0], divergence decreasing from -log(1-p0)=d(0)
    for lo, hi, increasing in ((0.0, p0, False), (p0, 1.0, True)):
        dlo, dhi = d(lo), d(hi)
        lo_v, hi_v = (dlo, dhi) if not increasing else (dhi, dlo)
        # lo_v is the max of the branch
        if s > lo_v + tol:
            continue
        a, b = lo, hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if (d(mid) > s) == (not increasing):
                a = mid
            else:
                b = mid
        out.append(0.5 * (a + b))
    return sorted(set(round(v, 14) for v in out))


def _sphere_pairs(p: JointDist, s, t):
    """Candidate (qx, qy) marginal pairs on the two KL spheres.  Exact
    two-point enumeration for binary axes; constrained multi-start for
    larger alphabets."""
    px, py = p.marginal_x(), p.marginal_y()
    xs = binary_sphere(px, s) if len(px) == 2 else None
    ys = binary_sphere(py, t) if len(py) == 2 else None
    if xs is not None and ys is not None:
        return [(Dist(np.array([a, 1 - a])), Dist(np.array([b, 1 - b])))
                for a in xs for b in ys]
    return _sphere_pairs_general(p, s, t)


def _sphere_pairs_general(p: JointDist, s, t, n_starts=16, seed=2024):
    """Multi-start solves of the sphere-constrained extremization; returns
    stationary marginal pairs found for both the min and max."""
    rng = np.random.default_rng(seed)
    px, py = p.marginal_x().probs, p.marginal_y().probs
    kx, ky = len(px), len(py)

    def unpack(z):
        qx = np.clip(z[:kx], 1e-12, None)
        qy = np.clip(z[kx:], 1e-12, None)
        return qx / qx.sum(), qy / qy.sum()

    def dval(z):
        qx, qy = unpack(z)
        r = min_kl_coupling(CouplingProblem(Dist(qx), Dist(qy), p), tol=1e-9, max_iters=2000)
        return r.value

    cons = [
        {"type": "eq", "fun": lambda z: kl_div(unpack(z)[0], px) - s},
        {"type": "eq", "fun": lambda z: kl_div(unpack(z)[1], py) - t},
        {"type": "eq", "fun": lambda z: z[:kx].sum() - 1.0},
        {"type": "eq", "fun": lambda z: z[kx:].sum() - 1.0},
    ]
    pairs = []
    for sign in (1.0, -1.0):
        for _ in range(n_starts):
            z0 = np.concatenate([rng.dirichlet(np.ones(kx)), rng.dirichlet(np.ones(ky))])
            res = minimize(lambda z: sign * dval(z), z0, constraints=cons,
                           bounds=[(1e-9, 1.0)] * (kx + ky),
                           method="SLSQP", options={"maxiter": 120, "ftol": 1e-10})
            if res.success:
                qx, qy = unpack(res.x)
                if abs(kl_div(qx, px) - s) < 1e-6 and abs(kl_div(qy, py) - t) < 1e-6:
                    pairs.append((Dist(qx), Dist(qy)))
    return pairs


def phi(p: JointDist, s, t):
    """Best-case joint exponent at marginal exponents exactly (s, t)."""
    vals = [min_kl_coupling(CouplingProblem(qx, qy, p)).value for qx, qy in _sphere_pairs(p, s, t)]
    if not vals:
        raise ValueError(f"no sphere points at (s={s}, t={t})")
    return min(vals)


def psi(p: JointDist, s, t):
    """Worst-case joint exponent at marginal exponents exactly (s, t)."""
    vals = [min_kl_coupling(CouplingProblem(qx, qy, p)).value for qx, qy in _sphere_pairs(p, s, t)]
    if not vals:
        raise ValueError(f"no sphere points at (s={s}, t={t})")
    return max(vals)


def e_max(p: JointDist):
    """(E1_max, E2_max) = -log of the smallest marginal atoms."""
    px, py = p.marginal_x().probs, p.marginal_y().probs
    return -math.log(px[px > 0].min()), -math.log(py[py > 0].min())


# ---------------------------------------------------------------------------
# sampled surfaces and envelopes


@dataclass
class ExponentSurface:
    s_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray  # shape (len(s_grid), len(t_grid)); may contain +inf
    kind: str = "samples"
    planes: np.ndarray | None = None  # rows (a, b, c): plane a*s + b*t + c
    envelope_side: str | None = None  # "lower" | "upper"

    def finite_points(self):
        ss, tt = np.meshgrid(self.s_grid, self.t_grid, indexing="ij")
        mask = np.isfinite(self.values)
        return np.column_stack([ss[mask], tt[mask], self.values[mask]])

    def eval_envelope(self, s, t):
        if self.planes is None:
            raise ValueError("surface carries no envelope")
        vals = self.planes[:, 0] * s + self.planes[:, 1] * t + self.planes[:, 2]
        return float(vals.max() if self.envelope_side == "lower" else vals.min())


def surface_from_function(fn, s_grid, t_grid, kind="samples"):
    s_grid = np.asarray(s_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    vals = np.empty((len(s_grid), len(t_grid)))
    for i, s in enumerate(s_grid):
        for j, t in enumerate(t_grid):
            vals[i, j] = fn(float(s), float(t))
    return ExponentSurface(s_grid, t_grid, vals, kind)


def _hull_planes(points, side):
    """Affine pieces (a, b, c) of the lower/upper envelope of 3-D points."""
    try:
        hull = ConvexHull(points)
    except QhullError:
        # coplanar samples: single least-squares plane
        a = np.column_stack([points[:, 0], points[:, 1], np.ones(len(points))])
        coef, *_ = np.linalg.lstsq(a, points[:, 2], rcond=None)
        return np.array([coef])
    planes = []
    for eq in hull.equations:  # a*s + b*t + c*v + d = 0, outward normal
        nz = eq[2]
        if (side == "lower" and nz < -1e-12) or (side == "upper" and nz > 1e-12):
            planes.append([-eq[0] / nz, -eq[1] / nz, -eq[3] / nz])
    if not planes:
        a = np.column_stack([points[:, 0], points[:, 1], np.ones(len(points))])
        coef, *_ = np.linalg.lstsq(a, points[:, 2], rcond=None)
        return np.array([coef])
    return np.array(planes)


def _envelope(surface: ExponentSurface, side) -> ExponentSurface:
    pts = surface.finite_points()
    if len(pts) < 3:
        raise ValueError("need at least 3 finite samples")
    planes = _hull_planes(pts, side)
    ss, tt = np.meshgrid(surface.s_grid, surface.t_grid, indexing="ij")
    stacked = planes[:, 0, None, None] * ss + planes[:, 1, None, None] * tt + planes[:, 2, None, None]
    vals = stacked.max(axis=0) if side == "lower" else stacked.min(axis=0)
    if side == "lower":
        vals = np.minimum(vals, surface.values)
    else:
        vals = np.maximum(vals, np.where(np.isfinite(surface.values), surface.values, -np.inf))
    return ExponentSurface(surface.s_grid, surface.t_grid, vals,
                           kind=f"{side}-envelope({surface.kind})",
                           planes=planes, envelope_side=side)


def lower_convex_envelope(surface: ExponentSurface) -> ExponentSurface:
    return _envelope(surface, "lower")


def upper_concave_envelope(surface: ExponentSurface) -> ExponentSurface:
    return _envelope(surface, "upper")


# ---------------------------------------------------------------------------
# quadrant-anchored exponents


def _combination_lp(points, E1, E2, sense, maximize):
    """Extremize sum(w * v) over convex combinations of sample points whose
    barycenter (s, t) satisfies s {>=,<=} E1 and t {>=,<=} E2."""
    s, t, v = points[:, 0], points[:, 1], points[:, 2]
    sgn = 1.0 if sense == ">=" else -1.0
    res = linprog(
        -v if maximize else v,
        A_ub=np.vstack([-sgn * s, -sgn * t]),
        b_ub=[-sgn * E1, -sgn * E2],
        A_eq=np.ones((1, len(v))),
        b_eq=[1.0],
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise ValueError(f"anchored extremization infeasible at ({E1}, {E2})")
    val = -res.fun if maximize else res.fun
    bary = (float(s @ res.x), float(t @ res.x))
    return val, bary


def theta_lower_star(phi_surface: ExponentSurface, E1, E2, with_witness=False):
    """Smallest achievable joint exponent when both marginal exponents are
    at least (E1, E2): quadrant minimum of the lower convex envelope,
    computed as an LP over the sampled surface."""
    pts = phi_surface.finite_points()
    val, bary = _combination_lp(pts, E1, E2, ">=", maximize=False)
    return (val, bary) if with_witness else val


def theta_upper_star(psi_surface: ExponentSurface, E1, E2, p: JointDist | None = None,
                     with_witness=False):
    """Largest joint exponent with both marginal exponents at most (E1, E2):
    quadrant maximum of the upper concave envelope.

    At an exact axis anchor (E1 == 0 or E2 == 0) the operational quantity
    collapses to the remaining marginal exponent, which is what is
    returned; the formulation value at the axis stays available through
    the surface itself.  +inf when the reference joint has a zero cell.
    """
    if p is not None and np.any(p.probs <= 0):
        return math.inf
    if E1 == 0 or E2 == 0:
        return (max(E1, E2), (E1, E2)) if with_witness else max(E1, E2)
    pts = psi_surface.finite_points()
    val, bary = _combination_lp(pts, E1, E2, "<=", maximize=True)
    return (val, bary) if with_witness else val


# ---------------------------------------------------------------------------
# mixture representability and marginal-perturbation gluing


def coupling_polytope_distance(target: JointDist, q_w: Dist, rows_x, rows_y):
    """Min total-variation distance between target and any mixture
    sum_w q_w(w) * C_w, where C_w ranges over couplings of
    (rows_x[w], rows_y[w]).  Joint LP over all per-w couplings."""
    kx, ky = target.shape
    kw = len(q_w)
    cells = kx * ky
    n_vars = kw * cells + cells  # couplings + abs slacks
    c = np.zeros(n_vars)
    c[kw * cells:] = 0.5
    A_eq, b_eq = [], []
    for w in range(kw):
        for x in range(kx):
            row = np.zeros(n_vars)
            row[w * cells + x * ky:w * cells + (x + 1) * ky] = 1.0
            A_eq.append(row)
            b_eq.append(rows_x[w].probs[x])
        for y in range(ky):
            row = np.zeros(n_vars)
            row[w * cells + y:w * cells + cells:ky] = 1.0
            A_eq.append(row)
            b_eq.append(rows_y[w].probs[y])
    A_ub, b_ub = [], []
    for cell in range(cells):
        for sign in (1.0, -1.0):
            row = np.zeros(n_vars)
            for w in range(kw):
                row[w * cells + cell] = sign * q_w.probs[w]
            row[kw * cells + cell] = -1.0
            A_ub.append(row)
            b_ub.append(sign * target.probs.ravel()[cell])
    res = linprog(c, A_ub=np.array(A_ub), b_ub=np.array(b_ub),
                  A_eq=np.array(A_eq), b_eq=np.array(b_eq),
                  bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError("mixture LP failed")
    return max(float(res.fun), 0.0)


def tv_distance(a, b):
    pa = a.probs if hasattr(a, "probs") else np.asarray(a, dtype=float)
    pb = b.probs if hasattr(b, "probs") else np.asarray(b, dtype=float)
    return 0.5 * float(np.abs(pa.ravel() - pb.ravel()).sum())


def _tv_optimal_kernel(src: Dist, dst: Dist):
    """Conditional kernel k(x' | x) of a TV-optimal coupling taking src to
    dst: keep common mass in place, move excess proportionally."""
    a, b = src.probs, dst.probs
    keep = np.minimum(a, b)
    excess = a - keep        # mass to ship away per source symbol
    deficit = b - keep       # mass to absorb per target symbol
    k = np.zeros((len(a), len(b)))
    tot_def = deficit.sum()
    for x in range(len(a)):
        if a[x] <= 0:
            k[x, x] = 1.0
            continue
        k[x, x] = keep[x] / a[x]
        if excess[x] > 0 and tot_def > 0:
            k[x] += (excess[x] / a[x]) * (deficit / tot_def)
    return k


def marginal_continuity_check(qx: Dist, qy: Dist, px: Dist, py: Dist, q_coupling: JointDist):
    """Glue TV-optimal marginal couplings onto q_coupling to produce a
    coupling of (px, py) within TV(qx,px) + TV(qy,py) of it; returns
    (bound_holds, new_coupling, distance)."""
    kx = _tv_optimal_kernel(qx, px)
    ky = _tv_optimal_kernel(qy, py)
    new = kx.T @ q_coupling.probs @ ky
    new = JointDist.normalize(np.clip(new, 0, None))
    dist = tv_distance(new, q_coupling)
    bound = tv_distance(qx, px) + tv_distance(qy, py)
    ok = (dist <= bound + 1e-9
          and np.abs(new.marginal_x().probs - px.probs).max() < 1e-9
          and np.abs(new.marginal_y().probs - py.probs).max() < 1e-9)
    return ok, new, dist
