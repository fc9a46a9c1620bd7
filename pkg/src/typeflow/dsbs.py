"""Closed-form suite for the symmetric binary pair with correlation rho.

The joint table is [[ (1+rho)/4, (1-rho)/4 ], [ (1-rho)/4, (1+rho)/4 ]]
(uniform marginals, crossover (1-rho)/2).  Everything in this module is in
bits.  Provides the 4-cell coupling divergence and its closed-form
minimizer, the best/worst sphere surfaces, the forward/reverse cone
bounds, Hoelder-pair ribbons, the axis-anchored worst-case exponent (with
its discontinuity margin), and the zero-error binary-adder-channel rate
bound derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .probcore import JointDist
from . import coupling as cpl

LN2 = math.log(2.0)


@dataclass(frozen=True)
class DsbsParams:
    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")

    @property
    def k(self):
        return ((1 + self.rho) / (1 - self.rho)) ** 2

    def joint(self) -> JointDist:
        a, b = (1 + self.rho) / 4, (1 - self.rho) / 4
        return JointDist(np.array([[a, b], [b, a]]))

    def table(self):
        a, b = (1 + self.rho) / 4, (1 - self.rho) / 4
        return np.array([a, b, b, a])


def h2(x):
    """Binary entropy in bits."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument outside [0, 1]")
    if x in (0.0, 1.0):
        return 0.0
    return -(x * math.log2(x) + (1 - x) * math.log2(1 - x))


def h2_inv(y):
    """Inverse of the binary entropy restricted to [0, 1/2]; bisection."""
    if not 0.0 <= y <= 1.0:
        raise ValueError("argument outside [0, 1]")
    lo, hi = 0.0, 0.5
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if h2(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _coupling_interval(alpha, beta):
    return max(0.0, alpha + beta - 1.0), min(alpha, beta)


def d_alpha_beta(params: DsbsParams, alpha, beta, p):
    """Relative entropy (bits) of the coupling (p, a-p, b-p, 1+p-a-b)
    against the rho-correlated table; convex in p."""
    lo, hi = _coupling_interval(alpha, beta)
    if not lo - 1e-12 <= p <= hi + 1e-12:
        raise ValueError(f"p={p} outside coupling interval [{lo}, {hi}]")
    cells = np.array([p, alpha - p, beta - p, 1 + p - alpha - beta])
    cells = np.clip(cells, 0.0, None)
    ref = params.table()
    mask = cells > 0
    return float(np.sum(cells[mask] * np.log2(cells[mask] / ref[mask])))


def p_star(params: DsbsParams, alpha, beta):
    """Closed-form minimizer of d_alpha_beta over the coupling interval."""
    k = params.k
    u = (k - 1) * (alpha + beta) + 1
    disc = u * u - 4 * k * (k - 1) * alpha * beta
    p = (u - math.sqrt(max(disc, 0.0))) / (2 * (k - 1))
    lo, hi = _coupling_interval(alpha, beta)
    return min(max(p, lo), hi)


def dd(params: DsbsParams, alpha, beta):
    """Minimum-coupling divergence (bits) at marginal biases (alpha, beta)."""
    return d_alpha_beta(params, alpha, beta, p_star(params, alpha, beta))


def phi_psi_dsbs(params: DsbsParams, s, t):
    """(best, worst) joint exponents at marginal exponents exactly (s, t),
    s, t in [0, 1] bits: the aligned and anti-aligned sphere pairs."""
    if not (0.0 <= s <= 1.0 and 0.0 <= t <= 1.0):
        raise ValueError("s, t must lie in [0, 1] bits")
    a = h2_inv(1.0 - s)
    b = h2_inv(1.0 - t)
    return dd(params, a, b), dd(params, a, 1.0 - b)


def prop4_bounds(params: DsbsParams, E1, E2):
    """(forward lower bound on the best exponent, reverse upper bound on
    the worst exponent), both in bits."""
    rho = params.rho
    r2 = rho * rho
    if E2 < r2 * E1:
        fwd = E1
    elif E2 > E1 / r2:
        fwd = E2
    else:
        fwd = (E1 + E2 - 2 * rho * math.sqrt(E1 * E2)) / (1 - r2)
    rev = (E1 + E2 + 2 * rho * math.sqrt(E1 * E2)) / (1 - r2)
    return fwd, rev


def ribbon_member(params: DsbsParams, p, q, which):
    rho2 = params.rho ** 2
    if which == "forward":
        if not (p >= 1 and q >= 1):
            raise ValueError("forward ribbon needs p, q >= 1")
    elif which == "reverse":
        if not (0 < p <= 1 and 0 < q <= 1):
            raise ValueError("reverse ribbon needs p, q in (0, 1]")
    else:
        raise ValueError("which must be forward|reverse")
    return (p - 1) * (q - 1) >= rho2


# ---------------------------------------------------------------------------
# surfaces (bits) for envelope-based exponents


def phi_surface(params: DsbsParams, grid=64):
    g = np.linspace(0.0, 1.0, grid)
    return cpl.surface_from_function(lambda s, t: phi_psi_dsbs(params, s, t)[0], g, g, "phi")


def psi_surface(params: DsbsParams, grid=64):
    g = np.linspace(0.0, 1.0, grid)
    return cpl.surface_from_function(lambda s, t: phi_psi_dsbs(params, s, t)[1], g, g, "psi")


# ---------------------------------------------------------------------------
# axis-anchored worst-case exponent: one marginal exponent forced to zero


def _axis_curve(params: DsbsParams, n=4001):
    """Points (cost, value) for a single auxiliary atom: the free marginal
    is (b, 1-b), the pinned one uniform; cost = its divergence from
    uniform, value = the min-coupling divergence (bits)."""
    bs = np.linspace(0.0, 0.5, n)
    cost = np.array([1.0 - h2(b) for b in bs])
    val = np.array([dd(params, b, 0.5) for b in bs])
    return cost, val


def _upper_hull(xs, ys):
    """Upper concave hull (Andrew chain) of points sorted by x."""
    order = np.argsort(xs)
    pts = list(zip(xs[order], ys[order]))
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) <= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


class AxisThetaUpper:
    """Worst-case joint exponent when one marginal exponent is pinned to 0:
    mixtures of single-bias atoms under a mean-cost budget, i.e. the upper
    concave hull of the atom curve, evaluated as a running max."""

    def __init__(self, params: DsbsParams, n=4001):
        cost, val = _axis_curve(params, n)
        hull = _upper_hull(np.append(cost, 0.0), np.append(val, 0.0))
        self.xs = np.array([p[0] for p in hull])
        self.ys = np.array([p[1] for p in hull])

    def __call__(self, E):
        E = min(max(E, 0.0), 1.0)
        best = 0.0
        for i in range(len(self.xs)):
            if self.xs[i] <= E:
                best = max(best, self.ys[i])
            else:
                if i > 0:
                    x1, y1, x2, y2 = self.xs[i - 1], self.ys[i - 1], self.xs[i], self.ys[i]
                    if x2 > x1:
                        best = max(best, y1 + (y2 - y1) * (E - x1) / (x2 - x1))
                break
        return best


def theta_upper_axis(params: DsbsParams, E, n=4001):
    """Worst-case exponent at (E, 0+) (equivalently (0+, E)); the
    formulation value, strictly above E for E > 0."""
    return AxisThetaUpper(params, n)(E)


def theta_upper_axis_direct(params: DsbsParams, E, seed=2024):
    """Independent two-atom optimization cross-check of theta_upper_axis."""
    rng = np.random.default_rng(seed)

    def cost(b):
        return 1.0 - h2(min(max(b, 0.0), 1.0))

    def val(b):
        return dd(params, min(max(b, 0.0), 0.5), 0.5)

    def neg(z):
        q, b1, b2 = z
        return -(q * val(b1) + (1 - q) * val(b2))

    cons = [{"type": "ineq", "fun": lambda z: E - (z[0] * cost(z[1]) + (1 - z[0]) * cost(z[2]))}]
    best = 0.0
    for _ in range(24):
        z0 = np.array([rng.uniform(), rng.uniform(0, 0.5), rng.uniform(0, 0.5)])
        res = minimize(neg, z0, constraints=cons,
                       bounds=[(0, 1), (0, 0.5), (0, 0.5)],
                       method="SLSQP", options={"maxiter": 200, "ftol": 1e-12})
        if res.success:
            best = max(best, -res.fun)
    return best


def discontinuity_check(params: DsbsParams, E1):
    """Gap between the axis-limit formulation value at (E1, 0+) and the
    pinned-axis operational value E1; positive for E1 > 0."""
    if E1 == 0:
        return 0.0
    if not 0 < E1 <= 1:
        raise ValueError("E1 must lie in (0, 1]")
    return theta_upper_axis(params, E1) - E1


# ---------------------------------------------------------------------------
# zero-error binary-adder-channel rate bound


def bac_target(rho):
    return 1.5 - math.log2(3.0 - rho)


def bac_r2_bound(params: DsbsParams, tol=1e-6, axis=None):
    """Largest r2 in [0, 1/2] whose axis exponent constraint
    theta_upper(0, 1 - 2 r2) >= 3/2 - log2(3 - rho) still holds."""
    axis = axis or AxisThetaUpper(params)
    target = bac_target(params.rho)
    lo, hi = 0.0, 0.5
    if axis(1.0) < target:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if axis(1.0 - 2 * mid) >= target:
            lo = mid
        else:
            hi = mid
    return lo


def bac_bound(params: DsbsParams, r2, eps=0.0, psi_surf=None):
    """Constraint residual of the adder-channel exponent inequality at rate
    r2; negative residual rules the rate out.  eps = 0 uses the axis
    route; eps > 0 sweeps the allowed mixture weight interval."""
    if eps == 0.0:
        return 0.5 * theta_upper_axis(params, 1.0 - 2 * r2) - 0.5 * bac_target(params.rho)
    delta = math.sqrt(LN2 * eps / 2.0)
    psi_surf = psi_surf or psi_surface(params)
    best = -math.inf
    for lam in np.linspace(0.5 - delta, 0.5 + delta, 11):
        if lam <= 0:
            continue
        e1 = eps / lam
        e2 = (lam + eps - r2) / lam
        if e2 < 0:
            continue
        lhs = lam * cpl.theta_upper_star(psi_surf, min(e1, 1.0), min(max(e2, 0.0), 1.0))
        rhs = lam * (2.5 - math.log2(3 - params.rho)) - 0.5 - eps - delta
        best = max(best, lhs - rhs)
    return best


def bac_r2_max(rho_lo=0.5, rho_hi=0.9, step=1e-3, r2_tol=1e-6):
    """Scan the correlation parameter for the strongest rate bound; golden
    section refine around the grid minimum.  Returns (rho_best, r2_bound)."""
    rhos = np.arange(rho_lo, rho_hi + step / 2, step)
    vals = []
    for rho in rhos:
        p = DsbsParams(float(rho))
        vals.append(bac_r2_bound(p, tol=r2_tol))
    i = int(np.argmin(vals))
    a = rhos[max(i - 1, 0)]
    b = rhos[min(i + 1, len(rhos) - 1)]
    gr = (math.sqrt(5) - 1) / 2

    def f(rho):
        return bac_r2_bound(DsbsParams(float(rho)), tol=r2_tol)

    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(30):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    rho_best = 0.5 * (a + b)
    return float(rho_best), float(f(rho_best))


# ---------------------------------------------------------------------------
# premise check for sphere-pair optimality


def prop6_premise_check(params: DsbsParams, grid=40, fine=8, tol=1e-8):
    """Midpoint convexity of the quadrant-min of the best-case surface and
    midpoint concavity of the worst-case surface, on a grid x grid lattice
    over [0,1]^2 bits.  Returns violation counts (expected 0)."""
    g = np.linspace(0.0, 1.0, grid)
    # quadrant minimum via a fine suffix-min plus local polish
    fine_n = (grid - 1) * fine + 1
    gf = np.linspace(0.0, 1.0, fine_n)
    alphas = np.array([h2_inv(1.0 - s) for s in gf])
    phif = np.empty((fine_n, fine_n))
    for i in range(fine_n):
        for j in range(fine_n):
            phif[i, j] = dd(params, alphas[i], alphas[j])
    suff = phif.copy()
    for i in range(fine_n - 2, -1, -1):
        suff[i, :] = np.minimum(suff[i, :], suff[i + 1, :])
    for j in range(fine_n - 2, -1, -1):
        suff[:, j] = np.minimum(suff[:, j], suff[:, j + 1])
    argmin_cache = {}

    def quadrant_min(i, j):
        if (i, j) in argmin_cache:
            return argmin_cache[(i, j)]
        ii, jj = i * fine, j * fine
        sub = phif[ii:, jj:]
        k = int(np.argmin(sub))
        si = gf[ii + k // sub.shape[1]]
        tj = gf[jj + k % sub.shape[1]]
        def obj(z):
            s = min(max(z[0], 0.0), 1.0)
            t = min(max(z[1], 0.0), 1.0)
            return dd(params, h2_inv(1.0 - s), h2_inv(1.0 - t))

        res = minimize(obj, np.array([si, tj]),
                       bounds=[(g[i], 1.0), (g[j], 1.0)], method="L-BFGS-B")
        val = min(float(res.fun), float(suff[ii, jj]))
        argmin_cache[(i, j)] = val
        return val

    big_phi = np.empty((grid, grid))
    for i in range(grid):
        for j in range(grid):
            big_phi[i, j] = quadrant_min(i, j)
    ac = np.array([h2_inv(1.0 - s) for s in g])
    psiv = np.empty((grid, grid))
    for i in range(grid):
        for j in range(grid):
            psiv[i, j] = dd(params, ac[i], 1.0 - ac[j])

    def midpoint_violations(m, convex):
        count = 0
        for di in range(0, (grid - 1) // 2 + 1):
            for dj in range(-(grid - 1) // 2, (grid - 1) // 2 + 1):
                if di == 0 and dj <= 0:
                    continue
                i0, i1 = (0, grid - 2 * di)
                lo = max(0, -2 * dj)
                hi = grid - max(0, 2 * dj)
                if i1 <= i0 or hi <= lo:
                    continue
                a = m[i0:i1, lo:hi]
                b = m[i0 + 2 * di:grid, lo + 2 * dj:hi + 2 * dj]
                mid = m[i0 + di:grid - di, lo + dj:hi + dj]
                gap = a + b - 2 * mid
                if convex:
                    count += int(np.sum(gap < -tol))
                else:
                    count += int(np.sum(gap > tol))
        return count

    return {
        "convexity_violations": midpoint_violations(big_phi, convex=True),
        "concavity_violations": midpoint_violations(psiv, convex=False),
        "grid": grid,
    }
