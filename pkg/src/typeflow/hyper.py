"""Strengthened two-function Hoelder quantities built on the sampled
best/worst exponent surfaces.

A Hoelder pair (p, q) is admissible (forward) exactly when the plane
E1/p + E2/q stays below the best-case exponent surface; by convexity that
is equivalent to staying below the surface's cone at the origin, which we
extract from the samples by homogenization onto the simplex s + t = 1.
The reverse region mirrors this above the worst-case surface.  The
sharpened constants Lambda are box-anchored gaps between plane and
surface, computed as small LPs over the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .coupling import ExponentSurface


@dataclass(frozen=True)
class HolderPair:
    p: float
    q: float

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ValueError("exponents must be positive (inf allowed)")

    @property
    def inv_p(self):
        return 0.0 if math.isinf(self.p) else 1.0 / self.p

    @property
    def inv_q(self):
        return 0.0 if math.isinf(self.q) else 1.0 / self.q

    def plane(self, e1, e2):
        return self.inv_p * e1 + self.inv_q * e2


class ConeModel:
    """Directional limit at the origin of a convex (lower) or concave
    (upper) surface, from its samples: chords homogenized onto the simplex
    s + t = 1, then a 1-D hull over the simplex coordinate."""

    def __init__(self, surface: ExponentSurface, side, n_eval=4001):
        pts = surface.finite_points()
        mask = pts[:, 0] + pts[:, 1] > 0
        pts = pts[mask]
        denom = pts[:, 0] + pts[:, 1]
        x = pts[:, 0] / denom
        w = pts[:, 2] / denom
        self.side = side
        sgn = 1.0 if side == "lower" else -1.0
        best = {}
        for xi, wi in zip(np.round(x, 13), sgn * w):
            if xi not in best or wi < best[xi]:
                best[xi] = wi
        hull = []
        for xi in sorted(best):
            wi = best[xi]
            while len(hull) >= 2:
                (x1, w1), (x2, w2) = hull[-2], hull[-1]
                if (w2 - w1) * (xi - x1) >= (wi - w1) * (x2 - x1):
                    hull.pop()
                else:
                    break
            hull.append((xi, wi))
        self._hx = np.array([h[0] for h in hull])
        self._hw = sgn * np.array([h[1] for h in hull])
        self._xe = np.linspace(self._hx[0], self._hx[-1], n_eval)
        self._we = np.interp(self._xe, self._hx, self._hw)

    def direction_value(self, e1, e2):
        """Cone value at direction (e1, e2): for the lower side the least
        chord combination dominating the quadrant anchor, for the upper
        side the greatest one dominated by it."""
        if e1 < 0 or e2 < 0 or (e1 == 0 and e2 == 0):
            return 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            sa = np.where(self._xe > 0, e1 / self._xe, np.inf if e1 > 0 else 0.0)
            sb = np.where(self._xe < 1, e2 / (1 - self._xe), np.inf if e2 > 0 else 0.0)
        if self.side == "lower":
            scale = np.maximum(sa, sb)
            vals = scale * self._we
            vals = vals[np.isfinite(vals)]
            return float(vals.min()) if len(vals) else math.inf
        scale = np.minimum(sa, sb)
        vals = scale * self._we
        vals = vals[np.isfinite(vals)]
        return float(vals.max()) if len(vals) else 0.0


def region_member(pq: HolderPair, which, cone: ConeModel, tol=1e-6, n_dirs=721):
    """Forward: the plane must not exceed the best-exponent cone in any
    direction; reverse: must not fall below the worst-exponent cone."""
    if which == "forward":
        if pq.p < 1 or pq.q < 1:
            raise ValueError("forward needs p, q >= 1")
    elif which == "reverse":
        if not (0 < pq.p <= 1 and 0 < pq.q <= 1):
            raise ValueError("reverse needs p, q in (0, 1]")
    else:
        raise ValueError("which must be forward|reverse")
    for a in np.linspace(0.0, 1.0, n_dirs):
        cone_v = cone.direction_value(a, 1 - a)
        plane_v = pq.plane(a, 1 - a)
        if which == "forward" and plane_v > cone_v + tol:
            return False
        if which == "reverse" and plane_v < cone_v - tol:
            return False
    return True


def limit_slope(surface: ExponentSurface, E1, E2, which, ts=None):
    """Scaled small-anchor values (1/t) Theta(t E1, t E2) for dyadic t,
    checked monotone, plus the cone value they approach.  Returns
    (slope, per-t list)."""
    from .coupling import theta_lower_star, theta_upper_star

    if which == "reverse" and (E1 <= 0 or E2 <= 0):
        raise ValueError("reverse limit needs strictly positive directions")
    ts = ts or [2.0 ** -k for k in range(3, 11)]
    seq = []
    for t in ts:
        if which == "forward":
            seq.append(theta_lower_star(surface, t * E1, t * E2) / t)
        else:
            seq.append(theta_upper_star(surface, t * E1, t * E2) / t)
    cone = ConeModel(surface, "lower" if which == "forward" else "upper")
    return cone.direction_value(E1, E2), seq


def _anchored_lp(points, coeffs, const, sense1, b1, sense2, b2):
    """min over convex combinations lambda of coeffs . lambda + const with
    barycenter constraints sum(l*s) {sense1} b1, sum(l*t) {sense2} b2."""
    s, t = points[:, 0], points[:, 1]
    A_ub, b_ub = [], []
    for vec, sense, b in ((s, sense1, b1), (t, sense2, b2)):
        if sense == ">=":
            A_ub.append(-vec)
            b_ub.append(-b)
        else:
            A_ub.append(vec)
            b_ub.append(b)
    res = linprog(coeffs, A_ub=np.vstack(A_ub), b_ub=b_ub,
                  A_eq=np.ones((1, len(coeffs))), b_eq=[1.0],
                  bounds=(0, None), method="highs")
    if not res.success:
        return math.inf
    return float(res.fun) + const


def lambda_lower(phi_surface: ExponentSurface, pq: HolderPair, alpha, beta):
    """min over the box [alpha, E1max] x [beta, E2max] of
    (best exponent) - plane; the best exponent enters through its convex
    hull so the whole box minimization is one LP over the samples."""
    pts = phi_surface.finite_points()
    coeffs = pts[:, 2] - pq.inv_p * pts[:, 0] - pq.inv_q * pts[:, 1]
    return _anchored_lp(pts, coeffs, 0.0, ">=", alpha, ">=", beta)


def lambda_upper(psi_surface: ExponentSurface, pq: HolderPair, alpha, beta):
    """min over the box of plane - (worst exponent); the inner concave
    hull pins the plane at the componentwise max of anchor and barycenter,
    giving four LP regimes."""
    pts = psi_surface.finite_points()
    s, t, v = pts[:, 0], pts[:, 1], pts[:, 2]
    candidates = [
        # barycenter below the anchor in both coordinates
        _anchored_lp(pts, -v, pq.plane(alpha, beta), "<=", alpha, "<=", beta),
        # barycenter exceeds the anchor in s only
        _anchored_lp(pts, pq.inv_p * s - v, pq.inv_q * beta, ">=", alpha, "<=", beta),
        # in t only
        _anchored_lp(pts, pq.inv_q * t - v, pq.inv_p * alpha, "<=", alpha, ">=", beta),
        # in both
        _anchored_lp(pts, pq.inv_p * s + pq.inv_q * t - v, 0.0, ">=", alpha, ">=", beta),
    ]
    return min(candidates)


def restricted_region_member(pq: HolderPair, alpha, beta, which, surface, tol=1e-9):
    """Plane-vs-surface check on the anchored box only; valid for any
    (p, q) in (0, inf)^2."""
    if which == "forward":
        return lambda_lower(surface, pq, alpha, beta) >= -tol
    if which == "reverse":
        return lambda_upper(surface, pq, alpha, beta) >= -tol
    raise ValueError("which must be forward|reverse")


def ribbon_optimum(rho, E1, E2, which="forward", n=20001):
    """Best plane slope over the ribbon boundary (p-1)(q-1) = rho^2:
    forward maximizes E1/p + E2/q over p, q >= 1, reverse minimizes over
    p, q in (0, 1]."""
    u = np.logspace(-8, 8, n)
    if which == "forward":
        p = 1 + rho * u
        q = 1 + rho / u
        vals = E1 / p + E2 / q
        # p or q -> inf closures
        vals = np.append(vals, [E1, E2])
        return float(vals.max())
    p = 1 - rho * u
    q = 1 - rho / u
    mask = (p > 0) & (q > 0)
    vals = E1 / p[mask] + E2 / q[mask]
    return float(vals.min()) if len(vals) else math.inf
