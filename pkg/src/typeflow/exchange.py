"""Coordinate-partition construction for orthogonal subspace splits.

Given an orthogonal matrix whose first n1 rows span one subspace and the
remaining rows its orthogonal complement, there is always a partition of
the coordinates into J (|J| = n1) and its complement such that both
row-block submatrices are nonsingular; vectors in either subspace can
then be reconstructed from their coordinates on the matching index set.
The existence follows from the generalized Laplace expansion of the full
determinant, which this module also exposes as a search for a
complementary-minor certificate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr

DET_TOL = 1e-12
EXHAUSTIVE_N = 14


@dataclass(frozen=True)
class SubspacePair:
    U: np.ndarray
    n1: int

    def __post_init__(self):
        u = np.asarray(self.U, dtype=float)
        n = u.shape[0]
        if u.shape != (n, n):
            raise ValueError("U must be square")
        if np.abs(u @ u.T - np.eye(n)).max() > 1e-10:
            raise ValueError("U is not orthogonal")
        if not 1 <= self.n1 <= n - 1:
            raise ValueError("n1 out of range")
        object.__setattr__(self, "U", u)

    @property
    def n(self):
        return self.U.shape[0]

    @property
    def top(self):
        return self.U[: self.n1]

    @property
    def bottom(self):
        return self.U[self.n1:]


def _scaled_abs_det(block):
    """|det| after normalizing rows to unit length (scale-free threshold)."""
    norms = np.linalg.norm(block, axis=1)
    if np.any(norms <= 0):
        return 0.0
    return abs(np.linalg.det(block / norms[:, None]))


def _qr_column_order(block):
    _, _, piv = qr(block, pivoting=True)
    return list(piv)


def exchange_partition(sp: SubspacePair, det_tol=DET_TOL):
    """Index set J with |J| = n1 making both diagonal blocks nonsingular,
    plus the two reconstruction maps.

    Greedy choice by pivoted-QR column order of the top block first; if
    the complementary block degenerates, fall back to scoring all
    partitions (n <= 14) by the smaller of the two normalized minors.
    Returns (J, f1, f2) with f1 mapping the J-coordinates of any top-space
    vector back to the full vector, f2 likewise on the complement.
    """
    n, n1 = sp.n, sp.n1
    top, bottom = sp.top, sp.bottom

    def score(J):
        Jc = [i for i in range(n) if i not in J]
        return min(_scaled_abs_det(top[:, J]), _scaled_abs_det(bottom[:, Jc]))

    J = sorted(_qr_column_order(top)[:n1])
    # fall back not only on outright failure but on poor conditioning, so
    # the reconstruction maps stay numerically accurate
    weak = 1e-6 if n <= EXHAUSTIVE_N else det_tol
    if score(J) <= weak:
        if n > EXHAUSTIVE_N:
            raise RuntimeError(
                f"greedy partition failed and n={n} exceeds the exhaustive cap; "
                f"top-block condition {np.linalg.cond(top[:, J]):.3e}")
        best = max(itertools.combinations(range(n), n1), key=score)
        if score(best) <= det_tol:
            raise RuntimeError("no partition passed the determinant threshold; "
                               "input likely violates orthogonality numerically")
        J = sorted(best)
    Jc = [i for i in range(n) if i not in J]
    inv_top = np.linalg.inv(top[:, J])
    inv_bot = np.linalg.inv(bottom[:, Jc])

    def f1(x_J):
        return np.asarray(x_J, dtype=float) @ inv_top @ top

    def f2(y_Jc):
        return np.asarray(y_Jc, dtype=float) @ inv_bot @ bottom

    return J, f1, f2


def laplace_certificate(B, H, det_tol=DET_TOL):
    """Column set L with |L| = |H| making the (H, L) minor and its
    complement both nonsingular; exists whenever det(B) != 0."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    if abs(np.linalg.det(B)) <= det_tol * n:
        raise ValueError("matrix is singular")
    H = sorted(H)
    Hc = [i for i in range(n) if i not in H]
    L = sorted(_qr_column_order(B[H])[: len(H)])
    Lc = [i for i in range(n) if i not in L]
    if _scaled_abs_det(B[np.ix_(H, L)]) > det_tol and _scaled_abs_det(B[np.ix_(Hc, Lc)]) > det_tol:
        return L
    for L in itertools.combinations(range(n), len(H)):
        Lc = [i for i in range(n) if i not in L]
        if (_scaled_abs_det(B[np.ix_(H, list(L))]) > det_tol
                and _scaled_abs_det(B[np.ix_(Hc, Lc)]) > det_tol):
            return sorted(L)
    raise RuntimeError("no complementary-minor certificate found")


def laplace_expansion_check(B, H):
    """Numeric validation of the row-block determinant expansion: the
    signed sum over column sets of complementary minors equals det(B).
    Returns (lhs, det)."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    H = sorted(H)
    Hc = [i for i in range(n) if i not in H]
    base = sum(H)
    total = 0.0
    for L in itertools.combinations(range(n), len(H)):
        Lc = [i for i in range(n) if i not in L]
        sign = (-1) ** (base + sum(L))
        total += sign * np.linalg.det(B[np.ix_(H, list(L))]) * np.linalg.det(B[np.ix_(Hc, Lc)])
    return total, float(np.linalg.det(B))
