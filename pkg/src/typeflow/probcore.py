"""Finite-alphabet probability primitives.

Distributions and joint distributions over small alphabets, entropy /
divergence measures, exact enumeration of empirical distributions with
denominator n, and exact (big-integer) counting of the sequences realizing
them.  Everything here is in nats unless a value is explicitly tagged
"bits".
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

LN2 = math.log(2.0)
SIMPLEX_TOL = 1e-12


def _as_prob_array(probs, ndim):
    a = np.asarray(probs, dtype=float)
    if a.ndim != ndim:
        raise ValueError(f"expected {ndim}-dimensional probability table, got shape {a.shape}")
    if np.any(a < -SIMPLEX_TOL):
        raise ValueError("negative probability entry")
    if abs(float(a.sum()) - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {a.sum()}, not 1")
    return np.clip(a, 0.0, None)


@dataclass(frozen=True)
class Dist:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray
    base: str = "nats"

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_prob_array(self.probs, 1))
        if self.base not in ("nats", "bits"):
            raise ValueError(f"unknown base tag {self.base!r}")

    @classmethod
    def normalize(cls, weights, base="nats"):
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be nonnegative with positive sum")
        return cls(w / w.sum(), base)

    def __len__(self):
        return len(self.probs)

    def support(self):
        return np.nonzero(self.probs > 0)[0]

    def entropy(self):
        return entropy(self.probs)

    def to_json_dict(self):
        return {"probs": self.probs.tolist(), "base": self.base}


@dataclass(frozen=True)
class JointDist:
    """|X| x |Y| joint probability matrix."""

    probs: np.ndarray
    base: str = "nats"

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_prob_array(self.probs, 2))
        if self.base not in ("nats", "bits"):
            raise ValueError(f"unknown base tag {self.base!r}")

    @classmethod
    def normalize(cls, weights, base="nats"):
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be nonnegative with positive sum")
        return cls(w / w.sum(), base)

    @property
    def shape(self):
        return self.probs.shape

    def marginal_x(self):
        return Dist(self.probs.sum(axis=1), self.base)

    def marginal_y(self):
        return Dist(self.probs.sum(axis=0), self.base)

    def cond_y_given_x(self):
        """Row-conditional kernel; rows with zero marginal get uniform filler."""
        px = self.probs.sum(axis=1)
        rows = []
        for i, w in enumerate(px):
            if w > 0:
                rows.append(Dist(self.probs[i] / w, self.base))
            else:
                rows.append(Dist(np.full(self.shape[1], 1.0 / self.shape[1]), self.base))
        return CondKernel(rows)

    def cond_x_given_y(self):
        return JointDist(self.probs.T, self.base).cond_y_given_x()

    def to_json_dict(self):
        return {"probs": self.probs.tolist(), "base": self.base}


@dataclass(frozen=True)
class JointNType:
    """Exact empirical distribution with denominator n: integer count table."""

    counts: np.ndarray
    n: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if np.any(c < 0):
            raise ValueError("negative count")
        if int(c.sum()) != self.n:
            raise ValueError(f"counts sum to {c.sum()}, expected n={self.n}")
        object.__setattr__(self, "counts", c)

    def to_joint_dist(self):
        if self.counts.ndim == 1:
            raise ValueError("marginal type; use to_dist()")
        return JointDist(self.counts / self.n)

    def to_dist(self):
        if self.counts.ndim != 1:
            raise ValueError("joint type; use to_joint_dist()")
        return Dist(self.counts / self.n)

    def marginal_x_counts(self):
        return self.counts.sum(axis=1)

    def marginal_y_counts(self):
        return self.counts.sum(axis=0)

    def to_json_dict(self):
        return {"counts": self.counts.tolist(), "n": int(self.n)}


@dataclass(frozen=True)
class CondKernel:
    """List of conditional rows, one Dist per conditioning symbol."""

    rows: tuple

    def __init__(self, rows):
        object.__setattr__(self, "rows", tuple(rows))
        for r in self.rows:
            if not isinstance(r, Dist):
                raise TypeError("CondKernel rows must be Dist values")

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def matrix(self):
        return np.vstack([r.probs for r in self.rows])


# ---------------------------------------------------------------------------
# entropies and divergences


def entropy(p):
    """Shannon entropy in nats of a nonneg array summing to ~1; 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    pos = p[p > 0]
    return float(-np.sum(pos * np.log(pos)))


def info_measures(j: JointDist) -> dict:
    """Entropy bundle for a joint distribution (nats)."""
    p = j.probs
    h_xy = entropy(p)
    h_x = entropy(p.sum(axis=1))
    h_y = entropy(p.sum(axis=0))
    return {
        "H_XY": h_xy,
        "H_X": h_x,
        "H_Y": h_y,
        "H_X_given_Y": h_xy - h_y,
        "H_Y_given_X": h_xy - h_x,
        "I_XY": max(h_x + h_y - h_xy, 0.0),
    }


def kl_div(q, p) -> float:
    """D(q || p) in nats; +inf when supp(q) is not inside supp(p)."""
    qa = q.probs if isinstance(q, (Dist, JointDist)) else np.asarray(q, dtype=float)
    pa = p.probs if isinstance(p, (Dist, JointDist)) else np.asarray(p, dtype=float)
    qa = qa.ravel()
    pa = pa.ravel()
    mask = qa > 0
    if np.any(pa[mask] <= 0):
        return math.inf
    return float(np.sum(qa[mask] * (np.log(qa[mask]) - np.log(pa[mask]))))


def cond_kl(k: CondKernel, ref: Dist, weights: Dist) -> float:
    """Sum_w weights(w) * D(k_w || ref); zero-weight rows ignored."""
    total = 0.0
    for w, row in zip(weights.probs, k.rows):
        if w <= 0:
            continue
        d = kl_div(row, ref)
        if math.isinf(d):
            return math.inf
        total += w * d
    return total


# ---------------------------------------------------------------------------
# n-type enumeration


def _compositions(total, parts):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _marginal_counts_or_none(dist: Dist, n: int):
    """Exact integer counts n*dist, or None if not representable."""
    scaled = dist.probs * n
    counts = np.rint(scaled).astype(np.int64)
    if np.max(np.abs(scaled - counts)) > 1e-9 or counts.sum() != n:
        return None
    return counts


def enumerate_ntypes(shape, n, fixed_marginals=None):
    """All empirical distributions with denominator n over the given shape.

    shape is (|X|,) for marginal types or (|X|,|Y|) for joint types.  With
    fixed_marginals=(dist_x, dist_y) only joint types whose exact marginals
    equal those distributions are returned (empty list if the marginals are
    not expressible with denominator n).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(shape) == 1:
        if fixed_marginals is not None:
            raise ValueError("fixed_marginals only applies to joint shapes")
        return [JointNType(np.array(c, dtype=np.int64), n) for c in _compositions(n, shape[0])]
    if len(shape) != 2:
        raise ValueError("shape must be (|X|,) or (|X|,|Y|)")
    kx, ky = shape
    if fixed_marginals is None:
        return [
            JointNType(np.array(c, dtype=np.int64).reshape(kx, ky), n)
            for c in _compositions(n, kx * ky)
        ]
    row_counts = _marginal_counts_or_none(fixed_marginals[0], n)
    col_counts = _marginal_counts_or_none(fixed_marginals[1], n)
    if row_counts is None or col_counts is None:
        return []
    out = []

    def fill(row, remaining_cols, acc):
        if row == kx:
            if all(c == 0 for c in remaining_cols):
                out.append(JointNType(np.array(acc, dtype=np.int64).reshape(kx, ky), n))
            return
        for comp in _compositions(int(row_counts[row]), ky):
            if all(comp[j] <= remaining_cols[j] for j in range(ky)):
                fill(row + 1, tuple(remaining_cols[j] - comp[j] for j in range(ky)), acc + list(comp))

    fill(0, tuple(int(c) for c in col_counts), [])
    return out


def enumerate_joint_types_with_marginals(tx: JointNType, ty: JointNType):
    """Joint n-types whose exact marginal count vectors are tx and ty."""
    if tx.n != ty.n:
        raise ValueError("marginal types must share n")
    n = tx.n
    return enumerate_ntypes(
        (len(tx.counts), len(ty.counts)),
        n,
        fixed_marginals=(Dist(tx.counts / n), Dist(ty.counts / n)),
    )


# ---------------------------------------------------------------------------
# exact type-class counting


def _multinomial(n, counts):
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(int(c))
    return out


def type_class_count(t: JointNType, conditional=None):
    """Exact number of sequences (or pair-sequences) with empirical
    distribution t.

    Without `conditional` this is the multinomial coefficient over the cells
    of t.  With `conditional` = a sequence over X (tuple/list of symbol
    indices), t must be a joint type consistent with that sequence's symbol
    counts, and the result counts y-sequences whose pairwise empirical
    distribution with the fixed sequence equals t: a product of per-symbol
    multinomials.
    """
    counts = t.counts
    if conditional is None:
        return _multinomial(t.n, counts.ravel())
    if counts.ndim != 2:
        raise ValueError("conditional counting needs a joint type")
    seq = list(conditional)
    if len(seq) != t.n:
        raise ValueError("conditioning sequence length != n")
    from collections import Counter

    sym_counts = Counter(seq)
    total = 1
    for x in range(counts.shape[0]):
        row = counts[x]
        if sym_counts.get(x, 0) != int(row.sum()):
            raise ValueError("conditioning sequence inconsistent with joint type marginal")
        total *= _multinomial(int(row.sum()), row)
    return total


def csiszar_sandwich(t: JointNType):
    """(lower, count, upper) for the exact class count vs e^{nH} bounds."""
    count = type_class_count(t)
    h = entropy(t.counts / t.n)
    upper = math.exp(t.n * h)
    lower = upper / (t.n + 1) ** t.counts.size
    return lower, count, upper


# ---------------------------------------------------------------------------
# JSON plumbing shared with the CLI


def dist_from_json_dict(d):
    probs = np.asarray(d["probs"], dtype=float)
    base = d.get("base", "nats")
    if probs.ndim == 1:
        return Dist(probs, base)
    return JointDist(probs, base)


def ntype_from_json_dict(d):
    return JointNType(np.asarray(d["counts"], dtype=np.int64), int(d["n"]))
