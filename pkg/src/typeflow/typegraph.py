"""Explicit bipartite graphs of joint empirical distributions at tiny n.

Vertices are the sequences realizing the two marginal types; an (x, y) pair
is an edge when the pairwise empirical distribution equals the joint type.
Provides exact and greedy subgraph-density maximization, the density
exponent, the directed single-set variant, biclique / independent-set
point sets, and conditional-type-class code constructions whose density
lower-bounds the exact optimum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .probcore import JointNType, type_class_count

DEFAULT_EDGE_CAP = 10**6
DEFAULT_CLASS_CAP = 4096
DEFAULT_SEARCH_BUDGET = 500_000


class SizeBudgetError(RuntimeError):
    pass


def sequences_with_counts(counts):
    """All distinct sequences (tuples of symbol indices) with the given
    per-symbol counts, in lexicographic order."""
    counts = [int(c) for c in counts]
    n = sum(counts)
    out = []

    def rec(prefix, remaining):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for sym, c in enumerate(remaining):
            if c > 0:
                remaining[sym] -= 1
                prefix.append(sym)
                rec(prefix, remaining)
                prefix.pop()
                remaining[sym] += 1

    rec([], counts)
    return out


def pair_type_counts(xs, ys, kx, ky):
    m = np.zeros((kx, ky), dtype=np.int64)
    for a, b in zip(xs, ys):
        m[a, b] += 1
    return m


@dataclass(frozen=True)
class TypeGraph:
    joint_type: JointNType
    x_vertices: tuple
    y_vertices: tuple
    adjacency: tuple  # one bitmask over y_vertices per x-vertex

    @property
    def n(self):
        return self.joint_type.n

    def edge_count(self):
        return sum(bin(row).count("1") for row in self.adjacency)

    def density(self):
        return self.edge_count() / (len(self.x_vertices) * len(self.y_vertices))

    def left_degrees(self):
        return [bin(row).count("1") for row in self.adjacency]

    def right_degrees(self):
        degs = [0] * len(self.y_vertices)
        for row in self.adjacency:
            while row:
                low = row & -row
                degs[low.bit_length() - 1] += 1
                row ^= low
        return degs


@dataclass(frozen=True)
class DensityReport:
    A_size: int
    B_size: int
    edges: int
    density: float
    method: str
    A: tuple = ()
    B: tuple = ()


def build_graph(t: JointNType, edge_cap=DEFAULT_EDGE_CAP, class_cap=DEFAULT_CLASS_CAP):
    counts = t.counts
    if counts.ndim != 2:
        raise ValueError("need a joint type")
    kx, ky = counts.shape
    nx = type_class_count(JointNType(t.marginal_x_counts(), t.n))
    ny = type_class_count(JointNType(t.marginal_y_counts(), t.n))
    if nx > class_cap or ny > class_cap:
        raise SizeBudgetError(f"type classes too large: |X-side|={nx}, |Y-side|={ny} (cap {class_cap})")
    if nx * ny > edge_cap:
        raise SizeBudgetError(f"potential edges {nx * ny} exceed cap {edge_cap}")
    xs = sequences_with_counts(t.marginal_x_counts())
    ys = sequences_with_counts(t.marginal_y_counts())
    adj = []
    for x in xs:
        row = 0
        for j, y in enumerate(ys):
            if np.array_equal(pair_type_counts(x, y, kx, ky), counts):
                row |= 1 << j
        adj.append(row)
    return TypeGraph(t, tuple(xs), tuple(ys), tuple(adj))


def _row_hits(graph, A_mask_indices):
    """For a set of x-indices, the number of selected neighbors of each y."""
    hits = np.zeros(len(graph.y_vertices), dtype=np.int64)
    for i in A_mask_indices:
        row = graph.adjacency[i]
        while row:
            low = row & -row
            hits[low.bit_length() - 1] += 1
            row ^= low
    return hits


def _best_B(hits, M2, maximize=True):
    """Top (or bottom) M2 y-indices by selected-neighbor count; lowest-index
    tie-break for reproducibility."""
    order = np.lexsort((np.arange(len(hits)), -hits if maximize else hits))
    chosen = order[:M2]
    return np.sort(chosen), int(hits[chosen].sum())


def gamma_n(graph: TypeGraph, M1, M2, mode="exact", budget=DEFAULT_SEARCH_BUDGET,
            minimize=False):
    """Extremal edge density over A x B with |A|=M1, |B|=M2.

    Exact mode enumerates all A subsets (the inner B choice reduces to
    picking the M2 rows with the most — or, when minimizing, fewest —
    selected neighbors, which is exact).  Greedy mode alternates the same
    row-selection step between sides from a degree-seeded start.
    """
    nx, ny = len(graph.x_vertices), len(graph.y_vertices)
    if not (1 <= M1 <= nx and 1 <= M2 <= ny):
        raise ValueError(f"sizes ({M1},{M2}) out of range ({nx},{ny})")
    if mode == "exact":
        n_sets = math.comb(nx, M1)
        if n_sets > budget:
            raise SizeBudgetError(
                f"exact search needs {n_sets} A-subsets > budget {budget}; use greedy")
        best = None
        for A in itertools.combinations(range(nx), M1):
            hits = _row_hits(graph, A)
            B, edges = _best_B(hits, M2, maximize=not minimize)
            better = best is None or (edges < best[0] if minimize else edges > best[0])
            if better:
                best = (edges, A, tuple(int(b) for b in B))
        edges, A, B = best
        return DensityReport(M1, M2, edges, edges / (M1 * M2), "exact", tuple(A), B)
    if mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}")
    degs = np.array(graph.left_degrees())
    order = np.lexsort((np.arange(nx), -degs if not minimize else degs))
    A = tuple(int(i) for i in np.sort(order[:M1]))
    edges_prev = -1
    for _ in range(50):
        hits = _row_hits(graph, A)
        B, edges = _best_B(hits, M2, maximize=not minimize)
        col_hits = np.zeros(nx, dtype=np.int64)
        b_mask = 0
        for b in B:
            b_mask |= 1 << int(b)
        for i in range(nx):
            col_hits[i] = bin(graph.adjacency[i] & b_mask).count("1")
        orderA = np.lexsort((np.arange(nx), -col_hits if not minimize else col_hits))
        A = tuple(int(i) for i in np.sort(orderA[:M1]))
        hits = _row_hits(graph, A)
        B, edges = _best_B(hits, M2, maximize=not minimize)
        if edges == edges_prev:
            break
        edges_prev = edges
    return DensityReport(M1, M2, edges, edges / (M1 * M2), "greedy",
                         A, tuple(int(b) for b in B))


def representable_size(graph_side_len, n, rate, tol=1e-9):
    """Integer M = e^{nR}, or None when the rate is not representable."""
    m = math.exp(n * rate)
    mi = round(m)
    if mi < 1 or mi > graph_side_len or abs(m - mi) > tol * max(1.0, m):
        return None
    return mi


def exponent_n(graph: TypeGraph, r1, r2, mode="exact", budget=DEFAULT_SEARCH_BUDGET):
    """-(1/n) log of the maximal density at sizes e^{n r1}, e^{n r2}."""
    n = graph.n
    M1 = representable_size(len(graph.x_vertices), n, r1)
    M2 = representable_size(len(graph.y_vertices), n, r2)
    if M1 is None or M2 is None:
        near1 = min(max(1, round(math.exp(n * r1))), len(graph.x_vertices))
        near2 = min(max(1, round(math.exp(n * r2))), len(graph.y_vertices))
        raise ValueError(
            f"rates ({r1},{r2}) not representable at n={n}; nearest sizes ({near1},{near2}) "
            f"give rates ({math.log(near1)/n},{math.log(near2)/n})")
    rep = gamma_n(graph, M1, M2, mode=mode, budget=budget)
    if rep.density <= 0:
        return math.inf
    return -math.log(rep.density) / n


def gamma_directed(graph: TypeGraph, M, budget=DEFAULT_SEARCH_BUDGET):
    """Max directed-edge density over a single vertex set A = B of size M.

    Requires both sides to carry the same sequences (equal alphabets and
    equal marginal types); a directed edge x -> y means the pair (x, y)
    lies in the joint class.
    """
    if graph.x_vertices != graph.y_vertices:
        raise ValueError("directed variant needs identical side vertex sets")
    nx = len(graph.x_vertices)
    if not 1 <= M <= nx:
        raise ValueError("M out of range")
    n_sets = math.comb(nx, M)
    if n_sets > budget:
        raise SizeBudgetError(f"{n_sets} subsets > budget {budget}")
    best = None
    for A in itertools.combinations(range(nx), M):
        mask = 0
        for i in A:
            mask |= 1 << i
        edges = sum(bin(graph.adjacency[i] & mask).count("1") for i in A)
        if best is None or edges > best[0]:
            best = (edges, A)
    edges, A = best
    return DensityReport(M, M, edges, edges / (M * M), "exact", tuple(A), tuple(A))


def biclique_points_n(graph: TypeGraph, budget=DEFAULT_SEARCH_BUDGET):
    """All (M1, M2) admitting a complete A x B subgraph."""
    nx, ny = len(graph.x_vertices), len(graph.y_vertices)
    points = set()
    for M1 in range(1, nx + 1):
        if math.comb(nx, M1) > budget:
            raise SizeBudgetError("subset budget exceeded; partial result suppressed")
        best_full = 0
        for A in itertools.combinations(range(nx), M1):
            hits = _row_hits(graph, A)
            best_full = max(best_full, int(np.sum(hits == M1)))
        for M2 in range(1, best_full + 1):
            points.add((M1, M2))
    return points


def independent_set_points_n(graph: TypeGraph, budget=DEFAULT_SEARCH_BUDGET):
    """All (M1, M2) admitting an edgeless A x B subgraph."""
    nx, ny = len(graph.x_vertices), len(graph.y_vertices)
    points = set()
    for M1 in range(1, nx + 1):
        if math.comb(nx, M1) > budget:
            raise SizeBudgetError("subset budget exceeded; partial result suppressed")
        best_empty = 0
        for A in itertools.combinations(range(nx), M1):
            hits = _row_hits(graph, A)
            best_empty = max(best_empty, int(np.sum(hits == 0)))
        for M2 in range(1, best_empty + 1):
            points.add((M1, M2))
    return points


def upsilon_n(graph: TypeGraph, E1, E2, mode="exact", budget=DEFAULT_SEARCH_BUDGET):
    """Best exponent of the pair probability of A x B under the uniform
    distribution on the joint class, when the set sizes decay at exponents
    (E1, E2) relative to the side classes."""
    n = graph.n
    nx, ny = len(graph.x_vertices), len(graph.y_vertices)
    r1 = math.log(nx) / n - E1
    r2 = math.log(ny) / n - E2
    e_n = exponent_n(graph, r1, r2, mode=mode, budget=budget)
    n_edges = graph.edge_count()
    return e_n + math.log(n_edges) / n - r1 - r2


def conditional_class(seqs, w_seq, pair_counts):
    """Subset of seqs whose joint empirical counts with w_seq equal
    pair_counts (a |A| x |W| count table)."""
    pair_counts = np.asarray(pair_counts, dtype=np.int64)
    ka, kw = pair_counts.shape
    out = []
    for s in seqs:
        if np.array_equal(pair_type_counts(s, w_seq, ka, kw), pair_counts):
            out.append(s)
    return out


def achievability_code(graph: TypeGraph, p_xyw: JointNType, w_seq):
    """Conditional-type-class code pair for a three-way type consistent with
    the graph's joint type; returns (A, B, density lower bound).

    A is the set of x-sequences whose pairwise type with w_seq equals the
    (X, W) marginal of p_xyw, B likewise for y; the guaranteed density is
    |{(x, y) pairs with full joint type p_xyw given w_seq}| / (|A| |B|).
    """
    c = p_xyw.counts
    if c.ndim != 3:
        raise ValueError("need a three-way (X, Y, W) type")
    if not np.array_equal(c.sum(axis=2), graph.joint_type.counts):
        raise ValueError("three-way type does not marginalize to the graph's joint type")
    w_counts = c.sum(axis=(0, 1))
    from collections import Counter

    wc = Counter(w_seq)
    if any(wc.get(w, 0) != int(w_counts[w]) for w in range(len(w_counts))):
        raise ValueError("w_seq type inconsistent with the three-way type")
    A = conditional_class(graph.x_vertices, w_seq, c.sum(axis=1))
    B = conditional_class(graph.y_vertices, w_seq, c.sum(axis=0))
    # pairs (x, y) whose joint-with-w counts equal c: product over w of
    # multinomials over the (x, y) cells
    pairs = 1
    for w in range(c.shape[2]):
        cell = c[:, :, w]
        pairs *= type_class_count(JointNType(cell, int(cell.sum())))
    bound = pairs / (len(A) * len(B)) if A and B else 0.0
    return A, B, min(bound, 1.0)
