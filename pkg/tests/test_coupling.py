import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typeflow.coupling import (
    CouplingProblem,
    binary_sphere,
    coupling_polytope_distance,
    e_max,
    factorization_residual,
    lower_convex_envelope,
    marginal_continuity_check,
    min_kl_coupling,
    phi,
    psi,
    surface_from_function,
    theta_lower_star,
    theta_upper_star,
    tv_distance,
    upper_concave_envelope,
)
from typeflow.probcore import Dist, JointDist, kl_div


def dsbs_joint(rho):
    a, b = (1 + rho) / 4, (1 - rho) / 4
    return JointDist(np.array([[a, b], [b, a]]))


def test_coupling_marginals_and_nonnegativity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = JointDist(rng.dirichlet(np.ones(6)).reshape(2, 3))
        qx = Dist(rng.dirichlet(np.ones(2)))
        qy = Dist(rng.dirichlet(np.ones(3)))
        res = min_kl_coupling(CouplingProblem(qx, qy, p))
        assert np.allclose(res.coupling.probs.sum(axis=1), qx.probs, atol=1e-9)
        assert np.allclose(res.coupling.probs.sum(axis=0), qy.probs, atol=1e-9)
        assert res.value >= -1e-12


def test_coupling_identity_marginals_is_identity():
    p = dsbs_joint(0.5)
    res = min_kl_coupling(CouplingProblem(p.marginal_x(), p.marginal_y(), p))
    assert res.value == pytest.approx(0.0, abs=1e-10)
    assert np.allclose(res.coupling.probs, p.probs, atol=1e-6)


def test_coupling_value_below_product_coupling():
    # the independent coupling is feasible, so the optimum can't exceed it
    rng = np.random.default_rng(4)
    p = JointDist(rng.dirichlet(np.ones(4)).reshape(2, 2))
    qx = Dist(rng.dirichlet(np.ones(2)))
    qy = Dist(rng.dirichlet(np.ones(2)))
    res = min_kl_coupling(CouplingProblem(qx, qy, p))
    prod = kl_div(np.outer(qx.probs, qy.probs), p.probs)
    assert res.value <= prod + 1e-9


def test_optimal_coupling_factorizes():
    p = dsbs_joint(0.6)
    res = min_kl_coupling(CouplingProblem(
        Dist(np.array([0.3, 0.7])), Dist(np.array([0.8, 0.2])), p))
    assert factorization_residual(res, p) < 1e-7


def test_infeasible_support_certificate():
    # support of p forces x=0 -> y=0, but qy gives y=0 too little mass
    p = JointDist(np.array([[0.5, 0.0], [0.25, 0.25]]))
    qx = Dist(np.array([0.9, 0.1]))
    qy = Dist(np.array([0.5, 0.5]))
    res = min_kl_coupling(CouplingProblem(qx, qy, p))
    assert math.isinf(res.value)
    assert res.certificate is not None
    S, nbrs = res.certificate
    assert qx.probs[list(S)].sum() > qy.probs[list(nbrs)].sum()


def test_binary_sphere():
    px = Dist(np.array([0.5, 0.5]))
    pts = binary_sphere(px, 0.1)
    assert len(pts) == 2
    for a in pts:
        assert kl_div(np.array([a, 1 - a]), px.probs) == pytest.approx(0.1, abs=1e-9)
    assert binary_sphere(px, 0.0) == [0.5]
    assert binary_sphere(px, 10.0) == []  # beyond the max divergence log 2


def test_phi_psi_order_and_zero():
    p = dsbs_joint(0.5)
    assert phi(p, 0.0, 0.0) == pytest.approx(0.0, abs=1e-10)
    for s, t in [(0.05, 0.1), (0.2, 0.2)]:
        lo = phi(p, s, t)
        hi = psi(p, s, t)
        assert lo <= hi + 1e-12
        assert lo >= -1e-12


def test_e_max():
    p = dsbs_joint(0.5)
    ex, ey = e_max(p)
    assert ex == pytest.approx(math.log(2))
    assert ey == pytest.approx(math.log(2))


@pytest.fixture(scope="module")
def quad_surface():
    g = np.linspace(0, 1, 21)
    return surface_from_function(lambda s, t: s * s + t * t, g, g, "quad")


def test_envelopes_bracket_samples(quad_surface):
    low = lower_convex_envelope(quad_surface)
    up = upper_concave_envelope(quad_surface)
    assert np.all(low.values <= quad_surface.values + 1e-9)
    assert np.all(up.values >= quad_surface.values - 1e-9)
    # convex data: lower envelope is tight at the corners
    assert low.values[0, 0] == pytest.approx(0.0, abs=1e-9)
    assert low.values[-1, -1] == pytest.approx(2.0, abs=1e-9)
    # eval_envelope agrees with the grid values where the function is convex
    assert low.eval_envelope(0.5, 0.5) <= 0.5 + 1e-9


def test_theta_lower_star_quadrant_min(quad_surface):
    # s^2 + t^2 is convex and increasing, so the anchored optimum sits at
    # the anchor itself
    v = theta_lower_star(quad_surface, 0.3, 0.4)
    assert v == pytest.approx(0.3**2 + 0.4**2, abs=5e-3)
    v0 = theta_lower_star(quad_surface, 0.0, 0.0)
    assert v0 == pytest.approx(0.0, abs=1e-9)
    val, bary = theta_lower_star(quad_surface, 0.3, 0.4, with_witness=True)
    assert bary[0] >= 0.3 - 1e-9 and bary[1] >= 0.4 - 1e-9


def test_theta_upper_star_boundary_and_zero_cell(quad_surface):
    # exact axis anchors collapse to the remaining exponent
    assert theta_upper_star(quad_surface, 0.0, 0.7) == 0.7
    assert theta_upper_star(quad_surface, 0.7, 0.0) == 0.7
    p_zero = JointDist(np.array([[0.5, 0.0], [0.25, 0.25]]))
    assert math.isinf(theta_upper_star(quad_surface, 0.2, 0.2, p=p_zero))
    # interior: quadrant max over the concave envelope dominates samples
    v = theta_upper_star(quad_surface, 0.5, 0.5)
    assert v >= 0.5**2 + 0.5**2 - 1e-9


def test_coupling_polytope_distance_zero_for_true_mixture():
    rng = np.random.default_rng(9)
    c0 = JointDist(rng.dirichlet(np.ones(4)).reshape(2, 2))
    c1 = JointDist(rng.dirichlet(np.ones(4)).reshape(2, 2))
    qw = Dist(np.array([0.4, 0.6]))
    target = JointDist(0.4 * c0.probs + 0.6 * c1.probs)
    d = coupling_polytope_distance(
        target, qw,
        rows_x=[c0.marginal_x(), c1.marginal_x()],
        rows_y=[c0.marginal_y(), c1.marginal_y()])
    assert d == pytest.approx(0.0, abs=1e-8)


def test_coupling_polytope_distance_positive_when_unreachable():
    target = JointDist(np.array([[0.5, 0.0], [0.0, 0.5]]))
    qw = Dist(np.array([1.0]))
    uniform = Dist(np.array([0.5, 0.5]))
    # only couplings of uniform marginals are allowed; the anti-diagonal
    # coupling reaches the target exactly, so distance 0 — but forcing the
    # wrong marginals leaves a gap
    skew = Dist(np.array([0.9, 0.1]))
    d = coupling_polytope_distance(target, qw, rows_x=[skew], rows_y=[uniform])
    assert d >= 0.4 - 1e-8


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_marginal_continuity_bound(seed):
    rng = np.random.default_rng(seed)
    p = JointDist(rng.dirichlet(np.ones(4)).reshape(2, 2))
    qx = Dist(rng.dirichlet(np.ones(2)))
    qy = Dist(rng.dirichlet(np.ones(2)))
    res = min_kl_coupling(CouplingProblem(qx, qy, p))
    px = Dist(rng.dirichlet(np.ones(2)))
    py = Dist(rng.dirichlet(np.ones(2)))
    ok, new, dist = marginal_continuity_check(qx, qy, px, py, res.coupling)
    assert ok
    assert dist <= tv_distance(qx, px) + tv_distance(qy, py) + 1e-9


def test_tv_distance():
    assert tv_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
    assert tv_distance(Dist(np.array([0.5, 0.5])), Dist(np.array([0.5, 0.5]))) == 0.0
