import math

import numpy as np
import pytest

from typeflow.probcore import JointDist, info_measures
from typeflow.singleletter import (
    SingleLetterSolver,
    biclique_region_star,
    e_star,
    eps_n_biclique,
    eps_n_rates,
    f_star,
    hk_region_member,
    kernel_triple,
    lemma2_harness,
    pareto_frontier,
    triangle_condition,
    upsilon_star,
)

LN2 = math.log(2.0)


def dsbs_joint(rho):
    a, b = (1 + rho) / 4, (1 - rho) / 4
    return JointDist(np.array([[a, b], [b, a]]))


@pytest.fixture(scope="module")
def dsbs_solver():
    return SingleLetterSolver(dsbs_joint(0.6))


def test_kernel_triple_deterministic_extremes():
    t = dsbs_joint(0.5)
    m = info_measures(t)
    cells = 4
    const = np.zeros((cells, 1))
    const[:, 0] = 1.0
    a, b, c = kernel_triple(t, const)
    assert a == pytest.approx(m["H_X"], abs=1e-12)
    assert b == pytest.approx(m["H_Y"], abs=1e-12)
    assert c == pytest.approx(m["H_XY"], abs=1e-12)
    split = np.eye(cells)
    a, b, c = kernel_triple(t, split)
    assert max(abs(a), abs(b), abs(c)) < 1e-12


def test_f_star_axis_closed_forms(dsbs_solver):
    m = dsbs_solver.measures
    for r in (0.05, 0.2, 1.0):
        assert dsbs_solver.f_star(0.0, r) == pytest.approx(
            min(r, m["H_Y_given_X"]), abs=1e-3)
        assert dsbs_solver.f_star(r, 0.0) == pytest.approx(
            min(r, m["H_X_given_Y"]), abs=1e-3)


def test_f_star_saturates_at_joint_entropy(dsbs_solver):
    m = dsbs_solver.measures
    assert dsbs_solver.f_star(m["H_X"] + 1, m["H_Y"] + 1) == pytest.approx(
        m["H_XY"], abs=1e-6)


def test_e_star_equals_mutual_information_at_entropies(dsbs_solver):
    m = dsbs_solver.measures
    assert dsbs_solver.e_star(m["H_X"], m["H_Y"]) == pytest.approx(
        m["I_XY"], abs=1e-3)


def test_e_star_independent_source_zero():
    t = JointDist(np.full((2, 2), 0.25))
    assert e_star(t, LN2, LN2, refine=0) == pytest.approx(0.0, abs=1e-9)
    assert hk_region_member(t, LN2, LN2)


def test_negative_rates_rejected(dsbs_solver):
    with pytest.raises(ValueError):
        dsbs_solver.f_star(-0.1, 0.2)


def test_witness_reproduces_value(dsbs_solver):
    r1, r2 = 0.3, 0.4
    val = dsbs_solver.f_star(r1, r2)
    mix = dsbs_solver.witness(r1, r2)
    assert sum(w for w, _ in mix) == pytest.approx(1.0, abs=1e-6)
    total = a_tot = b_tot = 0.0
    for w, kern in mix:
        a, b, c = kernel_triple(dsbs_solver.t, kern)
        total += w * c
        a_tot += w * a
        b_tot += w * b
    assert total == pytest.approx(val, abs=1e-8)
    assert a_tot <= r1 + 1e-8 and b_tot <= r2 + 1e-8


def test_refine_only_improves(dsbs_solver):
    base = dsbs_solver.f_star(0.25, 0.25)
    assert dsbs_solver.f_star(0.25, 0.25, refine=2) >= base - 1e-12


def test_g_star_and_upsilon_star(dsbs_solver):
    m = dsbs_solver.measures
    # zero exponents ask for the full marginal rates: no common part needed
    assert dsbs_solver.upsilon_star(0.0, 0.0) == pytest.approx(
        m["H_XY"] - dsbs_solver.f_star(m["H_X"], m["H_Y"]), abs=1e-12)
    with pytest.raises(ValueError):
        dsbs_solver.upsilon_star(m["H_X"] + 0.5, 0.0)


def test_module_level_wrappers():
    t = dsbs_joint(0.4)
    s = SingleLetterSolver(t, lam_grid=[0.0, 1.0], n_random_starts=1)
    assert f_star(t, 0.2, 0.2, refine=0, solver=s) == pytest.approx(
        s.f_star(0.2, 0.2), abs=1e-12)
    assert upsilon_star(t, 0.1, 0.1, refine=0, solver=s) >= 0


def test_lemma2_harness_clean(dsbs_solver):
    rep = lemma2_harness(dsbs_solver.t, trials=10, solver=dsbs_solver)
    assert all(v == 0 for k, v in rep.items() if k != "samples")


def test_triangle_condition_cases():
    assert triangle_condition(dsbs_joint(0.7))
    # uniform marginals, equal sizes
    assert triangle_condition(JointDist(np.array([[0.3, 0.2], [0.2, 0.3]])))
    # uniform independent, unequal sizes
    assert triangle_condition(JointDist(np.full((2, 3), 1 / 6)))
    # generic asymmetric table fails
    assert not triangle_condition(JointDist(np.array([[0.5, 0.2], [0.1, 0.2]])))
    with pytest.raises(ValueError):
        triangle_condition(JointDist(np.diag([0.5, 0.5])))


def test_biclique_region_endpoints_and_monotone():
    t = dsbs_joint(0.6)
    m = info_measures(t)
    pts = biclique_region_star(t, resolution=0.02)
    assert pts[0] == pytest.approx((0.0, m["H_Y_given_X"]), abs=1e-9)
    assert pts[-1][1] == pytest.approx(0.0, abs=1e-9)
    assert pts[-1][0] == pytest.approx(m["H_X_given_Y"], abs=1e-9)
    r2s = [b for _, b in pts]
    assert all(a >= b for a, b in zip(r2s, r2s[1:]))


def test_pareto_frontier():
    pts = [(0.0, 1.0), (0.5, 0.5), (0.3, 0.3), (1.0, 0.0), (0.2, 0.9)]
    front = pareto_frontier(pts)
    assert (0.3, 0.3) not in front
    assert front == sorted(front)


def test_eps_slacks_vanish():
    assert eps_n_rates(10**6, 2, 2) < 0.01
    e1, e2 = eps_n_biclique(10**7, 2, 2)
    assert e1 < 0.01 and e2 < 0.01
    assert eps_n_rates(100, 2, 2) > eps_n_rates(1000, 2, 2)
