import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from typeflow.probcore import (
    CondKernel,
    Dist,
    JointDist,
    JointNType,
    cond_kl,
    csiszar_sandwich,
    dist_from_json_dict,
    entropy,
    enumerate_joint_types_with_marginals,
    enumerate_ntypes,
    info_measures,
    kl_div,
    ntype_from_json_dict,
    type_class_count,
)

LN2 = math.log(2.0)


def rand_simplex(rng, k):
    return rng.dirichlet(np.ones(k))


def test_dist_validation():
    with pytest.raises(ValueError):
        Dist(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        Dist(np.array([-0.1, 1.1]))
    with pytest.raises(ValueError):
        Dist(np.array([0.5, 0.5]), base="decibels")
    d = Dist.normalize([2.0, 6.0])
    assert np.allclose(d.probs, [0.25, 0.75])
    assert list(Dist(np.array([0.0, 1.0])).support()) == [1]


def test_info_measures_uniform_independent():
    m = info_measures(JointDist(np.full((2, 2), 0.25)))
    assert m["H_XY"] == pytest.approx(2 * LN2)
    assert m["I_XY"] == pytest.approx(0.0, abs=1e-12)


def test_info_measures_diagonal():
    m = info_measures(JointDist(np.diag([0.5, 0.5])))
    assert m["H_X_given_Y"] == pytest.approx(0.0, abs=1e-12)
    assert m["I_XY"] == pytest.approx(LN2)


def test_info_measures_identities_random():
    rng = np.random.default_rng(0)
    for _ in range(20):
        j = JointDist(rand_simplex(rng, 6).reshape(2, 3))
        m = info_measures(j)
        assert m["H_XY"] == pytest.approx(m["H_X"] + m["H_Y_given_X"], abs=1e-12)
        assert m["H_XY"] == pytest.approx(m["H_Y"] + m["H_X_given_Y"], abs=1e-12)
        assert m["I_XY"] >= 0


def test_kl_div_closed_form():
    v = kl_div(np.array([0.3, 0.7]), np.array([0.5, 0.5]))
    assert v == pytest.approx(0.3 * math.log(0.6) + 0.7 * math.log(1.4))
    assert kl_div(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0
    assert math.isinf(kl_div(np.array([1.0, 0.0]), np.array([0.0, 1.0])))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_kl_div_joint_convexity(seed, lam):
    rng = np.random.default_rng(seed)
    q1, q2 = rand_simplex(rng, 4), rand_simplex(rng, 4)
    p1, p2 = rand_simplex(rng, 4), rand_simplex(rng, 4)
    lhs = kl_div(lam * q1 + (1 - lam) * q2, lam * p1 + (1 - lam) * p2)
    rhs = lam * kl_div(q1, p1) + (1 - lam) * kl_div(q2, p2)
    assert lhs <= rhs + 1e-9


def test_cond_kl():
    ref = Dist(np.array([0.5, 0.5]))
    rows = [Dist(np.array([0.3, 0.7])), Dist(np.array([0.9, 0.1]))]
    k = CondKernel(rows)
    w = Dist(np.array([0.25, 0.75]))
    expect = 0.25 * kl_div(rows[0], ref) + 0.75 * kl_div(rows[1], ref)
    assert cond_kl(k, ref, w) == pytest.approx(expect)
    # single conditioning symbol reduces to kl_div
    assert cond_kl(CondKernel([rows[0]]), ref, Dist(np.array([1.0]))) == pytest.approx(
        kl_div(rows[0], ref))
    # zero-weight row with a support violation is ignored
    ref01 = Dist(np.array([0.0, 1.0]))
    rows2 = [ref01, Dist(np.array([1.0, 0.0]))]
    w2 = Dist(np.array([1.0, 0.0]))
    assert cond_kl(CondKernel(rows2), ref01, w2) == 0.0
    # positive-weight support violation propagates
    assert cond_kl(CondKernel(rows2), ref01, Dist(np.array([0.5, 0.5]))) == math.inf


def test_enumerate_ntypes_counts():
    assert len(enumerate_ntypes((2,), 2)) == 3
    assert len(enumerate_ntypes((2, 2), 2)) == 10
    half = Dist(np.array([0.5, 0.5]))
    fixed = enumerate_ntypes((2, 2), 2, fixed_marginals=(half, half))
    assert len(fixed) == 2
    # marginal not representable with denominator n -> empty
    third = Dist(np.array([1 / 3, 2 / 3]))
    assert enumerate_ntypes((2, 2), 2, fixed_marginals=(third, half)) == []


def test_enumerate_ntypes_exhaustive_unique():
    types = enumerate_ntypes((2, 3), 4)
    keys = {tuple(t.counts.ravel()) for t in types}
    assert len(keys) == len(types) == math.comb(4 + 5, 5)
    for t in types:
        assert int(t.counts.sum()) == 4


def test_enumerate_with_marginal_types():
    tx = JointNType(np.array([2, 2]), 4)
    ty = JointNType(np.array([1, 3]), 4)
    joints = enumerate_joint_types_with_marginals(tx, ty)
    for j in joints:
        assert np.array_equal(j.marginal_x_counts(), tx.counts)
        assert np.array_equal(j.marginal_y_counts(), ty.counts)
    assert len(joints) == 2  # first row (0,2),(1,1): second row forced


def test_type_class_count_basic():
    assert type_class_count(JointNType(np.array([2, 2]), 4)) == 6
    assert type_class_count(JointNType(np.array([[1, 1], [1, 1]]), 4)) == 24


def test_type_class_count_conditional_vs_enumeration():
    from typeflow.typegraph import pair_type_counts, sequences_with_counts

    t = JointNType(np.array([[2, 1], [1, 2]]), 6)
    x_seq = (0, 0, 0, 1, 1, 1)
    expect = type_class_count(t, conditional=x_seq)
    count = 0
    for y in sequences_with_counts(t.marginal_y_counts()):
        if np.array_equal(pair_type_counts(x_seq, y, 2, 2), t.counts):
            count += 1
    assert count == expect


def test_csiszar_sandwich_all_types():
    for n in (1, 3, 6, 12):
        for t in enumerate_ntypes((2, 2), n):
            lo, count, hi = csiszar_sandwich(t)
            assert lo <= count <= hi * (1 + 1e-12)


def test_json_round_trip():
    j = JointDist(np.array([[0.25, 0.25], [0.3, 0.2]]), base="bits")
    back = dist_from_json_dict(json.loads(json.dumps(j.to_json_dict())))
    assert np.allclose(back.probs, j.probs) and back.base == "bits"
    t = JointNType(np.array([[1, 2], [3, 4]]), 10)
    back = ntype_from_json_dict(json.loads(json.dumps(t.to_json_dict())))
    assert np.array_equal(back.counts, t.counts) and back.n == 10


def test_entropy_zero_log_zero():
    assert entropy(np.array([1.0, 0.0, 0.0])) == 0.0
