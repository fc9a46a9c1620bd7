import math

import numpy as np
import pytest

from typeflow import dsbs
from typeflow.coupling import surface_from_function
from typeflow.hyper import (
    ConeModel,
    HolderPair,
    lambda_lower,
    lambda_upper,
    limit_slope,
    region_member,
    restricted_region_member,
    ribbon_optimum,
)


def test_holder_pair():
    pq = HolderPair(2.0, math.inf)
    assert pq.inv_p == 0.5 and pq.inv_q == 0.0
    assert pq.plane(0.4, 100.0) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        HolderPair(0.0, 1.0)


@pytest.fixture(scope="module")
def dsbs_cones():
    params = dsbs.DsbsParams(0.7)
    g = np.concatenate([[0.0], np.geomspace(1e-6, 1.0, 80)])
    phis = surface_from_function(
        lambda s, t: dsbs.phi_psi_dsbs(params, s, t)[0], g, g, "phi")
    psis = surface_from_function(
        lambda s, t: dsbs.phi_psi_dsbs(params, s, t)[1], g, g, "psi")
    return params, phis, psis, ConeModel(phis, "lower"), ConeModel(psis, "upper")


def test_cone_matches_closed_forms(dsbs_cones):
    params, _, _, cone_f, cone_r = dsbs_cones
    rho = params.rho
    for a in (0.2, 0.5, 0.8):
        e1, e2 = a, 1 - a
        fwd, rev = dsbs.prop4_bounds(params, e1, e2)
        # accuracy limited by the angular resolution of the chord grid
        assert cone_f.direction_value(e1, e2) == pytest.approx(fwd, abs=1e-3)
        assert cone_r.direction_value(e1, e2) == pytest.approx(rev, abs=1e-3)
    assert cone_f.direction_value(0.0, 0.0) == 0.0


def test_region_member_ribbon(dsbs_cones):
    params, _, _, cone_f, cone_r = dsbs_cones
    rho = params.rho
    # clearly inside / outside the forward ribbon
    assert region_member(HolderPair(1 + 2 * rho, 1 + 2 * rho), "forward", cone_f)
    assert not region_member(HolderPair(1 + 0.5 * rho, 1 + 0.5 * rho), "forward", cone_f)
    # reverse: (1-p)(1-q) >= rho^2 inside
    assert region_member(HolderPair(1 - 0.9, 1 - 0.9), "reverse", cone_r)
    assert not region_member(HolderPair(1 - 0.3, 1 - 0.3), "reverse", cone_r)
    with pytest.raises(ValueError):
        region_member(HolderPair(0.5, 0.5), "forward", cone_f)
    with pytest.raises(ValueError):
        region_member(HolderPair(2.0, 2.0), "reverse", cone_r)


def test_lambda_signs(dsbs_cones):
    params, phis, psis, _, _ = dsbs_cones
    rho = params.rho
    inside_f = HolderPair(1 + 1.2 * rho, 1 + 1.2 * rho)
    outside_f = HolderPair(1 + 0.3 * rho, 1 + 0.3 * rho)
    for ab in ((0.0, 0.0), (0.3, 0.2)):
        assert lambda_lower(phis, inside_f, *ab) >= -1e-9
    # outside the region the unanchored gap goes negative
    assert lambda_lower(phis, outside_f, 0.0, 0.0) < -1e-6
    inside_r = HolderPair(1 - 0.9, 1 - 0.9)
    assert lambda_upper(psis, inside_r, 0.0, 0.0) >= -1e-9
    outside_r = HolderPair(1 - 0.3, 1 - 0.3)
    assert lambda_upper(psis, outside_r, 0.0, 0.0) < -1e-6


def test_restricted_region_consistency(dsbs_cones):
    params, phis, psis, _, _ = dsbs_cones
    rho = params.rho
    assert restricted_region_member(
        HolderPair(1 + 1.2 * rho, 1 + 1.2 * rho), 0.0, 0.0, "forward", phis)
    assert not restricted_region_member(
        HolderPair(1 + 0.3 * rho, 1 + 0.3 * rho), 0.0, 0.0, "forward", phis)
    # anchored away from the origin the constraint relaxes, so the
    # restricted region contains the full region
    assert restricted_region_member(
        HolderPair(1 + 1.2 * rho, 1 + 1.2 * rho), 0.4, 0.4, "forward", phis)


def test_limit_slope_monotone(dsbs_cones):
    params, phis, psis, _, _ = dsbs_cones
    cone_v, seq = limit_slope(phis, 0.5, 0.5, "forward")
    # scaled forward anchors decrease toward the cone as t shrinks
    assert all(a >= b - 1e-9 for a, b in zip(seq, seq[1:]))
    assert seq[-1] == pytest.approx(cone_v, abs=5e-3)
    cone_r, seq_r = limit_slope(psis, 0.5, 0.5, "reverse")
    assert all(a <= b + 1e-9 for a, b in zip(seq_r, seq_r[1:]))
    with pytest.raises(ValueError):
        limit_slope(psis, 0.0, 0.5, "reverse")


def test_ribbon_optimum_closed_form():
    rho = 0.6
    for e1, e2 in [(0.3, 0.7), (0.5, 0.5), (0.9, 0.2)]:
        fwd, rev = dsbs.prop4_bounds(dsbs.DsbsParams(rho), e1, e2)
        assert ribbon_optimum(rho, e1, e2, "forward") == pytest.approx(fwd, abs=1e-5)
        assert ribbon_optimum(rho, e1, e2, "reverse") == pytest.approx(rev, abs=1e-5)


def test_cone_model_simple_convex():
    # v = s + 2t is already a cone; chords reproduce it exactly
    g = np.linspace(0, 1, 41)
    surf = surface_from_function(lambda s, t: s + 2 * t, g, g)
    cone = ConeModel(surf, "lower")
    assert cone.direction_value(1.0, 0.0) == pytest.approx(1.0, abs=1e-9)
    assert cone.direction_value(0.0, 1.0) == pytest.approx(2.0, abs=1e-9)
    assert cone.direction_value(0.5, 0.5) == pytest.approx(1.5, abs=1e-9)
