"""
Property-based tests of the geometry and path-loss primitives.
"""
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from mmv2i.config import RURAL_PATHLOSS, URBAN_PATHLOSS
from mmv2i.model import (
    AntennaPattern,
    LinkState,
    equal_pathloss_distance_A,
    interferer_gain_distribution,
    max_covered_distance_d,
    road_projection_b,
    state_probability,
)

along = st.floats(min_value=1.0, max_value=1e5)
half_width = st.floats(min_value=0.1, max_value=10.0)
beamwidth = st.floats(min_value=0.01, max_value=3.0)
states = st.sampled_from([LinkState.LOS, LinkState.NLOS])
models = st.sampled_from([URBAN_PATHLOSS, RURAL_PATHLOSS])


@given(along, half_width)
def test_road_projection_round_trip(x, W):
    """b(sqrt(x^2 + W^2)) = x."""
    np.testing.assert_allclose(road_projection_b(math.hypot(x, W), W), x, rtol=1e-9)


@given(models, states, st.floats(min_value=1.0, max_value=1e4))
def test_equal_pathloss_distance_inverts(pl, state, r):
    """Mapping to the other state and back returns the start distance."""
    there = equal_pathloss_distance_A(pl, state, r)
    back = equal_pathloss_distance_A(pl, state.other, there)
    np.testing.assert_allclose(back, r, rtol=1e-9)
    np.testing.assert_allclose(pl.unit_gain(state) * r ** -pl.exponent(state),
                               pl.unit_gain(state.other) * there ** -pl.exponent(state.other),
                               rtol=1e-9)


@given(st.floats(min_value=1.0, max_value=1e4), half_width, beamwidth, beamwidth)
def test_covered_distance_grows_with_beamwidth(r, W, psi_a, psi_b):
    """A wider beam is never left sooner."""
    r = max(r, W)
    lo, hi = sorted((psi_a, psi_b))
    assert max_covered_distance_d(r, W, lo) <= max_covered_distance_d(r, W, hi) * (1 + 1e-12)


@given(st.floats(min_value=1.0, max_value=1e4), half_width, beamwidth)
def test_covered_distance_lower_bound(r, W, psi):
    """d(r) never drops below 2 W tan(psi/4)."""
    r = max(r, W)
    floor = 2 * W * math.tan(psi / 4)
    assert max_covered_distance_d(r, W, psi) >= floor * (1 - 1e-9)


@given(half_width, beamwidth)
def test_covered_distance_at_road_edge(W, psi):
    """d(W) = W tan(psi/2)."""
    np.testing.assert_allclose(max_covered_distance_d(W, W, psi), W * math.tan(psi / 2), rtol=1e-9)


@settings(max_examples=50)
@given(models, st.floats(min_value=0.0, max_value=5e3), st.floats(min_value=0.0, max_value=10.0))
def test_state_probabilities_sum_to_one(pl, x, lateral):
    """P_LOS(x) + P_NLOS(x) = 1, each in [0, 1]."""
    p_los = state_probability(pl, LinkState.LOS, x, lateral)
    p_nlos = state_probability(pl, LinkState.NLOS, x, lateral)
    assert 0.0 <= p_los <= 1.0
    np.testing.assert_allclose(p_los + p_nlos, 1.0)


@given(st.floats(min_value=0.0, max_value=math.pi))
def test_gain_distribution_is_proper(theta_b):
    """Interferer gain outcomes form a probability distribution."""
    bs = AntennaPattern.from_db(20.0, -10.0, 30.0)
    vn = AntennaPattern.from_db(12.0, -10.0, 60.0)
    dist = interferer_gain_distribution(bs, vn, theta_b)
    np.testing.assert_allclose(sum(p for _, p in dist.outcomes), 1.0)
    assert all(p >= 0 for _, p in dist.outcomes)
