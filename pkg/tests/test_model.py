"""
Test the domain types and closed-form primitives.

These tests cover unit conversions, the LOS laws, path loss, the road
geometry helpers and the validation done by the frozen config types.
"""
import math

import numpy as np
import pytest

from mmv2i.errors import ConfigError, DomainError
from mmv2i.model import (
    AntennaPattern,
    GainDistribution,
    LinkState,
    REFERENCE_UNITS,
    SI_UNITS,
    LosReference,
    NoiseConvention,
    RuralPathLoss,
    ScenarioConfig,
    UnitConventions,
    UrbanPathLoss,
    db_to_linear,
    dbm_to_watts,
    equal_pathloss_distance_A,
    interferer_gain_distribution,
    linear_to_db,
    los_probability,
    max_covered_distance_d,
    normalized_noise,
    pathloss_gain,
    road_projection_b,
    sinr,
    thermal_noise_watts,
    watts_to_dbm,
)

URBAN = UrbanPathLoss(alpha_L=2.0, alpha_N=2.92, C_L=10 ** -7.2, C_N=10 ** -6.14, a_los=0.0149)
RURAL = RuralPathLoss(alpha_L=2.8, alpha_N=4.0, C_L=10 ** -6.1, C_N=10 ** -6.1,
                      lambda_o=0.02, tau_o=11.1)


class TestUnitConversions:
    """Test dB, dBm and thermal noise conversions."""

    def test_db_to_linear(self):
        """Test decibel ratios."""
        assert db_to_linear(0.0) == 1.0
        np.testing.assert_allclose(db_to_linear(20.0), 100.0)
        np.testing.assert_allclose(db_to_linear(27.0), 501.187, rtol=1e-6)

    def test_round_trips(self):
        """Test that linear_to_db and watts_to_dbm invert their counterparts."""
        for x in (-30.0, -5.0, 0.0, 12.5, 27.0):
            np.testing.assert_allclose(linear_to_db(db_to_linear(x)), x, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(watts_to_dbm(dbm_to_watts(x)), x, rtol=1e-12, atol=1e-12)

    def test_linear_to_db_rejects_non_positive(self):
        """Test that zero has no dB value."""
        with pytest.raises(DomainError):
            linear_to_db(0.0)

    def test_thermal_noise(self):
        """Test kTB over 1 GHz in dBm."""
        np.testing.assert_allclose(watts_to_dbm(thermal_noise_watts(1e9)), -83.97, atol=5e-3)

    def test_normalized_noise(self, urban_cfg):
        """Test sigma^2 for 1 GHz and 27 dBm."""
        np.testing.assert_allclose(normalized_noise(urban_cfg), 8.00e-12, rtol=2e-3)

    def test_noise_equal_to_power_normalizes_to_one(self, urban_cfg):
        """Test that a transmit power equal to kTB gives sigma^2 = 1."""
        cfg = urban_cfg.replace(tx_power=thermal_noise_watts(urban_cfg.bandwidth))
        np.testing.assert_allclose(normalized_noise(cfg), 1.0)

    def test_mixed_noise_scale(self, urban_cfg):
        """Test that kTB in mW over watts inflates sigma^2 by 1e3."""
        mixed = urban_cfg.replace(units=REFERENCE_UNITS)
        np.testing.assert_allclose(normalized_noise(mixed), 1e3 * normalized_noise(urban_cfg))
        assert NoiseConvention.CONSISTENT.scale == 1.0


class TestLosProbability:
    """Test the rural and urban LOS laws."""

    def test_rural_is_constant(self):
        """Test e^{-lambda_o tau_o} at every distance."""
        for r in (0.0, 10.0, 1e4):
            np.testing.assert_allclose(los_probability(RURAL, r), 0.8009, atol=1e-4)

    def test_urban_decays(self):
        """Test e^{-a r} values."""
        np.testing.assert_allclose(los_probability(URBAN, 100.0), 0.2254, atol=1e-4)
        assert los_probability(URBAN, 0.0) == 1.0

    def test_vectorized_matches_scalar(self):
        """Test that the array form agrees with the scalar form."""
        r = np.array([0.0, 5.0, 50.0, 500.0])
        for pl in (URBAN, RURAL):
            expected = [pl.los_probability(v) for v in r]
            np.testing.assert_allclose(pl.los_probabilities(r), expected)

    def test_negative_distance(self):
        """Test that negative distances are rejected."""
        with pytest.raises(DomainError):
            los_probability(URBAN, -1.0)

    def test_los_mass(self):
        """Test the integrated LOS probability and its limit."""
        np.testing.assert_allclose(URBAN.los_mass(100.0), (1 - math.exp(-1.49)) / 0.0149)
        np.testing.assert_allclose(URBAN.los_mass_limit, 1 / 0.0149)
        np.testing.assert_allclose(RURAL.los_mass(100.0), 100.0 * RURAL.p_los)
        assert math.isinf(RURAL.los_mass_limit)


class TestPathLoss:
    """Test l_i(r) = C_i r^{-alpha_i} and the equal path-loss distance."""

    def test_unit_distance(self):
        """Test that r = 1 gives C_i exactly."""
        assert pathloss_gain(URBAN, LinkState.LOS, 1.0) == 10 ** -7.2
        assert pathloss_gain(URBAN, LinkState.NLOS, 1.0) == 10 ** -6.14

    def test_urban_nlos_at_100m(self):
        """Test direct evaluation at 100 m."""
        np.testing.assert_allclose(pathloss_gain(URBAN, LinkState.NLOS, 100.0), 1.0471e-12, rtol=1e-3)

    def test_strictly_decreasing(self):
        """Test monotonicity over a range of distances."""
        r = np.geomspace(1.0, 1e4, 50)
        for state in LinkState:
            gains = [pathloss_gain(RURAL, state, v) for v in r]
            assert np.all(np.diff(gains) < 0)

    def test_rejects_non_positive_distance(self):
        """Test r <= 0."""
        with pytest.raises(DomainError):
            pathloss_gain(URBAN, LinkState.LOS, 0.0)

    def test_equal_pathloss_distance(self):
        """Test A_i(r) for the urban model."""
        np.testing.assert_allclose(equal_pathloss_distance_A(URBAN, LinkState.LOS, 100.0),
                                   54.07, rtol=1e-3)
        np.testing.assert_allclose(equal_pathloss_distance_A(URBAN, LinkState.NLOS, 100.0),
                                   245.5, rtol=1e-3)

    def test_equal_pathloss_distance_symmetric_model(self, symmetric_cfg):
        """Test that identical laws give A_i(r) = r."""
        pl = symmetric_cfg.pathloss
        np.testing.assert_allclose(equal_pathloss_distance_A(pl, LinkState.LOS, 37.0), 37.0)

    def test_equal_pathloss_distance_inverts(self):
        """Test A_N(A_L(r)) = r."""
        for r in (3.0, 40.0, 900.0):
            a = equal_pathloss_distance_A(URBAN, LinkState.LOS, r)
            np.testing.assert_allclose(equal_pathloss_distance_A(URBAN, LinkState.NLOS, a), r,
                                       rtol=1e-9)


class TestGeometry:
    """Test b(r) and d(r)."""

    def test_road_projection(self):
        """Test b(r) values."""
        assert road_projection_b(7.4, 7.4) == 0.0
        np.testing.assert_allclose(road_projection_b(12.5, 7.4), 10.074, atol=1e-3)
        assert road_projection_b(5.0, 0.0) == 5.0

    def test_road_projection_below_half_width(self):
        """Test r < W raises unless clamped."""
        with pytest.raises(DomainError):
            road_projection_b(5.0, 7.4)
        assert road_projection_b(5.0, 7.4, clamp=True) == 0.0

    def test_covered_distance_values(self):
        """Test d(W) = W tan(psi/2) and a direct evaluation."""
        psi = math.radians(30.0)
        np.testing.assert_allclose(max_covered_distance_d(7.4, 7.4, psi), 1.983, atol=1e-3)
        np.testing.assert_allclose(max_covered_distance_d(20.0, 7.4, psi), 8.656, atol=2e-3)

    def test_covered_distance_degenerate_beam(self):
        """Test that a zero-width beam covers nothing."""
        assert max_covered_distance_d(50.0, 7.4, 0.0) == 0.0

    def test_covered_distance_increases_past_turning_point(self):
        """Test monotonicity in r beyond W sec(psi/4), where d has its minimum."""
        W = 7.4
        for deg in (30.0, 60.0, 90.0):
            psi = math.radians(deg)
            r_turn = W / math.cos(psi / 4)
            r = np.linspace(r_turn, 2000.0, 400)
            d = [max_covered_distance_d(v, W, psi) for v in r]
            assert np.all(np.diff(d) > 0)
            np.testing.assert_allclose(d[0], 2 * W * math.tan(psi / 4), rtol=1e-9)

    def test_covered_distance_increases_with_beamwidth(self):
        """Test monotonicity in psi at fixed r."""
        for r in (7.4, 8.0, 30.0, 500.0):
            d = [max_covered_distance_d(r, 7.4, math.radians(deg)) for deg in (10, 30, 60, 90, 120)]
            assert np.all(np.diff(d) > 0)

    def test_covered_distance_domain(self):
        """Test r < W and psi outside [0, pi)."""
        with pytest.raises(DomainError):
            max_covered_distance_d(5.0, 7.4, 0.5)
        with pytest.raises(DomainError):
            max_covered_distance_d(50.0, 7.4, math.pi)


class TestAntennasAndGains:
    """Test antenna patterns and the interferer gain law."""

    def test_gain_distribution(self):
        """Test the two outcomes for psi = 30 deg and theta_b = pi/12."""
        bs = AntennaPattern.from_db(20.0, -10.0, 30.0)
        vn = AntennaPattern.from_db(12.0, -10.0, 60.0)
        dist = interferer_gain_distribution(bs, vn, math.pi / 12)
        (main, p_main), (side, p_side) = dist.outcomes
        np.testing.assert_allclose(main, 10 ** 3.2)
        np.testing.assert_allclose(side, 1e-2)
        np.testing.assert_allclose(p_main, 1 / 12)
        np.testing.assert_allclose(p_main + p_side, 1.0, atol=1e-12)

    def test_degenerate_half_beamwidths(self):
        """Test theta_b = 0 and pi."""
        bs = AntennaPattern.from_db(20.0, -10.0, 30.0)
        vn = AntennaPattern.from_db(12.0, -10.0, 60.0)
        assert interferer_gain_distribution(bs, vn, 0.0).outcomes[1][1] == 1.0
        assert interferer_gain_distribution(bs, vn, math.pi).outcomes[0][1] == 1.0
        with pytest.raises(DomainError):
            interferer_gain_distribution(bs, vn, 4.0)

    def test_gain_distribution_validation(self):
        """Test probabilities that do not sum to one."""
        with pytest.raises(DomainError):
            GainDistribution(((10.0, 0.5), (0.1, 0.4)))

    def test_sampling_frequencies(self):
        """Test that sampled gains follow the outcome probabilities."""
        dist = GainDistribution(((100.0, 0.25), (0.01, 0.75)))
        draws = dist.sample(np.random.default_rng(3), 40_000)
        np.testing.assert_allclose(np.mean(draws == 100.0), 0.25, atol=0.01)

    def test_antenna_validation(self):
        """Test invalid antenna patterns."""
        with pytest.raises(ConfigError):
            AntennaPattern(main_gain=1.0, side_gain=10.0, beamwidth=0.5)
        with pytest.raises(ConfigError):
            AntennaPattern.from_db(20.0, -10.0, 180.0)


class TestSinr:
    """Test the SINR ratio."""

    def test_values(self):
        """Test simple ratios."""
        assert sinr(1.0, 1.0, 1e-12, 0.0, 1e-12) == 1.0
        assert sinr(0.0, 1.0, 1e-12, 1e-12, 1e-12) == 0.0
        np.testing.assert_allclose(sinr(1.0, 1.0, 4e-12, 1e-12, 1e-12), 2.0)

    def test_invalid_inputs(self):
        """Test negative inputs and zero noise."""
        with pytest.raises(DomainError):
            sinr(-1.0, 1.0, 1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            sinr(1.0, 1.0, 1.0, 0.0, 0.0)


class TestScenarioConfig:
    """Test scenario validation and derived fields."""

    def test_from_lanes(self, urban_cfg):
        """Test W = N_l w / 2."""
        cfg = ScenarioConfig.from_lanes(num_lanes=6, lane_width=3.5, pathloss=URBAN,
                                        bs_antenna=urban_cfg.bs_antenna,
                                        vn_antenna=urban_cfg.vn_antenna)
        assert cfg.half_width == 10.5

    def test_theta_b_default(self, urban_cfg):
        """Test that theta_b defaults to psi / 2."""
        np.testing.assert_allclose(urban_cfg.interferer_half_beamwidth, math.radians(15.0))
        cfg = urban_cfg.replace(theta_b=0.1)
        assert cfg.interferer_half_beamwidth == 0.1

    def test_negative_density_rejected(self, urban_cfg):
        """Test that validation names the field."""
        with pytest.raises(ConfigError, match="bs_density"):
            urban_cfg.replace(bs_density=-0.001)

    def test_missing_pathloss_rejected(self, urban_cfg):
        """Test that a path-loss variant is required."""
        with pytest.raises(ConfigError, match="pathloss"):
            ScenarioConfig(pathloss=None, bs_antenna=urban_cfg.bs_antenna,
                           vn_antenna=urban_cfg.vn_antenna)

    def test_lateral_offset(self, urban_cfg):
        """Test the LOS reference distance switch."""
        assert urban_cfg.lateral_offset == 0.0
        np.testing.assert_allclose(urban_cfg.replace(los_reference=LosReference.RADIAL).lateral_offset, 7.4)

    def test_travel(self, urban_cfg):
        """Test V T_S."""
        np.testing.assert_allclose(urban_cfg.travel, 100 / 3.6 * 0.3)

    def test_hashable(self, urban_cfg):
        """Test that equal configs hash equally (they key the analytic caches)."""
        assert hash(urban_cfg) == hash(urban_cfg.replace())
        assert urban_cfg == urban_cfg.replace()


class TestUnitConventions:
    """Test speed and noise conventions."""

    def test_defaults(self):
        assert UnitConventions() == SI_UNITS
        assert REFERENCE_UNITS.kmh_per_mps == 3.5
        assert REFERENCE_UNITS.noise is NoiseConvention.MIXED

    @pytest.mark.parametrize("divisor", [0.0, -3.6, math.inf])
    def test_bad_divisor(self, divisor):
        """Test that the km/h divisor must be finite and positive."""
        with pytest.raises(ConfigError, match="kmh_per_mps"):
            UnitConventions(kmh_per_mps=divisor)

    def test_bad_noise(self):
        """Test a raw string where the enum belongs."""
        with pytest.raises(ConfigError, match="units.noise"):
            UnitConventions(noise="mixed")

    def test_speed_conversions(self):
        np.testing.assert_allclose(SI_UNITS.speed_from_kmh(36.0), 10.0)
        np.testing.assert_allclose(REFERENCE_UNITS.speed_from_kmh(130.0), 130 / 3.5)
        np.testing.assert_allclose(REFERENCE_UNITS.speed_to_kmh(10.0), 35.0)

    def test_with_speed_kmh(self, urban_cfg):
        """Test that km/h figures go through the scenario's conventions."""
        cfg = urban_cfg.replace(units=REFERENCE_UNITS).with_speed_kmh(70.0)
        np.testing.assert_allclose(cfg.speed, 20.0)
        np.testing.assert_allclose(cfg.speed_kmh, 70.0)

    def test_with_units_keeps_kmh(self, urban_cfg):
        """Test that switching conventions keeps the quoted km/h speed."""
        cfg = urban_cfg.with_units(REFERENCE_UNITS)
        np.testing.assert_allclose(urban_cfg.speed_kmh, 100.0)
        np.testing.assert_allclose(cfg.speed_kmh, 100.0)
        np.testing.assert_allclose(cfg.speed, 100 / 3.5)
        assert cfg.units == REFERENCE_UNITS

    def test_units_validated(self, urban_cfg):
        with pytest.raises(ConfigError, match="units"):
            urban_cfg.replace(units="reference")
