"""
Pytest configuration and fixtures for mmv2i tests.
"""
import math
import os
import sys

import pytest

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from mmv2i.config import highway_scenario
from mmv2i.model import AntennaPattern, RuralPathLoss, ScenarioConfig


@pytest.fixture
def urban_cfg():
    """Urban highway, psi = 30 deg, 10.684 BS/km, T_S = 0.3 s, V = 100 km/h."""
    return highway_scenario("urban", "psi30", bs_density_per_km=10.684)


@pytest.fixture
def rural_cfg():
    """Rural highway with the same beam, density and mobility."""
    return highway_scenario("rural", "psi30", bs_density_per_km=10.684)


@pytest.fixture
def symmetric_cfg():
    """LOS and NLOS indistinguishable: equal path loss, p_LOS = 1/2."""
    pathloss = RuralPathLoss(alpha_L=3.0, alpha_N=3.0, C_L=1e-6, C_N=1e-6,
                             lambda_o=math.log(2.0) / 10.0, tau_o=10.0)
    return ScenarioConfig(
        pathloss=pathloss,
        bs_antenna=AntennaPattern.from_db(20.0, -10.0, 30.0),
        vn_antenna=AntennaPattern.from_db(12.0, -10.0, 60.0),
        bs_density=0.01,
    )

