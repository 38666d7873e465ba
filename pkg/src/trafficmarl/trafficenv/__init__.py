"""Markov game environments: the mesoscopic traffic simulator and the
matrix-game fixture, behind one step/observe interface."""

from .env import (
    DT,
    SATURATION_HEADWAY,
    YELLOW_STEPS,
    MetricsRecord,
    TrafficEnv,
    Vehicle,
    env_init,
)
from .fixtures import FixtureBundle, fixture_path, load_fixture
from .matrix import MatrixGameEnv, make_matrix_game
from .network import (
    DemandProfile,
    LinkSpec,
    OdRate,
    RewardWeights,
    RoadNetworkSpec,
    route_vehicle,
)

__all__ = [
    "DT", "SATURATION_HEADWAY", "YELLOW_STEPS",
    "DemandProfile", "FixtureBundle", "LinkSpec", "MatrixGameEnv",
    "MetricsRecord", "OdRate", "RewardWeights", "RoadNetworkSpec",
    "TrafficEnv", "Vehicle", "env_init", "fixture_path", "load_fixture",
    "make_matrix_game", "route_vehicle",
]
