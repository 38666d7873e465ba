"""Fixture file loading.

Fixtures are human-readable YAML. Road networks declare nodes, links,
per-intersection phase tables, demand (piecewise-constant OD rates), and
reward weights; matrix fixtures declare a payoff table. See
``trafficmarl/fixtures/*.yaml`` for the shipped networks and the README
for the schema.
"""

import os
from importlib import resources

import numpy as np
import yaml

from .env import TrafficEnv
from .matrix import MatrixGameEnv
from .network import DemandProfile, LinkSpec, OdRate, RewardWeights, RoadNetworkSpec

SHIPPED = ("line-2", "grid-2x2", "grid-3x3", "matrix-coop")


def fixture_path(name_or_path):
    if os.path.sep in str(name_or_path) or os.path.exists(name_or_path):
        return str(name_or_path)
    ref = resources.files("trafficmarl") / "fixtures" / f"{name_or_path}.yaml"
    if not ref.is_file():
        raise FileNotFoundError(
            f"unknown fixture {name_or_path!r}; shipped fixtures: {SHIPPED}")
    return str(ref)


def load_fixture(name_or_path):
    path = fixture_path(name_or_path)
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValueError(f"fixture parse error in {path}: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValueError(f"fixture {path} must be a mapping with a 'kind' key")
    return doc


def road_spec_from_doc(doc):
    links = {}
    for entry in doc["links"]:
        l = LinkSpec(
            link_id=str(entry["id"]),
            from_node=str(entry["from"]),
            to_node=str(entry["to"]),
            lane_count=int(entry.get("lanes", 1)),
            travel_time=float(entry.get("travel_time", 30.0)),
            jam_capacity_per_lane=int(entry.get("jam_capacity", 20)),
        )
        if l.link_id in links:
            raise ValueError(f"duplicate link id {l.link_id}")
        links[l.link_id] = l
    phases = {str(i): [frozenset(str(x) for x in phase) for phase in table]
              for i, table in doc["phases"].items()}
    movements = {}
    for link_id, per_lane in (doc.get("lane_movements") or {}).items():
        movements[str(link_id)] = [None if allowed is None
                                   else set(str(a) for a in allowed)
                                   for allowed in per_lane]
    spec = RoadNetworkSpec(
        name=str(doc.get("name", "unnamed")),
        intersections=[str(x) for x in doc["nodes"]["intersections"]],
        boundaries=[str(x) for x in doc["nodes"]["boundaries"]],
        links=links,
        phases=phases,
        priority_lanes=set(str(x) for x in doc.get("priority_lanes") or ()),
        lane_movements=movements,
    )
    return spec.validate()


def demand_from_doc(doc):
    d = doc["demand"]
    return DemandProfile(
        segments=tuple(float(x) for x in d["segments"]),
        od_rates=[OdRate(str(e["origin"]), str(e["destination"]),
                         tuple(float(r) for r in e["rates"]))
                  for e in d["od"]],
    )


def weights_from_doc(doc, overrides=None):
    merged = dict(doc.get("reward_weights") or {})
    merged.update(overrides or {})
    w = RewardWeights(**{k: float(v) for k, v in merged.items()})
    w.validate()
    return w


class FixtureBundle:
    """Everything needed to instantiate episodes of one fixture."""

    def __init__(self, name_or_path, demand_scale=1.0, weight_overrides=None):
        self.doc = load_fixture(name_or_path)
        self.kind = self.doc["kind"]
        self.name = str(self.doc.get("name", name_or_path))
        if self.kind == "road":
            self.spec = road_spec_from_doc(self.doc)
            self.demand = demand_from_doc(self.doc)
            if demand_scale != 1.0:
                self.demand = self.demand.scaled(demand_scale)
            self.weights = weights_from_doc(self.doc, weight_overrides)
        elif self.kind == "matrix":
            self.payoff = np.asarray(self.doc["payoff"], dtype=np.float64)
            self.n_agents = int(self.doc["agents"])
            self.n_actions = int(self.doc["actions"])
        else:
            raise ValueError(f"unknown fixture kind {self.kind!r}")

    def make_env(self, seed, horizon):
        if self.kind == "road":
            return TrafficEnv(self.spec, self.demand, self.weights, seed,
                              horizon=horizon)
        return MatrixGameEnv(self.payoff, self.n_agents, self.n_actions,
                             seed=seed)

    def probe(self, horizon=3600):
        """A throwaway env for reading dimensions."""
        return self.make_env(seed=0, horizon=horizon)
