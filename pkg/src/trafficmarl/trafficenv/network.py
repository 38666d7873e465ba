"""Static road-network topology: nodes, links, lanes, phase tables, demand.

Lanes are addressed as "<link_id>:<lane_index>". A phase is declared per
intersection as a set of incoming link ids; green applies to every lane of
those links. Routing is static shortest free-flow travel time with a
deterministic tie-break on the lexicographically smallest link-id sequence.
"""

import heapq
from dataclasses import dataclass, field


@dataclass(frozen=True)
class LinkSpec:
    link_id: str
    from_node: str
    to_node: str
    lane_count: int = 1
    travel_time: float = 30.0          # free-flow seconds
    jam_capacity_per_lane: int = 20


@dataclass(frozen=True)
class OdRate:
    origin: str
    destination: str
    rates: tuple                       # veh/s per demand segment


@dataclass
class DemandProfile:
    segments: tuple                    # boundaries, e.g. (0, 1800, 3600)
    od_rates: list                     # list of OdRate

    def validate(self, horizon):
        if len(self.segments) < 2:
            raise ValueError("demand needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if b <= a:
                raise ValueError("demand segment boundaries must increase")
        if self.segments[0] > 0 or self.segments[-1] < horizon:
            raise ValueError(
                f"demand segments {self.segments} do not cover [0, {horizon})")
        for od in self.od_rates:
            if len(od.rates) != len(self.segments) - 1:
                raise ValueError(
                    f"OD {od.origin}->{od.destination} has {len(od.rates)} rates "
                    f"for {len(self.segments) - 1} segments")
            if any(r < 0 for r in od.rates):
                raise ValueError("demand rates must be nonnegative")

    def segment_index(self, t):
        for i in range(len(self.segments) - 1):
            if self.segments[i] <= t < self.segments[i + 1]:
                return i
        raise ValueError(f"time {t} outside demand segments {self.segments}")

    def scaled(self, factor):
        return DemandProfile(
            segments=self.segments,
            od_rates=[OdRate(od.origin, od.destination,
                             tuple(r * factor for r in od.rates))
                      for od in self.od_rates])


@dataclass
class RewardWeights:
    a1: float = 1.0
    b1: float = 1.0
    a2: float = 0.5
    b2: float = 0.5

    def validate(self):
        if min(self.a1, self.b1, self.a2, self.b2) < 0:
            raise ValueError("reward weights must be nonnegative")
        if self.a2 < self.b2:
            raise ValueError(f"a2 >= b2 violated (a2={self.a2}, b2={self.b2})")
        if abs(self.a2 + self.b2 - 1.0) > 1e-9:
            raise ValueError(f"a2 + b2 = 1 violated (got {self.a2 + self.b2})")


@dataclass
class RoadNetworkSpec:
    name: str
    intersections: list                # ordered ids
    boundaries: list                   # ordered ids
    links: dict                        # link_id -> LinkSpec
    phases: dict                       # intersection id -> list of frozenset(link ids)
    priority_lanes: set = field(default_factory=set)
    lane_movements: dict = field(default_factory=dict)
    # link_id -> list (per lane) of set of allowed next link ids, or None = all

    @property
    def n_agents(self):
        return len(self.intersections)

    def node_kind(self, node):
        if node in self._intersection_set:
            return "intersection"
        if node in self._boundary_set:
            return "boundary"
        raise KeyError(f"unknown node {node!r}")

    def incoming_links(self, node):
        return [l for l in self.sorted_links if l.to_node == node]

    def outgoing_links(self, node):
        return [l for l in self.sorted_links if l.from_node == node]

    def lane_keys(self, link):
        return [f"{link.link_id}:{k}" for k in range(link.lane_count)]

    def validate(self):
        self._intersection_set = set(self.intersections)
        self._boundary_set = set(self.boundaries)
        if self._intersection_set & self._boundary_set:
            raise ValueError("a node cannot be both intersection and boundary")
        if len(self.intersections) < 1:
            raise ValueError("network needs at least one intersection")
        self.sorted_links = sorted(self.links.values(), key=lambda l: l.link_id)
        nodes = self._intersection_set | self._boundary_set
        for l in self.sorted_links:
            if l.from_node not in nodes or l.to_node not in nodes:
                raise ValueError(f"link {l.link_id} references unknown node")
            if l.from_node not in self._intersection_set \
                    and l.to_node not in self._intersection_set:
                raise ValueError(
                    f"link {l.link_id} connects two boundary nodes; every link "
                    "must touch an intersection")
            if l.lane_count < 1 or l.travel_time <= 0 or l.jam_capacity_per_lane < 1:
                raise ValueError(f"link {l.link_id} has invalid geometry")
        for i in self.intersections:
            incoming = self.incoming_links(i)
            phases = self.phases.get(i)
            if not phases or len(phases) < 2:
                raise ValueError(f"intersection {i} needs at least 2 phases")
            if len(set(phases)) != len(phases):
                raise ValueError(f"intersection {i} has duplicate phases")
            incoming_ids = {l.link_id for l in incoming}
            served = set()
            for p, phase in enumerate(phases):
                unknown = phase - incoming_ids
                if unknown:
                    raise ValueError(
                        f"intersection {i} phase {p} references non-incoming "
                        f"links {sorted(unknown)}")
                served |= phase
            unserved = incoming_ids - served
            if unserved:
                raise ValueError(
                    f"lanes of links {sorted(unserved)} at intersection {i} are "
                    "served by no phase")
        all_lane_keys = {k for l in self.sorted_links for k in self.lane_keys(l)}
        bad = set(self.priority_lanes) - all_lane_keys
        if bad:
            raise ValueError(f"unknown priority lanes {sorted(bad)}")
        for link_id, per_lane in self.lane_movements.items():
            link = self.links[link_id]
            if len(per_lane) != link.lane_count:
                raise ValueError(f"lane_movements for {link_id} must list "
                                 f"{link.lane_count} lanes")
        return self

    def phase_counts(self):
        return [len(self.phases[i]) for i in self.intersections]


def route_vehicle(spec, origin, destination):
    """Minimal free-flow-time route as a tuple of link ids.

    Ties are broken toward the lexicographically smallest link-id sequence.
    Raises ValueError when the destination is unreachable.
    """
    nodes = set(spec.intersections) | set(spec.boundaries)
    if origin not in nodes or destination not in nodes:
        raise ValueError(f"unknown node in OD pair {origin}->{destination}")
    out_by_node = {}
    for l in spec.sorted_links:
        out_by_node.setdefault(l.from_node, []).append(l)
    # heap entries ordered by (cost, link-id path); equal-cost paths pop in
    # lexicographic order, and visited-on-pop keeps that ordering optimal
    heap = [(0.0, (), origin)]
    visited = set()
    while heap:
        cost, path, node = heapq.heappop(heap)
        if node == destination:
            return path
        if node in visited:
            continue
        visited.add(node)
        for l in out_by_node.get(node, ()):
            if l.to_node not in visited:
                heapq.heappush(heap, (cost + l.travel_time,
                                      path + (l.link_id,), l.to_node))
    raise ValueError(f"destination {destination} unreachable from {origin}")
