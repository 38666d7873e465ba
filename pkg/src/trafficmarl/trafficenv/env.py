"""Mesoscopic queue-based traffic simulator.

Vehicles traverse links at free-flow time, then queue FIFO at the lane
matching their next movement. Green lanes discharge through a fractional
credit accumulator (dt/h_s per second, reset on red/yellow); a vehicle
whose downstream link is at jam capacity blocks its lane (spillback).
Each step advances one second in a fixed order: signal logic, arrivals,
movement, discharge, waiting clocks, rewards.

Waiting time is tracked in O(1) per lane: a queued vehicle's clock at the
end of step t is wait_accum + (t - queue_join + 1), so a lane's clock sum
is wait_base + len(queue)*(t+1) with wait_base = sum(wait_accum - queue_join).
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .network import RewardWeights, route_vehicle

DT = 1.0
YELLOW_STEPS = 4
SATURATION_HEADWAY = 2.0  # s/veh/lane under green


class Vehicle:
    __slots__ = ("vid", "route", "leg", "spawn_time", "wait_accum",
                 "queue_join", "exit_time")

    def __init__(self, vid, route, spawn_time):
        self.vid = vid
        self.route = route
        self.leg = 0
        self.spawn_time = spawn_time
        self.wait_accum = 0.0
        self.queue_join = -1
        self.exit_time = None


class Lane:
    __slots__ = ("key", "link_id", "index", "queue", "credit", "wait_base",
                 "allowed_next")

    def __init__(self, key, link_id, index, allowed_next):
        self.key = key
        self.link_id = link_id
        self.index = index
        self.queue = deque()
        self.credit = 0.0
        self.wait_base = 0.0
        self.allowed_next = allowed_next  # None = any movement


class LinkState:
    __slots__ = ("spec", "lanes", "occupancy", "moving_count", "arrivals",
                 "capacity", "to_is_intersection")

    def __init__(self, spec, lanes, to_is_intersection):
        self.spec = spec
        self.lanes = lanes
        self.occupancy = 0
        self.moving_count = 0
        self.arrivals = {}
        self.capacity = spec.lane_count * spec.jam_capacity_per_lane
        self.to_is_intersection = to_is_intersection


class IntersectionState:
    __slots__ = ("node_id", "phases", "current", "yellow_remaining", "pending",
                 "incoming_lanes")

    def __init__(self, node_id, phases, incoming_lanes):
        self.node_id = node_id
        self.phases = phases              # list of frozenset of lane keys
        self.current = 0
        self.yellow_remaining = 0
        self.pending = None
        self.incoming_lanes = incoming_lanes  # sorted Lane list


@dataclass
class MetricsRecord:
    scope: str
    total_queue: int
    mean_queue_per_lane: float
    total_wait: float
    completed_trips: int
    mean_delay: float
    flow_per_minute: float
    per_agent_reward: list
    exits_this_step: int = 0


class TrafficEnv:
    """One episode of the multi-intersection Markov game."""

    def __init__(self, spec, demand, weights, seed, horizon=3600):
        spec.validate()
        demand.validate(horizon)
        weights = weights or RewardWeights()
        weights.validate()
        self.spec = spec
        self.demand = demand
        self.weights = weights
        self.horizon = int(horizon)
        self.rng = np.random.default_rng(seed)
        self.t = 0

        self.links = {}
        for l in spec.sorted_links:
            moves = spec.lane_movements.get(l.link_id)
            lanes = [Lane(f"{l.link_id}:{k}", l.link_id, k,
                          None if moves is None else moves[k])
                     for k in range(l.lane_count)]
            self.links[l.link_id] = LinkState(
                l, lanes, l.to_node in set(spec.intersections))
        self.sorted_link_states = [self.links[l.link_id]
                                   for l in spec.sorted_links]

        self.agent_ids = list(spec.intersections)
        self.intersections = {}
        for node in self.agent_ids:
            incoming = []
            for l in spec.incoming_links(node):
                incoming.extend(self.links[l.link_id].lanes)
            incoming.sort(key=lambda ln: (ln.link_id, ln.index))
            phases = [frozenset(k for lid in phase
                                for k in spec.lane_keys(spec.links[lid]))
                      for phase in spec.phases[node]]
            self.intersections[node] = IntersectionState(node, phases, incoming)
        self.signal_lanes = [ln for node in self.agent_ids
                             for ln in self.intersections[node].incoming_lanes]

        self.priority = set(spec.priority_lanes)
        self.routes = {}
        for od in demand.od_rates:
            key = (od.origin, od.destination)
            if key not in self.routes:
                self.routes[key] = route_vehicle(spec, *key)
        self.origins = sorted({od.origin for od in demand.od_rates})
        self.virtual_queues = {o: deque() for o in self.origins}
        self._od_list = list(demand.od_rates)
        self._rates = np.array([[od.rates[s] for od in self._od_list]
                                for s in range(len(demand.segments) - 1)])

        self._next_vid = 0
        self.spawned = 0
        self.exited = 0
        self.completed_wait_sum = 0.0
        self.exits_by_step = []
        self._exits_now = 0
        self._burst_cap = max(1.0, DT / SATURATION_HEADWAY)

    # ---- interface shared with the matrix-game fixture ----

    @property
    def n_agents(self):
        return len(self.agent_ids)

    @property
    def phase_counts(self):
        return [len(self.intersections[i].phases) for i in self.agent_ids]

    @property
    def obs_dims(self):
        return [2 * len(self.intersections[i].incoming_lanes)
                for i in self.agent_ids]

    @property
    def done(self):
        return self.t >= self.horizon

    # ---- state queries ----

    def _lane_wait_front(self, lane):
        if not lane.queue:
            return 0.0
        v = lane.queue[0]
        return v.wait_accum + (self.t - v.queue_join + 1)

    def _lane_wait_sum(self, lane):
        return lane.wait_base + len(lane.queue) * (self.t + 1)

    def _assign_moving_to_lanes(self, link):
        """Per-lane count of moving vehicles, assigned the way they would
        pick a queue on arrival (movement match, then shortest, then index)."""
        counts = [0] * len(link.lanes)
        if len(link.lanes) == 1:
            counts[0] = link.moving_count
            return counts
        qlens = [len(ln.queue) for ln in link.lanes]
        for bucket in link.arrivals.values():
            for v in bucket:
                nxt = v.route[v.leg + 1] if v.leg + 1 < len(v.route) else None
                best = None
                for i, ln in enumerate(link.lanes):
                    if ln.allowed_next is not None and nxt is not None \
                            and nxt not in ln.allowed_next:
                        continue
                    load = qlens[i] + counts[i]
                    if best is None or load < best[0]:
                        best = (load, i)
                if best is not None:
                    counts[best[1]] += 1
        return counts

    def observe(self, agent_id):
        """Two values per incoming lane: front-vehicle wait, lane volume."""
        node = self.intersections.get(agent_id)
        if node is None:
            raise KeyError(f"unknown intersection {agent_id!r}")
        out = np.empty(2 * len(node.incoming_lanes))
        moving_cache = {}
        for j, lane in enumerate(node.incoming_lanes):
            if lane.link_id not in moving_cache:
                moving_cache[lane.link_id] = self._assign_moving_to_lanes(
                    self.links[lane.link_id])
            out[2 * j] = self._lane_wait_front(lane)
            out[2 * j + 1] = len(lane.queue) + moving_cache[lane.link_id][lane.index]
        return out

    def observe_all(self):
        return [self.observe(i) for i in self.agent_ids]

    def compute_reward(self, agent_id, weights=None):
        """Post-decision reward from queue lengths and lane waiting-time sums."""
        w = weights or self.weights
        node = self.intersections[agent_id]
        q_pri = q_reg = wait_pri = wait_reg = 0.0
        for lane in node.incoming_lanes:
            q = len(lane.queue)
            ws = self._lane_wait_sum(lane)
            if lane.key in self.priority:
                q_pri += q
                wait_pri += ws
            else:
                q_reg += q
                wait_reg += ws
        return (-w.a1 * (w.a2 * q_pri + w.b2 * q_reg)
                - w.b1 * (w.a2 * wait_pri + w.b2 * wait_reg))

    # ---- dynamics ----

    def spawn_arrivals(self):
        """Poisson arrivals for the current second; returns spawn count.

        New vehicles queue behind any vehicles already waiting at their
        origin; the virtual queue then drains while entry links have room.
        """
        seg = self.demand.segment_index(self.t)
        counts = self.rng.poisson(self._rates[seg]) if len(self._od_list) else ()
        n = 0
        for od, c in zip(self._od_list, counts):
            for _ in range(int(c)):
                v = Vehicle(self._next_vid,
                            self.routes[(od.origin, od.destination)],
                            spawn_time=self.t + 1)
                self._next_vid += 1
                self.spawned += 1
                self.virtual_queues[od.origin].append(v)
                n += 1
        for origin in self.origins:
            vq = self.virtual_queues[origin]
            while vq:
                link = self.links[vq[0].route[0]]
                if link.occupancy >= link.capacity:
                    break
                v = vq.popleft()
                self._enter_link(v, link)
        return n

    def _enter_link(self, vehicle, link):
        link.occupancy += 1
        link.moving_count += 1
        arrive = max(math.ceil((self.t + 1) + link.spec.travel_time), self.t + 2)
        link.arrivals.setdefault(int(arrive), []).append(vehicle)

    def _join_or_exit(self, vehicle, link):
        link.moving_count -= 1
        if not link.to_is_intersection:
            link.occupancy -= 1
            self.exited += 1
            vehicle.exit_time = self.t + 1
            self.completed_wait_sum += vehicle.wait_accum
            self._exits_now += 1
            return
        nxt = (vehicle.route[vehicle.leg + 1]
               if vehicle.leg + 1 < len(vehicle.route) else None)
        best = None
        for lane in link.lanes:
            if lane.allowed_next is not None and nxt is not None \
                    and nxt not in lane.allowed_next:
                continue
            keyed = (len(lane.queue), lane.index)
            if best is None or keyed < best[0]:
                best = (keyed, lane)
        if best is None:
            raise RuntimeError(
                f"no lane on {link.spec.link_id} serves movement to {nxt}")
        lane = best[1]
        lane.queue.append(vehicle)
        vehicle.queue_join = self.t + 1
        lane.wait_base += vehicle.wait_accum - vehicle.queue_join

    def _discharge_lane(self, lane, link):
        lane.credit = min(lane.credit + DT / SATURATION_HEADWAY, self._burst_cap)
        moved = 0
        while lane.credit >= 1.0 and lane.queue:
            v = lane.queue[0]
            if v.leg + 1 < len(v.route):
                nxt_link = self.links[v.route[v.leg + 1]]
                if nxt_link.occupancy >= nxt_link.capacity:
                    break  # spillback: head of line blocks the lane
                lane.queue.popleft()
                self._leave_queue_bookkeeping(lane, v)
                link.occupancy -= 1
                v.leg += 1
                self._enter_link(v, nxt_link)
            else:
                # route ends at this intersection's node
                lane.queue.popleft()
                self._leave_queue_bookkeeping(lane, v)
                link.occupancy -= 1
                self.exited += 1
                v.exit_time = self.t + 1
                self.completed_wait_sum += v.wait_accum
                self._exits_now += 1
            lane.credit -= 1.0
            moved += 1
        return moved

    def _leave_queue_bookkeeping(self, lane, v):
        lane.wait_base -= v.wait_accum - v.queue_join
        v.wait_accum += (self.t + 1) - v.queue_join
        v.queue_join = -1

    def step(self, joint_action):
        """Advance one second. Returns (observations, rewards, metrics, done)."""
        if self.done:
            raise RuntimeError("step() called on a finished episode")
        if len(joint_action) != self.n_agents:
            raise ValueError(f"expected {self.n_agents} actions, "
                             f"got {len(joint_action)}")
        self._exits_now = 0

        # (1) signal logic
        for node_id, desired in zip(self.agent_ids, joint_action):
            node = self.intersections[node_id]
            desired = int(desired)
            if not 0 <= desired < len(node.phases):
                raise ValueError(f"action {desired} out of range at {node_id}")
            if node.yellow_remaining > 0:
                node.yellow_remaining -= 1
                if node.yellow_remaining == 0:
                    node.current = node.pending
                    node.pending = None
                else:
                    continue  # mid-yellow: request ignored
            if node.yellow_remaining == 0 and desired != node.current:
                node.pending = desired
                node.yellow_remaining = YELLOW_STEPS

        # (2) arrivals
        self.spawn_arrivals()

        # (3) movement: vehicles whose free-flow traversal completes now
        arrive_step = self.t + 1
        for link in self.sorted_link_states:
            bucket = link.arrivals.pop(arrive_step, None)
            if bucket:
                for v in bucket:
                    self._join_or_exit(v, link)

        # (4) discharge under the active phase; yellow blocks the whole node
        for node_id in self.agent_ids:
            node = self.intersections[node_id]
            green = node.phases[node.current] if node.yellow_remaining == 0 \
                else frozenset()
            for lane in node.incoming_lanes:
                if lane.key in green:
                    self._discharge_lane(lane, self.links[lane.link_id])
                else:
                    lane.credit = 0.0

        # (5) waiting clocks advance implicitly (see module docstring)
        self.t += 1
        self.exits_by_step.append(self._exits_now)

        # (6) post-decision rewards and metrics
        rewards = np.array([self.compute_reward(i) for i in self.agent_ids])
        metrics = self.metrics_snapshot(per_agent_reward=rewards.tolist())
        metrics.exits_this_step = self._exits_now
        return self.observe_all(), rewards, metrics, self.done

    # ---- metrics & accounting ----

    def in_network(self):
        return sum(l.occupancy for l in self.sorted_link_states)

    def virtual_queued(self):
        return sum(len(q) for q in self.virtual_queues.values())

    def conservation_holds(self):
        return self.spawned == self.exited + self.in_network() + self.virtual_queued()

    def metrics_snapshot(self, per_agent_reward=None):
        total_queue = sum(len(ln.queue) for ln in self.signal_lanes)
        total_wait = sum(self._lane_wait_sum(ln) for ln in self.signal_lanes)
        n_lanes = len(self.signal_lanes)
        mean_delay = (self.completed_wait_sum / self.exited) if self.exited else 0.0
        flow = float(sum(self.exits_by_step[-60:]))
        return MetricsRecord(
            scope="step",
            total_queue=int(total_queue),
            mean_queue_per_lane=total_queue / n_lanes if n_lanes else 0.0,
            total_wait=float(total_wait),
            completed_trips=self.exited,
            mean_delay=mean_delay,
            flow_per_minute=flow,
            per_agent_reward=per_agent_reward or [0.0] * self.n_agents,
        )


def env_init(spec, demand, weights, seed, horizon=3600):
    """Validated, empty-network episode state at clock 0."""
    return TrafficEnv(spec, demand, weights, seed, horizon=horizon)
