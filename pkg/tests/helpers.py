"""Shared test fixtures: tiny hand-built road networks and state injection."""

import numpy as np

from trafficmarl.trafficenv import (
    DemandProfile,
    LinkSpec,
    OdRate,
    RewardWeights,
    RoadNetworkSpec,
    TrafficEnv,
    Vehicle,
)


def star_spec(n_in=2, jam=20, travel=30.0):
    """One intersection X fed by n_in boundary links, draining to sink s."""
    links = {}
    boundaries = ["s"]
    phases = []
    for k in range(n_in):
        o = f"o{k}"
        boundaries.append(o)
        lid = f"{o}__X"
        links[lid] = LinkSpec(lid, o, "X", 1, travel, jam)
        phases.append(frozenset([lid]))
    links["X__s"] = LinkSpec("X__s", "X", "s", 1, travel, jam)
    if len(phases) < 2:
        phases.append(frozenset())  # all-red second phase
    spec = RoadNetworkSpec(
        name="star", intersections=["X"], boundaries=sorted(boundaries),
        links=links, phases={"X": phases})
    return spec.validate()


def empty_demand(horizon=10**9):
    return DemandProfile(segments=(0.0, float(horizon)), od_rates=[])


def star_env(n_in=2, seed=0, horizon=3600, weights=None, demand=None, jam=20):
    spec = star_spec(n_in=n_in, jam=jam)
    return TrafficEnv(spec, demand or empty_demand(), weights or RewardWeights(),
                      seed=seed, horizon=horizon)


def inject_queued(env, link_id, clock_now, lane_index=0, route_tail=("X__s",)):
    """Plant a queued vehicle whose waiting clock reads clock_now right now."""
    link = env.links[link_id]
    lane = link.lanes[lane_index]
    v = Vehicle(env._next_vid, (link_id, *route_tail), spawn_time=0.0)
    env._next_vid += 1
    env.spawned += 1
    v.queue_join = env.t
    v.wait_accum = float(clock_now) - 1.0
    lane.queue.append(v)
    lane.wait_base += v.wait_accum - v.queue_join
    link.occupancy += 1
    return v


def inject_moving(env, link_id, arrive_step=10**8, route_tail=("X__s",)):
    """Plant a vehicle still traversing link_id."""
    link = env.links[link_id]
    v = Vehicle(env._next_vid, (link_id, *route_tail), spawn_time=0.0)
    env._next_vid += 1
    env.spawned += 1
    link.occupancy += 1
    link.moving_count += 1
    link.arrivals.setdefault(arrive_step, []).append(v)
    return v


def direct_observation(env, agent_id):
    """Oracle: observation recomputed by iterating vehicles directly."""
    node = env.intersections[agent_id]
    out = []
    for lane in node.incoming_lanes:
        if lane.queue:
            v = lane.queue[0]
            out.append(v.wait_accum + (env.t - v.queue_join + 1))
        else:
            out.append(0.0)
        link = env.links[lane.link_id]
        moving_here = 0
        if len(link.lanes) == 1:
            moving_here = link.moving_count
        out.append(len(lane.queue) + moving_here)
    return np.array(out)


def direct_reward(env, agent_id, w):
    """Oracle: reward recomputed per vehicle from the stated formula."""
    node = env.intersections[agent_id]
    q_term = 0.0
    w_term = 0.0
    for lane in node.incoming_lanes:
        q = len(lane.queue)
        wait = sum(v.wait_accum + (env.t - v.queue_join + 1) for v in lane.queue)
        coef = w.a2 if lane.key in env.priority else w.b2
        q_term += coef * q
        w_term += coef * wait
    return -w.a1 * q_term - w.b1 * w_term
