import io

import numpy as np
import pytest

from hetnetcode import routing, simengine, topology
from hetnetcode.errors import ConfigError, NoPathError
from hetnetcode.routing import ForwardPolicy
from hetnetcode.simengine import (
    EventTrace,
    ScenarioConfig,
    TraceEvent,
    compare_modes,
    loaded_cellular_rate,
    make_topology,
    pick_session_pair,
    run_session,
    schedule_wifi_slot,
)


def chain_session(hops, seed=0, **overrides):
    topo = topology.chain_topology(hops)
    routes = routing.build_routes(topo)
    overrides.setdefault("min_hops", hops)
    cfg = ScenarioConfig(node_count=hops + 1, seed=seed, **overrides)
    return cfg, topo, routes


def brute_force_guard_ok(topo, admitted):
    """Independent protocol-model check over an admitted transmission set."""
    for i, (tx, rx) in enumerate(admitted):
        for j, (otx, orx) in enumerate(admitted):
            if i == j:
                continue
            if otx in (tx, rx):
                return False  # half-duplex violation doubles as guard failure
            if topo.distance(rx, otx) < (1 + topo.delta) * topo.distance(tx, rx):
                return False
    return True


# --- config and loading -----------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(block_size=0).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(slot_budget=0).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(r_wifi=0).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(loading_mode="fair-ish").validate()
    ScenarioConfig().validate()


def test_loaded_cellular_rate_examples():
    for mode in ("equal-rate", "equal-time"):
        assert loaded_cellular_rate(4.0, 1, mode, cell_rate=4.0) == 4.0
    assert loaded_cellular_rate(4.0, 4, "equal-time") == 1.0
    # equal-rate is capped by the node's own supported rate
    assert loaded_cellular_rate(1.0, 2, "equal-rate", cell_rate=4.0) == 1.0
    assert loaded_cellular_rate(4.0, 8, "equal-rate", cell_rate=4.0) == 0.5
    with pytest.raises(ConfigError):
        loaded_cellular_rate(4.0, 0, "equal-rate")


def test_loaded_cellular_rate_conservation_and_monotone():
    rng = np.random.default_rng(0)
    for _ in range(50):
        cell_rate = float(rng.uniform(1, 8))
        users = int(rng.integers(1, 30))
        rates = rng.uniform(0.1, cell_rate, size=users)
        total = sum(loaded_cellular_rate(r, users, "equal-rate", cell_rate) for r in rates)
        assert total <= cell_rate + 1e-9
    for mode in ("equal-rate", "equal-time"):
        vals = [loaded_cellular_rate(2.0, u, mode, cell_rate=4.0) for u in range(1, 20)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


# --- the WiFi slot scheduler -------------------------------------------------


def test_schedule_far_apart_both_admitted():
    topo = topology.chain_topology(1)
    # two parallel links 10 km apart never interfere
    params = topology.TopologyParams()
    nodes = [
        topology.Node(0, 0, 0, 0, 1.0),
        topology.Node(1, 100, 0, 0, 1.0),
        topology.Node(2, 10000, 0, 0, 1.0),
        topology.Node(3, 10100, 0, 0, 1.0),
    ]
    topo = topology.HetNetTopology(params, nodes)
    rng = np.random.default_rng(0)
    admitted = schedule_wifi_slot([(0, 1), (2, 3)], topo, rng)
    assert sorted(admitted) == [(0, 1), (2, 3)]


def test_schedule_adjacent_chain_exactly_one():
    topo = topology.chain_topology(3)
    for seed in range(10):
        rng = np.random.default_rng(seed)
        admitted = schedule_wifi_slot([(0, 1), (1, 2)], topo, rng)
        assert len(admitted) == 1
        admitted = schedule_wifi_slot([(0, 1), (2, 3)], topo, rng)
        assert len(admitted) == 1  # 100 m guard: d(1,2)=100 < 120


def test_schedule_empty():
    topo = topology.chain_topology(1)
    assert schedule_wifi_slot([], topo, np.random.default_rng(0)) == []


def test_schedule_admitted_sets_pass_bruteforce():
    rng = np.random.default_rng(3)
    for _ in range(60):
        pts = rng.uniform(0, 500, size=(10, 2))
        params = topology.TopologyParams()
        nodes = [topology.Node(i, float(x), float(y), 0, 1.0) for i, (x, y) in enumerate(pts)]
        topo = topology.HetNetTopology(params, nodes)
        pending = [(i, int(j)) for i in range(10) for j in topo.wifi_neighbors(i)]
        if not pending:
            continue
        admitted = schedule_wifi_slot(pending, topo, rng)
        assert brute_force_guard_ok(topo, admitted)
        assert len(admitted) >= 1


# --- single-path sanity checks (hand-derived schedules) ----------------------


def test_single_wifi_hop_saturates():
    cfg, topo, routes = chain_session(1, cellular_enabled=False, ack_delay=0,
                                      block_target=3, slot_budget=400)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 1))
    assert stats.decode_slots == [20, 40, 60]
    assert stats.relative_throughput == 1.0
    assert stats.cellular_sent == 0


def test_cellular_pipe_half_rate():
    cfg, topo, routes = chain_session(1, wifi_enabled=False, link_rate_override=0.5,
                                      block_target=3, slot_budget=600, min_hops=1)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 1))
    assert stats.decode_slots == [40, 80, 120]
    assert stats.relative_throughput == 0.5
    assert stats.wifi_sent == 0
    assert all(ev.interface == "cellular" for ev in trace)


def test_fast_path_matches_slot_by_slot():
    cfg, topo, routes = chain_session(1, wifi_enabled=False, link_rate_override=0.37,
                                      block_target=2, slot_budget=800, min_hops=1)
    fast, ftrace = run_session(cfg, topo, routes, pair=(0, 1))
    slow, strace = run_session(cfg, topo, routes, pair=(0, 1), no_skip=True)
    assert fast == slow
    assert [(e.slot, e.block_id, e.innovative) for e in ftrace] == \
        [(e.slot, e.block_id, e.innovative) for e in strace]


def two_hop_decode_oracle(block_size, blocks):
    """Hand-rolled 2-hop schedule: the relay alternates receive/transmit,
    so the destination banks one packet every 2 slots and each block
    completes 2*block_size slots after the previous one (zero delays)."""
    return [2 * block_size * b for b in range(1, blocks + 1)]


def test_two_hop_relay_alternation():
    cfg, topo, routes = chain_session(2, cellular_enabled=False, ack_delay=0,
                                      block_target=2, slot_budget=400)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 2))
    assert stats.decode_slots == two_hop_decode_oracle(20, 2)
    assert stats.relative_throughput == 0.5


def test_long_chain_saturates_near_one_third():
    log = []
    cfg, topo, routes = chain_session(7, cellular_enabled=False, block_target=5,
                                      slot_budget=2000)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 7), schedule_log=log)
    assert 0.25 <= stats.relative_throughput <= 0.35
    # spatial reuse: concurrent transmissions happen constantly
    multi = sum(1 for _, adm in log if len(adm) >= 2)
    assert multi > len(log) * 0.8
    for _, admitted in log:
        assert brute_force_guard_ok(topo, admitted)


def test_processing_delay_slows_chain():
    base_cfg, topo, routes = chain_session(7, cellular_enabled=False, block_target=3,
                                           slot_budget=3000)
    base, _ = run_session(base_cfg, topo, routes, pair=(0, 7))
    slow_cfg, _, _ = chain_session(7, cellular_enabled=False, block_target=3,
                                   slot_budget=3000, processing_delay=3)
    slow, _ = run_session(slow_cfg, topo, routes, pair=(0, 7))
    assert slow.relative_throughput < base.relative_throughput


# --- transport: ACKs, stale blocks, traces -----------------------------------


def test_ack_gating_and_stale_discards():
    cfg, topo, routes = chain_session(2, cellular_enabled=False, ack_delay=1,
                                      block_target=3, slot_budget=500)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 2))
    events = list(trace)
    # the source never leaks block b+1 before the ACK for b could have arrived
    for b, decode_slot in enumerate(stats.decode_slots):
        later = [ev for ev in events if ev.block_id == b + 1]
        if later:
            assert min(ev.slot for ev in later) > decode_slot + cfg.ack_delay
    # stale forwarding: relays keep sending block b after it was decoded
    stale = [ev for ev in events if not ev.innovative]
    for b, decode_slot in enumerate(stats.decode_slots[:-1]):
        assert any(ev.block_id == b and ev.slot > decode_slot for ev in stale)
    # exactly block_size innovative arrivals per delivered block
    for b in range(stats.blocks_delivered):
        n = sum(1 for ev in events if ev.block_id == b and ev.innovative)
        assert n == cfg.block_size


def test_trace_slots_non_decreasing_and_destination_only():
    cfg, topo, routes = chain_session(3, cellular_enabled=False, block_target=2,
                                      slot_budget=500)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 3))
    slots = [ev.slot for ev in trace]
    assert slots == sorted(slots)
    assert {ev.node for ev in trace} == {3}


def test_event_trace_rejects_time_travel():
    tr = EventTrace()
    tr.append(TraceEvent(5, 0, "wifi", 0, True))
    with pytest.raises(ValueError):
        tr.append(TraceEvent(4, 0, "wifi", 0, True))


def test_run_session_deterministic():
    cfg, topo, routes = chain_session(4, block_target=2, slot_budget=800,
                                      link_rate_override=0.3)
    a_stats, a_trace = run_session(cfg, topo, routes, pair=(0, 4))
    b_stats, b_trace = run_session(cfg, topo, routes, pair=(0, 4))
    assert a_stats == b_stats
    buf_a, buf_b = io.StringIO(), io.StringIO()
    a_trace.write_csv(buf_a)
    b_trace.write_csv(buf_b)
    assert buf_a.getvalue() == buf_b.getvalue()


def test_no_path_error():
    params = topology.TopologyParams()
    nodes = [topology.Node(0, 0, 0, 0, 1.0), topology.Node(1, 5000, 0, 0, 1.0)]
    topo = topology.HetNetTopology(params, nodes)
    routes = routing.build_routes(topo)
    cfg = ScenarioConfig(node_count=2, cellular_enabled=False, min_hops=1)
    with pytest.raises(NoPathError):
        run_session(cfg, topo, routes, pair=(0, 1))


def test_pick_session_pair_min_hops_and_determinism():
    rng = np.random.default_rng(11)
    topo = topology.generate(300, rng, topology.TopologyParams(cell_radius=400.0))
    routes = routing.build_routes(topo, targets=[])
    for seed in range(5):
        a = pick_session_pair(topo, routes, 2, np.random.default_rng(seed))
        b = pick_session_pair(topo, routes, 2, np.random.default_rng(seed))
        assert a == b
        assert routes.hop_distance(a[0], a[1]) >= 2
    with pytest.raises(NoPathError):
        pick_session_pair(topo, routes, 10_000, np.random.default_rng(0))


# --- mode comparison ----------------------------------------------------------


def test_compare_modes_superset_dominance():
    for seed in range(5):
        rng = np.random.default_rng(np.random.SeedSequence((9, seed)))
        cfg = ScenarioConfig(node_count=250, cell_radius=400.0, seed=seed,
                             link_rate_override=0.2, r_cell=0.2,
                             block_target=2, slot_budget=2500)
        topo = make_topology(cfg, rng)
        routes = routing.build_routes(topo, targets=[])
        out = compare_modes(cfg, topo, routes=routes)
        assert out["combined"].relative_throughput >= out["cellular_only"].relative_throughput
        assert out["cellular_only"].source == out["combined"].source
        assert out["cellular_only"].destination == out["combined"].destination
        assert out["cellular_only"].wifi_sent == 0


def test_compare_modes_blocks_dominance_under_budget():
    # budget-bound runs: the combined path set can only add delivered blocks
    for seed in range(5):
        rng = np.random.default_rng(np.random.SeedSequence((13, seed)))
        cfg = ScenarioConfig(node_count=250, cell_radius=400.0, seed=seed,
                             link_rate_override=0.15, r_cell=0.15,
                             block_target=1000, slot_budget=700)
        topo = make_topology(cfg, rng)
        routes = routing.build_routes(topo, targets=[])
        out = compare_modes(cfg, topo, routes=routes)
        assert out["combined"].blocks_delivered >= out["cellular_only"].blocks_delivered


# --- backbone and relay policies ----------------------------------------------


def test_backbone_shortcut_speeds_up_session():
    cfg = ScenarioConfig(node_count=250, cell_radius=400.0, seed=3,
                         link_rate_override=0.1, r_cell=0.1,
                         block_target=2, slot_budget=3000)
    rng = np.random.default_rng(np.random.SeedSequence((21, 3)))
    topo = make_topology(cfg, rng)
    routes = routing.build_routes(topo, targets=[])
    pair = pick_session_pair(topo, routes, 2,
                             np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(6)[0]))
    adhoc, _ = run_session(cfg, topo, routes, pair=pair)

    cfg_bb = ScenarioConfig(node_count=250, cell_radius=400.0, seed=3,
                            link_rate_override=0.1, r_cell=0.1,
                            backbone_fraction=1.0, block_target=2, slot_budget=3000)
    rng = np.random.default_rng(np.random.SeedSequence((21, 3)))
    topo_bb = make_topology(cfg_bb, rng)
    routes_bb = routing.build_routes(topo_bb, targets=[])
    infra, _ = run_session(cfg_bb, topo_bb, routes_bb, pair=pair)
    assert infra.wired_sent > 0
    assert infra.relative_throughput >= adhoc.relative_throughput


def test_relay_cellular_policies_run():
    for policy in (ForwardPolicy(mode="cellular-only"),
                   ForwardPolicy(mode="both", both_mode="round-robin"),
                   ForwardPolicy(mode="both", both_mode="duplicate")):
        cfg, topo, routes = chain_session(2, link_rate_override=1.0,
                                          relay_policy=policy,
                                          block_target=2, slot_budget=500)
        stats, trace = run_session(cfg, topo, routes, pair=(0, 2))
        assert stats.blocks_delivered == 2
        again, _ = run_session(cfg, topo, routes, pair=(0, 2))
        assert again == stats


def test_relay_star_wired_flow():
    topo = topology.relay_star_topology(3, link_capacity=1.0)
    routes = routing.build_routes(topo)
    cfg = ScenarioConfig(node_count=5, cellular_enabled=False, min_hops=2,
                         wired_relay_rate=0.125, block_target=2, slot_budget=5000)
    stats, trace = run_session(cfg, topo, routes, pair=(0, 4))
    assert stats.blocks_delivered == 2
    assert stats.wifi_sent == 0 and stats.cellular_sent == 0
    assert stats.wired_sent > 0
    assert all(ev.interface == "wired" for ev in trace)


def test_stats_payload_accounting():
    cfg, topo, routes = chain_session(1, cellular_enabled=False, ack_delay=0,
                                      block_target=2, slot_budget=100)
    stats, _ = run_session(cfg, topo, routes, pair=(0, 1))
    assert stats.payload_bytes_delivered == 2 * 20 * 1400
    assert stats.relative_throughput >= 0
    assert stats.throughput == stats.relative_throughput * cfg.r_wifi
