"""Slotted packet-level simulation of coded end-to-end sessions.

One slot is one WiFi packet transmission time, so a saturated single WiFi
link moves exactly one packet per slot and relative throughput is
packets-per-slot at the destination.  Within a slot:

  (a) the cellular pipe accrues fluid credit at the loaded link rate and
      releases whole coded packets from the source straight to the
      destination;
  (b) wired access links and the backbone bus move packets under per-node,
      per-edge and bus budgets (full duplex, no interference);
  (c) a greedy maximal set of protocol-model-feasible radio transmissions
      fires, each moving one coded packet one hop;
  (d) the destination decoder consumes the slot's arrivals; completing a
      block schedules an ACK which the source acts on after the configured
      delay.

Relays never decode: each keeps a ring of received packets for the block it
currently believes is live and forwards fresh random recombinations, one
send per received packet.  A relay learns a block is over only by seeing a
newer block id and keeps forwarding stale packets until then; the
destination discards those (they still show up in the event trace).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from . import rlnc, topology as topo_mod
from .errors import ConfigError, NoPathError
from .rlnc import CodedPacket, DecoderState, RecodeBuffer, SourceBlock, block_id_newer
from .routing import (
    ForwardPolicy,
    InterfaceSelector,
    RouteTable,
    UNREACHABLE,
    build_routes,
    select_interfaces,
)
from .topology import HetNetTopology, TopologyParams, cellular_link_rate

LOADING_MODES = ("equal-rate", "equal-time")


@dataclass
class ScenarioConfig:
    # topology
    node_count: int = 750
    cell_radius: float = 1000.0
    wifi_range: float = 100.0
    delta: float = 0.2
    rate_tiers: tuple = topo_mod.DEFAULT_RATE_TIERS
    backbone_fraction: float = 0.0
    backbone_rate: float = 100.0  # wired bus capacity as a multiple of R_WiFi
    # coding
    block_size: int = 20  # M packets per block
    payload_bytes: int = 1400
    buffer_capacity: int = 8  # N_buf at relays
    # rates, all in the same units as r_wifi
    r_wifi: float = 1.0
    r_cell: float = 1.0  # cell maximum used by the loading model
    link_rate_override: float | None = None  # pin the S-D cellular link rate
    users_per_cell: int = 1
    loading_mode: str = "equal-rate"
    # transport timing (slots)
    ack_delay: int = 1
    processing_delay: int = 0
    min_hops: int = 2
    slot_budget: int = 5000
    block_target: int = 3
    # forwarding
    relay_policy: ForwardPolicy = field(default_factory=ForwardPolicy)
    wifi_enabled: bool = True
    cellular_enabled: bool = True
    wired_relay_rate: float = 1.0  # wired forwards per slot a relay can process
    seed: int = 0

    def validate(self):
        if self.node_count < 2:
            raise ConfigError("need at least a source and a destination")
        if self.block_size < 1:
            raise ConfigError("block_size must be >= 1")
        if self.payload_bytes < 1:
            raise ConfigError("payload_bytes must be >= 1")
        if self.buffer_capacity < 1:
            raise ConfigError("buffer_capacity must be >= 1")
        if self.r_wifi <= 0 or self.r_cell <= 0:
            raise ConfigError("rates must be positive")
        if self.link_rate_override is not None and self.link_rate_override < 0:
            raise ConfigError("link_rate_override must be >= 0")
        if self.users_per_cell < 1:
            raise ConfigError("users_per_cell must be >= 1")
        if self.loading_mode not in LOADING_MODES:
            raise ConfigError(f"unknown loading mode {self.loading_mode!r}")
        if self.ack_delay < 0 or self.processing_delay < 0:
            raise ConfigError("delays must be >= 0")
        if self.slot_budget < 1:
            raise ConfigError("slot_budget must be >= 1")
        if self.block_target < 1:
            raise ConfigError("block_target must be >= 1")
        if self.wired_relay_rate <= 0:
            raise ConfigError("wired_relay_rate must be positive")
        self.relay_policy.validate()

    def topology_params(self) -> TopologyParams:
        return TopologyParams(
            cell_radius=self.cell_radius,
            wifi_range=self.wifi_range,
            delta=self.delta,
            cell_rate=self.r_cell,
            rate_tiers=self.rate_tiers,
            backbone_fraction=self.backbone_fraction,
            backbone_rate=self.backbone_rate,
        )


@dataclass
class TraceEvent:
    slot: int
    node: int
    interface: str
    block_id: int
    innovative: bool


class EventTrace:
    """Per-packet arrival records at the destination, in slot order."""

    def __init__(self):
        self.events: list[TraceEvent] = []

    def append(self, ev: TraceEvent):
        if self.events and ev.slot < self.events[-1].slot:
            raise ValueError("trace slots must be non-decreasing")
        self.events.append(ev)

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def write_csv(self, fh):
        fh.write("slot,node_id,interface,block_id,innovative\n")
        for ev in self.events:
            fh.write(f"{ev.slot},{ev.node},{ev.interface},{ev.block_id},{int(ev.innovative)}\n")


@dataclass
class SessionStats:
    source: int
    destination: int
    blocks_delivered: int
    slots_elapsed: int
    wifi_sent: int
    cellular_sent: int
    wired_sent: int
    decode_slots: list[int]
    block_size: int
    payload_bytes: int
    r_wifi: float

    @property
    def relative_throughput(self) -> float:
        if self.slots_elapsed == 0:
            return 0.0
        return self.blocks_delivered * self.block_size / self.slots_elapsed

    @property
    def throughput(self) -> float:
        return self.relative_throughput * self.r_wifi

    @property
    def payload_bytes_delivered(self) -> int:
        return self.blocks_delivered * self.block_size * self.payload_bytes


def loaded_cellular_rate(link_rate: float, users: int, mode: str,
                         cell_rate: float | None = None) -> float:
    """Per-user cellular rate once the cell serves `users` users.

    equal-rate divides the cell maximum evenly, capped by the node's own
    supported rate; equal-time gives each user a 1/users time share of its
    own rate.
    """
    if users < 1:
        raise ConfigError("users must be >= 1")
    if mode == "equal-rate":
        cap = link_rate if cell_rate is None else cell_rate
        return min(link_rate, cap / users)
    if mode == "equal-time":
        return link_rate / users
    raise ConfigError(f"unknown loading mode {mode!r}")


def schedule_wifi_slot(pending_txs, topo: HetNetTopology, rng: np.random.Generator,
                       priorities=None):
    """Greedy maximal feasible subset of the pending (tx, rx) transmissions.

    Candidates are visited in random order (optionally pre-sorted by
    caller-supplied priority keys, random within ties) and admitted iff the
    guard inequality holds in both directions against everything already
    admitted and neither endpoint is already busy (half-duplex radios).
    Every admitted pair therefore satisfies d(rx, k) >= (1+delta)*d(tx, rx)
    against every other admitted transmitter k.
    """
    n = len(pending_txs)
    if n == 0:
        return []
    jitter = rng.random(n)
    if priorities is None:
        order = np.argsort(jitter, kind="stable")
    else:
        order = sorted(range(n), key=lambda i: (priorities[i], jitter[i]))
    delta = topo.delta
    admitted: list[tuple[int, int]] = []
    busy: set[int] = set()
    for i in order:
        tx, rx = pending_txs[i][0], pending_txs[i][1]
        if tx in busy or rx in busy:
            continue
        guard = (1.0 + delta) * topo.distance(tx, rx)
        ok = True
        for atx, arx in admitted:
            if topo.distance(rx, atx) < guard:
                ok = False
                break
            if topo.distance(arx, tx) < (1.0 + delta) * topo.distance(atx, arx):
                ok = False
                break
        if ok:
            admitted.append((tx, rx))
            busy.add(tx)
            busy.add(rx)
    return admitted


def pick_session_pair(topo: HetNetTopology, routes: RouteTable, min_hops: int,
                      rng: np.random.Generator) -> tuple[int, int]:
    """Random S-D pair with a finite route of at least min_hops hops."""
    order = rng.permutation(len(topo))
    for s in order:
        dist = routes.distances_to(int(s))
        cand = np.nonzero((dist >= min_hops) & (dist < UNREACHABLE))[0]
        if cand.size:
            d = int(cand[rng.integers(0, cand.size)])
            return int(s), d
    raise NoPathError(f"no node pair at >= {min_hops} hops exists in this topology")


class _Credit:
    """Fractional per-slot budget released as whole packets."""

    __slots__ = ("rate", "value", "limit")

    def __init__(self, rate: float, phase: float = 0.0):
        self.rate = rate
        self.limit = max(1.0, rate)
        self.value = phase

    def tick(self, slots: int = 1):
        self.value = min(self.limit, self.value + self.rate * slots)

    def take(self) -> bool:
        if self.value >= 1.0:
            self.value -= 1.0
            return True
        return False


class _Relay:
    __slots__ = ("buffer", "send_credit", "proc", "inbox", "selector", "cell_up")

    def __init__(self, capacity: int, wired_rate: float, phase: float,
                 selector: InterfaceSelector, cell_up: _Credit | None):
        self.buffer = RecodeBuffer(capacity)
        self.send_credit = 0  # one send permitted per received packet
        self.proc = _Credit(wired_rate, phase=phase)
        self.inbox: deque = deque()
        self.selector = selector
        self.cell_up = cell_up


class _Session:
    """Single-run state; drive via run_session()."""

    def __init__(self, config: ScenarioConfig, topo: HetNetTopology, routes: RouteTable,
                 pair: tuple[int, int] | None, schedule_log, no_skip: bool):
        config.validate()
        self.cfg = config
        self.topo = topo
        self.routes = routes
        self.schedule_log = schedule_log
        self.no_skip = no_skip

        streams = np.random.SeedSequence(config.seed).spawn(6)
        self.rng_pair = np.random.default_rng(streams[0])
        self.rng_cell = np.random.default_rng(streams[1])  # cellular coefficient draws
        self.rng_wifi = np.random.default_rng(streams[2])  # source-side wifi/wired draws
        self.rng_relay = np.random.default_rng(streams[3])  # relay recodes + hop picks
        self.rng_sched = np.random.default_rng(streams[4])
        self.rng_data = np.random.default_rng(streams[5])  # block payload contents

        if pair is None:
            pair = pick_session_pair(topo, routes, config.min_hops, self.rng_pair)
        self.src, self.dst = int(pair[0]), int(pair[1])
        if self.src == self.dst:
            raise ConfigError("source and destination must differ")
        self.dist_to_dst = routes.distances_to(self.dst)

        link = config.link_rate_override
        if link is None:
            link = cellular_link_rate(topo.nodes[self.src], topo.nodes[self.dst])
        loaded = loaded_cellular_rate(link, config.users_per_cell,
                                      config.loading_mode, config.r_cell)
        pipe = loaded / config.r_wifi if config.cellular_enabled else 0.0
        self.cell_up = _Credit(pipe)
        self.cell_down = _Credit(pipe)
        self.cell_queue: deque = deque()

        n = len(topo)
        self.wifi_sets = [set(int(v) for v in topo.wifi_neighbors(i)) for i in range(n)]
        self.wired_sets = [set(topo.wired_peers(i)) for i in range(n)]
        self.wired_active = config.wifi_enabled and any(self.wired_sets)

        self.wifi_usable = bool(
            config.wifi_enabled
            and self.dist_to_dst[self.src] < UNREACHABLE
            and self.routes.next_hops(self.src, self.dst)
        )
        if not self.wifi_usable and pipe <= 0:
            raise NoPathError(
                f"destination {self.dst} unreachable from {self.src} on every interface")

        # wired budgets: one credit per undirected edge, per-node in/out caps,
        # and a shared bus budget for backbone hops
        spec = topo.wired
        self.edge_cap: dict[tuple[int, int], _Credit] = {}
        self._wired_credits: list[_Credit] = []
        self.node_out: dict[int, _Credit] = {}
        self.node_in: dict[int, _Credit] = {}
        if spec is not None:
            for u, v in spec.edges:
                credit = _Credit(spec.edge_capacity)
                self.edge_cap[(u, v)] = credit
                self.edge_cap[(v, u)] = credit
                self._wired_credits.append(credit)
            for nid, cap in spec.node_out.items():
                self.node_out[nid] = _Credit(cap)
                self._wired_credits.append(self.node_out[nid])
            for nid, cap in spec.node_in.items():
                self.node_in[nid] = _Credit(cap)
                self._wired_credits.append(self.node_in[nid])
        self.bus: _Credit | None = None
        if topo.backbone:
            self.bus = _Credit(config.backbone_rate / config.r_wifi)
            self._wired_credits.append(self.bus)

        # transport state
        self.block_id = 0
        self.block = self._make_block(0)
        self.expected_block = 0
        self.decoder = DecoderState(0, config.block_size)
        self.ack_slot: int | None = None  # slot from which the source may advance
        self.blocks_delivered = 0
        self.decode_slots: list[int] = []

        self.relays: dict[int, _Relay] = {}
        self.trace = EventTrace()
        self.wifi_sent = 0
        self.cellular_sent = 0
        self.wired_sent = 0
        self.slot = 0
        self.relay_cellular = config.relay_policy.mode != "wifi-only"

    # -- small helpers -----------------------------------------------------

    def _make_block(self, block_id: int) -> SourceBlock:
        cfg = self.cfg
        data = self.rng_data.integers(0, 256, size=(cfg.block_size, cfg.payload_bytes),
                                      dtype=np.uint8)
        return SourceBlock(block_id, data)

    def _relay(self, node: int) -> _Relay:
        r = self.relays.get(node)
        if r is None:
            cfg = self.cfg
            phase = (node * cfg.wired_relay_rate) % 1.0
            selector = InterfaceSelector(cfg.relay_policy, rng=self.rng_relay)
            cell_up = None
            if self.relay_cellular and cfg.cellular_enabled:
                up = loaded_cellular_rate(self.topo.nodes[node].cellular_rate,
                                          cfg.users_per_cell, cfg.loading_mode,
                                          cfg.r_cell)
                cell_up = _Credit(up / cfg.r_wifi)
            r = _Relay(cfg.buffer_capacity, cfg.wired_relay_rate, phase, selector, cell_up)
            self.relays[node] = r
        return r

    def _deliver_to_node(self, node: int, packet: CodedPacket):
        avail = self.slot + 1 + self.cfg.processing_delay
        self._relay(node).inbox.append((avail, packet))

    def _arrive_at_destination(self, packet: CodedPacket, interface: str):
        if packet.block_id == self.expected_block:
            innovative = self.decoder.receive(packet)
        elif block_id_newer(packet.block_id, self.expected_block):
            # defensive: cannot happen under stop-and-wait, but newer wins
            self.expected_block = packet.block_id
            self.decoder = DecoderState(packet.block_id, self.cfg.block_size)
            innovative = self.decoder.receive(packet)
        else:
            innovative = False  # stale block: discard
        self.trace.append(TraceEvent(self.slot, self.dst, interface,
                                     packet.block_id, innovative))
        if self.decoder.rank == self.cfg.block_size:
            decoded = self.decoder.decode()
            if not np.array_equal(decoded.packets, self.block.packets):
                raise AssertionError("decoded block does not match the source block")
            self.blocks_delivered += 1
            self.decode_slots.append(self.slot)
            self.ack_slot = self.slot + 1 + self.cfg.ack_delay
            self.expected_block = (self.expected_block + 1) % rlnc.BLOCK_ID_MODULUS
            self.decoder = DecoderState(self.expected_block, self.cfg.block_size)

    def _relay_can_send(self, relay: _Relay) -> bool:
        return relay.send_credit >= 1 and bool(relay.buffer.packets)

    def _relay_interfaces(self, node: int, relay: _Relay) -> frozenset:
        """Interfaces this relay's next packet goes out on."""
        if not self.relay_cellular:
            return frozenset({"wifi"})
        available = []
        if self.cfg.wifi_enabled:
            available.append("wifi")
        if relay.cell_up is not None:
            available.append("cellular")
        if not available:
            return frozenset()
        try:
            return select_interfaces(relay.selector, available=tuple(available))
        except ConfigError:
            return frozenset()

    # -- per-slot phases ----------------------------------------------------

    def _maybe_advance_source(self):
        if self.ack_slot is not None and self.slot >= self.ack_slot:
            self.ack_slot = None
            self.block_id = (self.block_id + 1) % rlnc.BLOCK_ID_MODULUS
            self.block = self._make_block(self.block_id)

    def _ingest_relays(self):
        for node in sorted(self.relays):
            relay = self.relays[node]
            while relay.inbox and relay.inbox[0][0] <= self.slot:
                _, packet = relay.inbox.popleft()
                if relay.buffer.offer(packet):
                    relay.send_credit = min(self.cfg.buffer_capacity,
                                            relay.send_credit + 1)

    def _cellular_phase(self, relay_plans: dict):
        if self.cell_up.rate > 0:
            self.cell_up.tick()
            self.cell_down.tick()
            while self.cell_up.take():
                self.cell_queue.append(rlnc.encode(self.block, self.rng_cell))
                self.cellular_sent += 1
        for node, ifaces in relay_plans.items():
            if "cellular" not in ifaces:
                continue
            relay = self.relays[node]
            relay.cell_up.tick()
            if not self._relay_can_send(relay) or not relay.cell_up.take():
                continue
            pkt = rlnc.recode(relay.buffer, self.rng_relay)
            relay.send_credit -= 1
            self.cell_queue.append(pkt)
            self.cellular_sent += 1
            if "wifi" in ifaces:  # duplicate schedule: same copy on the radio too
                relay_plans[node] = ("dup", pkt)
        while self.cell_queue and self.cell_down.take():
            self._arrive_at_destination(self.cell_queue.popleft(), "cellular")

    def _wired_targets(self, node: int) -> list[int]:
        return [v for v in self.routes.next_hops(node, self.dst)
                if v in self.wired_sets[node]]

    def _wired_send_ok(self, u: int, v: int) -> bool:
        edge = self.edge_cap.get((u, v))
        if edge is not None:
            if edge.value < 1.0:
                return False
        elif self.bus is not None and self.bus.value < 1.0:
            return False
        out = self.node_out.get(u)
        if out is not None and out.value < 1.0:
            return False
        inn = self.node_in.get(v)
        if inn is not None and inn.value < 1.0:
            return False
        return True

    def _consume_wired(self, u: int, v: int):
        edge = self.edge_cap.get((u, v))
        if edge is not None:
            edge.value -= 1.0
        elif self.bus is not None:
            self.bus.value -= 1.0
        out = self.node_out.get(u)
        if out is not None:
            out.value -= 1.0
        inn = self.node_in.get(v)
        if inn is not None:
            inn.value -= 1.0

    def _wired_deliver(self, v: int, pkt: CodedPacket):
        self.wired_sent += 1
        if v == self.dst:
            self._arrive_at_destination(pkt, "wired")
        else:
            self._deliver_to_node(v, pkt)

    def _wired_phase(self):
        if not self.wired_active:
            return
        for credit in self._wired_credits:
            credit.tick()
        # the source floods up to one block's worth per slot; relays are
        # bounded by their processing rate and their send credit
        if self.wired_sets[self.src]:
            for _ in range(self.cfg.block_size):
                targets = [v for v in self._wired_targets(self.src)
                           if self._wired_send_ok(self.src, v)]
                if not targets:
                    break
                v = targets[int(self.rng_wifi.integers(0, len(targets)))]
                self._consume_wired(self.src, v)
                self._wired_deliver(v, rlnc.encode(self.block, self.rng_wifi))
        for node in sorted(self.relays):
            if not self.wired_sets[node]:
                continue
            relay = self.relays[node]
            relay.proc.tick()
            while self._relay_can_send(relay) and relay.proc.value >= 1.0:
                targets = [v for v in self._wired_targets(node)
                           if self._wired_send_ok(node, v)]
                if not targets:
                    break
                v = targets[int(self.rng_relay.integers(0, len(targets)))]
                relay.proc.value -= 1.0
                relay.send_credit -= 1
                self._consume_wired(node, v)
                self._wired_deliver(v, rlnc.recode(relay.buffer, self.rng_relay))

    def _radio_phase(self, relay_plans: dict):
        if not self.cfg.wifi_enabled:
            return
        pending = []  # (tx, rx, prematerialized packet or None)
        priorities = []
        for node in sorted(self.relays):
            relay = self.relays[node]
            plan = relay_plans.get(node)
            dup_pkt = None
            if isinstance(plan, tuple) and plan[0] == "dup":
                dup_pkt = plan[1]
            elif self.relay_cellular and (plan is None or "wifi" not in plan):
                continue
            if dup_pkt is None and not self._relay_can_send(relay):
                continue
            cand = [v for v in self.routes.next_hops(node, self.dst)
                    if v in self.wifi_sets[node]]
            if not cand:
                continue
            rx = cand[int(self.rng_relay.integers(0, len(cand)))]
            pending.append((node, rx, dup_pkt))
            priorities.append(self.dist_to_dst[node])
        if self.wifi_usable:
            cand = [v for v in self.routes.next_hops(self.src, self.dst)
                    if v in self.wifi_sets[self.src]]
            if cand:
                rx = cand[int(self.rng_wifi.integers(0, len(cand)))]
                pending.append((self.src, rx, None))
                priorities.append(self.dist_to_dst[self.src])
        if not pending:
            return
        admitted = schedule_wifi_slot(pending, self.topo, self.rng_sched, priorities)
        if self.schedule_log is not None and admitted:
            self.schedule_log.append((self.slot, list(admitted)))
        staged = {(tx, rx): pkt for tx, rx, pkt in pending}
        for tx, rx in admitted:
            pkt = staged[(tx, rx)]
            if pkt is None:
                if tx == self.src:
                    pkt = rlnc.encode(self.block, self.rng_wifi)
                else:
                    relay = self.relays[tx]
                    pkt = rlnc.recode(relay.buffer, self.rng_relay)
                    relay.send_credit -= 1
            self.wifi_sent += 1
            if rx == self.dst:
                self._arrive_at_destination(pkt, "wifi")
            else:
                self._deliver_to_node(rx, pkt)

    # -- fast path for cellular-only runs ------------------------------------

    def _fast_forwardable(self) -> bool:
        return not self.wifi_usable and not self.wired_active

    def _skip_ahead(self, budget: int):
        """Jump over slots in which nothing can happen (pure cellular pipe)."""
        steps = []
        if self.cell_up.rate > 0:
            lacking = max(0.0, 1.0 - self.cell_up.value)
            steps.append(math.ceil(lacking / self.cell_up.rate))
        if self.ack_slot is not None:
            steps.append(self.ack_slot - self.slot)
        if not steps:
            self.slot = budget
            return
        skipped = min(max(1, min(steps)) - 1, budget - self.slot - 1)
        if skipped > 0:
            self.cell_up.tick(skipped)
            self.cell_down.tick(skipped)
            self.slot += skipped

    # -- main loop -----------------------------------------------------------

    def run(self) -> tuple[SessionStats, EventTrace]:
        budget = self.cfg.slot_budget
        fast = (not self.no_skip) and self._fast_forwardable()
        while self.slot < budget and self.blocks_delivered < self.cfg.block_target:
            if fast:
                self._skip_ahead(budget)
            self.slot += 1
            self._maybe_advance_source()
            self._ingest_relays()
            relay_plans = {}
            if self.relay_cellular:
                for node in sorted(self.relays):
                    relay = self.relays[node]
                    if self._relay_can_send(relay):
                        relay_plans[node] = self._relay_interfaces(node, relay)
            self._cellular_phase(relay_plans)
            self._wired_phase()
            self._radio_phase(relay_plans)
        elapsed = self.decode_slots[-1] if self.decode_slots else budget
        stats = SessionStats(
            source=self.src,
            destination=self.dst,
            blocks_delivered=self.blocks_delivered,
            slots_elapsed=elapsed,
            wifi_sent=self.wifi_sent,
            cellular_sent=self.cellular_sent,
            wired_sent=self.wired_sent,
            decode_slots=self.decode_slots,
            block_size=self.cfg.block_size,
            payload_bytes=self.cfg.payload_bytes,
            r_wifi=self.cfg.r_wifi,
        )
        return stats, self.trace


def run_session(config: ScenarioConfig, topo: HetNetTopology, routes: RouteTable,
                pair: tuple[int, int] | None = None, schedule_log=None,
                no_skip: bool = False) -> tuple[SessionStats, EventTrace]:
    """Simulate one S-D session; deterministic in (config, topology, routes)."""
    return _Session(config, topo, routes, pair, schedule_log, no_skip).run()


def make_topology(config: ScenarioConfig, rng: np.random.Generator) -> HetNetTopology:
    return topo_mod.generate(config.node_count, rng, config.topology_params())


def compare_modes(config: ScenarioConfig, topo: HetNetTopology,
                  routes: RouteTable | None = None,
                  pair: tuple[int, int] | None = None) -> dict:
    """Same seed, same topology, same pair: cellular-only vs both interfaces."""
    config.validate()
    if routes is None:
        routes = build_routes(topo, targets=[])
    if pair is None:
        rng_pair = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(6)[0])
        pair = pick_session_pair(topo, routes, config.min_hops, rng_pair)
    cell_stats, cell_trace = run_session(
        replace(config, wifi_enabled=False, cellular_enabled=True),
        topo, routes, pair=pair)
    comb_stats, comb_trace = run_session(
        replace(config, cellular_enabled=True),
        topo, routes, pair=pair)
    return {
        "pair": pair,
        "cellular_only": cell_stats,
        "combined": comb_stats,
        "cellular_trace": cell_trace,
        "combined_trace": comb_trace,
    }
