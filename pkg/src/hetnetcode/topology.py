"""Geometric model of the heterogeneous network.

Seven flat-top hexagonal cells with a base station at each center, uniformly
placed nodes, distance-tiered cellular rates, WiFi adjacency within a fixed
range, and the protocol interference model with guard factor delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

SQRT3 = math.sqrt(3.0)

# cellular rate tiers: (upper bound on d/R, fraction of the cell max rate);
# the last tier catches everything up to the cell edge
DEFAULT_RATE_TIERS = ((0.25, 1.0), (0.5, 0.5), (0.75, 0.25), (1.0, 0.125))


class LinkRangeError(ValueError):
    """Receiver is outside the transmitter's WiFi range."""


@dataclass
class TopologyParams:
    cell_radius: float = 1000.0
    wifi_range: float = 100.0
    delta: float = 0.2
    cell_rate: float = 1.0  # max cellular rate R_cell, in units of R_WiFi
    rate_tiers: tuple = DEFAULT_RATE_TIERS
    backbone_fraction: float = 0.0  # k/n, applied per cell
    backbone_rate: float = 100.0  # wired bus capacity, in units of R_WiFi

    def validate(self):
        if self.cell_radius <= 0 or self.wifi_range <= 0:
            raise ConfigError("cell_radius and wifi_range must be positive")
        if self.delta < 0:
            raise ConfigError("delta must be non-negative")
        if self.cell_rate <= 0 or self.backbone_rate <= 0:
            raise ConfigError("rates must be positive")
        if not 0.0 <= self.backbone_fraction <= 1.0:
            raise ConfigError("backbone_fraction must be in [0, 1]")
        if not self.rate_tiers or any(f <= 0 for _, f in self.rate_tiers):
            raise ConfigError("rate tiers must be non-empty with positive fractions")


@dataclass
class Node:
    id: int
    x: float
    y: float
    cell_id: int
    cellular_rate: float
    has_backbone: bool = False


def hex_centers(radius: float) -> np.ndarray:
    """Center cell at the origin plus the six adjacent cells."""
    centers = [(0.0, 0.0)]
    for k in range(6):
        ang = math.radians(30 + 60 * k)
        centers.append((SQRT3 * radius * math.cos(ang), SQRT3 * radius * math.sin(ang)))
    return np.array(centers)


def _inside_hex(points: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    dx = np.abs(points[:, 0] - center[0])
    dy = np.abs(points[:, 1] - center[1])
    return (dy <= SQRT3 / 2 * radius + 1e-9) & (SQRT3 * dx + dy <= SQRT3 * radius + 1e-9)


def rate_for_distance(dist: float, radius: float, tiers, cell_rate: float) -> float:
    dnorm = dist / radius
    for bound, frac in tiers[:-1]:
        if dnorm < bound:
            return frac * cell_rate
    return tiers[-1][1] * cell_rate


def _bucket_neighbors(positions: np.ndarray, r: float) -> list[np.ndarray]:
    """WiFi adjacency (distance <= r, boundary inclusive) via grid buckets."""
    n = len(positions)
    buckets: dict[tuple[int, int], list[int]] = {}
    keys = np.floor(positions / r).astype(np.int64)
    for i, (kx, ky) in enumerate(keys):
        buckets.setdefault((int(kx), int(ky)), []).append(i)
    neighbors = []
    for i in range(n):
        kx, ky = int(keys[i, 0]), int(keys[i, 1])
        cand = []
        for bx in (kx - 1, kx, kx + 1):
            for by in (ky - 1, ky, ky + 1):
                cand.extend(buckets.get((bx, by), ()))
        cand = np.array(sorted(cand), dtype=np.int64)
        d = np.hypot(positions[cand, 0] - positions[i, 0], positions[cand, 1] - positions[i, 1])
        ok = cand[(d <= r) & (cand != i)]
        neighbors.append(ok)
    return neighbors


@dataclass
class WiredSpec:
    """Explicit wired links for access-point style presets (no interference)."""

    edges: list  # list of (u, v) node-id pairs
    edge_capacity: float  # packets per slot per edge
    node_out: dict  # per-node wired send budget, packets per slot
    node_in: dict  # per-node wired receive budget


class HetNetTopology:
    def __init__(self, params: TopologyParams, nodes: list[Node],
                 wired: WiredSpec | None = None):
        params.validate()
        self.params = params
        self.cells = hex_centers(params.cell_radius)
        self.nodes = nodes
        self.positions = np.array([(n.x, n.y) for n in nodes]) if nodes else np.zeros((0, 2))
        self.backbone = frozenset(n.id for n in nodes if n.has_backbone)
        self.wired = wired
        self.neighbors = _bucket_neighbors(self.positions, params.wifi_range) if nodes else []

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def wifi_range(self) -> float:
        return self.params.wifi_range

    @property
    def delta(self) -> float:
        return self.params.delta

    def distance(self, a: int, b: int) -> float:
        pa, pb = self.positions[a], self.positions[b]
        return math.hypot(pa[0] - pb[0], pa[1] - pb[1])

    def wifi_neighbors(self, node: int) -> np.ndarray:
        return self.neighbors[node]

    def wired_peers(self, node: int) -> list[int]:
        """Wired next hops: explicit spec edges plus the backbone bus clique."""
        peers = set()
        if self.wired is not None:
            for u, v in self.wired.edges:
                if u == node:
                    peers.add(v)
                elif v == node:
                    peers.add(u)
        if node in self.backbone:
            peers.update(b for b in self.backbone if b != node)
        return sorted(peers)

    def protocol_model_ok(self, tx: int, rx: int, concurrent_txs) -> bool:
        """Guard check: every other transmitter k must satisfy
        d(rx, k) >= (1 + delta) * d(tx, rx)."""
        link = self.distance(tx, rx)
        if link > self.params.wifi_range:
            raise LinkRangeError(f"{tx}->{rx} at {link:.1f} m exceeds range")
        guard = (1.0 + self.params.delta) * link
        for k in concurrent_txs:
            if k in (tx, rx):
                continue
            if self.distance(rx, k) < guard:
                return False
        return True

    def dump(self, fh):
        p = self.params
        fh.write("# hetnetcode topology v1\n")
        fh.write(f"cell_radius={p.cell_radius!r}\n")
        fh.write(f"wifi_range={p.wifi_range!r}\n")
        fh.write(f"delta={p.delta!r}\n")
        fh.write(f"cell_rate={p.cell_rate!r}\n")
        fh.write(f"backbone_rate={p.backbone_rate!r}\n")
        fh.write("# id x y cell rate backbone\n")
        for n in self.nodes:
            fh.write(f"{n.id} {n.x!r} {n.y!r} {n.cell_id} {n.cellular_rate!r} "
                     f"{int(n.has_backbone)}\n")


def load(fh) -> HetNetTopology:
    params = TopologyParams()
    nodes = []
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and " " not in line:
            key, val = line.split("=", 1)
            if not hasattr(params, key):
                raise ConfigError(f"unknown topology parameter {key!r}")
            setattr(params, key, float(val))
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ConfigError(f"malformed node line: {line!r}")
        nodes.append(Node(int(parts[0]), float(parts[1]), float(parts[2]),
                          int(parts[3]), float(parts[4]), bool(int(parts[5]))))
    return HetNetTopology(params, nodes)


def cellular_link_rate(src: Node, dst: Node) -> float:
    """Session cellular quality is the worse of the two access links."""
    return min(src.cellular_rate, dst.cellular_rate)


def generate(node_count: int, rng: np.random.Generator,
             params: TopologyParams | None = None) -> HetNetTopology:
    """Uniform placement over the 7-hexagon region by rejection sampling.

    Pure function of (rng state, params): same seed, same topology.
    """
    params = params or TopologyParams()
    params.validate()
    if node_count <= 0:
        raise ConfigError("node_count must be positive")

    r = params.cell_radius
    centers = hex_centers(r)
    lo_x, hi_x = centers[:, 0].min() - r, centers[:, 0].max() + r
    lo_y, hi_y = centers[:, 1].min() - r, centers[:, 1].max() + r

    pts: list[np.ndarray] = []
    batch = max(128, node_count)
    while len(pts) < node_count:
        cand = np.column_stack([
            rng.uniform(lo_x, hi_x, size=batch),
            rng.uniform(lo_y, hi_y, size=batch),
        ])
        inside = np.zeros(batch, dtype=bool)
        for c in centers:
            inside |= _inside_hex(cand, c, r)
        pts.extend(cand[inside])
    positions = np.array(pts[:node_count])

    # nearest base station; exact ties resolve to the lowest cell index
    d2 = ((positions[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    cell_ids = np.argmin(d2, axis=1)

    nodes = []
    for i in range(node_count):
        dist = math.sqrt(d2[i, cell_ids[i]])
        rate = rate_for_distance(dist, r, params.rate_tiers, params.cell_rate)
        nodes.append(Node(i, float(positions[i, 0]), float(positions[i, 1]),
                          int(cell_ids[i]), rate))

    if params.backbone_fraction > 0:
        for cell in range(len(centers)):
            members = [n.id for n in nodes if n.cell_id == cell]
            k = round(params.backbone_fraction * len(members))
            if k > 0:
                chosen = rng.choice(np.array(members), size=k, replace=False)
                for nid in chosen:
                    nodes[int(nid)].has_backbone = True

    return HetNetTopology(params, nodes)


def chain_topology(hops: int, params: TopologyParams | None = None) -> HetNetTopology:
    """Straight line of hops+1 nodes spaced exactly one WiFi range apart."""
    if hops < 1:
        raise ConfigError("need at least one hop")
    params = params or TopologyParams()
    params.validate()
    spacing = params.wifi_range
    nodes = [Node(i, i * spacing, 0.0, 0, params.cell_rate) for i in range(hops + 1)]
    return HetNetTopology(params, nodes)


def relay_star_topology(n_relays: int, link_capacity: float,
                        interfaces_per_node: int = 2,
                        params: TopologyParams | None = None) -> HetNetTopology:
    """Access-point preset: source and destination each reach every relay
    over wired access links; no radio geometry.

    Node 0 is the source, node n_relays+1 the destination.  Per-node wired
    budgets model the fixed number of physical interfaces.
    """
    if n_relays < 1:
        raise ConfigError("need at least one relay")
    if link_capacity <= 0:
        raise ConfigError("link capacity must be positive")
    params = params or TopologyParams()
    src, dst = 0, n_relays + 1
    # positions are only cosmetic here; keep nodes far apart so no WiFi links form
    gap = 10 * params.wifi_range
    nodes = [Node(src, 0.0, 0.0, 0, params.cell_rate)]
    nodes += [Node(i, gap * i, gap, 0, params.cell_rate) for i in range(1, n_relays + 1)]
    nodes.append(Node(dst, gap * dst, 0.0, 0, params.cell_rate))
    edges = [(src, i) for i in range(1, n_relays + 1)]
    edges += [(i, dst) for i in range(1, n_relays + 1)]
    cap = interfaces_per_node * link_capacity
    node_out = {src: cap, **{i: link_capacity for i in range(1, n_relays + 1)}}
    node_in = {dst: cap, **{i: link_capacity for i in range(1, n_relays + 1)}}
    wired = WiredSpec(edges=edges, edge_capacity=link_capacity,
                      node_out=node_out, node_in=node_in)
    return HetNetTopology(params, nodes, wired=wired)
