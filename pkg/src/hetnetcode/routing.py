"""Hop-count routing over the WiFi graph and interface forwarding policies.

A converged routing protocol is assumed: every node knows its hop distance
to every other node.  Wired access links and the backbone bus count as one
virtual hop.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .topology import HetNetTopology

UNREACHABLE = float("inf")

POLICY_MODES = ("cellular-only", "wifi-only", "both")
BOTH_MODES = ("round-robin", "duplicate", "probabilistic")


@dataclass(frozen=True)
class ForwardPolicy:
    mode: str = "wifi-only"
    both_mode: str = "round-robin"
    p: float = 0.5  # probability of picking cellular in probabilistic mode

    def validate(self):
        if self.mode not in POLICY_MODES:
            raise ConfigError(f"unknown policy mode {self.mode!r}")
        if self.both_mode not in BOTH_MODES:
            raise ConfigError(f"unknown both-mode schedule {self.both_mode!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("probabilistic p must lie in [0, 1]")


class InterfaceSelector:
    """Single-owner per-node state for repeated interface choices."""

    def __init__(self, policy: ForwardPolicy, rng: np.random.Generator | None = None):
        policy.validate()
        self.policy = policy
        self.rng = rng
        self._count = 0


def select_interfaces(selector: InterfaceSelector, available=("wifi", "cellular")):
    """Interfaces the next packet goes out on, per the node's policy."""
    avail = frozenset(available)
    policy = selector.policy
    if policy.mode == "cellular-only":
        wanted = {"cellular"}
    elif policy.mode == "wifi-only":
        wanted = {"wifi"}
    elif policy.both_mode == "duplicate":
        wanted = {"wifi", "cellular"}
    elif policy.both_mode == "round-robin":
        wanted = {"wifi"} if selector._count % 2 == 0 else {"cellular"}
        selector._count += 1
    else:  # probabilistic
        if selector.rng is None:
            raise ConfigError("probabilistic policy needs an rng")
        wanted = {"cellular"} if selector.rng.random() < policy.p else {"wifi"}
    missing = wanted - avail
    if missing:
        raise ConfigError(f"policy requires unavailable interface(s): {sorted(missing)}")
    return frozenset(wanted)


class RouteTable:
    """Hop distances and next-hop candidates toward each destination.

    Distances for `targets` are filled at build time; further destinations
    are computed on first use (single-threaded access only at that point).
    """

    def __init__(self, topo: HetNetTopology, targets=None):
        self.topology = topo
        n = len(topo)
        self._adj = [
            sorted(set(int(v) for v in topo.wifi_neighbors(i)) | set(topo.wired_peers(i)))
            for i in range(n)
        ]
        self._dist: dict[int, np.ndarray] = {}
        for t in range(n) if targets is None else targets:
            self._dist[int(t)] = self._bfs(int(t))

    def adjacency(self, node: int) -> list[int]:
        return self._adj[node]

    def _bfs(self, src: int) -> np.ndarray:
        dist = np.full(len(self._adj), UNREACHABLE)
        dist[src] = 0.0
        q = deque([src])
        while q:
            u = q.popleft()
            du = dist[u]
            for v in self._adj[u]:
                if dist[v] == UNREACHABLE:
                    dist[v] = du + 1
                    q.append(v)
        return dist

    def distances_to(self, dst: int) -> np.ndarray:
        if dst not in self._dist:
            self._dist[dst] = self._bfs(dst)
        return self._dist[dst]

    def hop_distance(self, src: int, dst: int) -> float:
        return float(self.distances_to(dst)[src])

    def next_hops(self, node: int, dst: int) -> list[int]:
        """Neighbors exactly one hop closer to dst (may be empty)."""
        dist = self.distances_to(dst)
        if dist[node] == UNREACHABLE:
            return []
        want = dist[node] - 1
        return [v for v in self._adj[node] if dist[v] == want]


def build_routes(topo: HetNetTopology, targets=None) -> RouteTable:
    return RouteTable(topo, targets=targets)


def on_route(node: int, src: int, dst: int, routes: RouteTable) -> bool:
    """True iff node lies on some shortest src->dst path."""
    total = routes.hop_distance(src, dst)
    if total == UNREACHABLE:
        return False
    return routes.hop_distance(src, node) + routes.hop_distance(node, dst) == total
