"""Scenario presets and parameter sweeps.

Every preset is a pure function of (spec, seed): trial t of a sweep always
sees the same topology, S-D pair, and coefficient draws, no matter which
sweep point is being evaluated or how many workers run.  Sweep points are
dispatched to a process pool when workers > 1; rows are always emitted in
sweep-parameter order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import simengine, topology as topo_mod
from .errors import ConfigError
from .routing import build_routes
from .simengine import ScenarioConfig, compare_modes, pick_session_pair, run_session

TOPO2_RATES = (12, 18, 24, 36, 48, 54)
TOPO2_REFERENCE_RATE = 54.0  # access link rate that maps to 1 packet/slot
TOPO2_RELAY_RATE = 0.125  # processing-limited relay forwards per slot
TOPO2_INTERFACES = 2


@dataclass
class SweepSpec:
    preset: str
    param_min: float | None = None
    param_max: float | None = None
    param_step: float | None = None
    values: tuple | None = None  # explicit sweep points, overrides min/max/step
    trials: int = 50
    seed: int = 0
    out: str | None = None
    workers: int = 1
    scenario: dict = field(default_factory=dict)  # ScenarioConfig overrides

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.values is not None:
            if len(self.values) == 0:
                raise ConfigError("explicit sweep values must be non-empty")
            return
        have = [v is not None for v in (self.param_min, self.param_max, self.param_step)]
        if any(have) and not all(have):
            raise ConfigError("param_min, param_max, param_step must be given together")
        if all(have):
            if self.param_min > self.param_max:
                raise ConfigError("param_min must be <= param_max")
            if self.param_step <= 0:
                raise ConfigError("param_step must be > 0")

    def sweep_values(self, default):
        self.validate()
        if self.values is not None:
            return list(self.values)
        if self.param_min is None:
            return list(default)
        count = int(math.floor((self.param_max - self.param_min) / self.param_step + 1e-9)) + 1
        return [self.param_min + i * self.param_step for i in range(count)]


def trial_config(base: ScenarioConfig, spec_seed: int, trial: int, **overrides) -> ScenarioConfig:
    """Per-trial engine config; the seed mix keeps trials independent."""
    return replace(base, seed=spec_seed * 1_000_003 + trial, **overrides)


def _topology_rng(spec_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((spec_seed, trial, 1)))


def _base_config(spec: SweepSpec, **defaults) -> ScenarioConfig:
    merged = dict(defaults)
    merged.update(spec.scenario)
    if "relay_policy" in merged and isinstance(merged["relay_policy"], dict):
        from .routing import ForwardPolicy

        merged["relay_policy"] = ForwardPolicy(**merged["relay_policy"])
    if "rate_tiers" in merged:
        merged["rate_tiers"] = tuple(tuple(t) for t in merged["rate_tiers"])
    return ScenarioConfig(**merged)


def _pool_map(fn, args_list, workers: int):
    if workers <= 1 or len(args_list) <= 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args_list))


def _mean(xs):
    return sum(xs) / len(xs)


def _stderr(xs):
    if len(xs) < 2:
        return 0.0
    m = _mean(xs)
    var = sum((x - m) ** 2 for x in xs) / (len(xs) - 1)
    return math.sqrt(var / len(xs))


# --- Case 1: ad-hoc WiFi, rate and load sweeps -----------------------------


def _rate_trial(args):
    spec_seed, trial, ratios, base = args
    rng = _topology_rng(spec_seed, trial)
    probe_cfg = trial_config(base, spec_seed, trial)
    topo = simengine.make_topology(probe_cfg, rng)
    routes = build_routes(topo, targets=[])
    out = []
    for ratio in ratios:
        cfg = trial_config(base, spec_seed, trial,
                           link_rate_override=float(ratio), r_cell=float(ratio))
        res = compare_modes(cfg, topo, routes=routes)
        out.append((res["cellular_only"].relative_throughput,
                    res["combined"].relative_throughput))
    return out


DEFAULT_RATE_RATIOS = tuple(round(0.1 * i, 2) for i in range(1, 21))


def preset_rate_sweep(spec: SweepSpec):
    """Relative throughput vs cellular/WiFi link-rate ratio (single session)."""
    ratios = spec.sweep_values(DEFAULT_RATE_RATIOS)
    if any(r <= 0 for r in ratios):
        raise ConfigError("rate ratios must be positive")
    base = _base_config(spec, block_target=3, slot_budget=4000)
    tasks = [(spec.seed, t, ratios, base) for t in range(spec.trials)]
    per_trial = _pool_map(_rate_trial, tasks, spec.workers)
    rows = []
    for i, ratio in enumerate(ratios):
        cell = [pt[i][0] for pt in per_trial]
        comb = [pt[i][1] for pt in per_trial]
        rows.append((float(ratio), _mean(cell), _mean(comb), _stderr(comb)))
    return ["rate_ratio", "rel_tput_cellular", "rel_tput_combined", "stderr"], rows


def _load_trial(args):
    spec_seed, trial, users, ratio, base = args
    rng = _topology_rng(spec_seed, trial)
    probe_cfg = trial_config(base, spec_seed, trial)
    topo = simengine.make_topology(probe_cfg, rng)
    routes = build_routes(topo, targets=[])
    out = []
    for u in users:
        cfg = trial_config(base, spec_seed, trial, users_per_cell=int(u),
                           link_rate_override=ratio, r_cell=ratio)
        res = compare_modes(cfg, topo, routes=routes)
        out.append((res["cellular_only"].relative_throughput,
                    res["combined"].relative_throughput))
    return out


DEFAULT_LOAD_USERS = (1, 2, 4, 8, 16, 32)
DEFAULT_LOAD_RATIO = 0.5


def preset_load_sweep(spec: SweepSpec, ratio: float = DEFAULT_LOAD_RATIO):
    """Cell loading: per-user throughput vs the number of users per cell."""
    users = [int(u) for u in spec.sweep_values(DEFAULT_LOAD_USERS)]
    if any(u < 1 for u in users):
        raise ConfigError("users_per_cell values must be >= 1")
    base = _base_config(spec, block_target=2, slot_budget=8000)
    tasks = [(spec.seed, t, users, ratio, base) for t in range(spec.trials)]
    per_trial = _pool_map(_load_trial, tasks, spec.workers)
    rows = []
    for i, u in enumerate(users):
        cell = [pt[i][0] for pt in per_trial]
        comb = [pt[i][1] for pt in per_trial]
        rows.append((u, _mean(cell), _mean(comb)))
    return ["users_per_cell", "rel_tput_cellular", "rel_tput_combined"], rows


# --- Case 2: infrastructure WiFi -------------------------------------------


def _infra_trial(args):
    spec_seed, trial, fracs, base = args
    rng = _topology_rng(spec_seed, trial)
    probe_cfg = trial_config(base, spec_seed, trial)
    base_topo = simengine.make_topology(probe_cfg, rng)
    base_routes = build_routes(base_topo, targets=[])
    pair_rng = np.random.default_rng(np.random.SeedSequence(probe_cfg.seed).spawn(6)[0])
    pair = pick_session_pair(base_topo, base_routes, probe_cfg.min_hops, pair_rng)
    out = []
    for frac in fracs:
        cfg = trial_config(base, spec_seed, trial, backbone_fraction=float(frac))
        topo = simengine.make_topology(cfg, _topology_rng(spec_seed, trial))
        routes = build_routes(topo, targets=[])
        stats, _ = run_session(cfg, topo, routes, pair=pair)
        out.append(stats.relative_throughput)
    return out


DEFAULT_INFRA_FRACS = (0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 1.0)
DEFAULT_INFRA_RATIO = 0.1


def preset_infra_sweep(spec: SweepSpec, ratio: float = DEFAULT_INFRA_RATIO):
    """Combined throughput vs the fraction k/n of backbone-connected nodes."""
    fracs = spec.sweep_values(DEFAULT_INFRA_FRACS)
    if any(not 0 < f <= 1 for f in fracs):
        raise ConfigError("k/n values must lie in (0, 1]")
    base = _base_config(spec, block_target=3, slot_budget=4000,
                        link_rate_override=ratio, r_cell=ratio)
    tasks = [(spec.seed, t, fracs, base) for t in range(spec.trials)]
    per_trial = _pool_map(_infra_trial, tasks, spec.workers)
    rows = []
    for i, frac in enumerate(fracs):
        vals = [pt[i] for pt in per_trial]
        rows.append((float(frac), _mean(vals)))
    return ["k_over_n", "rel_tput"], rows


# --- testbed topology presets ----------------------------------------------


def _topo1_trial(args):
    spec_seed, trial, ratios, hops, base = args
    topo = topo_mod.chain_topology(hops, base.topology_params())
    routes = build_routes(topo)
    pair = (0, hops)
    out = []
    for ratio in ratios:
        cfg = trial_config(base, spec_seed, trial,
                           link_rate_override=float(ratio), r_cell=float(ratio))
        res = compare_modes(cfg, topo, routes=routes, pair=pair)
        out.append((res["cellular_only"].relative_throughput,
                    res["combined"].relative_throughput))
    return out


DEFAULT_TOPO1_RATIOS = (0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0)
TOPO1_HOPS = 7


def preset_topo1(spec: SweepSpec, processing_delay: int | None = None):
    """Seven-hop chain in parallel with a constant-rate WiMAX-style pipe."""
    ratios = spec.sweep_values(DEFAULT_TOPO1_RATIOS)
    if any(r <= 0 for r in ratios):
        raise ConfigError("rate ratios must be positive")
    overrides = {"node_count": TOPO1_HOPS + 1, "min_hops": TOPO1_HOPS,
                 "block_target": 3, "slot_budget": 6000}
    if processing_delay is not None:
        overrides["processing_delay"] = processing_delay
    base = _base_config(spec, **overrides)
    tasks = [(spec.seed, t, ratios, TOPO1_HOPS, base) for t in range(spec.trials)]
    per_trial = _pool_map(_topo1_trial, tasks, spec.workers)
    rows = []
    for i, ratio in enumerate(ratios):
        wimax = [pt[i][0] for pt in per_trial]
        comb = [pt[i][1] for pt in per_trial]
        rows.append((float(ratio), _mean(wimax), _mean(comb)))
    return ["rate_ratio", "rel_tput_wimax", "rel_tput_combined"], rows


def topo2_config(spec_seed: int, trial: int, n_relays: int, base: ScenarioConfig) -> ScenarioConfig:
    return trial_config(base, spec_seed, trial,
                        node_count=n_relays + 2,
                        cellular_enabled=False,
                        min_hops=2,
                        wired_relay_rate=TOPO2_RELAY_RATE)


def _topo2_trial(args):
    spec_seed, trial, rates, relay_counts, base = args
    out = []
    for rate in rates:
        link_cap = rate / TOPO2_REFERENCE_RATE
        for n in relay_counts:
            topo = topo_mod.relay_star_topology(n, link_capacity=link_cap,
                                                interfaces_per_node=TOPO2_INTERFACES)
            routes = build_routes(topo)
            cfg = topo2_config(spec_seed, trial, n, base)
            stats, _ = run_session(cfg, topo, routes, pair=(0, n + 1))
            out.append(stats.relative_throughput)
    return out


DEFAULT_TOPO2_RELAYS = (1, 2, 3, 4, 5, 6)


def preset_topo2(spec: SweepSpec, rates=TOPO2_RATES):
    """Dual-interface access-point topology: throughput vs relay count N."""
    relay_counts = [int(n) for n in spec.sweep_values(DEFAULT_TOPO2_RELAYS)]
    if any(n < 1 for n in relay_counts):
        raise ConfigError("relay counts must be >= 1")
    base = _base_config(spec, block_target=4, slot_budget=60000)
    tasks = [(spec.seed, t, tuple(rates), relay_counts, base) for t in range(spec.trials)]
    per_trial = _pool_map(_topo2_trial, tasks, spec.workers)
    rows = []
    idx = 0
    for rate in rates:
        for n in relay_counts:
            vals = [pt[idx] for pt in per_trial]
            rows.append((float(rate), n, _mean(vals)))
            idx += 1
    return ["link_rate", "n_relays", "throughput"], rows


# --- CSV emission -----------------------------------------------------------


def format_rows(header, rows) -> str:
    """Stable CSV text: 6-decimal floats, plain ints, newline-terminated."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, bool):
                cells.append(str(int(v)))
            elif isinstance(v, int):
                cells.append(str(v))
            else:
                cells.append(f"{v:.6f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


PRESETS = {
    "rate-sweep": preset_rate_sweep,
    "load-sweep": preset_load_sweep,
    "infra-sweep": preset_infra_sweep,
    "topo1": preset_topo1,
    "topo2": preset_topo2,
}
