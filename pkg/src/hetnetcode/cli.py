"""Command-line front end: presets, sweeps, topology dumps, trace replay.

Config files are JSON with two optional sections mirroring the dataclasses
field-for-field:

    {
      "scenario": { ... ScenarioConfig fields ... },
      "sweep":    { "trials": 50, "seed": 0, "values": [...],
                    "param_min": ..., "param_max": ..., "param_step": ...,
                    "workers": 1, "out": "rows.csv" }
    }

Command-line flags override config file values.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import presets, topology as topo_mod
from .errors import ConfigError, NoPathError
from .presets import PRESETS, SweepSpec, format_rows
from .routing import build_routes
from .simengine import ScenarioConfig, run_session

_SCENARIO_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}
_SWEEP_FIELDS = {"trials", "seed", "out", "values", "param_min", "param_max",
                 "param_step", "workers"}


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError("config file must contain a JSON object")
    unknown = set(cfg) - {"scenario", "sweep"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    scenario = cfg.get("scenario", {})
    bad = set(scenario) - _SCENARIO_FIELDS
    if bad:
        raise ConfigError(f"unknown scenario fields: {sorted(bad)}")
    sweep = cfg.get("sweep", {})
    bad = set(sweep) - _SWEEP_FIELDS
    if bad:
        raise ConfigError(f"unknown sweep fields: {sorted(bad)}")
    return cfg


def build_spec(preset: str, args, cfg: dict) -> SweepSpec:
    sweep = dict(cfg.get("sweep", {}))
    if getattr(args, "values", None):
        sweep["values"] = tuple(args.values)
    for attr, key in (("min", "param_min"), ("max", "param_max"), ("step", "param_step"),
                      ("trials", "trials"), ("seed", "seed"), ("out", "out"),
                      ("workers", "workers")):
        v = getattr(args, attr, None)
        if v is not None:
            sweep[key] = v
    if "values" in sweep and sweep["values"] is not None:
        sweep["values"] = tuple(sweep["values"])
    spec = SweepSpec(preset=preset, scenario=dict(cfg.get("scenario", {})), **sweep)
    spec.validate()
    return spec


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _scenario_from(cfg: dict, seed: int | None) -> ScenarioConfig:
    fields = dict(cfg.get("scenario", {}))
    if "relay_policy" in fields and isinstance(fields["relay_policy"], dict):
        from .routing import ForwardPolicy

        fields["relay_policy"] = ForwardPolicy(**fields["relay_policy"])
    if "rate_tiers" in fields:
        fields["rate_tiers"] = tuple(tuple(t) for t in fields["rate_tiers"])
    sc = ScenarioConfig(**fields)
    if seed is not None:
        sc = dataclasses.replace(sc, seed=seed)
    sc.validate()
    return sc


def cmd_sweep(preset: str, args) -> int:
    cfg = load_config(args.config)
    spec = build_spec(preset, args, cfg)
    fn = PRESETS[preset]
    kwargs = {}
    if preset == "topo1" and args.proc_delay is not None:
        kwargs["processing_delay"] = args.proc_delay
    if preset in ("load-sweep", "infra-sweep") and args.ratio is not None:
        kwargs["ratio"] = args.ratio
    header, rows = fn(spec, **kwargs)
    _emit(format_rows(header, rows), spec.out)
    return 0


def cmd_gen_topology(args) -> int:
    cfg = load_config(args.config)
    sc = _scenario_from(cfg, args.seed)
    if args.nodes is not None:
        sc = dataclasses.replace(sc, node_count=args.nodes)
    rng = np.random.default_rng(np.random.SeedSequence((sc.seed, 0, 1)))
    topo = topo_mod.generate(sc.node_count, rng, sc.topology_params())
    if args.out is None:
        topo.dump(sys.stdout)
    else:
        with open(args.out, "w") as fh:
            topo.dump(fh)
    return 0


def cmd_replay_trace(args) -> int:
    cfg = load_config(args.config)
    sc = _scenario_from(cfg, args.seed)
    if args.chain_hops is not None and args.relays is not None:
        raise ConfigError("--chain-hops and --relays are mutually exclusive")
    if args.chain_hops is not None:
        topo = topo_mod.chain_topology(args.chain_hops, sc.topology_params())
        sc = dataclasses.replace(sc, node_count=args.chain_hops + 1,
                                 min_hops=args.chain_hops)
        pair = (0, args.chain_hops)
    elif args.relays is not None:
        link_cap = args.link_rate / presets.TOPO2_REFERENCE_RATE
        topo = topo_mod.relay_star_topology(args.relays, link_capacity=link_cap,
                                            interfaces_per_node=presets.TOPO2_INTERFACES)
        sc = dataclasses.replace(sc, node_count=args.relays + 2, min_hops=2,
                                 cellular_enabled=False,
                                 wired_relay_rate=presets.TOPO2_RELAY_RATE)
        pair = (0, args.relays + 1)
    else:
        rng = np.random.default_rng(np.random.SeedSequence((sc.seed, 0, 1)))
        topo = topo_mod.generate(sc.node_count, rng, sc.topology_params())
        pair = None
    routes = build_routes(topo, targets=[])
    _, trace = run_session(sc, topo, routes, pair=pair)
    if args.out is None:
        trace.write_csv(sys.stdout)
    else:
        with open(args.out, "w") as fh:
            trace.write_csv(fh)
    return 0


def _add_common(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--out", help="output path (default: stdout)")


def _add_sweep_flags(p):
    _add_common(p)
    p.add_argument("--trials", type=int, help="trials per sweep point")
    p.add_argument("--workers", type=int, help="process pool size")
    p.add_argument("--min", type=float, help="sweep minimum")
    p.add_argument("--max", type=float, help="sweep maximum")
    p.add_argument("--step", type=float, help="sweep step")
    p.add_argument("--values", type=float, nargs="+", help="explicit sweep points")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hetnetcode",
        description="Coded multi-path session simulator: sweeps and traces as CSV.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    for preset in ("rate-sweep", "load-sweep", "infra-sweep", "topo1", "topo2"):
        p = sub.add_parser(preset, help=f"run the {preset} preset")
        _add_sweep_flags(p)
        if preset == "topo1":
            p.add_argument("--proc-delay", type=int,
                           help="per-hop processing delay in slots")
        if preset in ("load-sweep", "infra-sweep"):
            p.add_argument("--ratio", type=float,
                           help="cellular/WiFi link rate ratio for the session")

    p = sub.add_parser("gen-topology", help="generate and dump a topology")
    _add_common(p)
    p.add_argument("--nodes", type=int, help="node count")

    p = sub.add_parser("replay-trace", help="run one session and dump its event trace")
    _add_common(p)
    p.add_argument("--chain-hops", type=int, help="use a WiFi chain of this many hops")
    p.add_argument("--relays", type=int, help="use the dual-interface relay topology")
    p.add_argument("--link-rate", type=float, default=54.0,
                   help="access link rate for --relays (default 54)")

    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        if args.command in PRESETS:
            return cmd_sweep(args.command, args)
        if args.command == "gen-topology":
            return cmd_gen_topology(args)
        if args.command == "replay-trace":
            return cmd_replay_trace(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoPathError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
