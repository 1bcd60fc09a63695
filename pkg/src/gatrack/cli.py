"""Command-line entry point: ``gatrack simulate | bench-rotate | check``.

Exit codes: 0 success, 1 usage or configuration error, 2 invariant
violation (including failed checks), 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ScenarioConfig, load_config, load_preset
from .disturbance import Coupling
from .errors import ConfigError, InvariantViolation, NumericFailure
from .reference import Custom, Scenario, load_custom_csv
from .rigid_body import RigidBodyState

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which would collide with the
    # invariant-violation code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gatrack", description="Thrust-vectored rigid-body tracking simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a scenario and write telemetry")
    sim.add_argument("--scenario", required=True, choices=[s.value for s in Scenario])
    sim.add_argument("--config", type=Path, help="TOML scenario file (default: shipped preset)")
    sim.add_argument("--trajectory", type=Path, help="t,x,y,z CSV for the custom scenario")
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-end", type=float)
    sim.add_argument("--seed", type=int, help="Dryden noise seed")
    sim.add_argument("--wind", type=_on_off, metavar="on|off")
    sim.add_argument("--drag", type=_on_off, metavar="on|off")
    sim.add_argument("--wind-coupling", choices=[c.value for c in Coupling])
    sim.add_argument("--out", type=Path, help="output directory (default: out/<scenario>)")
    sim.add_argument("--lenient", action="store_true",
                     help="count rotation-bound violations instead of aborting")

    bench = sub.add_parser("bench-rotate", help="time rotor sandwich vs matrix rotation")
    bench.add_argument("--n", type=int, default=10_000_000, help="number of vectors")
    bench.add_argument("--chunk", type=int, default=1_000_000)
    bench.add_argument("--seed", type=int, default=0)

    sub.add_parser("check", help="run the headless invariant suite")
    return parser


def _custom_config(base: ScenarioConfig, traj: Custom) -> ScenarioConfig:
    if traj.t0 != 0.0:
        raise ConfigError("custom trajectory tables must start at t = 0")
    start = traj.derivatives(0.0)
    return base.replace(scenario=Scenario.CUSTOM, trajectory=traj, t_end=traj.t1,
                        initial=RigidBodyState(start[0], start[1]))


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    """Preset or file, then command-line overrides."""
    scenario = Scenario(args.scenario)
    if args.trajectory is not None and scenario is not Scenario.CUSTOM:
        raise ConfigError("--trajectory applies only to the custom scenario")
    if args.config is not None:
        cfg = load_config(args.config)
        if cfg.scenario is not scenario:
            raise ConfigError(f"{args.config} describes scenario {cfg.scenario.value!r}, "
                              f"not {scenario.value!r}")
    elif scenario is Scenario.CUSTOM:
        if args.trajectory is None:
            raise ConfigError("the custom scenario needs --trajectory or --config")
        cfg = _custom_config(load_preset("flip"), load_custom_csv(args.trajectory))
    else:
        cfg = load_preset(scenario.value)
    if args.trajectory is not None and args.config is not None:
        cfg = _custom_config(cfg, load_custom_csv(args.trajectory))

    changes = {}
    if args.dt is not None:
        changes["dt"] = args.dt
    if args.t_end is not None:
        changes["t_end"] = args.t_end
    if args.out is not None:
        changes["output"] = str(args.out)
    if changes:
        cfg = cfg.replace(**changes)
    dist = {}
    if args.wind is not None:
        dist["wind"] = args.wind
    if args.drag is not None:
        dist["drag"] = args.drag
    if args.wind_coupling is not None:
        dist["coupling"] = Coupling(args.wind_coupling)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        dist["dryden"] = dataclasses.replace(cfg.disturbance.dryden, seed=args.seed)
    if dist:
        cfg = cfg.with_disturbance(**dist)
    return cfg


def _simulate(args) -> int:
    from .sim import emit_plots, run_scenario, write_telemetry_csv

    cfg = resolve_config(args)
    out = Path(cfg.output) if cfg.output else Path("out") / cfg.scenario.value
    res = run_scenario(cfg, strict=not args.lenient)
    out.mkdir(parents=True, exist_ok=True)
    write_telemetry_csv(res.rows, out / "telemetry.csv")
    emit_plots(res.rows, out, cfg.euler_sequence)
    m = res.metrics
    print(f"scenario          {cfg.scenario.value}")
    print(f"steps             {len(res.rows) - 1} (dt = {cfg.dt:g} s)")
    for field in dataclasses.fields(m):
        print(f"{field.name:<18}{getattr(m, field.name):.6g}")
    print(f"interconnection   {res.interconnection_violations} violations")
    print(f"thrust fallbacks  {res.thrust_fallbacks}")
    print(f"antipodal nudges  {res.antipodal_nudges}")
    print(f"output            {out}")
    return EXIT_INVARIANT if m.bound_violations else EXIT_OK


def _bench(args) -> int:
    from .bench import bench_rotate

    try:
        res = bench_rotate(args.n, args.chunk, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(res.report())
    return EXIT_OK


def _check(args) -> int:
    from .checks import run_checks

    results = run_checks()
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name:<12} {r.detail} ({r.seconds:.2f} s)")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"simulate": _simulate, "bench-rotate": _bench, "check": _check}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
