"""Command line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .benchmark import build_fixture, fixture_drift, fixture_path, load_fixture
from .config import AXIS_KEYS, RunConfig, parse_config, parse_number
from .engine import ConfigError, iter_panels
from .output import DEFAULT_EMIT, EMIT_CHOICES, RunManifest, emit_outputs

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
FIXTURE_TOLERANCE = 1e-6

log = logging.getLogger("hidden_action")


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not runtime errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hidden-action",
                     description="Simulate the hidden-action experiment grid and emit CSV results.")
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--filter", action="append", default=[], metavar="KEY=VALUE",
                        help=f"restrict a grid axis ({', '.join(AXIS_KEYS)}); "
                             "comma-separated values allowed; repeatable")
    parser.add_argument("--runs", type=int, help="runs per scenario (overrides R)")
    parser.add_argument("--seed", type=int, help="master seed (overrides master_seed)")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--emit", action="append", metavar="WHAT",
                        help=f"outputs to write: {', '.join(EMIT_CHOICES)} "
                             f"(comma-separated or repeated; default {','.join(DEFAULT_EMIT)})")
    parser.add_argument("--partial", action="store_true",
                        help="write whatever finished if some scenarios fail")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command")
    fx = sub.add_parser("fixtures", help="regenerate the frozen benchmark fixture")
    fx.add_argument("--path", help="fixture file (default: the packaged one)")
    return parser


def resolve(args) -> tuple[RunConfig, list]:
    cfg = parse_config(args.config) if args.config else RunConfig()
    for item in args.filter:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in AXIS_KEYS:
            raise ConfigError(f"bad filter {item!r}; expected KEY=VALUE with KEY in {', '.join(AXIS_KEYS)}")
        values = [parse_number(key, v) for v in value.split(",")]
        cfg = cfg.restrict(AXIS_KEYS[key], values)
    base = cfg.base
    if args.runs is not None:
        if args.runs < 1:
            raise ConfigError("--runs must be positive")
        base = replace(base, R=args.runs)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        base = replace(base, master_seed=args.seed)
    if args.jobs < 1:
        raise ConfigError("--jobs must be positive")
    cfg = replace(cfg, base=base)
    return cfg, cfg.scenarios()


def _emit_targets(raw) -> tuple[str, ...]:
    if not raw:
        return DEFAULT_EMIT
    targets = [t.strip() for item in raw for t in item.split(",") if t.strip()]
    bad = [t for t in targets if t not in EMIT_CHOICES]
    if bad:
        raise ConfigError(f"unknown --emit value(s) {bad}; choose from {', '.join(EMIT_CHOICES)}")
    return tuple(t for t in EMIT_CHOICES if t in targets)


def run_fixtures(path: str | None) -> int:
    target = Path(path) if path else fixture_path()
    fresh = build_fixture()
    if target.exists():
        drift = fixture_drift(load_fixture(target), fresh)
        if drift > FIXTURE_TOLERANCE:
            log.error("benchmark drifted by %.3g from %s (tolerance %g); not overwritten",
                      drift, target, FIXTURE_TOLERANCE)
            return EXIT_RUNTIME
        log.info("benchmark matches %s (drift %.3g)", target, drift)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(fresh, indent=2, sort_keys=True) + "\n")
    print(target)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "fixtures":
            return run_fixtures(args.path)
        _, scenarios = resolve(args)
        emit = _emit_targets(args.emit)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - mapped to the runtime exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    manifest = RunManifest(args.config, scenarios, scenarios[0].master_seed, Path(args.out),
                           emit, args.partial)
    log.info("%d scenario(s), %d run(s) each", len(scenarios), scenarios[0].R)

    def progress():
        for i, (cfg, panel) in enumerate(iter_panels(scenarios, jobs=args.jobs), start=1):
            log.info("[%d/%d] %s", i, len(scenarios), cfg.scenario_id)
            yield cfg, panel

    try:
        for path in emit_outputs(manifest, progress()):
            print(path)
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
