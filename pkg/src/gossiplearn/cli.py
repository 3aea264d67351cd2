"""Command-line interface.

Subcommands: consensus, learn-drop, learn-byz, certify, verify.
Every run is reproducible from (config, seed); the verify subcommand
exits nonzero when any invariant check fails.
"""

from __future__ import annotations

import argparse
import sys

from .errors import GossipLearnError
from .harness import (
    MODES,
    certification_report,
    load_config,
    run_experiment,
    verify,
)


def _parse_seeds(args) -> list[int]:
    if args.seeds:
        lo, _, hi = args.seeds.partition("..")
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError:
            raise SystemExit(f"--seeds expects A..B, got {args.seeds!r}")
    if args.seed is not None:
        return [args.seed]
    return []


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to the JSON config")
    parser.add_argument("--seed", type=int, default=None, help="single master seed")
    parser.add_argument("--seeds", default=None, help="inclusive seed range A..B")
    parser.add_argument("--rounds", type=int, default=None, help="override run.rounds")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--format", choices=("csv", "jsonl"), default=None)
    parser.add_argument(
        "--dump-matrices",
        action="store_true",
        help="also write the dense per-round matrices (plain text)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossiplearn",
        description="Fault-tolerant gossip consensus and social learning runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run the {mode} experiment")
        _add_common(p)
    p = sub.add_parser("certify", help="check observability and resilience assumptions")
    p.add_argument("--config", required=True)
    p = sub.add_parser("verify", help="run the oracle verification suite")
    _add_common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except GossipLearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "certify":
        lines = certification_report(config)
        for line in lines:
            print(line)
        return 0 if all(line.startswith("PASS") for line in lines) else 1

    seeds = _parse_seeds(args) or list(config.seeds)

    if args.command == "verify":
        ok = True
        for seed in seeds:
            report = verify(config, seed, rounds=args.rounds)
            print(f"seed {seed}:")
            for line in report.lines():
                print(f"  {line}")
            ok = ok and report.passed
        return 0 if ok else 1

    try:
        for seed in seeds:
            summary = run_experiment(
                config,
                seed,
                args.command,
                out_dir=args.out,
                fmt=args.format,
                rounds=args.rounds,
                dump_matrices=args.dump_matrices,
            )
            extras = {
                k: v
                for k, v in summary.items()
                if k not in ("mode", "seed", "rounds", "path")
            }
            detail = ", ".join(f"{k}={v}" for k, v in sorted(extras.items()))
            print(f"{summary['mode']} seed={seed} rounds={summary['rounds']} "
                  f"-> {summary['path']} ({detail})")
    except GossipLearnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
