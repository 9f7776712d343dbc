"""Command-line front end: ``rotation-ot {run-ot,run-bit-ot,run-pubkey,experiment}``.

Exit status: 0 all checks pass, 1 a statistical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .harness import EXPERIMENTS, ExperimentConfig, run_experiment
from .protocol import KEY_CHECK_ALPHA

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SESSION_COMMANDS = {
    "run-ot": "soundness",
    "run-bit-ot": "bit-ot",
    "run-pubkey": "pubkey-roundtrip",
}


def _add_common(p: argparse.ArgumentParser, default_trials: Optional[int]) -> None:
    p.add_argument("--k", type=int, help="message length in bits (even, >= 8)")
    p.add_argument("--n", type=int, help="security parameter")
    p.add_argument("--trials", type=int, default=default_trials)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=0, help="64-bit master seed")
    p.add_argument("--alpha", type=float, default=0.01, help="significance of in-experiment tests")
    p.add_argument(
        "--key-check-alpha", type=float, default=KEY_CHECK_ALPHA,
        help="significance of Bob's key randomness battery",
    )
    p.add_argument("--bob-direction", choices=("random", "opposite", "same"), default="random")
    p.add_argument("--keys", type=int, default=10, help="keys sampled by the obliviousness run")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--transcripts", metavar="DIR", help="dump one JSON transcript per session")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotation-ot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiment in SESSION_COMMANDS.items():
        p = sub.add_parser(name, help=f"simulate sessions (report as experiment {experiment!r})")
        _add_common(p, default_trials=1)
    p = sub.add_parser("experiment", help="run a named Monte-Carlo experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    _add_common(p, default_trials=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    experiment = args.name if args.command == "experiment" else SESSION_COMMANDS[args.command]
    config = ExperimentConfig(
        experiment=experiment,
        k=args.k,
        n=args.n,
        trials=args.trials,
        master_seed=args.seed,
        alpha=args.alpha,
        key_check_alpha=args.key_check_alpha,
        bob_direction=args.bob_direction,
        keys=args.keys,
        workers=args.workers,
        output_path=args.out,
        format=args.format,
        transcripts_dir=args.transcripts,
    )
    try:
        report = run_experiment(config)
    except (ValueError, OSError) as exc:
        print(f"rotation-ot: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out is None:
        sys.stdout.write(report.render(args.format))
        if args.format == "json":
            sys.stdout.write("\n")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
