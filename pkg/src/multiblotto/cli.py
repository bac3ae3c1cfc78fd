"""Command-line front end.

    multiblotto sample        --game g.json [--samples N] [--format csv|json]
    multiblotto solve-boolean --game g.json [--epsilon E]
    multiblotto verify        --game g.json [--samples N]
    multiblotto payoff        --game g.json [--samples N] [--fixed f.json]

Exit status: 0 ok, 1 invalid input, 2 a verification check failed,
3 no known equilibrium construction applies to the game.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from .dispatch import FixedStrategy, dispatch_sampler, draw, game_to_dict, load_game, run_payoff_tournament
from .errors import BlottoError, NoKnownEquilibrium
from .sampling import RngStream
from .sphere import SphereSampler
from .verify import (
    VerificationReport,
    boolean_exploitability,
    check_budget_as,
    check_exploitability,
    check_isometry,
    check_marginals,
    deviation_library,
    lotto_deviation_test,
)

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_NO_EQUILIBRIUM = 0, 1, 2, 3
DEFAULT_EPSILON = 1e-6


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _epsilon(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multiblotto",
        description="Sample and verify multiplayer Colonel Blotto equilibria.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("sample", "draw equilibrium bid vectors"),
        ("solve-boolean", "solve a Boolean game's equilibrium probabilities"),
        ("verify", "run the verification suite on a game"),
        ("payoff", "play a tournament and report mean utilities"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--game", required=True, help="game-spec JSON file")
        p.add_argument("--samples", type=_positive_int, default=1000)
        p.add_argument("--seed", type=_seed, default=42)
        p.add_argument("--epsilon", type=_epsilon, default=None)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "payoff":
            p.add_argument(
                "--fixed", default=None,
                help='JSON object mapping 1-based player numbers to fixed bid vectors',
            )
    return parser


def _epsilon_for(args, config) -> float:
    if args.epsilon is not None:
        return args.epsilon
    return config.epsilon if config.epsilon is not None else DEFAULT_EPSILON


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def format_samples_csv(bids: np.ndarray) -> str:
    buf = io.StringIO()
    n = bids.shape[1]
    buf.write(",".join(f"b{j + 1}" for j in range(n)) + "\n")
    for row in bids:
        buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
    return buf.getvalue()


def cmd_sample(args) -> int:
    config = load_game(args.game)
    sampler = dispatch_sampler(config.spec, config.partition, _epsilon_for(args, config))
    bids = draw(sampler, args.samples, RngStream(args.seed))
    if args.format == "csv":
        _emit(format_samples_csv(bids), args.out)
    else:
        doc = {"game": game_to_dict(config), "seed": args.seed, "samples": bids.tolist()}
        _emit(json.dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_solve_boolean(args) -> int:
    config = load_game(args.game)
    spec = config.spec
    if not spec.is_boolean:
        raise BlottoError("solve-boolean needs a Boolean game")
    sampler = dispatch_sampler(spec, None, _epsilon_for(args, config))
    eq = sampler.equilibrium
    doc = {
        "p": [float(p) for p in eq.probs],
        "x_star": float(eq.x_star),
        "achieved_tol": float(eq.achieved_tol),
        "exploitability_bound": boolean_exploitability(spec, eq),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def run_verification(config, n_samples: int, seed: int, epsilon: float) -> VerificationReport:
    spec = config.spec
    sampler = dispatch_sampler(spec, config.partition, epsilon)
    stream = RngStream(seed)
    report = VerificationReport()
    report.extend(check_budget_as(spec, sampler, n_samples, stream.fork(0)))
    report.extend(check_marginals(spec, sampler, n_samples, stream.fork(1)))
    if spec.is_boolean:
        report.extend(check_exploitability(spec, sampler.equilibrium, epsilon))
    else:
        if isinstance(sampler, SphereSampler):
            report.extend(check_isometry(sampler.isometry))
        deviations = deviation_library(spec, stream.fork(2))
        report.extend(lotto_deviation_test(spec, sampler, deviations, n_samples, stream.fork(3)))
    return report


def cmd_verify(args) -> int:
    config = load_game(args.game)
    report = run_verification(config, args.samples, args.seed, _epsilon_for(args, config))
    text = report.to_json(indent=2) + "\n"
    if args.out is None:
        sys.stderr.write(report.table() + "\n")
        sys.stdout.write(text)
    else:
        sys.stdout.write(report.table() + "\n")
        _emit(text, args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _load_fixed(path, spec) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BlottoError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise BlottoError("fixed strategies must be a JSON object")
    fixed = {}
    for key, bids in doc.items():
        player = int(key)
        if not 1 <= player <= spec.k:
            raise BlottoError(f"fixed strategy for unknown player {key}")
        bids = np.asarray(bids, dtype=float)
        if bids.shape != (spec.n,):
            raise BlottoError(f"player {key} needs {spec.n} bids")
        fixed[player - 1] = FixedStrategy(bids)
    return fixed


def cmd_payoff(args) -> int:
    config = load_game(args.game)
    spec = config.spec
    fixed = _load_fixed(args.fixed, spec) if args.fixed else {}
    equilibrium = None
    if len(fixed) < spec.k:
        equilibrium = dispatch_sampler(spec, config.partition, _epsilon_for(args, config))
    samplers = [fixed.get(i, equilibrium) for i in range(spec.k)]
    result = run_payoff_tournament(spec, samplers, args.samples, RngStream(args.seed))
    if args.format == "csv":
        lines = ["player,mean,stderr"]
        lines += [f"{i + 1},{m:.17g},{s:.17g}" for i, (m, s) in enumerate(zip(result.mean, result.stderr))]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(json.dumps(result.to_dict()) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "solve-boolean": cmd_solve_boolean,
    "verify": cmd_verify,
    "payoff": cmd_payoff,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except NoKnownEquilibrium as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM
    except (BlottoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
