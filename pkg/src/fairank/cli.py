"""Command-line interface.

Subcommands: ``generate`` (raw replica graphs), ``rank`` (one ranking as
CSV), ``curve`` (replica-averaged fairness curves), ``real`` (single-pass
dataset analysis), ``meanfield`` (closed-form table), ``verify`` (analytic
check sweep), ``sweep`` (curves across rho or subspace dimension).

A flat ``key = value`` config file (``--config``) can hold any long-option
default; explicit flags override it. Exit codes: 0 success, 1 usage error,
2 data/computation error, 3 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .experiments import (
    ALGORITHMS,
    ExperimentConfig,
    compute_ranking,
    ranking_csv,
    run_generate,
    run_real,
    run_synthetic,
    sweep,
)
from .graph import GraphError
from .io import load_graph
from .meanfield import mean_field_report, verify_propositions
from .bpam import generate

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NONCONVERGED = 3

_WEIGHT_BY_FLAG = {"unit": "unit", "lambda2": "lambda_sq"}

# default (r, rho) grid for meanfield/verify sweeps
_GRID_R = np.linspace(0.05, 0.5, 10)
_GRID_RHO = np.linspace(0.05, 0.95, 19)


class CliParser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env_threads() -> int:
    raw = os.environ.get("FAIRANK_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise GraphError(f"FAIRANK_THREADS={raw!r} is not an integer") from None
    if value < 1:
        raise GraphError("FAIRANK_THREADS must be at least 1")
    return value


def _common_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value file with option defaults")
    p.add_argument("--out-dir", default=".", help="directory for output files")
    p.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker processes for replicas (default: FAIRANK_THREADS or 1)",
    )
    p.add_argument(
        "--strict",
        action="store_true",
        help="exit with status 3 when any iterative ranker fails to converge",
    )
    return p


def _bpam_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--nodes", type=int, default=1000, help="node count N")
    p.add_argument("--outdeg", type=int, default=6, help="edges per arriving node")
    p.add_argument("--minority-ratio", type=float, default=0.3, help="red arrival probability")
    p.add_argument("--homophily", type=float, default=0.5, help="cross-color acceptance probability")
    p.add_argument("--seed", type=int, default=0, help="base seed; replica i uses seed + i")
    p.add_argument("--reps", type=int, default=100, help="replica count")
    return p


def _ranking_parent(multi: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    if multi:
        p.add_argument(
            "--algos",
            nargs="+",
            default=["degree", "pagerank", "hits"],
            choices=ALGORITHMS,
            help="algorithms to compare",
        )
    else:
        p.add_argument("--algo", default="hits", choices=ALGORITHMS)
    p.add_argument("--eta", type=float, default=0.85, help="random-surfer damping")
    p.add_argument("--eps", type=float, default=0.15, help="restart weight")
    p.add_argument("--k", type=int, default=6, help="eigenspace dimension")
    p.add_argument("--weight", default="unit", choices=sorted(_WEIGHT_BY_FLAG),
                   help="eigenvalue weighting for the eigenspace ranker")
    p.add_argument("--tol", type=float, default=1e-10, help="L1 convergence tolerance")
    p.add_argument("--max-iter", type=int, default=1000, help="iteration cap")
    p.add_argument("--degree-which", default="total", choices=("in", "total"),
                   help="degree kind for the degree ranker")
    p.add_argument("--tie-shuffle", type=int, default=None, metavar="SEED",
                   help="break score ties with a seeded shuffle instead of node id")
    return p


def _files_parent(required: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--edges", required=required, help="edge list file (src<TAB>dst)")
    p.add_argument("--colors", required=required, help="color file (node<TAB>R|B)")
    return p


def _build_parser() -> CliParser:
    parser = CliParser(prog="fairank", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    common = _common_parent()
    bpam = _bpam_parent()

    sp = sub.add_parser("generate", parents=[common, bpam],
                        help="emit raw replica graphs with stats")

    sp = sub.add_parser("rank", parents=[common, _ranking_parent(multi=False),
                                         _bpam_parent(), _files_parent(required=False)],
                        help="rank one graph, CSV node,score,rank")
    sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("curve", parents=[common, bpam, _ranking_parent(multi=True)],
                        help="replica-averaged minority share curves")
    sp.add_argument("--grid-points", type=int, default=40)
    sp.add_argument("--svg", action="store_true", help="also write an SVG chart")

    sp = sub.add_parser("real", parents=[common, _files_parent(required=True),
                                         _ranking_parent(multi=True)],
                        help="analyze a dataset from files")
    sp.add_argument("--grid-points", type=int, default=40)
    sp.add_argument("--svg", action="store_true")

    sp = sub.add_parser("meanfield", parents=[common],
                        help="closed-form analytics as CSV")
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--grid", action="store_true", help="sweep the default (r, rho) grid")
    sp.add_argument("--out", default=None, help="output file (default stdout)")

    sp = sub.add_parser("verify", parents=[common],
                        help="run analytic checks, CSV r,rho,check,mode,passed,margin")
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--grid", action="store_true")
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("sweep", parents=[common, bpam, _ranking_parent(multi=True),
                                          _files_parent(required=False)],
                        help="curve sets across rho or eigenspace dimension")
    sp.add_argument("--axis", required=True, choices=("rho", "k"))
    sp.add_argument("--values", required=True,
                    help="comma-separated axis values, e.g. 0.1,0.3,0.5")
    sp.add_argument("--grid-points", type=int, default=40)

    return parser


# -- config file ------------------------------------------------------------

def _read_config_file(path) -> list[tuple[str, str]]:
    pairs = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                body = raw.split("#", 1)[0].strip()
                if not body:
                    continue
                key, eq, value = body.partition("=")
                if not eq or not key.strip():
                    raise GraphError(f"{path}:{lineno}: expected 'key = value'")
                pairs.append((key.strip(), value.strip()))
    except OSError as exc:
        raise GraphError(f"cannot read config file: {exc}") from None
    return pairs


_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _config_argv(parser: CliParser, command: str, path: str) -> list[str]:
    """Turn a config file into argv tokens injected before user flags."""
    subparser = None
    for action in parser._subparsers._group_actions:
        subparser = action.choices.get(command)
    if subparser is None:
        return []
    known = subparser._option_string_actions
    tokens: list[str] = []
    for key, value in _read_config_file(path):
        option = "--" + key.replace("_", "-")
        action = known.get(option)
        if action is None or option == "--config":
            raise GraphError(f"config key {key!r} is not an option of '{command}'")
        if isinstance(action, argparse._StoreTrueAction):
            low = value.lower()
            if low in _TRUE_WORDS:
                tokens.append(option)
            elif low not in _FALSE_WORDS:
                raise GraphError(f"config key {key!r}: boolean value expected")
        elif action.nargs in ("+", "*"):
            tokens.append(option)
            tokens.extend(value.split())
        else:
            tokens.extend([option, value])
    return tokens


def _split_argv(argv: list[str]):
    """Locate the subcommand and any --config value without full parsing."""
    command = None
    config_path = None
    rest = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
            rest.extend((tok, argv[i + 1]))
            i += 2
            continue
        if tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
            rest.append(tok)
            i += 1
            continue
        if command is None and not tok.startswith("-"):
            command = tok
            i += 1
            continue
        rest.append(tok)
        i += 1
    return command, config_path, rest


# -- subcommand implementations ---------------------------------------------

def _resolve_threads(args) -> int:
    if args.threads is not None:
        if args.threads < 1:
            raise GraphError("--threads must be at least 1")
        return args.threads
    return _env_threads()


def _config_from_args(args, mode: str) -> ExperimentConfig:
    algos = tuple(args.algos) if hasattr(args, "algos") else ("degree",)
    return ExperimentConfig(
        mode=mode,
        n_nodes=getattr(args, "nodes", 1000),
        outdeg=getattr(args, "outdeg", 6),
        minority_ratio=getattr(args, "minority_ratio", 0.3),
        homophily=getattr(args, "homophily", 0.5),
        reps=getattr(args, "reps", 1),
        base_seed=getattr(args, "seed", 0),
        edge_file=getattr(args, "edges", None),
        color_file=getattr(args, "colors", None),
        algos=algos,
        eta=args.eta,
        eps=args.eps,
        k=args.k,
        weight=_WEIGHT_BY_FLAG[args.weight],
        tol=args.tol,
        max_iter=args.max_iter,
        degree_which=args.degree_which,
        tie_shuffle_seed=args.tie_shuffle,
        grid_points=getattr(args, "grid_points", 40),
        out_dir=args.out_dir,
        threads=_resolve_threads(args),
        svg=getattr(args, "svg", False),
    )


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_generate(args) -> int:
    config = ExperimentConfig(
        mode="synthetic",
        n_nodes=args.nodes,
        outdeg=args.outdeg,
        minority_ratio=args.minority_ratio,
        homophily=args.homophily,
        reps=args.reps,
        base_seed=args.seed,
        out_dir=args.out_dir,
        threads=_resolve_threads(args),
    )
    run_generate(config)
    return EXIT_OK


def _cmd_rank(args) -> int:
    if (args.edges is None) != (args.colors is None):
        raise GraphError("--edges and --colors must be given together")
    if args.edges is not None:
        g, labels = load_graph(args.edges, args.colors)
    else:
        g, _ = generate(
            _config_from_args(args, "synthetic").bpam_params(), args.seed
        )
        labels = None
    config = _config_from_args(args, "synthetic")
    result = compute_ranking(g, args.algo, config)
    _emit(ranking_csv(result, labels), args.out)
    if args.strict and not result.converged:
        sys.stderr.write("fairank rank: did not converge within --max-iter\n")
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_curve(args) -> int:
    config = _config_from_args(args, "synthetic")
    _, _, all_converged = run_synthetic(config)
    if args.strict and not all_converged:
        sys.stderr.write("fairank curve: some replicas did not converge\n")
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_real(args) -> int:
    config = _config_from_args(args, "real")
    _, _, all_converged = run_real(config)
    if args.strict and not all_converged:
        sys.stderr.write("fairank real: some rankers did not converge\n")
        return EXIT_NONCONVERGED
    return EXIT_OK


def _points(args) -> list[tuple[float, float]]:
    if args.grid:
        return [(float(r), float(rho)) for r in _GRID_R for rho in _GRID_RHO]
    if args.r is None or args.rho is None:
        raise GraphError("give both --r and --rho, or use --grid")
    return [(args.r, args.rho)]


def _cmd_meanfield(args) -> int:
    lines = ["r,rho,alpha,K_B,K_R,beta_B,beta_R,q_BB,q_RB,q_BR,q_RR,F"]
    for r, rho in _points(args):
        rep = mean_field_report(r, rho)
        q = rep.q
        lines.append(
            ",".join(
                repr(float(v))
                for v in (
                    r, rho, rep.alpha, rep.k_blue, rep.k_red,
                    rep.beta_blue, rep.beta_red,
                    q[0, 0], q[1, 0], q[0, 1], q[1, 1], rep.f_ratio,
                )
            )
        )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    lines = ["r,rho,check,mode,passed,margin"]
    failures = 0
    total = 0
    for r, rho in _points(args):
        for check in verify_propositions(r, rho).values():
            total += 1
            failures += 0 if check.passed else 1
            lines.append(
                f"{r!r},{rho!r},{check.name},{check.mode},"
                f"{str(check.passed).lower()},{check.margin!r}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    sys.stderr.write(f"fairank verify: {total - failures}/{total} checks passed\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    mode = "real" if args.edges is not None else "synthetic"
    if mode == "real" and args.colors is None:
        raise GraphError("--edges and --colors must be given together")
    config = _config_from_args(args, mode)
    raw = [v for v in args.values.split(",") if v.strip()]
    if not raw:
        raise GraphError("--values is empty")
    if args.axis == "k":
        values = [int(v) for v in raw]
    else:
        values = [float(v) for v in raw]
    _, _, all_converged = sweep(config, args.axis, values)
    if args.strict and not all_converged:
        sys.stderr.write("fairank sweep: some runs did not converge\n")
        return EXIT_NONCONVERGED
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "rank": _cmd_rank,
    "curve": _cmd_curve,
    "real": _cmd_real,
    "meanfield": _cmd_meanfield,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    command, config_path, rest = _split_argv(argv)
    if command is None:
        parser.error("a subcommand is required")
    if command not in _COMMANDS:
        parser.error(f"unknown subcommand {command!r}")
    try:
        injected = _config_argv(parser, command, config_path) if config_path else []
    except GraphError as exc:
        parser.error(str(exc))
    args = parser.parse_args([command] + injected + rest)
    try:
        return _COMMANDS[command](args)
    except (GraphError, ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"fairank {command}: error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
