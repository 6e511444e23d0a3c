"""Command-line interface.

Subcommands: solve (decide one instance), prove (decide and write the
refutation trace), check (validate a trace file), bap (the full
prove-check-refine loop), bench (run a corpus and tabulate statistics).

Exit codes: solve 0 unsat / 1 delta-sat / 2 unknown; bap 0 proved /
1 disproved / 2 exhausted; check 0 valid / 1 otherwise; bench 0 all
proved / 1 any disproved / 2 any exhausted / 3 any errored.  Usage
errors exit 64, unreadable or unparseable input files 66.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from dproof.bap import (ProveBudget, branch_and_prove, corpus_csv,
                        corpus_exit_code, corpus_table, run_corpus)
from dproof.checker import CheckerConfig, check_tree, format_report
from dproof.parser import ParseError, parse_file
from dproof.prooftree import TraceReplayError, build_tree
from dproof.solver import SolverConfig, exact_fraction, solve
from dproof.tracefile import TraceFormatError, read_trace_text, save_trace

EX_USAGE = 64
EX_NOINPUT = 66


@dataclass
class CliConfig:
    command: str
    paths: list[str]
    delta: Fraction
    epsilon: Fraction
    timeout: float
    max_rounds: int
    max_steps: int
    branch_rule: str
    proof_out: str | None
    report_format: str
    use_taylor: bool
    max_splits: int
    system_path: str | None
    proof_dir: str | None
    verbose: bool
    initial_proof: str | None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", default="1e-3", metavar="Q",
                   help="satisfaction tolerance (rational; default 1e-3)")
    p.add_argument("--epsilon", default="1e-9", metavar="Q",
                   help="minimum width worth branching (default 1e-9)")
    p.add_argument("--max-steps", type=int, default=2_000_000, metavar="N",
                   help="solver step budget (default 2000000)")
    p.add_argument("--branch-rule", choices=("widest-first", "round-robin"),
                   default="widest-first", help="variable selection rule")


def _add_checker_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-taylor", action="store_true",
                   help="disable mean-value bounds; natural extension only")
    p.add_argument("--max-splits", type=int, default=64, metavar="N",
                   help="checker splits per axiom before refinement "
                        "(default 64)")


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--timeout", type=float, default=300.0, metavar="SEC",
                   help="wall-time budget in seconds (default 300)")
    p.add_argument("--max-rounds", type=int, default=64, metavar="N",
                   help="refinement round budget (default 64)")


def _build_parser() -> _Parser:
    p = _Parser(prog="dproof",
                description="delta-decide nonlinear real constraint systems "
                            "and emit or validate refutation proofs")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("solve", help="decide one instance",
                       description="Decide an instance: unsat or delta-sat "
                                   "with a witness box.")
    s.add_argument("file", help="instance file (SMT-LIB subset)")
    _add_solver_flags(s)

    s = sub.add_parser("prove", help="decide and write the refutation trace")
    s.add_argument("file", help="instance file (SMT-LIB subset)")
    _add_solver_flags(s)
    s.add_argument("-o", "--proof-out", metavar="PATH",
                   help="trace output path (default: instance stem + .dproof)")

    s = sub.add_parser("check", help="validate a refutation trace file")
    s.add_argument("proof", help="trace file (.dproof)")
    s.add_argument("--delta", default="1e-3", metavar="Q",
                   help="tolerance for refined subproblems (default 1e-3)")
    _add_checker_flags(s)
    s.add_argument("--system", metavar="PATH",
                   help="instance file to cross-check against the embedded "
                        "problem")
    s.add_argument("-v", "--verbose", action="store_true",
                   help="print one line per axiom checked")

    s = sub.add_parser("bap", help="prove with checking and refinement")
    s.add_argument("file", help="instance file (SMT-LIB subset)")
    _add_solver_flags(s)
    _add_checker_flags(s)
    _add_budget_flags(s)
    s.add_argument("--initial-proof", metavar="PATH",
                   help="start from this trace instead of solving first")

    s = sub.add_parser("bench", help="run a corpus and tabulate results")
    s.add_argument("files", nargs="*", help="instance files")
    _add_solver_flags(s)
    _add_checker_flags(s)
    _add_budget_flags(s)
    s.add_argument("--format", choices=("text", "csv"), default="text",
                   dest="report_format", help="table format (default text)")
    s.add_argument("--proof-dir", metavar="DIR",
                   help="write each first-round refutation trace here")
    return p


def _config_of(args: argparse.Namespace) -> CliConfig:
    def q(text: str, what: str) -> Fraction:
        try:
            v = exact_fraction(text)
        except (ValueError, TypeError, ArithmeticError):
            raise SystemExit(_usage_fail(f"{what} is not a rational: {text!r}"))
        if v <= 0:
            raise SystemExit(_usage_fail(f"{what} must be positive"))
        return v

    if getattr(args, "timeout", 1.0) <= 0:
        raise SystemExit(_usage_fail("timeout must be positive"))
    if getattr(args, "max_rounds", 1) < 1:
        raise SystemExit(_usage_fail("max-rounds must be at least 1"))
    if getattr(args, "max_steps", 1) < 1:
        raise SystemExit(_usage_fail("max-steps must be at least 1"))
    if getattr(args, "max_splits", 0) < 0:
        raise SystemExit(_usage_fail("max-splits must be nonnegative"))
    paths = ([args.file] if hasattr(args, "file")
             else [args.proof] if hasattr(args, "proof")
             else list(args.files))
    return CliConfig(
        command=args.command,
        paths=paths,
        delta=q(getattr(args, "delta", "1e-3"), "delta"),
        epsilon=q(getattr(args, "epsilon", "1e-9"), "epsilon"),
        timeout=getattr(args, "timeout", 300.0),
        max_rounds=getattr(args, "max_rounds", 64),
        max_steps=getattr(args, "max_steps", 2_000_000),
        branch_rule=getattr(args, "branch_rule", "widest-first"),
        proof_out=getattr(args, "proof_out", None),
        report_format=getattr(args, "report_format", "text"),
        use_taylor=not getattr(args, "no_taylor", False),
        max_splits=getattr(args, "max_splits", 64),
        system_path=getattr(args, "system", None),
        proof_dir=getattr(args, "proof_dir", None),
        verbose=getattr(args, "verbose", False),
        initial_proof=getattr(args, "initial_proof", None),
    )


def _usage_fail(message: str) -> int:
    print(f"dproof: error: {message}", file=sys.stderr)
    return EX_USAGE


def _fail_file(message: str) -> int:
    print(f"dproof: {message}", file=sys.stderr)
    return EX_NOINPUT


def _solver_config(cfg: CliConfig) -> SolverConfig:
    return SolverConfig(delta=cfg.delta, epsilon=cfg.epsilon,
                        max_steps=cfg.max_steps, branch_rule=cfg.branch_rule)


def _checker_config(cfg: CliConfig) -> CheckerConfig:
    return CheckerConfig(max_checker_splits=cfg.max_splits,
                         use_taylor=cfg.use_taylor)


def _parse_instance(path: str):
    try:
        return parse_file(path)
    except OSError as exc:
        raise _FileFailure(str(exc)) from None
    except ParseError as exc:
        raise _FileFailure(f"{path}: {exc}") from None


class _FileFailure(Exception):
    pass


def _print_witness(system, box) -> None:
    for name, iv in zip(system.var_names, box.ivs):
        print(f"  {name} in {iv}")


def _cmd_solve(cfg: CliConfig) -> int:
    system = _parse_instance(cfg.paths[0])
    res = solve(system, _solver_config(cfg))
    print(res.status)
    if res.status == "delta-sat":
        _print_witness(system, res.witness)
        return 1
    if res.status == "unsat":
        return 0
    print(f"  {res.reason}")
    return 2


def _cmd_prove(cfg: CliConfig) -> int:
    path = cfg.paths[0]
    system = _parse_instance(path)
    res = solve(system, _solver_config(cfg))
    print(res.status)
    if res.status == "delta-sat":
        _print_witness(system, res.witness)
        return 1
    if res.status != "unsat":
        print(f"  {res.reason}")
        return 2
    out = cfg.proof_out or str(Path(path).with_suffix(".dproof"))
    try:
        save_trace(out, system, res.trace)
    except OSError as exc:
        raise _FileFailure(str(exc)) from None
    n_lines = sum(1 for _ in open(out, encoding="utf-8"))
    print(f"proof written to {out} ({n_lines} lines)")
    return 0


def _cmd_check(cfg: CliConfig) -> int:
    path = cfg.paths[0]
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _FileFailure(str(exc)) from None
    try:
        system, steps = read_trace_text(text)
    except TraceFormatError as exc:
        print(f"malformed: {exc}")
        return 1
    if cfg.system_path is not None:
        external = _parse_instance(cfg.system_path)
        if external.sha256() != system.sha256():
            print("malformed: the trace was made for a different problem "
                  f"than {cfg.system_path}")
            return 1
    try:
        tree = build_tree(system, steps)
    except TraceReplayError as exc:
        print(f"malformed: {exc}")
        return 1
    report = check_tree(tree, cfg.delta, _checker_config(cfg))
    print(format_report(report, detail=cfg.verbose), end="")
    return 0 if report.ok else 1


def _load_initial_proof(path: str, system):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _FileFailure(str(exc)) from None
    try:
        traced_system, steps = read_trace_text(text)
    except TraceFormatError as exc:
        raise _FileFailure(f"{path}: {exc}") from None
    if traced_system.sha256() != system.sha256():
        raise _FileFailure(f"{path}: the trace was made for a different "
                           "problem")
    try:
        return build_tree(system, steps)
    except TraceReplayError as exc:
        raise _FileFailure(f"{path}: {exc}") from None


def _cmd_bap(cfg: CliConfig) -> int:
    system = _parse_instance(cfg.paths[0])
    initial = (None if cfg.initial_proof is None
               else _load_initial_proof(cfg.initial_proof, system))
    outcome = branch_and_prove(
        system, _solver_config(cfg), _checker_config(cfg),
        ProveBudget(max_rounds=cfg.max_rounds, wall_time=cfg.timeout),
        initial_proof=initial)
    print(outcome.verdict)
    print(f"  rounds:       {outcome.rounds}")
    print(f"  subproblems:  {outcome.subs_generated}")
    print(f"  axioms:       {outcome.axioms_proved}")
    print(f"  proof lines:  {outcome.proof_lines}")
    print(f"  solve time:   {outcome.solve_time:.3f}s")
    print(f"  check time:   {outcome.check_time:.3f}s")
    if outcome.witness_point is not None:
        pt = ", ".join(repr(x) for x in outcome.witness_point)
        print(f"  witness:      ({pt})")
    elif outcome.witness_box is not None:
        _print_witness(system, outcome.witness_box)
    if outcome.reason:
        print(f"  note: {outcome.reason}")
    return {"proved": 0, "disproved": 1, "exhausted": 2}[outcome.verdict]


def _cmd_bench(cfg: CliConfig) -> int:
    rows = run_corpus(
        cfg.paths, _solver_config(cfg), _checker_config(cfg),
        ProveBudget(max_rounds=cfg.max_rounds, wall_time=cfg.timeout),
        proof_dir=cfg.proof_dir)
    text = corpus_csv(rows) if cfg.report_format == "csv" else corpus_table(rows)
    print(text, end="")
    return corpus_exit_code(rows)


_COMMANDS = {
    "solve": _cmd_solve,
    "prove": _cmd_prove,
    "check": _cmd_check,
    "bap": _cmd_bap,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_of(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[cfg.command](cfg)
    except _FileFailure as exc:
        return _fail_file(str(exc))


if __name__ == "__main__":
    sys.exit(main())
