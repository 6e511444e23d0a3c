"""The branch-and-prove loop.

Solve the claim, build its proof, check it; every axiom the checker could
not validate comes back as a subproblem (a box and a refined tolerance)
that is solved and checked as a theorem of its own, depth-first, until
everything is proved, something is disproved, or the budget runs out.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from dproof.checker import (MALFORMED, NEEDS_REFINEMENT, REFUTED, VALID,
                            CheckerConfig, check_tree, probe_exact_witness)
from dproof.interval import Box
from dproof.prooftree import ProofTree, build_tree
from dproof.solver import SolverConfig, solve
from dproof.terms import System
from dproof import _opcodes as OPS

PROVED = "proved"
DISPROVED = "disproved"
EXHAUSTED = "exhausted"


@dataclass
class ProveOutcome:
    verdict: str
    rounds: int = 0
    subs_generated: int = 0
    axioms_proved: int = 0
    proof_lines: int = 0
    solve_time: float = 0.0
    check_time: float = 0.0
    witness_point: tuple[float, ...] | None = None
    witness_box: Box | None = None
    reason: str = ""
    initial_trace: list | None = None  # the depth-0 refutation, when solved


@dataclass(frozen=True)
class ProveBudget:
    max_rounds: int = 64
    wall_time: float = 300.0

    def __post_init__(self) -> None:
        if self.max_rounds < 1 or self.wall_time <= 0:
            raise ValueError("budget must be positive")


def _trace_line_count(system: System, trace) -> int:
    # header + hash + embedded problem + box line + one line per step
    return 2 + system.canonical_text().count("\n") + 1 + len(trace)


def branch_and_prove(system: System,
                     solver_cfg: SolverConfig | None = None,
                     checker_cfg: CheckerConfig | None = None,
                     budget: ProveBudget | None = None,
                     initial_proof: ProofTree | None = None) -> ProveOutcome:
    """Prove that the system has no solution, refining as needed.

    With initial_proof the first round checks the supplied tree instead
    of solving; refinement proceeds identically from its subproblems.
    """
    if solver_cfg is None:
        solver_cfg = SolverConfig()
    if checker_cfg is None:
        checker_cfg = CheckerConfig()
    if budget is None:
        budget = ProveBudget()
    out = ProveOutcome(verdict=EXHAUSTED)
    start = time.monotonic()

    # depth-first in leaf order: (box, delta, depth, ready-made proof)
    stack: list[tuple[Box, Fraction, int, ProofTree | None]] = [
        (system.box, solver_cfg.delta, 0, initial_proof)
    ]
    max_depth = 0

    while stack:
        if time.monotonic() - start > budget.wall_time:
            out.verdict = EXHAUSTED
            out.reason = "wall-time budget exhausted"
            out.rounds = 1 + max_depth
            return out
        box, delta, depth, proof = stack.pop()
        if depth >= budget.max_rounds:
            out.verdict = EXHAUSTED
            out.reason = "round budget exhausted"
            out.rounds = 1 + max_depth
            return out
        max_depth = max(max_depth, depth)
        sub = System(system.var_names, box, system.atoms)

        if proof is None:
            t0 = time.monotonic()
            res = solve(sub, replace(solver_cfg, delta=delta))
            out.solve_time += time.monotonic() - t0
            if res.status == "delta-sat":
                point = probe_exact_witness(sub, res.witness)
                if point is not None:
                    out.verdict = DISPROVED
                    out.witness_point = point
                    out.witness_box = res.witness
                    out.reason = "a witness point satisfies every constraint"
                    out.rounds = 1 + max_depth
                    return out
                if depth == 0:
                    out.verdict = DISPROVED
                    out.witness_box = res.witness
                    out.reason = "the claim is delta-sat"
                    out.rounds = 1 + max_depth
                    return out
                out.verdict = EXHAUSTED
                out.witness_box = res.witness
                out.reason = (f"a depth-{depth} subproblem is delta-sat at "
                              f"its refined tolerance")
                out.rounds = 1 + max_depth
                return out
            if res.status != "unsat":
                out.verdict = EXHAUSTED
                out.reason = f"solver gave up: {res.reason or res.status}"
                out.rounds = 1 + max_depth
                return out
            proof = build_tree(sub, res.trace)
            out.proof_lines += _trace_line_count(sub, res.trace)
            if depth == 0:
                out.initial_trace = res.trace

        t0 = time.monotonic()
        report = check_tree(proof, delta, checker_cfg)
        out.check_time += time.monotonic() - t0
        if report.verdict == VALID:
            out.axioms_proved += report.stats.axioms_valid
            continue
        if report.verdict == REFUTED:
            out.verdict = DISPROVED
            out.witness_point = report.witness
            out.reason = "the checker found a satisfying point"
            out.rounds = 1 + max_depth
            return out
        if report.verdict == MALFORMED:
            out.verdict = EXHAUSTED
            out.reason = f"proof malformed at node {report.node}: {report.reason}"
            out.rounds = 1 + max_depth
            return out
        assert report.verdict == NEEDS_REFINEMENT
        out.axioms_proved += report.stats.axioms_valid
        out.subs_generated += len(report.subproblems)
        for sp in reversed(report.subproblems):
            stack.append((sp.box, sp.delta, depth + 1, None))

    out.verdict = PROVED
    out.rounds = 1 + max_depth
    return out


# ---------------------------------------------------------------------------
# corpus runner

_COLUMNS = ("ID", "#Var", "#Arith", "verdict", "Time_S", "ProofSize",
            "#Sub", "#Axiom", "Time_PC")


@dataclass
class CorpusRow:
    id: str
    nvar: int = 0
    narith: int = 0
    verdict: str = "error"
    time_s: float = 0.0
    proof_size: int = 0
    nsub: int = 0
    naxiom: int = 0
    time_pc: float = 0.0
    error: str = ""

    def cells(self) -> tuple[str, ...]:
        return (self.id, str(self.nvar), str(self.narith), self.verdict,
                f"{self.time_s:.3f}", str(self.proof_size), str(self.nsub),
                str(self.naxiom), f"{self.time_pc:.3f}")


def _arith_ops(system: System) -> int:
    n = 0
    for prog in system.compile():
        for op in prog.prog.ops:
            if op not in (OPS.VAR, OPS.CONST):
                n += 1
    return n


def run_corpus(paths, solver_cfg: SolverConfig | None = None,
               checker_cfg: CheckerConfig | None = None,
               budget: ProveBudget | None = None,
               proof_dir: str | None = None) -> list[CorpusRow]:
    """Prove every instance; a broken file yields an error row, not a stop.

    With proof_dir, each instance whose first round produced a refutation
    trace gets it written there as <id>.dproof.
    """
    from dproof.parser import parse_file
    from dproof.tracefile import save_trace

    if proof_dir is not None:
        Path(proof_dir).mkdir(parents=True, exist_ok=True)
    rows: list[CorpusRow] = []
    for path in paths:
        p = Path(path)
        row = CorpusRow(id=p.stem)
        try:
            system = parse_file(str(p))
        except (OSError, ValueError) as exc:
            row.error = str(exc)
            rows.append(row)
            continue
        row.nvar = len(system.var_names)
        row.narith = _arith_ops(system)
        outcome = branch_and_prove(system, solver_cfg, checker_cfg, budget)
        row.verdict = outcome.verdict
        row.time_s = outcome.solve_time
        row.proof_size = outcome.proof_lines
        row.nsub = outcome.subs_generated
        row.naxiom = outcome.axioms_proved
        row.time_pc = outcome.check_time
        if proof_dir is not None and outcome.initial_trace is not None:
            save_trace(str(Path(proof_dir) / f"{row.id}.dproof"),
                       system, outcome.initial_trace)
        rows.append(row)
    return rows


def corpus_csv(rows: list[CorpusRow]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COLUMNS)
    for row in rows:
        w.writerow(row.cells())
    return buf.getvalue()


def corpus_table(rows: list[CorpusRow]) -> str:
    cells = [_COLUMNS] + [r.cells() for r in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(_COLUMNS))]
    out = []
    for line in cells:
        out.append("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip())
    return "\n".join(out) + "\n"


def corpus_exit_code(rows: list[CorpusRow]) -> int:
    if any(r.verdict == "error" for r in rows):
        return 3
    if any(r.verdict == DISPROVED for r in rows):
        return 1
    if any(r.verdict == EXHAUSTED for r in rows):
        return 2
    return 0
