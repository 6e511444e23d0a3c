"""Branch-and-prune search over interval boxes.

The solver walks an explicit depth-first stack of box states.  Each visited
box is contracted to a fixpoint with HC4 forward-backward passes, one atom
at a time; every interval slab removed by a contraction is re-certified
with the natural-extension falsity test before the prune step is recorded,
so every step of the emitted trace can be replayed and checked from the
trace alone.  When contraction stalls, the widest axis is split.

Every decision here is a pure function of the system and the
configuration: reruns produce byte-identical traces.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from fractions import Fraction

from dproof import kernel
from dproof._opcodes import VAR
from dproof.interval import Box, Interval
from dproof.terms import (
    CompiledAtom,
    System,
    enclosure_delta_consistent,
    enclosure_refutes,
)

INF = math.inf

PRUNE = "prune"
BRANCH = "branch"
BACKTRACK = "backtrack"
FAIL = "fail"


@dataclass(frozen=True)
class Step:
    """One transition of the search.

    prune:     a = removed slab, b = kept interval of `var`
    branch:    a = taken half,   b = sibling half
    backtrack: a = failed half (the matching branch's taken),
               b = resumed half (its sibling)
    fail:      closes the search; var is -1 and a, b are None
    """

    kind: str
    var: int = -1
    a: Interval | None = None
    b: Interval | None = None


@dataclass
class SolverConfig:
    """Search knobs.

    delta is the satisfaction tolerance; epsilon the width below which a
    variable is never branched.  prune_fixpoint_slack stops the
    contraction loop once no interval shrinks by more than that relative
    amount in a pass (None means delta/10).  max_sweeps caps contraction
    passes between branches regardless, and slab_min_frac suppresses
    removed slabs thinner than that fraction of the interval.
    """

    delta: Fraction = Fraction(1, 1000)
    epsilon: Fraction = Fraction(1, 10**9)
    max_steps: int = 2_000_000
    branch_rule: str = "widest-first"
    prune_fixpoint_slack: Fraction | None = None
    max_sweeps: int = 12
    slab_min_frac: float = 0.01

    def __post_init__(self) -> None:
        if not isinstance(self.delta, Fraction):
            self.delta = exact_fraction(self.delta)
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if not isinstance(self.epsilon, Fraction):
            self.epsilon = exact_fraction(self.epsilon)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.branch_rule not in ("widest-first", "round-robin"):
            raise ValueError(f"unknown branch rule {self.branch_rule!r}")
        if self.prune_fixpoint_slack is None:
            self.prune_fixpoint_slack = self.delta / 10
        elif not isinstance(self.prune_fixpoint_slack, Fraction):
            self.prune_fixpoint_slack = exact_fraction(self.prune_fixpoint_slack)
        if self.prune_fixpoint_slack < 0:
            raise ValueError("prune_fixpoint_slack must be non-negative")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


def exact_fraction(v) -> Fraction:
    """Exact rational of an int/str/Decimal-ish tolerance spec."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, str):
        s = v.strip()
        if "/" in s:
            num, _, den = s.partition("/")
            return Fraction(int(num), int(den))
        import decimal

        return Fraction(decimal.Decimal(s))
    raise TypeError(f"cannot read a tolerance from {type(v).__name__}")


def fraction_to_float_down(fr: Fraction) -> float:
    v = float(fr)
    if not math.isfinite(v):
        return 1.7976931348623157e308 if v > 0 else -INF
    if Fraction(v) > fr:
        v = math.nextafter(v, -INF)
    return v


@dataclass
class SolveResult:
    status: str  # "unsat" | "delta-sat" | "unknown"
    trace: list[Step]
    witness: Box | None
    steps: int
    prunes: int
    branches: int
    backtracks: int
    max_depth: int
    reason: str = ""


def _first_var_of(prog) -> int:
    ops = prog.ops
    aa = prog.aa
    for i in range(len(ops)):
        if ops[i] == VAR:
            return aa[i]
    return 0


class _Search:
    def __init__(self, system: System, config: SolverConfig):
        self.system = system
        self.config = config
        self.cas: list[CompiledAtom] = system.compile()
        self.nv = len(system.var_names)
        self.delta_dn = fraction_to_float_down(config.delta)
        self.trace: list[Step] = []
        self.prunes = 0
        self.branches = 0
        self.backtracks = 0
        self.max_depth = 0
        # current box as mutable endpoint arrays, kernel-ready
        self.blo = array("d", system.box.lo_list())
        self.bhi = array("d", system.box.hi_list())
        self.out_lo = array("d", [0.0] * self.nv)
        self.out_hi = array("d", [0.0] * self.nv)
        # pending branches: (saved lo, saved hi, var, taken, sibling)
        self.stack: list[tuple[array, array, int, Interval, Interval]] = []
        self.eps_f = float(config.epsilon)
        self.slack_f = float(config.prune_fixpoint_slack)
        self._rr_next = 0

    # -- helpers -------------------------------------------------------------

    def _box(self) -> Box:
        return Box(tuple(Interval(self.blo[i], self.bhi[i]) for i in range(self.nv)))

    def _emit(self, step: Step) -> None:
        self.trace.append(step)
        if step.kind == PRUNE:
            self.prunes += 1
        elif step.kind == BRANCH:
            self.branches += 1
        elif step.kind == BACKTRACK:
            self.backtracks += 1

    def _budget_left(self) -> bool:
        return len(self.trace) < self.config.max_steps

    def _refuted_by_any(self, first: int, blo, bhi) -> bool:
        cas = self.cas
        ca = cas[first]
        if enclosure_refutes(ca.rel, ca.natural(blo, bhi)):
            return True
        for i, other in enumerate(cas):
            if i == first:
                continue
            if enclosure_refutes(other.rel, other.natural(blo, bhi)):
                return True
        return False

    def _slab_certified(self, atom_idx: int, v: int, slab: Interval) -> bool:
        save_lo, save_hi = self.blo[v], self.bhi[v]
        self.blo[v], self.bhi[v] = slab.lo, slab.hi
        ok = self._refuted_by_any(atom_idx, self.blo, self.bhi)
        self.blo[v], self.bhi[v] = save_lo, save_hi
        return ok

    # -- pruning -------------------------------------------------------------

    def _whole_box_prune(self, atom_idx: int, node_idx: int) -> bool:
        """Empty the current box in one certified step if possible."""
        prog = self.cas[atom_idx].prog
        if prog.ops[node_idx] == VAR:
            v = prog.aa[node_idx]
        else:
            v = _first_var_of(prog)
        if not self._refuted_by_any(atom_idx, self.blo, self.bhi):
            return False
        old = Interval(self.blo[v], self.bhi[v])
        self._emit(Step(PRUNE, v, old, Interval.empty()))
        self.blo[v], self.bhi[v] = INF, -INF
        return True

    def _emit_slab(self, atom_idx: int, v: int, removed: Interval, kept: Interval) -> None:
        self._emit(Step(PRUNE, v, removed, kept))
        self.blo[v], self.bhi[v] = kept.lo, kept.hi

    def _contract_with(self, atom_idx: int) -> str:
        """One HC4 pass for one atom; returns 'empty', 'progress' or 'stall'."""
        ca = self.cas[atom_idx]
        if ca.target is None:
            # "!=" never contracts, but a pinned zero enclosure refutes it
            if enclosure_refutes(ca.rel, ca.natural(self.blo, self.bhi)):
                if self._whole_box_prune(atom_idx, len(ca.prog.ops) - 1):
                    return "empty"
            return "stall"
        st = kernel.hc4_revise(
            ca.prog.ops, ca.prog.aa, ca.prog.bb, ca.prog.clo, ca.prog.chi,
            ca.target[0], ca.target[1],
            self.blo, self.bhi, self.out_lo, self.out_hi,
        )
        if st >= 0:
            if self._whole_box_prune(atom_idx, st):
                return "empty"
            return "stall"
        frac = self.config.slab_min_frac
        progressed = False
        for v in range(self.nv):
            old_lo, old_hi = self.blo[v], self.bhi[v]
            new_lo, new_hi = self.out_lo[v], self.out_hi[v]
            if new_lo <= old_lo and new_hi >= old_hi:
                continue
            # keep one extra ULP on every moved side so the removed slab
            # sits strictly inside the region HC4 proved infeasible
            kept_lo = old_lo if new_lo <= old_lo else max(old_lo, math.nextafter(new_lo, -INF))
            kept_hi = old_hi if new_hi >= old_hi else min(old_hi, math.nextafter(new_hi, INF))
            width = old_hi - old_lo
            min_slab = frac * width
            if kept_lo > old_lo and (kept_lo - old_lo) >= min_slab:
                slab = Interval(old_lo, kept_lo)
                if self._slab_certified(atom_idx, v, slab):
                    self._emit_slab(atom_idx, v, slab, Interval(kept_lo, old_hi))
                    progressed = True
            cur_lo = self.blo[v]
            if kept_hi < old_hi and (old_hi - kept_hi) >= min_slab:
                slab = Interval(kept_hi, old_hi)
                if self._slab_certified(atom_idx, v, slab):
                    self._emit_slab(atom_idx, v, slab, Interval(cur_lo, kept_hi))
                    progressed = True
        return "progress" if progressed else "stall"

    def _sweep_once(self) -> tuple[bool, bool]:
        """One contraction pass over all atoms: (emptied, any_progress)."""
        any_progress = False
        for i in range(len(self.cas)):
            if not self._budget_left():
                return False, False
            outcome = self._contract_with(i)
            if outcome == "empty":
                return True, True
            if outcome == "progress":
                any_progress = True
        return False, any_progress

    # -- main loop -------------------------------------------------------------

    def _delta_sat(self) -> bool:
        for ca in self.cas:
            f = ca.natural(self.blo, self.bhi)
            if not enclosure_delta_consistent(ca.rel, f, self.delta_dn):
                return False
        return True

    def _branchable(self, v: int) -> bool:
        iv = Interval(self.blo[v], self.bhi[v])
        return iv.width >= self.eps_f and iv.splittable()

    def _pick_axis(self) -> int:
        if self.config.branch_rule == "round-robin":
            for k in range(self.nv):
                v = (self._rr_next + k) % self.nv
                if self._branchable(v):
                    self._rr_next = (v + 1) % self.nv
                    return v
            return -1
        best = -1
        best_w = -1.0
        for v in range(self.nv):
            if self._branchable(v):
                w = self.bhi[v] - self.blo[v]
                if w > best_w:
                    best = v
                    best_w = w
        return best

    def run(self) -> SolveResult:
        if self.nv == 0:
            raise ValueError("system has no variables")
        for v in range(self.nv):
            if not (math.isfinite(self.blo[v]) and math.isfinite(self.bhi[v])):
                if self.blo[v] > self.bhi[v]:
                    continue  # already-empty bound is fine
                name = self.system.var_names[v]
                raise ValueError(f"variable {name} needs finite bounds to search")

        if self._box().is_empty:
            self._emit(Step(FAIL))
            return self._result("unsat")

        while True:
            if not self._budget_left():
                return self._result("unknown", reason="step budget exhausted")
            # contract until the box empties, reaches the slack fixpoint,
            # or certifies delta-sat
            emptied = False
            sweeps = 0
            widths = array("d", [0.0] * self.nv)
            while True:
                if self._delta_sat():
                    return self._result("delta-sat", witness=self._box())
                if sweeps >= self.config.max_sweeps:
                    break
                for v in range(self.nv):
                    widths[v] = self.bhi[v] - self.blo[v]
                emptied, progress = self._sweep_once()
                sweeps += 1
                if emptied or not progress:
                    break
                biggest = 0.0
                for v in range(self.nv):
                    if widths[v] > 0.0:
                        rel = (widths[v] - (self.bhi[v] - self.blo[v])) / widths[v]
                        if rel > biggest:
                            biggest = rel
                if biggest <= self.slack_f:
                    break
            if emptied:
                if self.stack:
                    saved_lo, saved_hi, var, taken, sibling = self.stack.pop()
                    self._emit(Step(BACKTRACK, var, taken, sibling))
                    self.blo = saved_lo
                    self.bhi = saved_hi
                    self.blo[var], self.bhi[var] = sibling.lo, sibling.hi
                    continue
                self._emit(Step(FAIL))
                return self._result("unsat")
            v = self._pick_axis()
            if v < 0:
                return self._result(
                    "unknown", reason="no variable is wide enough to branch")
            taken, sibling = Interval(self.blo[v], self.bhi[v]).split()
            self._emit(Step(BRANCH, v, taken, sibling))
            self.stack.append((array("d", self.blo), array("d", self.bhi), v, taken, sibling))
            if len(self.stack) > self.max_depth:
                self.max_depth = len(self.stack)
            self.blo[v], self.bhi[v] = taken.lo, taken.hi

    def _result(self, status: str, witness: Box | None = None, reason: str = "") -> SolveResult:
        return SolveResult(
            status=status,
            trace=self.trace,
            witness=witness,
            steps=len(self.trace),
            prunes=self.prunes,
            branches=self.branches,
            backtracks=self.backtracks,
            max_depth=self.max_depth,
            reason=reason,
        )


def solve(system: System, config: SolverConfig | None = None, **kw) -> SolveResult:
    """Decide `system`: delta-sat with a witness box, or unsat with a trace."""
    if config is None:
        config = SolverConfig(**kw)
    elif kw:
        raise TypeError("pass either a config or keyword options, not both")
    return _Search(system, config).run()
