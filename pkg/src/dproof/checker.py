"""Independent validation of refutation proofs.

Cover leaves are checked by endpoint comparison.  Infeasibility leaves are
checked by interval evaluation: the natural extension of each atom first,
then a mean-value bound anchored at box corners, then midpoint splitting
up to a per-leaf budget.  Whatever remains unvalidated is emitted as a
subproblem (box plus a refined tolerance) for the prove loop to re-solve.

This module deliberately reaches only the interval kernel and expression
evaluation; it shares no code path with the solver's contractors.
"""

from __future__ import annotations

import math
from array import array
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from dproof import kernel
from dproof.interval import Box, Interval, covers_union, float_hex
from dproof.prooftree import CA, IA, MP, OPEN, ORI, ProofTree
from dproof.terms import (NonDifferentiableError, Program, System, Term,
                          compile_term, derive, enclosure_refutes)
from dproof import _opcodes as OPS

VALID = "valid"
NEEDS_REFINEMENT = "needs-refinement"
MALFORMED = "malformed"
REFUTED = "refuted"


@dataclass(frozen=True)
class CheckerConfig:
    """Knobs for infeasibility-leaf validation.

    max_checker_splits is a per-leaf total: once a leaf has consumed its
    budget, still-unvalidated boxes become subproblems instead of
    splitting further.  use_taylor toggles the mean-value bound.
    """
    max_checker_splits: int = 64
    use_taylor: bool = True


@dataclass(frozen=True)
class Subproblem:
    box: Box
    delta: Fraction


@dataclass
class CheckStats:
    axioms_checked: int = 0
    axioms_valid: int = 0
    taylor_calls: int = 0
    splits: int = 0


@dataclass
class CheckReport:
    verdict: str
    subproblems: list[Subproblem] = field(default_factory=list)
    stats: CheckStats = field(default_factory=CheckStats)
    reason: str = ""
    node: int = -1
    witness: tuple[float, ...] | None = None
    lines: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict == VALID


def _iv_text(iv: Interval) -> str:
    if iv.is_empty:
        return "[empty]"
    return f"[{float_hex(iv.lo)} {float_hex(iv.hi)}]"


def _box_text(box: Box) -> str:
    return "x".join(_iv_text(iv) for iv in box.ivs)


def _box_norm(box: Box) -> Fraction | None:
    """Largest side length as an exact rational; None if unbounded."""
    worst = Fraction(0)
    for iv in box.ivs:
        if iv.is_empty:
            continue
        if not (math.isfinite(iv.lo) and math.isfinite(iv.hi)):
            return None
        w = Fraction(iv.hi) - Fraction(iv.lo)
        if w > worst:
            worst = w
    return worst


def subproblem_delta(delta: Fraction, box: Box) -> Fraction:
    """The refined tolerance for a box: min(delta, a quarter of its width)."""
    norm = _box_norm(box)
    if norm is None:
        return delta
    return min(delta, norm / 4)


# ---------------------------------------------------------------------------
# compiled-atom machinery

class _Fn:
    """A compiled term with reusable node buffers."""

    def __init__(self, prog: Program):
        self.prog = prog
        n = len(prog.ops)
        self.nlo = array("d", [0.0] * n)
        self.nhi = array("d", [0.0] * n)

    def eval(self, blo: array, bhi: array) -> tuple[float, float]:
        p = self.prog
        kernel.eval_nodes(p.ops, p.aa, p.bb, p.clo, p.chi, blo, bhi,
                          self.nlo, self.nhi)
        return self.nlo[len(p.ops) - 1], self.nhi[len(p.ops) - 1]

    def domain_clean(self) -> bool:
        """True if the last eval stayed inside every operator's domain.

        A mean-value bound is only sound for a function that is defined
        and continuous on the whole box, so partial-domain operators must
        not have clipped anything: square roots of part-negative inputs,
        logs touching zero, division or negative powers across zero,
        tangent poles, arcsin/arccos outside [-1,1], and the atan2 branch
        cut all disqualify the box.
        """
        p = self.prog
        nlo, nhi = self.nlo, self.nhi
        for i, op in enumerate(p.ops):
            if nlo[i] > nhi[i]:
                return False
            a = p.aa[i]
            if op == OPS.SQRT:
                if nlo[a] < 0.0:
                    return False
            elif op == OPS.LOG:
                if nlo[a] <= 0.0:
                    return False
            elif op == OPS.DIV:
                b = p.bb[i]
                if nlo[b] <= 0.0 <= nhi[b]:
                    return False
            elif op == OPS.POWI:
                if p.bb[i] < 0 and nlo[a] <= 0.0 <= nhi[a]:
                    return False
            elif op == OPS.TAN:
                if not (math.isfinite(nlo[i]) and math.isfinite(nhi[i])):
                    return False
            elif op in (OPS.ASIN, OPS.ACOS):
                if nlo[a] < -1.0 or nhi[a] > 1.0:
                    return False
            elif op == OPS.ATAN2:
                b = p.bb[i]
                if nlo[a] <= 0.0 <= nhi[a] and nlo[b] <= 0.0:
                    return False
        return True


class _AtomChecker:
    """Natural-extension and mean-value certification for one atom."""

    def __init__(self, rel: str, term: Term, var_names: list[str],
                 var_index: dict[str, int]):
        self.rel = rel
        self.fn = _Fn(compile_term(term, var_index))
        self.grads: list[_Fn] | None
        try:
            gts = [derive(term, v) for v in var_names]
        except NonDifferentiableError:
            self.grads = None
        else:
            self.grads = [_Fn(compile_term(g, var_index)) for g in gts]

    def natural(self, blo: array, bhi: array) -> tuple[float, float]:
        return self.fn.eval(blo, bhi)

    def taylor(self, blo: array, bhi: array, corner: tuple[float, ...],
               plo: array, phi: array) -> tuple[float, float] | None:
        """Mean-value enclosure anchored at a corner; None when unusable."""
        if self.grads is None:
            return None
        n = len(corner)
        for i in range(n):
            plo[i] = corner[i]
            phi[i] = corner[i]
        flo, fhi = self.fn.eval(plo, phi)
        if flo > fhi or not (math.isfinite(flo) and math.isfinite(fhi)):
            return None
        acc_lo, acc_hi = flo, fhi
        for i in range(n):
            glo, ghi = self.grads[i].eval(blo, bhi)
            if glo > ghi or not (math.isfinite(glo) and math.isfinite(ghi)):
                return None
            dlo, dhi = kernel.isub(blo[i], bhi[i], corner[i], corner[i])
            tlo, thi = kernel.imul(glo, ghi, dlo, dhi)
            acc_lo, acc_hi = kernel.iadd(acc_lo, acc_hi, tlo, thi)
        return acc_lo, acc_hi


def _point_satisfies(rel: str, lo: float, hi: float) -> bool:
    """Does the interval-certified value at a point satisfy the relation?"""
    if lo > hi:
        return False
    if rel == "=":
        return lo == 0.0 == hi
    if rel == "!=":
        return hi < 0.0 or lo > 0.0
    if rel == ">":
        return lo > 0.0
    if rel == ">=":
        return lo >= 0.0
    if rel == "<":
        return hi < 0.0
    if rel == "<=":
        return hi <= 0.0
    raise ValueError(f"unknown relation {rel!r}")


def taylor_bound(f: Term, box: Box, center: tuple[float, ...] | list[float],
                 var_names: list[str] | None = None,
                 subdifferentials: bool = False) -> Interval:
    """Mean-value range enclosure of f over box, anchored at center.

    Computes f at the center point plus the gradient's natural extension
    over the box times the offsets, all outward-rounded.  Raises
    NonDifferentiableError for terms with kinks unless subdifferentials
    is set.
    """
    if var_names is None:
        var_names = sorted(f.free_vars())
    if len(var_names) != len(box):
        raise ValueError("variable list does not match box dimension")
    vi = {name: i for i, name in enumerate(var_names)}
    fp = _Fn(compile_term(f, vi))
    n = len(box)
    plo = array("d", [0.0] * n)
    phi = array("d", [0.0] * n)
    for i, c in enumerate(center):
        plo[i] = c
        phi[i] = c
    flo, fhi = fp.eval(plo, phi)
    if flo > fhi:
        return Interval.empty()
    blo = array("d", box.lo_list())
    bhi = array("d", box.hi_list())
    acc_lo, acc_hi = flo, fhi
    for i, name in enumerate(var_names):
        g = derive(f, name, subdifferentials=subdifferentials)
        gp = _Fn(compile_term(g, vi))
        glo, ghi = gp.eval(blo, bhi)
        if glo > ghi:
            return Interval.empty()
        dlo, dhi = kernel.isub(blo[i], bhi[i], center[i], center[i])
        tlo, thi = kernel.imul(glo, ghi, dlo, dhi)
        acc_lo, acc_hi = kernel.iadd(acc_lo, acc_hi, tlo, thi)
    return Interval(acc_lo, acc_hi)


# ---------------------------------------------------------------------------
# axiom checks

def check_ia(whole: Box, part1: Box, part2: Box) -> bool:
    """Endpoint comparison: do the parts cover the whole box?"""
    return covers_union(whole, part1, part2)


_MAX_CORNERS = 8


def _corner_count(n: int) -> int:
    return min(1 << n, _MAX_CORNERS) if n < 63 else _MAX_CORNERS


class _CaWorker:
    """Certifies emptiness of the constraint set on boxes for one tree."""

    def __init__(self, system: System, cfg: CheckerConfig, stats: CheckStats):
        self.cfg = cfg
        self.stats = stats
        vi = system.var_index
        names = list(system.var_names)
        self.atoms = [
            _AtomChecker(a.rel, a.term, names, vi) for a in system.atoms
        ]
        n = len(names)
        self.n = n
        self.blo = array("d", [0.0] * n)
        self.bhi = array("d", [0.0] * n)
        self.plo = array("d", [0.0] * n)
        self.phi = array("d", [0.0] * n)

    def _load(self, box: Box) -> None:
        for i, iv in enumerate(box.ivs):
            self.blo[i] = iv.lo
            self.bhi[i] = iv.hi

    def certify(self, box: Box) -> tuple[str, str] | tuple[str, tuple[float, ...]]:
        """('valid', how) | ('counterexample', point) | ('stuck', '')."""
        if box.is_empty:
            return ("valid", "empty box")
        self._load(box)
        for ai, ac in enumerate(self.atoms):
            lo, hi = ac.natural(self.blo, self.bhi)
            if enclosure_refutes(ac.rel, Interval(lo, hi) if lo <= hi
                                 else Interval.empty()):
                return ("valid", f"atom {ai} natural")
        if self.cfg.use_taylor:
            for ai, ac in enumerate(self.atoms):
                if ac.grads is None:
                    continue
                lo, hi = ac.natural(self.blo, self.bhi)
                if not ac.fn.domain_clean():
                    continue
                for mask in range(_corner_count(self.n)):
                    corner = box.corner(mask)
                    self.stats.taylor_calls += 1
                    enc = ac.taylor(self.blo, self.bhi, corner,
                                    self.plo, self.phi)
                    if enc is None:
                        break
                    tlo, thi = enc
                    if enclosure_refutes(ac.rel, Interval(tlo, thi)):
                        return ("valid", f"atom {ai} taylor corner {mask}")
        point = self._probe(box)
        if point is not None:
            return ("counterexample", point)
        return ("stuck", "")

    def _probe(self, box: Box) -> tuple[float, ...] | None:
        """Three deterministic interior points; a hit must be certified."""
        for iv in box.ivs:
            if not (math.isfinite(iv.lo) and math.isfinite(iv.hi)):
                return None
        for frac in (0.5, 0.25, 0.75):
            pt = []
            for iv in box.ivs:
                x = iv.lo + frac * (iv.hi - iv.lo)
                x = min(iv.hi, max(iv.lo, x))
                pt.append(x + 0.0)
            for i, x in enumerate(pt):
                self.plo[i] = x
                self.phi[i] = x
            if all(_point_satisfies(ac.rel, *ac.fn.eval(self.plo, self.phi))
                   for ac in self.atoms):
                return tuple(pt)
        return None

    def check_ca(self, box: Box, delta: Fraction,
                 lines: list[str], tag: str):
        """Validate one infeasibility leaf, splitting within budget.

        Returns ('valid', []) or ('needs-refinement', subproblems) or
        ('refuted', point) or ('malformed', reason).
        """
        queue = deque([(box, delta)])
        splits_left = self.cfg.max_checker_splits
        subs: list[Subproblem] = []
        while queue:
            b, d = queue.popleft()
            verdict, detail = self.certify(b)
            if verdict == "valid":
                lines.append(f"{tag} valid ({detail})")
                continue
            if verdict == "counterexample":
                pt = ", ".join(float_hex(x) for x in detail)
                lines.append(f"{tag} counterexample ({pt})")
                return ("refuted", detail)
            if splits_left > 0:
                axis = b.widest_axis()
                if not b.ivs[axis].splittable():
                    return ("malformed",
                            "box at hardware resolution cannot be split "
                            "or validated")
                splits_left -= 1
                self.stats.splits += 1
                b1, b2 = b.split(axis)
                d1 = subproblem_delta(d, b1)
                d2 = subproblem_delta(d, b2)
                lines.append(
                    f"{tag} split {_box_text(b1)} delta "
                    f"{float_hex(float(d1))} | {_box_text(b2)} delta "
                    f"{float_hex(float(d2))}"
                )
                queue.append((b1, d1))
                queue.append((b2, d2))
            else:
                dd = subproblem_delta(d, b)
                lines.append(
                    f"{tag} subproblem {_box_text(b)} delta "
                    f"{float_hex(float(dd))}"
                )
                subs.append(Subproblem(b, dd))
        if subs:
            return ("needs-refinement", subs)
        return ("valid", [])


# ---------------------------------------------------------------------------
# tree walk

def _structural_fault(tree: ProofTree) -> tuple[int, str] | None:
    """Re-derive every internal node from its children; None if clean."""
    nodes = tree.nodes
    if not nodes:
        return (-1, "empty tree")
    root = nodes[tree.root]
    if root.kind not in (MP, CA, OPEN):
        return (tree.root, "root does not state the theorem")
    if root.box != tree.system.box:
        return (tree.root, "root box differs from the problem box")
    seen = 0
    stack = [tree.root]
    while stack:
        i = stack.pop()
        node = nodes[i]
        seen += 1
        if node.kind == OPEN:
            return (i, "open obligation left in tree")
        if node.kind in (IA, CA):
            if node.children is not None:
                return (i, "axiom leaf has children")
            if node.kind == IA and (node.box is None or node.parts is None):
                return (i, "cover leaf lacks boxes")
            if node.kind == CA and node.box is None:
                return (i, "infeasibility leaf lacks a box")
            continue
        if node.kind == MP:
            if node.children is None:
                return (i, "internal node lacks children")
            li, ri = node.children
            left, right = nodes[li], nodes[ri]
            if left.kind != IA:
                return (i, "major premise is not a cover leaf")
            if right.kind != ORI:
                return (i, "minor premise is not a disjunction node")
            if left.box != node.box:
                return (li, "cover leaf whole box differs from parent")
            if left.parts != right.parts:
                return (ri, "disjunction parts differ from the cover leaf")
            stack.append(li)
            stack.append(ri)
            continue
        if node.kind == ORI:
            if node.children is None or node.parts is None:
                return (i, "disjunction node lacks children")
            li, ri = node.children
            left, right = nodes[li], nodes[ri]
            if left.kind not in (MP, CA) or right.kind not in (MP, CA):
                return (i, "disjunction child is not an implication")
            if left.box != node.parts[0]:
                return (li, "left child box differs from the first part")
            if right.box != node.parts[1]:
                return (ri, "right child box differs from the second part")
            stack.append(ri)
            stack.append(li)
            continue
        return (i, f"unknown node kind {node.kind!r}")
    if seen != len(nodes):
        return (-1, f"{len(nodes) - seen} node(s) unreachable from the root")
    return None


def check_tree(tree: ProofTree, delta: Fraction,
               cfg: CheckerConfig | None = None) -> CheckReport:
    """Walk a proof tree and validate every axiom leaf.

    Verdicts: valid (all leaves check), needs-refinement (some
    infeasibility leaves exhausted their budget; subproblems carry
    refined tolerances), refuted (a probe point satisfies every
    constraint, so the claim itself is false), malformed (the tree or a
    cover leaf is structurally wrong).
    """
    if cfg is None:
        cfg = CheckerConfig()
    delta = Fraction(delta)
    stats = CheckStats()
    lines: list[str] = []

    fault = _structural_fault(tree)
    if fault is not None:
        node, reason = fault
        return CheckReport(MALFORMED, stats=stats, reason=reason, node=node,
                           lines=[f"node {node} malformed: {reason}"])

    worker = _CaWorker(tree.system, cfg, stats)
    subproblems: list[Subproblem] = []
    for leaf in tree.leaves_in_order():
        node = tree.nodes[leaf]
        stats.axioms_checked += 1
        if node.kind == IA:
            if check_ia(node.box, node.parts[0], node.parts[1]):
                lines.append(f"ia #{leaf} valid")
                stats.axioms_valid += 1
                continue
            lines.append(f"ia #{leaf} cover gap")
            return CheckReport(MALFORMED, stats=stats,
                               reason="cover leaf leaves a gap", node=leaf,
                               lines=lines)
        verdict, payload = worker.check_ca(node.box, delta, lines,
                                           f"ca #{leaf}")
        if verdict == "refuted":
            return CheckReport(REFUTED, stats=stats, node=leaf,
                               witness=payload, lines=lines,
                               reason="a probe point satisfies every "
                                      "constraint")
        if verdict == "malformed":
            return CheckReport(MALFORMED, stats=stats, reason=payload,
                               node=leaf, lines=lines)
        if verdict == "needs-refinement":
            subproblems.extend(payload)
        else:
            stats.axioms_valid += 1
    if subproblems:
        return CheckReport(NEEDS_REFINEMENT, subproblems=subproblems,
                           stats=stats, lines=lines)
    return CheckReport(VALID, stats=stats, lines=lines)


def probe_exact_witness(system: System, box: Box) -> tuple[float, ...] | None:
    """A point of the box certified to satisfy every constraint, if any.

    Tries the three deterministic interior probes; satisfaction must be
    interval-certified, so a returned point is a genuine solution.
    """
    worker = _CaWorker(system, CheckerConfig(), CheckStats())
    return worker._probe(box)


def format_report(report: CheckReport, detail: bool = False) -> str:
    """Verdict line, optionally preceded by one line per axiom event."""
    out = list(report.lines) if detail else []
    if report.verdict == VALID:
        out.append(f"valid: {report.stats.axioms_checked} axioms checked")
    elif report.verdict == NEEDS_REFINEMENT:
        out.append(f"needs refinement: {len(report.subproblems)} "
                   f"subproblem(s)")
    elif report.verdict == REFUTED:
        pt = ("" if report.witness is None else
              " at (" + ", ".join(repr(x) for x in report.witness) + ")")
        out.append(f"refuted: the claimed theorem has a satisfying point{pt}")
    else:
        out.append(f"malformed (node {report.node}): {report.reason}")
    return "\n".join(out) + "\n"
