"""Proof trees for box refutations, built by replaying solver traces.

The calculus has two axiom schemas and two rules.  An IA leaf asserts that
a box is covered by two boxes; a CA leaf asserts that the constraint
conjunction has no solution in a box.  A cover node (the disjunction rule)
joins the two part leaves; its parent (the monotonicity rule) discharges
the cover obligation with the IA leaf.  Each prune or branch step of a
trace therefore adds exactly four nodes under the leaf it refines, so a
replayed tree has at most 4 * steps + 1 nodes.

Replay validates structure only: branch bookkeeping must balance, but the
boxes claimed by the steps are taken at face value.  Whether every IA
cover really covers and every CA box is really infeasible is the
checker's job.
"""

from __future__ import annotations

from dataclasses import dataclass

from dproof.interval import Box, Interval
from dproof.solver import BACKTRACK, BRANCH, FAIL, PRUNE, Step
from dproof.terms import System

MP = "mp"      # internal: [IA leaf, cover node] -> own box refuted
ORI = "ori"    # internal: [part1 leaf, part2 leaf] -> their disjunction refuted
IA = "ia"      # axiom leaf: whole box is covered by parts
CA = "ca"      # axiom leaf: no point of box satisfies the constraints
OPEN = "open"  # pending obligation (never present in a finished tree)


class TraceReplayError(ValueError):
    """The trace is not a well-formed record of a search."""


@dataclass
class ProofNode:
    kind: str
    box: Box | None = None                 # mp/ca/open antecedent; ia whole
    parts: tuple[Box, Box] | None = None   # ia and ori
    children: tuple[int, int] | None = None
    step: int = -1                         # trace step that created/closed it


@dataclass
class ProofTree:
    system: System
    nodes: list[ProofNode]

    @property
    def root(self) -> int:
        return 0

    def tree_size(self) -> int:
        return len(self.nodes)

    def leaves_in_order(self) -> list[int]:
        """Leaf indices, leftmost first; iterative to survive deep traces."""
        out: list[int] = []
        stack = [0]
        while stack:
            i = stack.pop()
            node = self.nodes[i]
            if node.children is None:
                out.append(i)
            else:
                stack.append(node.children[1])
                stack.append(node.children[0])
        return out

    def axiom_counts(self) -> tuple[int, int]:
        n_ia = sum(1 for n in self.nodes if n.kind == IA)
        n_ca = sum(1 for n in self.nodes if n.kind == CA)
        return n_ia, n_ca

    def open_leaves(self) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if n.kind == OPEN]


def build_tree(system: System, trace: list[Step]) -> ProofTree:
    """Replay a trace into a finished proof tree.

    Raises TraceReplayError when the trace is structurally inconsistent:
    steps after the final fail, unbalanced backtracks, a backtrack that
    does not match the most recent pending branch, or a missing fail.
    """
    nv = len(system.var_names)
    nodes: list[ProofNode] = [ProofNode(OPEN, box=system.box)]
    cur = 0
    # pending branches: (sibling leaf index, var, taken, sibling)
    pending: list[tuple[int, int, Interval, Interval]] = []
    finished = False

    def refine(idx: int, whole: Box, part1: Box, part2: Box,
               kinds: tuple[str, str], step_no: int) -> tuple[int, int]:
        """Expand open leaf `idx` with the four-node step pattern."""
        base = len(nodes)
        nodes.append(ProofNode(IA, box=whole, parts=(part1, part2), step=step_no))
        nodes.append(ProofNode(ORI, parts=(part1, part2), step=step_no))
        nodes.append(ProofNode(kinds[0], box=part1, step=step_no))
        nodes.append(ProofNode(kinds[1], box=part2, step=step_no))
        ia_i, ori_i, p1_i, p2_i = base, base + 1, base + 2, base + 3
        nodes[ori_i].children = (p1_i, p2_i)
        leaf = nodes[idx]
        leaf.kind = MP
        leaf.children = (ia_i, ori_i)
        leaf.step = step_no
        return p1_i, p2_i

    for step_no, st in enumerate(trace):
        if finished:
            raise TraceReplayError(f"step {step_no}: trace continues after fail")
        if st.kind == PRUNE:
            if not (0 <= st.var < nv):
                raise TraceReplayError(f"step {step_no}: variable {st.var} out of range")
            if st.a is None or st.b is None:
                raise TraceReplayError(f"step {step_no}: prune needs two intervals")
            whole = nodes[cur].box
            kept_box = whole.replace(st.var, st.b)
            removed_box = whole.replace(st.var, st.a)
            kept_i, _removed_i = refine(
                cur, whole, kept_box, removed_box, (OPEN, CA), step_no
            )
            cur = kept_i
        elif st.kind == BRANCH:
            if not (0 <= st.var < nv):
                raise TraceReplayError(f"step {step_no}: variable {st.var} out of range")
            if st.a is None or st.b is None:
                raise TraceReplayError(f"step {step_no}: branch needs two intervals")
            whole = nodes[cur].box
            taken_box = whole.replace(st.var, st.a)
            sib_box = whole.replace(st.var, st.b)
            taken_i, sib_i = refine(
                cur, whole, taken_box, sib_box, (OPEN, OPEN), step_no
            )
            pending.append((sib_i, st.var, st.a, st.b))
            cur = taken_i
        elif st.kind == BACKTRACK:
            if not pending:
                raise TraceReplayError(f"step {step_no}: backtrack with no pending branch")
            sib_i, bvar, taken, sibling = pending.pop()
            if st.var != bvar or st.a != taken or st.b != sibling:
                raise TraceReplayError(
                    f"step {step_no}: backtrack does not match the most recent "
                    f"pending branch (var {bvar}, taken {taken}, sibling {sibling})"
                )
            nodes[cur].kind = CA
            nodes[cur].step = step_no
            cur = sib_i
        elif st.kind == FAIL:
            if pending:
                raise TraceReplayError(
                    f"step {step_no}: fail with {len(pending)} branch(es) still pending"
                )
            nodes[cur].kind = CA
            nodes[cur].step = step_no
            finished = True
        else:
            raise TraceReplayError(f"step {step_no}: unknown step kind {st.kind!r}")

    if not finished:
        raise TraceReplayError("trace ends before fail; proof is incomplete")
    return ProofTree(system=system, nodes=nodes)
