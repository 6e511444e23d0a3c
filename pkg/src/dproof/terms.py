"""Term IR for nonlinear real expressions.

Terms are immutable trees built by the smart constructors below, compiled
into flat postorder programs for the kernel.  Symbolic differentiation
covers every operator; abs / min / max differentiate through bounded
envelope selectors ($sgn, $chmin, $chmax) that the kernel evaluates as
set-valued slopes, so first-order bounds stay sound across kinks.
"""

from __future__ import annotations

import hashlib
from array import array
from dataclasses import dataclass
from fractions import Fraction

from dproof import _opcodes as OPS
from dproof import kernel
from dproof.interval import (
    Box,
    Interval,
    float_hex,
    interval_of_rational,
    rational_of_text,
)


@dataclass(frozen=True)
class Term:
    op: str
    args: tuple["Term", ...] = ()
    payload: object = None


def var(name: str) -> Term:
    return Term("var", (), name)


def const(value) -> Term:
    """Constant from float/int, Fraction, decimal text, or Interval."""
    if isinstance(value, Term):
        raise TypeError("const() takes a number, not a Term")
    if isinstance(value, Interval):
        return Term("const", (), (value.lo, value.hi, f"{float_hex(value.lo)}~{float_hex(value.hi)}"))
    if isinstance(value, bool):
        raise TypeError("boolean constant in arithmetic term")
    if isinstance(value, int):
        iv = interval_of_rational(Fraction(value))
        return Term("const", (), (iv.lo, iv.hi, str(value)))
    if isinstance(value, float):
        iv = Interval.point(value)
        return Term("const", (), (iv.lo, iv.hi, float_hex(value)))
    if isinstance(value, Fraction):
        iv = interval_of_rational(value)
        text = str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
        return Term("const", (), (iv.lo, iv.hi, text))
    if isinstance(value, str):
        iv = Interval.from_decimal(value)
        return Term("const", (), (iv.lo, iv.hi, value.strip()))
    raise TypeError(f"cannot make a constant from {type(value).__name__}")


ZERO = const(0)
ONE = const(1)
TWO = const(2)


def is_zero(t: Term) -> bool:
    return t.op == "const" and t.payload[0] == 0.0 and t.payload[1] == 0.0


def is_one(t: Term) -> bool:
    return t.op == "const" and t.payload[0] == 1.0 and t.payload[1] == 1.0


def add(a: Term, b: Term) -> Term:
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    return Term("add", (a, b))


def sub(a: Term, b: Term) -> Term:
    if is_zero(b):
        return a
    if is_zero(a):
        return neg(b)
    return Term("sub", (a, b))


def neg(a: Term) -> Term:
    if is_zero(a):
        return ZERO
    if a.op == "neg":
        return a.args[0]
    return Term("neg", (a,))


def mul(a: Term, b: Term) -> Term:
    if is_zero(a) or is_zero(b):
        return ZERO
    if is_one(a):
        return b
    if is_one(b):
        return a
    return Term("mul", (a, b))


def div(a: Term, b: Term) -> Term:
    if is_zero(a):
        return ZERO
    if is_one(b):
        return a
    return Term("div", (a, b))


def sqr(a: Term) -> Term:
    return Term("sqr", (a,))


def powi(a: Term, n: int) -> Term:
    n = int(n)
    if abs(n) > 1000:
        raise ValueError(f"integer exponent {n} out of range")
    if n == 0:
        return ONE  # 0**0 = 1 convention, applied uniformly
    if n == 1:
        return a
    if n == 2:
        return sqr(a)
    return Term("powi", (a,), n)


def sqrt_(a: Term) -> Term:
    return Term("sqrt", (a,))


def exp_(a: Term) -> Term:
    return Term("exp", (a,))


def log_(a: Term) -> Term:
    return Term("log", (a,))


def sin_(a: Term) -> Term:
    return Term("sin", (a,))


def cos_(a: Term) -> Term:
    return Term("cos", (a,))


def tan_(a: Term) -> Term:
    return Term("tan", (a,))


def asin_(a: Term) -> Term:
    return Term("asin", (a,))


def acos_(a: Term) -> Term:
    return Term("acos", (a,))


def atan_(a: Term) -> Term:
    return Term("atan", (a,))


def atan2_(y: Term, x: Term) -> Term:
    return Term("atan2", (y, x))


def min_(a: Term, b: Term) -> Term:
    return Term("min", (a, b))


def max_(a: Term, b: Term) -> Term:
    return Term("max", (a, b))


def abs_(a: Term) -> Term:
    return Term("abs", (a,))


def _sgn(a: Term) -> Term:
    return Term("sgn", (a,))


def _chmin(a: Term, b: Term) -> Term:
    return Term("chmin", (a, b))


def _chmax(a: Term, b: Term) -> Term:
    return Term("chmax", (a, b))


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if s.op == "var":
            out.add(s.payload)
        else:
            stack.extend(s.args)
    return out


# ---------------------------------------------------------------------------
# printing

_FUNC_SYMBOL = {
    "add": "+",
    "sub": "-",
    "neg": "-",
    "mul": "*",
    "div": "/",
    "sqrt": "sqrt",
    "exp": "exp",
    "log": "log",
    "sin": "sin",
    "cos": "cos",
    "tan": "tan",
    "asin": "asin",
    "acos": "acos",
    "atan": "atan",
    "atan2": "atan2",
    "min": "min",
    "max": "max",
    "abs": "abs",
}


def term_text(t: Term) -> str:
    """Canonical s-expression; parsing it back yields an equal term."""
    if t.op == "var":
        return t.payload
    if t.op == "const":
        return t.payload[2]
    if t.op == "sqr":
        return f"(^ {term_text(t.args[0])} 2)"
    if t.op == "powi":
        return f"(^ {term_text(t.args[0])} {t.payload})"
    if t.op in ("sgn", "chmin", "chmax"):
        raise ValueError(f"internal operator {t.op} has no surface syntax")
    sym = _FUNC_SYMBOL[t.op]
    inner = " ".join(term_text(a) for a in t.args)
    return f"({sym} {inner})"


# ---------------------------------------------------------------------------
# differentiation

class NonDifferentiableError(ValueError):
    """The term has a kink and slope envelopes were not requested."""


def derive(t: Term, v: str, subdifferentials: bool = False) -> Term:
    """d t / d v as a term.

    abs, min and max are differentiable almost everywhere but not at their
    kinks; by default they raise NonDifferentiableError.  With
    subdifferentials=True the kinks contribute slope-envelope selector
    nodes instead, which evaluate to interval enclosures of every
    subgradient (sound for mean-value bounds of Lipschitz terms).
    """

    def d(t: Term) -> Term:
        op = t.op
        if op == "var":
            return ONE if t.payload == v else ZERO
        if op == "const":
            return ZERO
        if op in ("sgn", "chmin", "chmax"):
            raise NonDifferentiableError(
                "envelope selectors are not differentiable")
        a = t.args[0]
        if op in ("abs", "min", "max") and not subdifferentials:
            raise NonDifferentiableError(
                f"{op} is not differentiable at its kink")
        if op == "add":
            return add(d(a), d(t.args[1]))
        if op == "sub":
            return sub(d(a), d(t.args[1]))
        if op == "neg":
            return neg(d(a))
        if op == "mul":
            b = t.args[1]
            return add(mul(d(a), b), mul(a, d(b)))
        if op == "div":
            b = t.args[1]
            return div(sub(mul(d(a), b), mul(a, d(b))), sqr(b))
        if op == "sqr":
            return mul(TWO, mul(a, d(a)))
        if op == "powi":
            n = t.payload
            return mul(mul(const(n), powi(a, n - 1)), d(a))
        if op == "sqrt":
            return div(d(a), mul(TWO, sqrt_(a)))
        if op == "exp":
            return mul(t, d(a))
        if op == "log":
            return div(d(a), a)
        if op == "sin":
            return mul(cos_(a), d(a))
        if op == "cos":
            return neg(mul(sin_(a), d(a)))
        if op == "tan":
            return mul(add(ONE, sqr(tan_(a))), d(a))
        if op == "asin":
            return div(d(a), sqrt_(sub(ONE, sqr(a))))
        if op == "acos":
            return neg(div(d(a), sqrt_(sub(ONE, sqr(a)))))
        if op == "atan":
            return div(d(a), add(ONE, sqr(a)))
        if op == "atan2":
            y, x = t.args
            num = sub(mul(x, d(y)), mul(y, d(x)))
            return div(num, add(sqr(x), sqr(y)))
        if op == "abs":
            return mul(_sgn(a), d(a))
        if op == "min":
            b = t.args[1]
            ch = _chmin(a, b)
            return add(mul(ch, d(a)), mul(sub(ONE, ch), d(b)))
        if op == "max":
            b = t.args[1]
            ch = _chmax(a, b)
            return add(mul(ch, d(a)), mul(sub(ONE, ch), d(b)))
        raise ValueError(f"unknown operator {op!r}")

    return d(t)


# ---------------------------------------------------------------------------
# compilation

_OPCODE = {
    "add": OPS.ADD,
    "sub": OPS.SUB,
    "mul": OPS.MUL,
    "div": OPS.DIV,
    "neg": OPS.NEG,
    "sqr": OPS.SQR,
    "sqrt": OPS.SQRT,
    "exp": OPS.EXP,
    "log": OPS.LOG,
    "sin": OPS.SIN,
    "cos": OPS.COS,
    "tan": OPS.TAN,
    "asin": OPS.ASIN,
    "acos": OPS.ACOS,
    "atan": OPS.ATAN,
    "atan2": OPS.ATAN2,
    "min": OPS.MIN,
    "max": OPS.MAX,
    "abs": OPS.ABS,
    "sgn": OPS.SGN,
    "chmin": OPS.CHMIN,
    "chmax": OPS.CHMAX,
}


@dataclass
class Program:
    """Flat postorder form of a term; shared subterms appear once."""

    ops: array
    aa: array
    bb: array
    clo: array
    chi: array
    nvars: int

    def __len__(self) -> int:
        return len(self.ops)


def compile_term(t: Term, var_index: dict[str, int]) -> Program:
    ops = array("q")
    aa = array("q")
    bb = array("q")
    consts: list[tuple[float, float]] = []
    const_index: dict[tuple[float, float], int] = {}
    memo: dict[Term, int] = {}

    def emit(s: Term) -> int:
        got = memo.get(s)
        if got is not None:
            return got
        if s.op == "var":
            ops.append(OPS.VAR)
            aa.append(var_index[s.payload])
            bb.append(0)
        elif s.op == "const":
            lo, hi = s.payload[0], s.payload[1]
            ci = const_index.get((lo, hi))
            if ci is None:
                ci = len(consts)
                consts.append((lo, hi))
                const_index[(lo, hi)] = ci
            ops.append(OPS.CONST)
            aa.append(ci)
            bb.append(0)
        elif s.op == "powi":
            j = emit(s.args[0])
            ops.append(OPS.POWI)
            aa.append(j)
            bb.append(s.payload)
        elif len(s.args) == 1:
            j = emit(s.args[0])
            ops.append(_OPCODE[s.op])
            aa.append(j)
            bb.append(0)
        else:
            j = emit(s.args[0])
            k = emit(s.args[1])
            if s.op == "mul" and j == k:
                # x*x is x^2 pointwise; the square form encloses tighter
                ops.append(OPS.SQR)
                aa.append(j)
                bb.append(0)
            else:
                ops.append(_OPCODE[s.op])
                aa.append(j)
                bb.append(k)
        idx = len(ops) - 1
        memo[s] = idx
        return idx

    emit(t)
    return Program(
        ops=ops,
        aa=aa,
        bb=bb,
        clo=array("d", (c[0] for c in consts)),
        chi=array("d", (c[1] for c in consts)),
        nvars=len(var_index),
    )


def eval_program(prog: Program, blo, bhi) -> Interval:
    lo, hi = kernel.eval_root(prog.ops, prog.aa, prog.bb, prog.clo, prog.chi, blo, bhi)
    return Interval(lo, hi)


def eval_on_box(prog: Program, box: Box) -> Interval:
    return eval_program(prog, array("d", box.lo_list()), array("d", box.hi_list()))


# ---------------------------------------------------------------------------
# atoms and systems

RELS = ("=", "<=", "<", ">=", ">", "!=")


@dataclass(frozen=True)
class Atom:
    """Constraint `term rel 0`."""

    term: Term
    rel: str

    def __post_init__(self) -> None:
        if self.rel not in RELS:
            raise ValueError(f"unknown relation {self.rel!r}")

    def text(self) -> str:
        return f"({self.rel} {term_text(self.term)} 0)"


_INF = float("inf")


def _target_of(rel: str) -> tuple[float, float] | None:
    # contraction target: strict relations contract with their closure
    if rel == "=":
        return (0.0, 0.0)
    if rel in ("<=", "<"):
        return (-_INF, 0.0)
    if rel in (">=", ">"):
        return (0.0, _INF)
    return None  # "!=" prunes nothing


@dataclass
class CompiledAtom:
    atom: Atom
    prog: Program
    rel: str
    target: tuple[float, float] | None

    def natural(self, blo, bhi) -> Interval:
        return eval_program(self.prog, blo, bhi)


def compile_atom(atom: Atom, var_index: dict[str, int]) -> CompiledAtom:
    return CompiledAtom(
        atom=atom,
        prog=compile_term(atom.term, var_index),
        rel=atom.rel,
        target=_target_of(atom.rel),
    )


def enclosure_refutes(rel: str, f: Interval) -> bool:
    """Does the enclosure of the left side prove `f rel 0` has no solution?

    An empty enclosure means no point of the box is in the term's domain,
    which refutes every relation.
    """
    if f.is_empty:
        return True
    if rel == "=":
        return f.hi < 0.0 or f.lo > 0.0
    if rel == "!=":
        return f.lo == 0.0 and f.hi == 0.0
    if rel == ">":
        return f.hi <= 0.0
    if rel == ">=":
        return f.hi < 0.0
    if rel == "<":
        return f.lo >= 0.0
    if rel == "<=":
        return f.lo > 0.0
    raise ValueError(f"unknown relation {rel!r}")


def enclosure_delta_consistent(rel: str, f: Interval, delta_dn: float) -> bool:
    """Does the enclosure certify the delta-weakened atom everywhere?

    delta_dn must be a float lower bound on the exact delta, so True here
    is sound for the exact value.
    """
    if f.is_empty:
        return False
    if rel == "=":
        return f.mag <= delta_dn
    if rel in (">=", ">"):
        return f.lo >= -delta_dn
    if rel in ("<=", "<"):
        return f.hi <= delta_dn
    return True  # "!=" weakens to a tautology


@dataclass(frozen=True)
class System:
    """Conjunction of atoms over box-bounded real variables."""

    var_names: tuple[str, ...]
    box: Box
    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if len(self.var_names) != len(self.box):
            raise ValueError("one bound interval per variable required")
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError("duplicate variable name")
        declared = set(self.var_names)
        for atom in self.atoms:
            loose = free_vars(atom.term) - declared
            if loose:
                raise ValueError(f"undeclared variables: {sorted(loose)}")

    @property
    def var_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.var_names)}

    def canonical_text(self) -> str:
        lines = ["(set-logic QF_NRA)"]
        for name, iv in zip(self.var_names, self.box.ivs):
            lines.append(f"(declare-fun {name} () Real)")
            lines.append(f"(assert (>= {name} {float_hex(iv.lo)}))")
            lines.append(f"(assert (<= {name} {float_hex(iv.hi)}))")
        for atom in self.atoms:
            lines.append(f"(assert {atom.text()})")
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def compile(self) -> list[CompiledAtom]:
        vi = self.var_index
        return [compile_atom(a, vi) for a in self.atoms]
