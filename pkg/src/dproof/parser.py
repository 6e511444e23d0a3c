"""Reader for the SMT-LIB-flavoured input format.

Accepted commands: set-logic / set-info / set-option (ignored),
declare-fun / declare-const over Real, assert, check-sat, exit.
Assertions are n-ary and/comparison trees over + - * / ^ sqrt exp log
sin cos tan asin acos atan atan2 min max abs.

Comparisons between a declared variable and a numeral fold into the
variable's bounding interval (outward-rounded, so the stated set is never
shrunk by rounding); `inf` and `-inf` are legal only there.  Everything
else becomes an atom `term rel 0`.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from dproof import terms as T
from dproof.interval import Box, Interval, interval_of_rational

INF = math.inf


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int


SExpr = Union[_Tok, list]


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line = 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            toks.append(_Tok(c, line))
            i += 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            toks.append(_Tok(text[i:j], line))
            i = j
    return toks


def _read_sexprs(toks: list[_Tok]) -> list[SExpr]:
    out: list[SExpr] = []
    stack: list[list] = []
    for t in toks:
        if t.text == "(":
            stack.append([])
        elif t.text == ")":
            if not stack:
                raise ParseError(f"line {t.line}: unmatched ')'")
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                out.append(done)
        else:
            if stack:
                stack[-1].append(t)
            else:
                out.append(t)
    if stack:
        raise ParseError("unclosed '(' at end of input")
    return out


def _line_of(e: SExpr) -> int:
    while isinstance(e, list):
        if not e:
            return 0
        e = e[0]
    return e.line


def _is_sym(e: SExpr, s: str) -> bool:
    return isinstance(e, _Tok) and e.text == s


def _numeral_fraction(text: str) -> Fraction | None:
    """Exact value of a numeral token, or None if it is not one."""
    t = text[1:] if text.startswith("-") else text
    if not t:
        return None
    if t.startswith("0x") or t.startswith("0X"):
        try:
            v = float.fromhex(text)
        except ValueError:
            return None
        if math.isinf(v) or math.isnan(v):
            return None
        return Fraction(v)
    if not (t[0].isdigit() or t[0] == "."):
        return None
    if "/" in t:
        num, _, den = text.partition("/")
        try:
            d = int(den)
            if d == 0:
                return None
            return Fraction(int(num), d)
        except ValueError:
            return None
    try:
        return Fraction(decimal.Decimal(text))
    except decimal.InvalidOperation:
        return None


def _try_rational(e: SExpr) -> Fraction | None:
    """Numeral forms: NUM, (- NUM-FORM), (/ NUM-FORM NUM-FORM)."""
    if isinstance(e, _Tok):
        return _numeral_fraction(e.text)
    if not e or not isinstance(e[0], _Tok):
        return None
    head = e[0].text
    if head == "-" and len(e) == 2:
        v = _try_rational(e[1])
        return None if v is None else -v
    if head == "/" and len(e) == 3:
        a = _try_rational(e[1])
        b = _try_rational(e[2])
        if a is None or b is None:
            return None
        if b == 0:
            raise ParseError(f"line {_line_of(e)}: literal division by zero")
        return a / b
    return None


_UNARY = {
    "sqrt": T.sqrt_,
    "exp": T.exp_,
    "log": T.log_,
    "sin": T.sin_,
    "cos": T.cos_,
    "tan": T.tan_,
    "asin": T.asin_,
    "acos": T.acos_,
    "atan": T.atan_,
    "arcsin": T.asin_,
    "arccos": T.acos_,
    "arctan": T.atan_,
    "abs": T.abs_,
}

_RELS = ("=", "<=", "<", ">=", ">")
_NOT_REL = {"=": "!=", "<=": ">", "<": ">=", ">=": "<", ">": "<=", "!=": "="}
_MIRROR = {"<=": ">=", "<": ">", ">=": "<=", ">": "<", "=": "=", "!=": "!="}


class _SystemBuilder:
    def __init__(self) -> None:
        self.var_names: list[str] = []
        self.declared: set[str] = set()
        self.bounds: dict[str, tuple[float, float]] = {}
        self.bounded: dict[str, set[str]] = {}
        self.atoms: list[T.Atom] = []

    def declare(self, name: str, line: int) -> None:
        if name in self.declared:
            raise ParseError(f"line {line}: variable {name} declared twice")
        if _numeral_fraction(name) is not None or name in ("inf", "-inf"):
            raise ParseError(f"line {line}: bad variable name {name!r}")
        self.declared.add(name)
        self.var_names.append(name)
        self.bounds[name] = (-INF, INF)
        self.bounded[name] = set()

    def term_of(self, e: SExpr) -> T.Term:
        r = _try_rational(e)
        if r is not None:
            return T.const(r)
        if isinstance(e, _Tok):
            if e.text in self.declared:
                return T.var(e.text)
            if e.text in ("inf", "-inf"):
                raise ParseError(
                    f"line {e.line}: {e.text} is only legal as a variable bound"
                )
            raise ParseError(f"line {e.line}: unknown symbol {e.text!r}")
        if not e or not isinstance(e[0], _Tok):
            raise ParseError(f"line {_line_of(e)}: expected an operator application")
        head = e[0].text
        args = e[1:]
        ln = e[0].line
        if head == "+":
            if len(args) < 1:
                raise ParseError(f"line {ln}: + needs arguments")
            t = self.term_of(args[0])
            for a in args[1:]:
                t = T.add(t, self.term_of(a))
            return t
        if head == "-":
            if len(args) == 1:
                return T.neg(self.term_of(args[0]))
            if len(args) >= 2:
                t = self.term_of(args[0])
                for a in args[1:]:
                    t = T.sub(t, self.term_of(a))
                return t
            raise ParseError(f"line {ln}: - needs arguments")
        if head == "*":
            if len(args) < 2:
                raise ParseError(f"line {ln}: * needs at least two arguments")
            t = self.term_of(args[0])
            for a in args[1:]:
                t = T.mul(t, self.term_of(a))
            return t
        if head == "/":
            if len(args) != 2:
                raise ParseError(f"line {ln}: / takes exactly two arguments")
            return T.div(self.term_of(args[0]), self.term_of(args[1]))
        if head in ("^", "pow"):
            if len(args) != 2:
                raise ParseError(f"line {ln}: ^ takes exactly two arguments")
            exp = _try_rational(args[1])
            if exp is None or exp.denominator != 1:
                raise ParseError(f"line {ln}: exponent must be an integer literal")
            return T.powi(self.term_of(args[0]), int(exp))
        if head in _UNARY:
            if len(args) != 1:
                raise ParseError(f"line {ln}: {head} takes exactly one argument")
            return _UNARY[head](self.term_of(args[0]))
        if head == "atan2":
            if len(args) != 2:
                raise ParseError(f"line {ln}: atan2 takes exactly two arguments")
            return T.atan2_(self.term_of(args[0]), self.term_of(args[1]))
        if head in ("min", "max"):
            if len(args) < 2:
                raise ParseError(f"line {ln}: {head} needs at least two arguments")
            ctor = T.min_ if head == "min" else T.max_
            t = self.term_of(args[0])
            for a in args[1:]:
                t = ctor(t, self.term_of(a))
            return t
        raise ParseError(f"line {ln}: unknown operator {head!r}")

    # -- bound folding ------------------------------------------------------

    def _bound_value(self, e: SExpr) -> tuple[float, float] | None:
        # returns the outward float enclosure of a bound-position numeral
        if _is_sym(e, "inf"):
            return (INF, INF)
        if _is_sym(e, "-inf"):
            return (-INF, -INF)
        if isinstance(e, list) and len(e) == 2 and _is_sym(e[0], "-") and _is_sym(e[1], "inf"):
            return (-INF, -INF)
        r = _try_rational(e)
        if r is None:
            return None
        iv = interval_of_rational(r)
        return (iv.lo, iv.hi)

    def _fold_bound(self, name: str, rel: str, enc: tuple[float, float]) -> None:
        lo, hi = self.bounds[name]
        if rel in ("<=", "<"):
            self.bounded[name].add("hi")
            if enc[1] < hi:
                hi = enc[1]
        elif rel in (">=", ">"):
            self.bounded[name].add("lo")
            if enc[0] > lo:
                lo = enc[0]
        elif rel == "=":
            self.bounded[name] |= {"lo", "hi"}
            if enc[0] > lo:
                lo = enc[0]
            if enc[1] < hi:
                hi = enc[1]
        self.bounds[name] = (lo, hi)

    def _try_bound(self, rel: str, lhs: SExpr, rhs: SExpr) -> bool:
        if rel == "!=":
            return False
        if isinstance(lhs, _Tok) and lhs.text in self.declared:
            enc = self._bound_value(rhs)
            if enc is not None:
                self._fold_bound(lhs.text, rel, enc)
                return True
        if isinstance(rhs, _Tok) and rhs.text in self.declared:
            enc = self._bound_value(lhs)
            if enc is not None:
                self._fold_bound(rhs.text, _MIRROR[rel], enc)
                return True
        return False

    # -- assertions ---------------------------------------------------------

    def add_assert(self, e: SExpr, negate: bool = False) -> None:
        if not isinstance(e, list) or not e or not isinstance(e[0], _Tok):
            raise ParseError(f"line {_line_of(e)}: expected a relation or 'and'")
        head = e[0].text
        ln = e[0].line
        if head == "and":
            if negate:
                raise ParseError(f"line {ln}: negated conjunctions are out of scope")
            for sub in e[1:]:
                self.add_assert(sub)
            return
        if head == "not":
            if len(e) != 2:
                raise ParseError(f"line {ln}: not takes one argument")
            self.add_assert(e[1], negate=not negate)
            return
        if head == "distinct":
            head = "!="
        if head not in _RELS and head != "!=":
            raise ParseError(f"line {ln}: unknown relation {head!r}")
        if len(e) != 3:
            raise ParseError(f"line {ln}: relations are binary here")
        rel = _NOT_REL[head] if negate else head
        lhs, rhs = e[1], e[2]
        if self._try_bound(rel, lhs, rhs):
            return
        lt = self.term_of(lhs)
        rt = self.term_of(rhs)
        if T.is_zero(rt):
            term = lt
        elif T.is_zero(lt):
            term = rt
            rel = _MIRROR[rel]
        else:
            term = T.sub(lt, rt)
        self.atoms.append(T.Atom(term, rel))

    def build(self) -> T.System:
        if not self.var_names:
            raise ParseError("no variables declared")
        for n in self.var_names:
            missing = {"lo", "hi"} - self.bounded[n]
            if missing:
                side = "below" if "lo" in missing else "above"
                raise ParseError(
                    f"variable {n} has no bound {side}; write an explicit"
                    f" bound (inf and -inf are accepted)"
                )
        if not self.atoms:
            raise ParseError("no constraints asserted beyond variable bounds")
        ivs = [Interval(*self.bounds[n]) for n in self.var_names]
        return T.System(
            var_names=tuple(self.var_names),
            box=Box(tuple(ivs)),
            atoms=tuple(self.atoms),
        )


def parse_system(text: str) -> T.System:
    sexprs = _read_sexprs(_tokenize(text))
    b = _SystemBuilder()
    for e in sexprs:
        if not isinstance(e, list) or not e or not isinstance(e[0], _Tok):
            raise ParseError(f"line {_line_of(e)}: expected a command")
        head = e[0].text
        ln = e[0].line
        if head in ("set-logic", "set-info", "set-option", "check-sat", "exit", "get-model"):
            continue
        if head == "declare-fun":
            if len(e) != 4 or not isinstance(e[1], _Tok) or e[2] != [] or not _is_sym(e[3], "Real"):
                raise ParseError(f"line {ln}: expected (declare-fun name () Real)")
            b.declare(e[1].text, ln)
        elif head == "declare-const":
            if len(e) != 3 or not isinstance(e[1], _Tok) or not _is_sym(e[2], "Real"):
                raise ParseError(f"line {ln}: expected (declare-const name Real)")
            b.declare(e[1].text, ln)
        elif head == "assert":
            if len(e) != 2:
                raise ParseError(f"line {ln}: assert takes one formula")
            b.add_assert(e[1])
        else:
            raise ParseError(f"line {ln}: unknown command {head!r}")
    return b.build()


def parse_file(path: str) -> T.System:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())
