"""Shared test helpers: high-precision oracles and instance generators.

The oracles here deliberately avoid the library's own interval code:
mp_eval computes with mpmath at 40 digits, np_eval with numpy doubles,
and covers_union_oracle with exact rationals, so containment and cover
claims are checked against independent arithmetic.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import pytest

from dproof import terms as T
from dproof.interval import Box, Interval
from dproof.parser import parse_system

mpmath.mp.dps = 40


# ---------------------------------------------------------------------------
# instance texts reused across test modules

EXAMPLE1 = """\
(declare-fun x () Real)
(declare-fun y () Real)
(assert (>= x 1.5)) (assert (<= x 2))
(assert (>= y 1)) (assert (<= y 2))
(assert (= y x))
(assert (= y (^ x 2)))
(check-sat)
"""

# two crossing curves with both intersection points excluded; branching is
# unavoidable because pruning stalls on the hull of the two solutions
TWOEX = """\
(declare-fun x () Real)
(declare-fun y () Real)
(assert (>= x -2)) (assert (<= x 2))
(assert (>= y -2)) (assert (<= y 2))
(assert (= y (* x x)))
(assert (= y (+ x 1)))
(assert (>= (* (- x 1.618) (- x 1.618)) 0.0001))
(assert (>= (* (+ x 0.618) (+ x 0.618)) 0.0001))
(check-sat)
"""

# same two curves without the exclusions: genuinely satisfiable
TWOFIX = """\
(declare-fun x () Real)
(declare-fun y () Real)
(assert (>= x -2)) (assert (<= x 2))
(assert (>= y -2)) (assert (<= y 2))
(assert (= y (* x x)))
(assert (= y (+ x 1)))
(check-sat)
"""

# x - x >= 0.1: identically false, but the natural extension never sees it
# on a nondegenerate box; the mean-value form does
DEPX = """\
(declare-fun x () Real)
(assert (>= x 0)) (assert (<= x 1))
(assert (>= (- (- x x) 0.1) 0))
(check-sat)
"""

SAT_HALFLINE = """\
(declare-fun x () Real)
(assert (>= x -2)) (assert (<= x 2))
(assert (<= (* x x) 1))
(assert (>= x 0))
(check-sat)
"""

# single exact satisfying point x = 0.5, representable in binary64
SAT_POINT = """\
(declare-fun x () Real)
(assert (>= x 0)) (assert (<= x 1))
(assert (= (- x 0.5) 0))
(check-sat)
"""


@pytest.fixture(scope="session")
def example1() -> T.System:
    return parse_system(EXAMPLE1)


@pytest.fixture(scope="session")
def instance_dir() -> Path:
    d = Path(__file__).resolve().parents[1] / "src" / "dproof" / "instances"
    assert d.is_dir()
    return d


# ---------------------------------------------------------------------------
# mpmath point oracle

_MP1 = {
    "sqrt": mpmath.sqrt, "exp": mpmath.exp, "log": mpmath.log,
    "sin": mpmath.sin, "cos": mpmath.cos, "tan": mpmath.tan,
    "asin": mpmath.asin, "acos": mpmath.acos, "atan": mpmath.atan,
}


def mp_eval(t: T.Term, env: dict[str, float]):
    """Evaluate a term at a float point with mpmath; None if undefined.

    Constants use the midpoint of their (already outward) enclosure, so
    exact literals evaluate exactly.
    """
    op = t.op
    if op == "var":
        return mpmath.mpf(env[t.payload])
    if op == "const":
        lo, hi = t.payload[0], t.payload[1]
        return (mpmath.mpf(lo) + mpmath.mpf(hi)) / 2
    vals = []
    for a in t.args:
        v = mp_eval(a, env)
        if v is None:
            return None
        vals.append(v)
    if op == "add":
        return vals[0] + vals[1]
    if op == "sub":
        return vals[0] - vals[1]
    if op == "neg":
        return -vals[0]
    if op == "mul":
        return vals[0] * vals[1]
    if op == "div":
        if vals[1] == 0:
            return None
        return vals[0] / vals[1]
    if op == "sqr":
        return vals[0] * vals[0]
    if op == "powi":
        n = t.payload
        if vals[0] == 0 and n < 0:
            return None
        return vals[0] ** n
    if op in ("sqrt", "log", "asin", "acos"):
        x = vals[0]
        if op == "sqrt" and x < 0:
            return None
        if op == "log" and x <= 0:
            return None
        if op in ("asin", "acos") and not -1 <= x <= 1:
            return None
        return _MP1[op](x)
    if op in _MP1:
        return _MP1[op](vals[0])
    if op == "atan2":
        if vals[0] == 0 and vals[1] == 0:
            return None
        return mpmath.atan2(vals[0], vals[1])
    if op == "min":
        return min(vals)
    if op == "max":
        return max(vals)
    if op == "abs":
        return abs(vals[0])
    return None  # sgn/chmin/chmax: derivative envelopes, no point oracle


def mp_atom_holds(atom: T.Atom, env: dict[str, float]) -> bool | None:
    """Truth of the atom at a point per the oracle; None if undefined."""
    v = mp_eval(atom.term, env)
    if v is None:
        return None
    if atom.rel == "=":
        return v == 0
    if atom.rel == "!=":
        return v != 0
    if atom.rel == "<":
        return v < 0
    if atom.rel == "<=":
        return v <= 0
    if atom.rel == ">":
        return v > 0
    return v >= 0


# ---------------------------------------------------------------------------
# numpy samplers (for the 10^5-point soundness sweeps)

_NP1 = {
    "sqrt": np.sqrt, "exp": np.exp, "log": np.log, "sin": np.sin,
    "cos": np.cos, "tan": np.tan, "asin": np.arcsin, "acos": np.arccos,
    "atan": np.arctan, "neg": np.negative, "abs": np.abs,
}


def np_eval(t: T.Term, env: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorized double-precision evaluation; undefined points become nan."""
    op = t.op
    if op == "var":
        return env[t.payload]
    if op == "const":
        n = len(next(iter(env.values())))
        return np.full(n, (t.payload[0] + t.payload[1]) / 2)
    vals = [np_eval(a, env) for a in t.args]
    with np.errstate(all="ignore"):
        if op == "add":
            return vals[0] + vals[1]
        if op == "sub":
            return vals[0] - vals[1]
        if op == "mul":
            return vals[0] * vals[1]
        if op == "div":
            out = vals[0] / vals[1]
            return np.where(vals[1] == 0, np.nan, out)
        if op == "sqr":
            return vals[0] * vals[0]
        if op == "powi":
            return vals[0] ** float(t.payload)
        if op == "atan2":
            out = np.arctan2(vals[0], vals[1])
            return np.where((vals[0] == 0) & (vals[1] == 0), np.nan, out)
        if op == "min":
            return np.minimum(vals[0], vals[1])
        if op == "max":
            return np.maximum(vals[0], vals[1])
        if op in _NP1:
            return _NP1[op](vals[0])
    raise ValueError(f"no numpy rule for {op}")


def np_atom_holds(atom: T.Atom, env: dict[str, np.ndarray]) -> np.ndarray:
    """Boolean mask; nan (undefined) counts as not satisfied."""
    v = np_eval(atom.term, env)
    with np.errstate(all="ignore"):
        if atom.rel == "=":
            m = v == 0
        elif atom.rel == "!=":
            m = v != 0
        elif atom.rel == "<":
            m = v < 0
        elif atom.rel == "<=":
            m = v <= 0
        elif atom.rel == ">":
            m = v > 0
        else:
            m = v >= 0
    return m & ~np.isnan(v)


def sample_box(box: Box, n: int, seed: int) -> dict[str, np.ndarray] | None:
    """n uniform points per variable; None for an empty/degenerate box."""
    if box.is_empty:
        return None
    rng = np.random.default_rng(seed)
    cols = {}
    for i, iv in enumerate(box.ivs):
        cols[i] = rng.uniform(iv.lo, iv.hi, n)
    return cols


def system_sample_env(system, n: int, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    env = {}
    for name, iv in zip(system.var_names, system.box.ivs):
        env[name] = rng.uniform(iv.lo, iv.hi, n)
    return env


# ---------------------------------------------------------------------------
# exact-rational cover oracle

def covers_union_oracle(w, p1, p2) -> bool:
    """Is [w] a subset of [p1] union [p2], decided over the rationals?

    Intervals are (lo, hi) float pairs or None for empty.  Closed-set
    semantics, matching the library.  Since intervals are connected, a
    cover either comes from one piece alone or from two pieces that
    overlap or touch; anything else leaves a real gap.
    """
    if w is None:
        return True
    lo, hi = Fraction(w[0]), Fraction(w[1])
    pieces = sorted((Fraction(p[0]), Fraction(p[1])) for p in (p1, p2) if p is not None)
    for plo, phi in pieces:
        if plo <= lo and hi <= phi:
            return True
    if len(pieces) < 2:
        return False
    (alo, ahi), (blo, bhi) = pieces
    return alo <= lo and blo <= ahi and max(ahi, bhi) >= hi


def iv_or_none(iv: Interval):
    return None if iv.is_empty else (iv.lo, iv.hi)


# ---------------------------------------------------------------------------
# generated unsat corpus (linearity, mutation, and sampling suites)

def gen_unsat_system(idx: int) -> T.System:
    """Deterministic family of systems that are unsatisfiable by construction.

    Five shapes, cycled: a sum-of-squares ceiling above its exact maximum,
    crossing curves with both roots excluded, a cancelling difference with
    a gap, a monotone image with disjoint target bounds, and a bounded
    sine pushed past 1.  Margins are fat (>= 0.05) so delta = 1e-3 runs
    stay unsat.
    """
    rng = random.Random(761_000 + idx)
    shape = idx % 5

    if shape == 0:
        nv = rng.choice((1, 2, 3))
        names = tuple("xyz"[:nv])
        ivs, anchor = [], []
        for _ in range(nv):
            c = rng.uniform(-3, 3)
            w = rng.uniform(0.3, 1.5)
            ivs.append(Interval(c - w, c + w))
            anchor.append(rng.uniform(c - w, c + w))
        sos = None
        peak = 0.0
        for name, iv, a in zip(names, ivs, anchor):
            d = T.sub(T.var(name), T.const(a))
            sq = T.sqr(d)
            sos = sq if sos is None else T.add(sos, sq)
            peak += max((iv.lo - a) ** 2, (iv.hi - a) ** 2)
        bound = 1.25 * peak + 0.2
        atom = T.Atom(T.sub(sos, T.const(bound)), ">=")
        return T.System(names, Box(tuple(ivs)), (atom,))

    if shape == 1:
        c = rng.uniform(0.5, 2.0)
        r1 = (1 + math.sqrt(1 + 4 * c)) / 2
        r2 = (1 - math.sqrt(1 + 4 * c)) / 2
        box = Box((Interval(-3, 3), Interval(-3, 10)))
        x, y = T.var("x"), T.var("y")
        atoms = (
            T.Atom(T.sub(y, T.sqr(x)), "="),
            T.Atom(T.sub(y, T.add(x, T.const(c))), "="),
            T.Atom(T.sub(T.sqr(T.sub(x, T.const(r1))), T.const(1e-4)), ">="),
            T.Atom(T.sub(T.sqr(T.sub(x, T.const(r2))), T.const(1e-4)), ">="),
        )
        return T.System(("x", "y"), box, atoms)

    if shape == 2:
        lo = rng.uniform(-2, 0)
        hi = lo + rng.uniform(0.5, 2)
        m = rng.uniform(0.05, 0.3)
        x = T.var("x")
        atom = T.Atom(T.sub(T.sub(x, x), T.const(m)), ">=")
        return T.System(("x",), Box((Interval(lo, hi),)), (atom,))

    if shape == 3:
        a = rng.uniform(-1.5, 0)
        b = a + rng.uniform(0.5, 2)
        top = b ** 3  # x^3 is increasing, so this is the exact range max
        ylo = top + 0.3
        yhi = ylo + 1.0
        box = Box((Interval(a, b), Interval(ylo, yhi)))
        atom = T.Atom(T.sub(T.var("y"), T.powi(T.var("x"), 3)), "=")
        return T.System(("x", "y"), box, (atom,))

    lo = rng.uniform(-6, 3)
    hi = lo + rng.uniform(1, 6)
    m = rng.uniform(1.05, 1.4)
    atom = T.Atom(T.sub(T.sin_(T.var("x")), T.const(m)), ">=")
    return T.System(("x",), Box((Interval(lo, hi),)), (atom,))


def inequality_only(system: T.System) -> bool:
    return all(a.rel not in ("=", "!=") for a in system.atoms)
