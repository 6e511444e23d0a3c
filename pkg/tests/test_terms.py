"""Term IR, the s-expression parser, natural evaluation, and derivatives."""

import math
import random
from fractions import Fraction

import mpmath
import pytest

from dproof import terms as T
from dproof.interval import Box, Interval, interval_of_rational
from dproof.parser import ParseError, parse_system

from conftest import EXAMPLE1, gen_unsat_system, mp_eval


def _random_subbox(box: Box, rng: random.Random) -> Box:
    ivs = []
    for iv in box.ivs:
        a, b = sorted((rng.uniform(iv.lo, iv.hi), rng.uniform(iv.lo, iv.hi)))
        ivs.append((a, b))
    return Box.from_bounds(ivs)


def _eval(term, bounds, names=("x", "y")):
    idx = {n: i for i, n in enumerate(names[: len(bounds)])}
    prog = T.compile_term(term, idx)
    return T.eval_on_box(prog, Box.from_bounds(bounds))


X, Y = T.var("x"), T.var("y")


# ---------------------------------------------------------------------------
# parsing


def test_parse_two_variable_system(example1):
    assert example1.var_names == ("x", "y")
    assert example1.box[0] == Interval(1.5, 2.0)
    assert example1.box[1] == Interval(1.0, 2.0)
    assert len(example1.atoms) == 2
    assert all(a.rel == "=" for a in example1.atoms)


def test_parse_error_no_asserts():
    with pytest.raises(ParseError, match="no constraints"):
        parse_system("(declare-fun x () Real)(assert (>= x 0))"
                     "(assert (<= x 1))(check-sat)")


def test_parse_error_no_variables():
    with pytest.raises(ParseError, match="no variables"):
        parse_system("(check-sat)")


def test_parse_error_undeclared_variable():
    with pytest.raises(ParseError, match="z"):
        parse_system("(declare-fun x () Real)(assert (>= x 0))"
                     "(assert (<= x 1))(assert (= (* z z) 2))(check-sat)")


def test_parse_error_missing_bound_side():
    with pytest.raises(ParseError, match="above"):
        parse_system("(declare-fun x () Real)(assert (>= x 0))"
                     "(assert (= (* x x) 2))(check-sat)")
    with pytest.raises(ParseError, match="below"):
        parse_system("(declare-fun x () Real)(assert (<= x 4))"
                     "(assert (= (* x x) 2))(check-sat)")


def test_parse_explicit_infinite_bounds_accepted():
    s = parse_system("(declare-fun x () Real)(assert (>= x -inf))"
                     "(assert (<= x inf))(assert (= (* x x) 2))(check-sat)")
    assert s.box[0] == Interval(-math.inf, math.inf)


def test_parse_error_inf_outside_bound_position():
    with pytest.raises(ParseError, match="variable bound"):
        parse_system("(declare-fun x () Real)(assert (>= x 0))"
                     "(assert (<= x 1))(assert (= (+ x inf) 0))(check-sat)")


def test_parse_error_arity_and_unknown_symbol():
    head = "(declare-fun x () Real)(assert (>= x 0))(assert (<= x 1))"
    with pytest.raises(ParseError, match="one argument"):
        parse_system(head + "(assert (= (sqrt x x) 1))(check-sat)")
    with pytest.raises(ParseError, match="unknown"):
        parse_system(head + "(assert (= (frobnicate x) 1))(check-sat)")
    with pytest.raises(ParseError, match="integer"):
        parse_system(head + "(assert (= (^ x 2.5) 1))(check-sat)")
    with pytest.raises(ParseError, match="unmatched"):
        parse_system(head + "(assert (= x 1)))(check-sat)")


def test_parse_bound_folding_tightens_box():
    s = parse_system(
        "(declare-fun x () Real)"
        "(assert (and (<= 0 x) (<= x 10)))"
        "(assert (>= x 2))(assert (< x 7))"
        "(assert (= (sin x) 0.9))(check-sat)")
    assert s.box[0] == Interval(2.0, 7.0)
    assert len(s.atoms) == 1


def test_parse_decimal_bound_is_outward():
    s = parse_system("(declare-fun x () Real)(assert (>= x 0.1))"
                     "(assert (<= x 0.3))(assert (= (sin x) 0.2))(check-sat)")
    enc_lo = interval_of_rational(Fraction(1, 10))
    enc_hi = interval_of_rational(Fraction(3, 10))
    assert s.box[0].lo == enc_lo.lo and s.box[0].hi == enc_hi.hi
    assert s.box[0].lo <= 0.1 <= 0.1000000000000001
    assert float(Fraction(s.box[0].lo)) <= 0.1 and float(Fraction(s.box[0].hi)) >= 0.3


def test_parse_rational_and_hex_literals():
    s = parse_system("(declare-fun x () Real)(assert (>= x 1/4))"
                     "(assert (<= x 0x1.8p1))(assert (= (cos x) 1/3))(check-sat)")
    assert s.box[0] == Interval(0.25, 3.0)


def test_parse_not_and_distinct():
    head = "(declare-fun x () Real)(assert (>= x 0))(assert (<= x 1))"
    s = parse_system(head + "(assert (not (= (- x 0.5) 0)))(check-sat)")
    assert s.atoms[0].rel == "!="
    s2 = parse_system(head + "(assert (distinct (- x 0.5) 0))(check-sat)")
    assert s2.atoms[0].rel == "!="
    # negated inequality flips to the complementary strict relation
    s3 = parse_system(head + "(assert (not (<= (* x x) 0.25)))(check-sat)")
    assert s3.atoms[0].rel == ">"


def test_canonical_text_round_trip(example1, instance_dir):
    texts = [EXAMPLE1]
    for name in ("parabola-gap.smt2", "abs-triangle.smt2", "atan2-sector.smt2"):
        texts.append((instance_dir / name).read_text())
    for text in texts:
        s = parse_system(text)
        again = parse_system(s.canonical_text())
        assert again.var_names == s.var_names
        assert again.canonical_text() == s.canonical_text()
        assert again.sha256() == s.sha256()


# ---------------------------------------------------------------------------
# natural-extension evaluation


def test_eval_difference_with_square():
    # y - x^2 over x in [1.7,2], y in [1,2]: encloses [-3,-0.89], omits 0
    iv = _eval(T.sub(Y, T.sqr(X)), [(1.7, 2.0), (1.0, 2.0)])
    assert iv.lo <= -3.0 and iv.hi >= -0.89
    assert iv.hi < 0.0


def test_eval_sum_of_squares_unit_box():
    iv = _eval(T.add(T.sqr(X), T.sqr(Y)), [(0.0, 1.0), (0.0, 1.0)])
    assert -1e-12 <= iv.lo <= 0.0
    assert 2.0 <= iv.hi <= 2.0 + 1e-12


def test_eval_constant_is_exact_point():
    iv = _eval(T.const(5), [(-100.0, 100.0)])
    assert (iv.lo, iv.hi) == (5.0, 5.0)


def test_eval_shared_subterm_once():
    # x*x is recognized as a square and shared subterms are emitted once
    t = T.add(T.mul(X, X), T.mul(X, X))
    prog = T.compile_term(t, {"x": 0})
    assert sum(1 for op in prog.ops if op == T.OPS.SQR) == 1


def test_eval_domain_violation_is_empty():
    iv = _eval(T.sqrt_(X), [(-4.0, -1.0)])
    assert iv.is_empty
    iv2 = _eval(T.log_(X), [(-2.0, 0.0)])
    assert iv2.is_empty


# ---------------------------------------------------------------------------
# atom falsity certificates


def test_refutes_table():
    R = T.enclosure_refutes
    empty = Interval.empty()
    for rel in ("=", "!=", ">", ">=", "<", "<="):
        assert R(rel, empty)
    assert R("=", Interval(0.5, 1.0)) and R("=", Interval(-2.0, -0.25))
    assert not R("=", Interval(-1.0, 1.0)) and not R("=", Interval(0.0, 1.0))
    assert R("!=", Interval(0.0, 0.0))
    assert not R("!=", Interval(0.0, 1e-300)) and not R("!=", Interval(-1.0, 1.0))
    assert R(">", Interval(-2.0, 0.0)) and not R(">", Interval(-2.0, 0.1))
    assert R(">=", Interval(-2.0, -0.1)) and not R(">=", Interval(-2.0, 0.0))
    assert R("<", Interval(0.0, 2.0)) and not R("<", Interval(-0.1, 2.0))
    assert R("<=", Interval(0.1, 2.0)) and not R("<=", Interval(0.0, 2.0))


def test_atom_falsity_examples(example1):
    # (= y x^2) is certified false on x in [1.7,2], y in [1,2]
    term = T.sub(Y, T.sqr(X))
    iv = _eval(term, [(1.7, 2.0), (1.0, 2.0)])
    assert T.enclosure_refutes("=", iv)
    # (>= x 0) on [0,1] is satisfiable, not refutable
    iv2 = _eval(X, [(0.0, 1.0)])
    assert not T.enclosure_refutes(">=", iv2)
    # x^2 + 1 = 0 on [-1,1]: enclosure is [1,2] and excludes 0
    iv3 = _eval(T.add(T.sqr(X), T.const(1)), [(-1.0, 1.0)])
    assert 0.9 <= iv3.lo <= 1.0 and 2.0 <= iv3.hi <= 2.1
    assert T.enclosure_refutes("=", iv3)


def test_refutes_is_sound_on_samples():
    rng = random.Random(4242)
    checked = 0
    for idx in range(10):
        system = gen_unsat_system(idx)
        atoms = [T.compile_atom(a, system.var_index) for a in system.atoms]
        for _ in range(40):
            sub = sample_box(system.box, rng)
            for ca in atoms:
                iv = T.eval_on_box(ca.prog, sub)
                if not T.enclosure_refutes(ca.rel, iv):
                    continue
                checked += 1
                env_rng = random.Random(rng.random())
                for _ in range(60):
                    env = {n: env_rng.uniform(sub[i].lo, sub[i].hi)
                           for i, n in enumerate(system.var_names)}
                    v = mp_eval(ca.atom.term, env)
                    if v is None:
                        continue  # outside the domain falsifies trivially
                    assert not _mp_holds(ca.rel, v), (idx, ca.atom.text(), env)
    assert checked >= 25


def _mp_holds(rel, v):
    if rel == "=":
        return v == 0
    if rel == "!=":
        return v != 0
    if rel == ">":
        return v > 0
    if rel == ">=":
        return v >= 0
    if rel == "<":
        return v < 0
    return v <= 0


def test_neq_atoms_have_no_contraction_target():
    a = T.Atom(T.sub(X, T.const(1)), "!=")
    ca = T.compile_atom(a, {"x": 0})
    assert ca.target is None
    assert T._target_of("=") == (0.0, 0.0)
    assert T._target_of("<=") == (-math.inf, 0.0)
    assert T._target_of(">") == (0.0, math.inf)


def test_delta_consistency_weakening():
    D = T.enclosure_delta_consistent
    assert D("=", Interval(-0.001, 0.0005), 0.001)
    assert not D("=", Interval(-0.002, 0.0005), 0.001)
    assert D(">=", Interval(-0.001, 5.0), 0.001)
    assert not D(">=", Interval(-0.01, 5.0), 0.001)
    assert D("!=", Interval(0.0, 0.0), 0.001)  # weakens to a tautology
    assert not D("=", Interval.empty(), 0.001)


# ---------------------------------------------------------------------------
# symbolic derivatives


def test_derive_sum_of_squares():
    t = T.add(T.sqr(T.var("x1")), T.sqr(T.var("x2")))
    d = T.derive(t, "x1")
    assert T.free_vars(d) <= {"x1"}
    for v in (-3.0, -0.5, 0.0, 1.25, 7.0):
        iv = _eval(d, [(v, v)], names=("x1",))
        assert iv.contains(2 * v)
        assert iv.width < 1e-12


def test_derive_constant_is_zero():
    assert T.is_zero(T.derive(T.const(3.75), "x"))
    assert T.is_zero(T.derive(T.var("y"), "x"))
    assert T.is_one(T.derive(T.var("x"), "x"))


def test_derive_sin_product():
    t = T.sin_(T.mul(X, Y))
    d = T.derive(t, "x")
    rng = random.Random(99)
    for _ in range(100):
        env = {"x": rng.uniform(-3, 3), "y": rng.uniform(-3, 3)}
        got = mp_eval(d, env)
        want = mpmath.cos(mpmath.mpf(env["x"]) * env["y"]) * env["y"]
        assert abs(got - want) <= 1e-25 * max(1, abs(want))


SMOOTH_TERMS = [
    (T.add(T.mul(X, Y), T.sin_(X)), (-2.0, 2.0), (-2.0, 2.0)),
    (T.mul(T.exp_(T.div(X, T.const(3))), T.atan_(Y)), (-2.0, 2.0), (-2.0, 2.0)),
    (T.mul(T.sqrt_(T.add(T.sqr(X), T.const(1))), T.log_(T.add(T.sqr(Y), T.const(2)))),
     (-2.0, 2.0), (-2.0, 2.0)),
    (T.div(T.sin_(X), T.add(T.sqr(Y), T.const(1))), (-2.0, 2.0), (-2.0, 2.0)),
    (T.add(T.tan_(T.div(X, T.const(4))), T.asin_(T.div(Y, T.const(5)))),
     (-2.0, 2.0), (-2.0, 2.0)),
    (T.atan2_(Y, T.add(X, T.const(4))), (-2.0, 2.0), (-2.0, 2.0)),
    (T.powi(T.add(X, T.mul(T.const(0.5), Y)), 3), (-2.0, 2.0), (-2.0, 2.0)),
    (T.acos_(T.div(X, T.const(4))), (-2.0, 2.0), (-2.0, 2.0)),
]


@pytest.mark.parametrize("case", range(len(SMOOTH_TERMS)))
def test_derive_matches_central_differences(case):
    t, xr, yr = SMOOTH_TERMS[case]
    rng = random.Random(1700 + case)
    for wrt in sorted(T.free_vars(t)):
        d = T.derive(t, wrt)
        hits = 0
        while hits < 100:
            env = {"x": rng.uniform(*xr), "y": rng.uniform(*yr)}
            scale = max(1.0, abs(env[wrt]))
            h = mpmath.mpf(1e-6) * scale
            up = dict(env)
            dn = dict(env)
            up[wrt] = mpmath.mpf(env[wrt]) + h
            dn[wrt] = mpmath.mpf(env[wrt]) - h
            fu, fd, g = mp_eval(t, up), mp_eval(t, dn), mp_eval(d, env)
            if fu is None or fd is None or g is None:
                continue
            hits += 1
            fdiff = (fu - fd) / (2 * h)
            assert abs(fdiff - g) <= 1e-6 * max(1.0, abs(g)), (case, wrt, env)


def test_derive_kinks_refuse_by_default():
    with pytest.raises(T.NonDifferentiableError):
        T.derive(T.abs_(X), "x")
    with pytest.raises(T.NonDifferentiableError):
        T.derive(T.min_(X, Y), "x")
    with pytest.raises(T.NonDifferentiableError):
        T.derive(T.max_(T.sqr(X), Y), "y")


def test_derive_kinks_envelope_option():
    # d|x|/dx over a kink-straddling box must cover every subgradient
    d = T.derive(T.abs_(X), "x", subdifferentials=True)
    iv = _eval(d, [(-1.0, 2.0)])
    assert iv.lo <= -1.0 and iv.hi >= 1.0
    # away from the kink the slope is exact
    iv_pos = _eval(d, [(0.5, 2.0)])
    assert iv_pos.lo == iv_pos.hi == 1.0
    # min picks the branch that is currently smaller
    dmin = T.derive(T.min_(X, T.mul(T.const(3), X)), "x", subdifferentials=True)
    iv_neg = _eval(dmin, [(-2.0, -1.0)])  # 3x is smaller there, slope 3
    assert iv_neg.contains(3.0) and not iv_neg.contains(1.0)
    # envelopes themselves cannot be differentiated again
    with pytest.raises(T.NonDifferentiableError):
        T.derive(d, "x")


# ---------------------------------------------------------------------------
# range soundness of the natural extension


def test_range_soundness_sampled(instance_dir):
    rng = random.Random(31337)
    names = ["parabola-gap.smt2", "harmonic-gap.smt2", "wave-ceiling.smt2",
             "arc-sum.smt2", "law-of-cosines.smt2"]
    for name in names:
        system = parse_system((instance_dir / name).read_text())
        atoms = [T.compile_atom(a, system.var_index) for a in system.atoms]
        for _ in range(200):
            env = {n: rng.uniform(system.box[i].lo, system.box[i].hi)
                   for i, n in enumerate(system.var_names)}
            pt = Box.from_bounds([(env[n], env[n]) for n in system.var_names])
            for ca in atoms:
                iv = T.eval_on_box(ca.prog, pt)
                v = mp_eval(ca.atom.term, env)
                if v is None:
                    continue
                assert iv.lo <= v <= iv.hi, (name, ca.atom.text(), env)
