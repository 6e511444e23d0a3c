"""Bit-level agreement between the pure-Python and compiled kernels.

The solver promises identical traces no matter which backend is active,
so every exported kernel function must agree bit for bit, including on
infinities, subnormals, and signed zeros.
"""

import math
import os
import random
import struct
import subprocess
import sys
import zlib
from array import array

import pytest

from dproof import _ikernel_py as P
from dproof.parser import parse_system

C = pytest.importorskip("dproof._ikernel_c", reason="compiled kernel not built")

INF = math.inf

SPECIALS = [
    0.0, -0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 1.5, -1.5,
    INF, -INF, 1.7976931348623157e308, -1.7976931348623157e308,
    5e-324, -5e-324, 2.2250738585072014e-308, -2.2250738585072014e-308,
    1e-280, -1e-280, 1e290, -1e290,
    math.pi, -math.pi, math.pi / 2, -math.pi / 2, 2 * math.pi,
    1e15, -1e15, 708.0, 709.9, 710.0, -745.0, -746.0,
    0.1, -0.1, 1 / 3, -1 / 3, 1e100, -1e100,
]

SCALAR_BIN = ["add_rd", "add_ru", "sub_rd", "sub_ru", "mul_rd", "mul_ru",
              "div_rd", "div_ru"]
UNARY_IV = ["ineg", "isqr", "isqrt", "iexp", "ilog", "isin", "icos",
            "itan", "iasin", "iacos", "iatan", "iabs", "isgn"]
BINARY_IV = ["iadd", "isub", "imul", "idiv", "iatan2", "imin", "imax",
             "ichmin", "ichmax", "iintersect", "ihull"]

N_RANDOM = 3000


def bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", x))[0]


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return bits(a) == bits(b)


def rand_float(rng):
    k = rng.randrange(6)
    if k == 0:
        return rng.choice(SPECIALS)
    if k == 1:
        return rng.uniform(-10, 10)
    if k == 2:
        return rng.uniform(-1e6, 1e6)
    if k == 3:
        # raw bit patterns, rerolled if they decode to a NaN
        while True:
            x = struct.unpack("<d", struct.pack("<Q", rng.getrandbits(64)))[0]
            if not math.isnan(x):
                return x
    if k == 4:
        return float(rng.randrange(-1000, 1000))
    return rng.uniform(-1e-300, 1e-300)


def ordered_pair(rng):
    a, b = rand_float(rng), rand_float(rng)
    return (b, a) if a > b else (a, b)


@pytest.mark.parametrize("name", SCALAR_BIN)
def test_scalar_directed_parity(name):
    fp, fc = getattr(P, name), getattr(C, name)
    skip_zero_b = name.startswith("div")
    for a in SPECIALS:
        for b in SPECIALS:
            if skip_zero_b and b == 0.0:
                continue
            assert same(fp(a, b), fc(a, b)), (name, a, b, fp(a, b), fc(a, b))
    rng = random.Random(zlib.crc32(name.encode()))
    for _ in range(N_RANDOM):
        a, b = rand_float(rng), rand_float(rng)
        if skip_zero_b and b == 0.0:
            continue
        assert same(fp(a, b), fc(a, b)), (name, a, b, fp(a, b), fc(a, b))


@pytest.mark.parametrize("name", ["sqrt_rd", "sqrt_ru"])
def test_scalar_sqrt_parity(name):
    fp, fc = getattr(P, name), getattr(C, name)
    rng = random.Random(7)
    for a in [s for s in SPECIALS if s >= 0.0] + [abs(rand_float(rng)) for _ in range(N_RANDOM)]:
        assert same(fp(a), fc(a)), (name, a, fp(a), fc(a))


@pytest.mark.parametrize("name", UNARY_IV)
def test_unary_interval_parity(name):
    fp, fc = getattr(P, name), getattr(C, name)
    for al in SPECIALS:
        for ah in SPECIALS:
            # unordered pairs are fed on purpose: both sides must agree
            # on the empty result too
            assert same(fp(al, ah), fc(al, ah)), (name, al, ah)
    rng = random.Random(zlib.crc32(name.encode()))
    for _ in range(N_RANDOM):
        al, ah = ordered_pair(rng)
        assert same(fp(al, ah), fc(al, ah)), (name, al, ah, fp(al, ah), fc(al, ah))


@pytest.mark.parametrize("name", BINARY_IV)
def test_binary_interval_parity(name):
    fp, fc = getattr(P, name), getattr(C, name)
    rng = random.Random(zlib.crc32(name.encode()))
    for _ in range(N_RANDOM):
        al, ah = ordered_pair(rng)
        bl, bh = ordered_pair(rng)
        assert same(fp(al, ah, bl, bh), fc(al, ah, bl, bh)), (name, al, ah, bl, bh)
    for _ in range(1500):
        al, ah = sorted((rng.choice(SPECIALS), rng.choice(SPECIALS)))
        bl, bh = sorted((rng.choice(SPECIALS), rng.choice(SPECIALS)))
        assert same(fp(al, ah, bl, bh), fc(al, ah, bl, bh)), (name, al, ah, bl, bh)


@pytest.mark.parametrize("n", [-5, -3, -2, -1, 0, 1, 2, 3, 4, 5, 7, 10, 17])
def test_ipowi_parity(n):
    rng = random.Random(1000 + n)
    for _ in range(1500):
        al, ah = ordered_pair(rng)
        assert same(P.ipowi(al, ah, n), C.ipowi(al, ah, n)), (al, ah, n)


PARITY_SYSTEMS = [
    """(declare-fun x () Real)(declare-fun y () Real)
    (assert (>= x -2))(assert (<= x 2))(assert (>= y -2))(assert (<= y 2))
    (assert (= (+ (* x x) (* y y)) 4))(assert (= y (+ (* x x) 1.5)))
    (assert (<= (+ x y) -2.6))(check-sat)""",
    """(declare-fun x () Real)(declare-fun y () Real)(declare-fun z () Real)
    (assert (>= x 0.1))(assert (<= x 3))(assert (>= y -3))(assert (<= y 3))
    (assert (>= z -3))(assert (<= z 3))
    (assert (= z (* (sin x) (exp (- y 1)))))
    (assert (= (sqrt x) (+ z 2)))(assert (<= (* x (log x)) (pow y 3)))
    (check-sat)""",
    """(declare-fun a () Real)(declare-fun b () Real)
    (assert (>= a -10))(assert (<= a 10))(assert (>= b -10))(assert (<= b 10))
    (assert (= (atan2 a b) (/ b 4)))(assert (>= (min a b) (max (- a) (- b))))
    (assert (= (abs (- a b)) (+ (cos a) 2)))(check-sat)""",
]


def test_program_eval_and_revise_parity():
    rng = random.Random(20260819)
    for text in PARITY_SYSTEMS:
        system = parse_system(text)
        nv = len(system.var_names)
        atoms = system.compile()
        for _ in range(400):
            blo = array("d", [0.0] * nv)
            bhi = array("d", [0.0] * nv)
            for v in range(nv):
                a, b = sorted((rng.uniform(-12, 12), rng.uniform(-12, 12)))
                blo[v], bhi[v] = a, b
            for ca in atoms:
                p = ca.prog
                n = len(p.ops)
                args = (p.ops, p.aa, p.bb, p.clo, p.chi, blo, bhi)
                assert same(P.eval_root(*args), C.eval_root(*args))
                buf = [array("d", [0.0] * n) for _ in range(4)]
                P.eval_nodes(*args, buf[0], buf[1])
                C.eval_nodes(*args, buf[2], buf[3])
                assert buf[0].tobytes() == buf[2].tobytes()
                assert buf[1].tobytes() == buf[3].tobytes()
                if ca.target is not None:
                    out = [array("d", [0.0] * nv) for _ in range(4)]
                    sp = P.hc4_revise(p.ops, p.aa, p.bb, p.clo, p.chi,
                                      ca.target[0], ca.target[1],
                                      blo, bhi, out[0], out[1])
                    sc = C.hc4_revise(p.ops, p.aa, p.bb, p.clo, p.chi,
                                      ca.target[0], ca.target[1],
                                      blo, bhi, out[2], out[3])
                    assert sp == sc
                    if sp == -1:
                        assert out[0].tobytes() == out[2].tobytes()
                        assert out[1].tobytes() == out[3].tobytes()


def test_solver_trace_identical_across_backends(tmp_path):
    driver = tmp_path / "driver.py"
    driver.write_text(
        "import sys\n"
        "from dproof.parser import parse_system\n"
        "from dproof.solver import solve\n"
        "from dproof.tracefile import write_trace_text\n"
        "texts = %r\n"
        "for t in texts:\n"
        "    s = parse_system(t)\n"
        "    r = solve(s)\n"
        "    sys.stdout.write('== ' + r.status + '\\n')\n"
        "    if r.status == 'unsat':\n"
        "        sys.stdout.write(write_trace_text(s, r.trace))\n"
        "    elif r.status == 'delta-sat':\n"
        "        sys.stdout.write(repr([(iv.lo, iv.hi) for iv in r.witness.ivs]) + '\\n')\n"
        % (PARITY_SYSTEMS,)
    )
    outs = {}
    for which in ("pure", "c"):
        env = dict(os.environ, DPROOF_KERNEL=which)
        env["PYTHONPATH"] = os.pathsep.join(sys.path)
        run = subprocess.run([sys.executable, str(driver)], capture_output=True,
                             text=True, env=env)
        assert run.returncode == 0, run.stderr
        outs[which] = run.stdout
    assert outs["pure"] == outs["c"]
