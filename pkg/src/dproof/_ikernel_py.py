"""Pure-Python interval kernel.

Closed binary64 intervals as (lo, hi) float pairs, empty = (inf, -inf),
never NaN.  Rational ops (+ - * / sqrt, integer powers) round outward only
when the round-to-nearest result is inexact, decided by an exact error term
(two-sum / Dekker two-product / quotient residual), so exact endpoint
arithmetic stays exact.  Transcendental ops round to nearest and widen each
endpoint by 2 ULPs, except at anchor points where libm is exact (exp 0,
log 1, sin 0, ...).

The compiled twin in _ikernel_c.pyx mirrors this module function for
function and must stay bit-identical; magnitude guards below are part of
that contract (both backends take the widen-unconditionally path under
exactly the same conditions).
"""

from __future__ import annotations

import math
import sys

INF = math.inf
DBL_MAX = sys.float_info.max

# Outside (TINY, BIG) the error-term algebra can under/overflow; widen
# unconditionally there.  Same literals in the compiled twin.
TINY = 1e-280
BIG = 1e290
SPLITTER = 134217729.0  # 2**27 + 1

PI_LO = math.pi                          # largest double below pi
PI_HI = math.nextafter(math.pi, INF)     # smallest double above pi
TWO_PI_LO = 2.0 * math.pi
HALF_PI_LO = math.pi / 2.0
HALF_PI_HI = PI_HI / 2.0

from dproof._opcodes import (
    ABS, ACOS, ADD, ASIN, ATAN, ATAN2, CHMAX, CHMIN, CONST, COS, DIV, EXP,
    LOG, MAX, MIN, MUL, NEG, POWI, SGN, SIN, SQR, SQRT, SUB, TAN, VAR,
)

BACKEND = "pure"


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _dn(x: float) -> float:
    return math.nextafter(x, -INF)


def _up2(x: float) -> float:
    return math.nextafter(math.nextafter(x, INF), INF)


def _dn2(x: float) -> float:
    return math.nextafter(math.nextafter(x, -INF), -INF)


def _z(x: float) -> float:
    # -0.0 -> +0.0 so serialized endpoints and atan2 branch picks are canonical
    return x + 0.0


# ---------------------------------------------------------------------------
# directed scalar arithmetic


def _two_prod_err(a: float, b: float, p: float) -> float:
    # Dekker split; exact error of a*b under the TINY/BIG guards
    ca = SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    return ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add_rd(a: float, b: float) -> float:
    s = a + b
    if s == INF:
        # finite + finite overflowed past the halfway threshold above DBL_MAX
        return DBL_MAX if (a != INF and b != INF) else INF
    if s == -INF:
        return -INF
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _dn(s) if err < 0.0 else s


def add_ru(a: float, b: float) -> float:
    s = a + b
    if s == -INF:
        return -DBL_MAX if (a != -INF and b != -INF) else -INF
    if s == INF:
        return INF
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _up(s) if err > 0.0 else s


def sub_rd(a: float, b: float) -> float:
    return add_rd(a, -b)


def sub_ru(a: float, b: float) -> float:
    return add_ru(a, -b)


def mul_rd(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if p == INF:
        return DBL_MAX if (abs(a) != INF and abs(b) != INF) else INF
    if p == -INF:
        return -INF
    aa = abs(a)
    ab = abs(b)
    ap = abs(p)
    if not (TINY < aa < BIG and TINY < ab < BIG and TINY < ap < BIG):
        return _dn(p)
    e = _two_prod_err(a, b, p)
    return _dn(p) if e < 0.0 else p


def mul_ru(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if p == -INF:
        return -DBL_MAX if (abs(a) != INF and abs(b) != INF) else -INF
    if p == INF:
        return INF
    aa = abs(a)
    ab = abs(b)
    ap = abs(p)
    if not (TINY < aa < BIG and TINY < ab < BIG and TINY < ap < BIG):
        return _up(p)
    e = _two_prod_err(a, b, p)
    return _up(p) if e > 0.0 else p


def div_rd(a: float, b: float) -> float:
    # b != 0; infinite b only arrives as a sharp limit endpoint
    if a == 0.0:
        return 0.0
    q = a / b
    if q == INF:
        return DBL_MAX if abs(a) != INF else INF
    if q == -INF:
        return -INF
    if abs(a) == INF or abs(b) == INF:
        return _z(q)
    aq = abs(q)
    if not (TINY < abs(a) < BIG and TINY < abs(b) < BIG and TINY < aq < BIG):
        return _dn(q)
    p = q * b
    e = _two_prod_err(q, b, p)
    d = a - p
    r = d - e
    if r == 0.0:
        return q
    # residual (a - q*b) and b share sign  <=>  true quotient above q
    if (r > 0.0) == (b > 0.0):
        return q
    return _dn(q)


def div_ru(a: float, b: float) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    if q == -INF:
        return -DBL_MAX if abs(a) != INF else -INF
    if q == INF:
        return INF
    if abs(a) == INF or abs(b) == INF:
        return _z(q)
    aq = abs(q)
    if not (TINY < abs(a) < BIG and TINY < abs(b) < BIG and TINY < aq < BIG):
        return _up(q)
    p = q * b
    e = _two_prod_err(q, b, p)
    d = a - p
    r = d - e
    if r == 0.0:
        return q
    if (r > 0.0) == (b > 0.0):
        return _up(q)
    return q


def sqrt_rd(x: float) -> float:
    if x == 0.0 or x == INF:
        return x
    s = math.sqrt(x)
    if x < TINY:
        return _dn(s)
    p = s * s
    e = _two_prod_err(s, s, p)
    if p > x or (p == x and e > 0.0):
        return _dn(s)
    return s


def sqrt_ru(x: float) -> float:
    if x == 0.0 or x == INF:
        return x
    s = math.sqrt(x)
    if x < TINY:
        return _up(s)
    p = s * s
    e = _two_prod_err(s, s, p)
    if p < x or (p == x and e < 0.0):
        return _up(s)
    return s


def pow_rd(x: float, n: int) -> float:
    # x >= 0, n >= 1; round-down chains are monotone on nonnegatives
    r = x
    for _ in range(n - 1):
        r = mul_rd(r, x)
    return r


def pow_ru(x: float, n: int) -> float:
    r = x
    for _ in range(n - 1):
        r = mul_ru(r, x)
    return r


# ---------------------------------------------------------------------------
# interval ops; every function tolerates empty inputs and never emits NaN

EMPTY = (INF, -INF)


def iadd(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    return (_z(add_rd(al, bl)), _z(add_ru(ah, bh)))


def isub(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    return (_z(add_rd(al, -bh)), _z(add_ru(ah, -bl)))


def ineg(al, ah):
    if al > ah:
        return EMPTY
    return (_z(-ah), _z(-al))


def imul(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    if al >= 0.0:
        if bl >= 0.0:
            return (_z(mul_rd(al, bl)), _z(mul_ru(ah, bh)))
        if bh <= 0.0:
            return (_z(mul_rd(ah, bl)), _z(mul_ru(al, bh)))
        return (_z(mul_rd(ah, bl)), _z(mul_ru(ah, bh)))
    if ah <= 0.0:
        if bl >= 0.0:
            return (_z(mul_rd(al, bh)), _z(mul_ru(ah, bl)))
        if bh <= 0.0:
            return (_z(mul_rd(ah, bh)), _z(mul_ru(al, bl)))
        return (_z(mul_rd(al, bh)), _z(mul_ru(al, bl)))
    if bl >= 0.0:
        return (_z(mul_rd(al, bh)), _z(mul_ru(ah, bh)))
    if bh <= 0.0:
        return (_z(mul_rd(ah, bl)), _z(mul_ru(al, bl)))
    lo1 = mul_rd(al, bh)
    lo2 = mul_rd(ah, bl)
    hi1 = mul_ru(al, bl)
    hi2 = mul_ru(ah, bh)
    return (_z(lo1 if lo1 < lo2 else lo2), _z(hi1 if hi1 > hi2 else hi2))


def _div_pos(al, ah, bl, bh):
    # 0 <= bl <= bh, bh > 0
    if al >= 0.0:
        lo = div_rd(al, bh)
        hi = INF if bl == 0.0 else div_ru(ah, bl)
    elif ah <= 0.0:
        lo = -INF if bl == 0.0 else div_rd(al, bl)
        hi = div_ru(ah, bh)
    else:
        lo = -INF if bl == 0.0 else div_rd(al, bl)
        hi = INF if bl == 0.0 else div_ru(ah, bl)
    return (_z(lo), _z(hi))


def idiv(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    if bl == 0.0 and bh == 0.0:
        return EMPTY            # no defined quotients at all
    if bl < 0.0 < bh:
        return (-INF, INF)      # single-interval convention, no unions
    if bl >= 0.0:
        return _div_pos(al, ah, bl, bh)
    return _div_pos(-ah, -al, -bh, -bl)


def _sq_rd(x: float) -> float:
    # x >= 0
    return mul_rd(x, x)


def _sq_ru(x: float) -> float:
    return mul_ru(x, x)


def isqr(al, ah):
    if al > ah:
        return EMPTY
    if al >= 0.0:
        return (_z(_sq_rd(al)), _z(_sq_ru(ah)))
    if ah <= 0.0:
        return (_z(_sq_rd(-ah)), _z(_sq_ru(-al)))
    m = -al if -al > ah else ah
    return (0.0, _z(_sq_ru(m)))


def ipowi(al, ah, n: int):
    if al > ah:
        return EMPTY
    if n == 0:
        return (1.0, 1.0)       # 0**0 = 1 convention
    if n == 1:
        return (al, ah)
    if n < 0:
        rl, rh = ipowi(al, ah, -n)
        return idiv(1.0, 1.0, rl, rh)
    if n % 2 == 0:
        if al >= 0.0:
            return (_z(pow_rd(al, n)), _z(pow_ru(ah, n)))
        if ah <= 0.0:
            return (_z(pow_rd(-ah, n)), _z(pow_ru(-al, n)))
        m = -al if -al > ah else ah
        return (0.0, _z(pow_ru(m, n)))
    lo = -pow_ru(-al, n) if al < 0.0 else pow_rd(al, n)
    hi = -pow_rd(-ah, n) if ah < 0.0 else pow_ru(ah, n)
    return (_z(lo), _z(hi))


def isqrt(al, ah):
    if al > ah or ah < 0.0:
        return EMPTY
    a = al if al > 0.0 else 0.0
    return (_z(sqrt_rd(a)), _z(sqrt_ru(ah)))


def _exp_raw(x: float) -> float:
    # C exp() semantics: overflow returns inf instead of raising
    try:
        return math.exp(x)
    except OverflowError:
        return INF


def iexp(al, ah):
    if al > ah:
        return EMPTY
    if al == -INF:
        lo = 0.0
    elif al == 0.0:
        lo = 1.0
    else:
        e = _exp_raw(al)
        lo = DBL_MAX if e == INF else _dn2(e)
        if lo < 0.0:
            lo = 0.0
    if ah == INF:
        hi = INF
    elif ah == 0.0:
        hi = 1.0
    else:
        e = _exp_raw(ah)
        hi = INF if e == INF else _up2(e)
    return (_z(lo), _z(hi))


def ilog(al, ah):
    if al > ah or ah <= 0.0:
        return EMPTY
    a = al if al > 0.0 else 0.0
    if a == 0.0:
        lo = -INF
    elif a == 1.0:
        lo = 0.0
    else:
        lo = _dn2(math.log(a))
    if ah == INF:
        hi = INF
    elif ah == 1.0:
        hi = 0.0
    else:
        hi = _up2(math.log(ah))
    return (_z(lo), _z(hi))


def _hits_half_pi(a: float, b: float, residue: int) -> bool:
    # conservatively: may [a,b] contain (4k + residue) * pi/2 for integer k?
    k = math.floor(a / TWO_PI_LO) - 1.0
    k1 = math.floor(b / TWO_PI_LO) + 1.0
    while k <= k1:
        m = 4.0 * k + residue
        if m >= 0.0:
            e_lo = mul_rd(m, HALF_PI_LO)
            e_hi = mul_ru(m, HALF_PI_HI)
        else:
            e_lo = mul_rd(m, HALF_PI_HI)
            e_hi = mul_ru(m, HALF_PI_LO)
        if e_lo <= b and e_hi >= a:
            return True
        k += 1.0
    return False


def _sin_up(x: float) -> float:
    return 0.0 if x == 0.0 else _up2(math.sin(x))


def _sin_dn(x: float) -> float:
    return 0.0 if x == 0.0 else _dn2(math.sin(x))


def isin(al, ah):
    if al > ah:
        return EMPTY
    if al == -INF or ah == INF or not (ah - al < TWO_PI_LO):
        return (-1.0, 1.0)
    if abs(al) > 1e15 or abs(ah) > 1e15:
        return (-1.0, 1.0)
    if _hits_half_pi(al, ah, 1):
        hi = 1.0
    else:
        hi = _sin_up(al)
        h2 = _sin_up(ah)
        if h2 > hi:
            hi = h2
        if hi > 1.0:
            hi = 1.0
    if _hits_half_pi(al, ah, 3):
        lo = -1.0
    else:
        lo = _sin_dn(al)
        l2 = _sin_dn(ah)
        if l2 < lo:
            lo = l2
        if lo < -1.0:
            lo = -1.0
    return (_z(lo), _z(hi))


def _cos_up(x: float) -> float:
    return 1.0 if x == 0.0 else _up2(math.cos(x))


def _cos_dn(x: float) -> float:
    return 1.0 if x == 0.0 else _dn2(math.cos(x))


def icos(al, ah):
    if al > ah:
        return EMPTY
    if al == -INF or ah == INF or not (ah - al < TWO_PI_LO):
        return (-1.0, 1.0)
    if abs(al) > 1e15 or abs(ah) > 1e15:
        return (-1.0, 1.0)
    if _hits_half_pi(al, ah, 0):
        hi = 1.0
    else:
        hi = _cos_up(al)
        h2 = _cos_up(ah)
        if h2 > hi:
            hi = h2
        if hi > 1.0:
            hi = 1.0
    if _hits_half_pi(al, ah, 2):
        lo = -1.0
    else:
        lo = _cos_dn(al)
        l2 = _cos_dn(ah)
        if l2 < lo:
            lo = l2
        if lo < -1.0:
            lo = -1.0
    return (_z(lo), _z(hi))


def itan(al, ah):
    if al > ah:
        return EMPTY
    if al == -INF or ah == INF or not (ah - al < PI_LO):
        return (-INF, INF)
    if abs(al) > 1e15 or abs(ah) > 1e15:
        return (-INF, INF)
    # poles sit at odd multiples of pi/2
    if _hits_half_pi(al, ah, 1) or _hits_half_pi(al, ah, 3):
        return (-INF, INF)
    lo = 0.0 if al == 0.0 else _dn2(math.tan(al))
    hi = 0.0 if ah == 0.0 else _up2(math.tan(ah))
    return (_z(lo), _z(hi))


def iasin(al, ah):
    if al > ah or ah < -1.0 or al > 1.0:
        return EMPTY
    a = al if al > -1.0 else -1.0
    b = ah if ah < 1.0 else 1.0
    lo = 0.0 if a == 0.0 else _dn2(math.asin(a))
    hi = 0.0 if b == 0.0 else _up2(math.asin(b))
    return (_z(lo), _z(hi))


def iacos(al, ah):
    if al > ah or ah < -1.0 or al > 1.0:
        return EMPTY
    a = al if al > -1.0 else -1.0
    b = ah if ah < 1.0 else 1.0
    lo = 0.0 if b == 1.0 else _dn2(math.acos(b))
    if lo < 0.0:
        lo = 0.0
    hi = 0.0 if a == 1.0 else _up2(math.acos(a))
    return (_z(lo), _z(hi))


def iatan(al, ah):
    if al > ah:
        return EMPTY
    if al == -INF:
        lo = -HALF_PI_HI
    elif al == 0.0:
        lo = 0.0
    else:
        lo = _dn2(math.atan(al))
    if ah == INF:
        hi = HALF_PI_HI
    elif ah == 0.0:
        hi = 0.0
    else:
        hi = _up2(math.atan(ah))
    return (_z(lo), _z(hi))


def _at2_dn(y: float, x: float) -> float:
    if y == 0.0 and x > 0.0:
        return 0.0
    return _dn2(math.atan2(y, x))


def _at2_up(y: float, x: float) -> float:
    if y == 0.0 and x > 0.0:
        return 0.0
    return _up2(math.atan2(y, x))


def iatan2(yl, yh, xl, xh):
    if yl > yh or xl > xh:
        return EMPTY
    if yl < 0.0 < yh and xl < 0.0:
        # box straddles the branch cut along the negative x axis
        return (-PI_HI, PI_HI)
    lo = _at2_dn(yl, xl)
    for y, x in ((yl, xh), (yh, xl), (yh, xh)):
        v = _at2_dn(y, x)
        if v < lo:
            lo = v
    hi = _at2_up(yl, xl)
    for y, x in ((yl, xh), (yh, xl), (yh, xh)):
        v = _at2_up(y, x)
        if v > hi:
            hi = v
    if lo < -PI_HI:
        lo = -PI_HI
    if hi > PI_HI:
        hi = PI_HI
    return (_z(lo), _z(hi))


def imin(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    return (al if al < bl else bl, ah if ah < bh else bh)


def imax(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    return (al if al > bl else bl, ah if ah > bh else bh)


def iabs(al, ah):
    if al > ah:
        return EMPTY
    if al >= 0.0:
        return (al, ah)
    if ah <= 0.0:
        return (_z(-ah), _z(-al))
    m = -al if -al > ah else ah
    return (0.0, m)


def isgn(al, ah):
    if al > ah:
        return EMPTY
    if ah < 0.0:
        return (-1.0, -1.0)
    if al > 0.0:
        return (1.0, 1.0)
    return (-1.0, 1.0)


def ichmin(al, ah, bl, bh):
    # envelope of "left argument is the active min"
    if al > ah or bl > bh:
        return EMPTY
    if ah < bl:
        return (1.0, 1.0)
    if al > bh:
        return (0.0, 0.0)
    return (0.0, 1.0)


def ichmax(al, ah, bl, bh):
    if al > ah or bl > bh:
        return EMPTY
    if al > bh:
        return (1.0, 1.0)
    if ah < bl:
        return (0.0, 0.0)
    return (0.0, 1.0)


def iintersect(al, ah, bl, bh):
    lo = al if al > bl else bl
    hi = ah if ah < bh else bh
    if lo > hi:
        return EMPTY
    return (lo, hi)


def ihull(al, ah, bl, bh):
    if al > ah:
        return (bl, bh)
    if bl > bh:
        return (al, ah)
    return (al if al < bl else bl, ah if ah > bh else bh)


# ---------------------------------------------------------------------------
# compiled-term evaluation


def _apply1(op: int, al: float, ah: float):
    if op == NEG:
        return ineg(al, ah)
    if op == SQR:
        return isqr(al, ah)
    if op == SQRT:
        return isqrt(al, ah)
    if op == EXP:
        return iexp(al, ah)
    if op == LOG:
        return ilog(al, ah)
    if op == SIN:
        return isin(al, ah)
    if op == COS:
        return icos(al, ah)
    if op == TAN:
        return itan(al, ah)
    if op == ASIN:
        return iasin(al, ah)
    if op == ACOS:
        return iacos(al, ah)
    if op == ATAN:
        return iatan(al, ah)
    if op == ABS:
        return iabs(al, ah)
    if op == SGN:
        return isgn(al, ah)
    raise ValueError(f"bad unary opcode {op}")


def _apply2(op: int, al: float, ah: float, bl: float, bh: float):
    if op == ADD:
        return iadd(al, ah, bl, bh)
    if op == SUB:
        return isub(al, ah, bl, bh)
    if op == MUL:
        return imul(al, ah, bl, bh)
    if op == DIV:
        return idiv(al, ah, bl, bh)
    if op == ATAN2:
        return iatan2(al, ah, bl, bh)
    if op == MIN:
        return imin(al, ah, bl, bh)
    if op == MAX:
        return imax(al, ah, bl, bh)
    if op == CHMIN:
        return ichmin(al, ah, bl, bh)
    if op == CHMAX:
        return ichmax(al, ah, bl, bh)
    raise ValueError(f"bad binary opcode {op}")


def eval_nodes(ops, aa, bb, clo, chi, blo, bhi, nlo, nhi) -> None:
    """Forward pass: fill per-node enclosures for a postorder program."""
    n = len(ops)
    i = 0
    while i < n:
        op = ops[i]
        if op == VAR:
            v = aa[i]
            lo = blo[v]
            hi = bhi[v]
        elif op == CONST:
            c = aa[i]
            lo = clo[c]
            hi = chi[c]
        elif op == POWI:
            j = aa[i]
            lo, hi = ipowi(nlo[j], nhi[j], bb[i])
        elif op in (ADD, SUB, MUL, DIV, ATAN2, MIN, MAX, CHMIN, CHMAX):
            j = aa[i]
            k = bb[i]
            lo, hi = _apply2(op, nlo[j], nhi[j], nlo[k], nhi[k])
        else:
            j = aa[i]
            lo, hi = _apply1(op, nlo[j], nhi[j])
        nlo[i] = lo
        nhi[i] = hi
        i += 1


def eval_root(ops, aa, bb, clo, chi, blo, bhi):
    n = len(ops)
    nlo = [0.0] * n
    nhi = [0.0] * n
    eval_nodes(ops, aa, bb, clo, chi, blo, bhi, nlo, nhi)
    return (nlo[n - 1], nhi[n - 1])


def _iroot(al: float, ah: float, n: int):
    # sound enclosure of the n-th root of the nonnegative part, n >= 2
    if al > ah or ah < 0.0:
        return EMPTY
    a = al if al > 0.0 else 0.0
    ll, lh = ilog(a, ah)
    dl, dh = idiv(ll, lh, float(n), float(n))
    rl, rh = iexp(dl, dh)
    if a == 0.0 and rl > 0.0:
        rl = 0.0
    return (rl, rh)


def hc4_revise(ops, aa, bb, clo, chi, tlo, thi, blo, bhi, out_lo, out_hi):
    """Forward-backward contraction of box w.r.t. (program value in target).

    Returns -1 and fills out arrays with the contracted per-variable
    domains (intersection over occurrences, subset of the input box) when
    the box stays feasible; otherwise returns the postorder index of the
    node whose domain emptied, proving the constraint has no solution in
    the box.
    """
    n = len(ops)
    dlo = [0.0] * n
    dhi = [0.0] * n
    eval_nodes(ops, aa, bb, clo, chi, blo, bhi, dlo, dhi)
    root = n - 1
    lo, hi = iintersect(dlo[root], dhi[root], tlo, thi)
    if lo > hi:
        return root
    dlo[root] = lo
    dhi[root] = hi

    i = root
    while i >= 0:
        op = ops[i]
        nl = dlo[i]
        nh = dhi[i]
        if op == VAR or op == CONST:
            i -= 1
            continue
        if op in (SIN, COS, TAN, ATAN2, SGN, CHMIN, CHMAX):
            i -= 1
            continue
        j = aa[i]
        al = dlo[j]
        ah = dhi[j]
        if op == ADD:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            rl, rh = isub(nl, nh, bl, bh)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            rl, rh = isub(nl, nh, al, ah)
            bl, bh = iintersect(bl, bh, rl, rh)
            if bl > bh:
                return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == SUB:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            rl, rh = iadd(nl, nh, bl, bh)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            rl, rh = isub(al, ah, nl, nh)
            bl, bh = iintersect(bl, bh, rl, rh)
            if bl > bh:
                return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == MUL:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            straddle_n = nl <= 0.0 <= nh
            if not (straddle_n and bl <= 0.0 <= bh):
                rl, rh = idiv(nl, nh, bl, bh)
                al, ah = iintersect(al, ah, rl, rh)
                if al > ah:
                    return j
            if not (straddle_n and al <= 0.0 <= ah):
                rl, rh = idiv(nl, nh, al, ah)
                bl, bh = iintersect(bl, bh, rl, rh)
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == DIV:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            rl, rh = imul(nl, nh, bl, bh)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            if not ((nl <= 0.0 <= nh) and (al <= 0.0 <= ah)):
                rl, rh = idiv(al, ah, nl, nh)
                bl, bh = iintersect(bl, bh, rl, rh)
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == NEG:
            rl, rh = ineg(nl, nh)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == SQR:
            sl, sh = isqrt(nl if nl > 0.0 else 0.0, nh)
            if sl > sh:
                return j
            if al >= 0.0:
                rl, rh = sl, sh
            elif ah <= 0.0:
                rl, rh = -sh, -sl
            else:
                rl, rh = -sh, sh
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == POWI:
            e = bb[i]
            if e == 1:
                al, ah = iintersect(al, ah, nl, nh)
                if al > ah:
                    return j
                dlo[j] = al
                dhi[j] = ah
            elif e >= 2:
                if e % 2 == 0:
                    sl, sh = _iroot(nl if nl > 0.0 else 0.0, nh, e)
                    if sl > sh:
                        return j
                    if al >= 0.0:
                        rl, rh = sl, sh
                    elif ah <= 0.0:
                        rl, rh = -sh, -sl
                    else:
                        rl, rh = -sh, sh
                else:
                    pl, ph = _iroot(nl, nh, e)
                    ql, qh = _iroot(-nh, -nl, e)
                    rl, rh = ihull(pl, ph, -qh, -ql)
                al, ah = iintersect(al, ah, rl, rh)
                if al > ah:
                    return j
                dlo[j] = al
                dhi[j] = ah
            # e == 0: node is [1,1], child unconstrained
            # e < 0: inverse powers give little and are rare; skip
        elif op == SQRT:
            rl, rh = isqr(nl if nl > 0.0 else 0.0, nh)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == EXP:
            rl, rh = ilog(nl if nl > 0.0 else 0.0, nh)
            if rl > rh:
                return j
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == LOG:
            rl, rh = iexp(nl, nh)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == ASIN:
            cl = nl if nl > -HALF_PI_HI else -HALF_PI_HI
            ch = nh if nh < HALF_PI_HI else HALF_PI_HI
            if cl > ch:
                return j
            rl, rh = isin(cl, ch)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == ACOS:
            cl = nl if nl > 0.0 else 0.0
            ch = nh if nh < PI_HI else PI_HI
            if cl > ch:
                return j
            rl, rh = icos(cl, ch)
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == ATAN:
            cl = nl if nl > -HALF_PI_HI else -HALF_PI_HI
            ch = nh if nh < HALF_PI_HI else HALF_PI_HI
            if cl > ch:
                return j
            rl = -INF if cl <= -HALF_PI_LO else _dn2(math.tan(cl))
            rh = INF if ch >= HALF_PI_LO else _up2(math.tan(ch))
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == MIN:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            al0 = al
            bl0 = bl
            al, ah = iintersect(al, ah, nl, INF)
            if al > ah:
                return j
            bl, bh = iintersect(bl, bh, nl, INF)
            if bl > bh:
                return k
            if bl0 > nh:
                al, ah = iintersect(al, ah, nl, nh)
                if al > ah:
                    return j
            if al0 > nh:
                bl, bh = iintersect(bl, bh, nl, nh)
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == MAX:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            ah0 = ah
            bh0 = bh
            al, ah = iintersect(al, ah, -INF, nh)
            if al > ah:
                return j
            bl, bh = iintersect(bl, bh, -INF, nh)
            if bl > bh:
                return k
            if bh0 < nl:
                al, ah = iintersect(al, ah, nl, nh)
                if al > ah:
                    return j
            if ah0 < nl:
                bl, bh = iintersect(bl, bh, nl, nh)
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == ABS:
            cl = nl if nl > 0.0 else 0.0
            if cl > nh:
                return j
            if al >= 0.0:
                rl, rh = cl, nh
            elif ah <= 0.0:
                rl, rh = -nh, -cl
            else:
                rl, rh = -nh, nh
            al, ah = iintersect(al, ah, rl, rh)
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        i -= 1

    nv = len(blo)
    for v in range(nv):
        out_lo[v] = blo[v]
        out_hi[v] = bhi[v]
    i = 0
    while i < n:
        if ops[i] == VAR:
            v = aa[i]
            lo, hi = iintersect(out_lo[v], out_hi[v], dlo[i], dhi[i])
            if lo > hi:
                return i
            out_lo[v] = lo
            out_hi[v] = hi
        i += 1
    return -1
