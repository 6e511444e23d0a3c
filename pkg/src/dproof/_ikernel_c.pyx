# cython: language_level=3, boundscheck=False, wraparound=False
# cython: initializedcheck=False, cdivision=True
"""Compiled interval kernel.

Mirrors dproof._ikernel_py function for function and must stay
bit-identical to it; the parity test suite enforces that.  The one
permitted divergence in *implementation* is the product error term:
this module uses fused multiply-add, which under the shared TINY/BIG
magnitude guards returns exactly the Dekker-split error the pure
backend computes (the classical TwoProd exactness argument).  Compile
with contraction off (-ffp-contract=off) so no other expression is
silently fused.
"""

from libc.math cimport (INFINITY, acos, asin, atan, atan2, cos, exp, fabs,
                        floor, fma, log, nextafter, sin, sqrt, tan)
from libc.stdlib cimport free, malloc

from dproof import _opcodes as _op

BACKEND = "c"

cdef double INF = INFINITY
cdef double DBL_MAX = nextafter(INFINITY, 0.0)

cdef double TINY = 1e-280
cdef double BIG = 1e290

cdef double PI_LO_C = 3.141592653589793   # largest double below pi
cdef double PI_HI_C = nextafter(PI_LO_C, INFINITY)
cdef double TWO_PI_LO = 2.0 * PI_LO_C
cdef double HALF_PI_LO_C = PI_LO_C / 2.0
cdef double HALF_PI_HI_C = PI_HI_C / 2.0

PI_LO = PI_LO_C
PI_HI = PI_HI_C
HALF_PI_LO = HALF_PI_LO_C
HALF_PI_HI = HALF_PI_HI_C

EMPTY = (INF, -INF)


cdef enum:
    OP_VAR = 0
    OP_CONST = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_DIV = 5
    OP_NEG = 6
    OP_SQR = 7
    OP_POWI = 8
    OP_SQRT = 9
    OP_EXP = 10
    OP_LOG = 11
    OP_SIN = 12
    OP_COS = 13
    OP_TAN = 14
    OP_ASIN = 15
    OP_ACOS = 16
    OP_ATAN = 17
    OP_ATAN2 = 18
    OP_MIN = 19
    OP_MAX = 20
    OP_ABS = 21
    OP_SGN = 22
    OP_CHMIN = 23
    OP_CHMAX = 24

assert (_op.VAR, _op.CONST, _op.ADD, _op.SUB, _op.MUL, _op.DIV, _op.NEG,
        _op.SQR, _op.POWI, _op.SQRT, _op.EXP, _op.LOG, _op.SIN, _op.COS,
        _op.TAN, _op.ASIN, _op.ACOS, _op.ATAN, _op.ATAN2, _op.MIN, _op.MAX,
        _op.ABS, _op.SGN, _op.CHMIN, _op.CHMAX) == tuple(range(25))


cdef struct IV:
    double lo
    double hi

cdef IV EMPTY_IV = IV(INFINITY, -INFINITY)


cdef inline double _up(double x) noexcept nogil:
    return nextafter(x, INF)


cdef inline double _dn(double x) noexcept nogil:
    return nextafter(x, -INF)


cdef inline double _up2(double x) noexcept nogil:
    return nextafter(nextafter(x, INF), INF)


cdef inline double _dn2(double x) noexcept nogil:
    return nextafter(nextafter(x, -INF), -INF)


cdef inline double _z(double x) noexcept nogil:
    return x + 0.0


# ---------------------------------------------------------------------------
# directed scalar arithmetic


cdef inline double _prod_err(double a, double b, double p) noexcept nogil:
    # exact under the TINY/BIG guards; equals the Dekker-split error
    return fma(a, b, -p)


cdef double c_add_rd(double a, double b) noexcept nogil:
    cdef double s = a + b
    cdef double bb, err
    if s == INF:
        return DBL_MAX if (a != INF and b != INF) else INF
    if s == -INF:
        return -INF
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _dn(s) if err < 0.0 else s


cdef double c_add_ru(double a, double b) noexcept nogil:
    cdef double s = a + b
    cdef double bb, err
    if s == -INF:
        return -DBL_MAX if (a != -INF and b != -INF) else -INF
    if s == INF:
        return INF
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _up(s) if err > 0.0 else s


cdef double c_mul_rd(double a, double b) noexcept nogil:
    cdef double p, aa, ab, ap, e
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if p == INF:
        return DBL_MAX if (fabs(a) != INF and fabs(b) != INF) else INF
    if p == -INF:
        return -INF
    aa = fabs(a)
    ab = fabs(b)
    ap = fabs(p)
    if not (TINY < aa < BIG and TINY < ab < BIG and TINY < ap < BIG):
        return _dn(p)
    e = _prod_err(a, b, p)
    return _dn(p) if e < 0.0 else p


cdef double c_mul_ru(double a, double b) noexcept nogil:
    cdef double p, aa, ab, ap, e
    if a == 0.0 or b == 0.0:
        return 0.0
    p = a * b
    if p == -INF:
        return -DBL_MAX if (fabs(a) != INF and fabs(b) != INF) else -INF
    if p == INF:
        return INF
    aa = fabs(a)
    ab = fabs(b)
    ap = fabs(p)
    if not (TINY < aa < BIG and TINY < ab < BIG and TINY < ap < BIG):
        return _up(p)
    e = _prod_err(a, b, p)
    return _up(p) if e > 0.0 else p


cdef double c_div_rd(double a, double b) noexcept nogil:
    cdef double q, aq, p, e, d, r
    if a == 0.0:
        return 0.0
    q = a / b
    if q == INF:
        return DBL_MAX if fabs(a) != INF else INF
    if q == -INF:
        return -INF
    if fabs(a) == INF or fabs(b) == INF:
        return _z(q)
    aq = fabs(q)
    if not (TINY < fabs(a) < BIG and TINY < fabs(b) < BIG and TINY < aq < BIG):
        return _dn(q)
    p = q * b
    e = _prod_err(q, b, p)
    d = a - p
    r = d - e
    if r == 0.0:
        return q
    if (r > 0.0) == (b > 0.0):
        return q
    return _dn(q)


cdef double c_div_ru(double a, double b) noexcept nogil:
    cdef double q, aq, p, e, d, r
    if a == 0.0:
        return 0.0
    q = a / b
    if q == -INF:
        return -DBL_MAX if fabs(a) != INF else -INF
    if q == INF:
        return INF
    if fabs(a) == INF or fabs(b) == INF:
        return _z(q)
    aq = fabs(q)
    if not (TINY < fabs(a) < BIG and TINY < fabs(b) < BIG and TINY < aq < BIG):
        return _up(q)
    p = q * b
    e = _prod_err(q, b, p)
    d = a - p
    r = d - e
    if r == 0.0:
        return q
    if (r > 0.0) == (b > 0.0):
        return _up(q)
    return q


cdef double c_sqrt_rd(double x) noexcept nogil:
    cdef double s, p, e
    if x == 0.0 or x == INF:
        return x
    s = sqrt(x)
    if x < TINY:
        return _dn(s)
    p = s * s
    e = _prod_err(s, s, p)
    if p > x or (p == x and e > 0.0):
        return _dn(s)
    return s


cdef double c_sqrt_ru(double x) noexcept nogil:
    cdef double s, p, e
    if x == 0.0 or x == INF:
        return x
    s = sqrt(x)
    if x < TINY:
        return _up(s)
    p = s * s
    e = _prod_err(s, s, p)
    if p < x or (p == x and e < 0.0):
        return _up(s)
    return s


cdef double c_pow_rd(double x, long long n) noexcept nogil:
    cdef double r = x
    cdef long long k
    for k in range(n - 1):
        r = c_mul_rd(r, x)
    return r


cdef double c_pow_ru(double x, long long n) noexcept nogil:
    cdef double r = x
    cdef long long k
    for k in range(n - 1):
        r = c_mul_ru(r, x)
    return r


def add_rd(double a, double b):
    return c_add_rd(a, b)


def add_ru(double a, double b):
    return c_add_ru(a, b)


def sub_rd(double a, double b):
    return c_add_rd(a, -b)


def sub_ru(double a, double b):
    return c_add_ru(a, -b)


def mul_rd(double a, double b):
    return c_mul_rd(a, b)


def mul_ru(double a, double b):
    return c_mul_ru(a, b)


def div_rd(double a, double b):
    return c_div_rd(a, b)


def div_ru(double a, double b):
    return c_div_ru(a, b)


def sqrt_rd(double x):
    return c_sqrt_rd(x)


def sqrt_ru(double x):
    return c_sqrt_ru(x)


def pow_rd(double x, long long n):
    return c_pow_rd(x, n)


def pow_ru(double x, long long n):
    return c_pow_ru(x, n)


# ---------------------------------------------------------------------------
# interval ops


cdef IV c_iadd(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    return IV(_z(c_add_rd(al, bl)), _z(c_add_ru(ah, bh)))


cdef IV c_isub(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    return IV(_z(c_add_rd(al, -bh)), _z(c_add_ru(ah, -bl)))


cdef IV c_ineg(double al, double ah) noexcept nogil:
    if al > ah:
        return EMPTY_IV
    return IV(_z(-ah), _z(-al))


cdef IV c_imul(double al, double ah, double bl, double bh) noexcept nogil:
    cdef double lo1, lo2, hi1, hi2
    if al > ah or bl > bh:
        return EMPTY_IV
    if al >= 0.0:
        if bl >= 0.0:
            return IV(_z(c_mul_rd(al, bl)), _z(c_mul_ru(ah, bh)))
        if bh <= 0.0:
            return IV(_z(c_mul_rd(ah, bl)), _z(c_mul_ru(al, bh)))
        return IV(_z(c_mul_rd(ah, bl)), _z(c_mul_ru(ah, bh)))
    if ah <= 0.0:
        if bl >= 0.0:
            return IV(_z(c_mul_rd(al, bh)), _z(c_mul_ru(ah, bl)))
        if bh <= 0.0:
            return IV(_z(c_mul_rd(ah, bh)), _z(c_mul_ru(al, bl)))
        return IV(_z(c_mul_rd(al, bh)), _z(c_mul_ru(al, bl)))
    if bl >= 0.0:
        return IV(_z(c_mul_rd(al, bh)), _z(c_mul_ru(ah, bh)))
    if bh <= 0.0:
        return IV(_z(c_mul_rd(ah, bl)), _z(c_mul_ru(al, bl)))
    lo1 = c_mul_rd(al, bh)
    lo2 = c_mul_rd(ah, bl)
    hi1 = c_mul_ru(al, bl)
    hi2 = c_mul_ru(ah, bh)
    return IV(_z(lo1 if lo1 < lo2 else lo2), _z(hi1 if hi1 > hi2 else hi2))


cdef IV c_div_pos(double al, double ah, double bl, double bh) noexcept nogil:
    cdef double lo, hi
    if al >= 0.0:
        lo = c_div_rd(al, bh)
        hi = INF if bl == 0.0 else c_div_ru(ah, bl)
    elif ah <= 0.0:
        lo = -INF if bl == 0.0 else c_div_rd(al, bl)
        hi = c_div_ru(ah, bh)
    else:
        lo = -INF if bl == 0.0 else c_div_rd(al, bl)
        hi = INF if bl == 0.0 else c_div_ru(ah, bl)
    return IV(_z(lo), _z(hi))


cdef IV c_idiv(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    if bl == 0.0 and bh == 0.0:
        return EMPTY_IV
    if bl < 0.0 < bh:
        return IV(-INF, INF)
    if bl >= 0.0:
        return c_div_pos(al, ah, bl, bh)
    return c_div_pos(-ah, -al, -bh, -bl)


cdef inline double c_sq_rd(double x) noexcept nogil:
    return c_mul_rd(x, x)


cdef inline double c_sq_ru(double x) noexcept nogil:
    return c_mul_ru(x, x)


cdef IV c_isqr(double al, double ah) noexcept nogil:
    cdef double m
    if al > ah:
        return EMPTY_IV
    if al >= 0.0:
        return IV(_z(c_sq_rd(al)), _z(c_sq_ru(ah)))
    if ah <= 0.0:
        return IV(_z(c_sq_rd(-ah)), _z(c_sq_ru(-al)))
    m = -al if -al > ah else ah
    return IV(0.0, _z(c_sq_ru(m)))


cdef IV c_ipowi(double al, double ah, long long n) noexcept nogil:
    cdef IV r
    cdef double lo, hi, m
    if al > ah:
        return EMPTY_IV
    if n == 0:
        return IV(1.0, 1.0)
    if n == 1:
        return IV(al, ah)
    if n < 0:
        r = c_ipowi(al, ah, -n)
        return c_idiv(1.0, 1.0, r.lo, r.hi)
    if n % 2 == 0:
        if al >= 0.0:
            return IV(_z(c_pow_rd(al, n)), _z(c_pow_ru(ah, n)))
        if ah <= 0.0:
            return IV(_z(c_pow_rd(-ah, n)), _z(c_pow_ru(-al, n)))
        m = -al if -al > ah else ah
        return IV(0.0, _z(c_pow_ru(m, n)))
    lo = -c_pow_ru(-al, n) if al < 0.0 else c_pow_rd(al, n)
    hi = -c_pow_rd(-ah, n) if ah < 0.0 else c_pow_ru(ah, n)
    return IV(_z(lo), _z(hi))


cdef IV c_isqrt(double al, double ah) noexcept nogil:
    cdef double a
    if al > ah or ah < 0.0:
        return EMPTY_IV
    a = al if al > 0.0 else 0.0
    return IV(_z(c_sqrt_rd(a)), _z(c_sqrt_ru(ah)))


cdef IV c_iexp(double al, double ah) noexcept nogil:
    cdef double lo, hi, e
    if al > ah:
        return EMPTY_IV
    if al == -INF:
        lo = 0.0
    elif al == 0.0:
        lo = 1.0
    else:
        e = exp(al)
        lo = DBL_MAX if e == INF else _dn2(e)
        if lo < 0.0:
            lo = 0.0
    if ah == INF:
        hi = INF
    elif ah == 0.0:
        hi = 1.0
    else:
        e = exp(ah)
        hi = INF if e == INF else _up2(e)
    return IV(_z(lo), _z(hi))


cdef IV c_ilog(double al, double ah) noexcept nogil:
    cdef double a, lo, hi
    if al > ah or ah <= 0.0:
        return EMPTY_IV
    a = al if al > 0.0 else 0.0
    if a == 0.0:
        lo = -INF
    elif a == 1.0:
        lo = 0.0
    else:
        lo = _dn2(log(a))
    if ah == INF:
        hi = INF
    elif ah == 1.0:
        hi = 0.0
    else:
        hi = _up2(log(ah))
    return IV(_z(lo), _z(hi))


cdef bint c_hits_half_pi(double a, double b, int residue) noexcept nogil:
    cdef double k = floor(a / TWO_PI_LO) - 1.0
    cdef double k1 = floor(b / TWO_PI_LO) + 1.0
    cdef double m, e_lo, e_hi
    while k <= k1:
        m = 4.0 * k + residue
        if m >= 0.0:
            e_lo = c_mul_rd(m, HALF_PI_LO_C)
            e_hi = c_mul_ru(m, HALF_PI_HI_C)
        else:
            e_lo = c_mul_rd(m, HALF_PI_HI_C)
            e_hi = c_mul_ru(m, HALF_PI_LO_C)
        if e_lo <= b and e_hi >= a:
            return True
        k += 1.0
    return False


cdef inline double c_sin_up(double x) noexcept nogil:
    return 0.0 if x == 0.0 else _up2(sin(x))


cdef inline double c_sin_dn(double x) noexcept nogil:
    return 0.0 if x == 0.0 else _dn2(sin(x))


cdef IV c_isin(double al, double ah) noexcept nogil:
    cdef double lo, hi, h2, l2
    if al > ah:
        return EMPTY_IV
    if al == -INF or ah == INF or not (ah - al < TWO_PI_LO):
        return IV(-1.0, 1.0)
    if fabs(al) > 1e15 or fabs(ah) > 1e15:
        return IV(-1.0, 1.0)
    if c_hits_half_pi(al, ah, 1):
        hi = 1.0
    else:
        hi = c_sin_up(al)
        h2 = c_sin_up(ah)
        if h2 > hi:
            hi = h2
        if hi > 1.0:
            hi = 1.0
    if c_hits_half_pi(al, ah, 3):
        lo = -1.0
    else:
        lo = c_sin_dn(al)
        l2 = c_sin_dn(ah)
        if l2 < lo:
            lo = l2
        if lo < -1.0:
            lo = -1.0
    return IV(_z(lo), _z(hi))


cdef inline double c_cos_up(double x) noexcept nogil:
    return 1.0 if x == 0.0 else _up2(cos(x))


cdef inline double c_cos_dn(double x) noexcept nogil:
    return 1.0 if x == 0.0 else _dn2(cos(x))


cdef IV c_icos(double al, double ah) noexcept nogil:
    cdef double lo, hi, h2, l2
    if al > ah:
        return EMPTY_IV
    if al == -INF or ah == INF or not (ah - al < TWO_PI_LO):
        return IV(-1.0, 1.0)
    if fabs(al) > 1e15 or fabs(ah) > 1e15:
        return IV(-1.0, 1.0)
    if c_hits_half_pi(al, ah, 0):
        hi = 1.0
    else:
        hi = c_cos_up(al)
        h2 = c_cos_up(ah)
        if h2 > hi:
            hi = h2
        if hi > 1.0:
            hi = 1.0
    if c_hits_half_pi(al, ah, 2):
        lo = -1.0
    else:
        lo = c_cos_dn(al)
        l2 = c_cos_dn(ah)
        if l2 < lo:
            lo = l2
        if lo < -1.0:
            lo = -1.0
    return IV(_z(lo), _z(hi))


cdef IV c_itan(double al, double ah) noexcept nogil:
    cdef double lo, hi
    if al > ah:
        return EMPTY_IV
    if al == -INF or ah == INF or not (ah - al < PI_LO_C):
        return IV(-INF, INF)
    if fabs(al) > 1e15 or fabs(ah) > 1e15:
        return IV(-INF, INF)
    if c_hits_half_pi(al, ah, 1) or c_hits_half_pi(al, ah, 3):
        return IV(-INF, INF)
    lo = 0.0 if al == 0.0 else _dn2(tan(al))
    hi = 0.0 if ah == 0.0 else _up2(tan(ah))
    return IV(_z(lo), _z(hi))


cdef IV c_iasin(double al, double ah) noexcept nogil:
    cdef double a, b, lo, hi
    if al > ah or ah < -1.0 or al > 1.0:
        return EMPTY_IV
    a = al if al > -1.0 else -1.0
    b = ah if ah < 1.0 else 1.0
    lo = 0.0 if a == 0.0 else _dn2(asin(a))
    hi = 0.0 if b == 0.0 else _up2(asin(b))
    return IV(_z(lo), _z(hi))


cdef IV c_iacos(double al, double ah) noexcept nogil:
    cdef double a, b, lo, hi
    if al > ah or ah < -1.0 or al > 1.0:
        return EMPTY_IV
    a = al if al > -1.0 else -1.0
    b = ah if ah < 1.0 else 1.0
    lo = 0.0 if b == 1.0 else _dn2(acos(b))
    if lo < 0.0:
        lo = 0.0
    hi = 0.0 if a == 1.0 else _up2(acos(a))
    return IV(_z(lo), _z(hi))


cdef IV c_iatan(double al, double ah) noexcept nogil:
    cdef double lo, hi
    if al > ah:
        return EMPTY_IV
    if al == -INF:
        lo = -HALF_PI_HI_C
    elif al == 0.0:
        lo = 0.0
    else:
        lo = _dn2(atan(al))
    if ah == INF:
        hi = HALF_PI_HI_C
    elif ah == 0.0:
        hi = 0.0
    else:
        hi = _up2(atan(ah))
    return IV(_z(lo), _z(hi))


cdef inline double c_at2_dn(double y, double x) noexcept nogil:
    if y == 0.0 and x > 0.0:
        return 0.0
    return _dn2(atan2(y, x))


cdef inline double c_at2_up(double y, double x) noexcept nogil:
    if y == 0.0 and x > 0.0:
        return 0.0
    return _up2(atan2(y, x))


cdef IV c_iatan2(double yl, double yh, double xl, double xh) noexcept nogil:
    cdef double lo, hi, v
    if yl > yh or xl > xh:
        return EMPTY_IV
    if yl < 0.0 < yh and xl < 0.0:
        return IV(-PI_HI_C, PI_HI_C)
    lo = c_at2_dn(yl, xl)
    v = c_at2_dn(yl, xh)
    if v < lo:
        lo = v
    v = c_at2_dn(yh, xl)
    if v < lo:
        lo = v
    v = c_at2_dn(yh, xh)
    if v < lo:
        lo = v
    hi = c_at2_up(yl, xl)
    v = c_at2_up(yl, xh)
    if v > hi:
        hi = v
    v = c_at2_up(yh, xl)
    if v > hi:
        hi = v
    v = c_at2_up(yh, xh)
    if v > hi:
        hi = v
    if lo < -PI_HI_C:
        lo = -PI_HI_C
    if hi > PI_HI_C:
        hi = PI_HI_C
    return IV(_z(lo), _z(hi))


cdef IV c_imin(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    return IV(al if al < bl else bl, ah if ah < bh else bh)


cdef IV c_imax(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    return IV(al if al > bl else bl, ah if ah > bh else bh)


cdef IV c_iabs(double al, double ah) noexcept nogil:
    cdef double m
    if al > ah:
        return EMPTY_IV
    if al >= 0.0:
        return IV(al, ah)
    if ah <= 0.0:
        return IV(_z(-ah), _z(-al))
    m = -al if -al > ah else ah
    return IV(0.0, m)


cdef IV c_isgn(double al, double ah) noexcept nogil:
    if al > ah:
        return EMPTY_IV
    if ah < 0.0:
        return IV(-1.0, -1.0)
    if al > 0.0:
        return IV(1.0, 1.0)
    return IV(-1.0, 1.0)


cdef IV c_ichmin(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    if ah < bl:
        return IV(1.0, 1.0)
    if al > bh:
        return IV(0.0, 0.0)
    return IV(0.0, 1.0)


cdef IV c_ichmax(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah or bl > bh:
        return EMPTY_IV
    if al > bh:
        return IV(1.0, 1.0)
    if ah < bl:
        return IV(0.0, 0.0)
    return IV(0.0, 1.0)


cdef IV c_iintersect(double al, double ah, double bl, double bh) noexcept nogil:
    cdef double lo = al if al > bl else bl
    cdef double hi = ah if ah < bh else bh
    if lo > hi:
        return EMPTY_IV
    return IV(lo, hi)


cdef IV c_ihull(double al, double ah, double bl, double bh) noexcept nogil:
    if al > ah:
        return IV(bl, bh)
    if bl > bh:
        return IV(al, ah)
    return IV(al if al < bl else bl, ah if ah > bh else bh)


def iadd(double al, double ah, double bl, double bh):
    cdef IV r = c_iadd(al, ah, bl, bh)
    return (r.lo, r.hi)


def isub(double al, double ah, double bl, double bh):
    cdef IV r = c_isub(al, ah, bl, bh)
    return (r.lo, r.hi)


def ineg(double al, double ah):
    cdef IV r = c_ineg(al, ah)
    return (r.lo, r.hi)


def imul(double al, double ah, double bl, double bh):
    cdef IV r = c_imul(al, ah, bl, bh)
    return (r.lo, r.hi)


def idiv(double al, double ah, double bl, double bh):
    cdef IV r = c_idiv(al, ah, bl, bh)
    return (r.lo, r.hi)


def isqr(double al, double ah):
    cdef IV r = c_isqr(al, ah)
    return (r.lo, r.hi)


def ipowi(double al, double ah, long long n):
    cdef IV r = c_ipowi(al, ah, n)
    return (r.lo, r.hi)


def isqrt(double al, double ah):
    cdef IV r = c_isqrt(al, ah)
    return (r.lo, r.hi)


def iexp(double al, double ah):
    cdef IV r = c_iexp(al, ah)
    return (r.lo, r.hi)


def ilog(double al, double ah):
    cdef IV r = c_ilog(al, ah)
    return (r.lo, r.hi)


def isin(double al, double ah):
    cdef IV r = c_isin(al, ah)
    return (r.lo, r.hi)


def icos(double al, double ah):
    cdef IV r = c_icos(al, ah)
    return (r.lo, r.hi)


def itan(double al, double ah):
    cdef IV r = c_itan(al, ah)
    return (r.lo, r.hi)


def iasin(double al, double ah):
    cdef IV r = c_iasin(al, ah)
    return (r.lo, r.hi)


def iacos(double al, double ah):
    cdef IV r = c_iacos(al, ah)
    return (r.lo, r.hi)


def iatan(double al, double ah):
    cdef IV r = c_iatan(al, ah)
    return (r.lo, r.hi)


def iatan2(double yl, double yh, double xl, double xh):
    cdef IV r = c_iatan2(yl, yh, xl, xh)
    return (r.lo, r.hi)


def imin(double al, double ah, double bl, double bh):
    cdef IV r = c_imin(al, ah, bl, bh)
    return (r.lo, r.hi)


def imax(double al, double ah, double bl, double bh):
    cdef IV r = c_imax(al, ah, bl, bh)
    return (r.lo, r.hi)


def iabs(double al, double ah):
    cdef IV r = c_iabs(al, ah)
    return (r.lo, r.hi)


def isgn(double al, double ah):
    cdef IV r = c_isgn(al, ah)
    return (r.lo, r.hi)


def ichmin(double al, double ah, double bl, double bh):
    cdef IV r = c_ichmin(al, ah, bl, bh)
    return (r.lo, r.hi)


def ichmax(double al, double ah, double bl, double bh):
    cdef IV r = c_ichmax(al, ah, bl, bh)
    return (r.lo, r.hi)


def iintersect(double al, double ah, double bl, double bh):
    cdef IV r = c_iintersect(al, ah, bl, bh)
    return (r.lo, r.hi)


def ihull(double al, double ah, double bl, double bh):
    cdef IV r = c_ihull(al, ah, bl, bh)
    return (r.lo, r.hi)


# ---------------------------------------------------------------------------
# compiled-term evaluation


cdef IV c_apply1(long long op, double al, double ah) noexcept nogil:
    if op == OP_NEG:
        return c_ineg(al, ah)
    if op == OP_SQR:
        return c_isqr(al, ah)
    if op == OP_SQRT:
        return c_isqrt(al, ah)
    if op == OP_EXP:
        return c_iexp(al, ah)
    if op == OP_LOG:
        return c_ilog(al, ah)
    if op == OP_SIN:
        return c_isin(al, ah)
    if op == OP_COS:
        return c_icos(al, ah)
    if op == OP_TAN:
        return c_itan(al, ah)
    if op == OP_ASIN:
        return c_iasin(al, ah)
    if op == OP_ACOS:
        return c_iacos(al, ah)
    if op == OP_ATAN:
        return c_iatan(al, ah)
    if op == OP_ABS:
        return c_iabs(al, ah)
    # OP_SGN; the compiler never emits other unary codes
    return c_isgn(al, ah)


cdef IV c_apply2(long long op, double al, double ah,
                 double bl, double bh) noexcept nogil:
    if op == OP_ADD:
        return c_iadd(al, ah, bl, bh)
    if op == OP_SUB:
        return c_isub(al, ah, bl, bh)
    if op == OP_MUL:
        return c_imul(al, ah, bl, bh)
    if op == OP_DIV:
        return c_idiv(al, ah, bl, bh)
    if op == OP_ATAN2:
        return c_iatan2(al, ah, bl, bh)
    if op == OP_MIN:
        return c_imin(al, ah, bl, bh)
    if op == OP_MAX:
        return c_imax(al, ah, bl, bh)
    if op == OP_CHMIN:
        return c_ichmin(al, ah, bl, bh)
    # OP_CHMAX
    return c_ichmax(al, ah, bl, bh)


cdef void c_eval_nodes(Py_ssize_t n, const long long* ops,
                       const long long* aa, const long long* bb,
                       const double* clo, const double* chi,
                       const double* blo, const double* bhi,
                       double* nlo, double* nhi) noexcept nogil:
    cdef Py_ssize_t i
    cdef long long op, j, k
    cdef IV r
    for i in range(n):
        op = ops[i]
        if op == OP_VAR:
            j = aa[i]
            nlo[i] = blo[j]
            nhi[i] = bhi[j]
            continue
        if op == OP_CONST:
            j = aa[i]
            nlo[i] = clo[j]
            nhi[i] = chi[j]
            continue
        if op == OP_POWI:
            j = aa[i]
            r = c_ipowi(nlo[j], nhi[j], bb[i])
        elif (op == OP_ADD or op == OP_SUB or op == OP_MUL or op == OP_DIV
              or op == OP_ATAN2 or op == OP_MIN or op == OP_MAX
              or op == OP_CHMIN or op == OP_CHMAX):
            j = aa[i]
            k = bb[i]
            r = c_apply2(op, nlo[j], nhi[j], nlo[k], nhi[k])
        else:
            j = aa[i]
            r = c_apply1(op, nlo[j], nhi[j])
        nlo[i] = r.lo
        nhi[i] = r.hi


def eval_nodes(const long long[::1] ops, const long long[::1] aa,
               const long long[::1] bb, const double[::1] clo,
               const double[::1] chi, const double[::1] blo,
               const double[::1] bhi, double[::1] nlo, double[::1] nhi):
    """Forward pass: fill per-node enclosures for a postorder program."""
    cdef Py_ssize_t n = ops.shape[0]
    if n == 0:
        return
    c_eval_nodes(n, &ops[0], &aa[0], &bb[0],
                 &clo[0] if clo.shape[0] else NULL,
                 &chi[0] if chi.shape[0] else NULL,
                 &blo[0] if blo.shape[0] else NULL,
                 &bhi[0] if bhi.shape[0] else NULL,
                 &nlo[0], &nhi[0])


def eval_root(const long long[::1] ops, const long long[::1] aa,
              const long long[::1] bb, const double[::1] clo,
              const double[::1] chi, const double[::1] blo,
              const double[::1] bhi):
    cdef Py_ssize_t n = ops.shape[0]
    if n == 0:
        return (0.0, 0.0)
    cdef double* nlo = <double*> malloc(n * sizeof(double))
    cdef double* nhi = <double*> malloc(n * sizeof(double))
    if nlo == NULL or nhi == NULL:
        free(nlo)
        free(nhi)
        raise MemoryError
    try:
        c_eval_nodes(n, &ops[0], &aa[0], &bb[0],
                     &clo[0] if clo.shape[0] else NULL,
                     &chi[0] if chi.shape[0] else NULL,
                     &blo[0] if blo.shape[0] else NULL,
                     &bhi[0] if bhi.shape[0] else NULL,
                     nlo, nhi)
        return (nlo[n - 1], nhi[n - 1])
    finally:
        free(nlo)
        free(nhi)


cdef IV c_iroot(double al, double ah, long long n) noexcept nogil:
    cdef double a
    cdef IV l, d, r
    if al > ah or ah < 0.0:
        return EMPTY_IV
    a = al if al > 0.0 else 0.0
    l = c_ilog(a, ah)
    d = c_idiv(l.lo, l.hi, <double> n, <double> n)
    r = c_iexp(d.lo, d.hi)
    if a == 0.0 and r.lo > 0.0:
        r.lo = 0.0
    return r


cdef Py_ssize_t c_hc4_revise(Py_ssize_t n, const long long* ops,
                             const long long* aa, const long long* bb,
                             const double* clo, const double* chi,
                             double tlo, double thi,
                             const double* blo, const double* bhi,
                             Py_ssize_t nv, double* out_lo, double* out_hi,
                             double* dlo, double* dhi) noexcept nogil:
    cdef Py_ssize_t i, root, v
    cdef long long op, j, k, e
    cdef double nl, nh, al, ah, bl, bh, al0, bl0, ah0, bh0
    cdef double rl, rh, sl, sh, cl, ch, pl, ph, ql, qh
    cdef bint straddle_n
    cdef IV r, s, p, q

    c_eval_nodes(n, ops, aa, bb, clo, chi, blo, bhi, dlo, dhi)
    root = n - 1
    r = c_iintersect(dlo[root], dhi[root], tlo, thi)
    if r.lo > r.hi:
        return root
    dlo[root] = r.lo
    dhi[root] = r.hi

    i = root
    while i >= 0:
        op = ops[i]
        nl = dlo[i]
        nh = dhi[i]
        if op == OP_VAR or op == OP_CONST:
            i -= 1
            continue
        if (op == OP_SIN or op == OP_COS or op == OP_TAN or op == OP_ATAN2
                or op == OP_SGN or op == OP_CHMIN or op == OP_CHMAX):
            i -= 1
            continue
        j = aa[i]
        al = dlo[j]
        ah = dhi[j]
        if op == OP_ADD:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            r = c_isub(nl, nh, bl, bh)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            r = c_isub(nl, nh, al, ah)
            s = c_iintersect(bl, bh, r.lo, r.hi)
            bl = s.lo
            bh = s.hi
            if bl > bh:
                return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == OP_SUB:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            r = c_iadd(nl, nh, bl, bh)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            r = c_isub(al, ah, nl, nh)
            s = c_iintersect(bl, bh, r.lo, r.hi)
            bl = s.lo
            bh = s.hi
            if bl > bh:
                return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == OP_MUL:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            straddle_n = nl <= 0.0 <= nh
            if not (straddle_n and bl <= 0.0 <= bh):
                r = c_idiv(nl, nh, bl, bh)
                s = c_iintersect(al, ah, r.lo, r.hi)
                al = s.lo
                ah = s.hi
                if al > ah:
                    return j
            if not (straddle_n and al <= 0.0 <= ah):
                r = c_idiv(nl, nh, al, ah)
                s = c_iintersect(bl, bh, r.lo, r.hi)
                bl = s.lo
                bh = s.hi
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == OP_DIV:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            r = c_imul(nl, nh, bl, bh)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            if not ((nl <= 0.0 <= nh) and (al <= 0.0 <= ah)):
                r = c_idiv(al, ah, nl, nh)
                s = c_iintersect(bl, bh, r.lo, r.hi)
                bl = s.lo
                bh = s.hi
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == OP_NEG:
            r = c_ineg(nl, nh)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_SQR:
            s = c_isqrt(nl if nl > 0.0 else 0.0, nh)
            sl = s.lo
            sh = s.hi
            if sl > sh:
                return j
            if al >= 0.0:
                rl = sl
                rh = sh
            elif ah <= 0.0:
                rl = -sh
                rh = -sl
            else:
                rl = -sh
                rh = sh
            s = c_iintersect(al, ah, rl, rh)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_POWI:
            e = bb[i]
            if e == 1:
                s = c_iintersect(al, ah, nl, nh)
                al = s.lo
                ah = s.hi
                if al > ah:
                    return j
                dlo[j] = al
                dhi[j] = ah
            elif e >= 2:
                if e % 2 == 0:
                    s = c_iroot(nl if nl > 0.0 else 0.0, nh, e)
                    sl = s.lo
                    sh = s.hi
                    if sl > sh:
                        return j
                    if al >= 0.0:
                        rl = sl
                        rh = sh
                    elif ah <= 0.0:
                        rl = -sh
                        rh = -sl
                    else:
                        rl = -sh
                        rh = sh
                else:
                    p = c_iroot(nl, nh, e)
                    pl = p.lo
                    ph = p.hi
                    q = c_iroot(-nh, -nl, e)
                    ql = q.lo
                    qh = q.hi
                    r = c_ihull(pl, ph, -qh, -ql)
                    rl = r.lo
                    rh = r.hi
                s = c_iintersect(al, ah, rl, rh)
                al = s.lo
                ah = s.hi
                if al > ah:
                    return j
                dlo[j] = al
                dhi[j] = ah
            # e == 0: node is [1,1], child unconstrained
            # e < 0: inverse powers give little and are rare; skip
        elif op == OP_SQRT:
            r = c_isqr(nl if nl > 0.0 else 0.0, nh)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_EXP:
            r = c_ilog(nl if nl > 0.0 else 0.0, nh)
            if r.lo > r.hi:
                return j
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_LOG:
            r = c_iexp(nl, nh)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_ASIN:
            cl = nl if nl > -HALF_PI_HI_C else -HALF_PI_HI_C
            ch = nh if nh < HALF_PI_HI_C else HALF_PI_HI_C
            if cl > ch:
                return j
            r = c_isin(cl, ch)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_ACOS:
            cl = nl if nl > 0.0 else 0.0
            ch = nh if nh < PI_HI_C else PI_HI_C
            if cl > ch:
                return j
            r = c_icos(cl, ch)
            s = c_iintersect(al, ah, r.lo, r.hi)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_ATAN:
            cl = nl if nl > -HALF_PI_HI_C else -HALF_PI_HI_C
            ch = nh if nh < HALF_PI_HI_C else HALF_PI_HI_C
            if cl > ch:
                return j
            rl = -INF if cl <= -HALF_PI_LO_C else _dn2(tan(cl))
            rh = INF if ch >= HALF_PI_LO_C else _up2(tan(ch))
            s = c_iintersect(al, ah, rl, rh)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        elif op == OP_MIN:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            al0 = al
            bl0 = bl
            s = c_iintersect(al, ah, nl, INF)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            s = c_iintersect(bl, bh, nl, INF)
            bl = s.lo
            bh = s.hi
            if bl > bh:
                return k
            if bl0 > nh:
                s = c_iintersect(al, ah, nl, nh)
                al = s.lo
                ah = s.hi
                if al > ah:
                    return j
            if al0 > nh:
                s = c_iintersect(bl, bh, nl, nh)
                bl = s.lo
                bh = s.hi
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == OP_MAX:
            k = bb[i]
            bl = dlo[k]
            bh = dhi[k]
            ah0 = ah
            bh0 = bh
            s = c_iintersect(al, ah, -INF, nh)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            s = c_iintersect(bl, bh, -INF, nh)
            bl = s.lo
            bh = s.hi
            if bl > bh:
                return k
            if bh0 < nl:
                s = c_iintersect(al, ah, nl, nh)
                al = s.lo
                ah = s.hi
                if al > ah:
                    return j
            if ah0 < nl:
                s = c_iintersect(bl, bh, nl, nh)
                bl = s.lo
                bh = s.hi
                if bl > bh:
                    return k
            dlo[j] = al
            dhi[j] = ah
            dlo[k] = bl
            dhi[k] = bh
        elif op == OP_ABS:
            cl = nl if nl > 0.0 else 0.0
            if cl > nh:
                return j
            if al >= 0.0:
                rl = cl
                rh = nh
            elif ah <= 0.0:
                rl = -nh
                rh = -cl
            else:
                rl = -nh
                rh = nh
            s = c_iintersect(al, ah, rl, rh)
            al = s.lo
            ah = s.hi
            if al > ah:
                return j
            dlo[j] = al
            dhi[j] = ah
        i -= 1

    for v in range(nv):
        out_lo[v] = blo[v]
        out_hi[v] = bhi[v]
    for i in range(n):
        if ops[i] == OP_VAR:
            v = aa[i]
            s = c_iintersect(out_lo[v], out_hi[v], dlo[i], dhi[i])
            if s.lo > s.hi:
                return i
            out_lo[v] = s.lo
            out_hi[v] = s.hi
    return -1


def hc4_revise(const long long[::1] ops, const long long[::1] aa,
               const long long[::1] bb, const double[::1] clo,
               const double[::1] chi, double tlo, double thi,
               const double[::1] blo, const double[::1] bhi,
               double[::1] out_lo, double[::1] out_hi):
    """Forward-backward contraction of box w.r.t. (program value in target).

    Returns -1 and fills out arrays with the contracted per-variable
    domains (intersection over occurrences, subset of the input box) when
    the box stays feasible; otherwise returns the postorder index of the
    node whose domain emptied, proving the constraint has no solution in
    the box.
    """
    cdef Py_ssize_t n = ops.shape[0]
    cdef Py_ssize_t nv = blo.shape[0]
    cdef Py_ssize_t res
    if n == 0:
        return -1
    cdef double* dlo = <double*> malloc(n * sizeof(double))
    cdef double* dhi = <double*> malloc(n * sizeof(double))
    if dlo == NULL or dhi == NULL:
        free(dlo)
        free(dhi)
        raise MemoryError
    try:
        res = c_hc4_revise(n, &ops[0], &aa[0], &bb[0],
                           &clo[0] if clo.shape[0] else NULL,
                           &chi[0] if chi.shape[0] else NULL,
                           tlo, thi,
                           &blo[0] if blo.shape[0] else NULL,
                           &bhi[0] if bhi.shape[0] else NULL,
                           nv,
                           &out_lo[0] if nv else NULL,
                           &out_hi[0] if nv else NULL,
                           dlo, dhi)
        return res
    finally:
        free(dlo)
        free(dhi)
