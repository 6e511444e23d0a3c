"""Interval kernel backend selection.

Two implementations exist: a Cython extension (dproof._ikernel_c) and a
pure-Python twin (dproof._ikernel_py).  They are written to produce
bit-identical results; the test suite enforces that.  The compiled one is
preferred when importable.  Set DPROOF_KERNEL=pure or DPROOF_KERNEL=c to
force a backend (forcing "c" raises if the extension is missing).
"""

from __future__ import annotations

import os

_choice = os.environ.get("DPROOF_KERNEL", "").strip().lower()

if _choice == "pure":
    from dproof import _ikernel_py as _impl
elif _choice == "c":
    from dproof import _ikernel_c as _impl  # type: ignore[no-redef]
elif _choice == "":
    try:
        from dproof import _ikernel_c as _impl  # type: ignore[no-redef]
    except ImportError:
        from dproof import _ikernel_py as _impl
else:
    raise ImportError(f"DPROOF_KERNEL must be 'pure' or 'c', not {_choice!r}")

BACKEND = _impl.BACKEND

eval_root = _impl.eval_root
eval_nodes = _impl.eval_nodes
hc4_revise = _impl.hc4_revise

iadd = _impl.iadd
isub = _impl.isub
ineg = _impl.ineg
imul = _impl.imul
idiv = _impl.idiv
isqr = _impl.isqr
ipowi = _impl.ipowi
isqrt = _impl.isqrt
iexp = _impl.iexp
ilog = _impl.ilog
isin = _impl.isin
icos = _impl.icos
itan = _impl.itan
iasin = _impl.iasin
iacos = _impl.iacos
iatan = _impl.iatan
iatan2 = _impl.iatan2
imin = _impl.imin
imax = _impl.imax
iabs = _impl.iabs
isgn = _impl.isgn
ichmin = _impl.ichmin
ichmax = _impl.ichmax
iintersect = _impl.iintersect
ihull = _impl.ihull

add_rd = _impl.add_rd
add_ru = _impl.add_ru
sub_rd = _impl.sub_rd
sub_ru = _impl.sub_ru
mul_rd = _impl.mul_rd
mul_ru = _impl.mul_ru
div_rd = _impl.div_rd
div_ru = _impl.div_ru
sqrt_rd = _impl.sqrt_rd
sqrt_ru = _impl.sqrt_ru

EMPTY = _impl.EMPTY
PI_LO = _impl.PI_LO
PI_HI = _impl.PI_HI
HALF_PI_LO = _impl.HALF_PI_LO
HALF_PI_HI = _impl.HALF_PI_HI
