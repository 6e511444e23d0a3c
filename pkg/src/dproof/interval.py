"""Closed binary64 intervals and axis-aligned boxes.

Endpoints are ordinary floats, +-inf allowed, NaN never.  The empty
interval has the canonical representation (inf, -inf) and -0.0 is
normalized to +0.0 everywhere, so equal intervals are equal as tuples
and serialize identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INF = math.inf


def _canon_endpoint(x: float) -> float:
    if math.isnan(x):
        raise ValueError("interval endpoint is NaN")
    return x + 0.0  # -0.0 -> +0.0


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; empty iff lo > hi (canonically (inf, -inf))."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo = _canon_endpoint(self.lo)
        hi = _canon_endpoint(self.hi)
        if lo > hi:
            lo, hi = INF, -INF
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def empty() -> "Interval":
        return _EMPTY

    @staticmethod
    def whole() -> "Interval":
        return _WHOLE

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    @staticmethod
    def from_hex(lo_hex: str, hi_hex: str) -> "Interval":
        return Interval(float.fromhex(lo_hex), float.fromhex(hi_hex))

    @staticmethod
    def from_decimal(text: str) -> "Interval":
        """Tightest interval around an exact decimal or p/q literal."""
        return interval_of_rational(rational_of_text(text))

    # -- predicates and measures -------------------------------------------

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def width(self) -> float:
        if self.is_empty:
            return 0.0
        w = self.hi - self.lo
        return w

    @property
    def mag(self) -> float:
        if self.is_empty:
            return 0.0
        a = abs(self.lo)
        b = abs(self.hi)
        return a if a > b else b

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def superset(self, other: "Interval") -> bool:
        if other.is_empty:
            return True
        return self.lo <= other.lo and self.hi >= other.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    # -- lattice ops ---------------------------------------------------------

    def intersect(self, other: "Interval") -> "Interval":
        lo = self.lo if self.lo > other.lo else other.lo
        hi = self.hi if self.hi < other.hi else other.hi
        return Interval(lo, hi)

    def hull(self, other: "Interval") -> "Interval":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        lo = self.lo if self.lo < other.lo else other.lo
        hi = self.hi if self.hi > other.hi else other.hi
        return Interval(lo, hi)

    # -- splitting -----------------------------------------------------------

    def mid(self) -> float:
        if self.is_empty:
            raise ValueError("midpoint of empty interval")
        if self.lo == -INF and self.hi == INF:
            return 0.0
        if self.lo == -INF:
            return self.hi - 1.0 if abs(self.hi) < 1e300 else -1e300
        if self.hi == INF:
            return self.lo + 1.0 if abs(self.lo) < 1e300 else 1e300
        m = self.lo + 0.5 * (self.hi - self.lo)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        if m < self.lo:
            m = self.lo
        if m > self.hi:
            m = self.hi
        return m

    def splittable(self) -> bool:
        if self.is_empty:
            return False
        m = self.mid()
        return self.lo < m < self.hi

    def split(self) -> tuple["Interval", "Interval"]:
        m = self.mid()
        return Interval(self.lo, m), Interval(m, self.hi)

    # -- formatting ----------------------------------------------------------

    def to_hex(self) -> tuple[str, str]:
        return float_hex(self.lo), float_hex(self.hi)

    def __str__(self) -> str:
        if self.is_empty:
            return "[empty]"
        return f"[{self.lo!r}, {self.hi!r}]"


_EMPTY = Interval(INF, -INF)
_WHOLE = Interval(-INF, INF)


def float_hex(x: float) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return x.hex()


def float_from_hex(s: str) -> float:
    v = float.fromhex(s)
    if math.isnan(v):
        raise ValueError("NaN endpoint in hex literal")
    return v


def rational_of_text(text: str) -> Fraction:
    """Exact value of a decimal literal or 'p/q'."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num.strip()), int(den.strip()))
    import decimal

    return Fraction(decimal.Decimal(text))


def float_of_rational(r: Fraction) -> tuple[float, bool]:
    """Nearest float and whether the conversion was exact."""
    v = float(r)
    return v, (math.isfinite(v) and Fraction(v) == r)


def interval_of_rational(r: Fraction) -> Interval:
    v, exact = float_of_rational(r)
    if exact:
        return Interval(v, v)
    if not math.isfinite(v):
        if v == INF:
            return Interval(math.nextafter(INF, 0.0), INF)
        return Interval(-INF, math.nextafter(-INF, 0.0))
    if Fraction(v) < r:
        return Interval(v, math.nextafter(v, INF))
    return Interval(math.nextafter(v, -INF), v)


@dataclass(frozen=True)
class Box:
    """Product of per-variable intervals; empty iff any component is."""

    ivs: tuple[Interval, ...]

    @staticmethod
    def of(ivs: Iterable[Interval]) -> "Box":
        return Box(tuple(ivs))

    @staticmethod
    def from_bounds(bounds: Sequence[tuple[float, float]]) -> "Box":
        return Box(tuple(Interval(lo, hi) for lo, hi in bounds))

    def __len__(self) -> int:
        return len(self.ivs)

    def __getitem__(self, i: int) -> Interval:
        return self.ivs[i]

    @property
    def is_empty(self) -> bool:
        return any(iv.is_empty for iv in self.ivs)

    def max_width(self) -> float:
        w = 0.0
        for iv in self.ivs:
            if iv.width > w:
                w = iv.width
        return w

    def widest_axis(self) -> int:
        # first axis attaining the max, so runs are reproducible
        best = 0
        w = self.ivs[0].width
        for i in range(1, len(self.ivs)):
            wi = self.ivs[i].width
            if wi > w:
                w = wi
                best = i
        return best

    def replace(self, axis: int, iv: Interval) -> "Box":
        ivs = list(self.ivs)
        ivs[axis] = iv
        return Box(tuple(ivs))

    def split(self, axis: int) -> tuple["Box", "Box"]:
        left, right = self.ivs[axis].split()
        return self.replace(axis, left), self.replace(axis, right)

    def intersect(self, other: "Box") -> "Box":
        return Box(tuple(a.intersect(b) for a, b in zip(self.ivs, other.ivs)))

    def superset(self, other: "Box") -> bool:
        if other.is_empty:
            return True
        return all(a.superset(b) for a, b in zip(self.ivs, other.ivs))

    def contains_point(self, pt: Sequence[float]) -> bool:
        return all(iv.contains(x) for iv, x in zip(self.ivs, pt))

    def corner(self, mask: int) -> tuple[float, ...]:
        # bit i of mask picks the upper endpoint of axis i; axes past the
        # mask width stay at the lower endpoint
        return tuple(
            iv.hi if (i < 63 and (mask >> i) & 1) else iv.lo
            for i, iv in enumerate(self.ivs)
        )

    def center(self) -> tuple[float, ...]:
        return tuple(iv.mid() for iv in self.ivs)

    def lo_list(self) -> list[float]:
        return [iv.lo for iv in self.ivs]

    def hi_list(self) -> list[float]:
        return [iv.hi for iv in self.ivs]

    def __str__(self) -> str:
        return " x ".join(str(iv) for iv in self.ivs)


def _union_covers(w: Interval, a: Interval, b: Interval) -> bool:
    # does a ∪ b cover w as sets of reals?
    if w.is_empty:
        return True
    if a.is_empty:
        return b.superset(w)
    if b.is_empty:
        return a.superset(w)
    if a.superset(w) or b.superset(w):
        return True
    left, right = (a, b) if a.lo <= b.lo else (b, a)
    # w ⊆ left ∪ right needs the pieces to touch: any real strictly
    # between left.hi and right.lo would be uncovered
    return left.lo <= w.lo and right.hi >= w.hi and right.lo <= left.hi


def covers_union(whole: Box, p1: Box, p2: Box) -> bool:
    """Is every point of `whole` in p1 or p2?

    Decides the two-part case exactly when the parts differ from the
    whole along at most one axis (the only shape split steps produce);
    anything stranger is rejected as uncovered.
    """
    if whole.is_empty:
        return True
    if len(p1) != len(whole) or len(p2) != len(whole):
        return False
    if p1.is_empty:
        return p2.superset(whole)
    if p2.is_empty:
        return p1.superset(whole)
    mix_axis = -1
    for i in range(len(whole)):
        c1 = p1[i].superset(whole[i])
        c2 = p2[i].superset(whole[i])
        if c1 and c2:
            continue
        if mix_axis >= 0:
            return False
        mix_axis = i
    if mix_axis < 0:
        return True
    if not _union_covers(whole[mix_axis], p1[mix_axis], p2[mix_axis]):
        return False
    # along every other axis both parts already cover, so any point's
    # mix-axis coordinate decides which part absorbs it
    return True
