"""Countable colored linear orders realized over exact rationals.

A realized order exposes a carrier predicate, a coloring, a canonical
enumeration and a *complete* witness finder: ``find_witness`` returns an
element strictly inside an interval with a requested color, or ``None`` only
when the structure guarantees there is none.

Segment-based orders are unions of three kinds of pieces:

* :class:`PointSeg`, a single colored rational;
* :class:`LatticeSeg`, an arithmetic progression ``start + k*step``;
* :class:`DenseSeg`, the rationals of an open interval, optionally filtered
  by the 2-adic valuation class of the denominator and cut into harmonic
  bands accumulating at a point.

The dense coloring is always the valuation scheme: ``p/q`` in lowest terms
has class ``v2(q) mod k`` (or ``min(v2(q), bound)`` for truncated families).
"""
from __future__ import annotations

import heapq
import json
import math
import threading
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

BLANK = -1  # color of uncolored elements

_WITNESS_ATTEMPTS = 256


class IncompleteSolverError(RuntimeError):
    """A witness solver could not decide existence; never silently treated as absence."""


class OracleInconsistency(RuntimeError):
    """An equivalence oracle violated its contract (e.g. a non-convex class)."""


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; pass a Fraction or a string")
    return Fraction(x)


def v2(q: int) -> int:
    """Exponent of 2 in a positive integer."""
    return (q & -q).bit_length() - 1


def diag_key(x: Fraction) -> Tuple[int, int, int]:
    """Position key of ``x`` in the canonical diagonal enumeration of the rationals."""
    return (abs(x.numerator) + x.denominator, x.denominator, 0 if x >= 0 else 1)


def _lt(a: Optional[Fraction], b: Optional[Fraction]) -> bool:
    # None on either side means unbounded
    return a is None or b is None or a < b


def _max_lo(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _min_hi(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _q_branch(h: int, low, up) -> range:
    # q in [1, h] with low < h/q < up
    qmin, qmax = 1, h
    if up is not None:
        if up <= 0:
            return range(0)
        qmin = max(qmin, (h * up.denominator) // up.numerator + 1)
    if low is not None and low > 0:
        qmax = min(qmax, -((-h * low.denominator) // low.numerator) - 1)
    return range(qmin, qmax + 1)


def _q_range(h: int, lo: Optional[Fraction], hi: Optional[Fraction]):
    """Denominators q <= h for which (h-q)/q or -(h-q)/q can land in (lo, hi)."""
    return _q_merge(h, _shifted_bounds(lo, hi))


def _shifted_bounds(lo, hi):
    # p/q = h/q - 1 on the positive side and 1 - h/q on the negative side
    return (None if lo is None else lo + 1, None if hi is None else hi + 1,
            None if hi is None else 1 - hi, None if lo is None else 1 - lo)


def _q_merge(h: int, bounds):
    pos = _q_branch(h, bounds[0], bounds[1])
    neg = _q_branch(h, bounds[2], bounds[3])
    if not neg:
        return pos
    if not pos:
        return neg
    return sorted(set(pos) | set(neg))


def diagonal(lo: Optional[Fraction] = None, hi: Optional[Fraction] = None,
             q_ok: Optional[Callable[[int], bool]] = None) -> Iterator[Fraction]:
    """Rationals of ``(lo, hi)`` in canonical diagonal order (height ``|p|+q``, then ``q``, then sign).

    ``q_ok`` skips denominators up front.
    """
    if lo is not None and hi is not None and lo >= hi:
        return
    bounds = _shifted_bounds(lo, hi)
    ln, ld = (lo.numerator, lo.denominator) if lo is not None else (0, 0)
    hn, hd = (hi.numerator, hi.denominator) if hi is not None else (0, 0)
    h = 1
    while True:
        for q in _q_merge(h, bounds):
            if q_ok is not None and not q_ok(q):
                continue
            pa = h - q
            if math.gcd(pa, q) != 1:
                continue
            for p in (pa,) if pa == 0 else (pa, -pa):
                if (lo is None or p * ld > ln * q) and (hi is None or p * hd < hn * q):
                    yield Fraction(p, q)
        h += 1


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational of least denominator strictly between ``a < b`` (Stern-Brocot descent)."""
    if a >= b:
        raise ValueError("empty interval")
    if a < 0 < b:
        return Fraction(0)
    if b <= 0:
        return -_simplest_pos(-b, -a)
    return _simplest_pos(a, b)


def _simplest_pos(a: Fraction, b: Optional[Fraction]) -> Fraction:
    # 0 <= a < b, b None means +infinity
    n = math.floor(a)
    if b is None or n + 1 < b:
        return Fraction(n + 1)
    low = b - n
    high = a - n
    y = _simplest_pos(1 / low, None if high == 0 else 1 / high)
    return n + 1 / y


def valuation_witnesses(a: Fraction, b: Fraction, j: int) -> Iterator[Fraction]:
    """Rationals in ``(a, b)`` whose reduced denominator has 2-adic valuation exactly ``j``.

    Denominators ``2**j * 3**s`` are tried for increasing ``s``; once
    ``2**j * 3**s * (b - a) > 4`` an odd numerator is guaranteed, so the
    stream is non-empty for every non-degenerate interval.
    """
    an, ad, bn, bd = a.numerator, a.denominator, b.numerator, b.denominator
    s = 0
    while True:
        d = (1 << j) * 3**s
        m = (an * d) // ad + 1
        found = 0
        while found < 3 and m * bd < bn * d:
            if j == 0 or m % 2:
                yield Fraction(m, d)
                found += 1
            m += 1
        s += 1


# -- labelers ------------------------------------------------------------------


class Palette:
    """Dense class ``j`` gets color ``colors[j]``; bands are ignored."""

    def __init__(self, colors: Sequence[Any]):
        self.colors = tuple(colors)

    def label(self, band, cls):
        return self.colors[cls]

    def solve(self, color) -> List[Tuple[Optional[int], int]]:
        return [(None, j) for j, c in enumerate(self.colors) if c == color]

    def __repr__(self):
        return f"Palette({self.colors!r})"


# -- segments ------------------------------------------------------------------


class Segment:
    def contains(self, x: Fraction) -> bool:
        raise NotImplementedError

    def color(self, x: Fraction):
        raise NotImplementedError

    def find_witness(self, lower, upper, color):
        raise NotImplementedError

    def elements(self) -> Iterator[Fraction]:
        raise NotImplementedError

    def minimum(self) -> Optional[Fraction]:
        return None

    def maximum(self) -> Optional[Fraction]:
        return None

    def size(self) -> Optional[int]:
        return None

    def colors(self) -> Optional[frozenset]:
        return None


@dataclass(frozen=True)
class PointSeg(Segment):
    x: Fraction
    c: Any

    @property
    def lo(self):
        return self.x

    @property
    def hi(self):
        return self.x

    def contains(self, x):
        return x == self.x

    def color(self, x):
        return self.c

    def find_witness(self, lower, upper, color):
        if color is not None and color != self.c:
            return None
        if (lower is None or lower < self.x) and (upper is None or self.x < upper):
            return self.x
        return None

    def elements(self):
        yield self.x

    def minimum(self):
        return self.x

    def maximum(self):
        return self.x

    def size(self):
        return 1

    def colors(self):
        return frozenset([self.c])


@dataclass(frozen=True)
class LatticeSeg(Segment):
    """The progression ``start + k*step`` over all integers ``k``."""

    start: Fraction
    step: Fraction
    c: Any

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("lattice step must be positive")

    def contains(self, x):
        return ((x - self.start) / self.step).denominator == 1

    def color(self, x):
        return self.c

    def find_witness(self, lower, upper, color):
        if color is not None and color != self.c:
            return None
        if lower is not None:
            k = math.floor((lower - self.start) / self.step) + 1
        elif upper is not None:
            k = math.ceil((upper - self.start) / self.step) - 1
        else:
            k = 0
        x = self.start + k * self.step
        if (lower is None or x > lower) and (upper is None or x < upper):
            return x
        return None

    def elements(self):
        for x in diagonal():
            if self.contains(x):
                yield x

    def colors(self):
        return frozenset([self.c])


@dataclass(frozen=True)
class DenseSeg(Segment):
    """Rationals of the open interval ``(lo, hi)`` with valuation-class coloring.

    Local coordinate ``t = (x - origin) / scale``.  ``valuation`` is ``None``
    (one class), ``("mod", k)`` or ``("cap", bound)``; ``keep`` restricts the
    carrier to some classes.  ``bands=(start, acc)`` (local coordinates)
    keeps only the open bands ``(acc - w/(n+1), acc - w/(n+2))``, ``w = acc - start``.
    """

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    labels: Any
    origin: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)
    valuation: Optional[Tuple[str, int]] = None
    keep: Optional[frozenset] = None
    bands: Optional[Tuple[Fraction, Fraction]] = None
    exclude: frozenset = frozenset()

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and self.lo >= self.hi:
            raise ValueError("dense segment needs lo < hi")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.valuation is not None and self.valuation[0] not in ("mod", "cap"):
            raise ValueError(f"unknown valuation scheme {self.valuation!r}")

    # local geometry

    def local(self, x: Fraction) -> Fraction:
        if self.scale == 1:
            return x - self.origin if self.origin else x
        return (x - self.origin) / self.scale

    def globalize(self, t: Fraction) -> Fraction:
        if self.scale == 1:
            return t + self.origin if self.origin else t
        return self.origin + self.scale * t

    def classes(self) -> List[int]:
        if self.valuation is None:
            all_cls = [0]
        elif self.valuation[0] == "mod":
            all_cls = list(range(self.valuation[1]))
        else:
            all_cls = list(range(self.valuation[1] + 1))
        if self.keep is not None:
            all_cls = [c for c in all_cls if c in self.keep]
        return all_cls

    def class_of(self, t: Fraction) -> int:
        if self.valuation is None:
            return 0
        v = v2(t.denominator)
        kind, k = self.valuation
        return v % k if kind == "mod" else min(v, k)

    def band_of(self, t: Fraction) -> Optional[int]:
        start, acc = self.bands
        if not (start < t < acc):
            return None
        r = (acc - start) / (acc - t)
        if r.denominator == 1:
            return None  # band boundary
        return math.floor(r) - 1

    def band_interval(self, n: int) -> Tuple[Fraction, Fraction]:
        start, acc = self.bands
        w = acc - start
        return acc - w / (n + 1), acc - w / (n + 2)

    def _decode(self, x: Fraction):
        if not ((self.lo is None or self.lo < x) and (self.hi is None or x < self.hi)):
            return None
        if self.exclude and x in self.exclude:
            return None
        t = self.local(x)
        band = None
        if self.bands is not None:
            band = self.band_of(t)
            if band is None:
                return None
        cls = self.class_of(t)
        if self.keep is not None and cls not in self.keep:
            return None
        return band, cls

    def contains(self, x):
        return self._decode(x) is not None

    def color(self, x):
        decoded = self._decode(x)
        if decoded is None:
            raise KeyError(x)
        return self.labels.label(*decoded)

    def _targets(self, color) -> List[Tuple[Optional[int], int]]:
        admissible = self.classes()
        if color is None:
            return [(None, j) for j in admissible]
        out = []
        for b, j in self.labels.solve(color):
            # a class of None means the label does not depend on the class
            out += [(b, i) for i in admissible] if j is None else [(b, j)] if j in admissible else []
        return out

    def _first_band(self, a: Optional[Fraction], b: Optional[Fraction]) -> Optional[int]:
        start, acc = self.bands
        if a is None or a < start:
            n = 0
        elif a >= acc:
            return None
        else:
            r = (acc - start) / (acc - a)
            n = max(math.floor(r) - 1, 0)
        lo_n, _ = self.band_interval(n)
        if b is not None and b <= lo_n:
            return None
        return n

    def find_witness(self, lower, upper, color):
        a = _max_lo(self.lo, lower)
        b = _min_hi(self.hi, upper)
        if not _lt(a, b):
            return None
        ta = None if a is None else self.local(a)
        tb = None if b is None else self.local(b)
        for band, j in self._targets(color):
            la, lb = ta, tb
            if self.bands is not None:
                if band is None:
                    band = self._first_band(la, lb)
                    if band is None:
                        continue
                blo, bhi = self.band_interval(band)
                la, lb = _max_lo(la, blo), _min_hi(lb, bhi)
            if not _lt(la, lb):
                continue
            if la is None and lb is None:
                la, lb = Fraction(-1), Fraction(1)
            elif la is None:
                la = lb - 1
            elif lb is None:
                lb = la + 1
            x = self._witness_in(la, lb, j)
            if x is not None:
                return x
        return None

    def _witness_in(self, la: Fraction, lb: Fraction, j: int) -> Fraction:
        candidates: Iterable[Fraction]
        if self.valuation is None:
            candidates = _chain([simplest_between(la, lb)], valuation_witnesses(la, lb, 0))
        else:
            candidates = valuation_witnesses(la, lb, j)
        for attempt, t in enumerate(candidates):
            if attempt >= _WITNESS_ATTEMPTS:
                break
            x = self.globalize(t)
            if self.contains(x) and (self.valuation is None or self.class_of(t) == j):
                return x
        raise IncompleteSolverError(f"no witness found in ({la}, {lb}) for class {j} of {self!r}")

    def _q_filter(self) -> Optional[Callable[[int], bool]]:
        # with an integral shift the local denominator is the global one
        if self.valuation is None or self.keep is None or self.scale != 1 or self.origin.denominator != 1:
            return None
        kind, k = self.valuation
        keep = self.keep
        if kind == "mod":
            return lambda q: v2(q) % k in keep
        return lambda q: min(v2(q), k) in keep

    def elements(self):
        for x in diagonal(self.lo, self.hi, self._q_filter()):
            if self.contains(x):
                yield x

    def colors(self):
        if self.bands is not None:
            return None
        return frozenset(self.labels.label(None, j) for j in self.classes())


class _Stream:
    """A segment's enumeration, buffered so every order built on the segment shares it."""

    def __init__(self, source: Iterator[Fraction]):
        self._source = source
        self._buf: List[Fraction] = []
        self._done = False
        self._lock = threading.Lock()

    def __iter__(self):
        i = 0
        while True:
            if i >= len(self._buf):
                with self._lock:
                    if i >= len(self._buf):
                        if self._done:
                            return
                        try:
                            self._buf.append(next(self._source))
                        except StopIteration:
                            self._done = True
                            return
            yield self._buf[i]
            i += 1


_STREAMS: "weakref.WeakKeyDictionary[Segment, _Stream]" = weakref.WeakKeyDictionary()
_STREAMS_LOCK = threading.Lock()


def shared_elements(seg: Segment) -> Iterator[Fraction]:
    with _STREAMS_LOCK:
        stream = _STREAMS.get(seg)
        if stream is None:
            stream = _STREAMS[seg] = _Stream(seg.elements())
    return iter(stream)


def _chain(*its):
    for it in its:
        yield from it


# -- realized orders -----------------------------------------------------------


class RealizedOrder:
    """A countable colored linear order with exact oracles.

    Subclasses provide ``contains``, ``color``, ``_iter_elements``,
    ``find_witness`` and endpoint queries.  ``less`` defaults to rational order.
    """

    name: str = ""
    relations: Dict[str, Any]

    def __init__(self, name: str = "", relations: Optional[Dict[str, Any]] = None):
        self.name = name
        self.relations = dict(relations or {})
        self._cache: List[Any] = []
        self._source: Optional[Iterator[Any]] = None
        self._exhausted = False
        self._lock = threading.Lock()

    # oracles

    def contains(self, x) -> bool:
        raise NotImplementedError

    def color(self, x):
        raise NotImplementedError

    def less(self, x, y) -> bool:
        return x < y

    def find_witness(self, lower=None, upper=None, color=None):
        raise NotImplementedError

    def minimum(self):
        return None

    def maximum(self):
        return None

    def size(self) -> Optional[int]:
        """Number of elements when finite, ``None`` for infinite carriers."""
        return None

    def palette(self) -> Optional[frozenset]:
        return None

    # back-and-forth hooks: a finer convex labelling the engine may match on

    def bf_label(self, x):
        return self.color(x)

    def find_witness_label(self, lower, upper, label):
        return self.find_witness(lower, upper, label)

    def distinguished(self) -> Dict[str, Any]:
        out = {}
        lo, hi = self.minimum(), self.maximum()
        if lo is not None:
            out["min"] = lo
        if hi is not None:
            out["max"] = hi
        return out

    # enumeration

    def _iter_elements(self) -> Iterator[Any]:
        raise NotImplementedError

    def elements(self, n: int) -> List[Any]:
        if n < 0:
            raise ValueError("count must be non-negative")
        with self._lock:
            if self._source is None:
                self._source = self._iter_elements()
            while len(self._cache) < n and not self._exhausted:
                try:
                    self._cache.append(next(self._source))
                except StopIteration:
                    self._exhausted = True
            return list(self._cache[:n])

    def enumerate(self, n: int) -> List[Tuple[Any, Any]]:
        return [(x, self.color(x)) for x in self.elements(n)]

    def index_of(self, x, limit: int = 1_000_000) -> int:
        """Position of ``x`` in the enumeration."""
        if not self.contains(x):
            raise KeyError(x)
        n = 16
        while True:
            elems = self.elements(n)
            for i, y in enumerate(elems):
                if y == x:
                    return i
            if len(elems) < n or n > limit:
                raise KeyError(x)
            n *= 2


class SegmentOrder(RealizedOrder):
    """A union of pairwise disjoint segments listed left to right."""

    def __init__(self, segments: Sequence[Segment], name: str = "", relations=None):
        super().__init__(name, relations)
        self.segments = tuple(segments)

    def _segment_of(self, x) -> Optional[Segment]:
        for seg in self.segments:
            if seg.contains(x):
                return seg
        return None

    def contains(self, x):
        return isinstance(x, Fraction) and self._segment_of(x) is not None

    def color(self, x):
        seg = self._segment_of(x)
        if seg is None:
            raise KeyError(f"{x} is not in the carrier")
        return seg.color(x)

    def find_witness(self, lower=None, upper=None, color=None):
        if lower is not None and upper is not None and not lower < upper:
            raise ValueError(f"malformed interval ({lower}, {upper})")
        for seg in self.segments:
            x = seg.find_witness(lower, upper, color)
            if x is not None:
                return x
        return None

    def _iter_elements(self):
        return heapq.merge(*(shared_elements(seg) for seg in self.segments), key=diag_key)

    def minimum(self):
        return self.segments[0].minimum() if self.segments else None

    def maximum(self):
        return self.segments[-1].maximum() if self.segments else None

    def size(self):
        total = 0
        for seg in self.segments:
            s = seg.size()
            if s is None:
                return None
            total += s
        return total

    def palette(self):
        out: set = set()
        for seg in self.segments:
            cs = seg.colors()
            if cs is None:
                return None
            out |= cs
        return frozenset(out)

    def restrict(self, keep: Callable[[Segment], bool], name: str = "") -> "SegmentOrder":
        return SegmentOrder([s for s in self.segments if keep(s)], name=name or self.name)

    def __repr__(self):
        return f"SegmentOrder({self.name!r}, {len(self.segments)} segments)"


def dense_partition(k: int, truncated: bool = False) -> SegmentOrder:
    """All rationals, ``p/q`` colored ``v2(q) mod k`` (or ``min(v2(q), k)`` when ``truncated``)."""
    if k < 1:
        raise ValueError("dense_partition needs k >= 1")
    if truncated:
        seg = DenseSeg(None, None, Palette(range(k + 1)), valuation=("cap", k))
    else:
        seg = DenseSeg(None, None, Palette(range(k)), valuation=("mod", k))
    return SegmentOrder([seg], name=f"dense_partition({k})")


def color_class(k: int, c: int) -> SegmentOrder:
    """The color-``c`` class of :func:`dense_partition` ``(k)`` as an order on its own."""
    if not 0 <= c < k:
        raise ValueError(f"color {c} out of range for k={k}")
    seg = DenseSeg(None, None, Palette(range(k)), valuation=("mod", k), keep=frozenset([c]))
    return SegmentOrder([seg], name=f"class {c} of dense_partition({k})")


def interval_order(lo, hi, color=0) -> SegmentOrder:
    """All rationals of the open interval ``(lo, hi)`` in one color."""
    lo = None if lo is None else as_rational(lo)
    hi = None if hi is None else as_rational(hi)
    return SegmentOrder([DenseSeg(lo, hi, Palette([color]))], name=f"({lo}, {hi})")


def lattice_order(start, step, color=0) -> SegmentOrder:
    return SegmentOrder([LatticeSeg(as_rational(start), as_rational(step), color)])


# -- quotients -------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexEquivalence:
    """``same_class`` must be a convex equivalence; ``bounds(x)`` returns ``(lo, hi)``
    (``None`` for unbounded) with the class of ``x`` contained in ``[lo, hi]``."""

    same_class: Callable[[Fraction, Fraction], bool]
    bounds: Callable[[Fraction], Tuple[Optional[Fraction], Optional[Fraction]]]


def equality_equivalence() -> ConvexEquivalence:
    return ConvexEquivalence(lambda x, y: x == y, lambda x: (x, x))


class QuotientOrder(RealizedOrder):
    """Least-enumerated representatives of the classes of a convex equivalence."""

    def __init__(self, base: RealizedOrder, eq: ConvexEquivalence, name: str = ""):
        super().__init__(name or f"{base.name}/E")
        self.base = base
        self.eq = eq

    def representative(self, x):
        lo, hi = self.eq.bounds(x)
        n = 64
        while True:
            elems = self.base.elements(n)
            for y in elems:
                if (lo is None or lo <= y) and (hi is None or y <= hi) and self.eq.same_class(x, y):
                    return y
            if len(elems) < n:
                raise OracleInconsistency(f"{x} is not equivalent to any enumerated element")
            n *= 2

    def contains(self, x):
        return self.base.contains(x) and self.representative(x) == x

    def color(self, x):
        return self.base.color(x)

    def _iter_elements(self):
        reps: List[Fraction] = []
        n = 0
        while True:
            batch = self.base.elements(n + 64)
            if len(batch) == n:
                return
            for y in batch[n:]:
                owner = next((r for r in reps if self.eq.same_class(r, y)), None)
                if owner is None:
                    reps.append(y)
                    yield y
                    continue
                a, b = min(owner, y), max(owner, y)
                for r in reps:
                    if a < r < b:
                        raise OracleInconsistency(
                            f"class of {owner} is not convex: {r} lies between {owner} and {y}"
                        )
            n = len(batch)

    def find_witness(self, lower=None, upper=None, color=None):
        lo = lower
        hi = upper
        if lower is not None:
            lo = _max_lo(lower, self.eq.bounds(lower)[1])
        for _ in range(_WITNESS_ATTEMPTS):
            if not _lt(lo, hi):
                return None
            y = self.base.find_witness(lo, hi, None)
            if y is None:
                return None
            if lower is not None and self.eq.same_class(y, lower):
                lo = y
                continue
            if upper is not None and self.eq.same_class(y, upper):
                blo = self.eq.bounds(upper)[0]
                hi = blo if blo is not None and (lo is None or blo > lo) and blo < y else y
                continue
            rep = self.representative(y)
            if color is None or self.color(rep) == color:
                return rep
            # search strictly above the class of y for another candidate
            lo = _max_lo(y, self.eq.bounds(y)[1])
        raise IncompleteSolverError("quotient witness search did not converge")

    def minimum(self):
        m = self.base.minimum()
        return None if m is None else self.representative(m)

    def maximum(self):
        m = self.base.maximum()
        return None if m is None else self.representative(m)

    def palette(self):
        return self.base.palette()


def quotient_by_convex_equivalence(M: RealizedOrder, eq: ConvexEquivalence) -> QuotientOrder:
    return QuotientOrder(M, eq)


# -- colored order specs -----------------------------------------------------------


@dataclass(frozen=True)
class Point:
    color: int


@dataclass(frozen=True)
class DenseShuffle:
    colors: frozenset
    min: Optional[int] = None
    max: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "colors", frozenset(self.colors))
        if not self.colors:
            raise ValueError("a dense shuffle needs at least one color")
        for end in (self.min, self.max):
            if end is not None and end not in self.colors:
                raise ValueError(f"endpoint color {end} is not among {sorted(self.colors)}")


@dataclass(frozen=True)
class ColoredOrderSpec:
    blocks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for b in self.blocks:
            if not isinstance(b, (Point, DenseShuffle)):
                raise TypeError(f"not a block: {b!r}")

    def palette(self) -> frozenset:
        out = set()
        for b in self.blocks:
            out |= {b.color} if isinstance(b, Point) else set(b.colors)
        return frozenset(out)

    def to_json(self) -> dict:
        blocks = []
        for b in self.blocks:
            if isinstance(b, Point):
                blocks.append({"point": b.color})
            else:
                blocks.append({"dense": {"colors": sorted(b.colors), "min": b.min, "max": b.max}})
        return {"blocks": blocks}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


class SpecFileError(ValueError):
    def __init__(self, path: str, line: int, field_name: str, message: str):
        super().__init__(f"{path}:{line}: field {field_name!r}: {message}")
        self.path = path
        self.line = line
        self.field = field_name


def _line_of(text: str, needle: str, occurrence: int = 0) -> int:
    pos = -1
    for _ in range(occurrence + 1):
        pos = text.find(needle, pos + 1)
        if pos < 0:
            return 1
    return text.count("\n", 0, pos) + 1


def _color_id(value, path, text, fld, occ):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise SpecFileError(path, _line_of(text, fld, occ), fld, f"expected a non-negative integer, got {value!r}")
    return value


def spec_from_json(data: Any, path: str = "<memory>", text: str = "") -> ColoredOrderSpec:
    if not isinstance(data, dict) or "blocks" not in data:
        raise SpecFileError(path, 1, "blocks", "document must be an object with a 'blocks' list")
    if not isinstance(data["blocks"], list):
        raise SpecFileError(path, _line_of(text, '"blocks"'), "blocks", "must be a list")
    blocks = []
    n_point = n_dense = 0
    for i, raw in enumerate(data["blocks"]):
        where = f"blocks[{i}]"
        if not isinstance(raw, dict) or len(raw) != 1 or next(iter(raw)) not in ("point", "dense"):
            raise SpecFileError(path, _line_of(text, "{", i + 1), where, "expected {'point': id} or {'dense': {...}}")
        if "point" in raw:
            blocks.append(Point(_color_id(raw["point"], path, text, '"point"', n_point)))
            n_point += 1
            continue
        body = raw["dense"]
        line = _line_of(text, '"dense"', n_dense)
        if not isinstance(body, dict) or set(body) - {"colors", "min", "max"} or "colors" not in body:
            raise SpecFileError(path, line, f"{where}.dense", "expected keys 'colors', 'min', 'max'")
        if not isinstance(body["colors"], list) or not body["colors"]:
            raise SpecFileError(path, line, f"{where}.dense.colors", "expected a non-empty list of color ids")
        colors = [_color_id(c, path, text, '"colors"', n_dense) for c in body["colors"]]
        ends = []
        for key in ("min", "max"):
            v = body.get(key)
            if v is not None:
                v = _color_id(v, path, text, f'"{key}"', 0)
                if v not in colors:
                    raise SpecFileError(path, line, f"{where}.dense.{key}", f"color {v} is not listed in 'colors'")
            ends.append(v)
        blocks.append(DenseShuffle(frozenset(colors), ends[0], ends[1]))
        n_dense += 1
    return ColoredOrderSpec(tuple(blocks))


def load_spec(path: str) -> ColoredOrderSpec:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(path, exc.lineno, "<document>", exc.msg) from None
    return spec_from_json(data, path, text)


# -- canonical form of specs ----------------------------------------------------------


@dataclass(frozen=True)
class _Tok:
    kind: str  # "p" or "d"
    colors: frozenset
    src: tuple  # provenance: ((block, role), ...) for points, block indices for dense


def _spec_tokens(spec: ColoredOrderSpec) -> List[_Tok]:
    toks: List[_Tok] = []
    for i, b in enumerate(spec.blocks):
        if isinstance(b, Point):
            toks.append(_Tok("p", frozenset([b.color]), ((i, "point"),)))
            continue
        if b.min is not None:
            toks.append(_Tok("p", frozenset([b.min]), ((i, "min"),)))
        toks.append(_Tok("d", b.colors, (i,)))
        if b.max is not None:
            toks.append(_Tok("p", frozenset([b.max]), ((i, "max"),)))
    return toks


def _merge_tokens(toks: List[_Tok]) -> List[_Tok]:
    toks = list(toks)
    changed = True
    while changed:
        changed = False
        for i in range(len(toks) - 1):
            a, b = toks[i], toks[i + 1]
            if a.kind == "d" and b.kind == "d" and a.colors == b.colors:
                toks[i : i + 2] = [_Tok("d", a.colors, a.src + b.src)]
                changed = True
                break
            if i + 2 < len(toks):
                c = toks[i + 2]
                if (a.kind == "d" and b.kind == "p" and c.kind == "d" and a.colors == c.colors
                        and b.colors <= a.colors):
                    toks[i : i + 3] = [_Tok("d", a.colors, a.src + c.src)]
                    changed = True
                    break
    return toks


@dataclass(frozen=True)
class CanonicalRegion:
    """One convex piece of the canonical form: a point or an endpoint-free dense shuffle."""

    kind: str
    colors: frozenset
    src: tuple


def canonical_regions(spec: ColoredOrderSpec) -> List[CanonicalRegion]:
    return [CanonicalRegion(t.kind, t.colors, t.src) for t in _merge_tokens(_spec_tokens(spec))]


def normalize_spec(spec: ColoredOrderSpec) -> ColoredOrderSpec:
    """Canonical block list: isomorphic specs (as colored orders) normalize to equal lists.

    Dense shuffles on the same palette that touch, or are separated by one
    point of that palette, are merged; remaining points fold into an adjacent
    shuffle as its endpoint, preferring the shuffle on the left.
    """
    toks = _merge_tokens(_spec_tokens(spec))
    out: List[Any] = []
    i = 0
    while i < len(toks):
        t = toks[i]
        if t.kind == "d":
            out.append(DenseShuffle(t.colors))
            i += 1
            continue
        (c,) = t.colors
        prev = out[-1] if out else None
        if isinstance(prev, DenseShuffle) and prev.max is None and c in prev.colors and toks[i - 1].kind == "d":
            out[-1] = DenseShuffle(prev.colors, prev.min, c)
            i += 1
            continue
        nxt = toks[i + 1] if i + 1 < len(toks) else None
        if nxt is not None and nxt.kind == "d" and c in nxt.colors:
            out.append(DenseShuffle(nxt.colors, c, None))
            i += 2
            # a following point may still close this shuffle
            continue
        out.append(Point(c))
        i += 1
    return ColoredOrderSpec(tuple(out))


# -- realizing specs -------------------------------------------------------------------


class RealizedSpec(SegmentOrder):
    """The realization of a :class:`ColoredOrderSpec`; block ``n`` lives in
    ``(origin + n*stride, origin + (n+1)*stride)``."""

    def __init__(self, spec: ColoredOrderSpec, origin=0, stride=1):
        self.spec = spec
        self.origin = as_rational(origin)
        self.stride = as_rational(stride)
        if self.stride <= 0:
            raise ValueError("stride must be positive")
        segments: List[Segment] = []
        self._anchor: Dict[Tuple[int, str], Fraction] = {}
        self._dense_span: Dict[int, Tuple[Fraction, Fraction]] = {}
        for n, b in enumerate(spec.blocks):
            left = self.origin + n * self.stride
            at = lambda frac, left=left: left + self.stride * frac  # noqa: E731
            if isinstance(b, Point):
                self._anchor[(n, "point")] = at(Fraction(1, 2))
                segments.append(PointSeg(at(Fraction(1, 2)), b.color))
                continue
            lo, hi = left, left + self.stride
            if b.min is not None:
                lo = at(Fraction(1, 4))
                self._anchor[(n, "min")] = lo
                segments.append(PointSeg(lo, b.min))
            if b.max is not None:
                hi = at(Fraction(3, 4))
            cols = sorted(b.colors)
            segments.append(
                DenseSeg(lo, hi, Palette(cols), origin=left, scale=self.stride,
                         valuation=("mod", len(cols)) if len(cols) > 1 else None)
            )
            self._dense_span[n] = (lo, hi)
            if b.max is not None:
                self._anchor[(n, "max")] = hi
                segments.append(PointSeg(hi, b.max))
        super().__init__(segments, name="realized spec")
        self.regions = canonical_regions(spec)
        self._region_bounds: List[Tuple[Fraction, Fraction]] = []
        for r in self.regions:
            if r.kind == "p":
                x = self._anchor[r.src[0]]
                self._region_bounds.append((x, x))
            else:
                self._region_bounds.append((self._dense_span[r.src[0]][0], self._dense_span[r.src[-1]][1]))

    def region_of(self, x: Fraction) -> int:
        for k, (lo, hi) in enumerate(self._region_bounds):
            if lo == hi == x or lo < x < hi:
                return k
        raise KeyError(x)

    def bf_label(self, x):
        return (self.region_of(x), self.color(x))

    def find_witness_label(self, lower, upper, label):
        k, c = label
        if k >= len(self._region_bounds):
            return None
        lo, hi = self._region_bounds[k]
        if lo == hi:
            return lo if (lower is None or lower < lo) and (upper is None or lo < upper) and self.color(lo) == c else None
        a, b = _max_lo(lower, lo), _min_hi(upper, hi)
        if not _lt(a, b):
            return None
        return self.find_witness(a, b, c)

    def distinguished(self):
        out = super().distinguished()
        for k, r in enumerate(self.regions):
            if r.kind == "p":
                out[f"point{k}"] = self._region_bounds[k][0]
        return out


def realize_spec(spec: ColoredOrderSpec, origin=0, stride=1) -> RealizedSpec:
    return RealizedSpec(spec, origin, stride)


def classify_realization(M: RealizedSpec, probe: int = 200) -> ColoredOrderSpec:
    """Read the block structure back off a realization and cross-check it by probing."""
    blocks: List[Any] = []
    segs = list(M.segments)
    i = 0
    while i < len(segs):
        s = segs[i]
        if isinstance(s, DenseSeg):
            colors = frozenset(s.colors())
            blocks.append(DenseShuffle(colors))
            i += 1
            continue
        nxt = segs[i + 1] if i + 1 < len(segs) else None
        if isinstance(nxt, DenseSeg) and nxt.lo == s.x:
            d = DenseShuffle(frozenset(nxt.colors()), s.c, None)
            after = segs[i + 2] if i + 2 < len(segs) else None
            if isinstance(after, PointSeg) and after.x == nxt.hi:
                d = DenseShuffle(d.colors, s.c, after.c)
                i += 1
            blocks.append(d)
            i += 2
            continue
        if blocks and isinstance(blocks[-1], DenseShuffle) and isinstance(segs[i - 1], DenseSeg) and segs[i - 1].hi == s.x:
            last = blocks[-1]
            blocks[-1] = DenseShuffle(last.colors, last.min, s.c)
        else:
            blocks.append(Point(s.c))
        i += 1
    spec = ColoredOrderSpec(tuple(blocks))
    seen = {c for _, c in M.enumerate(probe)}
    if not seen <= spec.palette():
        raise AssertionError(f"probe found colors {seen - spec.palette()} outside the classified palette")
    return spec
