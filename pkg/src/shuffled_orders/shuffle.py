"""Monotone and shuffling relations, coherent families, cuts and limit structures.

Relations between realized orders are membership predicates.  Threshold
relations additionally expose their fibers as open rays,
``S(A, b) = A ∩ (-inf, left_fiber(b))`` and ``S(a, B) = B ∩ (right_fiber(a), inf)``,
which is what lets checkers *produce* separating and successor witnesses
instead of searching for them.

Verdicts certify the axioms on the enumerated sample plus witness closure;
they are bounded evidence for arbitrary relations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .realize import IncompleteSolverError, RealizedOrder


@dataclass
class Verdict:
    check: str
    depth: int
    passed: bool
    counterexample: Optional[list] = None
    detail: str = ""

    def __bool__(self):
        return self.passed

    def record(self) -> dict:
        return {
            "check": self.check,
            "depth": self.depth,
            "result": "pass" if self.passed else "fail",
            "counterexample": _jsonable(_as_list(self.counterexample)),
        }


def _as_list(x):
    if x is None or isinstance(x, (list, tuple)):
        return x
    return [x]


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Cut):
        return [x.origin, str(x.anchor)]
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return x


class MonotoneRelation:
    """A relation ``S ⊆ A × B`` given by a membership predicate."""

    def __init__(self, A: RealizedOrder, B: RealizedOrder, name: str = "S"):
        self.A = A
        self.B = B
        self.name = name

    def member(self, a, b) -> bool:
        raise NotImplementedError

    def left_fiber(self, b) -> Optional[Fraction]:
        """Threshold ``t`` with ``S(A, b) = {a in A : a < t}``, or ``None`` if unknown."""
        return None

    def right_fiber(self, a) -> Optional[Fraction]:
        """Threshold ``t`` with ``S(a, B) = {b in B : b > t}``, or ``None`` if unknown."""
        return None


class ShiftedRelation(MonotoneRelation):
    """``(a, b) ∈ S`` iff ``a < b + shift`` as rationals."""

    def __init__(self, A, B, shift=0, name="S"):
        super().__init__(A, B, name)
        self.shift = Fraction(shift)

    def member(self, a, b):
        s = self.shift
        if s.denominator == 1 and type(a) is Fraction and type(b) is Fraction:
            # a < b + s without building the sum
            return a.numerator * b.denominator < (b.numerator + s.numerator * b.denominator) * a.denominator
        return a < b + s

    def left_fiber(self, b):
        return b + self.shift if self.shift else b

    def right_fiber(self, a):
        return a - self.shift if self.shift else a

    def __repr__(self):
        return f"ShiftedRelation({self.A.name!r}, {self.B.name!r}, shift={self.shift})"


def restrict_ambient(A: RealizedOrder, B: RealizedOrder, name: str = "S") -> ShiftedRelation:
    """The restriction of the rational order to ``A × B``."""
    return ShiftedRelation(A, B, 0, name)


class PredicateRelation(MonotoneRelation):
    """An arbitrary predicate; no fiber solvers."""

    def __init__(self, A, B, pred: Callable[[Any, Any], bool], name="S"):
        super().__init__(A, B, name)
        self.pred = pred

    def member(self, a, b):
        return bool(self.pred(a, b))


def empty_relation(A, B) -> PredicateRelation:
    return PredicateRelation(A, B, lambda a, b: False, name="empty")


class ComposedRelation(MonotoneRelation):
    """``T ∘ S``: ``(a, c)`` is a member iff some middle ``b`` has ``(a, b) ∈ S`` and ``(b, c) ∈ T``.

    The middle element is produced by the middle order's witness solver on the
    interval ``(S.right_fiber(a), T.left_fiber(c))``.
    """

    def __init__(self, S: MonotoneRelation, T: MonotoneRelation):
        if S.B is not T.A:
            raise ValueError("composition needs a shared middle order")
        super().__init__(S.A, T.B, f"{T.name}∘{S.name}")
        self.S = S
        self.T = T

    def middle_witness(self, a, c):
        lo = self.S.right_fiber(a)
        hi = self.T.left_fiber(c)
        if lo is None or hi is None:
            raise IncompleteSolverError(f"no fiber solver to decide {self.name} at ({a}, {c})")
        if not lo < hi:
            return None
        b = self.S.B.find_witness(lo, hi, None)
        if b is not None and not (self.S.member(a, b) and self.T.member(b, c)):
            raise IncompleteSolverError(f"middle witness {b} does not link ({a}, {c})")
        return b

    def member(self, a, c):
        return self.middle_witness(a, c) is not None


def compose(S: MonotoneRelation, T: MonotoneRelation) -> ComposedRelation:
    return ComposedRelation(S, T)


# -- checkers ---------------------------------------------------------------------


def _sample(order: RealizedOrder, depth: int) -> List[Any]:
    if type(order).less is RealizedOrder.less:
        return sorted(order.elements(depth))
    return sorted(order.elements(depth), key=cmp_to_key(lambda x, y: -1 if order.less(x, y) else (1 if order.less(y, x) else 0)))


def check_monotone(S: MonotoneRelation, depth: int = 50) -> Verdict:
    """Each ``S(A, b)`` is an initial part and the family increases with ``b`` (on the sample)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    As, Bs = _sample(S.A, depth), _sample(S.B, depth)
    prev_b, prev_len = None, 0
    for b in Bs:
        row = [S.member(a, b) for a in As]
        length = 0
        while length < len(row) and row[length]:
            length += 1
        if any(row[length:]):
            x = As[length + row[length:].index(True)]
            return Verdict("monotone", depth, False, [As[length], x, b, b],
                           f"S(A,{b}) is not an initial part: contains {x} but not {As[length]}")
        if prev_b is not None and length < prev_len:
            a = As[length]
            return Verdict("monotone", depth, False, [a, a, prev_b, b],
                           f"S(A,{prev_b}) contains {a} but S(A,{b}) does not")
        prev_b, prev_len = b, length
    return Verdict("monotone", depth, True)


def check_shuffling(S: MonotoneRelation, depth: int = 50, monotone: Optional[Verdict] = None) -> Verdict:
    """Non-emptiness, strict increase of ``S(A, b)``, strict decrease of ``S(a, B)``,
    and successor witnesses inside every fiber ``S(A, b)``.

    ``monotone`` reuses an earlier :func:`check_monotone` verdict at the same depth.
    """
    mono = monotone if monotone is not None else check_monotone(S, depth)
    if not mono:
        return Verdict("shuffling", depth, False, mono.counterexample, "not monotone: " + mono.detail)
    As, Bs = _sample(S.A, depth), _sample(S.B, depth)
    if not any(S.member(a, b) for a in As for b in Bs):
        return Verdict("shuffling", depth, False, None, "relation is empty on the sample")
    # (1) strict increase; consecutive sample pairs suffice given monotonicity
    for b, b2 in zip(Bs, Bs[1:]):
        lo, hi = S.left_fiber(b), S.left_fiber(b2)
        sep = None if lo is None or hi is None or not lo < hi else _witness_half_open(S.A, lo, hi)
        if sep is None or S.member(sep, b) or not S.member(sep, b2):
            return Verdict("shuffling", depth, False, [b, b2], f"no separating witness between S(A,{b}) and S(A,{b2})")
    # (2) strict decrease of S(a, B)
    for a, a2 in zip(As, As[1:]):
        lo, hi = S.right_fiber(a), S.right_fiber(a2)
        sep = None if lo is None or hi is None or not lo < hi else _witness_half_open(S.B, lo, hi, closed="hi")
        if sep is None or not S.member(a, sep) or S.member(a2, sep):
            return Verdict("shuffling", depth, False, [a, a2], f"no separating witness between S({a},B) and S({a2},B)")
    # (3) no supremum: the largest sampled member of each fiber has a larger member
    for b in Bs:
        inside = [a for a in As if S.member(a, b)]
        t = S.left_fiber(b)
        for a in inside[-1:]:
            nxt = None if t is None else S.A.find_witness(a, t, None)
            if nxt is None or not S.member(nxt, b) or not S.A.less(a, nxt):
                return Verdict("shuffling", depth, False, [b, a], f"fiber S(A,{b}) has no element above {a}")
    return Verdict("shuffling", depth, True)


def _witness_half_open(order, lo, hi, closed="lo"):
    # an element of [lo, hi) (or (lo, hi]) of the order
    edge = lo if closed == "lo" else hi
    if order.contains(edge):
        return edge
    return order.find_witness(lo, hi, None)


@dataclass
class ShuffleFamily:
    orders: List[RealizedOrder]
    relations: Dict[Tuple[int, int], MonotoneRelation] = field(default_factory=dict)
    pairwise_only: bool = False

    def rel(self, i: int, j: int) -> MonotoneRelation:
        return self.relations[(i, j)]

    def __len__(self):
        return len(self.orders)


def ambient_family(orders: Sequence[RealizedOrder]) -> ShuffleFamily:
    rels = {(i, j): restrict_ambient(orders[i], orders[j], f"S{i},{j}")
            for i, j in itertools.combinations(range(len(orders)), 2)}
    return ShuffleFamily(list(orders), rels)


def canonical_family(k: int) -> ShuffleFamily:
    """The ``k`` color classes of ``dense_partition(k)`` linked by the rational order."""
    from .realize import color_class

    return ambient_family([color_class(k, c) for c in range(k)])


def check_coherence(F: ShuffleFamily, depth: int = 50, exhaustive: bool = True) -> Verdict:
    """``S_{j,k} ∘ S_{i,j} = S_{i,k}`` on every sampled pair, for all ``i < j < k``.

    With ``exhaustive=False`` each row ``{a : (a, c) ∈ S_{i,k}}`` over the sorted
    sample must be an initial segment, and the composite is evaluated only on
    both sides of its boundary.  For monotone relations the composite's row is
    an initial segment too, so the two rows agree everywhere.
    """
    samples = [_sample(F.orders[i], depth) for i in range(len(F))]
    for i, j, k in itertools.combinations(range(len(F)), 3):
        comp = ComposedRelation(F.rel(i, j), F.rel(j, k))
        direct = F.rel(i, k)
        for c in samples[k]:
            As = samples[i]
            if exhaustive:
                probes = range(len(As))
                row = None
            else:
                row = [direct.member(a, c) for a in As]
                cut = row.index(False) if False in row else len(row)
                if any(row[cut:]):
                    a = As[cut + row[cut:].index(True)]
                    return Verdict("coherence", depth, False, [i, k, As[cut], a, c],
                                   f"S{i},{k}(A,{c}) is not an initial part")
                probes = [p for p in (cut - 1, cut) if 0 <= p < len(As)]
            for p in probes:
                a = As[p]
                d = row[p] if row is not None else direct.member(a, c)
                if d != comp.member(a, c):
                    return Verdict("coherence", depth, False, [i, j, k, a, c],
                                   f"S{i},{k} and S{j},{k}∘S{i},{j} disagree at ({a}, {c})")
    return Verdict("coherence", depth, True)


def check_family(F: ShuffleFamily, depth: int = 50, exhaustive: bool = True) -> List[Verdict]:
    out = []
    for (i, j), S in sorted(F.relations.items()):
        mono = check_monotone(S, depth)
        shuf = check_shuffling(S, depth, monotone=Verdict(mono.check, mono.depth, mono.passed,
                                                           mono.counterexample, mono.detail))
        for v in (mono, shuf):
            v.check = f"{v.check}[{i},{j}]"
            out.append(v)
    out.append(check_coherence(F, depth, exhaustive))
    return out


# -- cuts and the limit structure ----------------------------------------------------------


@dataclass(frozen=True)
class Cut:
    """The cut ``(-inf, anchor)`` of order 0 when ``origin == 0``, otherwise ``S_{0,origin}(A_0, anchor)``."""

    origin: int
    anchor: Any

    def __repr__(self):
        return f"Cut({self.origin}, {self.anchor})"


LT, GT = "LT", "GT"


def cut_embed(F: ShuffleFamily, i: int, a) -> Cut:
    if not 0 <= i < len(F):
        raise IndexError(f"no order with index {i}")
    if not F.orders[i].contains(a):
        raise ValueError(f"{a} is not in the carrier of order {i}")
    return Cut(i, a)


def cut_compare(F: ShuffleFamily, c1: Cut, c2: Cut) -> str:
    if c1.origin == c2.origin:
        if c1.anchor == c2.anchor:
            raise ValueError("cannot compare a cut with itself")
        return LT if F.orders[c1.origin].less(c1.anchor, c2.anchor) else GT
    if c1.origin < c2.origin:
        return LT if F.rel(c1.origin, c2.origin).member(c1.anchor, c2.anchor) else GT
    return GT if F.rel(c2.origin, c1.origin).member(c2.anchor, c1.anchor) else LT


def cut_threshold(F: ShuffleFamily, c: Cut) -> Optional[Fraction]:
    """The cut as the open ray ``A_0 ∩ (-inf, t)``; ``None`` without a fiber solver."""
    if c.origin == 0:
        return c.anchor
    return F.rel(0, c.origin).left_fiber(c.anchor)


class CutRelation:
    """``S_{i,j}`` lifted to cuts: holds for a pair of cuts of origins ``i``, ``j`` in that order."""

    def __init__(self, limit: "LimitOrder", i: int, j: int):
        self.limit, self.i, self.j = limit, i, j

    def member(self, x: Cut, y: Cut) -> bool:
        return x.origin == self.i and y.origin == self.j and self.limit.family.rel(self.i, self.j).member(x.anchor, y.anchor)

    def bounds_for_right(self, left_img: Cut, truth: bool, color):
        # constraint on a new right argument of color ``color`` given its left partner
        if left_img.origin != self.i or color != self.j:
            return None, None
        return (left_img, None) if truth else (None, left_img)

    def bounds_for_left(self, right_img: Cut, truth: bool, color):
        if right_img.origin != self.j or color != self.i:
            return None, None
        return (None, right_img) if truth else (right_img, None)


class LimitOrder(RealizedOrder):
    """Union of the canonical cut images of a coherent family, colored by origin index."""

    def __init__(self, F: ShuffleFamily, with_relations: bool = True):
        super().__init__(name="limit")
        self.family = F
        if with_relations:
            for i, j in F.relations:
                self.relations[f"S{i},{j}"] = CutRelation(self, i, j)

    def contains(self, x):
        return isinstance(x, Cut) and 0 <= x.origin < len(self.family) and self.family.orders[x.origin].contains(x.anchor)

    def color(self, x):
        return x.origin

    def less(self, x, y):
        return x != y and cut_compare(self.family, x, y) == LT

    def palette(self):
        return frozenset(range(len(self.family)))

    def _iter_elements(self):
        F = self.family
        pos = [0] * len(F)
        live = list(range(len(F)))
        while live:
            for i in list(live):
                batch = F.orders[i].elements(pos[i] + 1)
                if len(batch) <= pos[i]:
                    live.remove(i)
                    continue
                pos[i] += 1
                yield Cut(i, batch[-1])

    def _bound_for(self, c: Cut, i: int, above: bool):
        """Translate ``c < Cut(i, a)`` (``above``) or ``Cut(i, a) < c`` into a rational bound on ``a``.

        Returns ``(kind, value)`` with kind ``"open"`` or ``"closed"``.
        """
        F = self.family
        j, b = c.origin, c.anchor
        if j == i:
            return "open", b
        if j < i:
            t = F.rel(j, i).right_fiber(b)
            # c < Cut(i,a) iff (b, a) in S_{j,i} iff a > t
            kind = "open" if above else "closed"
        else:
            t = F.rel(i, j).left_fiber(b)
            # Cut(i,a) < c iff (a, b) in S_{i,j} iff a < t
            kind = "closed" if above else "open"
        if t is None:
            raise IncompleteSolverError(f"relation between orders {i} and {j} has no fiber solver")
        return kind, t

    def find_witness(self, lower=None, upper=None, color=None):
        if lower is not None and upper is not None and not self.less(lower, upper):
            raise ValueError(f"malformed interval ({lower}, {upper})")
        colors = range(len(self.family)) if color is None else [color]
        for i in colors:
            if not 0 <= i < len(self.family):
                continue
            A = self.family.orders[i]
            lo = hi = None
            closed: List[Fraction] = []
            if lower is not None:
                kind, lo = self._bound_for(lower, i, True)
                if kind == "closed":
                    closed.append(lo)
            if upper is not None:
                kind, hi = self._bound_for(upper, i, False)
                if kind == "closed":
                    closed.append(hi)
            if lo is not None and hi is not None and not lo <= hi:
                continue
            a = None
            for e in closed:
                if A.contains(e) and self._inside(Cut(i, e), lower, upper):
                    a = e
                    break
            if a is None and (lo is None or hi is None or lo < hi):
                a = A.find_witness(lo, hi, None)
            if a is not None:
                cut = Cut(i, a)
                if not self._inside(cut, lower, upper):
                    raise IncompleteSolverError(f"witness {cut} escaped ({lower}, {upper})")
                return cut
        return None

    def _inside(self, c, lower, upper):
        return (lower is None or self.less(lower, c)) and (upper is None or self.less(c, upper))

    def minimum(self):
        for i, A in enumerate(self.family.orders):
            m = A.minimum()
            if m is not None:
                return Cut(i, m)
        return None

    def maximum(self):
        for i, A in enumerate(self.family.orders):
            m = A.maximum()
            if m is not None:
                return Cut(i, m)
        return None


def limit_structure(F: ShuffleFamily, depth: int = 0) -> LimitOrder:
    """Form the limit structure; with ``depth > 0`` coherence is verified first."""
    if F.pairwise_only:
        raise ValueError("family is only pairwise shuffled; the limit needs coherence")
    if depth > 0:
        v = check_coherence(F, depth)
        if not v:
            raise ValueError(f"coherence violated: {v.detail}")
    return LimitOrder(F)
