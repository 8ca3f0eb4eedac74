"""Concrete models of the example theories, their invariants, and isomorphism decisions.

Supported theories:

``T0``
    convex colors ``C_n`` filling an initial part, plus the uncolored part ``p``.
``T1``
    ``T0`` with ``B`` dense colors ``D_j`` everywhere; the color of ``min p`` is an invariant.
``TDENSE``
    ``B`` dense colors plus the uncolored part ``q``.
``TSHUF``
    ``B`` shuffled convex blocks ``O_i`` forming an initial part, plus the remainder ``p``.
``T91``
    ``B`` shuffled convex blocks ``O_i``, each carrying its own convex colors
    ``C_{i,n}`` and a final uncolored part ``p_i``, plus the pure order ``q``.

Infinite families are cut to ``B`` members (the truncation).
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import counting
from .backforth import PartialIso, build_iso
from .ordertype import (
    CANONICAL_SIX,
    EMPTY,
    ETA,
    ONE,
    ONE_ETA,
    Leaf,
    OrderType,
    Sum,
    finite,
    from_name,
    normalize,
    to_name,
)
from .realize import (
    BLANK,
    DenseSeg,
    OracleInconsistency,
    PointSeg,
    Segment,
    SegmentOrder,
    equality_equivalence,
    quotient_by_convex_equivalence,
)
from .shuffle import ShiftedRelation, ShuffleFamily, Verdict, check_family

THEORIES = ("T0", "TDENSE", "T1", "TSHUF", "T91")
HALF = Fraction(1, 2)

UNSUPPORTED = "UNSUPPORTED"


class IllegalTuple(ValueError):
    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class ModelSpecError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"field {field_name!r}: {message}")
        self.field = field_name


# -- invariant tuples ----------------------------------------------------------------


@dataclass(frozen=True)
class InvariantTuple:
    """Order types per type index; ``min_colors`` records the color of a part's minimum
    where the theory distinguishes it."""

    entries: Tuple[Tuple[str, OrderType], ...]
    truncation: Optional[int] = None
    min_colors: Tuple[Tuple[str, int], ...] = ()

    @classmethod
    def of(cls, entries: Dict[str, OrderType], truncation=None, min_colors=None) -> "InvariantTuple":
        return cls(tuple(entries.items()), truncation, tuple(sorted((min_colors or {}).items())))

    def __getitem__(self, index: str) -> OrderType:
        for k, v in self.entries:
            if k == index:
                return v
        raise KeyError(index)

    @property
    def indices(self) -> List[str]:
        return [k for k, _ in self.entries]

    def min_color(self, index: str) -> Optional[int]:
        return dict(self.min_colors).get(index)

    def to_json(self, theory: str) -> dict:
        out: dict = {"theory": theory, "truncation": self.truncation,
                     "tuple": {k: to_name(v) for k, v in self.entries}}
        if self.min_colors:
            out["min-colors"] = dict(self.min_colors)
        return out

    def describe(self) -> str:
        body = ", ".join(f"{k}: {to_name(v)}" for k, v in self.entries)
        if self.min_colors:
            body += "; min colors " + ", ".join(f"{k}: D{c}" for k, c in self.min_colors)
        return "{" + body + "}"


def indices(theory: str, truncation: Optional[int]) -> List[str]:
    _check_theory(theory)
    if theory in ("T0", "T1", "TSHUF"):
        return ["p"]
    if theory == "TDENSE":
        return ["q"]
    return ["q"] + [f"p{i}" for i in range(_need_b(theory, truncation))]


def _check_theory(theory: str):
    if theory not in THEORIES:
        raise ValueError(f"unknown theory {theory!r}; expected one of {THEORIES}")


def _need_b(theory: str, truncation: Optional[int]) -> int:
    if theory == "T0":
        return 0
    if truncation is None or isinstance(truncation, bool) or not isinstance(truncation, int) or truncation < 1:
        raise ValueError(f"{theory} needs a positive truncation, got {truncation!r}")
    return truncation


def tuple_from_json(data: Any) -> Tuple[str, InvariantTuple]:
    """Parse a model spec document into ``(theory, tuple)``."""
    if not isinstance(data, dict):
        raise ModelSpecError("<document>", "expected an object")
    unknown = set(data) - {"theory", "truncation", "tuple", "min-colors"}
    if unknown:
        raise ModelSpecError(sorted(unknown)[0], "unknown key")
    theory = data.get("theory")
    if theory not in THEORIES:
        raise ModelSpecError("theory", f"expected one of {THEORIES}, got {theory!r}")
    trunc = data.get("truncation")
    try:
        idx = indices(theory, trunc)
    except ValueError as exc:
        raise ModelSpecError("truncation", str(exc)) from None
    raw = data.get("tuple")
    if not isinstance(raw, dict):
        raise ModelSpecError("tuple", "expected an object mapping type indices to order type names")
    if set(raw) != set(idx):
        raise ModelSpecError("tuple", f"expected exactly the indices {idx}, got {sorted(raw)}")
    entries = {}
    for k in idx:
        try:
            entries[k] = from_name(raw[k])
        except ValueError as exc:
            raise ModelSpecError(f"tuple.{k}", str(exc)) from None
    mins = data.get("min-colors", {})
    if not isinstance(mins, dict):
        raise ModelSpecError("min-colors", "expected an object")
    for k, v in mins.items():
        if k not in idx:
            raise ModelSpecError(f"min-colors.{k}", "not a type index of this theory")
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ModelSpecError(f"min-colors.{k}", f"expected a non-negative integer, got {v!r}")
    return theory, InvariantTuple.of(entries, trunc if theory != "T0" else None, mins)


def load_model_spec(path: str) -> Tuple[str, InvariantTuple]:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSpecError("<document>", f"line {exc.lineno}: {exc.msg}") from None
    return tuple_from_json(data)


# -- legality ------------------------------------------------------------------------


@dataclass(frozen=True)
class Group:
    """Type indices forming one non-orthogonality class, with the class kind."""

    indices: Tuple[str, ...]
    kind: str  # a counting kind, or "free" for grammar-unconstrained parts
    shuffled: bool = False


def schema(theory: str, truncation: Optional[int]) -> List[Group]:
    idx = indices(theory, truncation)
    if theory == "TDENSE":
        return [Group(("q",), "free")]
    if theory == "T91":
        return [Group(("q",), counting.DEFINABLE_RIGHT),
                Group(tuple(idx[1:]), counting.DEFINABLE_RIGHT, shuffled=True)]
    return [Group(("p",), counting.DEFINABLE_RIGHT)]


def _family_violations(ts: Sequence[OrderType], kind: str, shuffled: bool) -> List[Tuple[str, str]]:
    out = []
    realized = [t for t in ts if not t.is_empty]
    if shuffled:
        # a one-point entry also has both endpoints, so its own clause is reported first
        if any(t == ONE for t in realized) and len(realized) > 1:
            out.append(("singleton-forces-omission", "a one-point entry forces every other entry to be empty"))
        if sum(t.min_exists for t in realized) > 1:
            out.append(("at-most-one-min", "two entries have a minimum"))
        if sum(t.max_exists for t in realized) > 1:
            out.append(("at-most-one-max", "two entries have a maximum"))
        if any(t.is_dense for t in realized) and not all(t.is_dense for t in realized):
            out.append(("dense-forces-dense", "a dense entry forces every other realized entry to be dense"))
    if kind == counting.DEFINABLE_RIGHT and any(t.is_dense and t.has_max for t in ts):
        out.append(("orientation", "right-definable classes admit no maximum"))
    if kind == counting.DEFINABLE_LEFT and any(t.is_dense and t.has_min for t in ts):
        out.append(("orientation", "left-definable classes admit no minimum"))
    if kind != "free" and not out:
        legal = counting.enumerate_invariant_tuples(counting.ClassSummary(len(ts), kind))
        if tuple(ts) not in legal:
            out.append(("membership", f"not among the {len(legal)} legal tuples of this class"))
    return out


def legality_violations(theory: str, t: InvariantTuple) -> List[Tuple[str, str]]:
    """Violated legality clauses as ``(clause, message)``, in a fixed clause order."""
    out: List[Tuple[str, str]] = []
    if t.indices != indices(theory, t.truncation):
        return [("indices", f"expected indices {indices(theory, t.truncation)}")]
    for g in schema(theory, t.truncation):
        out += _family_violations([t[k] for k in g.indices], g.kind, g.shuffled)
    for k in t.indices:
        c = t.min_color(k)
        has_min = t[k].min_exists
        if theory == "T1":
            if has_min and c is None:
                out.append(("min-color", f"{k} has a minimum but no minimum color"))
            elif not has_min and c is not None:
                out.append(("min-color", f"{k} has no minimum to color"))
            elif c is not None and not c < t.truncation:
                out.append(("min-color", f"color D{c} exceeds the truncation {t.truncation}"))
        elif c is not None:
            out.append(("min-color", f"{theory} does not distinguish minimum colors"))
    return out


def check_legal(theory: str, t: InvariantTuple) -> None:
    bad = legality_violations(theory, t)
    if bad:
        raise IllegalTuple(*bad[0])


def family_legal(ts: Sequence[OrderType], kind: str) -> List[Tuple[str, str]]:
    """Legality of one shuffled class taken on its own."""
    return _family_violations(list(ts), kind, shuffled=True)


def realizable(theory: str, index: str) -> Dict[str, bool]:
    """Which of the six canonical types the builder can place at ``index``."""
    groups = schema(theory, None if theory == "T0" else 1)
    if theory == "T91" and index.startswith("p"):
        index = "p0"
    g = next((g for g in groups if index in g.indices), None)
    if g is None:
        raise KeyError(f"{theory} has no type index {index!r}")
    if g.kind == "free":
        return {to_name(t): True for t in CANONICAL_SIX}
    singles = {ts[0] for ts in counting.enumerate_invariant_tuples(counting.ClassSummary(1, g.kind))}
    return {to_name(t): t in singles for t in CANONICAL_SIX}


# -- models --------------------------------------------------------------------------


class _Labels:
    def __init__(self, label, solve):
        self._label, self._solve = label, solve

    def label(self, band, cls):
        return self._label(band, cls)

    def solve(self, color):
        return self._solve(color)


class Model(SegmentOrder):
    """A built model: one realized order plus its named parts and shuffled families."""

    def __init__(self, theory: str, requested: InvariantTuple, segments: Sequence[Segment],
                 parts: Dict[str, List[Segment]], specials: Dict[str, Fraction],
                 blocks: int = 0, inner_colors: bool = False):
        super().__init__(segments, name=f"{theory} model")
        self.theory = theory
        self.requested = requested
        self.part_segments = parts
        self.parts = {k: SegmentOrder(v, name=k) for k, v in parts.items()}
        self.specials = dict(specials)
        self._special_at = {x: k for k, x in specials.items()}
        self.blocks = blocks
        self.inner_colors = inner_colors
        self.family: Optional[ShuffleFamily] = None
        if blocks:
            self._block_segments = [[s for s in self.segments if self._seg_block(s) == i] for i in range(blocks)]
            self.relations = {f"S{i},{j}": BlockRelation(self, i, j)
                              for i in range(blocks) for j in range(i + 1, blocks)}
            self.family = self.block_family()

    # global order

    def minimum(self):
        return self._extreme(lambda s: s.minimum(), lambda m: self.find_witness(None, m))

    def maximum(self):
        return self._extreme(lambda s: s.maximum(), lambda m: self.find_witness(m, None))

    def _extreme(self, pick, beyond):
        # segments may interleave, so every segment endpoint is a candidate
        for c in (pick(s) for s in self.segments):
            if c is not None and beyond(c) is None:
                return c
        return None

    # back-and-forth hooks

    def bf_label(self, x):
        return (self.color(x), self._special_at.get(x))

    def find_witness_label(self, lower, upper, label):
        color, special = label
        if special is not None:
            x = self.specials.get(special)
            if x is None or (lower is not None and not lower < x) or (upper is not None and not x < upper):
                return None
            return x if self.color(x) == color else None
        for seg in self.segments:
            if isinstance(seg, PointSeg) and seg.x in self._special_at:
                continue
            x = seg.find_witness(lower, upper, color)
            if x is not None:
                return x
        return None

    def distinguished(self):
        out = super().distinguished()
        out.update(self.specials)
        return out

    # shuffled blocks

    def block_of(self, x) -> Optional[int]:
        if not self.blocks or not 0 < x < self.blocks:
            return None
        i = int(x)
        if x == i or not any(s.contains(x) for s in self._block_segments[i]):
            return None
        return i

    def _seg_block(self, seg: Segment) -> Optional[int]:
        lo = seg.lo
        return int(lo) if lo is not None and 0 <= lo < self.blocks else None

    def block_order(self, i: int, keep=lambda seg: True) -> SegmentOrder:
        return SegmentOrder([s for s in self.segments if self._seg_block(s) == i and keep(s)], name=f"O{i}")

    def block_family(self, keep=lambda seg: True) -> ShuffleFamily:
        orders = [self.block_order(i, keep) for i in range(self.blocks)]
        rels = {(i, j): ShiftedRelation(orders[i], orders[j], shift=i - j, name=f"S{i},{j}")
                for i in range(self.blocks) for j in range(i + 1, self.blocks)}
        return ShuffleFamily(orders, rels)

    def band_segments(self) -> Tuple[DenseSeg, ...]:
        """The convex-color segment of each block, in block order."""
        return tuple(s for s in self.segments if isinstance(s, DenseSeg) and s.bands is not None)

    def color_family(self, n: int) -> ShuffleFamily:
        """The ``n``-th inner colors of all blocks with the restricted relations."""
        return _color_family(self.band_segments(), n)

    def part_family(self) -> ShuffleFamily:
        names = [f"p{i}" for i in range(self.blocks)]
        orders = [self.parts[k] for k in names]
        rels = {(i, j): ShiftedRelation(orders[i], orders[j], shift=i - j, name=f"S{i},{j}|p")
                for i in range(self.blocks) for j in range(i + 1, self.blocks)}
        return ShuffleFamily(orders, rels)


# Builders hand out the same convex-color segments for equal parameters, so the
# orders and family checks derived from them below are computed once.


@functools.lru_cache(maxsize=None)
def _band_order(seg: DenseSeg, n: int) -> SegmentOrder:
    lo, hi = seg.band_interval(n)
    piece = DenseSeg(seg.globalize(lo), seg.globalize(hi), seg.labels, origin=seg.origin, scale=seg.scale,
                     valuation=seg.valuation, keep=seg.keep)
    return SegmentOrder([piece], name=f"C{n}")


@functools.lru_cache(maxsize=None)
def _color_family(segs: Tuple[DenseSeg, ...], n: int) -> ShuffleFamily:
    orders = [_band_order(s, n) for s in segs]
    rels = {(i, j): ShiftedRelation(orders[i], orders[j], shift=i - j, name=f"S{i},{j}|C{n}")
            for i in range(len(segs)) for j in range(i + 1, len(segs))}
    return ShuffleFamily(orders, rels)


@functools.lru_cache(maxsize=None)
def _color_family_verdicts(segs: Tuple[DenseSeg, ...], n: int, depth: int, exhaustive: bool) -> Tuple[Verdict, ...]:
    return tuple(check_family(_color_family(segs, n), depth, exhaustive))


class BlockRelation:
    """``S_{i,j}`` on a model: ``x`` in block ``i``, ``y`` in block ``j``, and ``x`` lies
    left of ``y`` in local coordinates."""

    def __init__(self, model: Model, i: int, j: int):
        self.model, self.i, self.j = model, i, j
        self.shift = j - i

    def member(self, x, y) -> bool:
        if not (self.i < x < self.i + 1 and self.j < y < self.j + 1 and x + self.shift < y):
            return False
        M = self.model
        return M.block_of(x) == self.i and M.block_of(y) == self.j

    def _color_block(self, color) -> Optional[int]:
        return color[1] if isinstance(color, tuple) and len(color) >= 2 and color[0] in ("O", "C") else None

    def bounds_for_right(self, d, truth: bool, color):
        if self.model.block_of(d) != self.i or self._color_block(color) != self.j:
            return (d, d) if truth else (None, None)
        t = d + self.shift
        return (t, None) if truth else (None, t)

    def bounds_for_left(self, d, truth: bool, color):
        if self.model.block_of(d) != self.j or self._color_block(color) != self.i:
            return (d, d) if truth else (None, None)
        t = d - self.shift
        return (None, t) if truth else (t, None)


# -- builders ------------------------------------------------------------------------


def _uncolored_tail(start: Fraction, t: OrderType, color, part: str):
    """Segments of type ``t`` placed on ``[start, inf)``; only 0, eta and 1+eta occur."""
    if t.is_empty:
        return [], {}
    if t == ETA:
        return [DenseSeg(start, None, _const(color))], {}
    if t == ONE_ETA:
        return [PointSeg(start, color), DenseSeg(start, None, _const(color))], {f"{part}min": start}
    raise IllegalTuple("membership", f"{part} cannot have type {to_name(t)}")


def _const(color):
    return _Labels(lambda band, cls: color, lambda c: [(None, None)] if c == color else [])


@functools.lru_cache(maxsize=None)
def _c_bands(lo, hi, block: Optional[int] = None, d_colors: int = 0, mod: Optional[int] = None):
    """Convex colors filling ``(lo, hi)`` as bands accumulating at ``hi``."""
    lo, hi = Fraction(lo), Fraction(hi)
    if d_colors:
        labels = _Labels(lambda band, cls: ("C", band, "D", cls),
                         lambda c: [(c[1], c[3])] if isinstance(c, tuple) and len(c) == 4 and c[0] == "C" else [])
        return DenseSeg(lo, hi, labels, valuation=("cap", d_colors - 1) if d_colors > 1 else None,
                        bands=(lo, hi))
    if block is None:
        labels = _Labels(lambda band, cls: ("C", band),
                         lambda c: [(c[1], 0)] if isinstance(c, tuple) and len(c) == 2 and c[0] == "C" else [])
        return DenseSeg(lo, hi, labels, bands=(lo, hi))
    labels = _Labels(lambda band, cls: ("C", block, band),
                     lambda c: [(c[2], block)] if isinstance(c, tuple) and len(c) == 3 and c[:2] == ("C", block) else [])
    origin = Fraction(block)
    return DenseSeg(lo, hi, labels, origin=origin, valuation=("mod", mod), keep=frozenset([block % mod]),
                    bands=(lo - origin, hi - origin))


def _build_t0(t: InvariantTuple) -> Model:
    bands = _c_bands(-1, 0)
    tail, specials = _uncolored_tail(Fraction(0), t["p"], BLANK, "p")
    return Model("T0", t, [bands] + tail, {"p": tail}, specials)


def _d_labels(B: int):
    return _Labels(lambda band, cls: ("D", cls),
                   lambda c: [(None, c[1])] if isinstance(c, tuple) and len(c) == 2 and c[0] == "D" and 0 <= c[1] < B else [])


def _build_t1(t: InvariantTuple) -> Model:
    B = t.truncation
    bands = _c_bands(-1, 0, d_colors=B)
    p = t["p"]
    val = ("cap", B - 1) if B > 1 else None
    tail: List[Segment] = []
    specials = {}
    if p.is_dense:
        if p.has_min:
            tail.append(PointSeg(Fraction(0), ("D", t.min_color("p"))))
            specials["pmin"] = Fraction(0)
        tail.append(DenseSeg(Fraction(0), None, _d_labels(B), valuation=val))
    return Model("T1", t, [bands] + tail, {"p": tail}, specials)


def _build_tdense(t: InvariantTuple) -> Model:
    B = t.truncation
    q = t["q"]
    colored = DenseSeg(None, None, _d_labels(B), valuation=("mod", B + 1), keep=frozenset(range(B)))
    c0 = Fraction(1, 2 ** B)

    def qseg(lo, hi):
        return DenseSeg(lo, hi, _const(BLANK), valuation=("mod", B + 1), keep=frozenset([B]))

    qsegs: List[Segment] = []
    specials = {}
    if q.is_finite:
        for k in range(q.n):
            qsegs.append(PointSeg(c0 + k, BLANK))
            specials[f"q{k}"] = c0 + k
    elif q.is_dense:
        lo = c0 if q.has_min else None
        hi = None if not q.has_max else (c0 + 1 if q.has_min else c0)
        if lo is not None:
            qsegs.append(PointSeg(lo, BLANK))
            specials["qmin"] = lo
        qsegs.append(qseg(lo, hi))
        if hi is not None:
            qsegs.append(PointSeg(hi, BLANK))
            specials["qmax"] = hi
    return Model("TDENSE", t, [colored] + qsegs, {"q": qsegs}, specials)


@functools.lru_cache(maxsize=None)
def _block_dense(i: int, lo: Fraction, mod: int) -> DenseSeg:
    """Block ``i``'s uncolored elements on ``(lo, i + 1)``."""
    labels = _Labels(lambda band, cls: ("O", i), lambda c: [(None, i)] if c == ("O", i) else [])
    return DenseSeg(lo, Fraction(i + 1), labels, origin=Fraction(i), valuation=("mod", mod), keep=frozenset([i]))


def _shuffled_blocks(B: int, inner: bool, t: Optional[InvariantTuple]):
    segs: List[Segment] = []
    parts: Dict[str, List[Segment]] = {}
    specials: Dict[str, Fraction] = {}
    mod = max(B, 1)
    for i in range(B):
        origin = Fraction(i)
        if not inner:
            segs.append(_block_dense(i, origin, mod))
            continue
        segs.append(_c_bands(origin, origin + HALF, block=i, mod=mod))
        p = t[f"p{i}"]
        part: List[Segment] = []
        if p.has_min:
            part.append(PointSeg(origin + HALF, ("O", i)))
            specials[f"p{i}min"] = origin + HALF
        if p.is_dense:
            part.append(_block_dense(i, origin + HALF, mod))
        segs += part
        parts[f"p{i}"] = part
    return segs, parts, specials


def _build_tshuf(t: InvariantTuple) -> Model:
    B = t.truncation
    segs, parts, specials = _shuffled_blocks(B, inner=False, t=None)
    tail, sp = _uncolored_tail(Fraction(B), t["p"], BLANK, "p")
    specials.update(sp)
    parts["p"] = tail
    return Model("TSHUF", t, segs + tail, parts, specials, blocks=B)


def _build_t91(t: InvariantTuple) -> Model:
    B = t.truncation
    segs, parts, specials = _shuffled_blocks(B, inner=True, t=t)
    tail, sp = _uncolored_tail(Fraction(B), t["q"], BLANK, "q")
    specials.update(sp)
    parts = {"q": tail, **parts}
    return Model("T91", t, segs + tail, parts, specials, blocks=B, inner_colors=True)


_BUILDERS = {"T0": _build_t0, "T1": _build_t1, "TDENSE": _build_tdense, "TSHUF": _build_tshuf, "T91": _build_t91}


def build_model(theory: str, t: InvariantTuple) -> Model:
    _check_theory(theory)
    check_legal(theory, t)
    return _BUILDERS[theory](t)


# -- extraction ----------------------------------------------------------------------


def _spec_type(segs: Sequence[Segment]) -> OrderType:
    terms = []
    for s in segs:
        terms.append(Leaf(ONE) if isinstance(s, PointSeg) else Leaf(ETA))
    return normalize(Sum(tuple(terms))) if terms else EMPTY


def probe_type(part: SegmentOrder, probe: int = 300) -> OrderType:
    """Order type of a part read off its enumeration and witness oracle."""
    elems = sorted(part.elements(probe))
    if not elems:
        return EMPTY
    if len(elems) < probe:
        gaps = [part.find_witness(a, b) for a, b in zip(elems, elems[1:])]
        if all(g is None for g in gaps):
            return finite(len(elems))
        raise OracleInconsistency(f"{part.name}: enumeration ended but the order is not discrete")
    for a, b in zip(elems[:16], elems[1:17]):
        if part.find_witness(a, b) is None:
            raise OracleInconsistency(f"{part.name}: no element between {a} and {b}")
    lo, hi = part.minimum(), part.maximum()
    has_min = lo is not None and part.find_witness(None, lo) is None and lo <= elems[0]
    has_max = hi is not None and part.find_witness(hi, None) is None and hi >= elems[-1]
    if lo is None and part.find_witness(None, elems[0]) is None:
        raise OracleInconsistency(f"{part.name}: nothing below {elems[0]} yet no minimum")
    return OrderType("dense", has_min=has_min, has_max=has_max)


def extract_invariant_tuple(M: Model, probe: int = 300) -> InvariantTuple:
    """Classify each designated part from its segments and cross-check by probing
    the equality quotient of the part."""
    entries = {}
    for k in indices(M.theory, M.requested.truncation):
        exact = _spec_type(M.part_segments[k])
        quotient = quotient_by_convex_equivalence(M.parts[k], equality_equivalence())
        probed = probe_type(M.parts[k], probe)
        if quotient.elements(8) != M.parts[k].elements(8):
            raise OracleInconsistency(f"{k}: trivial quotient differs from the part")
        if probed != exact:
            raise OracleInconsistency(f"{k}: segments say {to_name(exact)}, probing says {to_name(probed)}")
        entries[k] = exact
    mins = {}
    if M.theory == "T1":
        lo = M.parts["p"].minimum()
        if lo is not None:
            mins["p"] = M.color(lo)[1]
    return InvariantTuple.of(entries, M.requested.truncation, mins)


# -- decisions -----------------------------------------------------------------------


@dataclass
class ModelDecision:
    verdict: str  # "ISO", "NOT_ISO" or "UNSUPPORTED"
    reason: Optional[str] = None
    witness: Optional[PartialIso] = None

    @property
    def iso(self) -> bool:
        return self.verdict == "ISO"


def decide_iso_models(M: Model, N: Model, evidence_depth: int = 0) -> ModelDecision:
    if M.theory != N.theory:
        raise ValueError(f"cannot compare a {M.theory} model with a {N.theory} model")
    if M.requested.truncation != N.requested.truncation:
        raise ValueError("models were built at different truncations")
    a, b = extract_invariant_tuple(M), extract_invariant_tuple(N)
    for k in a.indices:
        if a[k] != b[k]:
            return ModelDecision("NOT_ISO", f"{k} differs: {to_name(a[k])} vs {to_name(b[k])}")
        if a.min_color(k) != b.min_color(k):
            return ModelDecision("NOT_ISO", f"minimum color differs at {k}: D{a.min_color(k)} vs D{b.min_color(k)}")
    witness = None
    if evidence_depth:
        got = build_iso(M, N, evidence_depth)
        if not isinstance(got, PartialIso) or not got.verify(M, N):
            raise OracleInconsistency(f"equal invariants but back-and-forth stopped: {got}")
        witness = got
    return ModelDecision("ISO", None, witness)


@dataclass(frozen=True)
class CanonicalModel:
    name: Optional[str]
    tuple: InvariantTuple


_T0_NAMES = {EMPTY: "M_empty", ETA: "M_inf", ONE_ETA: "M_bullet"}


def list_canonical_models(theory: str, truncation: Optional[int] = None) -> List[CanonicalModel]:
    """Every legal invariant tuple at the given truncation, named where the theory names them."""
    _check_theory(theory)
    if theory != "T0":
        _need_b(theory, truncation)
    else:
        truncation = None
    out: List[CanonicalModel] = []
    if theory in ("T0", "TSHUF"):
        for (p,) in counting.enumerate_invariant_tuples(counting.ClassSummary(1, counting.DEFINABLE_RIGHT)):
            out.append(CanonicalModel(_T0_NAMES[p] if theory == "T0" else None,
                                      InvariantTuple.of({"p": p}, truncation)))
    elif theory == "T1":
        out.append(CanonicalModel("M_empty", InvariantTuple.of({"p": EMPTY}, truncation)))
        out.append(CanonicalModel("M_inf", InvariantTuple.of({"p": ETA}, truncation)))
        for i in range(truncation):
            out.append(CanonicalModel(f"M_{i}", InvariantTuple.of({"p": ONE_ETA}, truncation, {"p": i})))
    elif theory == "TDENSE":
        for q in CANONICAL_SIX:
            out.append(CanonicalModel(None, InvariantTuple.of({"q": q}, truncation)))
    else:
        qs = counting.enumerate_invariant_tuples(counting.ClassSummary(1, counting.DEFINABLE_RIGHT))
        ps = counting.enumerate_invariant_tuples(counting.ClassSummary(truncation, counting.DEFINABLE_RIGHT))
        for (q,) in qs:
            for p in ps:
                entries = {"q": q, **{f"p{i}": v for i, v in enumerate(p)}}
                out.append(CanonicalModel(None, InvariantTuple.of(entries, truncation)))
    for m in out:
        check_legal(theory, m.tuple)
    return out


# -- axiom checks --------------------------------------------------------------------


def _verdict(check, depth, bad=None, detail=""):
    return Verdict(check, depth, bad is None, bad, detail)


def _check_dlo(M: Model, depth: int) -> Verdict:
    if M.minimum() is not None:
        return _verdict("dense order without endpoints", depth, M.minimum(), "minimum exists")
    if M.maximum() is not None:
        return _verdict("dense order without endpoints", depth, M.maximum(), "maximum exists")
    elems = sorted(M.elements(depth))
    for a, b in zip(elems, elems[1:]):
        if M.find_witness(a, b) is None:
            return _verdict("dense order without endpoints", depth, [a, b], "no element in between")
    return _verdict("dense order without endpoints", depth)


def _check_convex_sequence(name: str, pieces: List[Tuple[Any, SegmentOrder]], whole: SegmentOrder,
                           depth: int) -> Verdict:
    """``pieces`` are open, convex, increasing, and their union is an initial part of ``whole``."""
    samples = {key: sorted(o.elements(depth)) for key, o in pieces}
    for key, o in pieces:
        xs = samples[key]
        if not xs:
            return _verdict(name, depth, key, "piece is empty")
        if o.minimum() is not None or o.maximum() is not None:
            return _verdict(name, depth, key, "piece has an endpoint")
        for a, b in zip(xs, xs[1:]):
            y = whole.find_witness(a, b)
            if y is not None and not o.contains(y):
                return _verdict(name, depth, [a, y, b], "piece is not convex")
    for (k1, _), (k2, _) in zip(pieces, pieces[1:]):
        if not samples[k1][-1] < samples[k2][0]:
            return _verdict(name, depth, [k1, k2], "pieces are out of order")
    union = [x for xs in samples.values() for x in xs]
    rest = [x for x in whole.elements(depth) if not any(o.contains(x) for _, o in pieces)]
    if rest and union and not max(union) < min(rest):
        return _verdict(name, depth, min(rest), "union is not an initial part")
    return _verdict(name, depth)


def _band_pieces(order: SegmentOrder, count: int, label) -> List[Tuple[Any, SegmentOrder]]:
    seg = next(s for s in order.segments if isinstance(s, DenseSeg) and s.bands is not None)
    return [(label(n), _band_order(seg, n)) for n in range(count)]


def check_axioms(M: Model, depth: int = 30, colors: int = 3, exhaustive: bool = False) -> List[Verdict]:
    """Axiom clauses of ``M``'s theory on samples of size ``depth``.

    ``colors`` bounds how many convex colors (and their shuffled families) are checked;
    ``exhaustive`` selects the all-pairs coherence check.
    """
    out = [_check_dlo(M, depth)]
    if M.theory in ("T0", "T1"):
        out.append(_check_convex_sequence("convex colors", _band_pieces(M, colors, lambda n: f"C{n}"), M, depth))
    if M.theory == "T1" and M.parts["p"].segments:
        p = M.parts["p"]
        xs = sorted(p.elements(depth))[:8]
        for j in range(M.requested.truncation):
            for a, b in zip(xs, xs[1:]):
                if p.find_witness(a, b, ("D", j)) is None:
                    out.append(_verdict("dense colors", depth, [a, b], f"D{j} misses the gap"))
                    break
            else:
                continue
            break
        else:
            out.append(_verdict("dense colors", depth))
    if M.blocks:
        blocks = [(f"O{i}", M.block_order(i)) for i in range(M.blocks)]
        out.append(_check_convex_sequence("blocks", blocks, M, depth))
        if M.inner_colors:
            for i, (_, o) in enumerate(blocks):
                out.append(_check_convex_sequence(f"colors of O{i}", _band_pieces(o, colors, lambda n: f"C{i},{n}"),
                                                  o, depth))
        out.append(_check_relation_domains(M, depth))
        for v in check_family(M.family, depth, exhaustive):
            out.append(Verdict(f"blocks: {v.check}", v.depth, v.passed, v.counterexample, v.detail))
        if M.inner_colors:
            for n in range(colors):
                for v in _color_family_verdicts(M.band_segments(), n, depth, exhaustive):
                    out.append(Verdict(f"color {n}: {v.check}", v.depth, v.passed, v.counterexample, v.detail))
    return out


def _check_relation_domains(M: Model, depth: int) -> Verdict:
    xs = M.elements(depth)
    for (name, R) in M.relations.items():
        for x in xs:
            for y in xs:
                if R.member(x, y) and not (M.block_of(x) == R.i and M.block_of(y) == R.j):
                    return _verdict("relation domains", depth, [name, x, y])
    return _verdict("relation domains", depth)
