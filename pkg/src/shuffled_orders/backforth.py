"""Partial isomorphisms over the quantifier-free signature (order, colors, binary relations).

``build_iso`` dovetails the two enumerations, seeding distinguished elements
(endpoints first) and extending one element at a time through the target's
complete witness solver.  An obstruction at some depth is evidence of
non-isomorphism; spec-level decisions come from :func:`decide_iso_spec`.

Relations in a structure's ``relations`` map must offer ``member(x, y)`` and
``bounds_for_right(d, truth, color)`` / ``bounds_for_left(d, truth, color)``,
which turn a required atom against an already mapped element ``d`` into
``(lower, upper)`` bounds on the new element.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

from .ordertype import Unsupported
from .realize import (
    ColoredOrderSpec,
    DenseShuffle,
    IncompleteSolverError,
    Point,
    RealizedOrder,
    normalize_spec,
)

FORTH, BACK = "forth", "back"


@dataclass(frozen=True)
class QfType:
    size: int
    atoms: frozenset


def qf_type(M: RealizedOrder, tup) -> QfType:
    tup = list(tup)
    atoms = set()
    for i, x in enumerate(tup):
        if not M.contains(x):
            raise ValueError(f"{x} is not in the carrier")
        atoms.add(("color", i, M.color(x)))
    for i, j in itertools.permutations(range(len(tup)), 2):
        x, y = tup[i], tup[j]
        if x == y:
            atoms.add(("=", i, j))
        elif M.less(x, y):
            atoms.add(("<", i, j))
        for name, R in M.relations.items():
            if R.member(x, y):
                atoms.add((name, i, j))
    return QfType(len(tup), frozenset(atoms))


def _new_atoms(M: RealizedOrder, prefix, x) -> frozenset:
    # atoms of prefix + [x] that mention the last position
    k = len(prefix)
    atoms = {("color", k, M.color(x))}
    for i, s in enumerate(prefix):
        atoms.add(("<", i, k) if M.less(s, x) else ("<", k, i))
        for name, R in M.relations.items():
            if R.member(s, x):
                atoms.add((name, i, k))
            if R.member(x, s):
                atoms.add((name, k, i))
    return frozenset(atoms)


@dataclass
class PartialIso:
    pairs: List[Tuple[Any, Any]] = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    @property
    def domain(self):
        return [a for a, _ in self.pairs]

    @property
    def range(self):
        return [b for _, b in self.pairs]

    def image(self, x):
        for a, b in self.pairs:
            if a == x:
                return b
        raise KeyError(x)

    def verify(self, M: RealizedOrder, N: RealizedOrder) -> bool:
        """Independent re-check of every atom on the graph of the map."""
        if len(set(self.domain)) != len(self) or len(set(self.range)) != len(self):
            return False
        return qf_type(M, self.domain) == qf_type(N, self.range)


@dataclass
class Obstruction:
    element: Any
    side: str
    depth: int
    reason: str

    def __bool__(self):
        return False


def _check_signature(M, N):
    if set(M.relations) != set(N.relations):
        raise ValueError("structures do not share a relational signature")


def extend(M: RealizedOrder, N: RealizedOrder, f: PartialIso, x, side: str = FORTH) -> Optional[PartialIso]:
    """Add ``x`` (from ``M`` going forth, from ``N`` going back); ``None`` when no partner exists."""
    _check_signature(M, N)
    if side == FORTH:
        src, dst, pairs = M, N, list(f.pairs)
    elif side == BACK:
        src, dst, pairs = N, M, [(b, a) for a, b in f.pairs]
    else:
        raise ValueError(f"side must be {FORTH!r} or {BACK!r}")
    if any(s == x for s, _ in pairs):
        raise ValueError(f"{x} is already mapped")

    lower = upper = None

    def raise_lower(v):
        nonlocal lower
        if v is not None and (lower is None or dst.less(lower, v)):
            lower = v

    def drop_upper(v):
        nonlocal upper
        if v is not None and (upper is None or dst.less(v, upper)):
            upper = v

    for s, d in pairs:
        if src.less(s, x):
            raise_lower(d)
        else:
            drop_upper(d)
    color = src.color(x)
    for name, R in src.relations.items():
        Rd = dst.relations[name]
        for s, d in pairs:
            lo, hi = Rd.bounds_for_right(d, R.member(s, x), color)
            raise_lower(lo)
            drop_upper(hi)
            lo, hi = Rd.bounds_for_left(d, R.member(x, s), color)
            raise_lower(lo)
            drop_upper(hi)
    if lower is not None and upper is not None and not dst.less(lower, upper):
        return None
    y = dst.find_witness_label(lower, upper, src.bf_label(x))
    if y is None:
        return None
    if y in (d for _, d in pairs) or \
            _new_atoms(src, [s for s, _ in pairs], x) != _new_atoms(dst, [d for _, d in pairs], y):
        raise IncompleteSolverError(f"witness {y} for {x} does not realize its atomic type")
    new_pairs = pairs + [(x, y)]
    if side == BACK:
        new_pairs = [(b, a) for a, b in new_pairs]
    return PartialIso(new_pairs)


def _seed_order(name: str):
    return (0 if name == "min" else 1 if name == "max" else 2, name)


def build_iso(M: RealizedOrder, N: RealizedOrder, steps: int = 64):
    """Back-and-forth for ``steps`` pairs; returns a :class:`PartialIso` or an :class:`Obstruction`."""
    _check_signature(M, N)
    f = PartialIso()
    dM, dN = M.distinguished(), N.distinguished()
    for name in sorted(set(dM) | set(dN), key=_seed_order):
        if name not in dN:
            return Obstruction(dM[name], FORTH, len(f), f"{name} of the first structure has no counterpart")
        if name not in dM:
            return Obstruction(dN[name], BACK, len(f), f"{name} of the second structure has no counterpart")
        a, b = dM[name], dN[name]
        if a in f.domain or b in f.range:
            if (a, b) not in f.pairs:
                return Obstruction(a, FORTH, len(f), f"{name} clashes with an earlier seed")
            continue
        g = PartialIso(f.pairs + [(a, b)])
        if not g.verify(M, N):
            return Obstruction(a, FORTH, len(f), f"{name} differs in atomic type")
        f = g

    cursors = {FORTH: 0, BACK: 0}

    def next_unmapped(side):
        src = M if side == FORTH else N
        used = set(f.domain if side == FORTH else f.range)
        while True:
            i = cursors[side]
            batch = src.elements(i + 1)
            if len(batch) <= i:
                return None
            cursors[side] = i + 1
            if batch[i] not in used:
                return batch[i]

    while len(f) < steps:
        progressed = False
        for side in (FORTH, BACK):
            if len(f) >= steps:
                break
            x = next_unmapped(side)
            if x is None:
                continue
            g = extend(M, N, f, x, side)
            if g is None:
                return Obstruction(x, side, len(f), f"{x} has no partner of the same atomic type")
            f = g
            progressed = True
        if not progressed:
            break
    return f


# -- spec-level decisions -----------------------------------------------------------


@dataclass(frozen=True)
class IsoDecision:
    iso: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.iso


def _endpoint(blocks, first: bool):
    if not blocks:
        return None
    b = blocks[0] if first else blocks[-1]
    if isinstance(b, Point):
        return b.color
    return b.min if first else b.max


def decide_iso_spec(a: ColoredOrderSpec, b: ColoredOrderSpec) -> IsoDecision:
    """Isomorphism of realized specs: equality of canonical block lists, with the first
    distinguishing invariant as the reason."""
    for s in (a, b):
        if not isinstance(s, ColoredOrderSpec):
            raise Unsupported(f"not a colored order spec: {s!r}")
    na, nb = normalize_spec(a), normalize_spec(b)
    if na == nb:
        return IsoDecision(True)
    if na.palette() != nb.palette():
        return IsoDecision(False, f"color set differs: {sorted(na.palette())} vs {sorted(nb.palette())}")
    for first, word in ((True, "min"), (False, "max")):
        ea, eb = _endpoint(na.blocks, first), _endpoint(nb.blocks, first)
        if (ea is None) != (eb is None):
            return IsoDecision(False, f"{word} exists in {'first' if ea is not None else 'second'} only")
        if ea != eb:
            return IsoDecision(False, f"{word} color differs: {ea} vs {eb}")
    if len(na.blocks) != len(nb.blocks):
        return IsoDecision(False, f"block count differs: {len(na.blocks)} vs {len(nb.blocks)}")
    for i, (x, y) in enumerate(zip(na.blocks, nb.blocks)):
        if x != y:
            return IsoDecision(False, f"block {i} differs: {_describe(x)} vs {_describe(y)}")
    raise AssertionError("unequal canonical forms with no distinguishing block")


def _describe(block) -> str:
    if isinstance(block, Point):
        return f"point({block.color})"
    assert isinstance(block, DenseShuffle)
    return f"dense({sorted(block.colors)}, min={block.min}, max={block.max})"


def spec_corpus(size: int = 50, seed: int = 0) -> List[ColoredOrderSpec]:
    """A fixed corpus of specs with at most 4 blocks and 4 colors.

    It opens with hand-picked groups that are isomorphic without being equal
    (merged shuffles, points folded in as endpoints) and is padded with seeded
    random specs.
    """
    import random

    D, P = DenseShuffle, Point
    seeded = [
        (D({0}),),
        (D({0}), D({0})),
        (D({0}), P(0), D({0})),
        (D({0}), P(0), D({0}), D({0})),
        (P(0), D({0})),
        (D({0}, 0, None),),
        (D({0}), P(0)),
        (D({0}, None, 0),),
        (P(1), D({0, 1})),
        (D({0, 1}, 1, None),),
        (D({0, 1}), P(1), D({0, 1})),
        (D({0, 1}),),
        (P(0), D({0, 1}), P(1)),
        (D({0, 1}, 0, 1),),
        (P(0), P(1)),
        (P(1), P(0)),
        (P(2),),
        (),
        (D({1, 2, 3}), P(0)),
        (D({0, 1, 2, 3}), D({0})),
    ]
    vocab = [P(c) for c in range(4)] + [
        D({0}), D({1}), D({0, 1}), D({0, 1}, 0, None), D({0, 1}, None, 1),
        D({2, 3}, 2, 3), D({0, 1, 2}), D({0, 1, 2, 3}, None, 3),
    ]
    rng = random.Random(seed)
    out = [ColoredOrderSpec(b) for b in seeded]
    raw = {s.blocks for s in out}
    while len(out) < size:
        blocks = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 4)))
        if blocks not in raw:
            raw.add(blocks)
            out.append(ColoredOrderSpec(blocks))
    return out[:size]
