"""Hereditarily finite sets over atoms, the permutation action, supports and witnesses.

JSON form of an :class:`HFA`: a set is a JSON array of its children in
canonical order; an atom with a string id ``s`` is the string ``"@s"`` and an
atom with an integer id ``n`` is the string ``"#n"``.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from .constructions import SURJECTION, MapWitness
from .perm import CapExceeded, Carrier, Perm, transposition

DEFAULT_DEPTH_CAP = 6
DEFAULT_CARRIER_CAP = 12
DEFAULT_GROUP_CAP = 10**5


class Atom:
    __slots__ = ("id", "_key")

    def __init__(self, id: Hashable):
        self.id = id
        self._key = (0, type(id).__name__, id)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Atom) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Atom({self.id!r})"


class HSet:
    """A finite set of HFA values, stored canonically sorted and deduplicated."""

    __slots__ = ("children", "_key", "_hash")

    def __init__(self, children: Iterable = ()):
        uniq = {c.key: c for c in children}
        self.children = tuple(uniq[k] for k in sorted(uniq))
        self._key = (1, tuple(sorted(uniq)))
        self._hash = hash(self._key)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, HSet) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __iter__(self):
        return iter(self.children)

    def __len__(self):
        return len(self.children)

    def __contains__(self, x):
        return any(c == x for c in self.children)

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.children)) + "}"


HFA = Atom | HSet  # type: ignore[operator]


def atoms_of(x) -> frozenset:
    """Atom ids occurring anywhere inside x."""
    if isinstance(x, Atom):
        return frozenset([x.id])
    out = set()
    for c in x:
        out |= atoms_of(c)
    return frozenset(out)


def depth(x) -> int:
    if isinstance(x, Atom):
        return 0
    return 1 + max((depth(c) for c in x), default=0)


def act(pi: Perm, x):
    """The image pi(x) = pi[x], applied hereditarily."""
    if isinstance(x, Atom):
        if x.id not in pi.carrier:
            raise ValueError(f"atom {x.id!r} is not in the permutation's carrier")
        return Atom(pi(x.id))
    return HSet(act(pi, c) for c in x)


def to_json(x):
    if isinstance(x, Atom):
        if isinstance(x.id, bool) or not isinstance(x.id, (int, str)):
            raise TypeError(f"atom id {x.id!r} cannot be serialized")
        return f"#{x.id}" if isinstance(x.id, int) else f"@{x.id}"
    return [to_json(c) for c in x]


def from_json(v):
    if isinstance(v, str):
        if v.startswith("#"):
            return Atom(int(v[1:]))
        if v.startswith("@"):
            return Atom(v[1:])
        raise ValueError(f"bad atom tag {v!r}")
    if isinstance(v, list):
        return HSet(from_json(c) for c in v)
    raise ValueError(f"not an HFA encoding: {v!r}")


def dumps(x) -> str:
    return json.dumps(to_json(x), separators=(",", ":"))


def loads(s: str):
    return from_json(json.loads(s))


# --- groups ------------------------------------------------------------------


@dataclass(frozen=True)
class FullSymmetric:
    carrier: Carrier


@dataclass(frozen=True)
class Generated:
    carrier: Carrier
    generators: tuple

    def __post_init__(self):
        for g in self.generators:
            if g.carrier != self.carrier:
                raise ValueError("generators must permute the same carrier")

    def elements(self, cap: int = DEFAULT_GROUP_CAP) -> list[Perm]:
        ident = Perm.identity(self.carrier)
        seen = {ident}
        queue = deque([ident])
        while queue:
            p = queue.popleft()
            for g in self.generators:
                q = g * p
                if q not in seen:
                    seen.add(q)
                    if len(seen) > cap:
                        raise CapExceeded("generated subgroup", None, cap)
                    queue.append(q)
        return sorted(seen)


@dataclass(frozen=True)
class RuleBased:
    """A group known only through a family generating the pointwise stabiliser of B."""

    carrier: Carrier
    stabiliser_generators: Callable[[frozenset], Iterable[Perm]]
    name: str = "rule"


@dataclass
class SupportVerdict:
    ok: bool
    counterexample: Perm | None = None
    checked: int = 0

    def __bool__(self):
        return self.ok


def fix_generators(b: Iterable, group, cap: int = DEFAULT_GROUP_CAP) -> Iterator[Perm]:
    """A family of permutations generating fix(B) inside the group."""
    b = frozenset(b)
    if isinstance(group, FullSymmetric):
        free = [z for z in group.carrier if z not in b]
        for a, c in itertools.combinations(free, 2):
            yield transposition(group.carrier, a, c)
    elif isinstance(group, Generated):
        for p in group.elements(cap):
            if all(p(z) == z for z in b) and not p.is_identity():
                yield p
    elif isinstance(group, RuleBased):
        yield from group.stabiliser_generators(b)
    else:
        raise TypeError(f"unknown group spec {group!r}")


def is_support(b: Iterable, x, group, cap: int = DEFAULT_GROUP_CAP) -> SupportVerdict:
    """Whether every element of fix(B) fixes x, with a moving permutation otherwise."""
    b = frozenset(b)
    missing = b - set(group.carrier)
    if missing:
        raise ValueError(f"support mentions unknown atoms {sorted(missing, key=repr)}")
    n = 0
    for p in fix_generators(b, group, cap):
        n += 1
        if act(p, x) != x:
            return SupportVerdict(False, p, n)
    return SupportVerdict(True, None, n)


def min_support(x, group: FullSymmetric, carrier_cap: int = DEFAULT_CARRIER_CAP, depth_cap: int = DEFAULT_DEPTH_CAP) -> frozenset:
    """A smallest support of x, searching subsets of the carrier by size then canonical order."""
    if len(group.carrier) > carrier_cap:
        raise CapExceeded("atom carrier", len(group.carrier), carrier_cap)
    if depth(x) > depth_cap:
        raise CapExceeded("HFA depth", depth(x), depth_cap)
    els = group.carrier.elements
    for k in range(len(els) + 1):
        for b in itertools.combinations(els, k):
            if is_support(b, x, group):
                return frozenset(b)
    raise AssertionError("the whole carrier is always a support")


def transitivity_witness(carrier: Carrier, b: Iterable, p: Iterable, q: Iterable) -> Perm:
    """A permutation fixing B pointwise and carrying p onto q.

    Pairs the leftovers of p and q in canonical order and swaps them.
    """
    b, p, q = frozenset(b), frozenset(p), frozenset(q)
    if len(p) != len(q):
        raise ValueError("p and q have different sizes")
    if (p | q) & b:
        raise ValueError("p and q must avoid B")
    src = carrier.sorted(p - q)
    dst = carrier.sorted(q - p)
    mapping = {}
    for s, d in zip(src, dst):
        mapping[s] = d
        mapping[d] = s
    return Perm(carrier, mapping)


# --- order automorphisms of the rationals -----------------------------------


@dataclass(frozen=True)
class PLMap:
    """Strictly increasing piecewise-linear bijection of the rationals.

    Linear between consecutive ``points`` (x, y); beyond the ends it continues
    with ``left_slope`` and ``right_slope``.
    """

    points: tuple
    left_slope: Fraction = Fraction(1)
    right_slope: Fraction = Fraction(1)

    def __post_init__(self):
        pts = tuple((Fraction(a), Fraction(b)) for a, b in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "left_slope", Fraction(self.left_slope))
        object.__setattr__(self, "right_slope", Fraction(self.right_slope))
        if not pts:
            raise ValueError("a PL map needs at least one breakpoint")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not (x0 < x1 and y0 < y1):
                raise ValueError("breakpoints must be strictly increasing in both coordinates")
        if self.left_slope <= 0 or self.right_slope <= 0:
            raise ValueError("end slopes must be positive")

    def __call__(self, a) -> Fraction:
        a = Fraction(a)
        pts = self.points
        if a <= pts[0][0]:
            return pts[0][1] + (a - pts[0][0]) * self.left_slope
        if a >= pts[-1][0]:
            return pts[-1][1] + (a - pts[-1][0]) * self.right_slope
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= a <= x1:
                return y0 + (a - x0) * (y1 - y0) / (x1 - x0)
        raise AssertionError("unreachable")

    def inverse(self) -> "PLMap":
        return PLMap(tuple((y, x) for x, y in self.points), 1 / self.left_slope, 1 / self.right_slope)

    def slopes(self) -> list[Fraction]:
        inner = [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(self.points, self.points[1:])]
        return [self.left_slope, *inner, self.right_slope]

    def is_increasing(self) -> bool:
        return all(s > 0 for s in self.slopes())


def mostowski_witness(b: Iterable, a, forbid=None) -> PLMap:
    """An order automorphism fixing B (and ``forbid``) pointwise but moving a.

    Inside a bounded gap (lo, hi) the point a moves a third of the way towards hi;
    with no upper fixed point it moves by +1.
    """
    fixed = {Fraction(v) for v in b}
    if forbid is not None:
        fixed.add(Fraction(forbid))
    a = Fraction(a)
    if a in fixed:
        raise ValueError(f"{a} is one of the points that must stay fixed")
    lower = [v for v in fixed if v < a]
    upper = [v for v in fixed if v > a]
    hi = min(upper) if upper else None
    target = a + (hi - a) / 3 if hi is not None else a + 1
    pts = [(a, target)]
    if lower:
        lo = max(lower)
        pts.insert(0, (lo, lo))
    if hi is not None:
        pts.append((hi, hi))
    return PLMap(tuple(pts))


# --- the three-to-one projection --------------------------------------------


@dataclass
class BlockProjection:
    witness: MapWitness
    permutations_checked: int
    commuting: bool
    counterexample: Perm | None = None
    notes: dict = field(default_factory=dict)


def n23_projection(carrier: Carrier, blocks: Sequence[Sequence], w: int = 64, cap: int = 6**3) -> BlockProjection:
    """The map sending each atom to its block index, checked against block-internal permutations."""
    seen = set()
    for blk in blocks:
        if len(blk) != 3 or len(set(blk)) != 3:
            raise ValueError(f"malformed block {blk!r}")
        if seen & set(blk):
            raise ValueError("blocks overlap")
        seen |= set(blk)
    if seen != set(carrier):
        raise ValueError("blocks must partition the carrier")
    if len(blocks) > w:
        raise ValueError(f"{len(blocks)} blocks exceed W={w}")
    proj = {z: i for i, blk in enumerate(blocks) for z in blk}
    witness = MapWitness(SURJECTION, "A", "omega", proj, codomain_set=frozenset(range(len(blocks))), fiber_bound=3)
    total = 6 ** len(blocks)
    if total > cap:
        raise CapExceeded("block-internal permutations", total, cap)
    checked = 0
    for choice in itertools.product(*(itertools.permutations(blk) for blk in blocks)):
        mapping = {}
        for blk, img in zip(blocks, choice):
            mapping.update(zip(blk, img))
        pi = Perm(carrier, mapping)
        checked += 1
        if any(proj[pi(z)] != proj[z] for z in carrier):
            return BlockProjection(witness, checked, False, pi)
    return BlockProjection(witness, checked, True)


def fiber_sizes(w: MapWitness) -> list[int]:
    return sorted(len(v) for v in w.fibers().values())
