"""Lazy symbolic atoms of a level-by-level atom hierarchy.

Level 0 holds base atoms.  Each permutation ``u`` of levels <= n (given by its
finite support) spawns three sibling atoms ``Node(n, u, i)``, ``i < 3``, which
live at level n + 1.  Nothing here enumerates a level; every operation walks
only the structure of the atoms it is handed.

Text form::

    (base ID)
    (node N ((X -> Y) (X -> Y) ...) I)

X and Y are atoms in text form, pairs are listed in canonical order, and the
parser also accepts the arrow ``→``.  An ID made only of digits reads back as an
int, anything else as a string.
"""

from __future__ import annotations

import random
import re
from typing import Callable, Hashable, Iterable, Mapping

TAGS = (0, 1, 2)


class Base:
    __slots__ = ("id", "_key")

    level = 0

    def __init__(self, id: Hashable):
        self.id = id
        self._key = (0, type(id).__name__, id)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Base) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return to_sexpr(self)


class SparsePerm:
    """A finite-support permutation of atoms, stored as sorted non-trivial pairs."""

    __slots__ = ("pairs", "_map", "_key", "level")

    def __init__(self, mapping: Mapping | Iterable = ()):
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        m = {a: b for a, b in items if a != b}
        if set(m) != set(m.values()):
            raise ValueError("mapping is not a bijection on its support")
        self.pairs = tuple(sorted(m.items(), key=lambda ab: ab[0].key))
        self._map = m
        self._key = tuple((a.key, b.key) for a, b in self.pairs)
        self.level = max((a.level for a in m), default=0)

    @classmethod
    def identity(cls) -> "SparsePerm":
        return cls()

    @classmethod
    def cycle(cls, atoms: Iterable) -> "SparsePerm":
        atoms = list(atoms)
        if len(set(atoms)) != len(atoms):
            raise ValueError("cycle entries must be distinct")
        return cls({a: atoms[(i + 1) % len(atoms)] for i, a in enumerate(atoms)})

    @property
    def key(self):
        return self._key

    def __call__(self, a):
        return self._map.get(a, a)

    def support(self) -> frozenset:
        return frozenset(self._map)

    def inverse(self) -> "SparsePerm":
        return SparsePerm({b: a for a, b in self.pairs})

    def __mul__(self, other: "SparsePerm") -> "SparsePerm":
        dom = self.support() | other.support()
        return SparsePerm({a: self(other(a)) for a in dom})

    def is_identity(self) -> bool:
        return not self.pairs

    def __eq__(self, other):
        return isinstance(other, SparsePerm) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "SparsePerm(" + " ".join(f"{to_sexpr(a)}->{to_sexpr(b)}" for a, b in self.pairs) + ")"


class Node:
    __slots__ = ("n", "perm", "tag", "_key", "level")

    def __init__(self, n: int, perm: SparsePerm, tag: int):
        if n < 0:
            raise ValueError("node index must be non-negative")
        if tag not in TAGS:
            raise ValueError(f"tag must be 0, 1 or 2, got {tag}")
        if perm.level > n:
            raise ValueError(f"perm moves atoms of level {perm.level} > {n}")
        self.n, self.perm, self.tag = n, perm, tag
        self.level = n + 1
        self._key = (1, n, perm.key, tag)

    @property
    def key(self):
        return self._key

    def sibling(self, tag: int) -> "Node":
        return Node(self.n, self.perm, tag)

    def siblings(self) -> tuple:
        return tuple(self.sibling(i) for i in TAGS)

    def __eq__(self, other):
        return isinstance(other, Node) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return to_sexpr(self)


def closure(atoms: Iterable) -> frozenset:
    """Least superset containing, for each node, its siblings and the support of its perm."""
    out = set()
    work = list(atoms)
    while work:
        a = work.pop()
        if a in out:
            continue
        out.add(a)
        if isinstance(a, Node):
            work.extend(s for s in a.siblings() if s not in out)
            work.extend(z for z in a.perm.support() if z not in out)
    return frozenset(out)


def is_closed(c: Iterable) -> bool:
    c = set(c)
    for a in c:
        if isinstance(a, Node) and not (set(a.siblings()) <= c and a.perm.support() <= c):
            return False
    return True


class LazyAutomorphism:
    """A hierarchy automorphism given by its action up to ``base_level``.

    Higher atoms are mapped by conjugation: Node(k, u, i) goes to
    Node(k, pi u pi^-1, i).  Images are memoised on this object only.
    """

    def __init__(self, base_level: int, base: Callable, support: Iterable = ()):
        self.base_level = base_level
        self._base = base
        self.support = frozenset(support)
        self._memo: dict = {}

    def __call__(self, a):
        hit = self._memo.get(a)
        if hit is not None:
            return hit
        if a.level <= self.base_level:
            img = self._base(a)
        else:
            img = Node(a.n, self.conjugate(a.perm), a.tag)
        self._memo[a] = img
        return img

    def conjugate(self, u: SparsePerm) -> SparsePerm:
        return SparsePerm({self(x): self(y) for x, y in u.pairs})


def extend_automorphism(g: SparsePerm, m: int, fixed: Iterable = ()) -> LazyAutomorphism:
    """Extend g, acting on levels <= m, to the whole hierarchy.

    ``fixed`` is a closed set whose atoms of level <= m must be fixed by g;
    the extension then fixes every member of the set.
    """
    if g.level > m:
        raise ValueError(f"g moves atoms of level {g.level} > {m}")
    for a in fixed:
        if a.level <= m and g(a) != a:
            raise ValueError(f"g moves {to_sexpr(a)}, which must stay fixed")
    return LazyAutomorphism(m, g, g.support())


def in_level_group(g: SparsePerm, m: int) -> bool:
    """Check g respects the hierarchy on its own support.

    Every moved node must go to a sibling of its conjugate under the lower part of g.
    """
    if g.level > m:
        return False
    for a, b in g.pairs:
        if isinstance(a, Base) != isinstance(b, Base):
            return False
        if isinstance(a, Node):
            if not isinstance(b, Node) or b.n != a.n:
                return False
            if SparsePerm({g(x): g(y) for x, y in a.perm.pairs}) != b.perm:
                return False
    return True


class SiblingSwap:
    """Result of :func:`sibling_swap_witness`: the automorphism and the tags it exchanges."""

    def __init__(self, pi: LazyAutomorphism, a: Node, partner: Node):
        self.pi = pi
        self.a = a
        self.partner = partner

    def __call__(self, x):
        return self.pi(x)

    def check(self, b, fixed: Iterable = ()) -> dict:
        return {
            "moves_a": self.pi(self.a) != self.a,
            "fixes_b": self.pi(b) == b,
            "fixes_closed_set": all(self.pi(c) == c for c in fixed),
        }


def sibling_swap_witness(c: Iterable, a: Node, b) -> SiblingSwap:
    """An automorphism fixing C, every lower-level atom and b, while moving a.

    It exchanges the tag of a with the least tag whose sibling is neither a nor b.
    """
    c = frozenset(c)
    if not isinstance(a, Node):
        raise ValueError("a must be a node atom")
    if a in c:
        raise ValueError("a lies in the closed set, so nothing in its stabiliser moves it")
    if b == a:
        raise ValueError("b must differ from a")
    if b.level > a.level and b not in c:
        raise ValueError("b must lie at a level <= that of a or in the closed set")
    if not is_closed(c):
        raise ValueError("C is not closed")
    lvl = a.n + 1
    other = next(l for l in TAGS if a.sibling(l) not in (a, b))
    j, l = a.tag, other
    t = a.perm

    def base(x):
        if isinstance(x, Node) and x.n == a.n and x.perm == t:
            if x.tag == j:
                return x.sibling(l)
            if x.tag == l:
                return x.sibling(j)
        return x

    pi = LazyAutomorphism(lvl, base, {a, a.sibling(l)})
    w = SiblingSwap(pi, a, a.sibling(l))
    verdict = w.check(b, c)
    if not all(verdict.values()):
        raise AssertionError(f"sibling swap failed its own contract: {verdict}")
    return w


def support_level(atoms: Iterable) -> int:
    """Least k with every atom at level <= k."""
    return max((a.level for a in atoms), default=0)


def triple_injection(u: SparsePerm) -> frozenset:
    """The three siblings Node(k, u, i) where k is the least level containing mov(u)."""
    k = support_level(u.support())
    return frozenset(Node(k, u, i) for i in TAGS)


# --- text form ---------------------------------------------------------------


def to_sexpr(a) -> str:
    if isinstance(a, Base):
        return f"(base {a.id})"
    pairs = " ".join(f"({to_sexpr(x)} -> {to_sexpr(y)})" for x, y in a.perm.pairs)
    return f"(node {a.n} ({pairs}) {a.tag})"


_TOKEN = re.compile(r"\(|\)|->|→|[^\s()]+")


def _tokens(text: str) -> list[str]:
    return ["->" if t == "→" else t for t in _TOKEN.findall(text)]


def _read_id(tok: str):
    return int(tok) if tok.isdigit() else tok


def from_sexpr(text: str):
    toks = _tokens(text)
    pos = 0

    def expect(t):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != t:
            raise ValueError(f"expected {t!r} at token {pos} in {text!r}")
        pos += 1

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise ValueError(f"unexpected end of input in {text!r}")
        pos += 1
        return toks[pos - 1]

    def atom():
        expect("(")
        head = take()
        if head == "base":
            a = Base(_read_id(take()))
        elif head == "node":
            n = int(take())
            expect("(")
            pairs = []
            while toks[pos] != ")":
                expect("(")
                x = atom()
                expect("->")
                y = atom()
                expect(")")
                pairs.append((x, y))
            expect(")")
            a = Node(n, SparsePerm(pairs), int(take()))
        else:
            raise ValueError(f"unknown atom form {head!r}")
        expect(")")
        return a

    out = atom()
    if pos != len(toks):
        raise ValueError(f"trailing tokens in {text!r}")
    return out


def parse_atoms(text: str) -> list:
    """Parse whitespace-separated atoms."""
    toks = _tokens(text)
    out, depth, start = [], 0, 0
    for i, t in enumerate(toks):
        if t == "(":
            depth += 1
        elif t == ")":
            depth -= 1
            if depth == 0:
                out.append(from_sexpr(" ".join(toks[start : i + 1])))
                start = i + 1
    if depth != 0:
        raise ValueError("unbalanced parentheses")
    return out


# --- sample generation -------------------------------------------------------


def base_sample(n: int = 6) -> list[Base]:
    return [Base(chr(ord("a") + i)) for i in range(n)]


def random_atom(rng: random.Random, bases: list, max_level: int = 2, max_support: int = 3):
    """A random atom of level <= max_level built from the given base sample."""
    lvl = rng.randint(0, max_level)
    if lvl == 0:
        return rng.choice(bases)
    n = lvl - 1
    u = random_perm(rng, bases, n, max_support)
    return Node(n, u, rng.choice(TAGS))


def random_perm(rng: random.Random, bases: list, max_level: int, max_support: int = 3) -> SparsePerm:
    """A random sparse perm moving atoms of level <= max_level, preserving levels."""
    k = rng.randint(0, max_support)
    pool = set()
    for _ in range(k):
        pool.add(random_atom(rng, bases, rng.randint(0, max_level), max(max_support - 1, 1)) if max_level else rng.choice(bases))
    by_level: dict[int, list] = {}
    for a in sorted(pool, key=lambda a: a.key):
        by_level.setdefault(a.level, []).append(a)
    mapping = {}
    for group in by_level.values():
        if len(group) > 1:
            img = group[:]
            rng.shuffle(img)
            mapping.update(zip(group, img))
    return SparsePerm(mapping)


FIXTURES = {
    "f1": "(node 0 (((base a) -> (base b)) ((base b) -> (base a))) 0)",
    "f2": "(base a) (node 0 (((base a) -> (base c)) ((base c) -> (base a))) 2)",
    "f3": "(node 1 (((node 0 () 0) -> (node 0 () 1)) ((node 0 () 1) -> (node 0 () 0))) 1)",
}
