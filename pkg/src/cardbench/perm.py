"""Finite carriers, permutations, orbit algebra and bounded enumerators.

Every "least such element" choice made elsewhere in the package resolves
against the creation order of a :class:`Carrier`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb, factorial
from typing import Hashable, Iterable, Iterator, Sequence

DEFAULT_W = 64
DEFAULT_CAP = 10**7


class CapExceeded(ValueError):
    """Raised when an enumeration would produce more values than allowed."""

    def __init__(self, what: str, count: int | None, cap: int):
        self.count = count
        self.cap = cap
        detail = f"{count} values" if count is not None else "unknown count"
        super().__init__(f"{what}: {detail} exceeds cap {cap}")


class TruncationError(ValueError):
    """A natural number reached the configured omega truncation bound W."""


@dataclass(frozen=True, order=True)
class Nat:
    """A natural number tagged so it can share a universe with carrier elements."""

    value: int
    bound: int = DEFAULT_W

    def __post_init__(self):
        if not 0 <= self.value < self.bound:
            raise TruncationError(f"Nat({self.value}) outside [0, {self.bound})")

    def __repr__(self):
        return f"Nat({self.value})"


class Carrier:
    """An ordered finite universe of hashable element identifiers."""

    __slots__ = ("elements", "_index", "_hash")

    def __init__(self, elements: Iterable[Hashable]):
        elements = tuple(elements)
        index = {z: i for i, z in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("carrier elements must be unique")
        self.elements = elements
        self._index = index
        self._hash = hash(elements)

    @classmethod
    def of_size(cls, n: int) -> "Carrier":
        return cls(range(n))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, z):
        try:
            return z in self._index
        except TypeError:
            return False

    def __eq__(self, other):
        return isinstance(other, Carrier) and self.elements == other.elements

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Carrier({list(self.elements)!r})"

    def index(self, z) -> int:
        try:
            return self._index[z]
        except (KeyError, TypeError):
            raise ValueError(f"{z!r} is not in the carrier") from None

    def key(self, z) -> int:
        """Sort key realising the canonical order."""
        return self.index(z)

    def sorted(self, zs: Iterable) -> list:
        return sorted(zs, key=self.index)

    def least(self, zs: Iterable | None = None):
        if zs is None:
            return self.elements[0]
        return min(zs, key=self.index)

    def sub(self, y: Iterable) -> "Carrier":
        """The sub-carrier on ``y``, keeping the ambient order."""
        y = set(y)
        missing = [z for z in y if z not in self]
        if missing:
            raise ValueError(f"not a subset of the carrier: {missing!r}")
        return Carrier(z for z in self.elements if z in y)


class Perm:
    """A total bijection of a carrier onto itself.

    ``p(z)`` applies the permutation; ``p * q`` is composition with ``q``
    applied first.  Permutations compare and sort by their image tuple in
    carrier order, which is the lexicographic order used by :func:`enumerate_kind`.
    """

    __slots__ = ("carrier", "image", "_map", "_hash")

    def __init__(self, carrier: Carrier, mapping):
        if isinstance(mapping, dict):
            extra = [z for z in mapping if z not in carrier]
            if extra:
                raise ValueError(f"mapping mentions elements outside the carrier: {extra!r}")
            image = tuple(mapping.get(z, z) for z in carrier)
        else:
            image = tuple(mapping)
        if len(image) != len(carrier):
            raise ValueError("image has the wrong length")
        idx = []
        for w in image:
            idx.append(carrier.index(w))
        if len(set(idx)) != len(idx):
            raise ValueError("mapping is not a bijection")
        self.carrier = carrier
        self.image = tuple(idx)
        self._map = dict(zip(carrier.elements, image))
        self._hash = hash((carrier, self.image))

    @classmethod
    def _from_indices(cls, carrier: Carrier, idx: Sequence[int]) -> "Perm":
        p = object.__new__(cls)
        p.carrier = carrier
        p.image = tuple(idx)
        els = carrier.elements
        p._map = {els[i]: els[j] for i, j in enumerate(p.image)}
        p._hash = hash((carrier, p.image))
        return p

    @classmethod
    def identity(cls, carrier: Carrier) -> "Perm":
        return cls._from_indices(carrier, range(len(carrier)))

    def __call__(self, z):
        try:
            return self._map[z]
        except (KeyError, TypeError):
            raise ValueError(f"{z!r} is not in the carrier") from None

    def __mul__(self, other: "Perm") -> "Perm":
        if self.carrier != other.carrier:
            raise ValueError("cannot compose permutations of different carriers")
        return Perm._from_indices(self.carrier, [self.image[j] for j in other.image])

    def inverse(self) -> "Perm":
        inv = [0] * len(self.image)
        for i, j in enumerate(self.image):
            inv[j] = i
        return Perm._from_indices(self.carrier, inv)

    def __pow__(self, n: int) -> "Perm":
        base = self if n >= 0 else self.inverse()
        out = Perm.identity(self.carrier)
        for _ in range(abs(n)):
            out = base * out
        return out

    def __eq__(self, other):
        return isinstance(other, Perm) and self.carrier == other.carrier and self.image == other.image

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Perm"):
        return self.image < other.image

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.image))

    def items(self):
        return self._map.items()

    def restrict(self, y: Iterable) -> dict:
        return {z: self._map[z] for z in y}

    def cycles(self) -> list[tuple]:
        """Non-trivial cycles, each starting at its least element, in carrier order."""
        seen = set()
        out = []
        for i, z in enumerate(self.carrier.elements):
            if i in seen or self.image[i] == i:
                continue
            cyc = []
            j = i
            while j not in seen:
                seen.add(j)
                cyc.append(self.carrier.elements[j])
                j = self.image[j]
            out.append(tuple(cyc))
        return out

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return "Perm(id)"
        return "Perm(" + "".join("(" + ";".join(map(repr, c)) + ")" for c in cyc) + ")"


def cycle_perm(carrier: Carrier, t: Sequence) -> Perm:
    """The cycle t(0) -> t(1) -> ... -> t(n-1) -> t(0), fixing everything else."""
    t = list(t)
    if len(set(t)) != len(t):
        raise ValueError(f"cycle entries must be distinct: {t!r}")
    for z in t:
        carrier.index(z)
    mapping = {z: t[(i + 1) % len(t)] for i, z in enumerate(t)}
    return Perm(carrier, mapping)


def transposition(carrier: Carrier, a, b) -> Perm:
    return cycle_perm(carrier, [a, b])


def mov_of(p: Perm) -> frozenset:
    els = p.carrier.elements
    return frozenset(els[i] for i, j in enumerate(p.image) if i != j)


def orbit_of(p: Perm, z) -> frozenset:
    p(z)
    orb = {z}
    w = p(z)
    while w != z:
        orb.add(w)
        w = p(w)
    return frozenset(orb)


def orbits(p: Perm) -> list[frozenset]:
    """All orbits in order of their least element."""
    seen = set()
    out = []
    for z in p.carrier:
        if z not in seen:
            orb = orbit_of(p, z)
            seen |= orb
            out.append(orb)
    return out


def nontrivial_orbits(p: Perm) -> list[frozenset]:
    return [o for o in orbits(p) if len(o) > 1]


def induce_on_subset(p: Perm, y: Iterable) -> Perm:
    """First-return permutation of ``y``: each z goes to the first iterate of p landing in y."""
    sub = p.carrier.sub(y)
    mapping = {}
    for z in sub:
        w = p(z)
        while w not in sub:
            w = p(w)
        mapping[z] = w
    return Perm(sub, mapping)


def derangements(n: int) -> int:
    """Number of fixed-point-free permutations of n points."""
    d0, d1 = 1, 0
    if n == 0:
        return 1
    for k in range(2, n + 1):
        d0, d1 = d1, (k - 1) * (d0 + d1)
    return d1


KINDS = ("S", "S_fin", "S_n", "subsets", "fin", "seq", "seqinj")


def count_kind(kind: str, n: int, bound: int | None = None) -> int:
    """Closed-form size of the set enumerated by :func:`enumerate_kind`."""
    if kind in ("S", "S_fin"):
        return factorial(n)
    if kind == "S_n":
        return sum(comb(n, k) * derangements(k) for k in range(min(bound, n) + 1))
    if kind == "subsets":
        return comb(n, bound)
    if kind == "fin":
        return 2**n
    if kind == "seq":
        return sum(n**k for k in range(bound + 1))
    if kind == "seqinj":
        top = n if bound is None else min(bound, n)
        return sum(factorial(n) // factorial(n - k) for k in range(top + 1))
    raise ValueError(f"unknown kind {kind!r}")


def enumerate_kind(
    kind: str,
    carrier: Carrier,
    bound: int | None = None,
    *,
    w: int = DEFAULT_W,
    cap: int = DEFAULT_CAP,
) -> Iterator:
    """Stream every value of a finite set built from ``carrier``, lexicographically.

    kinds:
      ``S``/``S_fin``  all permutations (identical at finite scale)
      ``S_n``          permutations moving at most ``bound`` points
      ``subsets``      ``bound``-element subsets, as frozensets
      ``fin``          all subsets, as frozensets
      ``seq``          sequences (tuples) of length <= ``bound``
      ``seqinj``       injective sequences of length <= ``bound`` (all if None)
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind in ("S_n", "subsets", "seq") and bound is None:
        raise ValueError(f"kind {kind!r} needs a bound")
    if kind in ("seq", "seqinj") and bound is not None and bound >= w:
        raise TruncationError(f"sequence length bound {bound} must be below W={w}")
    n = len(carrier)
    total = count_kind(kind, n, bound)
    if total > cap:
        raise CapExceeded(kind, total, cap)
    return _enumerate(kind, carrier, bound)


def _enumerate(kind, carrier, bound):
    n = len(carrier)
    els = carrier.elements
    if kind in ("S", "S_fin"):
        for img in itertools.permutations(range(n)):
            yield Perm._from_indices(carrier, img)
    elif kind == "S_n":
        found = []
        for k in range(min(bound, n) + 1):
            for supp in itertools.combinations(range(n), k):
                for img in itertools.permutations(supp):
                    if any(a == b for a, b in zip(supp, img)):
                        continue
                    full = list(range(n))
                    for a, b in zip(supp, img):
                        full[a] = b
                    found.append(tuple(full))
        found.sort()
        for img in found:
            yield Perm._from_indices(carrier, img)
    elif kind == "subsets":
        for c in itertools.combinations(els, bound):
            yield frozenset(c)
    elif kind == "fin":
        for k in range(n + 1):
            for c in itertools.combinations(els, k):
                yield frozenset(c)
    elif kind == "seq":
        for k in range(bound + 1):
            yield from itertools.product(els, repeat=k)
    elif kind == "seqinj":
        top = n if bound is None else min(bound, n)
        for k in range(top + 1):
            yield from itertools.permutations(els, k)
