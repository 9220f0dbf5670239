"""The level-by-level lattice A_0 <= A_1 <= ... and its element identities.

Each non-bottom element is a 5-tuple (stamp, rank, parent, base, tag).  The
top element e_n of A_n is (n-1, n-1, None, e_{n-2}, 3) with e_0 = o.  New
elements of A_{n+1} hang below e_{n+1} in layers; an element of layer i has
rank n - i, a parent in layer i - 1 and a base c that is a lower cover of
the parent's base.  The number of tags per (parent, base) pair is 3 when c is
the base of the base of the parent's parent (or, below e_{n+1}, when
c = e_{n-2}), otherwise 4.
"""

from __future__ import annotations

from .poset import Poset

DEFAULT_LEVEL_CAP = 5
TOP_TAG = 3


class LevelCapExceeded(ValueError):
    pass


class LatticeElem:
    """o, some e_n, or a structured tuple; equality is structural and hashing is O(1)."""

    __slots__ = ("proj", "name", "uid", "_key", "_hash")

    def __init__(self, proj: tuple | None, name: str, uid: int):
        self.proj = proj
        self.name = name
        self.uid = uid
        if proj is None:
            self._key = ("o",)
        else:
            s, r, parent, base, tag = proj
            self._key = (s, r, None if parent is None else parent.uid, base.uid, tag)
        self._hash = hash(self._key)

    @property
    def is_bottom(self) -> bool:
        return self.proj is None

    def __getitem__(self, j: int):
        if self.proj is None:
            raise ValueError("o has no coordinates")
        return self.proj[j]

    @property
    def stamp(self) -> int:
        return self[0]

    @property
    def rank(self) -> int:
        return self[1]

    @property
    def parent(self):
        return self[2]

    @property
    def base(self):
        return self[3]

    @property
    def tag(self) -> int:
        return self[4]

    def __eq__(self, other):
        return self is other or (isinstance(other, LatticeElem) and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name

    def describe(self) -> str:
        if self.proj is None:
            return "o"
        s, r, parent, base, tag = self.proj
        return f"({s},{r},{parent.name if parent else '0'},{base.name},{tag})"


def tag_count(n: int, b: LatticeElem, c: LatticeElem, tops: list) -> int:
    """Number of tags for the children of b with base c while building A_{n+1}."""
    if b == tops[n + 1]:
        return 3 if c == tops[n - 2] else 4
    return 3 if b.parent.base.base == c else 4


def construct(n: int) -> tuple[list, list, list, list]:
    """Elements in creation order, cover pairs, prefix sizes |A_0..A_n| and e_0..e_n."""
    uid = 0

    def make(proj, name):
        nonlocal uid
        x = LatticeElem(proj, name, uid)
        uid += 1
        return x

    o = make(None, "o")
    elems, covers, sizes, tops = [o], [], [1], [o]
    down = {o: []}
    if n >= 1:
        e1 = make((0, 0, None, o, TOP_TAG), "e1")
        elems.append(e1)
        covers.append((o, e1))
        down[e1] = [o]
        sizes.append(2)
        tops.append(e1)
    for k in range(1, n):
        top = make((k, k, None, tops[k - 1], TOP_TAG), f"e{k + 1}")
        tops.append(top)
        layers = [[top]]
        for i in range(1, k):
            layer = []
            for b in layers[-1]:
                for c in down[b.base]:
                    for j in range(tag_count(k, b, c, tops)):
                        layer.append(make((k, k - i, b, c, j), f"x{uid}"))
            layers.append(layer)
        layers.append([make((k, 0, b, o, j), f"x{uid}") for b in layers[-1] for j in range(3)])
        new = [a for layer in layers for a in layer]
        fresh = [(tops[k], top)]
        for a in new[1:]:
            fresh.append((a.parent.base, a))
            fresh.append((a, a.parent))
        for lo, hi in fresh:
            down.setdefault(hi, []).append(lo)
            down.setdefault(lo, [])
        covers.extend(fresh)
        elems.extend(new)
        sizes.append(len(elems))
    return elems, covers, sizes, tops


class LatticeLevel(Poset):
    """The poset A_n with its cover relation, plus the structured element data."""

    def __init__(self, n: int, created: list, covers: list, sizes: list, tops: list):
        self.level = n
        self.created = created
        self.sizes = sizes
        self.tops = tops
        super().__init__(created, covers)
        self.bottom = created[0]
        self.top = tops[n]

    def prefix(self, k: int) -> "LatticeLevel":
        """The level A_k for k <= n, sharing element objects."""
        if not 0 <= k <= self.level:
            raise ValueError(f"level {k} outside [0, {self.level}]")
        if k == self.level:
            return self
        size = self.sizes[k]
        members = set(self.created[:size])
        covers = [(self.elements[lo], self.elements[hi]) for lo, hi in self.edges if self.elements[hi] in members]
        return LatticeLevel(k, self.created[:size], covers, self.sizes[: k + 1], self.tops[: k + 1])

    def layer(self, k: int) -> list:
        """Elements of A_k minus A_{k-1}, in creation order."""
        lo = self.sizes[k - 1] if k else 0
        return self.created[lo : self.sizes[k]]


def build_level(n: int, cap: int = DEFAULT_LEVEL_CAP) -> LatticeLevel:
    if n < 0:
        raise ValueError("level must be non-negative")
    if n > cap:
        raise LevelCapExceeded(f"level {n} exceeds cap {cap}")
    created, covers, sizes, tops = construct(n)
    return LatticeLevel(n, created, covers, sizes, tops)


def recount(n: int) -> list[int]:
    """|A_0..A_n| from the tag table alone, tracking only (rank, base) pairs per layer.

    Shares no code with :func:`construct`: each level is represented by the
    lower-cover lists of its elements under the structural identities
    rank+1 = height and base = inf of lower covers.
    """
    if n == 0:
        return [1]
    # element ids: ("o",), ("e", m), ("t", m, serial)
    covs = {("o",): [], ("e", 1): [("o",)]}
    base = {("e", 1): ("o",)}
    parent_base_base = {}
    counts = [1, 2]
    serial = 0
    for k in range(1, n):
        top = ("e", k + 1)
        base[top] = ("e", k - 1) if k > 1 else ("o",)
        prev = [top]
        new = [top]
        for i in range(1, k + 1):
            layer = []
            for b in prev:
                cs = [("o",)] if i == k else covs[base[b]]
                for c in cs:
                    if i == k:
                        tags = 3
                    elif b == top:
                        tags = 3 if c == (("e", k - 2) if k > 2 else ("o",)) else 4
                    else:
                        tags = 3 if parent_base_base[b] == c else 4
                    for _ in range(tags):
                        serial += 1
                        a = ("t", k, serial)
                        base[a] = c
                        parent_base_base[a] = base[base[b]] if base[b] != ("o",) else None
                        covs.setdefault(b, []).append(a)
                        covs[a] = [base[b]]
                        layer.append(a)
            prev = layer
            new.extend(layer)
        covs.setdefault(top, []).append(("e", k))
        counts.append(counts[-1] + len(new))
    return counts[: n + 1]
