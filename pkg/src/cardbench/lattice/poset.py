"""Finite posets given by their Hasse edges, with lattice and covering-condition checks.

Elements are stored in a topological order (every element after everything
below it), which lets down-sets and up-sets live in Python int bitmasks and
makes the top bit of a common down-set the only candidate for a meet.
"""

from __future__ import annotations

import heapq
import itertools
from collections import defaultdict
from typing import Hashable, Iterable, Sequence

import numpy as np

from ..report import VerificationReport


class NotAPoset(ValueError):
    """The supplied edges contain a cycle."""


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """A finite poset built from (lower, upper) edges whose transitive closure is the order."""

    def __init__(self, elements: Sequence[Hashable], edges: Iterable[tuple]):
        elements = list(elements)
        if len(set(elements)) != len(elements):
            raise ValueError("elements must be distinct")
        edges = list(dict.fromkeys(edges))
        pos = {x: i for i, x in enumerate(elements)}
        for lo, hi in edges:
            if lo not in pos or hi not in pos:
                raise ValueError(f"edge {lo!r} -> {hi!r} mentions an unknown element")
            if lo == hi:
                raise NotAPoset(f"self-loop at {lo!r}")
        order = self._toposort(elements, pos, edges)
        self.elements = order
        self.index = {x: i for i, x in enumerate(order)}
        n = len(order)
        self.n = n
        self.edges = [(self.index[lo], self.index[hi]) for lo, hi in edges]
        self.below = [[] for _ in range(n)]
        self.above = [[] for _ in range(n)]
        for lo, hi in self.edges:
            self.below[hi].append(lo)
            self.above[lo].append(hi)
        for lst in itertools.chain(self.below, self.above):
            lst.sort()
        down = [0] * n
        for i in range(n):
            m = 1 << i
            for j in self.below[i]:
                m |= down[j]
            down[i] = m
        up = [0] * n
        for i in reversed(range(n)):
            m = 1 << i
            for j in self.above[i]:
                m |= up[j]
            up[i] = m
        self.down = down
        self.up = up

    @staticmethod
    def _toposort(elements, pos, edges):
        indeg = [0] * len(elements)
        succ = defaultdict(list)
        for lo, hi in edges:
            succ[pos[lo]].append(pos[hi])
            indeg[pos[hi]] += 1
        ready = [i for i, d in enumerate(indeg) if d == 0]
        heapq.heapify(ready)
        out = []
        while ready:
            i = heapq.heappop(ready)
            out.append(elements[i])
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(ready, j)
        if len(out) != len(elements):
            raise NotAPoset("edges contain a cycle")
        return out

    @classmethod
    def from_relation(cls, elements: Sequence, less) -> "Poset":
        """Build from a strict order predicate; edges are its covering pairs."""
        elements = list(elements)
        pairs = [(a, b) for a in elements for b in elements if a != b and less(a, b)]
        strict = set(pairs)
        covers = [(a, b) for a, b in pairs if not any((a, c) in strict and (c, b) in strict for c in elements)]
        return cls(elements, covers)

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    # --- order -------------------------------------------------------------

    def lt(self, a, b) -> bool:
        i, j = self.index[a], self.index[b]
        return i != j and (self.down[j] >> i) & 1 == 1

    def le(self, a, b) -> bool:
        return (self.down[self.index[b]] >> self.index[a]) & 1 == 1

    def down_set(self, a) -> list:
        return [self.elements[i] for i in _bits(self.down[self.index[a]])]

    def up_set(self, a) -> list:
        return [self.elements[i] for i in _bits(self.up[self.index[a]])]

    def cov(self, b) -> list:
        """Stored lower covers of b."""
        return [self.elements[i] for i in self.below[self.index[b]]]

    def upper_covers(self, a) -> list:
        return [self.elements[i] for i in self.above[self.index[a]]]

    def least(self):
        full = (1 << self.n) - 1
        for i in range(self.n):
            if self.up[i] == full:
                return self.elements[i]
        return None

    def greatest(self):
        full = (1 << self.n) - 1
        for i in range(self.n):
            if self.down[i] == full:
                return self.elements[i]
        return None

    def _meet_idx(self, i: int, j: int) -> int | None:
        common = self.down[i] & self.down[j]
        if not common:
            return None
        top = common.bit_length() - 1
        return top if self.down[top] == common else None

    def _join_idx(self, i: int, j: int) -> int | None:
        common = self.up[i] & self.up[j]
        if not common:
            return None
        low = (common & -common).bit_length() - 1
        return low if self.up[low] == common else None

    def meet(self, xs: Iterable):
        xs = [self.index[x] for x in xs]
        if not xs:
            return self.greatest()
        acc = xs[0]
        for j in xs[1:]:
            acc = self._meet_idx(acc, j)
            if acc is None:
                return None
        return self.elements[acc]

    def join(self, xs: Iterable):
        xs = [self.index[x] for x in xs]
        if not xs:
            return self.least()
        acc = xs[0]
        for j in xs[1:]:
            acc = self._join_idx(acc, j)
            if acc is None:
                return None
        return self.elements[acc]

    def inf_cov(self, b):
        """Greatest lower bound of the lower covers of b."""
        cs = self.below[self.index[b]]
        if not cs:
            return None
        return self.meet(self.elements[i] for i in cs)

    def order_matrix(self) -> np.ndarray:
        """Boolean matrix M with M[i, j] true iff element i < element j."""
        n = self.n
        nbytes = (n + 7) // 8
        rows = np.zeros((n, n), dtype=bool)
        for j in range(n):
            raw = np.frombuffer(self.down[j].to_bytes(nbytes, "little"), dtype=np.uint8)
            rows[j] = np.unpackbits(raw, bitorder="little")[:n].astype(bool)
        m = rows.T.copy()
        np.fill_diagonal(m, False)
        return m

    # --- structural checks -------------------------------------------------

    def covering_pairs(self) -> set[tuple[int, int]]:
        """The covering relation recomputed from the order alone."""
        out = set()
        for j in range(self.n):
            strict = self.down[j] & ~(1 << j)
            for i in _bits(strict):
                if (self.up[i] & ~(1 << i)) & strict == 0:
                    out.add((i, j))
        return out

    def covers_are_minimal(self) -> tuple[bool, object]:
        stored = set(self.edges)
        actual = self.covering_pairs()
        if stored == actual:
            return True, None
        extra = sorted(stored - actual)
        missing = sorted(actual - stored)
        label = lambda p: (repr(self.elements[p[0]]), repr(self.elements[p[1]]))
        return False, {"transitive_edges": [label(p) for p in extra[:5]], "missing_covers": [label(p) for p in missing[:5]]}

    def lattice_counterexample(self):
        """A pair with no meet or no join, or None when the poset is a lattice."""
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self._meet_idx(i, j) is None:
                    return ("meet", self.elements[i], self.elements[j])
                if self._join_idx(i, j) is None:
                    return ("join", self.elements[i], self.elements[j])
        return None


def verify_flcc(p: Poset) -> VerificationReport:
    """Whenever b covers at least two elements, those elements share a lower cover."""
    r = VerificationReport("flcc")
    for j in range(p.n):
        below = p.below[j]
        if len(below) < 2:
            continue
        common = None
        for a in below:
            s = set(p.below[a])
            common = s if common is None else common & s
        if not common:
            r.add("flcc", False, counterexample={"b": repr(p.elements[j]), "M": [repr(p.elements[a]) for a in below]})
            return r
    r.add("flcc", True)
    return r


def chain_lengths(p: Poset) -> tuple[dict, dict]:
    """For each element, a witness saturated chain from the least element for every length seen."""
    bottom = p.least()
    if bottom is None:
        raise ValueError("the poset has no least element")
    chains = [dict() for _ in range(p.n)]
    chains[p.index[bottom]] = {1: [p.index[bottom]]}
    for j in range(p.n):
        for a in p.below[j]:
            for length, ch in chains[a].items():
                chains[j].setdefault(length + 1, ch + [j])
    return chains, bottom


def verify_jordan_dedekind(p: Poset) -> tuple[VerificationReport, dict | None]:
    """All saturated chains from the least element to any b have one length; returns heights."""
    r = VerificationReport("jordan_dedekind")
    if p.least() is None:
        r.add("jordan_dedekind", False, counterexample="no least element")
        return r, None
    chains, _ = chain_lengths(p)
    for j, by_len in enumerate(chains):
        if len(by_len) > 1:
            (l0, c0), (l1, c1) = sorted(by_len.items())[:2]
            r.add("jordan_dedekind", False, counterexample={
                "b": repr(p.elements[j]),
                "chains": [[repr(p.elements[i]) for i in c0], [repr(p.elements[i]) for i in c1]],
            })
            return r, None
    heights = {p.elements[j]: next(iter(c)) - 1 for j, c in enumerate(chains)}
    r.add("jordan_dedekind", True, witness={"max_height": max(heights.values(), default=0)})
    return r, heights


def verify_building_block(p: Poset) -> tuple[VerificationReport, dict | None]:
    """Lattice, covering condition, chain condition and the two four-element fiber rules."""
    r = VerificationReport("building_block")
    r.add("non_void", p.n > 0)
    ok, ce = p.covers_are_minimal()
    r.add("covers_minimal", ok, counterexample=ce)
    bad = p.lattice_counterexample() if p.n else None
    r.add("lattice", bad is None, counterexample=None if bad is None else [bad[0], repr(bad[1]), repr(bad[2])])
    r.extend(verify_flcc(p))
    jd, heights = verify_jordan_dedekind(p)
    r.extend(jd)
    if heights is None or bad is not None:
        r.add("height2_rule", False, counterexample="heights or meets unavailable")
        r.add("fiber_rule", False, counterexample="heights or meets unavailable")
        return r, heights
    h2_bad = [repr(b) for b in p.elements if heights[b] == 2 and len(p.cov(b)) != 4]
    r.add("height2_rule", not h2_bad, counterexample=h2_bad[:5] or None)
    fib_bad = []
    for b in p.elements:
        if heights[b] <= 2:
            continue
        ic = p.inf_cov(b)
        covs = p.cov(b)
        for c in p.cov(ic):
            cnt = sum(1 for a in covs if p.inf_cov(a) == c)
            if cnt != 4:
                fib_bad.append({"b": repr(b), "c": repr(c), "count": cnt})
    r.add("fiber_rule", not fib_bad, counterexample=fib_bad[:5] or None)
    return r, heights


def is_automorphism(p: Poset, g: dict, matrix: np.ndarray | None = None) -> bool:
    """Independent oracle: g is a bijection of p with a < b iff g(a) < g(b)."""
    if set(g) != set(p.elements) or set(g.values()) != set(p.elements):
        return False
    m = p.order_matrix() if matrix is None else matrix
    perm = np.fromiter((p.index[g[x]] for x in p.elements), dtype=np.int64, count=p.n)
    return bool(np.array_equal(m[np.ix_(perm, perm)], m))


def automorphisms(p: Poset, limit: int | None = None) -> list[dict]:
    """All order automorphisms of a small poset, by backtracking over the topological order."""
    n = p.n
    strict_down = [p.down[i] & ~(1 << i) for i in range(n)]
    strict_up = [p.up[i] & ~(1 << i) for i in range(n)]
    sig = [(bin(strict_down[i]).count("1"), bin(strict_up[i]).count("1"), len(p.below[i]), len(p.above[i])) for i in range(n)]
    out = []
    img = [-1] * n
    used = [False] * n

    def rec(i):
        if limit is not None and len(out) >= limit:
            return
        if i == n:
            out.append({p.elements[k]: p.elements[img[k]] for k in range(n)})
            return
        for t in range(n):
            if used[t] or sig[t] != sig[i]:
                continue
            ok = True
            for k in range(i):
                if ((strict_down[i] >> k) & 1) != ((strict_down[t] >> img[k]) & 1):
                    ok = False
                    break
                if ((strict_up[i] >> k) & 1) != ((strict_up[t] >> img[k]) & 1):
                    ok = False
                    break
            if ok:
                img[i] = t
                used[t] = True
                rec(i + 1)
                used[t] = False
                img[i] = -1

    rec(0)
    return out


def chain(n: int) -> Poset:
    return Poset(range(n), [(i, i + 1) for i in range(n - 1)])


def boolean_lattice(k: int) -> Poset:
    els = range(1 << k)
    edges = [(a, a | (1 << i)) for a in els for i in range(k) if not a >> i & 1]
    return Poset(els, edges)
