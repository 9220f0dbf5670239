"""The map sending a finite set of elements to its least upper bound."""

from __future__ import annotations

import itertools
import random
from collections import Counter

from ..constructions import FINITE_TO_ONE, MapWitness
from ..report import VerificationReport
from .poset import Poset


def sup(p: Poset, m):
    """Least upper bound; the empty set goes to the least element."""
    s = p.join(m)
    if s is None:
        raise ValueError(f"{sorted(map(repr, m))} has no least upper bound")
    return s


def join_map(p: Poset, subsets=None) -> MapWitness:
    """Graph of M -> sup M over the given subsets (all of them when omitted)."""
    if subsets is None:
        subsets = (frozenset(c) for k in range(p.n + 1) for c in itertools.combinations(p.elements, k))
    graph = {frozenset(m): sup(p, m) for m in subsets}
    return MapWitness(FINITE_TO_ONE, "fin(P)", "P", graph)


def random_subsets(p: Poset, count: int, seed: int = 0, max_size: int | None = None) -> list[frozenset]:
    rng = random.Random(seed)
    top = p.n if max_size is None else min(max_size, p.n)
    return [frozenset(rng.sample(p.elements, rng.randint(0, top))) for _ in range(count)]


def check_join_map(p: Poset, w: MapWitness) -> VerificationReport:
    """Every fiber over s sits inside the down-set of s, so its size is at most 2^|down(s)|."""
    r = VerificationReport("join_map")
    bottom = p.least()
    r.add("empty_set_to_least", w.graph.get(frozenset(), sup(p, ())) == bottom)
    sizes = Counter(w.graph.values())
    bad = []
    for m, s in w.graph.items():
        down = set(p.down_set(s))
        if not m <= down:
            bad.append({"M": sorted(map(repr, m)), "sup": repr(s)})
    over = [repr(s) for s, k in sizes.items() if k > 2 ** len(p.down_set(s))]
    r.add("fibers_inside_down_sets", not bad, counterexample=bad[:5] or None)
    r.add("fiber_bound", not over, witness={"inputs": len(w.graph), "values": len(sizes), "max_fiber": max(sizes.values(), default=0)},
          counterexample=over[:5] or None)
    return r
