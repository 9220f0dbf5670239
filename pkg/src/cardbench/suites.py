"""Oracle drivers for the constructions, one per check name.

Each driver takes a carrier size, a seeded RNG and the truncation bound and
returns ``(passed, witness, counterexample)``.  Small sizes are exhaustive,
larger ones are sampled from the RNG.
"""

from __future__ import annotations

import functools
import itertools
import random
import time
from collections import Counter, defaultdict
from math import comb

from . import constructions as C
from .perm import (
    DEFAULT_W,
    Carrier,
    Nat,
    Perm,
    derangements,
    enumerate_kind,
    mov_of,
)
from .report import VerificationReport

EXHAUSTIVE_UP_TO = 4
SAMPLES = 1000


def random_perm(x: Carrier, rng: random.Random) -> Perm:
    img = list(x.elements)
    rng.shuffle(img)
    return Perm(x, img)


def _all_perms(x: Carrier):
    return list(enumerate_kind("S", x))


def _injections(xs, ys):
    for img in itertools.permutations(ys, len(xs)):
        yield dict(zip(xs, img))


def chain_oracle(f: dict, g: dict) -> dict:
    """Bijection rebuilt from the bipartite components: f on components starting in x or cycling."""
    g_inv = {v: k for k, v in g.items()}
    h = {}
    for origin, comp in C.chain_classes(f, g):
        for side, z in comp:
            if side == "x":
                h[z] = g_inv[z] if origin == "y" else f[z]
    return h


def check_cantor_bernstein(n, rng, w):
    xs = list(range(n))
    ys = [f"y{i}" for i in range(n)]
    if n <= EXHAUSTIVE_UP_TO:
        pairs = ((f, g) for f in _injections(xs, ys) for g in _injections(ys, xs))
    else:
        def sample():
            for _ in range(SAMPLES):
                a, b = ys[:], xs[:]
                rng.shuffle(a)
                rng.shuffle(b)
                yield dict(zip(xs, a)), dict(zip(ys, b))
        pairs = sample()
    count = 0
    for f, g in pairs:
        h = C.cantor_bernstein(f, g)
        count += 1
        if sorted(h.values(), key=str) != sorted(ys, key=str) or set(h) != set(xs) or h != chain_oracle(f, g):
            return False, None, {"f": f, "g": g, "h": h}
    return True, {"pairs": count}, None


def _partitions_min2(items):
    """Set partitions with every block of size >= 2."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(1, len(rest) + 1):
        for mates in itertools.combinations(rest, k):
            remaining = [z for z in rest if z not in mates]
            for tail in _partitions_min2(remaining):
                yield [(first, *mates)] + tail


def compliant_diagonal_inputs(x: Carrier, rng=None, limit=None):
    """Every (f, g) where each fiber of f carries a non-identity g(t) moving only fiber points."""
    perms = _all_perms(x)
    produced = 0
    for blocks in _partitions_min2(list(x.elements)):
        options = [[t for t in perms if not t.is_identity() and mov_of(t) <= set(b)] for b in blocks]
        for ts in itertools.permutations(perms, len(blocks)):
            f = {z: t for b, t in zip(blocks, ts) for z in b}
            for gs in itertools.product(*options):
                yield f, dict(zip(ts, gs))
                produced += 1
                if limit is not None and produced >= limit:
                    return


def check_diagonal(n, rng, w):
    x = Carrier.of_size(min(n, 5))
    limit = None if n <= 3 else 5000
    count = 0
    for f, g in compliant_diagonal_inputs(x, limit=limit):
        u = C.diagonal_escape(f, g, x)
        count += 1
        fibers = defaultdict(list)
        for z, t in f.items():
            fibers[t].append(z)
        differs = all(any(u(z) != t(z) for z in fib) for t, fib in fibers.items())
        if u in set(f.values()) or not differs:
            return False, None, {"f": f, "g": g, "u": u}
    return True, {"inputs": count}, None


def check_union_mov(n, rng, w):
    x = Carrier.of_size(n)
    if n <= EXHAUSTIVE_UP_TO:
        perms = _all_perms(x)
        pairs = itertools.product(perms, perms)
    else:
        pairs = ((random_perm(x, rng), random_perm(x, rng)) for _ in range(SAMPLES))
    count = 0
    for f, g in pairs:
        h = C.union_mov(f, g)
        count += 1
        if mov_of(h) != mov_of(f) | mov_of(g):
            return False, None, {"f": f, "g": g, "h": h}
    return True, {"pairs": count}, None


def check_fold_union_mov(n, rng, w):
    x = Carrier.of_size(n)
    if n == 0:
        return C.fold_union_mov([], x).is_identity(), {"sequences": 1}, None
    for _ in range(SAMPLES):
        ts = list({random_perm(x, rng) for _ in range(rng.randint(0, 4))})
        h = C.fold_union_mov(ts, x)
        want = frozenset().union(*(mov_of(t) for t in ts)) if ts else frozenset()
        if mov_of(h) != want:
            return False, None, {"ts": ts, "h": h}
    return True, {"sequences": SAMPLES}, None


def check_s2(n, rng, w):
    x = Carrier.of_size(n)
    wit = C.s2_bijection(x)
    ok = wit.verify() and len(wit.graph) == comb(n, 2) + 1
    ok = ok and all(C.s2_inverse(v, x) == t for t, v in wit.graph.items())
    return ok, {"size": len(wit.graph)}, None if ok else {"graph": len(wit.graph)}


def check_pairpairs(n, rng, w):
    if n < 8:
        return True, {"skipped": "needs 8 elements"}, None
    x = Carrier.of_size(n)
    wit = C.pairpairs_to_s5(x)
    expected = comb(comb(n, 2), 2) + 1
    small = all(len(mov_of(t)) <= 5 for t in wit.graph.values())
    ok = wit.verify() and len(wit.graph) == expected and small
    return ok, {"inputs": len(wit.graph)}, None if ok else {"inputs": len(wit.graph), "expected": expected}


def check_tuples(n, rng, w):
    found = 0
    x = Carrier.of_size(n)
    k = 1
    while 2 * k * (k + 1) <= n and n**k <= 10**5:
        coder = C.TupleCoder(x, k)
        wit = coder.witness()
        for t, p in wit.graph.items():
            if coder.decode(p) != t or len(mov_of(p)) != 2 * k + 1:
                return False, None, {"n": k, "t": t, "image": p}
        if not wit.verify():
            return False, None, {"n": k, "reason": "not injective"}
        found += len(wit.graph)
        k += 1
    if not found:
        return True, {"skipped": "needs 4 elements"}, None
    return True, {"tuples": found}, None


def check_assembly(n, rng, w):
    top = 0
    while 2 * (top + 1) * (top + 2) <= n:
        top += 1
    if top == 0:
        return True, {"skipped": "needs 4 elements"}, None
    top = min(top, 2)
    x = Carrier.of_size(n)
    wit = C.seq_to_sfin_assembly(x, list(x.elements), top)
    sizes = all(len(mov_of(p)) == (2 * len(t) + 1 if t else 0) for t, p in wit.graph.items())
    ok = wit.verify() and sizes
    return ok, {"max_len": top, "inputs": len(wit.graph)}, None if ok else {"max_len": top}


def check_seq_collapse(n, rng, w):
    x = Carrier.of_size(min(n, 3))
    bound = min(n, 3)
    count = 0
    for t in enumerate_kind("seq", x, bound, w=w):
        s = C.seq_collapse(t, w)
        count += 1
        if len(set(s)) != len(s) or C.seq_expand(s) != t:
            return False, None, {"t": t, "collapsed": s}
    return True, {"sequences": count}, None


def check_seqinj_split(n, rng, w):
    k = min(n, 2)
    universe = [z for z in range(k)] + [Nat(i, 3) for i in range(3)]
    seen = {}
    for length in range(0, 4):
        for t in itertools.permutations(universe, length):
            code = C.seqinj_split(t)
            if code in seen:
                return False, None, {"t": t, "other": seen[code]}
            seen[code] = t
            if C.seqinj_join(code[0], code[1], 3) != t:
                return False, None, {"t": t, "roundtrip": "failed"}
    return True, {"sequences": len(seen)}, None


def check_seqinj_to_sfin(n, rng, w):
    if n == 0:
        return True, {"skipped": "empty carrier"}, None
    x = Carrier.of_size(min(n, 5))
    wit = C.seqinj_to_sfin_witness(x)
    ok = wit.verify()
    return ok, {"max_fiber": wit.max_fiber(), "bound": wit.fiber_bound}, None if ok else {"max_fiber": wit.max_fiber()}


def check_seqinj_to_nat_sfin(n, rng, w):
    if n == 0:
        return True, {"skipped": "empty carrier"}, None
    x = Carrier.of_size(min(n, 5))
    wit = C.seqinj_to_nat_sfin_witness(x)
    ok = wit.verify()
    return ok, {"inputs": len(wit.graph)}, None


def check_sfin_rank(n, rng, w):
    x = Carrier.of_size(min(n, 6))
    vals = set()
    for t in enumerate_kind("S", x):
        r = C.sfin_rank_surjection(t)
        vals.add(r)
        if r != (0 if t.is_identity() else len(mov_of(t)) - 1):
            return False, None, {"t": t, "rank": r}
    expected = {0} | set(range(1, len(x))) if len(x) >= 2 else {0}
    return vals == expected, {"values": sorted(vals)}, None


def check_mov_map(n, rng, w):
    x = Carrier.of_size(min(n, 6))
    wit = C.mov_map_witness(x)
    sizes = Counter(wit.graph.values())
    bad = [sorted(y) for y, k in sizes.items() if k != derangements(len(y))]
    return not bad, {"subsets": len(sizes)}, bad[:3] or None


def check_ordered_seqinj(n, rng, w):
    x = Carrier.of_size(min(n, 5))
    wit = C.sfin_to_seqinj_witness(x)
    no_len1 = all(len(s) != 1 for s in wit.graph.values())
    round_trip = all(C.seqinj_to_sfin_ordered(s, x) == t for t, s in wit.graph.items())
    ok = wit.verify() and no_len1 and round_trip
    return ok, {"perms": len(wit.graph)}, None


def check_lex_order(n, rng, w):
    m = min(max(n, 1), 5)
    sets = [frozenset(c) for k in range(m + 1) for c in itertools.combinations(range(m), k)]
    for a in sets:
        if C.lex_subset_order(a, a) != 0:
            return False, None, {"reflexive": sorted(a)}
        for b in sets:
            if a != b and C.lex_subset_order(a, b) != -C.lex_subset_order(b, a):
                return False, None, {"z": sorted(a), "v": sorted(b)}
    ordered = sorted(sets, key=C.lex_key)
    for a, b, c in itertools.combinations(ordered, 3):
        if not (C.lex_subset_order(a, b) < 0 and C.lex_subset_order(b, c) < 0 and C.lex_subset_order(a, c) < 0):
            return False, None, {"chain": [sorted(a), sorted(b), sorted(c)]}
    return True, {"sets": len(sets)}, None


def subset_carrier(n: int, universe: int = 4) -> Carrier:
    """n distinct subsets of [0, universe), chosen in lexicographic-order position."""
    sets = [frozenset(c) for k in range(universe + 1) for c in itertools.combinations(range(universe), k)]
    return Carrier(sets[:n])


def check_perm_lex(n, rng, w):
    x = subset_carrier(min(n, 4))
    perms = _all_perms(x)
    for t in perms:
        if C.perm_lex_order(t, t) != 0:
            return False, None, {"t": t}
    for t, u in itertools.combinations(perms, 2):
        if C.perm_lex_order(t, u) != -C.perm_lex_order(u, t) or C.perm_lex_order(t, u) == 0:
            return False, None, {"t": t, "u": u}
    ordered = sorted(perms, key=functools.cmp_to_key(C.perm_lex_order))
    for a, b, c in itertools.combinations(ordered, 3):
        if not (C.perm_lex_order(a, b) < 0 and C.perm_lex_order(b, c) < 0 and C.perm_lex_order(a, c) < 0):
            return False, None, {"chain": [a, b, c]}
    return True, {"perms": len(perms), "pairs": len(perms) * (len(perms) - 1) // 2}, None


def random_finite_to_one(perms: list, carrier: Carrier, rng: random.Random) -> dict:
    return {t: rng.choice(carrier.elements) for t in perms}


def check_fiber_rank(n, rng, w):
    x = subset_carrier(min(n, 3))
    if len(x) == 0:
        return True, {"skipped": "empty carrier"}, None
    perms = _all_perms(x)
    for _ in range(100):
        f = random_finite_to_one(perms, x, rng)
        wit = C.fiber_rank_injection(f, x)
        fib = Counter(f.values())
        if not wit.verify() or any(r >= fib[z] for r, z in wit.graph.values()):
            return False, None, {"f": f}
    return True, {"maps": 100}, None


def check_constant_seq(n, rng, w):
    x = Carrier.of_size(min(n, 3))
    seen = {}
    for k in range(4):
        for z in x:
            s = C.constant_seq_injection(k, z, w)
            if s in seen or len(s) != k + 1:
                return False, None, {"n": k, "z": z}
            seen[s] = (k, z)
    return True, {"inputs": len(seen)}, None


def check_absorb(n, rng, w):
    if n < 4:
        return True, {"skipped": "needs 4 elements"}, None
    x = Carrier.of_size(n)
    f = list(x.elements)[: min(n, w)]
    a = C.absorb_omega(x, f)
    vals = list(a.mapping.values())
    fixes = all(a(z) == z for z in x if z not in f)
    ok = len(set(vals)) == len(vals) and fixes
    if a.nat_bound:
        ok = ok and a(Nat(0, a.nat_bound)) == f[1]
    return ok, {"nat_bound": a.nat_bound, "frontier": len(a.frontier)}, None


def check_powerset_orbits(n, rng, w):
    x = Carrier.of_size(min(n, 8))
    pairs = [x.elements[i : i + 2] for i in range(0, len(x) - 1, 2)]
    f = Perm(x, {})
    for p in pairs:
        f = f * Perm(x, {p[0]: p[1], p[1]: p[0]})
    wit = C.powerset_of_orbits_injection(f)
    ok = wit.verify() and len(wit.graph) == 2 ** len(pairs)
    return ok, {"subsets": len(wit.graph)}, None


CHECKS = {
    "absorb": check_absorb,
    "assembly": check_assembly,
    "cantor_bernstein": check_cantor_bernstein,
    "constant_seq": check_constant_seq,
    "diagonal": check_diagonal,
    "fiber_rank": check_fiber_rank,
    "fold_union_mov": check_fold_union_mov,
    "lex_order": check_lex_order,
    "mov_map": check_mov_map,
    "ordered_seqinj": check_ordered_seqinj,
    "pairpairs": check_pairpairs,
    "perm_lex": check_perm_lex,
    "powerset_orbits": check_powerset_orbits,
    "s2": check_s2,
    "seq_collapse": check_seq_collapse,
    "seqinj_split": check_seqinj_split,
    "seqinj_to_nat_sfin": check_seqinj_to_nat_sfin,
    "seqinj_to_sfin": check_seqinj_to_sfin,
    "sfin_rank": check_sfin_rank,
    "tuples": check_tuples,
    "union_mov": check_union_mov,
}


def run_constructions(size: int, seed: int = 0, only: str | None = None, w: int = DEFAULT_W) -> VerificationReport:
    """Run every construction oracle at the given carrier size."""
    report = VerificationReport("constructions", seed=seed, caps={"size": size, "w": w})
    names = sorted(CHECKS) if only is None else [only]
    for name in names:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}; choose from {', '.join(sorted(CHECKS))}")
        rng = random.Random(f"{seed}:{name}")
        t0 = time.perf_counter()
        if size == 0:
            passed, wit, ce = True, {"vacuous": True}, None
        else:
            passed, wit, ce = CHECKS[name](size, rng, w)
        report.add(name, passed, wit, ce, (time.perf_counter() - t0) * 1000)
    return report
