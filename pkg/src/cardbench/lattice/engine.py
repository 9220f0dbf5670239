"""Block frames and the automorphism-extension engine.

A frame is a building block P with greatest element e and the down-set Q of
inf cov(e).  Every automorphism f of Q extends to P once a permutation is
chosen for each fiber of lower covers outside Q; the fibers are indexed by
``sigma`` (height-2 parents) and ``tau`` (parent, base) bijections onto
0..k-1.  All results are re-checked with the order-matrix oracle.
"""

from __future__ import annotations

import random
from typing import Iterable, Mapping

import numpy as np

from ..report import VerificationReport
from .levels import DEFAULT_LEVEL_CAP, LatticeElem, LatticeLevel, build_level
from .poset import Poset, is_automorphism, verify_building_block, verify_jordan_dedekind


class NotAnAutomorphism(AssertionError):
    pass


class PreconditionError(ValueError):
    pass


def _heights(p: Poset) -> dict:
    report, heights = verify_jordan_dedekind(p)
    if heights is None:
        raise PreconditionError(f"chain condition fails: {report.checks[0].counterexample}")
    return heights


def _tag_reader(fiber: list) -> dict:
    return {a: a.tag for a in fiber}


def _canonical(fiber: list) -> dict:
    return {a: i for i, a in enumerate(fiber)}


class BlockFrame:
    """A building block split into Q and the fibers above it."""

    def __init__(self, p: Poset, sigma: Mapping | None = None, tau: Mapping | None = None,
                 expect_q: Iterable | None = None):
        self.p = p
        self.height = _heights(p)
        e = p.greatest()
        if e is None:
            raise PreconditionError("no greatest element")
        self.e = e
        self.o = p.least()
        if e == self.o:
            self.q = frozenset([e])
        else:
            self.q = frozenset(p.down_set(p.inf_cov(e)))
        if expect_q is not None and frozenset(expect_q) != self.q:
            raise PreconditionError("Q differs from the expected lower level")
        self._infcov = {b: p.inf_cov(b) for b in p.elements}
        self.outside = [a for a in p.elements if a not in self.q]
        self.c_set = [b for b in self.outside if self.height[b] == 2]
        self.d_set = [(b, c) for b in self.outside if self.height[b] > 2 for c in p.cov(self._infcov[b])]
        self.c_fiber = {b: [a for a in p.cov(b) if a not in self.q] for b in self.c_set}
        self.d_fiber = {
            (b, c): [a for a in p.cov(b) if self._infcov[a] == c and a not in self.q] for b, c in self.d_set
        }
        default = _tag_reader if all(isinstance(x, LatticeElem) for x in p.elements) else _canonical
        self.sigma = {b: dict(sigma[b]) if sigma and b in sigma else default(f) for b, f in self.c_fiber.items()}
        self.tau = {bc: dict(tau[bc]) if tau and bc in tau else default(f) for bc, f in self.d_fiber.items()}
        for name, table, fibers in (("sigma", self.sigma, self.c_fiber), ("tau", self.tau, self.d_fiber)):
            for key, bij in table.items():
                if set(bij) != set(fibers[key]) or sorted(bij.values()) != list(range(len(fibers[key]))):
                    raise PreconditionError(f"{name}[{key!r}] is not a bijection onto 0..{len(fibers[key]) - 1}")
        self.sigma_inv = {b: {v: a for a, v in m.items()} for b, m in self.sigma.items()}
        self.tau_inv = {bc: {v: a for a, v in m.items()} for bc, m in self.tau.items()}
        self._matrix = None

    @classmethod
    def for_level(cls, level: LatticeLevel) -> "BlockFrame":
        """The frame of A_{m+2}, asserting Q = A_m."""
        m = level.level - 2
        if m < 0:
            raise PreconditionError("frames of A_n need n >= 2")
        return cls(level, expect_q=level.created[: level.sizes[m]])

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self.p.order_matrix()
        return self._matrix

    def inf_cov(self, b):
        return self._infcov[b]

    def k(self, b) -> int:
        return len(self.c_fiber[b])

    def l(self, b, c) -> int:
        return len(self.d_fiber[(b, c)])

    def k_expected(self, b) -> int:
        return 4 if b == self.e else 3

    def l_expected(self, b, c) -> int:
        if b == self.e:
            return 4
        return 3 if self._infcov[self.prd(b)] == c else 4

    def scc(self, a):
        if a in self.q or a == self.e:
            raise PreconditionError(f"{a!r} lies in Q or is the top")
        ups = self.p.upper_covers(a)
        if len(ups) != 1:
            raise PreconditionError(f"{a!r} has {len(ups)} upper covers")
        return ups[0]

    def prd(self, a):
        return self._infcov[self.scc(a)]

    def is_automorphism(self, g: dict) -> bool:
        return is_automorphism(self.p, g, self.matrix())


def verify_frame(frame: BlockFrame) -> VerificationReport:
    """Fiber counts against the four-element tables, and the scc/prd identities."""
    r = VerificationReport("frame")
    bad_k = [(repr(b), frame.k(b)) for b in frame.c_set if frame.k(b) != frame.k_expected(b)]
    r.add("k_table", not bad_k, witness={"C": len(frame.c_set)}, counterexample=bad_k[:5] or None)
    bad_l = [(repr(b), repr(c), frame.l(b, c)) for b, c in frame.d_set if frame.l(b, c) != frame.l_expected(b, c)]
    r.add("l_table", not bad_l, witness={"D": len(frame.d_set)}, counterexample=bad_l[:5] or None)
    p = frame.p
    bad = []
    for a in frame.outside:
        if a == frame.e:
            continue
        s = frame.scc(a)
        d = frame.prd(a)
        ia = p.index[a]
        if p.up[ia] & ~(1 << ia) != p.up[p.index[s]]:
            bad.append(("scc", repr(a)))
        if d not in frame.q or not p.lt(d, a) or d not in p.cov(a):
            bad.append(("prd", repr(a)))
        if any(p.lt(x, a) != p.le(x, d) for x in frame.q):
            bad.append(("prd_below", repr(a)))
    r.add("scc_prd", not bad, counterexample=bad[:5] or None)
    return r


def _perm_ok(perm, size: int) -> tuple:
    perm = tuple(range(size)) if perm is None else tuple(perm)
    if sorted(perm) != list(range(size)):
        raise PreconditionError(f"{perm} is not a permutation of 0..{size - 1}")
    return perm


def phi_extend(frame: BlockFrame, p: Mapping | None = None, q: Mapping | None = None,
               f: Mapping | None = None, check: bool = True) -> dict:
    """Extend the automorphism f of Q to P using fiber permutations p (on C) and q (on D)."""
    p = p or {}
    q = q or {}
    if f is None:
        f = {d: d for d in frame.q}
    f = dict(f)
    if set(f) != frame.q or set(f.values()) != frame.q:
        raise PreconditionError("f must be a permutation of Q")
    qpos = Poset([x for x in frame.p.elements if x in frame.q],
                 [(lo, hi) for lo in frame.q for hi in frame.p.upper_covers(lo) if hi in frame.q])
    if not is_automorphism(qpos, f):
        raise PreconditionError("f is not an automorphism of Q")
    for b in p:
        if b not in frame.c_fiber:
            raise PreconditionError(f"p names {b!r}, which is not a height-2 element outside Q")
    for bc in q:
        if bc not in frame.d_fiber:
            raise PreconditionError(f"q names {bc!r}, which is not in D")
    g = dict(f)
    g[frame.e] = frame.e
    order = sorted((a for a in frame.outside if a != frame.e),
                   key=lambda a: (-frame.height[a], frame.p.index[a]))
    for a in order:
        b = frame.scc(a)
        gb = g[b]
        if frame.height[a] == 1:
            perm = _perm_ok(p.get(b), frame.k(b))
            g[a] = frame.sigma_inv[gb][perm[frame.sigma[b][a]]]
        else:
            c = frame.inf_cov(a)
            fc = g[c]
            perm = _perm_ok(q.get((b, c)), frame.l(b, c))
            g[a] = frame.tau_inv[(gb, fc)][perm[frame.tau[(b, c)][a]]]
    if check and not frame.is_automorphism(g):
        raise NotAnAutomorphism("extension failed the order oracle")
    return g


def psi_extend(frame: BlockFrame, f: Mapping | None = None, check: bool = True) -> dict:
    """phi_extend with every fiber permutation the identity."""
    return phi_extend(frame, None, None, f, check)


def _swap(i: int, j: int, size: int) -> tuple:
    perm = list(range(size))
    perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


def move_witness(frame: BlockFrame, a, d) -> dict:
    """An automorphism fixing Q and d pointwise that moves a.

    Swaps a with the least-indexed member of its fiber that is neither a nor d.
    """
    if a in frame.q or a == frame.e or a not in frame.p:
        raise PreconditionError(f"{a!r} must lie outside Q and below the top")
    if d == a or d not in frame.p:
        raise PreconditionError("d must be another element of P")
    if not (d in frame.q or frame.height[d] >= frame.height[a]):
        raise PreconditionError("d must lie in Q or be at least as high as a")
    b0 = frame.scc(a)
    if frame.height[a] == 1:
        i = frame.sigma[b0][a]
        j = next(j for j in range(frame.k(b0)) if frame.sigma_inv[b0][j] not in (a, d))
        g = phi_extend(frame, p={b0: _swap(i, j, frame.k(b0))})
    else:
        c0 = frame.inf_cov(a)
        i = frame.tau[(b0, c0)][a]
        j = next(j for j in range(frame.l(b0, c0)) if frame.tau_inv[(b0, c0)][j] not in (a, d))
        g = phi_extend(frame, q={(b0, c0): _swap(i, j, frame.l(b0, c0))})
    clauses = move_clauses(frame, g, a, d)
    if not all(clauses.values()):
        raise AssertionError(f"move witness broke its contract: {clauses}")
    return g


def move_clauses(frame: BlockFrame, g: dict, a, d) -> dict:
    return {
        "automorphism": frame.is_automorphism(g),
        "fixes_q_and_d": all(g[x] == x for x in frame.q) and g[d] == d,
        "moves_a": g[a] != a,
        "fixes_higher": all(g[v] == v for v in frame.outside if frame.height[v] > frame.height[a]),
    }


class Tower:
    """Built levels up to some N with frames cached per level; reused across extensions."""

    def __init__(self, top: int, cap: int = DEFAULT_LEVEL_CAP):
        self.top = build_level(top, cap)
        self._levels = {top: self.top}
        self._frames: dict = {}

    def level(self, k: int) -> LatticeLevel:
        if k not in self._levels:
            self._levels[k] = self.top.prefix(k)
        return self._levels[k]

    def frame(self, k: int) -> BlockFrame:
        if k not in self._frames:
            self._frames[k] = BlockFrame.for_level(self.level(k))
        return self._frames[k]


def extend_to_level(m: int, g: Mapping, n: int, cap: int = DEFAULT_LEVEL_CAP, tower: Tower | None = None) -> dict:
    """Extend an automorphism of A_m to A_n two levels at a time, reading fibers by tag."""
    if n < m or (n - m) % 2:
        raise PreconditionError(f"need n >= m and n = m (mod 2), got m={m}, n={n}")
    if n > cap:
        raise PreconditionError(f"level {n} exceeds cap {cap}")
    tower = tower or Tower(n, cap)
    base = tower.level(m)
    g = dict(g)
    if set(g) != set(base.elements) or not is_automorphism(base, g):
        raise PreconditionError("g is not an automorphism of A_m")
    for k in range(m + 2, n + 1, 2):
        g = psi_extend(tower.frame(k), g)
    return g


def separation_suite(k: int, n: int, cap: int = DEFAULT_LEVEL_CAP) -> VerificationReport:
    """For every a outside A_k and every b, an automorphism fixing A_k and b that moves a.

    a ranges over A_{n-1} minus A_k, so a witness built two levels up still
    fits inside A_n, and b over A_{n-1} minus {a}.  If b is lower than a (in
    the stamp-then-rank sense) the roles swap and the witness moves b while
    fixing a; either way it fixes A_k, and the tally keeps both kinds apart.
    """
    r = VerificationReport(f"separation_k{k}_n{n}")
    if k == n:
        r.add("vacuous", True, witness={"cases": 0})
        return r
    if k + 2 > n:
        raise PreconditionError(f"need k + 2 <= n, got k={k}, n={n}")
    if n > cap:
        raise PreconditionError(f"level {n} exceeds cap {cap}")
    tower = Tower(n, cap)
    top = tower.top
    a_k = set(top.created[: top.sizes[k]])
    pool = top.created[: top.sizes[n - 1]]
    cases = {"direct": 0, "swapped": 0}
    failures = []
    for a in pool:
        if a in a_k:
            continue
        stamp = a.stamp
        low = set(top.created[: top.sizes[stamp]])
        for b in pool:
            if b == a:
                continue
            direct = b in low or (b.stamp == stamp and b.rank >= a.rank)
            if direct:
                lvl, mover, keep = stamp + 2, a, b
            else:
                lvl, mover, keep = b.stamp + 2, b, a
            g = move_witness(tower.frame(lvl), mover, keep)
            target = n if (n - lvl) % 2 == 0 else n - 1
            big = extend_to_level(lvl, g, target, cap, tower) if target > lvl else g
            ok = (all(big[x] == x for x in a_k) and big[keep] == keep and big[mover] != mover
                  and is_automorphism(tower.level(target), big, tower.frame(target).matrix()))
            cases["direct" if direct else "swapped"] += 1
            if not ok:
                failures.append({"a": a.describe(), "b": b.describe(), "level": lvl})
    total = cases["direct"] + cases["swapped"]
    r.add("separation", not failures and total > 0, witness={"cases": total, **cases},
          counterexample=failures[:5] or None)
    return r


def interval_checks(p: Poset, heights: dict | None = None, pairs: Iterable | None = None) -> VerificationReport:
    """For a < b with a not below inf cov(b): a unique largest lower cover of a under inf cov(b),
    monotone inf cov, and a unique saturated chain from a to b."""
    r = VerificationReport("interval_chains")
    heights = heights or _heights(p)
    infcov = {b: p.inf_cov(b) for b in p.elements}
    bad = []
    checked = 0
    if pairs is None:
        pairs = ((a, b) for b in p.elements for a in p.down_set(b) if a != b)
    for a, b in pairs:
        ic = infcov[b]
        if ic is None or p.le(a, ic):
            continue
        checked += 1
        below_ic = [d for d in p.down_set(ic)]
        cands = [c for c in p.cov(a) if p.le(c, ic)]
        ok_i = any(all(p.le(d, c) for d in below_ic if p.lt(d, a)) for c in cands)
        ok_ii = infcov[a] is not None and p.le(infcov[a], ic)
        count = _count_chains(p, a, b)
        if not (ok_i and ok_ii and count == 1):
            bad.append({"a": repr(a), "b": repr(b), "i": ok_i, "ii": ok_ii, "chains": count})
    r.add("interval_chains", not bad, witness={"pairs": checked}, counterexample=bad[:5] or None)
    return r


def _count_chains(p: Poset, a, b) -> int:
    memo = {}

    def rec(x):
        if x == b:
            return 1
        if x in memo:
            return memo[x]
        memo[x] = sum(rec(y) for y in p.upper_covers(x) if p.le(y, b))
        return memo[x]

    return rec(a)


def verify_level(level: LatticeLevel, interval_sample: int | None = None, seed: int = 0) -> VerificationReport:
    """Every structural check for a built A_n."""
    r = VerificationReport(f"level_{level.level}")
    bb, heights = verify_building_block(level)
    r.extend(bb)
    r.add("least_is_o", level.least() == level.bottom)
    r.add("greatest_is_top", level.greatest() == level.top)
    if heights is not None:
        bad = [repr(a) for a in level.elements if not a.is_bottom and (heights[a] != a.rank + 1 or level.inf_cov(a) != a.base)]
        r.add("height_and_base_identities", not bad, counterexample=bad[:5] or None)
        if level.level >= 2:
            r.extend(verify_frame(BlockFrame.for_level(level)))
        pairs = [(a, b) for b in level.elements for a in level.down_set(b) if a != b]
        if interval_sample is not None and len(pairs) > interval_sample:
            pairs = random.Random(seed).sample(pairs, interval_sample)
        r.extend(interval_checks(level, heights, pairs))
    return r
