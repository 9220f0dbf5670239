"""Explicit injections, bijections and finite-to-one maps between finite sets.

Each construction returns plain values; the ``*_witness`` helpers package a
whole map as a :class:`MapWitness` whose declared kind can be re-checked by
:meth:`MapWitness.verify`, which never looks at how the graph was produced.

Pairing used by :func:`seqinj_split`
------------------------------------
``gamma(n)`` is the Elias gamma code of ``n >= 1``: ``len(bin(n)) - 1`` zero
bits followed by the binary digits of ``n``.  A sequence ``s`` of naturals
becomes the bit string ``gamma(len(s) + 1) gamma(s[0] + 1) ...``.  The code
of a triple ``(s0, s1, s2)`` is the integer whose binary form is ``1``
followed by the three bit strings.  Gamma codes are prefix-free, so the code
is injective and decodable (:func:`unpair_triple`), and it grows with the
total bit length of the entries rather than exponentially.  Codes at or above
``PAIRING_LIMIT`` raise ``OverflowError``; the default limit fits every
injective sequence over ``x u [0, 64)`` with ``|x| <= 100``.
"""

from __future__ import annotations

import functools
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .perm import (
    DEFAULT_W,
    Carrier,
    Nat,
    Perm,
    TruncationError,
    cycle_perm,
    enumerate_kind,
    induce_on_subset,
    mov_of,
    nontrivial_orbits,
    orbit_of,
)

PAIRING_LIMIT = 2**4096

INJECTION = "injection"
BIJECTION = "bijection"
FINITE_TO_ONE = "finite-to-one"
SURJECTION = "surjection"


@dataclass
class MapWitness:
    """The full graph of a map between finite sets together with its claimed kind."""

    kind: str
    domain: str
    codomain: str
    graph: dict
    codomain_set: frozenset | None = None
    fiber_bound: int | None = None
    notes: dict = field(default_factory=dict)

    def fibers(self) -> dict:
        out = defaultdict(list)
        for k, v in self.graph.items():
            out[v].append(k)
        return dict(out)

    def max_fiber(self) -> int:
        return max((len(f) for f in self.fibers().values()), default=0)

    def verify(self) -> bool:
        """Re-check the declared kind from the graph alone."""
        values = list(self.graph.values())
        distinct = len(set(values)) == len(values)
        if self.codomain_set is not None and not set(values) <= self.codomain_set:
            return False
        if self.kind == INJECTION:
            return distinct
        if self.kind == BIJECTION:
            return distinct and self.codomain_set is not None and set(values) == self.codomain_set
        if self.kind == SURJECTION:
            return self.codomain_set is not None and set(values) == self.codomain_set
        if self.kind == FINITE_TO_ONE:
            return self.fiber_bound is None or self.max_fiber() <= self.fiber_bound
        raise ValueError(f"unknown map kind {self.kind!r}")


def _check_injective(f: Mapping, name: str):
    vals = list(f.values())
    if len(set(vals)) != len(vals):
        raise ValueError(f"{name} is not injective")


# --- Cantor-Bernstein -------------------------------------------------------


def cantor_bernstein(f: Mapping, g: Mapping, x: Iterable | None = None) -> dict:
    """Bijection x -> y from injections f: x -> y and g: y -> x.

    Each a in x is classified by tracing its ancestry a <-g- y0 <-f- x1 <-g- ...
    Chains that stop in y (a y-element outside ran f) use g^-1; chains that stop
    in x or cycle use f.
    """
    _check_injective(f, "f")
    _check_injective(g, "g")
    x = list(f) if x is None else list(x)
    for a in x:
        if a not in f:
            raise ValueError(f"f is not total on x: missing {a!r}")
    for b, a in g.items():
        if a not in f:
            raise ValueError(f"g maps {b!r} outside x")
    f_inv = {v: k for k, v in f.items()}
    g_inv = {v: k for k, v in g.items()}
    h = {}
    for a in x:
        side = "x"
        cur = a
        seen = {("x", a)}
        while True:
            if side == "x":
                if cur not in g_inv:
                    use_f = True
                    break
                cur, side = g_inv[cur], "y"
            else:
                if cur not in f_inv:
                    use_f = False
                    break
                cur, side = f_inv[cur], "x"
            if (side, cur) in seen:
                use_f = True
                break
            seen.add((side, cur))
        h[a] = f[a] if use_f else g_inv[a]
    return h


def chain_classes(f: Mapping, g: Mapping) -> list[tuple[str, frozenset]]:
    """Connected components of the bipartite f/g graph with their origin type.

    Origin is ``"x"``, ``"y"`` or ``"cycle"``.  Used as an independent check of
    :func:`cantor_bernstein`.
    """
    adj = defaultdict(set)
    for a, b in f.items():
        adj[("x", a)].add(("y", b))
        adj[("y", b)].add(("x", a))
    for b, a in g.items():
        adj[("y", b)].add(("x", a))
        adj[("x", a)].add(("y", b))
    for a in f:
        adj[("x", a)]
    for b in g:
        adj[("y", b)]
    f_vals = set(f.values())
    g_vals = set(g.values())
    seen = set()
    out = []
    for node in adj:
        if node in seen:
            continue
        comp = set()
        stack = [node]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(adj[v] - comp)
        seen |= comp
        starts = [v for v in comp if (v[0] == "x" and v[1] not in g_vals) or (v[0] == "y" and v[1] not in f_vals)]
        origin = starts[0][0] if starts else "cycle"
        out.append((origin, frozenset(comp)))
    return out


# --- absorbing a copy of omega ---------------------------------------------


@dataclass
class Absorption:
    mapping: dict
    nat_bound: int
    frontier: frozenset

    def __call__(self, z):
        return self.mapping[z]


def absorb_omega(x: Carrier, f: Sequence, nat_bound: int | None = None) -> Absorption:
    """Map x u {0..W'-1} into x via g(f(n)) = f(2n), g(n) = f(2n+1), identity off ran f.

    ``f`` lists f(0), ..., f(W-1).  Elements f(n) with 2n >= W cannot be mapped
    inside the truncation and are reported in ``frontier``.
    """
    w = len(f)
    if len(set(f)) != w:
        raise ValueError("f is not injective")
    for z in f:
        x.index(z)
    if nat_bound is None:
        nat_bound = max((w - 2) // 2, 0)
    if 2 * nat_bound + 1 >= w and nat_bound > 0:
        raise TruncationError(f"need 2*W'+1 < W, got W'={nat_bound}, W={w}")
    ran = set(f)
    g = {z: z for z in x if z not in ran}
    frontier = []
    for n, z in enumerate(f):
        if 2 * n < w:
            g[z] = f[2 * n]
        else:
            frontier.append(z)
    for n in range(nat_bound):
        g[Nat(n, nat_bound)] = f[2 * n + 1]
    return Absorption(g, nat_bound, frozenset(frontier))


# --- permutations and orbits -------------------------------------------------


def orbit_subset_perm(f: Perm, u: Iterable[frozenset]) -> Perm:
    moved = set().union(*u) if u else set()
    return Perm(f.carrier, {z: f(z) for z in moved})


def powerset_of_orbits_injection(f: Perm) -> MapWitness:
    y = nontrivial_orbits(f)
    graph = {}
    for k in range(len(y) + 1):
        for u in itertools.combinations(y, k):
            graph[frozenset(u)] = orbit_subset_perm(f, u)
    return MapWitness(INJECTION, "P(nontrivial orbits)", "S(x)", graph)


# --- sequences ---------------------------------------------------------------


def seq_collapse(t: Sequence, w: int = DEFAULT_W) -> tuple:
    """Replace each repeated entry by the position of its previous occurrence."""
    if len(t) > w:
        raise TruncationError(f"sequence length {len(t)} exceeds W={w}")
    last = {}
    out = []
    for n, z in enumerate(t):
        if z in last:
            out.append(Nat(last[z], w))
        else:
            out.append(z)
        last[z] = n
    return tuple(out)


def seq_expand(s: Sequence) -> tuple:
    """Inverse of :func:`seq_collapse`."""
    out = []
    for v in s:
        out.append(out[v.value] if isinstance(v, Nat) else v)
    return tuple(out)


def _gamma(n: int) -> str:
    """Elias gamma code of n >= 1."""
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def _read_gamma(bits: str, pos: int) -> tuple[int, int]:
    zeros = 0
    while bits[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    return int(bits[pos + zeros : end], 2), end


def _seq_bits(s: Sequence[int]) -> str:
    if any(a < 0 for a in s):
        raise ValueError("only naturals can be coded")
    return _gamma(len(s) + 1) + "".join(_gamma(a + 1) for a in s)


def _read_seq(bits: str, pos: int) -> tuple[tuple[int, ...], int]:
    length, pos = _read_gamma(bits, pos)
    out = []
    for _ in range(length - 1):
        a, pos = _read_gamma(bits, pos)
        out.append(a - 1)
    return tuple(out), pos


def seq_code(s: Sequence[int]) -> int:
    return int("1" + _seq_bits(s), 2)


def seq_decode(code: int) -> tuple[int, ...]:
    bits = bin(code)[3:]
    s, pos = _read_seq(bits, 0)
    if pos != len(bits):
        raise ValueError(f"{code} is not a sequence code")
    return s


def pair_triple(s0, s1, s2, limit: int | None = PAIRING_LIMIT) -> int:
    z = int("1" + _seq_bits(s0) + _seq_bits(s1) + _seq_bits(s2), 2)
    if limit is not None and z >= limit:
        raise OverflowError(f"pairing code exceeds limit {limit}")
    return z


def unpair_triple(z: int):
    bits = bin(z)[3:]
    out = []
    pos = 0
    for _ in range(3):
        s, pos = _read_seq(bits, pos)
        out.append(s)
    if pos != len(bits):
        raise ValueError(f"{z} is not a triple code")
    return tuple(out)


def seqinj_split(t: Sequence, limit: int | None = PAIRING_LIMIT) -> tuple[int, tuple]:
    """Split an injective sequence over x u omega into (code, x-subsequence).

    The code pairs the omega-values in order, the positions of x-values and
    the positions of omega-values.
    """
    if len(set(t)) != len(t):
        raise ValueError("sequence is not injective")
    x_pos = tuple(i for i, v in enumerate(t) if not isinstance(v, Nat))
    nat_pos = tuple(i for i, v in enumerate(t) if isinstance(v, Nat))
    nat_vals = tuple(t[i].value for i in nat_pos)
    return pair_triple(nat_vals, x_pos, nat_pos, limit), tuple(t[i] for i in x_pos)


def seqinj_join(code: int, xs: Sequence, w: int = DEFAULT_W) -> tuple:
    nat_vals, x_pos, nat_pos = unpair_triple(code)
    out = [None] * (len(x_pos) + len(nat_pos))
    for i, z in zip(x_pos, xs):
        out[i] = z
    for i, v in zip(nat_pos, nat_vals):
        out[i] = Nat(v, w)
    return tuple(out)


def constant_seq_injection(n: int, z, w: int = DEFAULT_W) -> tuple:
    if n >= w:
        raise TruncationError(f"n={n} must be below W={w}")
    return (z,) * (n + 1)


# --- injective sequences and finitary permutations -------------------------


def seqinj_to_sfin(t: Sequence, carrier: Carrier, anchor=None) -> Perm:
    z = carrier.least() if anchor is None else anchor
    t = tuple(t)
    if z in t:
        return cycle_perm(carrier, t)
    return cycle_perm(carrier, t + (z,))


def seqinj_to_nat_sfin(t: Sequence, carrier: Carrier, anchor=None) -> tuple[int, Perm]:
    z = carrier.least() if anchor is None else anchor
    t = tuple(t)
    p = seqinj_to_sfin(t, carrier, z)
    if z in t:
        return t.index(z), p
    return len(t) + 1, p


def sfin_rank_surjection(t: Perm) -> int:
    return 0 if t.is_identity() else len(mov_of(t)) - 1


def mov_map(t: Perm) -> frozenset:
    return mov_of(t)


# --- diagonal argument -------------------------------------------------------


class PreconditionError(ValueError):
    """The inputs violate a hypothesis of the construction."""


def diagonal_escape(f: Mapping, g: Mapping, carrier: Carrier) -> Perm:
    """A permutation outside ran(f), differing from each t on its own fiber f^-1[{t}]."""
    fibers = defaultdict(set)
    for z in carrier:
        fibers[f[z]].add(z)
    u = {}
    for t, fib in fibers.items():
        gt = g[t]
        moved = mov_of(gt)
        if not moved or not moved <= fib:
            raise PreconditionError(f"g({t!r}) must move a non-empty subset of its fiber")
        if all(t(z) == gt(z) for z in fib):
            continue
        for z in fib:
            u[z] = gt(z)
    return Perm(carrier, u)


# --- union of moved sets -----------------------------------------------------


def union_mov(f: Perm, g: Perm) -> Perm:
    """A permutation h with mov(h) = mov(f) u mov(g)."""
    if f.carrier != g.carrier:
        raise ValueError("carriers differ")
    mf, mg = mov_of(f), mov_of(g)
    y = mf & mg
    u = {z for z in mg - y if orbit_of(g, z) - y == {z}}
    w = mg - y - u
    gu = {g(z) for z in u}
    gw = induce_on_subset(g, w) if w else None
    g_inv = g.inverse()
    h = {}
    for z in f.carrier:
        if z in mf and z not in gu:
            h[z] = f(z)
        elif z in gu:
            h[z] = g_inv(z)
        elif z in u:
            h[z] = f(g(z))
        elif z in w:
            h[z] = gw(z)
    return Perm(f.carrier, h)


def fold_union_mov(ts: Sequence[Perm], carrier: Carrier | None = None) -> Perm:
    if len(set(ts)) != len(ts):
        raise ValueError("sequence entries must be distinct")
    if not ts:
        if carrier is None:
            raise ValueError("empty sequence needs an explicit carrier")
        return Perm.identity(carrier)
    acc = Perm.identity(ts[0].carrier)
    for t in ts:
        acc = union_mov(acc, t)
    return acc


# --- small symmetric sets ----------------------------------------------------


def s2_bijection(x: Carrier) -> MapWitness:
    graph = {t: mov_of(t) for t in enumerate_kind("S_n", x, 2)}
    codomain = frozenset(enumerate_kind("subsets", x, 2)) | {frozenset()}
    return MapWitness(BIJECTION, "S_2(x)", "[x]^2 u {0}", graph, codomain_set=codomain)


def s2_inverse(pair: frozenset, x: Carrier) -> Perm:
    if not pair:
        return Perm.identity(x)
    return cycle_perm(x, x.sorted(pair))


def pairpair_image(m: frozenset, x: Carrier, anchors: Sequence) -> Perm:
    zs, vs = anchors[:4], anchors[4:]
    if not m:
        return Perm.identity(x)
    p, q = sorted((x.sorted(s) for s in m), key=lambda s: [x.index(z) for z in s])
    common = set(p) & set(q)
    if not common:
        a, b = p
        c, d = q
        return cycle_perm(x, [a, b]) * cycle_perm(x, [c, d])
    (a,) = common
    (b,) = set(p) - common
    (c,) = set(q) - common
    k = next(k for k in range(4) if not {a, b, c} & {zs[k], vs[k]})
    return cycle_perm(x, [a, zs[k], vs[k]]) * cycle_perm(x, [b, c])


def pairpairs_to_s5(x: Carrier, anchors: Sequence | None = None) -> MapWitness:
    """Injection from pairs of 2-sets (plus the empty set) into S_5(x)."""
    if len(x) < 8:
        raise PreconditionError("need at least 8 carrier elements")
    anchors = list(x.elements[:8]) if anchors is None else list(anchors)
    if len(anchors) != 8 or len(set(anchors)) != 8:
        raise PreconditionError("need 8 distinct anchors z0..z3, v0..v3")
    pairs = list(enumerate_kind("subsets", x, 2))
    graph = {frozenset(): pairpair_image(frozenset(), x, anchors)}
    for p, q in itertools.combinations(pairs, 2):
        m = frozenset((p, q))
        graph[m] = pairpair_image(m, x, anchors)
    return MapWitness(INJECTION, "[[x]^2]^2 u {0}", "S_5(x)", graph)


# --- tuples into cycles of length 2n+1 ---------------------------------------


class TupleCoder:
    """Injection x^n -> S_{2n+1}(x) \\ S_{2n}(x) with its decoder.

    ``f`` is an injective list of 2n(n+1) anchor elements; block i consists of
    z[i][0..n] and v[i][0..n-2].
    """

    def __init__(self, x: Carrier, n: int, f: Sequence | None = None):
        if n < 1:
            raise PreconditionError("n must be positive")
        need = 2 * n * (n + 1)
        if len(x) < need:
            raise PreconditionError(f"need |x| >= {need}")
        f = list(x.elements[:need]) if f is None else list(f)
        if len(f) != need or len(set(f)) != need:
            raise PreconditionError(f"f must list {need} distinct elements")
        self.x, self.n = x, n
        self.z = [[f[2 * n * i + j] for j in range(n + 1)] for i in range(n + 1)]
        self.v = [[f[2 * n * i + n + k + 1] for k in range(n - 1)] for i in range(n + 1)]
        self._blocks = [set(self.z[i]) | set(self.v[i]) for i in range(n + 1)]

    def block_index(self, t: Sequence) -> int:
        ran = set(t)
        return min(i for i in range(self.n + 1) if not ran & self._blocks[i])

    def cycle_entries(self, t: Sequence) -> list:
        if len(t) != self.n:
            raise ValueError(f"tuple must have length {self.n}")
        m = self.block_index(t)
        h = seq_collapse(t)
        phi = [self.v[m][e.value] if isinstance(e, Nat) else e for e in h]
        return phi + self.z[m]

    def encode(self, t: Sequence) -> Perm:
        return cycle_perm(self.x, self.cycle_entries(t))

    def decode(self, p: Perm) -> tuple:
        moved = mov_of(p)
        ms = [i for i in range(self.n + 1) if set(self.z[i]) <= moved]
        if len(ms) != 1:
            raise ValueError("permutation is not in the range of the coder")
        m = ms[0]
        phi = []
        w = self.z[m][self.n]
        for _ in range(self.n):
            w = p(w)
            phi.append(w)
        vpos = {z: k for k, z in enumerate(self.v[m])}
        h = [Nat(vpos[e]) if e in vpos else e for e in phi]
        return seq_expand(h)

    def witness(self) -> MapWitness:
        graph = {t: self.encode(t) for t in itertools.product(self.x.elements, repeat=self.n)}
        return MapWitness(INJECTION, f"x^{self.n}", f"S_{2 * self.n + 1} minus S_{2 * self.n}", graph)


def tuples_to_s2n1(x: Carrier, n: int, f: Sequence | None = None) -> MapWitness:
    return TupleCoder(x, n, f).witness()


def seq_to_sfin_assembly(x: Carrier, f: Sequence, max_len: int) -> MapWitness:
    """Injection from sequences of length <= max_len into S_fin(x)."""
    need = 2 * max_len * (max_len + 1)
    if need > min(len(f), len(x)):
        raise TruncationError(f"need 2N(N+1)={need} <= min(W, |x|)")
    graph = {(): Perm.identity(x)}
    for n in range(1, max_len + 1):
        coder = TupleCoder(x, n, f[: 2 * n * (n + 1)])
        for t in itertools.product(x.elements, repeat=n):
            graph[t] = coder.encode(t)
    return MapWitness(INJECTION, f"seq(x) up to length {max_len}", "S_fin(x)", graph)


# --- orderings ---------------------------------------------------------------


def sfin_to_seqinj_ordered(t: Perm, key: Callable | None = None) -> tuple:
    """List t's values on mov(t) in increasing order of the given ordering."""
    key = t.carrier.index if key is None else key
    return tuple(t(z) for z in sorted(mov_of(t), key=key))


def seqinj_to_sfin_ordered(s: Sequence, carrier: Carrier, key: Callable | None = None) -> Perm:
    key = carrier.index if key is None else key
    dom = sorted(s, key=key)
    return Perm(carrier, dict(zip(dom, s)))


def lex_subset_order(z: Iterable[int], v: Iterable[int], w: int = DEFAULT_W) -> int:
    """-1 if z precedes v, 0 if equal, 1 if v precedes z.

    z precedes v when, at the least n where they differ, n lies in v.
    """
    z, v = frozenset(z), frozenset(v)
    for s in (z, v):
        if any(not 0 <= k < w for k in s):
            raise TruncationError(f"set {set(s)} not inside [0, {w})")
    diff = z ^ v
    if not diff:
        return 0
    n = min(diff)
    return -1 if n in v else 1


def lex_key(s: Iterable[int]):
    """Sort key equivalent to :func:`lex_subset_order` on finite sets."""
    return functools.cmp_to_key(lex_subset_order)(frozenset(s))


def perm_lex_order(t: Perm, u: Perm, cmp: Callable = lex_subset_order) -> int:
    """Compare permutations at the least point (under cmp) where they disagree."""
    if t.carrier != u.carrier:
        raise ValueError("carriers differ")
    diff = [z for z in t.carrier if t(z) != u(z)]
    if not diff:
        return 0
    w = min(diff, key=functools.cmp_to_key(cmp))
    return cmp(t(w), u(w))


def fiber_rank_injection(f: Mapping, carrier: Carrier, cmp: Callable = lex_subset_order) -> MapWitness:
    """t -> (rank of t inside its f-fiber, f(t)); injective whenever f is finite-to-one."""
    fibers = defaultdict(list)
    for t, z in f.items():
        if z not in carrier:
            raise ValueError(f"f maps into {z!r}, outside the carrier")
        fibers[z].append(t)
    order = functools.cmp_to_key(lambda a, b: perm_lex_order(a, b, cmp))
    graph = {}
    for z, fib in fibers.items():
        for rank, t in enumerate(sorted(fib, key=order)):
            graph[t] = (rank, z)
    return MapWitness(INJECTION, "S(x)", "omega x x", graph, notes={"max_fiber": max(map(len, fibers.values()), default=0)})


def mov_map_witness(x: Carrier) -> MapWitness:
    graph = {t: mov_of(t) for t in enumerate_kind("S", x)}
    return MapWitness(FINITE_TO_ONE, "S_fin(x)", "fin(x)", graph)


def seqinj_to_sfin_witness(x: Carrier, anchor=None) -> MapWitness:
    graph = {t: seqinj_to_sfin(t, x, anchor) for t in enumerate_kind("seqinj", x)}
    return MapWitness(FINITE_TO_ONE, "seq11(x)", "S_fin(x)", graph, fiber_bound=len(x) + 1)


def seqinj_to_nat_sfin_witness(x: Carrier, anchor=None) -> MapWitness:
    graph = {t: seqinj_to_nat_sfin(t, x, anchor) for t in enumerate_kind("seqinj", x)}
    return MapWitness(INJECTION, "seq11(x)", "omega x S_fin(x)", graph)


def sfin_to_seqinj_witness(x: Carrier, key: Callable | None = None) -> MapWitness:
    graph = {t: sfin_to_seqinj_ordered(t, key) for t in enumerate_kind("S", x)}
    return MapWitness(INJECTION, "S_fin(x)", "seq11(x)", graph)


def is_finite_to_one(f: Mapping, bound: int | None = None) -> bool:
    counts = defaultdict(int)
    for v in f.values():
        counts[v] += 1
    return bound is None or max(counts.values(), default=0) <= bound
