import itertools
import random
from collections import Counter
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cardbench.constructions as C
from cardbench.perm import Carrier, Nat, Perm, TruncationError, cycle_perm, derangements, enumerate_kind, mov_of, transposition
from cardbench.suites import chain_oracle, compliant_diagonal_inputs, run_constructions, subset_carrier


def is_bijection(h, xs, ys):
    return set(h) == set(xs) and sorted(map(str, h.values())) == sorted(map(str, ys)) and len(set(h.values())) == len(ys)


# --- Cantor-Bernstein ---------------------------------------------------------


def test_cb_identity():
    ident = {i: i for i in range(3)}
    assert C.cantor_bernstein(ident, ident) == ident


def test_cb_three_cycle():
    f = {0: 1, 1: 2, 2: 0}
    g = {i: i for i in range(3)}
    h = C.cantor_bernstein(f, g)
    assert is_bijection(h, range(3), range(3))


def test_cb_two_element_matches_chain_oracle():
    f = {0: "a", 1: "b"}
    g = {"a": 1, "b": 0}
    h = C.cantor_bernstein(f, g)
    candidates = [{0: "a", 1: "b"}, {0: "b", 1: "a"}]
    assert h in candidates and h == chain_oracle(f, g)


def test_cb_uses_g_inverse_on_y_chains():
    # x is larger than ran(g) only in the infinite case; a partial f exposes the y-origin branch
    f = {0: "b"}
    g = {"a": 0}
    assert C.cantor_bernstein(f, g) == {0: "a"} == chain_oracle(f, g)


def test_cb_rejects_non_injective():
    with pytest.raises(ValueError):
        C.cantor_bernstein({0: "a", 1: "a"}, {"a": 0})


# --- absorbing omega ------------------------------------------------------------


def test_absorb_examples():
    x = Carrier(["e0", "e1", "e2", "e3", "z"])
    a = C.absorb_omega(x, ["e0", "e1", "e2", "e3"])
    assert a.nat_bound == 1
    assert a("e0") == "e0"
    assert a(Nat(0, 1)) == "e1"
    assert a("z") == "z"
    assert a.frontier == {"e2", "e3"}


def test_absorb_truncation_error():
    x = Carrier.of_size(4)
    with pytest.raises(TruncationError):
        C.absorb_omega(x, [0, 1, 2, 3], nat_bound=2)


# --- orbits ---------------------------------------------------------------------


def test_powerset_of_orbits():
    x = Carrier.of_size(4)
    assert list(C.powerset_of_orbits_injection(Perm.identity(x)).graph.values()) == [Perm.identity(x)]
    f = transposition(x, 0, 1) * transposition(x, 2, 3)
    w = C.powerset_of_orbits_injection(f)
    assert len(w.graph) == 4 and w.verify()
    assert w.graph[frozenset([frozenset({0, 1}), frozenset({2, 3})])] == f


# --- sequences --------------------------------------------------------------------


def test_seq_collapse_examples():
    assert C.seq_collapse(("a", "a", "b")) == ("a", Nat(0), "b")
    assert C.seq_collapse(("a", "b", "c")) == ("a", "b", "c")
    assert C.seq_collapse(()) == ()
    with pytest.raises(TruncationError):
        C.seq_collapse((0,) * 5, w=4)


@given(st.lists(st.sampled_from("abc"), max_size=20))
def test_seq_collapse_round_trip(t):
    s = C.seq_collapse(tuple(t))
    assert len(set(s)) == len(s)
    assert C.seq_expand(s) == tuple(t)


def test_seqinj_split_structure():
    code, xs = C.seqinj_split((Nat(5), "a"))
    assert xs == ("a",)
    assert code == C.pair_triple((5,), (1,), (0,))
    assert C.unpair_triple(code) == ((5,), (1,), (0,))


def test_seqinj_split_all_atoms():
    code, xs = C.seqinj_split(("a", "b", "c"))
    assert xs == ("a", "b", "c")
    assert C.unpair_triple(code) == ((), (0, 1, 2), ())


def test_seqinj_split_injective_small():
    universe = ["a", "b"] + [Nat(i, 3) for i in range(3)]
    seen = {}
    for k in range(4):
        for t in itertools.permutations(universe, k):
            key = C.seqinj_split(t)
            assert key not in seen
            seen[key] = t
            assert C.seqinj_join(key[0], key[1], 3) == t


def test_pairing_overflow():
    with pytest.raises(OverflowError):
        C.pair_triple((10**40,), (), (), limit=2**64)


def test_pairing_fits_full_truncation():
    t = tuple(range(100)) + tuple(Nat(63 - i) for i in range(64))
    code, xs = C.seqinj_split(t)
    assert code < C.PAIRING_LIMIT and C.seqinj_join(code, xs) == t


def test_triple_codes_injective_on_small_domain():
    seqs = [s for k in range(4) for s in itertools.product(range(3), repeat=k)]
    codes = {}
    for triple in itertools.product(seqs, repeat=3):
        code = C.pair_triple(*triple)
        assert code not in codes
        codes[code] = triple
    assert len(codes) == len(seqs) ** 3


@given(st.tuples(*(st.lists(st.integers(0, 10**6), max_size=30) for _ in range(3))))
def test_triple_round_trip(s):
    s = tuple(map(tuple, s))
    assert C.unpair_triple(C.pair_triple(*s)) == s


@given(st.lists(st.integers(0, 10**9), max_size=20))
def test_seq_code_round_trip(s):
    assert C.seq_decode(C.seq_code(s)) == tuple(s)


def test_constant_seq_examples():
    assert C.constant_seq_injection(0, "a") == ("a",)
    assert C.constant_seq_injection(2, "b") == ("b", "b", "b")
    with pytest.raises(TruncationError):
        C.constant_seq_injection(4, "a", w=4)
    images = [C.constant_seq_injection(n, z) for n in range(4) for z in "abc"]
    assert len(set(images)) == 12


# --- injective sequences to finitary permutations ---------------------------------


ZAB = Carrier(["z", "a", "b"])


def test_seqinj_to_sfin_examples():
    assert C.seqinj_to_sfin(("a", "b"), ZAB) == cycle_perm(ZAB, ["a", "b", "z"])
    assert C.seqinj_to_sfin(("z",), ZAB).is_identity()
    assert C.seqinj_to_sfin((), ZAB).is_identity()
    w = C.seqinj_to_sfin_witness(ZAB)
    assert sorted(w.fibers()[Perm.identity(ZAB)]) == [(), ("z",)]


@pytest.mark.parametrize("n", range(1, 6))
def test_seqinj_to_sfin_fiber_bound(n):
    w = C.seqinj_to_sfin_witness(Carrier.of_size(n))
    assert w.verify() and w.max_fiber() <= n + 1


def test_seqinj_to_nat_sfin_examples():
    assert C.seqinj_to_nat_sfin(("z", "a"), ZAB) == (0, cycle_perm(ZAB, ["z", "a"]))
    assert C.seqinj_to_nat_sfin(("a",), ZAB) == (2, cycle_perm(ZAB, ["a", "z"]))


@pytest.mark.parametrize("n", range(1, 5))
def test_seqinj_to_nat_sfin_injective(n):
    w = C.seqinj_to_nat_sfin_witness(Carrier.of_size(n))
    vals = list(w.graph.values())
    assert len(vals) == len(set(vals))


def test_sfin_rank_examples():
    x = Carrier.of_size(4)
    assert C.sfin_rank_surjection(Perm.identity(x)) == 0
    assert C.sfin_rank_surjection(transposition(x, 0, 1)) == 1
    assert C.sfin_rank_surjection(cycle_perm(x, [0, 1, 2])) == 2


@pytest.mark.parametrize("n", range(6))
def test_mov_map_fibers_are_derangements(n):
    w = C.mov_map_witness(Carrier.of_size(n))
    sizes = Counter(w.graph.values())
    for y in enumerate_kind("fin", Carrier.of_size(n)):
        assert sizes.get(y, 0) == derangements(len(y))
    if n >= 3:
        assert sizes[frozenset({0, 1})] == 1 and sizes[frozenset({0, 1, 2})] == 2


# --- diagonal --------------------------------------------------------------------


def test_diagonal_two_points():
    x = Carrier.of_size(2)
    ident = Perm.identity(x)
    swap = transposition(x, 0, 1)
    u = C.diagonal_escape({0: ident, 1: ident}, {ident: swap}, x)
    assert u == swap


def test_diagonal_two_fibers():
    x = Carrier.of_size(4)
    t1, t2 = Perm.identity(x), transposition(x, 2, 3)
    f = {0: t1, 1: t1, 2: t2, 3: t2}
    g = {t1: transposition(x, 0, 1), t2: transposition(x, 2, 3)}
    u = C.diagonal_escape(f, g, x)
    assert u not in (t1, t2)
    assert any(u(z) != t1(z) for z in (0, 1)) and any(u(z) != t2(z) for z in (2, 3))


def test_diagonal_precondition():
    x = Carrier.of_size(3)
    ident = Perm.identity(x)
    with pytest.raises(C.PreconditionError):
        C.diagonal_escape({z: ident for z in x}, {ident: ident}, x)
    with pytest.raises(C.PreconditionError):
        C.diagonal_escape({0: ident, 1: ident, 2: transposition(x, 0, 1)},
                          {ident: transposition(x, 0, 2), transposition(x, 0, 1): ident}, x)


def test_diagonal_exhaustive_three():
    x = Carrier.of_size(3)
    count = 0
    for f, g in compliant_diagonal_inputs(x):
        u = C.diagonal_escape(f, g, x)
        assert u not in set(f.values())
        count += 1
    # one fiber of size 3: 6 choices of t times 5 non-identity g(t)
    assert count == 30


# --- union of moved sets ------------------------------------------------------------


def test_union_mov_example():
    x = Carrier.of_size(4)
    h = C.union_mov(transposition(x, 0, 1), transposition(x, 1, 2))
    assert [h(z) for z in x] == [1, 2, 0, 3]
    f = cycle_perm(x, [0, 2, 3])
    assert C.union_mov(f, Perm.identity(x)) == f


def test_union_mov_exhaustive_four():
    x = Carrier.of_size(4)
    ps = list(enumerate_kind("S", x))
    for f, g in itertools.product(ps, ps):
        assert mov_of(C.union_mov(f, g)) == mov_of(f) | mov_of(g)


@st.composite
def perm_pair(draw, size=8):
    x = Carrier.of_size(size)
    a = draw(st.permutations(list(range(size))))
    b = draw(st.permutations(list(range(size))))
    return Perm(x, list(a)), Perm(x, list(b))


@given(perm_pair())
def test_union_mov_random_eight(pair):
    f, g = pair
    assert mov_of(C.union_mov(f, g)) == mov_of(f) | mov_of(g)


def test_fold_union_mov_examples():
    x = Carrier.of_size(5)
    assert C.fold_union_mov([], x).is_identity()
    f = cycle_perm(x, [1, 3])
    assert C.fold_union_mov([f]) == f
    rng = random.Random(7)
    ts = []
    while len(ts) < 3:
        img = list(range(5))
        rng.shuffle(img)
        p = Perm(x, img)
        if p not in ts:
            ts.append(p)
    assert mov_of(C.fold_union_mov(ts)) == mov_of(ts[0]) | mov_of(ts[1]) | mov_of(ts[2])
    with pytest.raises(ValueError):
        C.fold_union_mov([f, f])


# --- small symmetric sets ------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 8))
def test_s2_count(n):
    w = C.s2_bijection(Carrier.of_size(n))
    assert len(w.graph) == comb(n, 2) + 1 and w.verify()


def test_s2_frozen_values():
    assert len(C.s2_bijection(Carrier.of_size(4)).graph) == 7
    assert len(C.s2_bijection(Carrier.of_size(6)).graph) == 16


def test_pairpairs_examples():
    x = Carrier.of_size(10)
    m = frozenset({frozenset({8, 9}), frozenset({0, 5})})
    assert C.pairpair_image(m, x, list(range(8))) == transposition(x, 0, 5) * transposition(x, 8, 9)
    assert C.pairpair_image(frozenset(), x, list(range(8))).is_identity()
    with pytest.raises(C.PreconditionError):
        C.pairpairs_to_s5(Carrier.of_size(7))


def test_pairpairs_shared_point_picks_free_anchor():
    x = Carrier.of_size(8)
    m = frozenset({frozenset({0, 1}), frozenset({0, 4})})
    p = C.pairpair_image(m, x, list(range(8)))
    # k=0 uses z0=0, so k=1 is the least anchor pair avoiding {0,1,4}: (z1, v1) = (1, 5) hits 1, k=2 gives (2, 6)
    assert p == cycle_perm(x, [0, 2, 6]) * cycle_perm(x, [1, 4])


def test_pairpairs_exhaustive_eight():
    w = C.pairpairs_to_s5(Carrier.of_size(8))
    assert len(w.graph) == 379 == comb(comb(8, 2), 2) + 1
    assert w.verify() and all(len(mov_of(p)) <= 5 for p in w.graph.values())


# --- tuples into odd cycles ----------------------------------------------------------------


def test_tuple_coder_examples():
    x = Carrier.of_size(5)
    coder = C.TupleCoder(x, 1)
    assert coder.encode((4,)) == cycle_perm(x, [4, 0, 1])
    assert coder.encode((0,)) == cycle_perm(x, [0, 2, 3])


@pytest.mark.parametrize("n,size,count", [(1, 5, 5), (2, 12, 144)])
def test_tuple_coder_exhaustive(n, size, count):
    x = Carrier.of_size(size)
    coder = C.TupleCoder(x, n)
    w = coder.witness()
    assert len(w.graph) == count and w.verify()
    for t, p in w.graph.items():
        assert len(mov_of(p)) == 2 * n + 1
        assert coder.decode(p) == t


def test_tuple_coder_preconditions():
    with pytest.raises(C.PreconditionError):
        C.TupleCoder(Carrier.of_size(11), 2)
    with pytest.raises(C.PreconditionError):
        C.TupleCoder(Carrier.of_size(5), 0)


def test_assembly():
    x = Carrier.of_size(12)
    w = C.seq_to_sfin_assembly(x, list(x.elements), 2)
    assert w.graph[()].is_identity()
    assert len(w.graph) == 1 + 12 + 144 and w.verify()
    for t, p in w.graph.items():
        assert len(mov_of(p)) == (2 * len(t) + 1 if t else 0)
    with pytest.raises(TruncationError):
        C.seq_to_sfin_assembly(x, list(x.elements), 3)


# --- orders ---------------------------------------------------------------------------------


def test_ordered_examples():
    x = Carrier.of_size(4)
    assert C.sfin_to_seqinj_ordered(transposition(x, 0, 1)) == (1, 0)
    assert C.sfin_to_seqinj_ordered(Perm.identity(x)) == ()
    w = C.sfin_to_seqinj_witness(x)
    assert w.verify() and all(len(s) != 1 for s in w.graph.values())


def lex_definition(z, v):
    """z precedes v iff some n is in v, not in z, and z, v agree below n."""
    top = max(z | v | {0}) + 1
    return any(n not in z and n in v and {k for k in z if k < n} == {k for k in v if k < n} for n in range(top))


def test_lex_examples():
    assert C.lex_subset_order({0}, {0, 1}) == -1
    assert C.lex_subset_order({2, 3}, {2, 3}) == 0
    # the least difference is 0, which lies in the second set
    assert C.lex_subset_order({1}, {0}) == -1
    assert lex_definition({1}, {0})


def test_lex_matches_definition_on_all_subsets_of_five():
    sets = [frozenset(c) for k in range(6) for c in itertools.combinations(range(5), k)]
    for z, v in itertools.product(sets, sets):
        verdict = C.lex_subset_order(z, v)
        assert (verdict == -1) == lex_definition(z, v)
        assert (verdict == 1) == lex_definition(v, z)
        assert (verdict == 0) == (z == v)


def test_lex_rejects_out_of_range():
    with pytest.raises(TruncationError):
        C.lex_subset_order({70}, set())


def test_perm_lex_examples():
    x = subset_carrier(4)
    ident = Perm.identity(x)
    assert C.perm_lex_order(ident, ident) == 0
    r_least = sorted(x.elements, key=C.lex_key)[:2]
    swap = transposition(x, *r_least)
    assert C.perm_lex_order(ident, swap) == C.lex_subset_order(r_least[0], r_least[1])


def test_perm_lex_total_order_exhaustive():
    x = subset_carrier(4)
    ps = list(enumerate_kind("S", x))
    assert len(ps) == 24
    pairs = 0
    for t, u in itertools.combinations(ps, 2):
        a, b = C.perm_lex_order(t, u), C.perm_lex_order(u, t)
        assert a in (-1, 1) and a == -b
        pairs += 1
    assert pairs == 276
    less = {(t, u) for t in ps for u in ps if C.perm_lex_order(t, u) < 0}
    for (t, u), (u2, w) in itertools.product(less, less):
        if u == u2:
            assert (t, w) in less


def test_fiber_rank_examples():
    x = subset_carrier(2)
    ps = list(enumerate_kind("S", x))
    const = {t: x.elements[0] for t in ps}
    w = C.fiber_rank_injection(const, x)
    assert sorted(r for r, _ in w.graph.values()) == [0, 1]
    inj = dict(zip(ps, x.elements))
    assert all(r == 0 for r, _ in C.fiber_rank_injection(inj, x).graph.values())
    with pytest.raises(ValueError):
        C.fiber_rank_injection({ps[0]: frozenset({9})}, x)


@settings(max_examples=30)
@given(st.randoms(use_true_random=False))
def test_fiber_rank_random_size3(rng):
    x = subset_carrier(3)
    ps = list(enumerate_kind("S", x))
    f = {t: rng.choice(x.elements) for t in ps}
    w = C.fiber_rank_injection(f, x)
    assert w.verify()
    fib = Counter(f.values())
    assert all(r < fib[z] for r, z in w.graph.values())


# --- witnesses ----------------------------------------------------------------------------------


def test_map_witness_detects_bad_graphs():
    assert not C.MapWitness(C.INJECTION, "a", "b", {0: 1, 1: 1}).verify()
    assert not C.MapWitness(C.BIJECTION, "a", "b", {0: 1}, codomain_set=frozenset({1, 2})).verify()
    assert not C.MapWitness(C.FINITE_TO_ONE, "a", "b", {0: 1, 1: 1}, fiber_bound=1).verify()
    assert C.MapWitness(C.SURJECTION, "a", "b", {0: 1, 1: 2}, codomain_set=frozenset({1, 2})).verify()
    assert C.is_finite_to_one({0: 1, 1: 1}, 2) and not C.is_finite_to_one({0: 1, 1: 1}, 1)


@pytest.mark.parametrize("size", [0, 3, 4, 8])
def test_suite_green(size):
    assert run_constructions(size, seed=5).passed


def test_suite_deterministic():
    a = run_constructions(6, seed=11).to_json()
    assert a == run_constructions(6, seed=11).to_json()
