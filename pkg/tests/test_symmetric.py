import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cardbench.symmetric as S
from cardbench.perm import CapExceeded, Carrier, Perm, enumerate_kind, transposition

A4 = Carrier.of_size(4)


def atom(i):
    return S.Atom(i)


def hset(*xs):
    return S.HSet(xs)


def hfa(carrier_size, max_depth=3):
    atoms = st.integers(0, carrier_size - 1).map(S.Atom)
    return st.recursive(atoms | st.just(S.HSet()), lambda kids: st.lists(kids, max_size=3).map(S.HSet),
                        max_leaves=8).filter(lambda x: S.depth(x) <= max_depth)


def brute_support(b, x, carrier):
    """Check every permutation fixing b pointwise, not just generators."""
    for p in enumerate_kind("S", carrier):
        if all(p(z) == z for z in b) and S.act(p, x) != x:
            return False
    return True


# --- values -------------------------------------------------------------------


def test_canonical_form():
    assert hset(atom(1), atom(0), atom(1)) == hset(atom(0), atom(1))
    assert len(hset(atom(1), atom(0), atom(1))) == 2
    assert [c for c in hset(hset(), atom(3))] == [atom(3), hset()]


def test_json_round_trip_and_format():
    x = hset(atom(0), atom("a"), hset(atom(2)))
    assert S.dumps(x) == '["#0","@a",["#2"]]'
    assert S.loads(S.dumps(x)) == x
    with pytest.raises(ValueError):
        S.loads('["x"]')


@given(hfa(5))
def test_json_round_trip_random(x):
    assert S.loads(S.dumps(x)) == x


# --- action ---------------------------------------------------------------------


def test_act_examples():
    x = Carrier(["a", "b"])
    swap = transposition(x, "a", "b")
    assert S.act(swap, hset(S.Atom("a"))) == hset(S.Atom("b"))
    pure = hset(hset(), hset(hset()))
    assert S.act(swap, pure) == pure
    with pytest.raises(ValueError):
        S.act(swap, hset(S.Atom("c")))


@st.composite
def perm5(draw):
    return Perm(Carrier.of_size(5), list(draw(st.permutations(range(5)))))


@settings(max_examples=200)
@given(perm5(), perm5(), hfa(5, 4))
def test_act_is_group_action(p, q, x):
    assert S.act(Perm.identity(p.carrier), x) == x
    assert S.act(p * q, x) == S.act(p, S.act(q, x))


# --- supports -----------------------------------------------------------------------


def test_is_support_examples():
    g = S.FullSymmetric(A4)
    x = hset(atom(0))
    assert S.is_support(A4.elements, x, g)
    v = S.is_support((), x, g)
    assert not v and S.act(v.counterexample, x) != x
    assert v.counterexample == transposition(A4, 0, 1)
    assert S.is_support({0}, x, g)
    with pytest.raises(ValueError):
        S.is_support({9}, x, g)


def test_min_support_examples():
    g = S.FullSymmetric(A4)
    assert S.min_support(hset(hset()), g) == frozenset()
    assert S.min_support(hset(atom(2)), g) == {2}
    ab = Carrier.of_size(2)
    assert S.min_support(hset(hset(atom(0), atom(1))), S.FullSymmetric(ab)) == frozenset()


def test_min_support_caps():
    with pytest.raises(CapExceeded):
        S.min_support(hset(), S.FullSymmetric(Carrier.of_size(13)))
    deep = atom(0)
    for _ in range(7):
        deep = hset(deep)
    with pytest.raises(CapExceeded):
        S.min_support(deep, S.FullSymmetric(A4))


@settings(max_examples=150)
@given(hfa(4), st.sets(st.integers(0, 3)))
def test_generator_check_agrees_with_brute_force(x, b):
    assert bool(S.is_support(b, x, S.FullSymmetric(A4))) == brute_support(b, x, A4)


@settings(max_examples=100)
@given(hfa(6))
def test_min_support_is_minimal(x):
    x6 = Carrier.of_size(6)
    g = S.FullSymmetric(x6)
    b = S.min_support(x, g)
    assert S.is_support(b, x, g)
    for z in b:
        assert not S.is_support(b - {z}, x, g)
    # no smaller support exists at all
    for k in range(len(b)):
        assert not any(S.is_support(c, x, g) for c in itertools.combinations(x6.elements, k))


def test_generated_group_support():
    x = Carrier.of_size(4)
    rot = Perm(x, [1, 2, 3, 0])
    g = S.Generated(x, (rot,))
    assert len(g.elements()) == 4
    pair = hset(atom(0), atom(2))
    # a quarter turn swaps the two diagonals, so only the pair of diagonals is invariant
    assert S.is_support((), hset(pair, hset(atom(1), atom(3))), g)
    assert not S.is_support((), pair, g)
    with pytest.raises(CapExceeded):
        S.Generated(Carrier.of_size(6), (Perm(Carrier.of_size(6), [1, 0, 2, 3, 4, 5]),
                                         Perm(Carrier.of_size(6), [1, 2, 3, 4, 5, 0]))).elements(cap=100)


def test_rule_based_group():
    x = Carrier.of_size(4)

    def gens(b):
        # only the transposition (2 3) is allowed
        if not {2, 3} & b:
            yield transposition(x, 2, 3)

    g = S.RuleBased(x, gens, "swap23")
    assert S.is_support((), hset(atom(0)), g)
    assert not S.is_support((), hset(atom(2)), g)


# --- transitivity -------------------------------------------------------------------------


def test_transitivity_examples():
    x = Carrier(list("abcdef"))
    assert S.transitivity_witness(x, {"e"}, {"a"}, {"a"}).is_identity()
    t = S.transitivity_witness(x, {"e", "f"}, {"a", "b"}, {"c", "d"})
    assert {t("a"), t("b")} == {"c", "d"} and t("e") == "e" and t("f") == "f"
    with pytest.raises(ValueError):
        S.transitivity_witness(x, set(), {"a"}, {"b", "c"})
    with pytest.raises(ValueError):
        S.transitivity_witness(x, {"a"}, {"a"}, {"b"})


@settings(max_examples=200)
@given(st.data())
def test_transitivity_random_k3(data):
    x = Carrier.of_size(8)
    b = data.draw(st.sets(st.integers(0, 7), max_size=2))
    rest = [z for z in range(8) if z not in b]
    p = data.draw(st.sets(st.sampled_from(rest), min_size=3, max_size=3))
    q = data.draw(st.sets(st.sampled_from(rest), min_size=3, max_size=3))
    t = S.transitivity_witness(x, b, p, q)
    assert all(t(z) == z for z in b) and {t(z) for z in p} == q


# --- order automorphisms --------------------------------------------------------------------


def test_mostowski_examples():
    f = S.mostowski_witness({0, 1}, Fraction(1, 2))
    assert f(0) == 0 and f(1) == 1 and f(Fraction(1, 2)) == Fraction(2, 3)
    t = S.mostowski_witness(set(), 0)
    assert all(t(v) == v + 1 for v in (-5, 0, Fraction(7, 3)))
    h = S.mostowski_witness({0, 1}, Fraction(1, 2), forbid=Fraction(3, 4))
    assert h(Fraction(3, 4)) == Fraction(3, 4) and h(Fraction(1, 2)) != Fraction(1, 2)
    with pytest.raises(ValueError):
        S.mostowski_witness({0, 1}, 1)


@given(st.sets(st.fractions(-10, 10), max_size=5), st.fractions(-10, 10))
def test_mostowski_property(b, a):
    if a in b:
        return
    f = S.mostowski_witness(b, a)
    assert f.is_increasing() and all(s > 0 for s in f.slopes())
    assert all(f(v) == v for v in b) and f(a) != a
    probes = sorted(b | {a, a - 100, a + 100})
    assert all(f(u) < f(v) for u, v in zip(probes, probes[1:]))
    assert all(f.inverse()(f(v)) == v for v in probes)


def test_pl_map_validation():
    with pytest.raises(ValueError):
        S.PLMap(((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        S.PLMap(((0, 0),), left_slope=0)


# --- three-to-one projection -----------------------------------------------------------------


def test_n23_examples():
    two = S.n23_projection(Carrier.of_size(6), [[0, 1, 2], [3, 4, 5]])
    assert S.fiber_sizes(two.witness) == [3, 3] and two.witness.verify() and two.commuting
    assert two.permutations_checked == 36
    one = S.n23_projection(Carrier.of_size(3), [[0, 1, 2]])
    assert set(one.witness.graph.values()) == {0} and one.witness.fiber_bound == 3


def test_n23_errors():
    with pytest.raises(ValueError):
        S.n23_projection(Carrier.of_size(4), [[0, 1, 2, 3]])
    with pytest.raises(ValueError):
        S.n23_projection(Carrier.of_size(6), [[0, 1, 2], [2, 3, 4]])
    with pytest.raises(CapExceeded):
        S.n23_projection(Carrier.of_size(12), [[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]])
