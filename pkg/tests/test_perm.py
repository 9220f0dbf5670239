import itertools
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardbench.perm import (
    CapExceeded,
    Carrier,
    Nat,
    Perm,
    TruncationError,
    count_kind,
    cycle_perm,
    derangements,
    enumerate_kind,
    induce_on_subset,
    mov_of,
    nontrivial_orbits,
    orbit_of,
    orbits,
    transposition,
)

X3 = Carrier.of_size(3)
X4 = Carrier.of_size(4)


@st.composite
def perms(draw, max_size=6):
    n = draw(st.integers(0, max_size))
    img = draw(st.permutations(list(range(n))))
    return Perm(Carrier.of_size(n), list(img))


def test_cycle_perm_swap():
    p = cycle_perm(X3, [0, 1])
    assert (p(0), p(1), p(2)) == (1, 0, 2)


def test_cycle_perm_short_inputs_are_identity():
    assert cycle_perm(X3, []).is_identity()
    assert cycle_perm(X3, [2]).is_identity()


def test_cycle_perm_three_cycle_pointwise():
    p = cycle_perm(X4, [0, 1, 2])
    assert [p(z) for z in X4] == [1, 2, 0, 3]


@pytest.mark.parametrize("bad", [[0, 0], [0, 7]])
def test_cycle_perm_rejects(bad):
    with pytest.raises(ValueError):
        cycle_perm(X3, bad)


def test_perm_rejects_non_bijection():
    with pytest.raises(ValueError):
        Perm(X3, [0, 0, 1])


def test_mov_examples():
    assert mov_of(Perm.identity(X3)) == frozenset()
    assert mov_of(transposition(X3, 0, 1)) == {0, 1}
    assert mov_of(cycle_perm(X4, [0, 1, 2])) == {0, 1, 2}


def test_orbit_examples():
    x5 = Carrier.of_size(5)
    assert orbit_of(Perm.identity(X3), 0) == {0}
    assert orbit_of(transposition(X3, 0, 1), 0) == {0, 1}
    p = cycle_perm(x5, [0, 1, 2]) * transposition(x5, 3, 4)
    assert orbit_of(p, 3) == {3, 4}
    with pytest.raises(ValueError):
        orbit_of(p, 9)


def test_induce_examples():
    p = cycle_perm(X4, [0, 1, 2, 3])
    q = induce_on_subset(p, {0, 2})
    assert q(0) == 2 and q(2) == 0
    assert induce_on_subset(p, X4.elements) == p
    ident = induce_on_subset(Perm.identity(X4), {1, 3})
    assert ident.is_identity() and ident.carrier.elements == (1, 3)
    with pytest.raises(ValueError):
        induce_on_subset(p, {0, 9})


def test_enumerate_examples():
    assert len(list(enumerate_kind("S_n", X4, 2))) == 7
    assert len(list(enumerate_kind("S", X3))) == 6
    assert len(list(enumerate_kind("subsets", Carrier.of_size(5), 2))) == comb(5, 2) == 10


def test_enumerate_is_lexicographic_and_duplicate_free():
    ps = list(enumerate_kind("S", X4))
    assert ps == sorted(ps) and len(set(ps)) == 24


def test_enumerate_cap_reports_count():
    with pytest.raises(CapExceeded) as e:
        list(enumerate_kind("S", Carrier.of_size(8), cap=1000))
    assert e.value.count == factorial(8)


def test_seq_bound_below_w():
    with pytest.raises(TruncationError):
        list(enumerate_kind("seq", X3, 4, w=4))
    with pytest.raises(TruncationError):
        Nat(5, 4)


@pytest.mark.parametrize("kind,bound", [("fin", None), ("seq", 3), ("seqinj", None), ("seqinj", 2), ("S_n", 3)])
def test_counts_match_enumeration(kind, bound):
    for n in range(5):
        x = Carrier.of_size(n)
        assert len(list(enumerate_kind(kind, x, bound))) == count_kind(kind, n, bound)


def test_derangement_values():
    assert [derangements(n) for n in range(8)] == [1, 0, 1, 2, 9, 44, 265, 1854]


@pytest.mark.parametrize("n", range(8))
def test_sn_count_against_filter(n):
    x = Carrier.of_size(n)
    for bound in range(n + 1):
        brute = sum(1 for img in itertools.permutations(range(n)) if sum(i != j for i, j in enumerate(img)) <= bound)
        assert count_kind("S_n", n, bound) == brute == sum(comb(n, k) * derangements(k) for k in range(bound + 1))
        if n <= 5:
            assert len(list(enumerate_kind("S_n", x, bound))) == brute


@given(perms())
def test_inverse_composes_to_identity(p):
    assert (p * p.inverse()).is_identity() and (p.inverse() * p).is_identity()


@given(perms())
def test_orbits_partition(p):
    obs = orbits(p)
    assert frozenset().union(*obs) == frozenset(p.carrier.elements) if obs else len(p.carrier) == 0
    assert sum(map(len, obs)) == len(p.carrier)
    nt = nontrivial_orbits(p)
    assert sum(map(len, nt)) == len(mov_of(p))
    assert (frozenset().union(*nt) if nt else frozenset()) == mov_of(p)


@given(perms(max_size=5), st.data())
def test_induced_is_bijection_with_orbit_law(p, data):
    y = data.draw(st.sets(st.sampled_from(p.carrier.elements))) if len(p.carrier) else set()
    q = induce_on_subset(p, y)
    assert sorted(q(z) for z in y) == sorted(y)
    for z in y:
        assert orbit_of(q, z) == orbit_of(p, z) & y
        # first return: the earliest iterate landing in y
        w = p(z)
        while w not in y:
            w = p(w)
        assert q(z) == w


def test_induced_bijection_exhaustive_size5():
    x = Carrier.of_size(5)
    subsets = list(enumerate_kind("fin", x))
    for p in enumerate_kind("S", x):
        for y in subsets:
            q = induce_on_subset(p, y)
            assert {q(z) for z in y} == set(y)


def test_orbit_partition_exhaustive_size6():
    x = Carrier.of_size(6)
    for p in enumerate_kind("S", x):
        nt = nontrivial_orbits(p)
        seen = set()
        for o in nt:
            assert not seen & o
            seen |= o
        assert seen == mov_of(p)


@settings(max_examples=50)
@given(perms(), perms())
def test_composition_applies_right_first(p, q):
    if p.carrier != q.carrier:
        return
    for z in p.carrier:
        assert (p * q)(z) == p(q(z))
