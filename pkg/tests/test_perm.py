import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from orbilim.perm import (GroupError, PermGroup, YoungGroup, act_on_function, brute_force_configuration_count,
                          canonical_function, compose, custom_family, family_diagnostics, from_cycles,
                          function_key, function_orbit_reps, identity, invert, make_family,
                          placed_support_orbits, pointed_symmetric_family, product_family, restriction_group,
                          stabilizer_data, symmetric_family, symmetric_group)

HEIS_DIMS = {0: 1, 1: 1, 2: 2, 3: 3, 4: 5}


def pointed(n):
    return pointed_symmetric_family().group(n)


def dihedral(n):
    return PermGroup(n, [from_cycles(n, [list(range(1, n + 1))]),
                         tuple(((1 - i) % n) + 1 for i in range(1, n + 1))], name=f"D{n}")


def generic_symmetric(n):
    """S_n through plain generators, bypassing the closed forms."""
    return PermGroup(n, [from_cycles(n, [[1, 2]]), from_cycles(n, [list(range(1, n + 1))])])


SMALL_GROUPS = [generic_symmetric(4), symmetric_group(5), dihedral(6), pointed(5),
                PermGroup(6, [from_cycles(6, [[1, 2, 3]]), from_cycles(6, [[4, 5]])]),
                product_family().group(2), PermGroup(5, [from_cycles(5, [[1, 2, 3, 4, 5]])])]


def brute_stabilizers(G, K):
    elems = G.elements()
    setwise = [g for g in elems if {g[k - 1] for k in K} == set(K)]
    pointwise = [g for g in elems if all(g[k - 1] == k for k in K)]
    return len(elems), len(setwise), len(pointwise)


# ---- spec examples

def test_stabilizer_data_examples():
    assert tuple(stabilizer_data(symmetric_group(4), {1, 2}).__dict__.values()) == (24, 4, 2, 6)
    assert tuple(stabilizer_data(pointed(4), {1}).__dict__.values()) == (6, 6, 6, 1)
    assert tuple(stabilizer_data(symmetric_group(4), set()).__dict__.values()) == (24, 24, 24, 1)
    with pytest.raises(GroupError):
        stabilizer_data(symmetric_group(4), {5})


def test_restriction_examples():
    r = restriction_group(symmetric_group(4), {1, 3})
    assert r.order == 2 and r.points == (1, 3)
    assert restriction_group(pointed(4), {1}).order == 1
    assert restriction_group(symmetric_group(5), {2, 3, 4}).order == 6
    assert restriction_group(generic_symmetric(5), {2, 3, 4}).order == 6
    with pytest.raises(GroupError):
        restriction_group(symmetric_group(3), set())


def test_function_orbit_examples():
    for N in range(2, 6):
        assert function_orbit_reps(symmetric_group(N), HEIS_DIMS, 2)[0] == 3
    assert function_orbit_reps(symmetric_group(1), HEIS_DIMS, 2)[0] == 2
    for G in SMALL_GROUPS:
        assert function_orbit_reps(G, HEIS_DIMS, 0) == (1, [()])


def test_family_diagnostics_examples():
    d = family_diagnostics(symmetric_family(), {1}, 2, range(2, 9), HEIS_DIMS)
    assert all(d["nested"].values())
    assert [d["orbit_lengths"][N] for N in range(2, 9)] == list(range(2, 9))
    assert d["finite_orbit_flag"] is False
    d = family_diagnostics(pointed_symmetric_family(), {1}, 2, range(2, 9))
    assert set(d["orbit_lengths"].values()) == {1} and d["finite_orbit_flag"] is True
    d = family_diagnostics(symmetric_family(), {1}, 2, range(1, 7), HEIS_DIMS)
    assert [d["b_n"][N] for N in range(1, 7)] == [2, 3, 3, 3, 3, 3]
    assert d["saturation"] == 2


def test_configuration_examples():
    assert len(placed_support_orbits(symmetric_group(4), {1}, {1}, {1})) == 5
    assert len(placed_support_orbits(generic_symmetric(4), {1}, {1}, {1})) == 5
    for G in SMALL_GROUPS:
        assert len(placed_support_orbits(G, set(), set(), set())) == 1
    assert len(placed_support_orbits(symmetric_group(3), {1, 2}, {1}, set())) == 2


def test_configuration_derived_sets():
    conf = placed_support_orbits(symmetric_group(3), {1}, {2}, {1, 2})[0]
    assert conf.triple == frozenset() and conf.one_point == frozenset()


# ---- oracles

@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda g: g.name)
def test_orders_against_enumeration(G):
    assert G.order == len(set(G.elements()))
    for r in range(G.degree + 1):
        for K in itertools.combinations(range(1, G.degree + 1), r):
            order, setwise, pointwise = brute_stabilizers(G, K)
            data = stabilizer_data(G, K)
            assert (data.order, data.setwise, data.pointwise) == (order, setwise, pointwise)
            assert data.orbit_length * data.setwise == data.order
            if K:
                assert restriction_group(G, K).order * pointwise == setwise


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda g: g.name)
def test_membership(G):
    elems = set(G.elements())
    for p in itertools.permutations(range(1, G.degree + 1)):
        assert G.contains(p) == (p in elems)


def test_young_matches_generic():
    Y = YoungGroup(6, [[1, 3, 5], [2, 4, 6]])
    P = PermGroup(6, Y.generators)
    for r in range(4):
        for K in itertools.combinations(range(1, 7), r):
            assert Y.pointwise_stabilizer_order(K) == P.pointwise_stabilizer_order(K)
            assert Y.setwise_stabilizer_order(K) == P.setwise_stabilizer_order(K)
            if K:
                assert Y.restriction(K).maps == P.restriction(K).maps
    for n in range(4):
        assert function_orbit_reps(Y, HEIS_DIMS, n) == function_orbit_reps(P, HEIS_DIMS, n)


@pytest.mark.parametrize("G", SMALL_GROUPS[:5], ids=lambda g: g.name)
def test_function_orbits_against_enumeration(G):
    """Count orbits by applying every group element to every function."""
    labels = [(w, i) for w, d in HEIS_DIMS.items() if w for i in range(d)]
    for n in range(4):
        funcs = set()
        for r in range(n + 1):
            for sites in itertools.combinations(range(1, G.degree + 1), r):
                for labs in itertools.product(labels, repeat=r):
                    if sum(l[0] for l in labs) == n:
                        funcs.add(function_key(dict(zip(sites, labs))))
        orbits = {min(function_key(act_on_function(g, dict(f))) for g in G.elements()) for f in funcs}
        count, reps = function_orbit_reps(G, HEIS_DIMS, n)
        assert count == len(orbits) and sorted(orbits) == reps


@pytest.mark.parametrize("G", SMALL_GROUPS, ids=lambda g: g.name)
def test_configuration_counts(G):
    subsets = [frozenset(K) for r in range(3) for K in itertools.combinations(range(1, G.degree + 1), r)]
    for K1, K2, K3 in itertools.islice(itertools.product(subsets, repeat=3), 0, None, 7):
        confs = placed_support_orbits(G, K1, K2, K3)
        assert len(confs) == brute_force_configuration_count(G, K1, K2, K3)
        assert sum(c.orbit_size for c in confs) == G.orbit_length(K1) * G.orbit_length(K2) * G.orbit_length(K3)


def test_symmetric_b_n_nondecreasing_and_saturating():
    for n in range(1, 6):
        seq = [function_orbit_reps(symmetric_group(N), HEIS_DIMS | {5: 7}, n)[0] for N in range(1, n + 3)]
        assert all(x <= y for x, y in zip(seq, seq[1:]))
        assert seq[n - 1] == seq[-1] and (n == 1 or seq[n - 2] < seq[n - 1])


def test_families_nested_and_degrees():
    for fam in (symmetric_family(), pointed_symmetric_family(), product_family()):
        d = family_diagnostics(fam, {1}, 1, range(2, 7))
        assert all(d["nested"].values())
        assert all(fam.degree(N) < fam.degree(N + 1) for N in range(1, 8))
    assert make_family({"family": "symmetric"}).name == "symmetric"
    with pytest.raises(ValueError):
        make_family({"family": "nonsense"})


def test_custom_family():
    gens = {2: [[2, 1]], 3: [[2, 1, 3], [2, 3, 1]]}
    fam = custom_family(gens, {2: 2, 3: 3})
    assert fam.group(3).order == 6 and fam.group(2).order == 2
    with pytest.raises(ValueError):
        custom_family(gens, {2: 3, 3: 3})


def test_canonical_is_lex_min():
    G = dihedral(5)
    f = {2: (1, 0), 4: (2, 1)}
    orbit = {function_key(act_on_function(g, f)) for g in G.elements()}
    assert canonical_function(G, f) == min(orbit)


# ---- properties

perms = st.integers(2, 6).flatmap(lambda n: st.permutations(list(range(1, n + 1))).map(tuple))


@given(perms, st.data())
def test_compose_inverse(p, data):
    q = tuple(data.draw(st.permutations(list(range(1, len(p) + 1)))))
    assert compose(p, invert(p)) == identity(len(p))
    assert invert(compose(p, q)) == compose(invert(q), invert(p))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_GROUPS), st.data())
def test_pointwise_of_union_is_intersection(G, data):
    sites = list(range(1, G.degree + 1))
    A = data.draw(st.sets(st.sampled_from(sites), max_size=3))
    B = data.draw(st.sets(st.sampled_from(sites), max_size=3))
    both = [g for g in G.elements() if all(g[k - 1] == k for k in A) and all(g[k - 1] == k for k in B)]
    assert G.pointwise_stabilizer_order(A | B) == len(both)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.data())
def test_young_closed_forms(N, data):
    G = symmetric_group(N)
    K = data.draw(st.sets(st.integers(1, N), max_size=N))
    assert G.pointwise_stabilizer_order(K) == math.factorial(N - len(K))
    assert G.orbit_length(K) == math.comb(N, len(K))
