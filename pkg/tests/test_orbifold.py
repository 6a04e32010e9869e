import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbilim.orbifold import (M_factor, M_factor_formula, OrbifoldError, OrbifoldVA, UnsaturatedError,
                              connect, connect_closed, connecting_map, connecting_prefactor, eta,
                              literal_prefactor, product_set_size, saturation, sc_finite, sc_limit_exact,
                              sc_oligo, symmetric_M)
from orbilim.perm import (PermGroup, SupportConfiguration, from_cycles, function_orbit_reps,
                          placed_support_orbits, pointed_symmetric_family, product_family, symmetric_family,
                          symmetric_group)
from orbilim.scalar import RadicalScalar, sqrt_of_rational
from orbilim.seed import borcherds_residual, borcherds_windows, make_seed
from orbilim.tensor import FockWord

HEIS = make_seed("heisenberg", 4)
A = HEIS.generator_state()
SYM = symmetric_family()
PTD = pointed_symmetric_family()


def word(degree, **sites):
    return FockWord.make(degree, {int(k[1:]): HEIS.parse(v) for k, v in sites.items()})


def b_n(fam, N, n):
    return function_orbit_reps(fam.group(N), {w: len(HEIS.basis(w)) for w in range(n + 1)}, n)[0]


# ---- projection

def test_projection_examples():
    O = OrbifoldVA(SYM, HEIS, 2)
    assert O.project(word(2, s2="a(-1)")) == {word(2, s1="a(-1)"): 1}
    assert O.project(O.vacuum) == {O.vacuum: 1}
    sym = {word(2, s1="a(-1)"): Fraction(1, 2), word(2, s2="a(-1)"): Fraction(1, 2)}
    assert O.project(O.to_fock(O.project(sym))) == O.project(sym)
    with pytest.raises(OrbifoldError):
        O.project(word(3, s1="a(-1)"))


def test_projection_idempotent():
    for fam, N in ((SYM, 3), (PTD, 3), (product_family(), 2)):
        O = OrbifoldVA(fam, HEIS, N)
        for n in range(4):
            for rep in O.basis(n):
                vec = {rep: 1}
                assert O.project(O.to_fock(vec)) == vec


def test_orbit_basis_size_is_b_n():
    for fam in (SYM, PTD):
        for N in range(1, 5):
            O = OrbifoldVA(fam, HEIS, N)
            for n in range(5):
                assert O.dim(n) == b_n(fam, N, n)
                for rep in O.basis(n):
                    assert O.group.order % O.orbit_length(rep) == 0
                    assert rep == min(O.orbit(rep), key=lambda w: w.key(HEIS))


# ---- connecting maps

def test_prefactor_examples():
    # the literal ratio is 1/sqrt(N(N+1)) on a single site
    for N in range(1, 8):
        assert literal_prefactor(SYM, N, {1}) == sqrt_of_rational(Fraction(1, N * (N + 1)))
    assert literal_prefactor(SYM, 2, {1}) == RadicalScalar({6: Fraction(1, 6)})
    assert connecting_prefactor(SYM, 2, {1}) == RadicalScalar({6: Fraction(1, 2)})
    assert connecting_prefactor(SYM, 5, set()) == 1
    assert literal_prefactor(SYM, 2, set()) == Fraction(1, 3)
    for N in range(1, 6):
        for K in ({1}, {1, 2}, set()):
            if len(K) <= N:
                q = connecting_prefactor(SYM, N, K)
                assert q.sign() > 0 and (q * q).is_rational()
                assert q * Fraction(SYM.group(N).order, SYM.group(N + 1).order) == literal_prefactor(SYM, N, K)


def test_connecting_map_vacuum_and_grading():
    O = OrbifoldVA(SYM, HEIS, 2)
    assert connecting_map(O, {O.vacuum: 1}) == {FockWord.vacuum(3): 1}
    for n in range(4):
        for rep in O.basis(n):
            img = connecting_map(O, {rep: 1})
            assert all(w.weight(HEIS) == n for w in img)


def test_composition_law():
    for fam in (SYM, PTD, product_family()):
        for n in range(4):
            O = OrbifoldVA(fam, HEIS, 1)
            for rep in O.basis(n):
                direct = connect(fam, HEIS, 1, 4, {rep: 1})
                two_step = connect(fam, HEIS, 2, 4, connect(fam, HEIS, 1, 2, {rep: 1}))
                assert direct == two_step
                if len(direct) == 1 and n <= 1:
                    assert next(iter(direct.values())) == connect_closed(fam, 1, 4, rep.support)


def test_connecting_map_injective():
    for fam in (SYM, PTD):
        for N in range(1, 5):
            O = OrbifoldVA(fam, HEIS, N)
            for n in range(5):
                images = [connecting_map(O, {rep: 1}) for rep in O.basis(n)]
                keys = [frozenset(img) for img in images]
                assert all(len(img) == 1 for img in images)
                assert len(set(keys)) == len(keys)


def test_saturated_shortcut():
    """On saturated weights pi_N g pi_M = pi_N g."""
    for fam in (SYM, PTD):
        for M in range(1, 4):
            for n in range(4):
                if b_n(fam, M, n) != b_n(fam, M + 2, n):
                    continue
                OM, ON = OrbifoldVA(fam, HEIS, M), OrbifoldVA(fam, HEIS, M + 2)
                for rep in OM.basis(n):
                    lhs = ON.project({w.embed(ON.degree): c for w, c in OM.to_fock({rep: 1}).items()})
                    assert lhs == ON.project(rep.embed(ON.degree))


def test_saturation_examples():
    assert saturation(SYM, HEIS, 2, 6) == 2
    assert saturation(SYM, HEIS, 0, 6) == 1
    assert saturation(SYM, HEIS, 1, 6) == 1
    assert [saturation(SYM, HEIS, n, 8) for n in range(5)] == [1, 1, 2, 3, 4]
    # b_4 still grows between N=3 and N=4
    assert saturation(SYM, HEIS, 4, 4) is None


# ---- M factors

def test_M_factor_examples():
    G = symmetric_group(4)
    c = SupportConfiguration(frozenset({1}), frozenset({2}), frozenset({1, 2}))
    assert M_factor(G, c).value == RadicalScalar({3: Fraction(1, 2)})
    assert M_factor(G, c).agree is True
    c = SupportConfiguration(frozenset({1}), frozenset({1}), frozenset({1}))
    assert M_factor(G, c).value == Fraction(1, 2)
    c = SupportConfiguration(frozenset({1}), frozenset({2}), frozenset({3}))
    assert M_factor(G, c).value == 0


def test_symmetric_M_examples():
    for N in range(2, 30):
        assert symmetric_M(1, 1, 2, 0, N) == sqrt_of_rational(Fraction(N - 1, N))
        assert symmetric_M(1, 1, 1, 1, N) == sqrt_of_rational(Fraction(1, N))
    with pytest.raises(OrbifoldError):
        symmetric_M(1, 1, 1, 0, 5)
    with pytest.raises(OrbifoldError):
        symmetric_M(1, 2, 4, 1, 9)


def test_symmetric_M_matches_placed():
    for N in range(2, 7):
        G = symmetric_group(N)
        for sizes in itertools.product(range(0, 3), repeat=3):
            Ks = [frozenset(range(1, s + 1)) for s in sizes]
            for conf in placed_support_orbits(G, *Ks):
                if conf.one_point:
                    continue
                nt = len(conf.triple)
                assert symmetric_M(*sizes, nt, N) == M_factor_formula(G, conf)


def test_mn3_decay():
    for N in range(10, 201, 10):
        val = symmetric_M(1, 1, 1, 1, N)
        assert val * RadicalScalar.sqrt(N) == 1
        two = symmetric_M(2, 2, 2, 2, N)
        assert two * two * N * (N - 1) == 1


def random_conf(rng, G):
    sites = list(range(1, G.degree + 1))
    Ks = [frozenset(rng.sample(sites, rng.randint(0, min(3, len(sites))))) for _ in range(3)]
    return SupportConfiguration(*Ks)


def test_M_bound_and_product_form_random():
    rng = random.Random(7)
    groups = [symmetric_group(5), PTD.group(5), product_family().group(2), product_family().group(3)]
    for _ in range(600):
        G = rng.choice(groups)
        conf = random_conf(rng, G)
        r = M_factor(G, conf)
        assert 0 <= float(r.value) <= 1
        if not conf.one_point:
            assert r.agree is True


def test_triple_product_identity():
    G = PermGroup(6, [from_cycles(6, [[1, 2, 3]]), from_cycles(6, [[1, 2]]), from_cycles(6, [[4, 5, 6]])])
    c = SupportConfiguration(frozenset({1, 4}), frozenset({2, 4}), frozenset({1, 2}))
    h = [G.pointwise_stabilizer_order(K) for K in c.sets]
    assert not c.one_point
    assert product_set_size(G, c) * G.pointwise_stabilizer_order(c.union) ** 2 == math.prod(h)


# ---- structure constants

def test_sc_examples():
    O = OrbifoldVA(SYM, HEIS, 2)
    vac = O.vacuum
    a = word(2, s1="a(-1)")
    for method in ("definition", "group_sum", "oligo"):
        assert sc_finite(SYM, HEIS, 2, 2, vac, vac, vac, method) == 1
        assert sc_finite(SYM, HEIS, 2, 2, a, a, a, method) == 0
    assert sc_finite(SYM, HEIS, 2, 2, vac, a, a, "definition") == sc_finite(SYM, HEIS, 2, 2, vac, a, a, "group_sum")
    with pytest.raises(OrbifoldError):
        sc_finite(SYM, HEIS, 2, 2, vac, a, a, "nonsense")
    with pytest.raises(UnsaturatedError):
        sc_oligo(SYM, HEIS, 1, 3, *(word(1, s1="a(-1)a(-1)"),) * 3)


def triples(fam, M, N, max_total):
    O = OrbifoldVA(fam, HEIS, M)
    basis = [x for n in range(max_total + 1) for x in O.basis(n)]
    for a, b, c in itertools.product(basis, repeat=3):
        ws = [O.weight(x) for x in (a, b, c)]
        if sum(ws) <= max_total and all(b_n(fam, M, w) == b_n(fam, N, w) for w in ws):
            yield a, b, c


@pytest.mark.parametrize("fam", [SYM, PTD], ids=["symmetric", "pointed"])
def test_cross_method_small(fam):
    count = 0
    for M, N in ((2, 2), (1, 3), (2, 3)):
        for a, b, c in triples(fam, M, N, 3):
            d = sc_finite(fam, HEIS, M, N, a, b, c, "definition")
            assert sc_finite(fam, HEIS, M, N, a, b, c, "group_sum") == d
            assert sc_finite(fam, HEIS, M, N, a, b, c, "oligo") == d
            raw = sc_oligo(fam, HEIS, M, N, a, b, c, normalized=False)
            assert raw == d * eta(fam, HEIS, M, N, a)
            count += 1
    assert count > 50


def test_exact_limit_is_tail_value():
    # once every growing block holds all supports the finite values approach the exact limit
    M = 2
    O = OrbifoldVA(SYM, HEIS, M)
    for a, b, c in itertools.islice(triples(SYM, M, 12, 4), 0, None, 5):
        lim = float(sc_limit_exact(SYM, HEIS, M, a, b, c))
        vals = [float(sc_oligo(SYM, HEIS, M, N, a, b, c, check=False)) for N in (50, 200, 800)]
        gaps = [abs(v - lim) for v in vals]
        assert gaps[-1] <= gaps[0] + 1e-12 and gaps[-1] < 0.2
    assert O.N == M


def test_orbifold_borcherds_N2():
    O = OrbifoldVA(SYM, HEIS, 2)
    basis = [x for n in range(4) for x in O.basis(n)]
    for a, b, c in itertools.product(basis, repeat=3):
        if sum(O.weight(x) for x in (a, b, c)) > 3:
            continue
        for k, m, n in borcherds_windows(O, a, b, c, range(-1, 2)):
            assert borcherds_residual(O, a, b, c, k, m, n) == {}


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.data())
def test_M_factor_in_unit_interval(N, data):
    G = data.draw(st.sampled_from([symmetric_group(N), PTD.group(N), product_family().group(N)]))
    sites = st.sets(st.integers(1, G.degree), max_size=3).map(frozenset)
    conf = SupportConfiguration(data.draw(sites), data.draw(sites), data.draw(sites))
    assert 0 <= float(M_factor_formula(G, conf)) <= 1
