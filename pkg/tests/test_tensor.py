import itertools

import pytest
from hypothesis import given, settings, strategies as st

from orbilim.perm import compose, symmetric_group
from orbilim.seed import make_seed
from orbilim.tensor import (FockWord, TensorError, act_and_embed, fock_basis, overlap_sets,
                            tensor_mode, tensor_structure_constant)

HEIS = make_seed("heisenberg", 4)
VIR = make_seed({"kind": "virasoro", "c": "1/2"}, 4)
A = HEIS.generator_state()
W = VIR.generator_state()


def fw(degree, **sites):
    return FockWord.make(degree, {int(k[1:]): v for k, v in sites.items()})


def test_structure_constant_examples():
    vac = FockWord.vacuum(3)
    assert tensor_structure_constant(HEIS, vac, vac, vac) == 1
    assert tensor_structure_constant(HEIS, fw(3, s1=A), fw(3, s2=A), fw(3, s3=A)) == 0
    assert tensor_structure_constant(VIR, fw(3, s1=W), fw(3, s1=W), fw(3, s1=W)) == 2
    with pytest.raises(TensorError):
        tensor_structure_constant(HEIS, vac, vac, FockWord.vacuum(2))


def test_act_and_embed_examples():
    a1 = fw(2, s1=A)
    assert act_and_embed(a1, (1, 2)) == a1
    assert act_and_embed(a1, (2, 1)) == fw(2, s2=A)
    e = act_and_embed(a1, 5)
    assert e.degree == 5 and e.as_dict() == {1: A} and e.weight(HEIS) == 1
    with pytest.raises(TensorError):
        act_and_embed(e, 2)


def test_overlap_examples():
    conf = overlap_sets(fw(3, s1=A, s2=A), fw(3, s2=A, s3=A), fw(3, s1=A, s3=A))
    assert conf.triple == frozenset() and conf.one_point == frozenset()
    conf = overlap_sets(fw(3, s1=A), fw(3, s1=A), fw(3, s1=A))
    assert conf.triple == {1} and conf.one_point == frozenset()
    conf = overlap_sets(fw(3, s1=A), fw(3, s2=A), fw(3, s1=A, s2=A))
    assert conf.triple == frozenset() and conf.one_point == frozenset()


def test_json_and_label_roundtrip():
    v = fw(4, s1=HEIS.parse("a(-1)a(-1)"), s3=HEIS.parse("a(-2)"))
    assert FockWord.from_json(HEIS, v.to_json(HEIS)) == v
    assert v.label(HEIS) == "a(-1)a(-1)@1 a(-2)@3"


def to_rank2(word: FockWord):
    """Two Heisenberg sites are one rank-2 Heisenberg algebra."""
    modes = []
    for site, w in word.as_dict().items():
        modes.extend((site - 1, n) for _, n in w)
    return modes


def test_tensor_mode_against_rank2_heisenberg():
    R = make_seed({"kind": "heisenberg", "rank": 2}, 4)

    def rank2_vec(vec):
        out = {}
        for w, c in vec.items():
            for w2, c2 in R.apply_modes(to_rank2(w)).items():
                out[w2] = out.get(w2, 0) + c * c2
        return {w: c for w, c in out.items() if c}

    basis = [w for n in range(3) for w in fock_basis(HEIS, 2, n)]
    checked = 0
    for b, c in itertools.product(basis, repeat=2):
        rb, rc = rank2_vec({b: 1}), rank2_vec({c: 1})
        (bw,), (cw,) = rb, rc
        for k in range(-2, 4):
            if b.weight(HEIS) + c.weight(HEIS) - k - 1 > 4:
                continue
            assert rank2_vec(tensor_mode(HEIS, b, k, c)) == R.apply_word_mode(bw, k, cw)
            checked += 1
    assert checked > 200


def test_structure_constant_matches_mode_expansion():
    basis = [w for n in range(3) for w in fock_basis(VIR, 3, n)] + [w for w in fock_basis(VIR, 3, 4)]
    for a, b, c in itertools.product(basis[:12], repeat=3):
        k = b.weight(VIR) + c.weight(VIR) - a.weight(VIR) - 1
        assert tensor_structure_constant(VIR, a, b, c) == tensor_mode(VIR, b, k, c).get(a, 0)


# ---- invariants

def fock_words(degree):
    basis = HEIS.all_basis(2)[1:]
    return st.dictionaries(st.integers(1, degree), st.sampled_from(basis), max_size=2).map(
        lambda d: FockWord.make(degree, d))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_equivariance_and_embedding(data):
    N = 4
    a, b, c = (data.draw(fock_words(N)) for _ in range(3))
    sigma = data.draw(st.sampled_from(symmetric_group(N).elements()))
    val = tensor_structure_constant(HEIS, a, b, c)
    assert tensor_structure_constant(HEIS, a.act(sigma), b.act(sigma), c.act(sigma)) == val
    assert tensor_structure_constant(HEIS, a.embed(6), b.embed(6), c.embed(6)) == val
    assert a.act(sigma).weight(HEIS) == a.weight(HEIS) == a.embed(7).weight(HEIS)
    # embedding commutes with the action once sigma is extended by fixed points
    ext = tuple(sigma) + (5, 6)
    assert a.act(sigma).embed(6) == a.embed(6).act(ext)
    if overlap_sets(a, b, c).one_point:
        assert val == 0


def test_action_is_a_left_action():
    a = fw(3, s1=A, s2=HEIS.parse("a(-2)"))
    G = symmetric_group(3).elements()
    for p, q in itertools.product(G, repeat=2):
        assert a.act(compose(p, q)) == a.act(q).act(p)
