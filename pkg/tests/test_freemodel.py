import random

import pytest
from hypothesis import given, settings, strategies as st

from itc.freemodel import (Atom, DescriptorNotOwned, Ext, ModelError, Ord, WrongModel,
                           base_model, compose, enumerate_elements, identity, ultrapower)
from itc.generate import random_base


def test_ultrapower_blocks():
    m = base_model(10, [(3, 8, 8)])
    e = m.descriptors[0]
    n, j = ultrapower(m, e)
    gens = [p for p in n.points if n.provenance[p][0] == "gen"]
    imgs = [p for p in n.points if n.provenance[p][0] == "img"]
    # generators are the points up to the index (0..8), images come from 3..9
    assert gens == [(k,) for k in range(9)]
    assert len(imgs) == 7
    assert len(n) == 16
    assert j((2,)) == (2,)
    assert j((3,)) == min(imgs)
    assert all(g < j((3,)) for g in gens)
    assert j.crit == (3,)


def test_lower_extender_survives_with_its_image():
    m = base_model(10, [(3, 8, 8), (5, 7, 7)])
    e = Ext((3,), (8,), (8,))
    n, j = ultrapower(m, e)
    f = Ext((5,), (7,), (7,))
    assert n.has_descriptor(f)
    assert n.has_descriptor(j.ext(f))
    assert j.ext(f) != f


def test_extender_must_belong_to_owner():
    m = base_model(10, [(3, 8, 8)])
    with pytest.raises(DescriptorNotOwned):
        ultrapower(m, Ext((1,), (2,), (2,)))


@pytest.mark.parametrize("descs", [[(3, 2, 5)], [(1, 4, 3)], [(1, 2, 12)], [(1, 2, 5), (0, 3, 5)]])
def test_base_model_rejects_bad_descriptors(descs):
    with pytest.raises(ModelError):
        base_model(10, descs)


def test_canonical_embedding_is_a_structural_embedding():
    m = base_model(10, [(3, 8, 8), (5, 7, 7)])
    n, j = ultrapower(m, Ext((3,), (8,), (8,)))
    assert j.problems() == []
    assert all(j(p) == p for p in m.points if p < (3,))
    # inflationary in construction order: positions never decrease
    assert all(n.pos(j(p)) >= m.pos(p) for p in m.points)


def test_step_maps_commute_on_the_worked_tree(bad3):
    i01, i12, i02 = bad3.imap((0,), (1,)), bad3.imap((1,), (2,)), bad3.imap((0,), (2,))
    assert compose(i12, i01).pmap == i02.pmap
    assert bad3.imap((1,), (1,)).is_identity()


def test_compose_rejects_mismatched_ends(bad3):
    with pytest.raises(WrongModel):
        compose(bad3.imap((0,), (1,)), bad3.imap((1,), (2,)))


def test_identity_fixes_elements(bad3):
    m = bad3.models[(2,)]
    ident = identity(m)
    for x in enumerate_elements(m, 2):
        assert ident.apply(x) == x


def test_terms_need_their_own_model(bad3):
    m1 = bad3.models[(1,)]
    t = next(x for x in enumerate_elements(m1, 1) if type(x).__name__ == "Term")
    with pytest.raises(WrongModel):
        identity(bad3.models[(2,)]).apply(t)


def test_atoms_are_carried_over():
    m = base_model(6, [(1, 3, 4)], atoms=["a"])
    n, j = ultrapower(m, m.descriptors[0])
    assert j.apply(Atom("a")) == Atom("a")
    assert n.atoms == m.atoms


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_canonical_embedding_is_invertible_on_its_range(seed):
    rng = random.Random(seed)
    m = random_base(rng)
    e = rng.choice(m.descriptors)
    n, j = ultrapower(m, e)
    for x in enumerate_elements(m, 1):
        y = j.apply(x)
        assert n.owns(y)
        assert j.preimage(y) == x
    fresh = [p for p in n.points if n.provenance[p] == ("gen", p) and p >= e.crit]
    assert all(j.preimage(Ord(p)) is None for p in fresh)
