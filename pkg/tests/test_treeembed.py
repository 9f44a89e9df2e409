import random

import pytest
from hypothesis import given, settings, strategies as st

from itc.freemodel import base_model, compose, identity
from itc.generate import random_descriptor
from itc.treecore import Step, TreeDescriptor, iterate, validate
from itc.treeembed import (ClauseViolation, compose_embeddings, identity_embedding,
                           make_embedding, push_along_main_branch, push_tree,
                           verify_tree_embedding)


def test_identity_embedding_maps_are_identities(bad3):
    emb = identity_embedding(bad3)
    assert all(m.is_identity() for m in emb.derived.values())
    assert verify_tree_embedding(emb).ok


def test_non_support_range_is_rejected(bad3):
    sigma = {(0,): (1,), (1,): (1,), (2,): (2,)}
    with pytest.raises(ClauseViolation) as info:
        make_embedding(bad3, bad3, sigma, identity(bad3.models[(0,)]))
    assert info.value.clause == 1


def test_push_along_identity_copies_the_tree(bad3):
    new, emb = push_tree(bad3, identity(bad3.models[(0,)]))
    assert new.exts == bad3.exts and new.preds == bad3.preds
    assert verify_tree_embedding(emb).ok


def test_push_single_ultrapower_along_itself():
    m = base_model(10, [(3, 8, 8)])
    t = iterate(TreeDescriptor(m, (Step(0, 0),)))
    u = t.exts[(0,)]
    i_u = t.imap((0,), (1,))
    new, emb = push_tree(t, i_u)
    # the copy is the one-step tree ult(ult(M, U), i^U(U))
    assert new.models[(0,)] == t.models[(1,)]
    assert new.exts[(0,)] == i_u.ext(u)
    assert verify_tree_embedding(emb).ok


def test_push_worked_tree_along_main_branch(bad3):
    new, emb = push_along_main_branch(bad3)
    assert new.models[(0,)] == bad3.models[(2,)]
    assert validate(new) == []
    assert len(new.nodes) == 3
    assert verify_tree_embedding(emb).ok


def test_naturality_of_push(bad3):
    _, emb = push_along_main_branch(bad3)
    src, dst = emb.source, emb.target
    for b in src.nodes:
        for a in src.ancestors(b):
            left = compose(emb.derived[b], src.imap(a, b))
            right = compose(dst.imap(a, b), emb.derived[a])
            assert left.pmap == right.pmap


def test_composition_of_embeddings(bad3):
    ident = identity_embedding(bad3)
    both = compose_embeddings(ident, ident)
    assert both.sigma == ident.sigma
    assert verify_tree_embedding(both).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_random_pushes_verify(seed, length):
    t = iterate(random_descriptor(random.Random(seed), length))
    assert verify_tree_embedding(identity_embedding(t)).ok
    _, emb = push_along_main_branch(t)
    assert verify_tree_embedding(emb).ok
