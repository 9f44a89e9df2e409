import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TREES
from itc.freemodel import Ord, enumerate_elements
from itc.generate import random_descriptor
from itc.supports import (NotASupport, close, finite_support_theorem, is_embeddable, is_support,
                          recover, subtree_embedding, support_of)
from itc.treecore import iterate
from itc.treeembed import verify_tree_embedding
from itc.treefile import load


def test_base_elements_need_no_nodes(bad3):
    for p in bad3.models[(0,)].points:
        assert support_of(bad3, (0,), Ord(p)) == frozenset()


def test_pushed_base_element_needs_no_nodes(bad3):
    i02 = bad3.imap((0,), (2,))
    for p in bad3.models[(0,)].points:
        assert support_of(bad3, (2,), Ord(i02(p))) == frozenset()


def test_generator_introduced_by_last_extender(bad3):
    m2 = bad3.models[(2,)]
    crit = bad3.exts[(1,)].crit
    fresh = [p for p in m2.points if m2.provenance[p] == ("gen", p) and p >= crit]
    assert fresh
    # a generator above crit(E_1) comes from E_1; closing under predecessors adds 0
    assert support_of(bad3, (2,), Ord(fresh[0])) == {(0,), (1,)}


def test_support_checks(bad3):
    assert is_support(bad3, set())
    assert is_support(bad3, {(0,), (1,)})
    assert not is_support(bad3, {(1,)})
    assert not is_support(bad3, {(2,)})


def test_support_without_branch_condition():
    t = iterate(load(TREES / "gap_support.json").to_descriptor())
    y = {(0,), (2,)}
    # pred(2) = 0, so 1 is not tree-below 2 and the subtree cannot map in
    assert t.preds[(2,)] == (0,)
    assert is_support(t, y) and not is_embeddable(t, y)
    with pytest.raises(NotASupport):
        subtree_embedding(t, y)
    assert is_embeddable(t, close(t, y))


def test_empty_support_gives_one_node_tree(bad3):
    sub, emb = subtree_embedding(bad3, set())
    assert sub.nodes == [(0,)]
    assert emb.sigma == {(0,): (0,)}


def test_full_support_gives_the_tree_back(bad3):
    sub, emb = subtree_embedding(bad3, {(0,), (1,)})
    assert emb.sigma == {n: n for n in bad3.nodes}
    assert [sub.exts[n] for n in sub.ext_nodes()] == [bad3.exts[n] for n in bad3.ext_nodes()]
    assert verify_tree_embedding(emb).ok


def test_recovery_through_the_subtree(bad3):
    m2 = bad3.models[(2,)]
    for x in enumerate_elements(m2, 2):
        r = recover(bad3, (2,), x)
        assert r.preimage is not None


def test_worked_tree_finite_support(bad3):
    rep = finite_support_theorem(bad3, depth=2)
    assert rep.ok and rep.checked > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_supports_are_closed_under_union(seed, length):
    t = iterate(random_descriptor(random.Random(seed), length))
    nodes = t.ext_nodes()
    sups = [set(c) for r in range(len(nodes) + 1) for c in combinations(nodes, r) if is_support(t, c)]
    for a, b in combinations(sups, 2):
        assert is_support(t, a | b)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_computed_supports_are_embeddable(seed, length):
    t = iterate(random_descriptor(random.Random(seed), length))
    memo: dict = {}
    for n in t.nodes:
        for x in enumerate_elements(t.models[n], 1):
            assert is_embeddable(t, support_of(t, n, x, memo))
