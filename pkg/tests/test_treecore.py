import random

import pytest
from hypothesis import given, settings, strategies as st

from itc.freemodel import Ext, base_model, compose
from itc.generate import corpus, random_descriptor
from itc.treecore import (InvalidTree, NotABranch, Step, TreeDescriptor, backtrack,
                          bad_for_crit, bad_for_length, branch_model, deadwood, is_normal,
                          iterate, remove_deadwood, tree_order, validate)


def deadwood_tree() -> TreeDescriptor:
    # E_0 = (3, 8, 8); E_1 = (1, 2, 5), inherited by M_1 and applied back to M_0
    base = base_model(21, [(3, 8, 8), (1, 2, 5)])
    return TreeDescriptor(base, (Step(1, 0), Step(0, 0)))


def test_worked_tree_shape(bad3):
    assert bad3.nodes == [(0,), (1,), (2,)]
    assert bad3.exts[(0,)] == Ext((3,), (8,), (8,))
    assert bad3.exts[(1,)] == Ext((5,), (7,), (7,))
    assert bad3.preds[(2,)] == (1,)
    assert validate(bad3) == []


def test_backtrack_is_least_legal(bad3):
    # crit(E_1) = 5 < 8 = len(E_0)
    assert backtrack(bad3, (1,)) == (0,)
    assert backtrack(bad3, (0,)) == (0,)


def test_tree_order_of_worked_tree(bad3):
    assert tree_order(bad3) == {((0,), (1,)), ((1,), (2,)), ((0,), (2,))}


def test_linear_tree_order_is_total():
    desc = TreeDescriptor(base_model(21, [(3, 8, 8), (5, 7, 7)]), (Step(1, 0), Step(0, 1)))
    t = iterate(desc)
    assert all(t.prec(a, b) for i, a in enumerate(t.nodes) for b in t.nodes[i + 1:])


def test_worked_tree_is_not_normal(bad3):
    rep = is_normal(bad3)
    assert not rep.normal
    assert any("bad for critical point" in w for w in rep.witnesses)
    assert any("index(E_1)" in w for w in rep.witnesses)
    assert not is_normal(bad3, weak=True).normal
    assert bad_for_crit(bad3) == [(1,)]
    assert bad_for_length(bad3) == [(0,)]
    assert deadwood(bad3) == []


def test_single_extender_tree_is_normal():
    t = iterate(TreeDescriptor(base_model(10, [(3, 8, 8)]), (Step(0, 0),)))
    assert is_normal(t).normal
    assert bad_for_crit(t) == bad_for_length(t) == deadwood(t) == []


def test_branch_models(bad3):
    assert branch_model(bad3, [(0,)]) == bad3.models[(0,)]
    assert branch_model(bad3, [(0,), (1,), (2,)]) == bad3.models[(2,)]


def test_branch_model_needs_a_chain():
    t = iterate(deadwood_tree())
    with pytest.raises(NotABranch):
        branch_model(t, [(1,), (2,)])


def test_rank_out_of_range_is_invalid():
    with pytest.raises(InvalidTree):
        iterate(TreeDescriptor(base_model(10, [(3, 8, 8)]), (Step(4, 0),)))


def test_deadwood_example():
    t = iterate(deadwood_tree())
    assert deadwood(t) == [(0,)]
    out, trace = remove_deadwood(deadwood_tree())
    assert [(p.node, p.witness) for p in trace] == [(0, 1)]
    pruned = iterate(out)
    assert out.length == 1
    assert pruned.exts[(0,)] == Ext((1,), (2,), (5,))
    assert pruned.preds[(1,)] == (0,)
    assert validate(pruned) == [] and deadwood(pruned) == []


def test_deadwood_free_tree_is_a_fixed_point(bad3_desc):
    out, trace = remove_deadwood(bad3_desc)
    assert trace == [] and out == bad3_desc


def test_corpus_is_deterministic():
    a, b = corpus(5, 20), corpus(5, 20)
    assert [d.steps for d in a] == [d.steps for d in b]
    assert [d.base.digest for d in a] == [d.base.digest for d in b]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_random_trees_are_valid_and_commute(seed, length):
    t = iterate(random_descriptor(random.Random(seed), length))
    assert validate(t) == []
    for c in t.nodes:
        anc = sorted(t.ancestors(c), key=t.pos)
        for i, a in enumerate(anc):
            for b in anc[i + 1:]:
                assert compose(t.imap(b, c), t.imap(a, b)).pmap == t.imap(a, c).pmap
    for v in t.ext_nodes():
        # the chosen predecessor is never earlier than the least legal one
        assert t.pos(backtrack(t, v)) <= t.pos(t.tpred_of_succ(v))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_no_bad_node_means_weakly_normal(seed, length):
    t = iterate(random_descriptor(random.Random(seed), length))
    assert is_normal(t, weak=True).normal == (bad_for_crit(t) == [])
