import pytest
from hypothesis import given, strategies as st

from itc.seqindex import (InconsistentRegistry, NoWitness, NotInDomain, Registry,
                          cut, cut_isomorph_witness, fmt, interval, interval_isomorphic,
                          parse_name, seq_lt)


def one_stage():
    # stage 1 of the worked example: delta_1 = 2, I_1 = {<0,2>, <1,2>}
    reg = Registry()
    reg.add_stage(2, (1, 2), [(0, 2), (1, 2)])
    return reg


def two_stages():
    reg = one_stage()
    reg.add_stage(3, (1, 2, 3), [(0, 2, 3), (1, 2, 3)])
    return reg


@pytest.mark.parametrize("a, b", [((1,), (0, 2)), ((0, 2), (1, 2)), ((0,), (1,)), ((2,), (0, 3))])
def test_seq_lt_examples(a, b):
    assert seq_lt(a, b)
    assert not seq_lt(b, a)


def test_seq_lt_irreflexive():
    assert not seq_lt((0, 2), (0, 2))


def test_canonical_uses_full_index():
    reg = one_stage()
    assert reg.canonical((2,)) == (1, 2)
    assert reg.canonical((0,)) == (0,)
    assert reg.stage_of((2,)) == 1
    assert reg.stage_of((1,)) is None


def test_cut_drops_later_markers():
    reg = one_stage()
    assert cut((1, 2), 0, reg) == (1,)
    assert cut((1, 2), 1, reg) == (1, 2)


def test_cut_fixes_plain_names_outside_markers():
    assert cut((5,), 1, one_stage()) == (5,)


def test_cut_of_extension_is_the_earlier_member():
    reg = two_stages()
    assert cut((0, 2, 3), 1, reg) == (0, 2)
    assert cut((1, 2, 3), 1, reg) == (1, 2)


def test_registry_rejects_decreasing_markers():
    reg = one_stage()
    with pytest.raises(InconsistentRegistry):
        reg.add_stage(2, (0, 2), [])
    with pytest.raises(InconsistentRegistry):
        reg.add_stage(4, (1, 3), [])


def test_interval_and_isomorphism():
    reg = two_stages()
    dom = [(0,), (1,), (0, 2), (1, 2), (0, 2, 3), (1, 2, 3)]
    assert interval((0, 2), (1, 2), dom, reg) == [(0, 2), (1, 2)]
    assert interval_isomorphic((0, 2), (1, 2), (0, 2, 3), (1, 2, 3), dom, reg)
    assert interval_isomorphic((0,), (0,), (1, 2), (1, 2), dom, reg)
    assert not interval_isomorphic((0, 2), (1, 2), (0, 2, 3), (0, 2, 3), dom, reg)
    with pytest.raises(NotInDomain):
        interval((0,), (7,), dom, reg)


def test_witness_at_own_stage_is_the_marker():
    reg = one_stage()
    dom = [(0,), (1,), (0, 2), (1, 2)]
    assert cut_isomorph_witness((0, 2), 1, reg, dom) == (1, 2)


def test_witness_for_min_of_next_interval():
    reg = two_stages()
    dom = [(0,), (1,), (0, 2), (1, 2), (0, 2, 3), (1, 2, 3)]
    assert cut_isomorph_witness((0, 2, 3), 1, reg, dom) == (1, 2, 3)


def test_witness_needs_a_stage_name():
    with pytest.raises(NoWitness):
        cut_isomorph_witness((1,), 1, one_stage(), [(0,), (1,), (0, 2), (1, 2)])


names = st.lists(st.integers(0, 9), min_size=1, max_size=4, unique=True).map(lambda xs: tuple(sorted(xs)))


@given(names)
def test_fmt_parse_round_trip(n):
    assert parse_name(fmt(n)) == n


@given(names, names, names)
def test_seq_lt_is_a_strict_total_order(a, b, c):
    assert not seq_lt(a, a)
    if a != b:
        assert seq_lt(a, b) != seq_lt(b, a)
    if seq_lt(a, b) and seq_lt(b, c):
        assert seq_lt(a, c)
