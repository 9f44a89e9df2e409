import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TREES
from itc.generate import random_descriptor
from itc.treecore import iterate
from itc.treefile import TreeFileError, from_descriptor, load, parse, serialize


def good() -> dict:
    return json.loads((TREES / "t_bad3.json").read_text())


def test_canonical_file_round_trips():
    text = (TREES / "t_bad3.json").read_text()
    assert serialize(parse(text)) == text


def test_file_gives_the_worked_tree(bad3):
    t = iterate(load(TREES / "t_bad3.json").to_descriptor())
    assert t.exts == bad3.exts and t.preds == bad3.preds


@pytest.mark.parametrize("mutate, msg", [
    (lambda d: d["descriptors"][0].update(crit=9), "crit < len"),
    (lambda d: d["descriptors"][1].update(index=8, len=8), "distinct"),
    (lambda d: d["descriptors"][0].update(index=30), "universe_size"),
    (lambda d: d["tree"][0].update(tpred_next=1), "earlier node"),
    (lambda d: d["tree"][1].update(extender_rank=-1), "natural"),
    (lambda d: d.update(universe_size="21"), "natural"),
    (lambda d: d.update(tree={}), "list"),
    (lambda d: d.update(atoms=[1]), "strings"),
])
def test_invalid_files_are_rejected(mutate, msg):
    d = good()
    mutate(d)
    with pytest.raises(TreeFileError, match=msg):
        parse(json.dumps(d))


def test_malformed_json():
    with pytest.raises(TreeFileError, match="malformed"):
        parse("{nope")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 6))
def test_descriptor_file_round_trip(seed, length):
    desc = random_descriptor(random.Random(seed), length)
    tf = from_descriptor(desc)
    text = serialize(tf)
    assert serialize(parse(text)) == text
    back = parse(text).to_descriptor()
    assert back.base == desc.base and back.steps == desc.steps
    assert iterate(back).exts == iterate(desc).exts
