"""JSON tree files: a base universe, its extender descriptors and the tree steps.

Canonical form is ``json.dumps(..., indent=2, sort_keys=True)`` plus a newline;
:func:`serialize` of a parsed canonical file reproduces it byte for byte.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .freemodel import Model, base_model
from .treecore import Step, TreeDescriptor


class TreeFileError(ValueError):
    pass


@dataclass(frozen=True)
class DescriptorEntry:
    id: int
    crit: int
    len: int
    index: int


@dataclass(frozen=True)
class NodeEntry:
    extender_rank: int
    tpred_next: int


@dataclass
class TreeFile:
    universe_size: int
    descriptors: list[DescriptorEntry]
    tree: list[NodeEntry]
    atoms: list[str] = field(default_factory=list)

    def base(self) -> Model:
        return base_model(self.universe_size,
                          [(d.crit, d.len, d.index) for d in self.descriptors], self.atoms)

    def to_descriptor(self) -> TreeDescriptor:
        return TreeDescriptor(self.base(), tuple(Step(n.extender_rank, n.tpred_next) for n in self.tree))

    def to_json(self) -> dict:
        return {
            "atoms": list(self.atoms),
            "universe_size": self.universe_size,
            "descriptors": [{"id": d.id, "crit": d.crit, "len": d.len, "index": d.index}
                            for d in self.descriptors],
            "tree": [{"extender_rank": n.extender_rank, "tpred_next": n.tpred_next} for n in self.tree],
        }


def _nat(obj: dict, key: str, where: str) -> int:
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise TreeFileError(f"{where}: '{key}' must be a natural number")
    return v


def from_json(data) -> TreeFile:
    if not isinstance(data, dict):
        raise TreeFileError("top level must be an object")
    size = _nat(data, "universe_size", "file")
    atoms = data.get("atoms", [])
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise TreeFileError("'atoms' must be a list of strings")
    raw = data.get("descriptors")
    if not isinstance(raw, list):
        raise TreeFileError("'descriptors' must be a list")
    descs = []
    for i, d in enumerate(raw):
        if not isinstance(d, dict):
            raise TreeFileError(f"descriptor {i}: not an object")
        e = DescriptorEntry(_nat(d, "id", f"descriptor {i}"), _nat(d, "crit", f"descriptor {i}"),
                            _nat(d, "len", f"descriptor {i}"), _nat(d, "index", f"descriptor {i}"))
        if not e.crit < e.len <= e.index < size:
            raise TreeFileError(f"descriptor {e.id}: need crit < len <= index < universe_size")
        descs.append(e)
    if len({d.index for d in descs}) != len(descs):
        raise TreeFileError("descriptor indices must be distinct")
    nodes = data.get("tree")
    if not isinstance(nodes, list):
        raise TreeFileError("'tree' must be a list")
    steps = []
    for i, n in enumerate(nodes):
        if not isinstance(n, dict):
            raise TreeFileError(f"node {i}: not an object")
        s = NodeEntry(_nat(n, "extender_rank", f"node {i}"), _nat(n, "tpred_next", f"node {i}"))
        if s.tpred_next > i:
            raise TreeFileError(f"node {i}: tpred_next {s.tpred_next} is not an earlier node")
        steps.append(s)
    return TreeFile(size, descs, steps, list(atoms))


def parse(text: str) -> TreeFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise TreeFileError(f"malformed JSON: {err}") from err
    return from_json(data)


def serialize(tf: TreeFile) -> str:
    return json.dumps(tf.to_json(), indent=2, sort_keys=True) + "\n"


def from_descriptor(desc: TreeDescriptor) -> TreeFile:
    """The file for a descriptor whose base model came from :func:`base_model`."""
    m = desc.base
    descs = [DescriptorEntry(i, e.crit[0], e.len[0], e.index[0]) for i, e in enumerate(m.descriptors)]
    return TreeFile(len(m.points), descs, [NodeEntry(s.rank, s.tpred) for s in desc.steps],
                    sorted(m.atoms))


def load(path: str) -> TreeFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(tf: TreeFile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(tf))
