"""Iteration trees as finite data.

A :class:`TreeDescriptor` is the input form: a base model plus, for each
extender position ``v``, the rank of ``E_v`` in the index-sorted extender table
of ``M_v`` and the declared tree-predecessor of ``v+1``.  :func:`iterate`
turns it into a :class:`Tree`, the general form used everywhere else; a Tree's
nodes may carry sequence names (see :mod:`itc.seqindex`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .freemodel import (AgreementFailure, Embedding, Ext, Model, compose, identity,
                        ultrapower)
from .seqindex import Name, fmt, plain


class TreeError(ValueError):
    pass


class InvalidTree(TreeError):
    pass


class NoPredecessor(TreeError):
    pass


class CycleDetected(TreeError):
    pass


class NotABranch(TreeError):
    pass


class PruneFailed(TreeError):
    pass


@dataclass(frozen=True)
class Step:
    rank: int
    tpred: int


@dataclass(frozen=True)
class TreeDescriptor:
    base: Model
    steps: tuple[Step, ...]
    drop_set: frozenset[int] = frozenset()

    @property
    def length(self) -> int:
        return len(self.steps)

    def nodes(self) -> list[int]:
        return list(range(len(self.steps) + 1))


@dataclass
class Tree:
    """An iterated tree: ordered nodes, models, extenders, predecessors, step maps."""

    nodes: list[Name]
    models: dict[Name, Model]
    exts: dict[Name, Ext]
    preds: dict[Name, Name]
    steps: dict[Name, Embedding]
    _index: dict[Name, int] = field(default_factory=dict, repr=False)
    _maps: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.reindex()

    def reindex(self) -> None:
        self._index = {n: i for i, n in enumerate(self.nodes)}
        self._maps = {}

    def __contains__(self, n) -> bool:
        return n in self._index

    def __len__(self):
        return len(self.nodes)

    @property
    def root(self) -> Name:
        return self.nodes[0]

    @property
    def last(self) -> Name:
        return self.nodes[-1]

    def pos(self, n: Name) -> int:
        return self._index[n]

    def succ(self, n: Name) -> Name:
        return self.nodes[self._index[n] + 1]

    def prev(self, n: Name) -> Name:
        return self.nodes[self._index[n] - 1]

    def ext_nodes(self) -> list[Name]:
        return self.nodes[:-1]

    def tpred_of_succ(self, n: Name) -> Name:
        return self.preds[self.succ(n)]

    def ancestors(self, n: Name) -> list[Name]:
        """Strict tree-predecessors of ``n``, nearest first."""
        out = []
        seen = {n}
        while n in self.preds:
            n = self.preds[n]
            if n in seen:
                raise CycleDetected(fmt(n))
            seen.add(n)
            out.append(n)
        return out

    def prec(self, a: Name, b: Name) -> bool:
        return a != b and a in self.ancestors(b)

    def preceq(self, a: Name, b: Name) -> bool:
        return a == b or self.prec(a, b)

    def branch(self, n: Name) -> list[Name]:
        return list(reversed(self.ancestors(n))) + [n]

    def imap(self, a: Name, b: Name) -> Embedding:
        """``i_{a,b}`` for ``a`` tree-below-or-equal ``b``."""
        key = (a, b)
        if key in self._maps:
            return self._maps[key]
        if a == b:
            m = identity(self.models[a])
        elif not self.prec(a, b):
            raise NotABranch(f"{fmt(a)} is not below {fmt(b)}")
        else:
            p = self.preds[b]
            m = self.steps[b] if p == a else compose(self.steps[b], self.imap(a, p))
        self._maps[key] = m
        return m

    def crit(self, n: Name):
        return self.exts[n].crit

    def length_of(self, n: Name):
        return self.exts[n].len

    def index_of(self, n: Name):
        return self.exts[n].index


def iterate(desc: TreeDescriptor) -> Tree:
    """Build models ``M_v`` and step maps from a descriptor; validates as it goes."""
    if desc.drop_set:
        raise InvalidTree("trees that drop are not supported")
    m0 = desc.base
    nodes = [plain(0)]
    tree = Tree(nodes, {plain(0): m0}, {}, {}, {})
    for v, step in enumerate(desc.steps):
        extend(tree, plain(v), step.rank, plain(step.tpred), plain(v + 1))
    tree.reindex()
    return tree


def extend(tree: Tree, node: Name, rank: int, pred: Name, new: Name) -> None:
    """Apply the rank-``rank`` extender of ``M_node`` to ``M_pred``, naming the result ``new``."""
    if node != tree.nodes[-1]:
        raise InvalidTree("can only extend at the last node")
    if pred not in tree:
        raise InvalidTree(f"predecessor {fmt(pred)} of {fmt(new)} is not a node")
    owner = tree.models[node]
    if not 0 <= rank < len(owner.descriptors):
        raise InvalidTree(f"node {fmt(node)}: rank {rank} out of range")
    e = owner.descriptors[rank]
    check_step(tree, node, e, pred)
    try:
        m, j = ultrapower(tree.models[pred], e, owner)
    except AgreementFailure as err:
        raise InvalidTree(f"node {fmt(node)}: {err}") from err
    tree.exts[node] = e
    tree.nodes.append(new)
    tree.models[new] = m
    tree.preds[new] = pred
    j.label = f"i[{fmt(pred)},{fmt(new)}]"
    tree.steps[new] = j
    tree._index[new] = len(tree.nodes) - 1


def check_step(tree: Tree, node: Name, e: Ext, pred: Name) -> None:
    """Lengths between the predecessor and ``node`` must reach ``crit(e)``."""
    lo, hi = tree.pos(pred), tree.pos(node)
    if lo > hi:
        raise InvalidTree(f"predecessor {fmt(pred)} comes after {fmt(node)}")
    for xi in tree.nodes[lo:hi]:
        if tree.exts[xi].len < e.crit:
            raise InvalidTree(
                f"node {fmt(node)}: len(E_{fmt(xi)}) < crit(E_{fmt(node)}) with {fmt(pred)} as predecessor")


def validate(tree: Tree) -> list[str]:
    """Violations of the length requirement and of extender ownership."""
    out = []
    for n in tree.ext_nodes():
        e = tree.exts[n]
        if not tree.models[n].has_descriptor(e):
            out.append(f"E_{fmt(n)} not in M_{fmt(n)}")
        p = tree.tpred_of_succ(n)
        if tree.pos(p) > tree.pos(n):
            out.append(f"predecessor of {fmt(tree.succ(n))} is after {fmt(n)}")
            continue
        for xi in tree.nodes[tree.pos(p):tree.pos(n)]:
            if tree.exts[xi].len < e.crit:
                out.append(f"len(E_{fmt(xi)}) < crit(E_{fmt(n)})")
    return out


def backtrack(tree: Tree, n: Name) -> Name:
    """Least node whose extender's length exceeds ``crit(E_n)``."""
    k = tree.crit(n)
    for xi in tree.nodes[: tree.pos(n) + 1]:
        if k < tree.length_of(xi):
            return xi
    raise NoPredecessor(fmt(n))


def tree_order(tree: Tree) -> set[tuple[Name, Name]]:
    """All pairs ``(a, b)`` with ``a`` strictly tree-below ``b``."""
    return {(a, b) for b in tree.nodes for a in tree.ancestors(b)}


def branch_model(tree: Tree, branch: Iterable[Name]) -> Model:
    b = list(branch)
    if not b:
        raise NotABranch("empty branch")
    top = max(b, key=tree.pos)
    if any(not tree.preceq(x, top) for x in b):
        raise NotABranch("nodes are not linearly tree-ordered")
    return tree.models[top]


# --- bad nodes ----------------------------------------------------------------

def bad_for_length(tree: Tree) -> list[Name]:
    nodes = tree.ext_nodes()
    return [v for i, v in enumerate(nodes)
            if any(tree.index_of(g) < tree.index_of(v) for g in nodes[i + 1:])]


def bad_for_length_by_len(tree: Tree) -> list[Name]:
    nodes = tree.ext_nodes()
    return [v for i, v in enumerate(nodes)
            if any(tree.length_of(g) < tree.length_of(v) for g in nodes[i + 1:])]


def is_bad_for_crit(tree: Tree, v: Name) -> bool:
    star = tree.tpred_of_succ(v)
    k = tree.crit(v)
    for s in [star] + tree.ancestors(star):
        if s == tree.root or s not in tree.preds:
            continue
        xi = tree.prev(s)
        rho = tree.length_of(xi)
        if tree.imap(s, star)(rho) > k:
            return True
    return False


def bad_for_crit(tree: Tree) -> list[Name]:
    return [v for v in tree.ext_nodes() if is_bad_for_crit(tree, v)]


def bad_for_crit_by_length(tree: Tree) -> list[Name]:
    """Diagnostic variant: some a < v* with crit(E_v) < len(E_x) on (a, v*]."""
    out = []
    for v in tree.ext_nodes():
        star = tree.tpred_of_succ(v)
        k = tree.crit(v)
        p = tree.pos(star)
        if p > 0 and tree.length_of(star) > k and tree.length_of(tree.nodes[p - 1]) > k:
            out.append(v)
    return out


def deadwood(tree: Tree) -> list[Name]:
    return [v for v, _ in deadwood_witnesses(tree)]


def deadwood_witnesses(tree: Tree) -> list[tuple[Name, Name]]:
    """Pairs (v, least witness g) for deadwood nodes v."""
    nodes = tree.ext_nodes()
    out = []
    for i, v in enumerate(nodes):
        for g in nodes[i + 1:]:
            if not tree.index_of(g) < tree.index_of(v):
                continue
            pv, pg = tree.pos(v), tree.pos(g)
            if not any(pv < tree.pos(tree.preds[x]) <= pg
                       for x in tree.nodes[pg + 1:]):
                out.append((v, g))
                break
    return out


@dataclass
class NormalityReport:
    normal: bool
    witnesses: list[str]


def is_normal(tree: Tree, weak: bool = False) -> NormalityReport:
    bad = bad_for_crit(tree)
    w = [f"node {fmt(v)} bad for critical point" for v in bad]
    if not weak:
        nodes = tree.ext_nodes()
        for a, b in zip(nodes, nodes[1:]):
            if not tree.index_of(a) < tree.index_of(b):
                w.append(f"index(E_{fmt(b)}) not above index(E_{fmt(a)})")
        for v in nodes:
            try:
                least = backtrack(tree, v)
            except NoPredecessor:
                w.append(f"node {fmt(v)} has no legal predecessor")
                continue
            if tree.tpred_of_succ(v) != least:
                w.append(f"predecessor of {fmt(tree.succ(v))} is {fmt(tree.tpred_of_succ(v))},"
                         f" least legal is {fmt(least)}")
    return NormalityReport(not w, w)


# --- deadwood removal ------------------------------------------------------------

@dataclass
class Prune:
    node: int
    witness: int


def remove_deadwood(desc: TreeDescriptor) -> tuple[TreeDescriptor, list[Prune]]:
    """Delete least-deadwood intervals [v, g) until none remain."""
    trace: list[Prune] = []
    while True:
        tree = iterate(desc)
        found = deadwood_witnesses(tree)
        if not found:
            return desc, trace
        v, g = found[0][0][0], found[0][1][0]
        desc = _prune(desc, tree, v, g)
        trace.append(Prune(v, g))


def _prune(desc: TreeDescriptor, tree: Tree, v: int, g: int) -> TreeDescriptor:
    width = g - v
    kept = [plain(x) for x in range(v)] + [plain(x) for x in range(g, desc.length)]
    shift = {x: x for x in range(v + 1)}
    shift.update({x: x - width for x in range(g, desc.length + 1)})
    steps: list[Step] = []
    cur = iterate(TreeDescriptor(desc.base, ()))
    for new_pos, old in enumerate(kept):
        e = tree.exts[old]
        owner = cur.models[plain(new_pos)]
        if not owner.has_descriptor(e):
            raise PruneFailed(f"E_{old[0]} is not available at position {new_pos}")
        old_pred = desc.steps[old[0]].tpred
        if old_pred in shift and shift[old_pred] <= new_pos:
            pred = shift[old_pred]
        else:
            pred = None
            for x in range(new_pos + 1):
                lx = e.len if x == new_pos else cur.exts[plain(x)].len
                if e.crit < lx:
                    pred = x
                    break
            if pred is None:
                raise PruneFailed(f"no predecessor for orphaned E_{old[0]}")
        step = Step(owner.rank_of(e), pred)
        try:
            extend(cur, plain(new_pos), step.rank, plain(pred), plain(new_pos + 1))
        except InvalidTree as err:
            raise PruneFailed(str(err)) from err
        steps.append(step)
    return TreeDescriptor(desc.base, tuple(steps))
