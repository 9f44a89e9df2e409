"""Tree embeddings ``(sigma, i)``, their derived node maps, and pushed-forward trees.

``sigma`` sends every node of the source tree to a node of the target tree and
``i`` embeds the source base model into the target base model.  The node maps
``i^sigma_v : M_v -> M'_sigma(v)`` are built by recursion along the source
tree: at the root ``i'_{0,sigma(0)} o i``, and at a successor ``v+1``

    [f]_a  ->  i'_{sigma(v)+1, sigma(v+1)}( [i^sigma_{v*}(f)]_{i^sigma_v(a)} ).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .freemodel import AgreementFailure, Embedding, ModelError, compose, induced
from .report import Report
from .seqindex import Name, fmt
from .treecore import InvalidTree, NoPredecessor, Tree, backtrack, extend


class ClauseViolation(ValueError):
    def __init__(self, clause: int, msg: str):
        super().__init__(f"clause {clause}: {msg}")
        self.clause = clause


class BacktrackMismatch(ValueError):
    pass


@dataclass
class TreeEmbedding:
    source: Tree
    target: Tree
    sigma: dict[Name, Name]
    base: Embedding
    derived: dict[Name, Embedding] = field(default_factory=dict)

    def __call__(self, node: Name) -> Embedding:
        return self.derived[node]


def root_map(src: Tree, dst: Tree, sigma: dict[Name, Name], base: Embedding) -> Embedding:
    top = sigma[src.root]
    if base.source != src.models[src.root] or base.target != dst.models[dst.root]:
        raise ModelError("base map does not join the two base models")
    if top == dst.root:
        return base
    return compose(dst.imap(dst.root, top), base)


def derive_step(src: Tree, dst: Tree, sigma: dict[Name, Name], maps: dict[Name, Embedding],
                v: Name) -> Embedding:
    """``i^sigma`` at the successor of ``v``, given the maps at ``v`` and at ``v*``."""
    n = src.succ(v)
    sv = sigma[v]
    e = src.exts[v]
    if maps[v].ext(e) != dst.exts.get(sv):
        raise ClauseViolation(2, f"i^sigma_{fmt(v)}(E_{fmt(v)}) is not E'_{fmt(sv)}")
    nxt = dst.succ(sv)
    if not dst.preceq(nxt, sigma[n]):
        raise ClauseViolation(3, f"{fmt(sv)}+1 is not below sigma({fmt(n)}) = {fmt(sigma[n])}")
    star = src.preds[n]
    if sigma[star] != dst.preds[nxt]:
        raise BacktrackMismatch(
            f"sigma({fmt(star)}) = {fmt(sigma[star])} but the predecessor of {fmt(nxt)} is {fmt(dst.preds[nxt])}")
    try:
        step = induced(src.models[n], dst.models[nxt], maps[star], maps[v], f"i^s[{fmt(n)}]")
    except KeyError as err:
        raise ClauseViolation(4, f"maps at {fmt(star)} and {fmt(v)} disagree at crit: {err}") from err
    if nxt == sigma[n]:
        return step
    return compose(dst.imap(nxt, sigma[n]), step)


def derive_maps(src: Tree, dst: Tree, sigma: dict[Name, Name], base: Embedding,
                check_support: bool = True) -> dict[Name, Embedding]:
    if set(sigma) != set(src.nodes):
        raise ClauseViolation(1, "sigma must be defined on every node")
    if check_support:
        from .supports import is_support
        rng = {sigma[v] for v in src.ext_nodes()}
        if not is_support(dst, rng):
            raise ClauseViolation(1, "range of sigma is not a support")
    maps = {src.root: root_map(src, dst, sigma, base)}
    for v in src.ext_nodes():
        maps[src.succ(v)] = derive_step(src, dst, sigma, maps, v)
    return maps


def make_embedding(src: Tree, dst: Tree, sigma: dict[Name, Name], base: Embedding) -> TreeEmbedding:
    emb = TreeEmbedding(src, dst, dict(sigma), base)
    emb.derived = derive_maps(src, dst, emb.sigma, base)
    return emb


def identity_embedding(tree: Tree) -> TreeEmbedding:
    from .freemodel import identity
    return make_embedding(tree, tree, {n: n for n in tree.nodes}, identity(tree.models[tree.root]))


def verify_tree_embedding(emb: TreeEmbedding) -> Report:
    """Predecessor preservation, agreement, embedding validity and naturality."""
    rep = Report("tree embedding")
    src, dst, sigma, maps = emb.source, emb.target, emb.sigma, emb.derived
    for v in src.ext_nodes():
        nxt = dst.succ(sigma[v])
        rep.check(sigma[src.tpred_of_succ(v)] == dst.preds[nxt],
                  f"(1) sigma(pred({fmt(src.succ(v))})) != pred({fmt(nxt)})")
        try:
            if sigma[backtrack(src, v)] != backtrack(dst, sigma[v]):
                rep.findings.append(f"backtrack of {fmt(v)} not preserved (least-legal form)")
        except (NoPredecessor, KeyError):
            rep.findings.append(f"backtrack of {fmt(v)} undefined")
    for i, a in enumerate(src.ext_nodes()):
        rho = src.length_of(a)
        ma = maps[a]
        for b in src.nodes[i + 1:]:
            mb = maps[b]
            low = [p for p in src.models[a].points if p < rho and p in src.models[b]]
            rep.check(all(ma(p) == mb(p) for p in low),
                      f"(3) i^s_{fmt(a)} and i^s_{fmt(b)} disagree below len(E_{fmt(a)})")
            if rho in src.models[b]:
                rep.check(mb(rho) >= ma(rho), f"(3) i^s_{fmt(b)}(len E_{fmt(a)}) below i^s_{fmt(a)}")
    for n in src.nodes:
        m = maps[n]
        ok = m.source == src.models[n] and m.target == dst.models[sigma[n]]
        rep.check(ok and not m.problems(), f"(4) i^s_{fmt(n)} is not an embedding M_{fmt(n)} -> M'_{fmt(sigma[n])}")
    for b in src.nodes:
        for a in src.ancestors(b):
            if not dst.preceq(sigma[a], sigma[b]):
                rep.check(False, f"naturality: sigma({fmt(a)}) not below sigma({fmt(b)})")
                continue
            left = compose(maps[b], src.imap(a, b))
            right = compose(dst.imap(sigma[a], sigma[b]), maps[a])
            rep.check(left.pmap == right.pmap, f"naturality fails for {fmt(a)} < {fmt(b)}")
    return rep


def compose_embeddings(outer: TreeEmbedding, inner: TreeEmbedding) -> TreeEmbedding:
    """``(sigma o sigma^, i o i^)``; derived maps are recomputed, not composed."""
    if inner.target is not outer.source:
        raise ModelError("tree embeddings do not compose")
    sigma = {n: outer.sigma[inner.sigma[n]] for n in inner.source.nodes}
    return make_embedding(inner.source, outer.target, sigma, compose(outer.base, inner.base))


def push_tree(tree: Tree, base: Embedding) -> tuple[Tree, TreeEmbedding]:
    """Copy ``tree`` along ``base``: node ``v`` uses ``i^sigma_v(E_v)`` with the same predecessors."""
    root = tree.root
    if base.source != tree.models[root]:
        raise ModelError("base map does not start at the root model")
    new = Tree([root], {root: base.target}, {}, {}, {})
    sigma = {n: n for n in tree.nodes}
    maps = {root: base}
    for v in tree.ext_nodes():
        e = maps[v].ext(tree.exts[v])
        owner = new.models[v]
        if not owner.has_descriptor(e):
            raise InvalidTree(f"node {fmt(v)}: image extender is not on the copied model")
        try:
            extend(new, v, owner.rank_of(e), tree.tpred_of_succ(v), tree.succ(v))
        except AgreementFailure as err:
            raise InvalidTree(f"node {fmt(v)}: {err}") from err
        maps[tree.succ(v)] = derive_step(tree, new, sigma, maps, v)
    new.reindex()
    emb = TreeEmbedding(tree, new, sigma, base, maps)
    return new, emb


def push_along_main_branch(tree: Tree) -> tuple[Tree, TreeEmbedding]:
    """``i[T]`` for ``i = i_{0,last}``, the map into the final model."""
    return push_tree(tree, tree.imap(tree.root, tree.last))
