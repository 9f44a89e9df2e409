"""Supports of elements, support-induced subtrees, and finite-support recovery.

A support is a set ``y`` of extender nodes closed under tree predecessors
(``pred(v+1)`` is in ``y`` for ``v`` in ``y``) such that every ``E_v`` with
``v`` in ``y`` is built from extenders with nodes in ``y`` below ``v``.  Points
have a unique provenance in the free semantics, so "``y`` supports ``x``" means
that the provenance support of ``x`` is contained in ``y``.

A support is *embeddable* when, in addition, ``u+1`` lies tree-below-or-equal
``w`` for consecutive members ``u < w``; only then does the induced subtree map
into the tree.  :func:`close` always produces embeddable supports.
"""
from __future__ import annotations

from dataclasses import dataclass

from .freemodel import (AgreementFailure, App, Atom, Element, Ext, Ord, Term,
                        WrongModel, enumerate_elements)
from .report import Report
from .seqindex import Name, fmt
from .treecore import InvalidTree, Tree, extend
from .treeembed import (BacktrackMismatch, ClauseViolation, TreeEmbedding,
                        derive_step, root_map, verify_tree_embedding)


class NotASupport(ValueError):
    pass


def _point_support(tree: Tree, node: Name, p, memo: dict) -> frozenset[Name]:
    key = (node, p)
    if key in memo:
        return memo[key]
    m = tree.models[node]
    if p not in m:
        raise WrongModel(f"{p} is not a point of M_{fmt(node)}")
    if node == tree.root:
        out = frozenset()
    else:
        kind, q = m.provenance[p]
        v = tree.prev(node)
        if kind == "img":
            out = _point_support(tree, tree.preds[node], q, memo)
        elif q < m.ext.crit and q in tree.models[tree.preds[node]]:
            # below the critical point the point is shared with the base model
            out = _point_support(tree, tree.preds[node], q, memo)
        else:
            out = frozenset({v}) | _point_support(tree, v, q, memo)
    memo[key] = out
    return out


def _raw_support(tree: Tree, node: Name, x: Element, memo: dict) -> frozenset[Name]:
    if isinstance(x, Atom):
        return frozenset()
    if isinstance(x, Ord):
        return _point_support(tree, node, x.point, memo)
    if isinstance(x, Ext):
        out = frozenset()
        for p in (x.crit, x.len, x.index):
            out |= _point_support(tree, node, p, memo)
        return out
    if isinstance(x, Term):
        m = tree.models[node]
        if node == tree.root or x.model != m.digest:
            raise WrongModel(f"term does not belong to M_{fmt(node)}")
        v = tree.prev(node)
        out = frozenset({v})
        for a in x.args:
            out |= _point_support(tree, v, a, memo)
        return out | _raw_support(tree, tree.preds[node], x.fn.arg, memo)
    if isinstance(x, App):
        out = _raw_support(tree, node, x.fn.arg, memo)
        for a in x.args:
            out |= _point_support(tree, node, a, memo)
        return out
    raise WrongModel(f"not an element: {x!r}")


def _branch_gap(tree: Tree, y) -> Name | None:
    ys = sorted(y, key=tree.pos)
    for u, w in zip(ys, ys[1:]):
        if not tree.preceq(tree.succ(u), w):
            return tree.succ(u)
    return None


def close(tree: Tree, y, memo: dict | None = None) -> frozenset[Name]:
    """Smallest superset of ``y`` closed under predecessors, extender supports and
    the branch condition (gaps are filled from below)."""
    memo = {} if memo is None else memo
    out = set(y)
    todo = list(out)
    while True:
        while todo:
            v = todo.pop()
            extra = {tree.tpred_of_succ(v)} | _raw_support(tree, v, tree.exts[v], memo)
            for w in extra - out:
                out.add(w)
                todo.append(w)
        gap = _branch_gap(tree, out)
        if gap is None:
            return frozenset(out)
        out.add(gap)
        todo.append(gap)


def support_of(tree: Tree, node: Name, x: Element, memo: dict | None = None) -> frozenset[Name]:
    memo = {} if memo is None else memo
    return close(tree, _raw_support(tree, node, x, memo), memo)


def is_support(tree: Tree, y) -> bool:
    y = frozenset(y)
    ext = set(tree.ext_nodes())
    if not y <= ext:
        return False
    memo: dict = {}
    for v in y:
        if tree.tpred_of_succ(v) not in y:
            return False
        need = _raw_support(tree, v, tree.exts[v], memo)
        if not need <= {w for w in y if tree.pos(w) < tree.pos(v)}:
            return False
    return True


def is_embeddable(tree: Tree, y) -> bool:
    return is_support(tree, y) and _branch_gap(tree, y) is None


def subtree_embedding(tree: Tree, y, top: Name | None = None) -> tuple[Tree, TreeEmbedding]:
    """The tree ``T_y`` using the extenders at ``y`` (pulled back), with ``(sigma, id)``.

    Nodes of ``T_y`` are ``0..m`` for ``m = |y|``; ``sigma(k)`` is the k-th member
    of ``y`` and ``sigma(m)`` is ``top`` (default: the successor of the last member).
    """
    from .freemodel import identity
    from .seqindex import plain
    if not is_embeddable(tree, y):
        raise NotASupport(f"{sorted(map(fmt, y))} is not an embeddable support")
    ys = sorted(y, key=tree.pos)
    m = len(ys)
    sigma = {plain(k): v for k, v in enumerate(ys)}
    if top is None:
        top = tree.succ(ys[-1]) if ys else tree.root
    sigma[plain(m)] = top
    inv = {v: plain(k) for k, v in enumerate(ys)}
    root = plain(0)
    m0 = tree.models[tree.root]
    sub = Tree([root], {root: m0}, {}, {}, {})
    base = identity(m0)
    maps = {root: root_map(sub, tree, sigma, base)}
    for k in range(m):
        v = ys[k]
        e = maps[plain(k)].preimage(tree.exts[v])
        if e is None:
            raise NotASupport(f"E_{fmt(v)} is not in the range of i^sigma_{k}")
        pred = inv.get(tree.tpred_of_succ(v))
        if pred is None:
            raise NotASupport(f"predecessor of {fmt(tree.succ(v))} is missing")
        owner = sub.models[plain(k)]
        try:
            extend(sub, plain(k), owner.rank_of(e), pred, plain(k + 1))
        except (InvalidTree, AgreementFailure) as err:
            raise NotASupport(f"pulled-back tree is invalid at {k}: {err}") from err
        maps[plain(k + 1)] = derive_step(sub, tree, sigma, maps, plain(k))
    sub.reindex()
    return sub, TreeEmbedding(sub, tree, sigma, base, maps)


@dataclass
class Recovery:
    node: Name
    element: Element
    support: frozenset[Name]
    preimage: Element | None


def recover(tree: Tree, node: Name, x: Element, memo: dict | None = None) -> Recovery:
    y = support_of(tree, node, x, memo)
    sub, emb = subtree_embedding(tree, y, top=node)
    return Recovery(node, x, y, emb.derived[sub.last].preimage(x))


def finite_support_theorem(tree: Tree, depth: int = 2, width: int = 2, nodes=None) -> Report:
    """Every enumerated element has a support and is recovered through its subtree."""
    rep = Report("finite support")
    memo: dict = {}
    cache: dict = {}
    for node in tree.nodes if nodes is None else nodes:
        for x in enumerate_elements(tree.models[node], depth, width):
            where = f"{x!r} at {fmt(node)}"
            try:
                y = support_of(tree, node, x, memo)
            except WrongModel as err:
                rep.check(False, f"{where}: {err}")
                continue
            key = (y, node)
            if key not in cache:
                ok = is_embeddable(tree, y)
                try:
                    sub, emb = subtree_embedding(tree, y, top=node)
                    cache[key] = (ok, emb.derived[sub.last], None)
                except (NotASupport, ClauseViolation, BacktrackMismatch) as err:
                    cache[key] = (ok, None, str(err))
            ok, final, err = cache[key]
            rep.check(ok, f"{where}: support {sorted(map(fmt, y))} fails closure")
            if final is None:
                rep.check(False, f"{where}: {err}")
                continue
            pre = final.preimage(x)
            rep.check(pre is not None and final.apply(pre) == x, f"{where}: not recovered")
    return rep


def support_embedding_report(tree: Tree, y) -> Report:
    _, emb = subtree_embedding(tree, y)
    return verify_tree_embedding(emb)


def union_closed(tree: Tree, a, b) -> bool:
    return is_support(tree, frozenset(a) | frozenset(b))
