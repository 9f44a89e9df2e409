"""Graphviz DOT text for trees, tree embeddings and normalization runs.

Solid edges are tree-predecessor steps ``i_{pred(v), v}``; dashed edges are
the maps between trees (``i^sigma`` for embeddings, ``j`` for normalization).
"""
from __future__ import annotations

from .seqindex import fmt
from .treecore import Tree


def _q(s: str) -> str:
    return '"' + s.replace('"', r'\"') + '"'


def _tree_lines(tree: Tree, prefix: str, label: str) -> list[str]:
    out = [f"  subgraph {_q('cluster_' + prefix)} {{", f"    label={_q(label)};"]
    for n in tree.nodes:
        out.append(f"    {_q(prefix + fmt(n))} [label={_q(fmt(n))}];")
    for n in tree.nodes[1:]:
        out.append(f"    {_q(prefix + fmt(tree.preds[n]))} -> {_q(prefix + fmt(n))};")
    out.append("  }")
    return out


def tree_dot(tree: Tree, name: str = "T") -> str:
    lines = ["digraph tree {", "  rankdir=LR;"] + _tree_lines(tree, name + ":", name) + ["}"]
    return "\n".join(lines) + "\n"


def embedding_dot(emb) -> str:
    lines = ["digraph embedding {", "  rankdir=LR;"]
    lines += _tree_lines(emb.source, "S:", "source")
    lines += _tree_lines(emb.target, "T:", "target")
    for n in emb.source.nodes:
        lines.append(f"  {_q('S:' + fmt(n))} -> {_q('T:' + fmt(emb.sigma[n]))} [style=dashed];")
    return "\n".join(lines + ["}"]) + "\n"


def normalization_dot(result) -> str:
    lines = ["digraph normalization {", "  rankdir=LR;"]
    for lam, tree in enumerate(result.trees):
        lines += _tree_lines(tree, f"T{lam}:", f"T^{lam}")
    for lam, rec in enumerate(result.stages):
        a, b = f"T{lam}:", f"T{lam + 1}:"
        for s in rec.j:
            lines.append(f"  {_q(a + fmt(s))} -> {_q(b + fmt(s + (rec.delta,)))} [style=dashed, label=j];")
        for g in rec.tail:
            g2 = rec.rename.get(g, g)
            lines.append(f"  {_q(a + fmt(g))} -> {_q(b + fmt(g2))} [style=dashed, label=j];")
    return "\n".join(lines + ["}"]) + "\n"
