"""Command line interface: ``itc check|normalize|support|embed|selftest``.

Exit codes: 0 success, 1 a checked property failed, 2 invalid input.
Output is deterministic; nothing time-dependent is printed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import dot
from .generate import corpus
from .normalize import NormalizationError, check_factorization, check_stage_lemmas, normalize
from .properties import run_properties, tree_report
from .seqindex import fmt, parse_name
from .supports import NotASupport, finite_support_theorem, is_embeddable, support_of, subtree_embedding
from .treecore import (PruneFailed, TreeError, bad_for_crit, bad_for_length, deadwood,
                       is_normal, iterate, remove_deadwood)
from .treeembed import (BacktrackMismatch, ClauseViolation, identity_embedding,
                        push_along_main_branch, verify_tree_embedding)
from .treefile import TreeFileError, dump, from_descriptor, load

OK, VIOLATION, BAD_INPUT = 0, 1, 2


def term_depth() -> int:
    raw = os.environ.get("ITC_TERM_DEPTH", "3")
    try:
        return max(0, int(raw))
    except ValueError:
        return 3


def _names(nodes) -> str:
    return "{" + ", ".join(fmt(n) for n in nodes) + "}"


def _load_tree(path: str):
    tf = load(path)
    desc = tf.to_descriptor()
    return desc, iterate(desc)


def cmd_check(args) -> int:
    desc, tree = _load_tree(args.file)
    strict, weak = is_normal(tree), is_normal(tree, weak=True)
    print(f"nodes: {len(tree.nodes)}")
    print(f"normal: {str(strict.normal).lower()}")
    for w in strict.witnesses:
        print(f"  {w}")
    print(f"weakly normal: {str(weak.normal).lower()}")
    print(f"bad_for_length = {_names(bad_for_length(tree))}")
    print(f"bad_for_crit = {_names(bad_for_crit(tree))}")
    print(f"deadwood = {_names(deadwood(tree))}")
    rep = tree_report(desc)
    print(rep.line())
    for v in rep.violations:
        print(f"  {v}")
    return OK if rep.ok else VIOLATION


def cmd_normalize(args) -> int:
    desc, _ = _load_tree(args.file)
    try:
        desc, trace = remove_deadwood(desc)
    except PruneFailed as err:
        print(f"deadwood removal failed: {err}")
        return VIOLATION
    for p in trace:
        print(f"pruned [{p.node}, {p.witness})")
    res = normalize(iterate(desc))
    final = res.final_tree
    print(f"stages: {res.phi}")
    if args.emit_stages:
        for rec in res.stages:
            print(json.dumps(rec.trace(), sort_keys=True))
    print(f"domain: {_names(final.nodes)}")
    for n in final.nodes[1:]:
        print(f"  pred({fmt(n)}) = {fmt(final.preds[n])}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot.normalization_dot(res))
    reports = [check_factorization(res), *check_stage_lemmas(res).values()]
    for rep in reports:
        print(rep.line())
    return OK if all(r.ok for r in reports) else VIOLATION


def cmd_support(args) -> int:
    _, tree = _load_tree(args.file)
    memo: dict = {}
    for v in tree.ext_nodes():
        print(f"E_{fmt(v)}: support {_names(sorted(support_of(tree, v, tree.exts[v], memo), key=tree.pos))}")
    if args.node is None:
        return OK
    node = parse_name(args.node)
    if node not in tree.models:
        print(f"no node {args.node}")
        return BAD_INPUT
    rep = finite_support_theorem(tree, term_depth(), nodes=[node])
    print(rep.line())
    for v in rep.violations:
        print(f"  {v}")
    return OK if rep.ok else VIOLATION


def cmd_embed(args) -> int:
    _, tree = _load_tree(args.file)
    if args.support is not None:
        y = frozenset(parse_name(s) for s in args.support.split(",") if s.strip())
        if not is_embeddable(tree, y):
            print(f"{_names(sorted(y))} is not an embeddable support")
            return BAD_INPUT
        _, emb = subtree_embedding(tree, y)
    elif args.identity:
        emb = identity_embedding(tree)
    else:
        _, emb = push_along_main_branch(tree)
    for n in emb.source.nodes:
        print(f"sigma({fmt(n)}) = {fmt(emb.sigma[n])}")
    rep = verify_tree_embedding(emb)
    print(rep.line())
    for v in rep.violations:
        print(f"  {v}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot.embedding_dot(emb))
    return OK if rep.ok else VIOLATION


def cmd_selftest(args) -> int:
    depth = term_depth()
    trees = corpus(args.seed, args.corpus_size, args.max_len)
    print(f"selftest: seed={args.seed} size={args.corpus_size} max_len={args.max_len} depth={depth}")
    totals: dict[str, list[int]] = {}
    worst = None
    for i, desc in enumerate(trees):
        for name, rep in run_properties(desc, depth).items():
            t = totals.setdefault(name, [0, 0, 0, 0])
            t[0] += rep.ok
            t[1] += rep.checked
            t[2] += len(rep.violations)
            t[3] += len(rep.findings)
            if not rep.ok and (worst is None or desc.length < worst[0].length):
                worst = (desc, i, name)
    for name, (passed, checked, bad, found) in totals.items():
        status = "ok" if bad == 0 else "FAIL"
        print(f"{name}: {status} {passed}/{len(trees)} trees ({checked} checks, {bad} violations, {found} findings)")
    failing = sum(1 for t in totals.values() if t[2])
    if worst is None:
        print("result: ok")
        return OK
    desc, i, name = worst
    dump(from_descriptor(desc), args.reproducer)
    print(f"result: FAIL ({failing} failing)")
    print(f"reproducer: tree {i} ({name}) written to {args.reproducer}")
    return VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="itc", description="Iteration tree checks and normalization.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate a tree file and report normality")
    c.add_argument("file")
    c.set_defaults(run=cmd_check)

    n = sub.add_parser("normalize", help="remove deadwood, then normalize")
    n.add_argument("file")
    n.add_argument("--emit-stages", action="store_true", help="print one JSON line per stage")
    n.add_argument("--dot", metavar="PATH", help="write the stage diagram as DOT")
    n.set_defaults(run=cmd_normalize)

    s = sub.add_parser("support", help="supports of extenders and elements")
    s.add_argument("file")
    s.add_argument("--node", help="also check support recovery for every element of M_NODE")
    s.set_defaults(run=cmd_support)

    e = sub.add_parser("embed", help="build and verify a tree embedding")
    e.add_argument("file")
    g = e.add_mutually_exclusive_group()
    g.add_argument("--support", metavar="NODES", help="comma separated support, e.g. 0,1")
    g.add_argument("--identity", action="store_true")
    e.add_argument("--dot", metavar="PATH")
    e.set_defaults(run=cmd_embed)

    t = sub.add_parser("selftest", help="run the property suite on a random corpus")
    t.add_argument("--corpus-size", type=int, default=100)
    t.add_argument("--max-len", type=int, default=7)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--reproducer", default="selftest_reproducer.json", metavar="PATH")
    t.set_defaults(run=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (TreeFileError, TreeError, OSError) as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return BAD_INPUT
    except (NotASupport, ClauseViolation, BacktrackMismatch, NormalizationError) as err:
        print(f"property violation: {err}")
        return VIOLATION


if __name__ == "__main__":
    sys.exit(main())
