"""The per-tree property suite shared by the self-test command and the test suite."""
from __future__ import annotations

from itertools import combinations

from .freemodel import compose, embedding_problems
from .normalize import (NormalizationError, check_factorization, check_invariants,
                        check_stage_lemmas, normalize)
from .report import Report
from .seqindex import fmt
from .supports import (NotASupport, finite_support_theorem, is_embeddable, is_support,
                       subtree_embedding)
from .treecore import (NoPredecessor, PruneFailed, TreeDescriptor, TreeError, backtrack,
                       bad_for_crit, bad_for_crit_by_length, bad_for_length,
                       bad_for_length_by_len, deadwood, is_normal, iterate,
                       remove_deadwood, validate)
from .treeembed import (BacktrackMismatch, ClauseViolation, identity_embedding,
                        push_along_main_branch, verify_tree_embedding)


def tree_report(desc: TreeDescriptor) -> Report:
    rep = Report("tree")
    tree = iterate(desc)
    rep.check(not validate(tree), f"validate: {validate(tree)[:2]}")
    bad = bad_for_crit(tree)
    rep.check(bool(bad) or is_normal(tree, weak=True).normal, "no bad nodes but not weakly normal")
    for n in tree.nodes[1:]:
        step = tree.steps[n]
        rep.check(not embedding_problems(step, inflationary=True), f"step map at {fmt(n)} is defective")
    for c in tree.nodes:
        anc = tree.ancestors(c)
        for a, b in combinations(sorted(anc, key=tree.pos), 2):
            if tree.prec(a, b):
                left = tree.imap(a, c).pmap
                right = compose(tree.imap(b, c), tree.imap(a, b)).pmap
                rep.check(left == right, f"i_{fmt(a)},{fmt(c)} does not factor through {fmt(b)}")
    if bad_for_length(tree) != bad_for_length_by_len(tree):
        rep.findings.append("bad for length: index and len versions differ")
    if bad != bad_for_crit_by_length(tree):
        rep.findings.append("bad for critical point: length-only variant differs")
    for v in tree.ext_nodes():
        try:
            if tree.tpred_of_succ(v) != backtrack(tree, v) and v not in bad:
                rep.findings.append(f"predecessor of {fmt(tree.succ(v))} is not least legal, yet not bad")
        except NoPredecessor:
            rep.check(False, f"node {fmt(v)} has no legal predecessor")
    return rep


def deadwood_report(desc: TreeDescriptor) -> Report:
    rep = Report("deadwood")
    try:
        out, trace = remove_deadwood(desc)
    except PruneFailed as err:
        rep.check(False, f"prune failed: {err}")
        return rep
    try:
        pruned = iterate(out)
    except TreeError as err:
        rep.check(False, f"pruned tree invalid: {err}")
        return rep
    rep.check(not validate(pruned), "pruned tree fails validation")
    rep.check(not deadwood(pruned), "pruned tree still has deadwood")
    # follow each surviving position through the prunes
    orig = iterate(desc)
    survivors = list(range(desc.length))
    for p in trace:
        survivors = survivors[:p.node] + survivors[p.witness:]
    rep.check(len(survivors) == out.length, "survivor count does not match the pruned length")
    for new_pos, old in enumerate(survivors):
        rep.check(pruned.exts[(new_pos,)] == orig.exts[(old,)],
                  f"extender at old position {old} changed")
    return rep


def embedding_reports(desc: TreeDescriptor) -> dict[str, Report]:
    tree = iterate(desc)
    out = {}
    out["embed_identity"] = verify_tree_embedding(identity_embedding(tree))
    out["embed_identity"].name = "embed identity"
    try:
        _, emb = push_along_main_branch(tree)
        out["embed_push"] = verify_tree_embedding(emb)
    except (TreeError, ClauseViolation, BacktrackMismatch) as err:
        out["embed_push"] = Report("push", 1, [str(err)])
    out["embed_push"].name = "embed push"
    sup = Report("embed support")
    unions = Report("support unions")
    # the support theorem is about trees whose predecessors are the least legal ones
    least = all(tree.tpred_of_succ(v) == backtrack(tree, v) for v in tree.ext_nodes())
    nodes = tree.ext_nodes()
    supports = [frozenset(c) for r in range(len(nodes) + 1)
                for c in combinations(nodes, r) if is_support(tree, c)]
    for y in supports:
        if not is_embeddable(tree, y):
            continue
        where = f"support {sorted(map(fmt, y))}"
        try:
            _, emb = subtree_embedding(tree, y)
            r = verify_tree_embedding(emb)
            sup.checked += r.checked
            bad = [f"{where}: {m}" for m in r.violations]
        except (NotASupport, ClauseViolation, BacktrackMismatch) as err:
            sup.checked += 1
            bad = [f"{where}: {err}"]
        if least:
            sup.violations += bad
        else:
            sup.findings += [f"non-least predecessors, {m}" for m in bad]
    known = set(supports)
    for a, b in combinations(supports, 2):
        unions.check(a | b in known, f"union of {sorted(map(fmt, a))} and {sorted(map(fmt, b))}")
    out["embed_support"] = sup
    out["support_unions"] = unions
    return out


def normalization_reports(desc: TreeDescriptor) -> dict[str, Report]:
    tree = iterate(desc)
    rep = Report("normalize")
    try:
        res = normalize(tree)
    except NormalizationError as err:
        rep.check(False, str(err))
        return {"normalize": rep}
    rep.check(res.phi <= len(tree.ext_nodes()), f"{res.phi} stages for length {len(tree.ext_nodes())}")
    report = is_normal(res.final_tree, weak=True)
    rep.check(report.normal, f"final tree not weakly normal: {report.witnesses[:2]}")
    out = {"normalize": rep, "factorization": check_factorization(res),
           "invariants": check_invariants(res)}
    out.update(check_stage_lemmas(res))
    return out


def run_properties(desc: TreeDescriptor, depth: int = 2) -> dict[str, Report]:
    out = {"tree": tree_report(desc), "deadwood": deadwood_report(desc)}
    out.update(normalization_reports(desc))
    out.update(embedding_reports(desc))
    out["finite_support"] = finite_support_theorem(iterate(desc), depth)
    return out
