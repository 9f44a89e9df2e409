"""Checkers run over a finished normalization: factorization, stage lemmas, invariants."""
from __future__ import annotations

from itertools import product
from typing import TYPE_CHECKING

from .freemodel import compose, enumerate_elements
from .report import Report
from .seqindex import (InconsistentRegistry, Name, NoWitness, Registry, cut,
                       cut_isomorph_witness, fmt)
from .treecore import Tree, bad_for_crit

if TYPE_CHECKING:
    from .normalize import NormalizationResult


def registry_at(reg: Registry, stage: int) -> Registry:
    """The registry as it stood after ``stage`` stages."""
    marks = reg.markers[:stage]
    return Registry(list(marks), {d: reg.full[d] for d in marks}, list(reg.intervals[:stage]))


# --- factorization -----------------------------------------------------------

def check_factorization(result: "NormalizationResult", depth: int = 1) -> Report:
    rep = Report("factorization")
    for rec in result.stages:
        kappa = rec.e_nu.crit
        for s in rec.before.nodes[rec.before.pos(rec.tau): rec.before.pos(rec.nu_star) + 1]:
            j, k, ie = rec.j[s], rec.k[s], rec.i_e[s]
            where = f"stage {rec.stage}, {fmt(s)}"
            rep.check(not k.problems(), f"{where}: k is not an embedding: {k.problems()[:2]}")
            kie = compose(k, ie)
            rep.check(kie.pmap == j.pmap, f"{where}: k o i^E differs from j on points")
            for x in enumerate_elements(rec.before.models[s], depth):
                rep.check(kie.apply(x) == j.apply(x), f"{where}: k o i^E differs from j at {x!r}")
            if s == rec.tau:
                rep.check(k.is_identity(), f"{where}: k_tau is not the identity")
            if kappa not in ie.pmap:
                rep.check(False, f"{where}: crit(E_nu) is not a point of M_{fmt(s)}")
                continue
            bound = ie(kappa)
            c = k.crit
            rep.check(c is None or c >= bound,
                      f"{where}: crit(k) = {c} below i^E(crit E_nu) = {bound}")
            low = [p for p in rec.before.models[s].points if ie(p) < bound]
            rep.check(all(j(p) == ie(p) for p in low), f"{where}: j and i^E disagree below the image of crit")
    return rep


# --- stage invariants ------------------------------------------------------------

def _same_segment(a: Tree, b: Tree, top: Name) -> bool:
    if top not in a or top not in b:
        return False
    na = a.nodes[: a.pos(top) + 1]
    nb = b.nodes[: b.pos(top) + 1]
    if na != nb:
        return False
    for n in na:
        if a.models[n] != b.models[n] or a.preds.get(n) != b.preds.get(n):
            return False
        if n != top and a.exts[n] != b.exts[n]:
            return False
    return True


def check_invariants(result: "NormalizationResult") -> Report:
    """Segment stability, transport of extenders, commuting squares, progress."""
    rep = Report("stage invariants")
    trees, reg = result.trees, result.registry
    rep.check(not bad_for_crit(result.final_tree), "final tree has nodes bad for critical point")
    rep.check(result.phi <= len(trees[0].ext_nodes()), f"{result.phi} stages exceed the tree length")
    for lam, rec in enumerate(result.stages, start=1):
        top = reg.delta_name(lam)
        for later in trees[lam + 1:]:
            rep.check(_same_segment(trees[lam], later, top),
                      f"segment up to delta_{lam} changed after stage {lam}")
        after = rec.after
        for s in rec.j:
            if s != rec.nu_star:
                rep.check(after.exts[s + (rec.delta,)] == rec.j[s].ext(rec.before.exts[s]),
                          f"stage {lam}: E at {fmt(s + (rec.delta,))} is not the j-image")
        for g, m in rec.tail.items():
            g2 = rec.rename.get(g, g)
            if g in rec.before.exts:
                rep.check(after.exts[g2] == m.ext(rec.before.exts[g]),
                          f"stage {lam}: E at {fmt(g2)} is not the j-image")
        old_delta = (rec.delta,)
        full = rec.rename[old_delta]
        for g in rec.tail:
            if g == old_delta or not rec.before.prec(old_delta, g):
                continue
            left = compose(rec.tail[g], rec.before.imap(old_delta, g))
            right = compose(after.imap(full, g), rec.tail[old_delta])
            rep.check(left.pmap == right.pmap, f"stage {lam}: square at {fmt(g)} does not commute")
        nxt_bad = bad_for_crit(after)
        if nxt_bad:
            # delta itself may be bad again; only the segment strictly below it is normal
            rep.check(after.pos(nxt_bad[0]) >= after.pos(full),
                      f"stage {lam}: next bad node {fmt(nxt_bad[0])} lies below delta_{lam}")
        if lam > 1:
            rep.check(rec.delta > reg.marker(lam - 1), f"stage {lam}: marker does not increase")
        rep.check(after.pos(rec.nu) + 1 == after.pos(min(rec.interval, key=after.pos)),
                  f"stage {lam}: min(I) is not the successor of nu")
    return rep


# --- sequence lemmas -----------------------------------------------------------

def _cuts(name: Name, reg: Registry) -> dict[int, Name | None]:
    return {a: cut(name, a, reg) for a in range(0, reg.stages + 1)}


def _lemma_context(tree: Tree, reg: Registry):
    below = {n: set(tree.ancestors(n)) for n in tree.nodes}
    stage = {n: reg.stage_of(n) for n in tree.nodes}
    cuts = {n: _cuts(n, reg) for n in tree.nodes}
    ivals = {a: set(reg.interval(a)) for a in range(1, reg.stages + 1)}
    return below, stage, cuts, ivals


def check_stage_lemmas(result: "NormalizationResult") -> dict[str, Report]:
    """Quantify the sequence lemmas over every stage tree of ``result``.

    The keys are ``cut_isomorph``, ``extension``, ``pred_extension``,
    ``cut_preserves_prec`` (findings only), ``closing_i``, ``closing_ii``,
    ``closing_iii`` and ``branch_confinement``.
    """
    reps = {k: Report(k) for k in ("cut_isomorph", "extension", "pred_extension",
                                   "cut_preserves_prec", "closing_i", "closing_ii",
                                   "closing_iii", "branch_confinement")}
    t0 = result.trees[0]
    for lam in range(1, result.phi + 1):
        tree = result.trees[lam]
        reg = registry_at(result.registry, lam)
        try:
            ctx = _lemma_context(tree, reg)
        except InconsistentRegistry as err:
            reps["cut_isomorph"].check(False, f"T^{lam}: {err}")
            continue
        _cut_isomorph(reps["cut_isomorph"], tree, reg, ctx, lam)
        _extension(reps["extension"], tree, reg, ctx, lam)
        _pred_extension(reps["pred_extension"], tree, reg, ctx, lam)
        _cut_pres_prec(reps["cut_preserves_prec"], tree, reg, ctx, lam)
        _closing(reps, tree, reg, ctx, lam, t0)
        _confinement(reps["branch_confinement"], tree, reg, ctx, lam, t0)
    return reps


def _cut_isomorph(rep, tree, reg, ctx, lam):
    _, stage, cuts, ivals = ctx
    for s in tree.nodes:
        g = stage[s]
        if g is None:
            continue
        for a in range(1, g):
            if cuts[s][a] not in ivals[a]:
                continue
            try:
                cut_isomorph_witness(s, a, reg, tree.nodes)
                rep.check(True, "")
            except NoWitness as err:
                rep.check(False, f"T^{lam}: {fmt(s)} at stage {a}: {err}")


def _extension(rep, tree, reg, ctx, lam):
    below, stage, cuts, ivals = ctx
    for s in tree.nodes:
        for t in below[s]:
            for a in range(1, reg.stages + 1):
                if t not in ivals[a]:
                    continue
                first = any(cuts[x][a] == reg.delta_name(a) for x in below[s] | {s})
                g = stage[s]
                # g == a is allowed: then the cut is s itself, as the proof's last case gives
                second = g is not None and g >= a and cuts[s][a] in ivals[a]
                rep.check(first or second,
                          f"T^{lam}: {fmt(t)} < {fmt(s)} with {fmt(t)} in I_{a}: neither alternative")


def _pred_extension(rep, tree, reg, ctx, lam):
    _, _, cuts, ivals = ctx
    for s in tree.nodes[1:]:
        p = tree.preds[s]
        for a in range(1, reg.stages + 1):
            if cuts[p][a] in ivals[a] and cuts[p][a] != reg.delta_name(a):
                rep.check(cuts[s][a] in ivals[a],
                          f"T^{lam}: pred {fmt(p)} of {fmt(s)} cuts into I_{a} but {fmt(s)} does not")


def _cut_pres_prec(rep, tree, reg, ctx, lam):
    """As written: s < s', all cuts of [s, s'] in I_a => cut(s') <= cut(s), equality iff
    every s'' with s' < s'' <= s is a minimum of some I_g (vacuous for s < s')."""
    below, _, cuts, ivals = ctx
    mins = {min(iv, key=tree.pos) for iv in ivals.values()}
    for s2 in tree.nodes:
        for s in below[s2]:
            chain = [x for x in below[s2] | {s2} if x == s or s in below[x]]
            for a in range(1, reg.stages + 1):
                if not all(cuts[x][a] in ivals[a] for x in chain):
                    continue
                c1, c2 = cuts[s][a], cuts[s2][a]
                holds = c2 == c1 or c2 in below[c1]
                between = [x for x in tree.nodes if x in below[s] | {s} and s2 in below[x]]
                iff = (c1 == c2) == all(x in mins for x in between)
                rep.checked += 1
                if not (holds and iff):
                    rep.findings.append(
                        f"T^{lam}, a={a}: {fmt(s)} < {fmt(s2)} with cuts {fmt(c1)}, {fmt(c2)}"
                        f" ({'order' if not holds else 'equality clause'} fails)")


def _closing(reps, tree, reg, ctx, lam, t0):
    """Closing propositions.  (i) and (iii) are asserted with a non-strict conclusion;
    failures of the strict form are kept as findings.  (ii) is asserted as written,
    with both cut stages ranging over 1..a."""
    below, _, cuts, ivals = ctx
    r1, r2, r3 = reps["closing_i"], reps["closing_ii"], reps["closing_iii"]
    order0 = {n: set(t0.ancestors(n)) for n in t0.nodes}
    for s1 in tree.nodes:
        for s0 in below[s1]:
            for g in range(1, reg.stages + 1):
                if cuts[s1][g] in ivals[g]:
                    c0, c1 = cuts[s0][g], cuts[s1][g]
                    r1.check(c0 is not None and (c0 == c1 or c0 in below[c1]),
                             f"T^{lam}: {fmt(s0)} < {fmt(s1)} but cuts at {g}: {fmt(c0)}, {fmt(c1)}")
                    if c0 == c1:
                        r1.findings.append(f"T^{lam}: {fmt(s0)} < {fmt(s1)} have equal cuts at {g}")
            a, b = (reg.canonical(s0)[0],), (reg.canonical(s1)[0],)
            r3.check(a == b or a in order0[b],
                     f"T^{lam}: {fmt(s0)} < {fmt(s1)} but {fmt(a)} is not below {fmt(b)} in the first tree")
            if a == b:
                r3.findings.append(f"T^{lam}: {fmt(s0)} < {fmt(s1)} share first entry {fmt(a)}")
    for a in range(1, reg.stages + 1):
        iv = [x for x in reg.interval(a) if x in below]
        for s0, s1, s2 in product(iv, repeat=3):
            for g0, g1 in product(range(1, a + 1), repeat=2):
                c0, c1 = cuts[s0][g0], cuts[s1][g1]
                if c0 is None or c1 not in below:
                    continue
                if c0 in below[c1] and c1 in below[s2]:
                    r2.check(g1 == a, f"T^{lam}: {fmt(s0)}|{g0} < {fmt(s1)}|{g1} < {fmt(s2)} in I_{a}")


def _confinement(rep, tree, reg, ctx, lam, t0):
    """In T^a: s in I_a and s < s' imply s' in I_a or s' is an ordinal node above delta_a in T^0."""
    from .normalize import ordinal_of
    if lam != reg.stages:
        return
    below, _, _, ivals = ctx
    d = reg.marker(lam)
    order0 = {n: set(t0.ancestors(n)) for n in t0.nodes}
    for s2 in tree.nodes:
        for s in below[s2]:
            if s not in ivals[lam] or s2 in ivals[lam]:
                continue
            o = ordinal_of(s2, reg)
            rep.check(o is not None and len(s2) == 1 and (d,) in order0.get((o,), ()),
                      f"T^{lam}: {fmt(s)} in I_{lam} below {fmt(s2)} outside it")
