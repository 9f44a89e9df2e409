"""Normalization of finite drop-free trees by successive correction stages.

Each stage takes the least node ``v`` of the current tree that is bad for
critical point, sets ``delta = v+1`` and inserts the interval
``I = {s^<delta> : tau <= s <= v*}`` whose models are built by the maps
``j_{s, s^<delta>}``.  The old ``delta`` node is renamed to its fully
extended index ``v*^<delta>`` and everything above it is re-seated along the
maps ``j^{l,l+1}``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .freemodel import (AgreementFailure, Embedding, Ext, Fn, ModelError, Term, App,
                        compose, identity, induced, ultrapower, Model)
from .seqindex import Name, Registry, fmt
from .treecore import Tree, is_bad_for_crit

log = logging.getLogger(__name__)


class NormalizationError(RuntimeError):
    pass


class NoTau(NormalizationError):
    pass


class StageInvariantViolation(NormalizationError):
    pass


@dataclass
class StageRecord:
    stage: int
    delta: int
    nu: Name
    nu_star: Name
    tau: Name
    interval: tuple[Name, ...]
    preds: dict[Name, Name]
    cases: dict[Name, str]
    exts: dict[Name, Ext]
    j: dict[Name, Embedding]          # s -> j_{s, s^<delta>}
    k: dict[Name, Embedding]          # s -> k_s : ult(M_s, E_nu) -> M_{s^<delta>}
    i_e: dict[Name, Embedding]        # s -> i^{E_nu} : M_s -> ult(M_s, E_nu)
    tail: dict[Name, Embedding]       # gamma >= delta -> j^{l,l+1}_gamma (names in T^l)
    before: Tree
    after: Tree
    rename: dict[Name, Name] = field(default_factory=dict)

    @property
    def e_nu(self) -> Ext:
        return self.before.exts[self.nu]

    def trace(self) -> dict:
        return {
            "stage": self.stage,
            "delta": self.delta,
            "nu": fmt(self.nu),
            "nu_star": fmt(self.nu_star),
            "tau": fmt(self.tau),
            "I": [fmt(n) for n in self.interval],
            "preds": {fmt(a): fmt(b) for a, b in self.preds.items()},
            "cases": {fmt(a): c for a, c in self.cases.items()},
            "extenders": {fmt(a): [list(p) for p in e.facts()] for a, e in self.exts.items()},
        }


@dataclass
class NormalizationResult:
    trees: list[Tree]
    stages: list[StageRecord]
    registry: Registry

    @property
    def final_tree(self) -> Tree:
        return self.trees[-1]

    @property
    def phi(self) -> int:
        return len(self.stages)

    @property
    def markers(self) -> list[int]:
        return list(self.registry.markers)

    def j_bundle(self) -> dict[int, Embedding]:
        """Composite ``j^{0,phi}_g`` for every ordinal node ``g`` of the first tree."""
        out = {}
        t0 = self.trees[0]
        for n in t0.nodes:
            g = n[0]
            name = n
            maps = []
            for rec in self.stages:
                m = rec.tail.get(name)
                if m is None:
                    m = identity(rec.before.models[name])
                maps.append(m)
                name = rec.rename.get(name, name)
            out[g] = compose(*reversed(maps)) if maps else identity(t0.models[n])
        return out


def ordinal_of(name: Name, reg: Registry) -> int | None:
    """The first-tree ordinal a node stands for, or None for a pure interval node."""
    if len(name) == 1:
        return name[0]
    if reg.full.get(name[-1]) == name:
        return name[-1]
    return None


def find_bad(tree: Tree, reg: Registry | None = None) -> Name | None:
    for v in tree.ext_nodes():
        if is_bad_for_crit(tree, v):
            if reg is not None and reg.stages:
                o = ordinal_of(v, reg)
                if o is None or o < reg.markers[-1]:
                    raise StageInvariantViolation(
                        f"least bad node {fmt(v)} lies below delta_{reg.stages}")
            return v
    return None


def choose_tau(tree: Tree, nu: Name, nu_star: Name) -> Name:
    k = tree.crit(nu)
    p = tree.pos(nu_star)
    q = p
    while q > 0 and tree.length_of(tree.nodes[q - 1]) > k:
        q -= 1
    if q == p:
        raise NoTau(f"no interval below {fmt(nu_star)} with lengths above crit(E_{fmt(nu)})")
    return tree.nodes[q]


def _k_map(aux: Model, target: Model, j: Embedding, label: str) -> Embedding:
    pm = {}
    for p in aux.points:
        kind, q = aux.provenance[p]
        pm[p] = q if kind == "gen" else j.pmap[q]

    def rule(t: Term):
        arg = j.apply(t.fn.arg)
        if t.fn.kind == "const":
            return arg
        return App(Fn(t.fn.kind, arg), t.args)

    return Embedding(aux, target, pm, rule, label)


def stage_successor(tree: Tree, reg: Registry, nu: Name | None = None) -> tuple[Tree, StageRecord]:
    """Correct the least bad node of ``tree``; ``reg`` is extended in place."""
    if nu is None:
        nu = find_bad(tree, reg)
        if nu is None:
            raise NormalizationError("tree is already weakly normal")
    o = ordinal_of(nu, reg)
    if o is None:
        raise StageInvariantViolation(f"bad node {fmt(nu)} is an interval node")
    delta = o + 1
    old_delta = (delta,)
    if tree.succ(nu) != old_delta:
        raise StageInvariantViolation(f"successor of {fmt(nu)} is not {delta}")
    nu_star = tree.preds[old_delta]
    tau = choose_tau(tree, nu, nu_star)
    e_nu = tree.exts[nu]
    kappa = e_nu.crit
    lo, hi = tree.pos(tau), tree.pos(nu_star)
    span = tree.nodes[lo:hi + 1]
    full = nu_star + (delta,)
    names = [s + (delta,) for s in span]
    stage = reg.add_stage(delta, full, names)
    rename = {old_delta: full}

    def rn(n: Name) -> Name:
        return rename.get(n, n)

    head = tree.nodes[: tree.pos(nu) + 1]
    tail = tree.nodes[tree.pos(old_delta) + 1:]
    nodes = head + names + tail
    models = {n: tree.models[n] for n in head}
    exts = {n: tree.exts[n] for n in head}
    preds = {n: tree.preds[n] for n in head if n in tree.preds}
    steps = {n: tree.steps[n] for n in head if n in tree.steps}

    owner_nu = tree.models[nu]
    j: dict[Name, Embedding] = {}
    k: dict[Name, Embedding] = {}
    i_e: dict[Name, Embedding] = {}
    cases: dict[Name, str] = {}
    new_preds: dict[Name, Name] = {}
    new_exts: dict[Name, Ext] = {}

    try:
        for s in span:
            aux, ie = ultrapower(tree.models[s], e_nu, owner_nu)
            ie.label = f"iE[{fmt(s)}]"
            i_e[s] = ie
            name = s + (delta,)
            if s == tau:
                models[name] = aux
                steps[name] = ie
                new_preds[name] = tau
                cases[name] = "min"
                j[s] = ie
            else:
                sp = tree.prev(s)
                ep = j[sp].ext(tree.exts[sp])
                exts[sp + (delta,)] = ep
                new_exts[sp + (delta,)] = ep
                s_star = tree.preds[s]
                if tree.crit(sp) < kappa:
                    pred = s_star
                    base = tree.models[s_star]
                    on_base = identity(base)
                    cases[name] = "old"
                else:
                    if not lo <= tree.pos(s_star) < hi:
                        raise StageInvariantViolation(
                            f"shifted predecessor of {fmt(name)} leaves the interval")
                    pred = s_star + (delta,)
                    base = models[pred]
                    on_base = j[s_star]
                    cases[name] = "shifted"
                m, step = ultrapower(base, ep, models[sp + (delta,)])
                step.label = f"i[{fmt(pred)},{fmt(name)}]"
                models[name] = m
                steps[name] = step
                new_preds[name] = pred
                j[s] = induced(tree.models[s], m, on_base, j[sp], f"j[{fmt(s)}]")
            k[s] = _k_map(aux, models[name], j[s], f"k[{fmt(s)}]")
        preds.update(new_preds)
        preds[names[0]] = tau

        kd = k[nu_star]
        if kd.source != tree.models[old_delta]:
            raise StageInvariantViolation("ult(M_v*, E_v) differs from the old model at delta")
        kd = Embedding(tree.models[old_delta], kd.target, kd.pmap, kd.term_rule, f"k[{fmt(nu_star)}]")
        tail_maps: dict[Name, Embedding] = {old_delta: kd}
        for g in tail:
            gp = tree.prev(g)
            eg = tail_maps[gp].ext(tree.exts[gp])
            exts[rn(gp)] = eg
            g_star = tree.preds[g]
            if g_star in tail_maps:
                on_base = tail_maps[g_star]
                base = models[rn(g_star)]
            else:
                on_base = identity(tree.models[g_star])
                base = tree.models[g_star]
            m, step = ultrapower(base, eg, models[rn(gp)])
            step.label = f"i[{fmt(rn(g_star))},{fmt(g)}]"
            models[g] = m
            steps[g] = step
            preds[g] = rn(g_star)
            tail_maps[g] = induced(tree.models[g], m, on_base, tail_maps[gp], f"j^[{fmt(g)}]")
    except (AgreementFailure, ModelError, KeyError) as err:
        raise StageInvariantViolation(f"stage {stage}: {err!r}") from err

    new = Tree(nodes, models, exts, preds, steps)
    rec = StageRecord(stage, delta, nu, nu_star, tau, tuple(names), new_preds, cases,
                      new_exts, j, k, i_e, tail_maps, tree, new, rename)
    return new, rec


def normalize(tree: Tree, max_stages: int | None = None) -> NormalizationResult:
    """Run correction stages until no node is bad for critical point."""
    reg = Registry()
    trees = [tree]
    stages: list[StageRecord] = []
    limit = len(tree.ext_nodes()) if max_stages is None else max_stages
    while True:
        cur = trees[-1]
        nu = find_bad(cur, reg)
        if nu is None:
            break
        if len(stages) >= limit:
            raise StageInvariantViolation(f"more than {limit} stages")
        nxt, rec = stage_successor(cur, reg, nu)
        log.debug("stage %d: nu=%s delta=%d tau=%s", rec.stage, fmt(nu), rec.delta, fmt(rec.tau))
        trees.append(nxt)
        stages.append(rec)
    return NormalizationResult(trees, stages, reg)


from .stagechecks import Report, check_factorization, check_invariants, check_stage_lemmas  # noqa: E402
