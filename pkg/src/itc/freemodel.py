"""Finite freely generated models, ultrapowers and embeddings between them.

Points are tuples of naturals compared lexicographically; this single global
order is consistent with every model's internal order, so points of different
models can be compared directly.  A base point ``k`` is ``(k,)``.  The
ultrapower of ``base`` by an extender ``E`` taken from ``owner`` keeps the
owner's points up to ``index(E)`` and adds one fresh point ``img(y)`` for every
base point ``y >= crit(E)``, placed immediately above ``index(E)``.

Elements are syntactic: atoms, points, extender descriptors, terms ``[f]_a``
and formal applications.  Nothing is ever collapsed.
"""
from __future__ import annotations

import hashlib
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

Point = tuple[int, ...]


class ModelError(ValueError):
    pass


class DescriptorNotOwned(ModelError):
    pass


class AgreementFailure(ModelError):
    pass


class WrongModel(ModelError):
    pass


@dataclass(frozen=True)
class Ext:
    """Extender descriptor: critical point, length and index, as points."""

    crit: Point
    len: Point
    index: Point

    def facts(self) -> tuple[Point, Point, Point]:
        return (self.crit, self.len, self.index)


@dataclass(frozen=True)
class Atom:
    label: str


@dataclass(frozen=True)
class Ord:
    point: Point


@dataclass(frozen=True)
class Fn:
    """Function symbol over a model: ``const`` (f(x) = arg) or ``cut`` (f(x) = arg & x)."""

    kind: str
    arg: "Element"


@dataclass(frozen=True)
class Term:
    """``[fn]_args`` in the ultrapower whose digest is ``model``."""

    model: int
    args: tuple[Point, ...]
    fn: Fn


@dataclass(frozen=True)
class App:
    fn: Fn
    args: tuple[Point, ...]


Element = Union[Atom, Ord, Ext, Term, App]


def _digest(*parts) -> int:
    h = hashlib.blake2b(repr(parts).encode(), digest_size=6)
    return int.from_bytes(h.digest(), "big")


@dataclass(eq=False)
class Model:
    points: tuple[Point, ...]
    descriptors: tuple[Ext, ...]
    atoms: frozenset[str]
    digest: int
    # point -> ("base", k) | ("gen", p) | ("img", y)
    provenance: dict[Point, tuple]
    # set only for ultrapowers
    base: "Model | None" = None
    ext: Ext | None = None
    owner: "Model | None" = None
    img: dict[Point, Point] = field(default_factory=dict)
    _pos: dict[Point, int] = field(default_factory=dict, repr=False)
    _descs: frozenset = field(default=frozenset(), repr=False)

    def __post_init__(self):
        self._pos = {p: i for i, p in enumerate(self.points)}
        self._descs = frozenset(self.descriptors)

    def __eq__(self, other):
        return isinstance(other, Model) and other.digest == self.digest

    def __hash__(self):
        return self.digest

    def __len__(self):
        return len(self.points)

    def __contains__(self, p) -> bool:
        return p in self._pos

    def has_descriptor(self, e: Ext) -> bool:
        return e in self._descs

    def pos(self, p: Point) -> int:
        return self._pos[p]

    def below(self, bound: Point, inclusive: bool = False) -> tuple[Point, ...]:
        cut = bisect_right(self.points, bound) if inclusive else bisect_left(self.points, bound)
        return self.points[:cut]

    def rank_of(self, e: Ext) -> int:
        return self.descriptors.index(e)

    def is_ultrapower(self) -> bool:
        return self.base is not None

    def owns(self, x: Element) -> bool:
        if isinstance(x, Atom):
            return x.label in self.atoms
        if isinstance(x, Ord):
            return x.point in self
        if isinstance(x, Ext):
            return self.has_descriptor(x)
        if isinstance(x, Term):
            if x.model != self.digest or self.base is None:
                return False
            top = self.ext.index
            return all(a in self and a <= top for a in x.args) and self.base.owns(x.fn.arg)
        if isinstance(x, App):
            return all(a in self for a in x.args) and self.owns(x.fn.arg)
        return False


def base_model(universe_size: int, descriptors: Iterable[tuple[int, int, int]],
               atoms: Iterable[str] = ()) -> Model:
    descs = sorted({Ext((c,), (l,), (i,)) for c, l, i in descriptors}, key=lambda e: e.index)
    for e in descs:
        if not e.crit < e.len <= e.index:
            raise ModelError(f"descriptor {e} violates crit < len <= index")
        if e.index[0] >= universe_size:
            raise ModelError(f"descriptor {e} outside universe of size {universe_size}")
    if len({e.index for e in descs}) != len(descs):
        raise ModelError("descriptor indices must be distinct")
    atoms = frozenset(atoms)
    pts = tuple((k,) for k in range(universe_size))
    prov = {p: ("base", p[0]) for p in pts}
    dg = _digest("base", universe_size, tuple(descs), tuple(sorted(atoms)))
    return Model(pts, tuple(descs), atoms, dg, prov)


def check_agreement(a: Model, b: Model, bound: Point) -> None:
    """Raise unless ``a`` and ``b`` have the same points and descriptors below ``bound``."""
    if a.below(bound) != b.below(bound):
        raise AgreementFailure(f"models disagree on points below {bound}")
    da = [e for e in a.descriptors if e.index < bound]
    db = [e for e in b.descriptors if e.index < bound]
    if da != db:
        raise AgreementFailure(f"models disagree on extenders below {bound}")


def ultrapower(base: Model, e: Ext, owner: Model | None = None) -> tuple[Model, "Embedding"]:
    """``ult(base, e)`` with ``e`` taken from ``owner`` (default: ``base``)."""
    owner = base if owner is None else owner
    if not owner.has_descriptor(e):
        raise DescriptorNotOwned(f"{e} is not an extender of the owning model")
    check_agreement(base, owner, e.crit)
    gen = owner.below(e.index, inclusive=True)
    dg = _digest("ult", base.digest, e, gen)
    moved = base.points[bisect_left(base.points, e.crit):]
    img = {y: e.index + (dg, i) for i, y in enumerate(moved)}
    prov: dict[Point, tuple] = {p: ("gen", p) for p in gen}
    for y, q in img.items():
        prov[q] = ("img", y)
    jmap = {p: p for p in base.points if p < e.crit}
    jmap.update(img)
    descs = {d for d in owner.descriptors if d.index < e.index}
    descs.update(Ext(jmap[d.crit], jmap[d.len], jmap[d.index]) for d in base.descriptors)
    ordered = tuple(sorted(descs, key=lambda d: d.index))
    if len({d.index for d in ordered}) != len(ordered):
        raise ModelError("ultrapower produced clashing extender indices")
    model = Model(tuple(gen) + tuple(img.values()), ordered, base.atoms, dg, prov,
                  base=base, ext=e, owner=owner, img=jmap)
    return model, canonical_embedding(model)


# --- embeddings ---------------------------------------------------------------

@dataclass(eq=False)
class Embedding:
    """Order-preserving map of points, extended structurally to elements."""

    source: Model
    target: Model
    pmap: dict[Point, Point]
    term_rule: Callable[[Term], Element] | None = None
    label: str = ""
    # maps a target term back to a source element, or None when it has no preimage
    term_inverse: Callable[[Term], Element | None] | None = None
    _inv: dict[Point, Point] | None = field(default=None, repr=False)

    def __call__(self, p: Point) -> Point:
        return self.pmap[p]

    @property
    def crit(self) -> Point | None:
        for p in self.source.points:
            if self.pmap[p] != p:
                return p
        return None

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.pmap.items()) and self.source == self.target

    def ext(self, e: Ext) -> Ext:
        return Ext(self.pmap[e.crit], self.pmap[e.len], self.pmap[e.index])

    def apply(self, x: Element) -> Element:
        if isinstance(x, Atom):
            return x
        if isinstance(x, Ord):
            return Ord(self.pmap[x.point])
        if isinstance(x, Ext):
            return self.ext(x)
        if isinstance(x, App):
            return App(Fn(x.fn.kind, self.apply(x.fn.arg)), tuple(self.pmap[a] for a in x.args))
        if isinstance(x, Term):
            if x.model != self.source.digest:
                raise WrongModel(f"term of model {x.model:x} given to map from {self.source.digest:x}")
            if self.term_rule is None:
                raise WrongModel(f"{self.label or 'map'} has no rule for terms")
            return self.term_rule(x)
        raise WrongModel(f"not an element: {x!r}")

    def preimage(self, x: Element) -> Element | None:
        """Some ``y`` with ``self.apply(y) == x``, or None if ``x`` is not in the range."""
        if self._inv is None:
            self._inv = {q: p for p, q in self.pmap.items()}
        inv = self._inv
        if isinstance(x, Atom):
            return x if x.label in self.source.atoms else None
        if isinstance(x, Ord):
            return Ord(inv[x.point]) if x.point in inv else None
        if isinstance(x, Ext):
            pts = [inv.get(p) for p in (x.crit, x.len, x.index)]
            if None in pts:
                return None
            e = Ext(*pts)
            return e if self.source.has_descriptor(e) else None
        if isinstance(x, Term) and self.term_inverse is not None:
            if x.model != self.target.digest:
                return None
            return self.term_inverse(x)
        return None

    def problems(self) -> list[str]:
        """Structural defects: non-total, out of target, not monotone, extenders lost."""
        out = []
        src, tgt = self.source, self.target
        prev = None
        for p in src.points:
            if p not in self.pmap:
                out.append(f"{self.label}: {p} unmapped")
                continue
            q = self.pmap[p]
            if q not in tgt:
                out.append(f"{self.label}: image {q} of {p} not in target")
            if prev is not None and not prev < q:
                out.append(f"{self.label}: order broken at {p}")
            prev = q
        for d in src.descriptors:
            try:
                if not tgt.has_descriptor(self.ext(d)):
                    out.append(f"{self.label}: extender {d} not sent to an extender")
            except KeyError:
                pass
        return out


def identity(m: Model) -> Embedding:
    return Embedding(m, m, {p: p for p in m.points}, lambda t: t, "id", lambda t: t)


def canonical_embedding(n: Model) -> Embedding:
    """``i^E : base -> ult(base, E)``; a term ``x`` goes to ``[const x]_()``."""
    digest = n.digest
    base = n.base

    def inverse(t: Term) -> Element | None:
        if t.args or t.fn.kind != "const" or not isinstance(t.fn.arg, Term):
            return None
        return t.fn.arg if base.owns(t.fn.arg) else None

    return Embedding(base, n, dict(n.img),
                     lambda t: Term(digest, (), Fn("const", t)), "i^E", inverse)


def compose(*maps: Embedding) -> Embedding:
    """``compose(g, f)`` is ``g o f``."""
    if not maps:
        raise ValueError("nothing to compose")
    if len(maps) == 1:
        return maps[0]
    inner = maps[-1]
    for outer in reversed(maps[:-1]):
        if outer.source != inner.target:
            raise WrongModel(f"cannot compose {outer.label} after {inner.label}")
        pm = {p: outer.pmap[q] for p, q in inner.pmap.items()}
        f, g = inner, outer
        inner = Embedding(inner.source, outer.target, pm,
                          (lambda t, f=f, g=g: g.apply(f.apply(t))),
                          f"{g.label}.{f.label}",
                          (lambda t, f=f, g=g: _chain_inverse(f, g, t)))
    return inner


def induced(src: Model, dst: Model, on_base: Embedding, on_owner: Embedding,
            label: str = "") -> Embedding:
    """The map ``[f]_a -> [on_base(f)]_{on_owner(a)}`` from ``src`` to ``dst``.

    Both models must be ultrapowers.  Generators go through ``on_owner`` and
    image points ``img(y)`` go to the canonical image of ``on_base(y)``.
    """
    if not (src.is_ultrapower() and dst.is_ultrapower()):
        raise WrongModel("induced maps act between ultrapowers")
    if on_base.source != src.base or on_base.target != dst.base:
        raise WrongModel(f"{label}: base map has the wrong ends")
    pm: dict[Point, Point] = {}
    for p in src.points:
        kind, q = src.provenance[p]
        if kind == "gen":
            pm[p] = on_owner.pmap[q]
        else:
            pm[p] = dst.img[on_base.pmap[q]]
    digest = dst.digest

    def rule(t: Term) -> Element:
        return Term(digest, tuple(pm[a] for a in t.args), Fn(t.fn.kind, on_base.apply(t.fn.arg)))

    inv = {q: p for p, q in pm.items()}
    src_digest = src.digest

    def inverse(t: Term) -> Element | None:
        args = tuple(inv.get(a) for a in t.args)
        arg = on_base.preimage(t.fn.arg)
        if None in args or arg is None:
            return None
        return Term(src_digest, args, Fn(t.fn.kind, arg))

    return Embedding(src, dst, pm, rule, label, inverse)


def _chain_inverse(f: Embedding, g: Embedding, t: Term) -> Element | None:
    mid = g.preimage(t)
    return None if mid is None else f.preimage(mid)


def embedding_problems(emb: Embedding, inflationary: bool = False) -> list[str]:
    out = emb.problems()
    if inflationary:
        for p, q in emb.pmap.items():
            if q in emb.target and p in emb.source and emb.target.pos(q) < emb.source.pos(p):
                out.append(f"{emb.label}: {p} moved down")
                break
    return out


def enumerate_elements(m: Model, depth: int, width: int = 2) -> list[Element]:
    """Elements of ``m`` up to term depth ``depth``.

    Depth 0 is atoms, points and extenders.  Each further level adds terms
    ``[const x]_a`` and ``[cut x]_a`` over a deterministic sample of ``width``
    generators and ``width`` lower-depth elements of the base model.
    """
    out: list[Element] = [Atom(a) for a in sorted(m.atoms)]
    out += [Ord(p) for p in m.points]
    out += list(m.descriptors)
    if depth <= 0 or not m.is_ultrapower():
        return out
    gens = [p for p in m.points if m.provenance[p][0] == "gen" and p >= m.ext.crit]
    gens = gens[:width] or list(m.points[:1])
    lower = enumerate_elements(m.base, depth - 1, width)
    picks = _spread(lower, width)
    for x in picks:
        for kind in ("const", "cut"):
            for a in gens:
                out.append(Term(m.digest, (a,), Fn(kind, x)))
    return out


def _spread(items: list, k: int) -> list:
    if len(items) <= k:
        return list(items)
    step = (len(items) - 1) / (k - 1) if k > 1 else 0
    return [items[round(i * step)] for i in range(k)]
