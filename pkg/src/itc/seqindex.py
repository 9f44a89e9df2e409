"""Sequence-indexed node names: ordering, cuts and extended-index registries.

A node name is a nonempty tuple of naturals.  A plain ordinal node ``x`` is the
singleton ``(x,)``; sequence names are strictly increasing tuples whose entries
after the first are stage markers.  All comparisons go through the canonical
(fully extended) representative kept by a :class:`Registry`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Name = tuple[int, ...]


class InconsistentRegistry(ValueError):
    pass


class NoWitness(LookupError):
    pass


class NotInDomain(KeyError):
    pass


def plain(x: int) -> Name:
    return (x,)


def fmt(name: Name | None) -> str:
    if name is None:
        return "<>"
    if len(name) == 1:
        return str(name[0])
    return "<" + ",".join(map(str, name)) + ">"


def parse_name(text: str | int | Sequence[int]) -> Name:
    """Inverse of :func:`fmt`; also accepts ints and int sequences."""
    if isinstance(text, int):
        return (text,)
    if not isinstance(text, str):
        return tuple(int(v) for v in text)
    s = text.strip()
    if s.startswith("<") and s.endswith(">"):
        body = s[1:-1].strip()
        return tuple(int(v) for v in body.split(",")) if body else ()
    return (int(s),)


@dataclass
class Registry:
    """Stage markers ``delta_1 < delta_2 < ...`` and their fully extended indices.

    ``intervals[l]`` is the closed interval I_l (canonical names, increasing).
    Stage 0 is the pseudo-stage before any correction.
    """

    markers: list[int] = field(default_factory=list)
    full: dict[int, Name] = field(default_factory=dict)
    intervals: list[tuple[Name, ...]] = field(default_factory=list)

    def copy(self) -> "Registry":
        return Registry(list(self.markers), dict(self.full), list(self.intervals))

    @property
    def stages(self) -> int:
        return len(self.markers)

    def marker(self, stage: int) -> int:
        if not 1 <= stage <= len(self.markers):
            raise InconsistentRegistry(f"no stage {stage}")
        return self.markers[stage - 1]

    def add_stage(self, delta: int, full_index: Name, interval: Iterable[Name]) -> int:
        if self.markers and delta <= self.markers[-1]:
            raise InconsistentRegistry("stage markers must increase")
        if full_index[-1] != delta:
            raise InconsistentRegistry("fully extended index must end with its marker")
        self.markers.append(delta)
        self.full[delta] = full_index
        self.intervals.append(tuple(interval))
        return len(self.markers)

    def is_marker(self, x: int) -> bool:
        return x in self.full

    def extended_indices(self, delta: int) -> list[Name]:
        """Terminal segments of length >= 2 of the fully extended index."""
        f = self.full[delta]
        return [f[i:] for i in range(len(f) - 1)]

    def canonical(self, name: Name) -> Name:
        if len(name) == 1:
            return self.full.get(name[0], name)
        for e in name[1:]:
            if e not in self.full:
                raise InconsistentRegistry(f"{fmt(name)}: {e} is not a stage marker")
        head = self.full.get(name[0])
        if head is not None:
            return head + name[1:]
        return name

    def interval(self, stage: int) -> tuple[Name, ...]:
        return self.intervals[stage - 1]

    def in_interval(self, name: Name | None, stage: int) -> bool:
        if name is None or not 1 <= stage <= self.stages:
            return False
        return self.canonical(name) in self.intervals[stage - 1]

    def stage_of(self, name: Name) -> int | None:
        """The stage whose interval contains ``name`` (markers are the last entry)."""
        c = self.canonical(name)
        d = c[-1]
        if d in self.full and len(c) > 1:
            return self.markers.index(d) + 1
        return None

    def delta_name(self, stage: int) -> Name:
        return self.full[self.marker(stage)]


def seq_key(name: Name, reg: Registry | None = None) -> Name:
    """Sort key realising the sequence ordering (reverse-lexicographic)."""
    c = reg.canonical(name) if reg is not None else name
    return c[::-1]


def seq_lt(a: Name, b: Name, reg: Registry | None = None) -> bool:
    return seq_key(a, reg) < seq_key(b, reg)


def cut(name: Name, stage: int, reg: Registry) -> Name | None:
    """``name`` restricted to entries from stages <= ``stage``; ``None`` if empty."""
    c = reg.canonical(name)
    if len(c) == 1:
        return c
    if stage == 0:
        return c[:1]
    d = reg.marker(stage)
    kept = tuple(e for e in c if e <= d)
    return kept or None


def interval(lo: Name, hi: Name, dom: Sequence[Name], reg: Registry | None = None) -> list[Name]:
    """Closed interval [lo, hi] of ``dom`` under the sequence ordering."""
    members = {seq_key(n, reg) for n in dom}
    klo, khi = seq_key(lo, reg), seq_key(hi, reg)
    for k in (klo, khi):
        if k not in members:
            raise NotInDomain(fmt(k[::-1]))
    return sorted((n for n in dom if klo <= seq_key(n, reg) <= khi), key=lambda n: seq_key(n, reg))


def interval_isomorphic(lo1: Name, hi1: Name, lo2: Name, hi2: Name,
                        dom: Sequence[Name], reg: Registry | None = None) -> bool:
    """Whether [lo1,hi1] ~ [lo2,hi2]: same size and related by one terminal suffix.

    The map appends (or strips) the same block of trailing stage markers on
    every member.  Singleton intervals are always related.
    """
    canon = reg.canonical if reg is not None else (lambda n: n)
    one = [canon(n) for n in interval(lo1, hi1, dom, reg)]
    two = [canon(n) for n in interval(lo2, hi2, dom, reg)]
    if len(one) != len(two):
        return False
    if len(one) == 1:
        return True
    if two[0][: len(one[0])] == one[0]:
        suffix = two[0][len(one[0]):]
        return all(b == a + suffix for a, b in zip(one, two))
    if one[0][: len(two[0])] == two[0]:
        suffix = one[0][len(two[0]):]
        return all(a == b + suffix for a, b in zip(one, two))
    return False


def cut_isomorph_witness(sigma: Name, alpha: int, reg: Registry, dom: Sequence[Name]) -> Name:
    """Search I_gamma (sigma's stage) for x with [sigma|alpha, delta_alpha] ~ [sigma, x]."""
    sigma = reg.canonical(sigma)
    gamma = reg.stage_of(sigma)
    if gamma is None or gamma < alpha:
        raise NoWitness(f"{fmt(sigma)} is not in a stage interval above {alpha}")
    low = cut(sigma, alpha, reg)
    if not reg.in_interval(low, alpha):
        raise NoWitness(f"{fmt(sigma)}|{alpha} = {fmt(low)} is not in I_{alpha}")
    top = reg.delta_name(alpha)
    if gamma == alpha:
        return top
    for x in reg.interval(gamma):
        if seq_key(x) < seq_key(sigma):
            continue
        if interval_isomorphic(low, top, sigma, x, dom, reg):
            return x
    raise NoWitness(f"no witness for {fmt(sigma)} at stage {alpha}")
