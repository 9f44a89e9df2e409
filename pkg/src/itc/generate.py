"""Seeded random generation of valid drop-free tree descriptors."""
from __future__ import annotations

import random

from .freemodel import AgreementFailure, Model, base_model
from .seqindex import plain
from .treecore import InvalidTree, Step, Tree, TreeDescriptor, check_step, extend


def random_base(rng: random.Random, universe: int = 16, count: int = 4) -> Model:
    """A base model with ``count`` descriptors of distinct index below ``universe``."""
    indices = rng.sample(range(2, universe), count)
    descs = []
    for ix in indices:
        ln = rng.randint(2, ix)
        crit = rng.randint(1, ln - 1)
        descs.append((crit, ln, ix))
    return base_model(universe, descs)


def _legal_moves(tree: Tree) -> list[tuple[int, int]]:
    node = tree.nodes[-1]
    owner = tree.models[node]
    moves = []
    for rank, e in enumerate(owner.descriptors):
        for p in tree.nodes:
            try:
                check_step(tree, node, e, p)
            except InvalidTree:
                continue
            moves.append((rank, p[0]))
    return moves


def random_descriptor(rng: random.Random, length: int, universe: int = 16,
                      count: int = 4, attempts: int = 50) -> TreeDescriptor:
    """Pick each step uniformly among the choices that keep the tree valid."""
    for _ in range(attempts):
        base = random_base(rng, universe, count)
        tree = Tree([plain(0)], {plain(0): base}, {}, {}, {})
        steps: list[Step] = []
        while len(steps) < length:
            moves = _legal_moves(tree)
            rng.shuffle(moves)
            for rank, p in moves:
                n = len(steps)
                try:
                    extend(tree, plain(n), rank, plain(p), plain(n + 1))
                except (InvalidTree, AgreementFailure):
                    continue
                steps.append(Step(rank, p))
                break
            else:
                break
        if len(steps) == length:
            return TreeDescriptor(base, tuple(steps))
    raise InvalidTree(f"could not grow a tree of length {length}")


def corpus(seed: int, size: int, max_length: int = 7, **kw) -> list[TreeDescriptor]:
    rng = random.Random(seed)
    return [random_descriptor(rng, rng.randint(1, max_length), **kw) for _ in range(size)]
