"""Exhaustive and random generation of finite trees."""
from __future__ import annotations

import itertools
import random
from collections.abc import Callable, Sequence

from .syntax import print_tree
from .trees import Node, Signature, Tree, size


def tree_order_key(t: Tree) -> tuple[int, str]:
    """The fixed total order used for canonical representatives: size, then text."""
    return size(t), print_tree(t)


def enumerate_trees(signature: Signature, atoms: Sequence[Tree], depth: int,
                    limit: int | None = None) -> list[Tree]:
    """All trees of depth at most ``depth`` built from ``atoms`` and the
    signature's operators, sorted by :func:`tree_order_key`.

    Nullary operators count as atoms.  ``limit`` guards against blow-up.
    """
    base = list(atoms) + [Node(op, ()) for op in signature.nullary()]
    level = list(dict.fromkeys(base))
    for _ in range(depth):
        nxt = list(base)
        for op, ar in signature.operators:
            if ar == 0:
                continue
            if limit is not None and len(level) ** ar > limit:
                raise OverflowError(f"enumeration exceeds {limit} trees")
            for kids in itertools.product(level, repeat=ar):
                nxt.append(Node(op, kids))
        if limit is not None and len(nxt) > limit:
            raise OverflowError(f"enumeration exceeds {limit} trees")
        level = list(dict.fromkeys(nxt))
    return sorted(level, key=tree_order_key)


def random_tree(rng: random.Random, signature: Signature,
                leaf: Callable[[random.Random], Tree], depth: int,
                p_leaf: float = 0.3) -> Tree:
    """A random finite tree of depth at most ``depth``."""
    ops = [(op, ar) for op, ar in signature.operators]
    if depth <= 0 or rng.random() < p_leaf:
        nullary = [op for op, ar in ops if ar == 0]
        if nullary and rng.random() < 0.2:
            return Node(rng.choice(nullary), ())
        return leaf(rng)
    op, ar = rng.choice([o for o in ops if o[1] > 0] or ops)
    return Node(op, tuple(random_tree(rng, signature, leaf, depth - 1, p_leaf)
                          for _ in range(ar)))
