"""The value space as a quotient of closed trees, and the algebra alpha_c.

A :class:`ValueTable` enumerates the closed finite trees up to some depth,
partitions them by the symmetric part of the base relation and fixes a
choice function by picking the least member of each class.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .effects import EffectSpec
from .enumeration import enumerate_trees
from .semantics import base_oracle
from .trees import BOT, TOP, Tree, depth, flatten, map_tree

DEFAULT_LIMIT = 200_000


class QuotientError(ValueError):
    pass


@dataclass
class ValueTable:
    effect: EffectSpec
    depth: int
    classes: list[tuple[Tree, list[Tree]]]
    order: list[list[bool]]
    index: dict[Tree, int] = field(default_factory=dict, repr=False)

    def canonical(self, i: int, choice: str = "least") -> Tree:
        canon, members = self.classes[i]
        if choice == "least":
            return canon
        if choice == "greatest":
            return members[-1]
        raise ValueError(f"unknown choice function {choice!r}")

    def classify(self, t: Tree) -> int:
        """The class of a closed finite tree, by lookup or by the base relation."""
        i = self.index.get(t)
        if i is not None:
            return i
        for j, (canon, _) in enumerate(self.classes):
            if base_oracle(self.effect, t, canon) and base_oracle(self.effect, canon, t):
                return j
        raise QuotientError("tree falls outside every enumerated class")

    def leq(self, i: int, j: int) -> bool:
        return self.order[i][j]


def build_quotient(effect: EffectSpec, depth: int, limit: int = DEFAULT_LIMIT) -> ValueTable:
    """Enumerate closed trees up to ``depth`` and quotient by the base relation."""
    if effect.name == "nondet_prob":
        raise QuotientError("no closed-form base relation for nondet_prob")
    try:
        trees = enumerate_trees(effect.signature, [BOT, TOP], depth, limit=limit)
    except OverflowError as exc:
        raise QuotientError(str(exc)) from None
    classes: list[tuple[Tree, list[Tree]]] = []
    index: dict[Tree, int] = {}
    for t in trees:  # already in enumeration order, so the first member is least
        for i, (canon, members) in enumerate(classes):
            if base_oracle(effect, t, canon) and base_oracle(effect, canon, t):
                members.append(t)
                index[t] = i
                break
        else:
            index[t] = len(classes)
            classes.append((t, [t]))
    order = [[base_oracle(effect, a, b) for b, _ in classes] for a, _ in classes]
    return ValueTable(effect, depth, classes, order, index)


def alpha_quotient(table: ValueTable, t: Tree, choice: str = "least",
                   strict: bool = True) -> int:
    """alpha_c(t) = [mu(T c (t))] for a tree whose leaves are class indices.

    With ``strict`` the flattened tree must lie within the enumerated depth;
    otherwise it is classified through the base relation.
    """
    def pick(i):
        if not isinstance(i, int) or not 0 <= i < len(table.classes):
            raise QuotientError(f"leaf {i!r} is not a class index")
        return table.canonical(i, choice)

    flat = flatten(map_tree(pick, t))
    if strict and depth(flat) > table.depth:
        raise QuotientError(
            f"flattened tree has depth {depth(flat)}, beyond the table depth {table.depth}")
    return table.classify(flat)

