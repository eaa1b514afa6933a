"""The tree negation ¬ (swap ⊤ and ⊥) and whether evaluation respects it."""
from __future__ import annotations

import random
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any

from .dyadic import ONE
from .effects import EffectSpec
from .enumeration import enumerate_trees, random_tree
from .relations import check_leq
from .semantics import eval_bounds, eval_exact
from .syntax import print_tree
from .trees import (BOT, TOP, Bot, Leaf, Node, Rec, Ref, RegularTree, Top, Tree, TreeLike,
                    as_term, positions, replace_at, tree_leq)
from .values import EXC_BOT, EXC_TOP, FlatExc, Interval, ThreePoint


@dataclass(frozen=True)
class Involution:
    """A self-inverse relabelling of variables; the identity by default."""

    leaf_map: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for x, y in self.leaf_map.items():
            if self.leaf_map.get(y, y) != x:
                raise ValueError(f"leaf map is not an involution at {x}")

    def __call__(self, x):
        return self.leaf_map.get(x, x)


IDENTITY = Involution()


def _neg(t: Tree, f: Callable[[Any], Any]) -> Tree:
    if isinstance(t, Bot):
        return TOP
    if isinstance(t, Top):
        return BOT
    if isinstance(t, Leaf):
        return Leaf(f(t.value))
    if isinstance(t, Node):
        return Node(t.op, tuple(_neg(c, f) for c in t.children))
    if isinstance(t, Rec):
        return Rec(t.name, _neg(t.body, f))
    if isinstance(t, Ref):
        return t
    raise TypeError(f"not a tree: {t!r}")


def negate(t: TreeLike, inv: Involution = IDENTITY) -> TreeLike:
    out = _neg(as_term(t), inv)
    return RegularTree(out) if isinstance(t, RegularTree) else out


def negate_value(effect: EffectSpec, v):
    """The value involution ¬ induces on finite closed trees, where one exists."""
    name = effect.name
    if name == "nondet":
        return {ThreePoint.BOT: ThreePoint.TOP, ThreePoint.TOP: ThreePoint.BOT}.get(v, v)
    if name == "prob":
        return ONE - v
    if name == "store":
        return frozenset(range(effect.store_size)) - v
    if name == "exceptions":
        return {EXC_BOT: EXC_TOP, EXC_TOP: EXC_BOT}.get(v, v) if isinstance(v, FlatExc) else v
    if name == "nondet_prob":
        return Interval(ONE - v.hi, ONE - v.lo)
    if name == "input":
        return negate(v)
    raise ValueError(f"{effect.name} values have no involution")


COST_NOTICE = ("the extended naturals in reverse order have no order-reversing "
               "involution: each n has finitely many elements above it and "
               "infinitely many below, so no bijection can swap the two sides")


@dataclass
class InvolutionReport:
    effect: str
    samples: int
    involutive_failures: list = field(default_factory=list)
    tree_order_failures: list = field(default_factory=list)
    order_checked: int = 0
    order_failures: list = field(default_factory=list)
    derived_checked: int = 0
    derived_failures: list = field(default_factory=list)
    regular_witness: dict | None = None
    notice: str | None = None

    @property
    def finite_ok(self) -> bool:
        return not (self.involutive_failures or self.tree_order_failures
                    or self.order_failures or self.derived_failures)


def _raise_tree(rng: random.Random, t: Tree, sig) -> Tree:
    """A tree above ``t``: some subtree replaced by ⊤ or a ⊥ grown."""
    spots = list(positions(t))
    path, sub = rng.choice(spots)
    if isinstance(sub, Bot):
        grown = random_tree(rng, sig, lambda r: r.choice([BOT, TOP, Leaf(0), Leaf(1)]), 1)
        return replace_at(t, path, grown)
    return replace_at(t, path, TOP)


def _closed_corpus(effect: EffectSpec, rng: random.Random, samples: int):
    if effect.name == "store":
        return enumerate_trees(effect.signature, [BOT, TOP], 2)
    return [random_tree(rng, effect.signature, lambda r: r.choice([BOT, TOP]), 4)
            for _ in range(samples)]


def leafless_tree(effect: EffectSpec) -> RegularTree:
    op, ar = next((o, a) for o, a in effect.signature.operators if a > 0)
    return RegularTree(Rec("s", Node(op, (Ref("s"),) * ar)))


def check_involution_preservation(effect: EffectSpec, samples: int = 1000,
                                  seed: int = 0) -> InvolutionReport:
    rng = random.Random(seed)
    rep = InvolutionReport(effect.name, samples)
    sig = effect.signature
    leaf = lambda r: r.choice([BOT, TOP, Leaf(0), Leaf(1)])  # noqa: E731

    for _ in range(samples):
        a = random_tree(rng, sig, leaf, 3)
        b = _raise_tree(rng, a, sig) if rng.random() < 0.5 else random_tree(rng, sig, leaf, 3)
        if negate(negate(a)) != a:
            rep.involutive_failures.append(a)
        if tree_leq(a, b) != tree_leq(negate(b), negate(a)):
            rep.tree_order_failures.append((a, b))
        if effect.name in ("cost", "nondet_prob"):
            continue
        rep.order_checked += 1
        if check_leq(effect, a, b).holds != check_leq(effect, negate(b), negate(a)).holds:
            rep.order_failures.append((a, b))

    if effect.name == "cost":
        rep.notice = COST_NOTICE
        return rep

    for t in _closed_corpus(effect, rng, samples):
        rep.derived_checked += 1
        v, w = eval_exact(effect, t), eval_exact(effect, negate(t))
        if w != negate_value(effect, v):
            rep.derived_failures.append((t, v, w))

    t = leafless_tree(effect)
    if effect.name in ("prob", "nondet_prob"):
        # the value is the supremum of the bottom-filled approximants
        v = eval_bounds(effect, t).lower
        w = eval_bounds(effect, negate(t)).lower
    else:
        v, w = eval_exact(effect, t), eval_exact(effect, negate(t))
    if w != negate_value(effect, v):
        rep.regular_witness = {"tree": print_tree(t), "value": v, "negated_tree_value": w,
                               "negated_value": negate_value(effect, v)}
    return rep
