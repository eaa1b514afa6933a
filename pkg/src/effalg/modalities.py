"""Boolean modalities (P, v) and the relation they induce.

A modality sends true leaves to the value ``v`` and false leaves to the
bottom value, evaluates, and tests the result with an open predicate ``P``.
``modal_leq`` decides the induced relation through its characterisation:
for all v and all f: vars -> {bottom, v}, alpha(T f a) ⊑ alpha(T f b).
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .dyadic import ONE, Dyadic
from .effects import EffectSpec
from .enumeration import enumerate_trees
from .relations import (AT_RESOLUTION, HOLDS, REFUTED, Decision, compare, free_vars,
                        grid_values)
from .semantics import UnsupportedEvaluation, algebra, eval_bounds, eval_exact
from .syntax import parse_tree
from .trees import BOT, TOP, Leaf, TreeLike, as_term, depth
from .values import INF, Interval

ALWAYS = Dyadic(-1, 0)  # threshold meaning "always true"

FINITE_SPACES = ("nondet", "store", "exceptions")


class UndecidedModality(ValueError):
    pass


class InfiniteValueSpace(ValueError):
    pass


@dataclass(frozen=True)
class OpenPredicate:
    """``upset``: v holds iff some listed element is below it.
    ``threshold``: v > r on dyadics, or componentwise lo > r[0] and hi > r[1]
    on intervals; ALWAYS disables a bound.
    ``set``: membership in an arbitrary finite set (the non-monotone reading).
    """

    kind: str
    elements: tuple = ()
    threshold: Any = None

    @classmethod
    def upset(cls, minimal) -> OpenPredicate:
        return cls("upset", tuple(minimal))

    @classmethod
    def above(cls, r) -> OpenPredicate:
        return cls("threshold", threshold=r)

    def holds(self, effect: EffectSpec, v) -> bool:
        if self.kind == "upset":
            alg = algebra(effect)
            return any(alg.leq(m, v) for m in self.elements)
        if self.kind == "set":
            return v in self.elements
        if self.kind == "threshold":
            r = self.threshold
            if isinstance(v, Interval):
                lo_r, hi_r = r
                return v.lo > lo_r and v.hi > hi_r
            return v > r
        raise ValueError(f"bad predicate kind {self.kind!r}")


@dataclass(frozen=True)
class Modality:
    predicate: OpenPredicate
    value: Any
    duplicate_of: int | None = field(default=None, compare=False)


def _bottom(effect):
    return algebra(effect).bottom()


def eval_modality(effect: EffectSpec, o: Modality, pred: Mapping[int, bool], t: TreeLike) -> bool:
    """P(alpha(T(v̂ ∘ pred)(t))); bounds decide monotone predicates soundly."""
    missing = [x for x in free_vars(t) if x not in pred]
    if missing:
        raise ValueError(f"no truth value for variable(s) {missing}")
    h = {x: (o.value if pred[x] else _bottom(effect)) for x in free_vars(t)}
    try:
        v = eval_exact(effect, t, h)
        return o.predicate.holds(effect, v)
    except UnsupportedEvaluation:
        b = eval_bounds(effect, t, h)
    if o.predicate.holds(effect, b.lower):
        return True
    if not o.predicate.holds(effect, b.upper):
        return False
    raise UndecidedModality(f"bounds at depth {b.depth} straddle the predicate")


# --- the induced relation ---------------------------------------------------------------

def modal_values(effect: EffectSpec, a: TreeLike | None = None, b: TreeLike | None = None,
                 resolution: int | None = None) -> list:
    """Continuation values v quantified over by ``modal_leq``."""
    name = effect.name
    if name in FINITE_SPACES:
        return algebra(effect).values()
    if name == "prob":
        return [ONE]  # (P_r, v) = (P_{r/v}, 1)
    if name == "cost":
        ticks = max((_ticks(t) for t in (a, b) if t is not None), default=0)
        return list(range(ticks + 2)) + [INF]
    if name == "input":
        return [BOT, TOP, parse_tree("in(top, bot)"), parse_tree("in(bot, top)")]
    return grid_values(effect.grid if resolution is None else resolution)


def _ticks(t: TreeLike) -> int:
    return depth(as_term(t))


def modal_assignments(effect: EffectSpec, vs: Sequence[int], values: Sequence) -> list[dict]:
    bot = _bottom(effect)
    out, seen = [], set()
    for v in values:
        for combo in itertools.product([False, True], repeat=len(vs)):
            h = {x: (v if on else bot) for x, on in zip(vs, combo)}
            key = tuple(h.items())
            if key not in seen:
                seen.add(key)
                out.append(h)
    return out


def modal_leq(effect: EffectSpec, a: TreeLike, b: TreeLike, monotone: bool = True) -> Decision:
    """Decide a ⊑_Ω b.

    With ``monotone=False`` every subset of a finite space counts as an open
    predicate, so the test compares values for equality.
    """
    vs = free_vars(a, b)
    resolutions = range(1, effect.grid + 1) if effect.name == "nondet_prob" else [None]
    alg = algebra(effect)
    undecided = False
    for r in resolutions:
        for h in modal_assignments(effect, vs, modal_values(effect, a, b, r)):
            verdict, va, vb = compare(effect, a, b, h)
            if not monotone and verdict:
                verdict = alg.eq(va, vb)
            if verdict is False:
                return Decision(REFUTED, h, (va, vb), r)
            if verdict is None:
                undecided = True
    if effect.name == "nondet_prob":
        return Decision(AT_RESOLUTION, resolution=effect.grid)
    if undecided:
        return Decision(AT_RESOLUTION, resolution=20)
    return Decision(HOLDS)


# --- enumeration -------------------------------------------------------------------------

def _upsets(effect: EffectSpec, values: list, monotone: bool) -> list[OpenPredicate]:
    alg = algebra(effect)
    out = []
    for mask in range(1 << len(values)):
        members = [v for i, v in enumerate(values) if mask >> i & 1]
        if not monotone:
            out.append(OpenPredicate("set", tuple(members)))
            continue
        if any(alg.leq(m, w) and w not in members for m in members for w in values):
            continue
        minimal = [m for m in members
                   if not any(w != m and alg.leq(w, m) for w in members)]
        out.append(OpenPredicate.upset(minimal))
    return out


def probe_trees(effect: EffectSpec, depth_bound: int = 2) -> list:
    atoms = [BOT, TOP, Leaf(0), Leaf(1)]
    return enumerate_trees(effect.signature, atoms, depth_bound, limit=50_000)


def enumerate_modalities(effect: EffectSpec, monotone: bool = True,
                         probe_depth: int = 1) -> list[Modality]:
    """All (P, v) over a finite value space, with denotational duplicates
    (equal on every probe tree and truth assignment) pointing at their
    first occurrence."""
    if effect.name not in FINITE_SPACES:
        raise InfiniteValueSpace(
            f"the {effect.value_space} space of {effect.name} is infinite; "
            "use parametric families such as (P_r, v)")
    values = algebra(effect).values()
    probes = probe_trees(effect, probe_depth)
    preds = [dict(zip((0, 1), c)) for c in itertools.product([False, True], repeat=2)]
    out: list[Modality] = []
    seen: dict[tuple, int] = {}
    for p in _upsets(effect, values, monotone):
        for v in values:
            o = Modality(p, v)
            sig = tuple(eval_modality(effect, o, {**f}, t) for t in probes for f in preds)
            dup = seen.setdefault(sig, len(out))
            out.append(Modality(p, v, None if dup == len(out) else dup))
    return out

