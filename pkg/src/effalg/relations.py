"""Deciding the evaluation preorder a ⊑_α b, i.e. alpha(T(h)(a)) ⊑ alpha(T(h)(b)) for all h.

Each effect has its own strategy (see ``EffectSpec.leq_strategy``):

* finite value spaces enumerate every assignment of the free variables;
* prob checks the vertices h ∈ {0,1}^vars, which is exact because the
  expected value is affine in each variable separately;
* cost does a case analysis on (tick count, endpoint) of the unique path;
* input compares the trees themselves, since h can separate any mismatch;
* the combined effect searches dyadic grids and can only refute exactly.

Witnesses are the first failing assignment in lexicographic order with x0
most significant.
"""
from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .dyadic import ONE, ZERO, Dyadic
from .effects import EffectSpec
from .semantics import UnsupportedEvaluation, algebra, eval_bounds, eval_exact
from .trees import (BOT, TOP, Bot, Leaf, Node, Ref, Top, Tree, TreeLike, _system_of,
                    first_mismatch, substitute, variables)
from .values import INF, Interval

HOLDS = "holds"
REFUTED = "refuted"
AT_RESOLUTION = "holds_at_resolution"


@dataclass
class Decision:
    status: str
    witness: dict | None = None
    values: tuple | None = None
    resolution: int | None = None

    def __post_init__(self):
        if self.status == REFUTED and self.witness is None:
            raise ValueError("a refutation needs a witness")

    @property
    def refuted(self) -> bool:
        return self.status == REFUTED

    @property
    def holds(self) -> bool:
        """True unless refuted (a resolution-bounded verdict counts as holding)."""
        return self.status != REFUTED

    @property
    def decided(self) -> bool:
        return self.status != AT_RESOLUTION


def free_vars(*trees: TreeLike) -> list[int]:
    out: set[int] = set()
    for t in trees:
        out.update(v for v in variables(t) if isinstance(v, int))
    return sorted(out)


# --- assignments -----------------------------------------------------------------

def grid_values(resolution: int) -> list[Interval]:
    """Dyadic intervals with denominator 2^resolution, points first."""
    n = 1 << resolution
    vals = [Interval(Dyadic(i, resolution), Dyadic(j, resolution))
            for i in range(n + 1) for j in range(i, n + 1)]
    return sorted(vals, key=lambda v: (v.hi - v.lo, v.lo))


def candidate_values(effect: EffectSpec, resolution: int | None = None) -> list:
    """The values each variable ranges over in the assignment search."""
    name = effect.name
    if name == "prob":
        return [ZERO, ONE]
    if name == "nondet_prob":
        return grid_values(effect.grid if resolution is None else resolution)
    if name == "cost":
        return [0, INF]
    if name == "input":
        return [BOT, TOP]
    return algebra(effect).values()


def leq_assignments(effect: EffectSpec, vs: Sequence[int],
                    resolution: int | None = None) -> list[dict]:
    vals = candidate_values(effect, resolution)
    return [dict(zip(vs, combo)) for combo in itertools.product(vals, repeat=len(vs))]


# --- single comparisons ---------------------------------------------------------------

def _evaluate(effect: EffectSpec, t: TreeLike, h) -> tuple[Any, Any]:
    """(lower, upper) for alpha(T(h)(t)); equal unless bounds were needed."""
    try:
        v = eval_exact(effect, t, h)
        return v, v
    except UnsupportedEvaluation:
        b = eval_bounds(effect, t, h)
        return b.lower, b.upper


def compare(effect: EffectSpec, a: TreeLike, b: TreeLike, h) -> tuple[bool | None, Any, Any]:
    """Three-valued test of alpha(T(h)(a)) ⊑ alpha(T(h)(b)) plus the values."""
    alg = algebra(effect)
    alo, ahi = _evaluate(effect, a, h)
    blo, bhi = _evaluate(effect, b, h)
    if alg.leq(ahi, blo):
        verdict = True
    elif not alg.leq(alo, bhi):
        verdict = False
    else:
        verdict = None
    va = alo if alo == ahi else (alo, ahi)
    vb = blo if blo == bhi else (blo, bhi)
    return verdict, va, vb


def _search(effect, a, b, assignments) -> tuple[Decision | None, bool]:
    undecided = False
    for h in assignments:
        verdict, va, vb = compare(effect, a, b, h)
        if verdict is False:
            return Decision(REFUTED, h, (va, vb)), undecided
        if verdict is None:
            undecided = True
    return None, undecided


def _cost_shape(t: TreeLike) -> tuple[int, Any]:
    """Tick count and endpoint ("bot", "top" or a variable index) of a cost tree."""
    root, states = _system_of(t)
    n, cur, seen = 0, root, set()
    while True:
        if isinstance(cur, Ref):
            if cur.name in seen:
                return n, "bot"  # infinite ticks
            seen.add(cur.name)
            cur = states[cur.name]
        elif isinstance(cur, Node):
            n += 1
            cur = cur.children[0]
        elif isinstance(cur, Bot):
            return n, "bot"
        elif isinstance(cur, Top):
            return n, "top"
        else:
            return n, cur.value


def _cost_leq(effect, a, b, vs) -> Decision:
    n, ea = _cost_shape(a)
    m, eb = _cost_shape(b)
    h = {v: 0 for v in vs}
    # a ⊑ b  iff  value(a) >= value(b) numerically, for all h
    if ea == "bot":
        ok = True
    elif eb == "bot":
        ok = False
    elif eb == "top" or eb == ea:
        ok = n >= m  # h = 0 is the worst case
    else:
        ok = False  # b ends in a variable a does not share: send it to inf
        h[eb] = INF
    if ok:
        return Decision(HOLDS)
    return Decision(REFUTED, h, (eval_exact(effect, a, h), eval_exact(effect, b, h)))


def _input_leq(effect, a, b, vs) -> Decision:
    bad = first_mismatch(a, b)
    if bad is None:
        return Decision(HOLDS)
    x, y = bad
    h = {v: BOT for v in vs}
    if isinstance(x, Leaf):
        h[x.value] = TOP
    if isinstance(y, Leaf) and not (isinstance(x, Leaf) and x.value == y.value):
        h[y.value] = BOT
    va, vb = eval_exact(effect, a, h), eval_exact(effect, b, h)
    return Decision(REFUTED, h, (va, vb))


def check_leq(effect: EffectSpec, a: TreeLike, b: TreeLike) -> Decision:
    """Decide a ⊑_α b with the effect's strategy."""
    vs = free_vars(a, b)
    strategy = effect.leq_strategy
    if strategy == "case-analysis":
        return _cost_leq(effect, a, b, vs)
    if strategy == "bisimulation":
        return _input_leq(effect, a, b, vs)
    if strategy == "grid":
        for r in range(1, effect.grid + 1):
            found, _ = _search(effect, a, b, leq_assignments(effect, vs, r))
            if found:
                found.resolution = r
                return found
        return Decision(AT_RESOLUTION, resolution=effect.grid)
    found, undecided = _search(effect, a, b, leq_assignments(effect, vs))
    if found:
        return found
    if undecided:
        # only reachable for cyclic prob trees whose bounds did not separate
        return Decision(AT_RESOLUTION, resolution=20)
    return Decision(HOLDS)


def check_equiv(effect: EffectSpec, a: TreeLike, b: TreeLike) -> tuple[Decision, Decision]:
    return check_leq(effect, a, b), check_leq(effect, b, a)


def distinguish(effect: EffectSpec, a: TreeLike, b: TreeLike):
    """(witness, alpha(a), alpha(b)) separating a and b, or None if equivalent."""
    d = check_leq(effect, a, b)
    if d.refuted:
        return d.witness, d.values[0], d.values[1]
    d = check_leq(effect, b, a)
    if d.refuted:
        return d.witness, d.values[1], d.values[0]
    return None


# --- single-valuedness ------------------------------------------------------------------

@dataclass
class SubstitutionRow:
    subst: dict  # variable -> BOT | Leaf(0)
    forward: Decision
    backward: Decision


@dataclass
class SingleValuedReport:
    effect: str
    lhs: TreeLike
    rhs: TreeLike
    rows: list[SubstitutionRow]
    full: Decision
    full_backward: Decision

    def rows_hold(self, direction: str = "both") -> bool:
        fwd = all(r.forward.holds for r in self.rows)
        bwd = all(r.backward.holds for r in self.rows)
        return {"forward": fwd, "backward": bwd, "both": fwd and bwd}[direction]

    @property
    def certifies_failure(self) -> bool:
        """All {⊥, x0} substitution rows agree yet the full relation refutes."""
        return self.rows_hold("both") and (self.full.refuted or self.full_backward.refuted)


def check_single_valued_instance(effect: EffectSpec, a: TreeLike, b: TreeLike
                                 ) -> SingleValuedReport:
    vs = free_vars(a, b)
    rows = []
    for combo in itertools.product([BOT, Leaf(0)], repeat=len(vs)):
        f = dict(zip(vs, combo))
        fa, fb = substitute(f, a), substitute(f, b)
        rows.append(SubstitutionRow(f, check_leq(effect, fa, fb), check_leq(effect, fb, fa)))
    return SingleValuedReport(effect.name, a, b, rows,
                              check_leq(effect, a, b), check_leq(effect, b, a))


# --- batch decisions over a corpus ------------------------------------------------------

@dataclass
class Profiles:
    """Per-tree value vectors over a fixed list of assignments."""

    effect: EffectSpec
    assignments: list[dict]
    values: list
    codes: np.ndarray  # trees x assignments, index into values
    value_leq: np.ndarray = field(repr=False)  # values x values

    def leq_matrix(self) -> np.ndarray:
        """leq[i, j] iff tree i ⊑ tree j under every assignment."""
        _, inverse, small = self.unique()
        return small[np.ix_(inverse, inverse)]

    def unique(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Distinct profiles, the profile index of each tree, and the leq
        matrix between distinct profiles."""
        uniq, inverse = np.unique(self.codes, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        small = np.ones((len(uniq), len(uniq)), dtype=bool)
        for k in range(uniq.shape[1]):
            col = uniq[:, k]
            small &= self.value_leq[np.ix_(col, col)]
        return uniq, inverse, small


def profiles(effect: EffectSpec, trees: Sequence[Tree], assignments: list[dict]) -> Profiles:
    alg = algebra(effect)
    index: dict = {}
    values: list = []
    codes = np.zeros((len(trees), len(assignments)), dtype=np.int32)
    for i, t in enumerate(trees):
        for k, h in enumerate(assignments):
            v = eval_exact(effect, t, h)
            c = index.get(v)
            if c is None:
                c = index[v] = len(values)
                values.append(v)
            codes[i, k] = c
    vl = np.array([[alg.leq(v, w) for w in values] for v in values], dtype=bool)
    return Profiles(effect, assignments, values, codes, vl.reshape(len(values), len(values)))


def batch_leq_profiles(effect: EffectSpec, trees: Sequence[Tree],
                       vs: Sequence[int] | None = None) -> Profiles:
    """Profiles over the same assignments ``check_leq`` quantifies over."""
    if effect.leq_strategy not in ("enumerate", "vertex"):
        raise ValueError(f"batch decisions need a finite strategy, not {effect.leq_strategy}")
    if vs is None:
        vs = free_vars(*trees)
    return profiles(effect, trees, leq_assignments(effect, vs))

