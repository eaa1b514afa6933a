"""Eilenberg-Moore algebras for the catalogue effects.

Each effect gets an :class:`Algebra` holding its carrier, order and local
operator functions.  ``eval_exact`` folds those over finite trees; on regular
trees it runs Kleene iteration over the equation system, which is exact when
the carrier has finite height (nondet, store, exceptions) or when the
unfolding has no cycle, and for cost because every path is deterministic.
Probability and the combined effect on cyclic trees go through
``eval_bounds`` instead.
"""
from __future__ import annotations

import random
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .dyadic import HALF, ONE, ZERO, Dyadic
from .effects import EffectSpec
from .enumeration import random_tree
from .syntax import parse_tree, print_tree
from .trees import (BOT, TOP, Bot, Leaf, Node, Ref, RegularTree, Top, Tree, TreeLike,
                    as_term, flatten, is_finite, map_tree, reachable_cycle, substitute,
                    tree_leq, wrap)
from .values import (EXC_BOT, EXC_TOP, INF, FlatExc, Interval, ThreePoint,
                     check_unit_dyadic, raised)

Assignment = Mapping[int, Any]


class UnsupportedEvaluation(ValueError):
    pass


class ValueSpaceError(TypeError):
    pass


class Algebra:
    space = ""
    finite = False
    kleene_exact = True

    def __init__(self, effect: EffectSpec):
        self.effect = effect

    def bottom(self):
        raise NotImplementedError

    def top(self):
        raise NotImplementedError

    def apply(self, op: str, args: list):
        raise NotImplementedError

    def leq(self, v, w) -> bool:
        raise NotImplementedError

    def eq(self, v, w) -> bool:
        return v == w

    def is_value(self, v) -> bool:
        raise NotImplementedError

    def values(self) -> list:
        raise ValueSpaceError(f"the {self.space} value space is infinite")

    def sample(self, rng: random.Random):
        return rng.choice(self.values())

    def format(self, v):
        return str(v)

    def parse(self, text: str):
        raise NotImplementedError

    def check(self, v):
        if not self.is_value(v):
            raise ValueSpaceError(f"{v!r} is not in the {self.space} value space")
        return v

    # evaluation ----------------------------------------------------------

    def fold(self, t: Tree, leaf: Callable[[Any], Any], env: Mapping[str, Any] = {}):
        if isinstance(t, Bot):
            return self.bottom()
        if isinstance(t, Top):
            return self.top()
        if isinstance(t, Leaf):
            return leaf(t.value)
        if isinstance(t, Ref):
            return env[t.name]
        if isinstance(t, Node):
            return self.apply(t.op, [self.fold(c, leaf, env) for c in t.children])
        raise TypeError(f"cannot fold {t!r}")

    def kleene(self, t: RegularTree, leaf: Callable[[Any], Any], max_rounds: int = 100_000):
        states, root = t.states, t.root
        env = {name: self.bottom() for name in states}
        for _ in range(max_rounds):
            new = {name: self.fold(body, leaf, env) for name, body in states.items()}
            if all(self.eq(new[n], env[n]) for n in states):
                return new[root]
            env = new
        raise UnsupportedEvaluation("Kleene iteration did not stabilise")

    def evaluate(self, t: TreeLike, leaf: Callable[[Any], Any]):
        if is_finite(t):
            return self.fold(t, leaf)
        rt = t if isinstance(t, RegularTree) else RegularTree(t)
        if not self.kleene_exact and reachable_cycle(rt):
            raise UnsupportedEvaluation(
                f"exact evaluation of cyclic {self.effect.name} trees is not supported; "
                "use eval_bounds")
        return self.kleene(rt, leaf)


class NondetAlgebra(Algebra):
    space = "three_point"
    finite = True

    def bottom(self):
        return ThreePoint.BOT

    def top(self):
        return ThreePoint.TOP

    def apply(self, op, args):
        a, b = args
        return a if a == b else ThreePoint.DIAMOND

    def leq(self, v, w):
        return v.value <= w.value

    def is_value(self, v):
        return isinstance(v, ThreePoint)

    def values(self):
        return [ThreePoint.BOT, ThreePoint.DIAMOND, ThreePoint.TOP]

    def parse(self, text):
        text = text.strip()
        for v in self.values():
            if text == str(v):
                return v
        if text == "◇":
            return ThreePoint.DIAMOND
        raise ValueError(f"bad nondeterminism value {text!r}")


class ProbAlgebra(Algebra):
    space = "dyadic"
    kleene_exact = False

    def bottom(self):
        return ZERO

    def top(self):
        return ONE

    def apply(self, op, args):
        a, b = args
        return (a + b).half()

    def leq(self, v, w):
        return v <= w

    def is_value(self, v):
        return isinstance(v, Dyadic) and ZERO <= v <= ONE

    def sample(self, rng):
        e = rng.randint(0, 4)
        return Dyadic(rng.randint(0, 1 << e), e)

    def parse(self, text):
        return check_unit_dyadic(Dyadic.parse(text))


class StoreAlgebra(Algebra):
    space = "state_set"
    finite = True

    @property
    def k(self):
        return self.effect.store_size

    def bottom(self):
        return frozenset()

    def top(self):
        return frozenset(range(self.k))

    def apply(self, op, args):
        if op == "lkp":
            return frozenset(m for m in range(self.k) if m in args[m])
        n = int(op[4:-1])  # upd[n]
        return self.top() if n in args[0] else frozenset()

    def leq(self, v, w):
        return v <= w

    def is_value(self, v):
        return isinstance(v, frozenset) and all(isinstance(s, int) and 0 <= s < self.k for s in v)

    def values(self):
        out = []
        for mask in range(1 << self.k):
            out.append(frozenset(m for m in range(self.k) if mask >> m & 1))
        return out

    def format(self, v):
        return sorted(v)

    def parse(self, text):
        body = text.strip().strip("{}[]")
        items = [s for s in re.split(r"[,;|\s]+", body) if s]
        return self.check(frozenset(int(s) for s in items))


class ExceptionAlgebra(Algebra):
    space = "flat_exc"
    finite = True

    def bottom(self):
        return EXC_BOT

    def top(self):
        return EXC_TOP

    def apply(self, op, args):
        if op.startswith("raise["):
            return raised(op[6:-1])
        e = op[6:-1]  # catch[e]
        a, b = args
        return b if a == raised(e) else a

    def leq(self, v, w):
        return v.kind == "bot" or w.kind == "top" or v == w

    def is_value(self, v):
        return isinstance(v, FlatExc) and (v.kind != "raise" or v.exc in self.effect.exceptions)

    def values(self):
        return [EXC_BOT] + [raised(e) for e in self.effect.exceptions] + [EXC_TOP]

    def parse(self, text):
        text = text.strip()
        for v in self.values():
            if text == str(v):
                return v
        raise ValueError(f"bad exception value {text!r}")


class CostAlgebra(Algebra):
    """Extended naturals in reverse order: fewer ticks is better, inf is bottom."""

    space = "ext_nat"

    def bottom(self):
        return INF

    def top(self):
        return 0

    def apply(self, op, args):
        return args[0] + 1

    def leq(self, v, w):
        return v >= w

    def is_value(self, v):
        return v == INF or (isinstance(v, int) and not isinstance(v, bool) and v >= 0)

    def sample(self, rng):
        return INF if rng.random() < 0.2 else rng.randint(0, 6)

    def format(self, v):
        return "inf" if v == INF else v

    def parse(self, text):
        text = text.strip()
        return INF if text in ("inf", "∞") else self.check(int(text))


class InputAlgebra(Algebra):
    """Closed trees under the tree order; the algebra is flattening."""

    space = "closed_tree"

    def bottom(self):
        return BOT

    def top(self):
        return TOP

    def apply(self, op, args):
        return wrap(Node(op, tuple(as_term(a) for a in args)))

    def leq(self, v, w):
        return tree_leq(v, w)

    def eq(self, v, w):
        return tree_leq(v, w) and tree_leq(w, v)

    def is_value(self, v):
        return isinstance(v, (Tree, RegularTree)) and not any(
            isinstance(x, int) for x in _leaf_payloads(v))

    def evaluate(self, t, leaf):
        return substitute(lambda x: leaf(x), t)

    def sample(self, rng):
        return random_tree(rng, self.effect.signature,
                           lambda r: r.choice([BOT, TOP]), 2)

    def format(self, v):
        return print_tree(v)

    def parse(self, text):
        return self.check(parse_tree(text, self.effect.signature))


def _leaf_payloads(t):
    from .trees import leaves
    return leaves(t)


class CombinedAlgebra(Algebra):
    space = "interval_pair"
    kleene_exact = False

    def bottom(self):
        return Interval(ZERO, ZERO)

    def top(self):
        return Interval(ONE, ONE)

    def apply(self, op, args):
        a, b = args
        if op == "or":
            return Interval(min(a.lo, b.lo), max(a.hi, b.hi))
        return Interval((a.lo + b.lo).half(), (a.hi + b.hi).half())

    def leq(self, v, w):
        return v.lo <= w.lo and v.hi <= w.hi

    def is_value(self, v):
        return isinstance(v, Interval)

    def sample(self, rng):
        e = rng.randint(0, 3)
        a, b = sorted(rng.randint(0, 1 << e) for _ in range(2))
        return Interval(Dyadic(a, e), Dyadic(b, e))

    def format(self, v):
        return [str(v.lo), str(v.hi)]

    def parse(self, text):
        body = text.strip().strip("()[]")
        lo, hi = [s for s in re.split(r"[,;\s]+", body) if s]
        return Interval(check_unit_dyadic(Dyadic.parse(lo)), check_unit_dyadic(Dyadic.parse(hi)))


_ALGEBRAS = {
    "nondet": NondetAlgebra,
    "prob": ProbAlgebra,
    "store": StoreAlgebra,
    "exceptions": ExceptionAlgebra,
    "cost": CostAlgebra,
    "input": InputAlgebra,
    "nondet_prob": CombinedAlgebra,
}

_cache: dict[EffectSpec, Algebra] = {}


def algebra(effect: EffectSpec) -> Algebra:
    alg = _cache.get(effect)
    if alg is None:
        alg = _cache[effect] = _ALGEBRAS[effect.name](effect)
    return alg


def _leaf_fn(alg: Algebra, h: Assignment | None):
    h = h or {}

    def leaf(x):
        if x in h:
            return h[x]
        if isinstance(x, int):
            return alg.bottom()
        return alg.check(x)  # tree over values
    return leaf


def eval_exact(effect: EffectSpec, t: TreeLike, h: Assignment | None = None):
    """alpha(T(h)(t)); unmentioned variables default to the bottom value.

    Leaves that are not variable indices are taken to be values already, so
    this is also alpha itself on trees over the carrier.
    """
    alg = algebra(effect)
    return alg.evaluate(t, _leaf_fn(alg, h))


def alpha(effect: EffectSpec, t: TreeLike):
    """The algebra map on trees whose leaves are values."""
    alg = algebra(effect)
    return alg.evaluate(t, alg.check)


def value_leq(effect: EffectSpec, v, w) -> bool:
    alg = algebra(effect)
    alg.check(v)
    alg.check(w)
    return alg.leq(v, w)


def value_eq(effect: EffectSpec, v, w) -> bool:
    alg = algebra(effect)
    return alg.eq(v, w)


# --- bounds ------------------------------------------------------------------

class Bounds(NamedTuple):
    lower: Any
    upper: Any
    converged: bool
    depth: int
    trace: list


def _gap(alg: Algebra, lo, hi) -> Dyadic:
    if isinstance(lo, Interval):
        return max(hi.lo - lo.lo, hi.hi - lo.hi)
    return hi - lo


def _truncated_value(alg: Algebra, t: TreeLike, depth: int, fill: Tree, leaf):
    """alpha of ``truncate(t, depth, fill)``, computed on the shared DAG."""
    if isinstance(t, RegularTree):
        states, root = t.states, t.states[t.root]
    elif is_finite(t):
        states, root = {}, t
    else:
        rt = RegularTree(t)
        states, root = rt.states, rt.states[rt.root]
    fill_value = alg.fold(fill, leaf)
    memo: dict = {}

    def go(s: Tree, d: int):
        while isinstance(s, Ref):
            s = states[s.name]
        if isinstance(s, Node) and s.children:
            if d == 0:
                return fill_value
            key = (s, d)
            if key not in memo:
                memo[key] = alg.apply(s.op, [go(c, d - 1) for c in s.children])
            return memo[key]
        return alg.fold(s, leaf)

    return go(root, depth)


def eval_bounds(effect: EffectSpec, t: TreeLike, h: Assignment | None = None,
                max_depth: int = 20, epsilon: Dyadic = Dyadic(1, 20)) -> Bounds:
    """Bracket alpha(T(h)(t)) by evaluating the bottom- and top-filled
    truncations, doubling the depth (capped at ``max_depth``) until the gap
    is at most ``epsilon``."""
    alg = algebra(effect)
    leaf = _leaf_fn(alg, h)
    if effect.name not in ("prob", "nondet_prob"):
        v = eval_exact(effect, t, h)
        return Bounds(v, v, True, 0, [])
    epsilon = Dyadic.of(epsilon)
    d = min(1, max_depth)
    trace = []
    while True:
        lo = _truncated_value(alg, t, d, BOT, leaf)
        hi = _truncated_value(alg, t, d, TOP, leaf)
        trace.append((d, lo, hi))
        if _gap(alg, lo, hi) <= epsilon:
            return Bounds(lo, hi, True, d, trace)
        if d >= max_depth:
            return Bounds(lo, hi, False, d, trace)
        d = min(2 * d, max_depth)


# --- base relation on closed trees ---------------------------------------------

class BaseOracleUnsupported(ValueError):
    pass


def _nondet_class(t: Tree) -> int:
    kinds = set()
    for s in _closed_leaves(t):
        kinds.add(s)
    if "top" not in kinds:
        return 0
    return 2 if kinds == {"top"} else 1


def _closed_leaves(t: Tree):
    if isinstance(t, Bot):
        yield "bot"
    elif isinstance(t, Top):
        yield "top"
    elif isinstance(t, Node):
        if not t.children:
            yield t.op
        for c in t.children:
            yield from _closed_leaves(c)
    else:
        raise ValueError(f"base_oracle needs closed finite trees, found {t!r}")


def _prob_P(t: Tree) -> Dyadic:
    if isinstance(t, Bot):
        return ZERO
    if isinstance(t, Top):
        return ONE
    if isinstance(t, Node) and t.op == "por":
        return (_prob_P(t.children[0]) + _prob_P(t.children[1])) * HALF
    raise ValueError(f"base_oracle needs closed finite trees, found {t!r}")


def _store_run(t: Tree, state: int) -> bool:
    """Run a closed store tree from ``state``; True iff it ends in top."""
    while True:
        if isinstance(t, Top):
            return True
        if isinstance(t, Bot):
            return False
        if not isinstance(t, Node):
            raise ValueError(f"base_oracle needs closed finite trees, found {t!r}")
        if t.op == "lkp":
            t = t.children[state]
        else:
            state = int(t.op[4:-1])
            t = t.children[0]


def _exc_normal_form(t: Tree) -> str:
    """Rewrite a closed tree to bot, top or raise[e] using the catch axioms."""
    if isinstance(t, Bot):
        return "bot"
    if isinstance(t, Top):
        return "top"
    if isinstance(t, Node):
        if t.op.startswith("raise["):
            return t.op
        e = t.op[6:-1]
        first = _exc_normal_form(t.children[0])
        # catch_e(raise_e, x) = x; catch_e(v, x) = v for v in {bot, top, raise_d}
        return _exc_normal_form(t.children[1]) if first == f"raise[{e}]" else first
    raise ValueError(f"base_oracle needs closed finite trees, found {t!r}")


def _cost_count(t: Tree):
    n = 0
    while isinstance(t, Node):
        n += 1
        t = t.children[0]
    if isinstance(t, Top):
        return n
    if isinstance(t, Bot):
        return INF
    raise ValueError(f"base_oracle needs closed finite trees, found {t!r}")


def base_oracle(effect: EffectSpec, a: Tree, b: Tree) -> bool:
    """Decide the base relation on closed finite trees from its explicit
    per-effect characterisation, without going through an algebra."""
    name = effect.name
    if not (is_finite(a) and is_finite(b)):
        raise ValueError("base_oracle needs finite trees")
    if name == "nondet":
        return _nondet_class(a) <= _nondet_class(b)
    if name == "prob":
        return _prob_P(a) <= _prob_P(b)
    if name == "store":
        return all(_store_run(b, m) for m in range(effect.store_size) if _store_run(a, m))
    if name == "exceptions":
        na, nb = _exc_normal_form(a), _exc_normal_form(b)
        return na == "bot" or nb == "top" or na == nb
    if name == "cost":
        return _cost_count(a) >= _cost_count(b)
    if name == "input":
        if any(isinstance(s, Leaf) for s in _iter_nodes(a)) or \
                any(isinstance(s, Leaf) for s in _iter_nodes(b)):
            raise ValueError("base_oracle needs closed trees")
        return tree_leq(a, b)
    raise BaseOracleUnsupported(
        f"no closed-form base relation for {name}; use check_leq")


def _iter_nodes(t):
    from .trees import subterms
    return subterms(t)


# --- EM laws -----------------------------------------------------------------

@dataclass
class EMReport:
    effect: str
    samples: int
    unit_failures: list = field(default_factory=list)
    mult_failures: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return len(self.unit_failures) + len(self.mult_failures)

    @property
    def ok(self) -> bool:
        return self.failures == 0


def check_em_laws(effect: EffectSpec, sample_count: int = 1000, seed: int = 0,
                  table=None) -> EMReport:
    """Check ``alpha . eta = id`` and ``alpha . T(alpha) = alpha . mu`` on
    random values and double trees.

    With ``table`` (a :class:`~effalg.quotient.ValueTable`) the quotient
    algebra over class indices is checked instead of the exact evaluator.
    """
    rng = random.Random(seed)
    sig = effect.signature
    report = EMReport(effect.name, sample_count)
    if table is not None:
        from .quotient import alpha_quotient
        values = list(range(len(table.classes)))
        a_fn = lambda t: alpha_quotient(table, t, strict=False)  # noqa: E731
        eq = lambda v, w: v == w  # noqa: E731
        sample = lambda r: r.choice(values)  # noqa: E731
        inner_depth, outer_depth = 1, 1
    else:
        alg = algebra(effect)
        a_fn = lambda t: alpha(effect, t)  # noqa: E731
        eq = alg.eq
        sample = alg.sample
        inner_depth, outer_depth = 3, 2
    for _ in range(sample_count):
        v = sample(rng)
        if not eq(a_fn(Leaf(v)), v):
            report.unit_failures.append(v)
        inner = lambda r: random_tree(r, sig, lambda r2: Leaf(sample(r2)), inner_depth)  # noqa: E731
        d = random_tree(rng, sig, lambda r: Leaf(inner(r)), outer_depth)
        left = a_fn(map_tree(a_fn, d))
        right = a_fn(flatten(d))
        if not eq(left, right):
            report.mult_failures.append(d)
    return report
