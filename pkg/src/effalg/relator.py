"""The relator Γ^α on finite carriers and its four laws.

a Γ^α(R) b holds iff alpha(T f a) ⊑ alpha(T g b) for every pair of maps
f: X -> A, g: Y -> A with f(x) ⊑ g(y) whenever x R y.  Both sides depend on
a tree only through its *profile*, the vector of its values under every
f: X -> A, so the law checks work on distinct profiles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dyadic import ONE, ZERO
from .effects import EffectSpec
from .enumeration import enumerate_trees
from .relations import AT_RESOLUTION, HOLDS, REFUTED, Decision, grid_values
from .semantics import algebra, eval_exact
from .trees import BOT, TOP, BinaryRelation, Leaf, Tree, map_tree


class UnsupportedValueSpace(ValueError):
    pass


@dataclass
class RelatorQuery:
    effect: EffectSpec
    X: frozenset
    Y: frozenset
    R: BinaryRelation | set
    a: Tree
    b: Tree


def relator_values(effect: EffectSpec, resolution: int | None = None) -> list:
    if effect.name in ("nondet", "store", "exceptions"):
        return algebra(effect).values()
    if effect.name == "prob":
        return [ZERO, ONE]  # alpha is linear in the leaf values
    if effect.name == "nondet_prob":
        return grid_values(effect.grid if resolution is None else resolution)
    raise UnsupportedValueSpace(f"the relator is not decided for {effect.name}")


def _pairs(R) -> set:
    return set(R.pairs) if isinstance(R, BinaryRelation) else set(R)


def relator_decide(q: RelatorQuery) -> Decision:
    effect = q.effect
    alg = algebra(effect)
    xs, ys = sorted(q.X), sorted(q.Y)
    pairs = _pairs(q.R)
    res = range(1, effect.grid + 1) if effect.name == "nondet_prob" else [None]
    for r in res:
        vals = relator_values(effect, r)
        for fv in itertools.product(vals, repeat=len(xs)):
            f = dict(zip(xs, fv))
            for gv in itertools.product(vals, repeat=len(ys)):
                g = dict(zip(ys, gv))
                if not all(alg.leq(f[x], g[y]) for x, y in pairs):
                    continue
                va = eval_exact(effect, q.a, f)
                vb = eval_exact(effect, q.b, g)
                if not alg.leq(va, vb):
                    return Decision(REFUTED, {"f": f, "g": g}, (va, vb), r)
    if effect.name == "nondet_prob":
        return Decision(AT_RESOLUTION, resolution=effect.grid)
    return Decision(HOLDS)


def relator_lift(q: RelatorQuery) -> bool:
    return relator_decide(q).holds


# --- law checking ----------------------------------------------------------------------

@dataclass
class _Carrier:
    elements: tuple
    trees: list[Tree]
    maps: list[tuple]  # all functions elements -> A, as value tuples
    codes: np.ndarray  # distinct profiles x maps
    inverse: np.ndarray  # tree -> distinct profile
    index: dict = field(default_factory=dict)


@dataclass
class RelatorLawReport:
    effect: str
    max_carrier: int
    max_depth: int
    checked: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return sum(len(v) for v in self.violations.values())


class _Laws:
    def __init__(self, effect: EffectSpec, max_carrier: int, max_depth: int):
        self.effect = effect
        self.alg = algebra(effect)
        self.candidates = relator_values(effect)
        self.values = list(self.candidates)
        self.vindex = {v: i for i, v in enumerate(self.values)}
        self.vleq = np.array([[self.alg.leq(v, w) for w in self.values] for v in self.values])
        self.max_depth = max_depth
        self.carriers = {n: self._carrier(tuple(range(n))) for n in range(1, max_carrier + 1)}
        self._gamma_cache: dict = {}

    def _carrier(self, elements: tuple) -> _Carrier:
        atoms = [BOT, TOP] + [Leaf(x) for x in elements]
        trees = enumerate_trees(self.effect.signature, atoms, self.max_depth)
        maps = list(itertools.product(self.candidates, repeat=len(elements)))
        raw = np.zeros((len(trees), len(maps)), dtype=np.int32)
        for i, t in enumerate(trees):
            for k, m in enumerate(maps):
                v = eval_exact(self.effect, t, dict(zip(elements, m)))
                if v not in self.vindex:
                    self.vindex[v] = len(self.values)
                    self.values.append(v)
                raw[i, k] = self.vindex[v]
        # values outside the candidate set may appear (e.g. 1/2 for prob)
        self.vleq = np.array([[self.alg.leq(v, w) for w in self.values] for v in self.values])
        codes, inverse = np.unique(raw, axis=0, return_inverse=True)
        return _Carrier(elements, trees, maps, codes, inverse.reshape(-1),
                        {t: i for i, t in enumerate(trees)})

    def relations(self, X: _Carrier, Y: _Carrier) -> list[frozenset]:
        prod = [(x, y) for x in X.elements for y in Y.elements]
        return [frozenset(p for i, p in enumerate(prod) if mask >> i & 1)
                for mask in range(1 << len(prod))]

    def gamma(self, X: _Carrier, Y: _Carrier, R: frozenset) -> np.ndarray:
        """Γ(R) on distinct profiles (rows of X.codes against rows of Y.codes)."""
        key = (len(X.elements), len(Y.elements), R)
        hit = self._gamma_cache.get(key)
        if hit is not None:
            return hit
        leq = self.vleq
        out = np.ones((len(X.codes), len(Y.codes)), dtype=bool)
        for i, fm in enumerate(X.maps):
            f = dict(zip(X.elements, fm))
            for j, gm in enumerate(Y.maps):
                g = dict(zip(Y.elements, gm))
                if all(self.alg.leq(f[x], g[y]) for x, y in R):
                    out &= leq[np.ix_(X.codes[:, i], Y.codes[:, j])]
        self._gamma_cache[key] = out
        return out


def check_relator_laws(effect: EffectSpec, max_carrier: int = 2, max_depth: int = 2
                       ) -> RelatorLawReport:
    """Exhaustively check identity, composition, monotonicity and reindexing
    over carriers {0..n-1}, n <= max_carrier, and trees up to max_depth."""
    L = _Laws(effect, max_carrier, max_depth)
    rep = RelatorLawReport(effect.name, max_carrier, max_depth)
    names = ("identity", "composition", "monotonicity", "reindexing")
    rep.checked = {n: 0 for n in names}
    rep.violations = {n: [] for n in names}
    C = L.carriers

    for n, X in C.items():
        ident = frozenset((x, x) for x in X.elements)
        g = L.gamma(X, X, ident)
        rep.checked["identity"] += len(X.codes)
        for p in np.nonzero(~np.diag(g))[0]:
            rep.violations["identity"].append((n, X.trees[int(np.argmax(X.inverse == p))]))

    for (nx, X), (ny, Y) in itertools.product(C.items(), repeat=2):
        rels = L.relations(X, Y)
        gammas = {R: L.gamma(X, Y, R) for R in rels}
        for R, S in itertools.product(rels, repeat=2):
            if R <= S:
                rep.checked["monotonicity"] += 1
                if (gammas[R] & ~gammas[S]).any():
                    rep.violations["monotonicity"].append((nx, ny, sorted(R), sorted(S)))
        for nz, Z in C.items():
            for R in rels:
                for S in L.relations(Y, Z):
                    RS = frozenset((x, z) for x, y in R for y2, z in S if y == y2)
                    comp = (gammas[R].astype(np.int32) @ L.gamma(Y, Z, S).astype(np.int32)) > 0
                    rep.checked["composition"] += 1
                    if (comp & ~L.gamma(X, Z, RS)).any():
                        rep.violations["composition"].append((nx, ny, nz, sorted(R), sorted(S)))

    # reindexing: Γ((f×g)^{-1} R) = (Tf × Tg)^{-1} Γ(R)
    for (nx2, X2), (ny2, Y2), (nx, X), (ny, Y) in itertools.product(C.items(), repeat=4):
        reps_x = _representatives(X2)
        reps_y = _representatives(Y2)
        for fm in itertools.product(X.elements, repeat=nx2):
            img_x = [X.inverse[X.index[map_tree(lambda v: fm[v], t)]] for t in reps_x]
            for gm in itertools.product(Y.elements, repeat=ny2):
                img_y = [Y.inverse[Y.index[map_tree(lambda v: gm[v], t)]] for t in reps_y]
                for R in L.relations(X, Y):
                    pulled = frozenset((x, y) for x in X2.elements for y in Y2.elements
                                       if (fm[x], gm[y]) in R)
                    lhs = L.gamma(X2, Y2, pulled)
                    rhs = L.gamma(X, Y, R)[np.ix_(img_x, img_y)]
                    rep.checked["reindexing"] += 1
                    if (lhs != rhs).any():
                        rep.violations["reindexing"].append((fm, gm, sorted(R)))
    return rep


def _representatives(C: _Carrier) -> list[Tree]:
    """One tree per distinct profile, in profile order."""
    first: dict[int, Tree] = {}
    for t, p in zip(C.trees, C.inverse):
        first.setdefault(int(p), t)
    return [first[p] for p in range(len(C.codes))]

