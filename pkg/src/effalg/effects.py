"""The catalogue of effect theories: signatures, axioms and decision metadata.

Axiom metavariables are ordinary variable leaves ``x0, x1, ...``.  Schemes
indexed by store values or exception names are expanded eagerly, so every
:class:`AxiomScheme` in ``EffectSpec.axioms`` is a concrete axiom whose
``scheme`` and ``indices`` record where it came from.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .trees import (BOT, TOP, Leaf, Node, Rec, Ref, Signature, Tree, TreeLike,
                    substitute, variables)

EFFECT_NAMES = ("nondet", "prob", "store", "exceptions", "input", "cost", "nondet_prob")

VALUE_SPACES = {
    "nondet": "three_point",
    "prob": "dyadic",
    "store": "state_set",
    "exceptions": "flat_exc",
    "input": "closed_tree",
    "cost": "ext_nat",
    "nondet_prob": "interval_pair",
}

LEQ_STRATEGIES = {
    "nondet": "enumerate",
    "prob": "vertex",
    "store": "enumerate",
    "exceptions": "enumerate",
    "input": "bisimulation",
    "cost": "case-analysis",
    "nondet_prob": "grid",
}


class UnknownEffect(ValueError):
    pass


@dataclass(frozen=True)
class AxiomScheme:
    name: str
    kind: str  # "equation" | "inequation"
    lhs: Tree
    rhs: Tree
    scheme: str = ""
    indices: tuple = ()

    @property
    def metavars(self) -> list[int]:
        return sorted(set(variables(self.lhs)) | set(variables(self.rhs)))


@dataclass(frozen=True)
class EffectSpec:
    name: str
    signature: Signature
    axioms: tuple[AxiomScheme, ...]
    store_size: int = 2
    exceptions: tuple[str, ...] = ("e1", "e2")
    grid: int = 3
    value_space: str = ""
    leq_strategy: str = ""

    @property
    def params(self) -> dict:
        return {"store_size": self.store_size, "exceptions": list(self.exceptions),
                "grid": self.grid}

    def axiom(self, name: str) -> AxiomScheme:
        for ax in self.axioms:
            if ax.name == name:
                return ax
        raise KeyError(f"{self.name} has no axiom {name!r}")

    @property
    def schemes(self) -> list[str]:
        seen: list[str] = []
        for ax in self.axioms:
            if ax.scheme not in seen:
                seen.append(ax.scheme)
        return seen


x, y, z, w = (Leaf(i) for i in range(4))


def _eq(name, lhs, rhs, scheme=None, indices=()):
    return AxiomScheme(name, "equation", lhs, rhs, scheme or name, tuple(indices))


def _or(a, b):
    return Node("or", (a, b))


def _por(a, b):
    return Node("por", (a, b))


def _nondet_axioms():
    return [
        _eq("or_idem", _or(x, x), x),
        _eq("or_comm", _or(x, y), _or(y, x)),
        _eq("or_assoc", _or(x, _or(y, z)), _or(_or(x, y), z)),
    ]


def _prob_axioms():
    return [
        _eq("por_idem", _por(x, x), x),
        _eq("por_comm", _por(x, y), _por(y, x)),
        _eq("por_medial", _por(_por(x, y), _por(z, w)), _por(_por(x, z), _por(y, w))),
        # mu s. por(y, s) = y, with y as metavariable x0
        _eq("por_fix", Rec("s", _por(x, Ref("s"))), x),
    ]


def _store_axioms(k: int):
    upd = lambda n, t: Node(f"upd[{n}]", (t,))  # noqa: E731
    xs = [Leaf(m) for m in range(k)]
    out = []
    for n in range(k):
        for m in range(k):
            out.append(_eq(f"upd_upd[{n},{m}]", upd(n, upd(m, x)), upd(m, x),
                           "upd_upd", (n, m)))
    out.append(_eq("lkp_const", Node("lkp", (x,) * k), x))
    for n in range(k):
        # written with rhs x_n in the source; upd_n(x_n) is the sound reading
        out.append(_eq(f"upd_lkp[{n}]", upd(n, Node("lkp", tuple(xs))), upd(n, xs[n]),
                       "upd_lkp", (n,)))
    out.append(_eq("lkp_upd", Node("lkp", tuple(upd(m, xs[m]) for m in range(k))),
                   Node("lkp", tuple(xs))))
    return out


def _exception_axioms(excs):
    raise_ = lambda e: Node(f"raise[{e}]", ())  # noqa: E731
    catch = lambda e, a, b: Node(f"catch[{e}]", (a, b))  # noqa: E731
    out = []
    for e in excs:
        out.append(_eq(f"catch_raise[{e}]", catch(e, raise_(e), x), x, "catch_raise", (e,)))
        for d in excs:
            if d != e:
                out.append(_eq(f"catch_other[{e},{d}]", catch(e, raise_(d), x), raise_(d),
                               "catch_other", (e, d)))
        out.append(_eq(f"catch_idem[{e}]", catch(e, x, x), x, "catch_idem", (e,)))
        out.append(_eq(f"catch_assoc[{e}]", catch(e, catch(e, x, y), z),
                       catch(e, x, catch(e, y, z)), "catch_assoc", (e,)))
        out.append(_eq(f"catch_bot[{e}]", catch(e, BOT, x), BOT, "catch_bot", (e,)))
        out.append(_eq(f"catch_top[{e}]", catch(e, TOP, x), TOP, "catch_top", (e,)))
    return out


def get_effect(name: str, store_size: int = 2,
               exceptions: tuple[str, ...] | list[str] = ("e1", "e2"),
               grid: int = 3) -> EffectSpec:
    if name not in EFFECT_NAMES:
        raise UnknownEffect(f"unknown effect {name!r}; choose from {', '.join(EFFECT_NAMES)}")
    if store_size < 1:
        raise ValueError("store size must be at least 1")
    exceptions = tuple(exceptions)
    if not exceptions:
        raise ValueError("exception set must be non-empty")
    if len(set(exceptions)) != len(exceptions):
        raise ValueError("duplicate exception names")
    if grid < 1:
        raise ValueError("grid resolution must be at least 1")

    omega: frozenset = frozenset()
    if name == "nondet":
        ops, axioms = [("or", 2)], _nondet_axioms()
    elif name == "prob":
        ops, axioms = [("por", 2)], _prob_axioms()
    elif name == "store":
        ops = [("lkp", store_size)] + [(f"upd[{n}]", 1) for n in range(store_size)]
        axioms = _store_axioms(store_size)
        omega = frozenset({"lkp"})
    elif name == "exceptions":
        ops = [(f"raise[{e}]", 0) for e in exceptions] + [(f"catch[{e}]", 2) for e in exceptions]
        axioms = _exception_axioms(exceptions)
    elif name == "input":
        ops, axioms = [("in", 2)], []
    elif name == "cost":
        ops = [("tick", 1)]
        axioms = [AxiomScheme("tick_leq", "inequation", Node("tick", (x,)), x, "tick_leq")]
    else:
        ops = [("or", 2), ("por", 2)]
        axioms = _nondet_axioms() + _prob_axioms() + [
            _eq("por_or_dist", _por(x, _or(y, z)), _or(_por(x, y), _por(x, z)))]
    return EffectSpec(
        name=name,
        signature=Signature(tuple(ops), omega),
        axioms=tuple(axioms),
        store_size=store_size,
        exceptions=exceptions,
        grid=grid,
        value_space=VALUE_SPACES[name],
        leq_strategy=LEQ_STRATEGIES[name],
    )


class InstantiationError(ValueError):
    pass


def instantiate_axiom(effect: EffectSpec, axiom: AxiomScheme | str,
                      subst: Mapping[int, TreeLike], indices: tuple = ()
                      ) -> tuple[TreeLike, TreeLike]:
    """Instantiate an axiom's metavariables.

    ``axiom`` may be a concrete axiom (or its name) or a scheme name; in the
    latter case ``indices`` picks the expanded instance, e.g.
    ``instantiate_axiom(store, "upd_lkp", {...}, (1,))``.
    """
    if isinstance(axiom, str):
        try:
            axiom = effect.axiom(axiom)
        except KeyError:
            matches = [a for a in effect.axioms if a.scheme == axiom]
            if not matches:
                raise InstantiationError(f"{effect.name} has no axiom {axiom!r}") from None
            picked = [a for a in matches if a.indices == tuple(indices)]
            if not picked:
                raise InstantiationError(
                    f"index {tuple(indices)} out of range for scheme {axiom!r}") from None
            axiom = picked[0]
    missing = [v for v in axiom.metavars if v not in subst]
    if missing:
        raise InstantiationError(
            f"missing binding for metavariable(s) {', '.join(f'x{v}' for v in missing)}")
    f = lambda v: subst[v]  # noqa: E731
    return substitute(f, axiom.lhs), substitute(f, axiom.rhs)
