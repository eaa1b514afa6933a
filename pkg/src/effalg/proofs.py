"""Checkable derivations for the axiomatic preorder.

A derivation proves ``lhs <= rhs`` (or ``lhs = rhs``) as a chain of steps,
each rewriting the current tree into the next:

``axiom``        an axiom instance, equations either way round
``refl``         no change
``order``        any tree above the current one in the tree order
``trans``        two sub-chains through an intermediate tree
``congruence``   a sub-chain applied to the subtree at ``path``
``subst``        a sub-derivation ``l <= r`` used at ``f*(l) <= f*(r)``
``assumption``   a labelled, externally justified inequation

Any step may record its ``result`` tree, which the checker then verifies.
Limit facts that need admissibility are outside this fragment.

The on-disk format is JSON with trees in the concrete syntax.
"""
from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .effects import EffectSpec, InstantiationError, get_effect, instantiate_axiom
from .syntax import ParseError, parse_tree, print_tree
from .trees import TreeLike, as_term, replace_at, substitute, subtree_at, tree_leq

DATA_DIR = Path(__file__).parent / "data" / "proofs"


class DerivationError(ValueError):
    def __init__(self, step: int, reason: str):
        super().__init__(f"step {step}: {reason}")
        self.step = step
        self.reason = reason


class _StepFailure(Exception):
    pass


@dataclass
class Step:
    result: TreeLike | None = field(default=None, kw_only=True)


@dataclass
class Refl(Step):
    pass


@dataclass
class AxiomStep(Step):
    name: str
    subst: dict[int, TreeLike]
    direction: str = "lr"


@dataclass
class OrderStep(Step):
    target: TreeLike


@dataclass
class SubProof:
    steps: list[Step]
    lhs: TreeLike | None = None
    rhs: TreeLike | None = None


@dataclass
class TransStep(Step):
    via: TreeLike
    left: list[Step]
    right: list[Step]


@dataclass
class CongruenceStep(Step):
    path: tuple[int, ...]
    proof: SubProof


@dataclass
class SubstStep(Step):
    mapping: dict[int, TreeLike]
    proof: SubProof


@dataclass
class AssumptionStep(Step):
    label: str


@dataclass
class Assumption:
    label: str
    lhs: TreeLike
    rhs: TreeLike


@dataclass
class Derivation:
    effect: str
    lhs: TreeLike
    rhs: TreeLike
    steps: list[Step]
    relation: str = "leq"
    converse: list[Step] | None = None
    assumptions: list[Assumption] = field(default_factory=list)
    params: dict = field(default_factory=dict)


# --- checking --------------------------------------------------------------------

def _same(a: TreeLike, b: TreeLike) -> bool:
    return as_term(a) == as_term(b)


class _Checker:
    def __init__(self, effect: EffectSpec, assumptions: Mapping[str, tuple]):
        self.effect = effect
        self.assumptions = assumptions

    def chain(self, start: TreeLike, steps: Sequence[Step]) -> TreeLike:
        cur = start
        for step in steps:
            cur = self.step(cur, step)
        return cur

    def sub(self, start: TreeLike, proof: SubProof) -> TreeLike:
        if proof.lhs is not None and not _same(proof.lhs, start):
            raise _StepFailure(f"sub-proof starts at {print_tree(proof.lhs)}, "
                               f"expected {print_tree(start)}")
        end = self.chain(start, proof.steps)
        if proof.rhs is not None and not _same(proof.rhs, end):
            raise _StepFailure(f"sub-proof ends at {print_tree(end)}, "
                               f"not the stated {print_tree(proof.rhs)}")
        return end

    def step(self, cur: TreeLike, step: Step) -> TreeLike:
        new = self._apply(cur, step)
        if step.result is not None and not _same(step.result, new):
            raise _StepFailure(f"step yields {print_tree(new)}, "
                               f"not the recorded {print_tree(step.result)}")
        return new

    def _apply(self, cur: TreeLike, step: Step) -> TreeLike:
        if isinstance(step, Refl):
            return cur
        if isinstance(step, AxiomStep):
            return self._axiom(cur, step)
        if isinstance(step, OrderStep):
            if not tree_leq(cur, step.target):
                raise _StepFailure(f"order violation: {print_tree(cur)} is not below "
                                   f"{print_tree(step.target)}")
            return step.target
        if isinstance(step, TransStep):
            mid = self.chain(cur, step.left)
            if not _same(mid, step.via):
                raise _StepFailure(f"left chain ends at {print_tree(mid)}, "
                                   f"not at {print_tree(step.via)}")
            return self.chain(mid, step.right)
        if isinstance(step, CongruenceStep):
            path = tuple(step.path)
            try:
                inner = subtree_at(as_term(cur), path)
            except IndexError:
                raise _StepFailure(f"bad path {list(path)}") from None
            return replace_at(as_term(cur), path, as_term(self.sub(inner, step.proof)))
        if isinstance(step, SubstStep):
            if step.proof.lhs is None:
                raise _StepFailure("a substitution step needs the sub-proof's lhs")
            start = step.proof.lhs
            if not _same(substitute(step.mapping, start), cur):
                raise _StepFailure("substituted sub-proof lhs does not match the current tree")
            end = self.sub(start, step.proof)
            return substitute(step.mapping, end)
        if isinstance(step, AssumptionStep):
            if step.label not in self.assumptions:
                raise _StepFailure(f"unknown assumption {step.label!r}")
            lhs, rhs = self.assumptions[step.label]
            if not _same(lhs, cur):
                raise _StepFailure(f"assumption {step.label} does not apply to {print_tree(cur)}")
            return rhs
        raise _StepFailure(f"unknown step {step!r}")

    def _axiom(self, cur: TreeLike, step: AxiomStep) -> TreeLike:
        try:
            ax = self.effect.axiom(step.name)
            lhs, rhs = instantiate_axiom(self.effect, ax, step.subst)
        except (KeyError, InstantiationError) as exc:
            raise _StepFailure(f"invalid axiom instance: {exc}") from None
        if step.direction == "lr":
            src, dst = lhs, rhs
        elif step.direction == "rl":
            if ax.kind != "equation":
                raise _StepFailure(f"inequation {ax.name} used backwards")
            src, dst = rhs, lhs
        else:
            raise _StepFailure(f"bad direction {step.direction!r}")
        if not _same(src, cur):
            raise _StepFailure(f"axiom {ax.name} ({step.direction}) instance "
                               f"{print_tree(src)} does not match {print_tree(cur)}")
        return dst


def _assumption_table(d: Derivation, assumptions) -> dict[str, tuple]:
    if assumptions is None:
        return {a.label: (a.lhs, a.rhs) for a in d.assumptions}
    if isinstance(assumptions, Mapping):
        return dict(assumptions)
    return {str(i): tuple(pair) for i, pair in enumerate(assumptions)}


def check_derivation(effect: EffectSpec, d: Derivation, assumptions=None) -> None:
    """Raise :class:`DerivationError` at the first invalid step.

    ``assumptions`` overrides the document's own: a mapping label -> (lhs,
    rhs) or a list of pairs labelled "0", "1", ...  Steps of the converse
    chain are numbered after the forward chain.
    """
    if d.effect != effect.name:
        raise DerivationError(0, f"derivation is for {d.effect}, not {effect.name}")
    checker = _Checker(effect, _assumption_table(d, assumptions))
    chains = [(d.lhs, d.rhs, d.steps)]
    if d.relation == "eq":
        if d.converse is None:
            raise DerivationError(len(d.steps), "an equation needs a converse chain")
        chains.append((d.rhs, d.lhs, d.converse))
    elif d.relation != "leq":
        raise DerivationError(0, f"bad relation {d.relation!r}")
    offset = 0
    for start, goal, steps in chains:
        cur = start
        for i, step in enumerate(steps):
            try:
                cur = checker.step(cur, step)
            except _StepFailure as exc:
                raise DerivationError(offset + i, str(exc)) from None
        if not _same(cur, goal):
            raise DerivationError(offset + max(len(steps) - 1, 0),
                                  f"chain ends at {print_tree(cur)}, not {print_tree(goal)}")
        offset += len(steps)


def is_valid(effect: EffectSpec, d: Derivation, assumptions=None) -> bool:
    try:
        check_derivation(effect, d, assumptions)
    except DerivationError:
        return False
    return True


def effect_for(d: Derivation) -> EffectSpec:
    return get_effect(d.effect, **d.params)


# --- serialisation -----------------------------------------------------------------

def _var_map_out(m: Mapping[int, TreeLike]) -> dict:
    return {f"x{k}": print_tree(v) for k, v in sorted(m.items())}


def _step_out(s: Step) -> dict:
    if isinstance(s, Refl):
        out = {"rule": "refl"}
    elif isinstance(s, AxiomStep):
        out = {"rule": "axiom", "name": s.name, "direction": s.direction,
               "subst": _var_map_out(s.subst)}
    elif isinstance(s, OrderStep):
        out = {"rule": "order", "target": print_tree(s.target)}
    elif isinstance(s, TransStep):
        out = {"rule": "trans", "via": print_tree(s.via),
               "left": [_step_out(x) for x in s.left],
               "right": [_step_out(x) for x in s.right]}
    elif isinstance(s, CongruenceStep):
        out = {"rule": "congruence", "path": list(s.path), "proof": _sub_out(s.proof)}
    elif isinstance(s, SubstStep):
        out = {"rule": "subst", "map": _var_map_out(s.mapping), "proof": _sub_out(s.proof)}
    elif isinstance(s, AssumptionStep):
        out = {"rule": "assumption", "label": s.label}
    else:
        raise TypeError(f"unknown step {s!r}")
    if s.result is not None:
        out["result"] = print_tree(s.result)
    return out


def _sub_out(p: SubProof) -> dict:
    out: dict = {}
    if p.lhs is not None:
        out["lhs"] = print_tree(p.lhs)
    if p.rhs is not None:
        out["rhs"] = print_tree(p.rhs)
    out["steps"] = [_step_out(x) for x in p.steps]
    return out


def to_json(d: Derivation) -> dict:
    out: dict = {"effect": d.effect}
    if d.params:
        out["params"] = d.params
    out["conclusion"] = {"lhs": print_tree(d.lhs), "rhs": print_tree(d.rhs),
                         "relation": d.relation}
    out["assumptions"] = [{"label": a.label, "lhs": print_tree(a.lhs), "rhs": print_tree(a.rhs)}
                          for a in d.assumptions]
    out["steps"] = [_step_out(s) for s in d.steps]
    if d.converse is not None:
        out["converse"] = [_step_out(s) for s in d.converse]
    return out


def dumps(d: Derivation) -> str:
    return json.dumps(to_json(d), indent=2, ensure_ascii=False) + "\n"


class DerivationFormatError(ValueError):
    pass


class _Reader:
    def __init__(self, effect: EffectSpec):
        self.sig = effect.signature

    def tree(self, text) -> TreeLike:
        if not isinstance(text, str):
            raise DerivationFormatError(f"expected a tree string, got {text!r}")
        try:
            return parse_tree(text, self.sig)
        except ParseError as exc:
            raise DerivationFormatError(f"bad tree {text!r}: {exc}") from None

    def var_map(self, obj) -> dict[int, TreeLike]:
        out = {}
        for k, v in obj.items():
            if not (k.startswith("x") and k[1:].isdigit()):
                raise DerivationFormatError(f"bad variable name {k!r}")
            out[int(k[1:])] = self.tree(v)
        return out

    def steps(self, arr) -> list[Step]:
        return [self.step(s) for s in arr]

    def sub(self, obj) -> SubProof:
        return SubProof(self.steps(obj.get("steps", [])),
                        self.tree(obj["lhs"]) if "lhs" in obj else None,
                        self.tree(obj["rhs"]) if "rhs" in obj else None)

    def step(self, obj) -> Step:
        rule = obj.get("rule")
        result = self.tree(obj["result"]) if "result" in obj else None
        try:
            if rule == "refl":
                s: Step = Refl()
            elif rule == "axiom":
                s = AxiomStep(obj["name"], self.var_map(obj.get("subst", {})),
                              obj.get("direction", "lr"))
            elif rule == "order":
                s = OrderStep(self.tree(obj["target"]))
            elif rule == "trans":
                s = TransStep(self.tree(obj["via"]), self.steps(obj["left"]),
                              self.steps(obj["right"]))
            elif rule == "congruence":
                s = CongruenceStep(tuple(obj["path"]), self.sub(obj["proof"]))
            elif rule == "subst":
                s = SubstStep(self.var_map(obj["map"]), self.sub(obj["proof"]))
            elif rule == "assumption":
                s = AssumptionStep(obj["label"])
            else:
                raise DerivationFormatError(f"unknown rule {rule!r}")
        except KeyError as exc:
            raise DerivationFormatError(f"{rule} step missing field {exc}") from None
        s.result = result
        return s


def from_json(obj: dict) -> Derivation:
    try:
        params = obj.get("params", {})
        effect = get_effect(obj["effect"], **params)
        r = _Reader(effect)
        concl = obj["conclusion"]
        return Derivation(
            effect=obj["effect"],
            lhs=r.tree(concl["lhs"]),
            rhs=r.tree(concl["rhs"]),
            relation=concl.get("relation", "leq"),
            steps=r.steps(obj["steps"]),
            converse=r.steps(obj["converse"]) if "converse" in obj else None,
            assumptions=[Assumption(a["label"], r.tree(a["lhs"]), r.tree(a["rhs"]))
                         for a in obj.get("assumptions", [])],
            params=params,
        )
    except KeyError as exc:
        raise DerivationFormatError(f"missing field {exc}") from None


def loads(text: str) -> Derivation:
    return from_json(json.loads(text))


def load(path) -> Derivation:
    return loads(Path(path).read_text(encoding="utf-8"))


def shipped(name: str) -> Path:
    """Path of a derivation file bundled with the package."""
    return DATA_DIR / (name if name.endswith(".json") else name + ".json")
