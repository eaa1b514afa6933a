"""Bounded axiomatic derivability over a finite corpus of trees.

The generating steps are single axiom rewrites at any position (equations in
both directions, inequations left to right) and single order steps (a
subtree replaced by ⊤, or a ⊥ leaf replaced by any tree).  Closing these
under reflexivity and composition for a fixed number of rounds gives an
under-approximation of the axiomatic preorder restricted to the corpus; the
congruence rule is built in because rewriting happens at every position.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .effects import EffectSpec
from .enumeration import enumerate_trees
from .relations import batch_leq_profiles
from .trees import (BOT, TOP, Bot, Leaf, Node, Top, Tree, contains_rec, depth, positions,
                    replace_at, substitute, variables)


def match(pattern: Tree, term: Tree, binding: dict | None = None) -> dict | None:
    """First-order matching; ``Leaf(i)`` in the pattern is metavariable i."""
    binding = {} if binding is None else binding
    stack = [(pattern, term)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Leaf):
            seen = binding.get(p.value)
            if seen is None:
                binding[p.value] = t
            elif seen != t:
                return None
        elif isinstance(p, Node):
            if not (isinstance(t, Node) and t.op == p.op and len(t.children) == len(p.children)):
                return None
            stack.extend(zip(p.children, t.children))
        elif p != t:
            return None
    return binding


def rewrite_rules(effect: EffectSpec) -> list[tuple[str, Tree, Tree]]:
    """Directed rules (name, lhs, rhs) from the finitary axioms."""
    rules = []
    for ax in effect.axioms:
        if contains_rec(ax.lhs) or contains_rec(ax.rhs):
            continue  # limit axioms need admissibility
        rules.append((ax.name, ax.lhs, ax.rhs))
        if ax.kind == "equation":
            rules.append((ax.name + "^-1", ax.rhs, ax.lhs))
    return rules


def corpus(effect: EffectSpec, depth_bound: int = 2, nvars: int = 2) -> list[Tree]:
    atoms = [BOT, TOP] + [Leaf(i) for i in range(nvars)]
    return enumerate_trees(effect.signature, atoms, depth_bound)


def generating_edges(effect: EffectSpec, trees: Sequence[Tree], depth_bound: int,
                     fill_atoms: Sequence[Tree]) -> set[tuple[int, int]]:
    """One-step rewrite and order edges between corpus trees."""
    index = {t: i for i, t in enumerate(trees)}
    by_depth: dict[int, list[int]] = defaultdict(list)
    for i, t in enumerate(trees):
        by_depth[depth(t)].append(i)
    rules_by_root: dict = defaultdict(list)
    wildcard = []
    for name, lhs, rhs in rewrite_rules(effect):
        unbound = sorted(set(variables(rhs)) - set(variables(lhs)))
        entry = (lhs, rhs, unbound)
        if isinstance(lhs, Leaf):
            wildcard.append(entry)
        elif isinstance(lhs, Node):
            rules_by_root[lhs.op].append(entry)
        else:
            rules_by_root[type(lhs).__name__].append(entry)

    edges: set[tuple[int, int]] = set()
    for i, t in enumerate(trees):
        for path, sub in positions(t):
            key = sub.op if isinstance(sub, Node) else type(sub).__name__
            for lhs, rhs, unbound in rules_by_root.get(key, []) + wildcard:
                b = match(lhs, sub)
                if b is None:
                    continue
                for fill in itertools.product(fill_atoms, repeat=len(unbound)):
                    full = {**b, **dict(zip(unbound, fill))}
                    j = index.get(replace_at(t, path, substitute(full, rhs)))
                    if j is not None and j != i:
                        edges.add((i, j))
            # order steps
            if not isinstance(sub, Top):
                j = index.get(replace_at(t, path, TOP))
                if j is not None:
                    edges.add((i, j))
            if isinstance(sub, Bot):
                room = depth_bound - len(path)
                for d in range(room + 1):
                    for k in by_depth[d]:
                        j = index.get(replace_at(t, path, trees[k]))
                        if j is not None and j != i:
                            edges.add((i, j))
    return edges


def bounded_closure(n: int, edges: set[tuple[int, int]], rounds: int = 6) -> list[int]:
    """Trees reachable by chains of at most ``rounds`` generating steps, as
    bitsets (bit j of entry i set iff i reaches j)."""
    succ: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        succ[i].append(j)
    reach = [1 << i for i in range(n)]
    for _ in range(rounds):
        new = []
        for i in range(n):
            acc = reach[i]
            for j in succ[i]:
                acc |= reach[j]
            new.append(acc)
        if new == reach:
            break
        reach = new
    return reach


@dataclass
class ComplementationReport:
    effect: str
    trees: int
    edges: int
    edge_violations: list
    closure_violations: int
    derived_pairs: int
    semantic_pairs: int
    rounds: int

    @property
    def contradictions(self) -> int:
        return len(self.edge_violations) + self.closure_violations


def check_complementation(effect: EffectSpec, depth_bound: int = 2, nvars: int = 2,
                          rounds: int = 6, closure: bool = True) -> ComplementationReport:
    """Compare bounded derivability with the evaluation preorder on a corpus.

    Every generating edge must be a semantic inequation; with ``closure`` the
    bounded closure is also compared pair by pair.  Since the semantic
    preorder is transitive the edge check alone already rules out
    contradictions; the closure check confirms it directly.
    """
    trees = corpus(effect, depth_bound, nvars)
    fill = [BOT, TOP] + [Leaf(i) for i in range(nvars)] + [
        Node(op, ()) for op in effect.signature.nullary()]
    edges = generating_edges(effect, trees, depth_bound, fill)
    prof = batch_leq_profiles(effect, trees, list(range(nvars)))
    _, inverse, small = prof.unique()
    bad_edges = [(trees[i], trees[j]) for i, j in sorted(edges)
                 if not small[inverse[i], inverse[j]]]
    closure_bad = 0
    derived = 0
    if closure:
        reach = bounded_closure(len(trees), edges, rounds)
        members = defaultdict(int)
        for i, q in enumerate(inverse):
            members[int(q)] |= 1 << i
        allowed = {}
        for q in range(small.shape[0]):
            acc = 0
            for p in np.nonzero(small[q])[0]:
                acc |= members[int(p)]
            allowed[q] = acc
        for i, r in enumerate(reach):
            derived += r.bit_count()
            if r & ~allowed[int(inverse[i])]:
                closure_bad += 1
    counts = np.bincount(inverse, minlength=small.shape[0])
    semantic = int(counts @ small.astype(np.int64) @ counts)
    return ComplementationReport(effect.name, len(trees), len(edges), bad_edges,
                                 closure_bad, derived, semantic, rounds)
