"""Effect trees, the tree monad, the coinductive tree order and relation lifting.

Finite trees are built from :class:`Bot`, :class:`Top`, :class:`Leaf` and
:class:`Node`.  Regular (infinite but finitely presented) trees are mu-terms
that additionally use :class:`Rec` binders and :class:`Ref` back-references;
they are wrapped in :class:`RegularTree`, which also exposes the equivalent
system of recursive equations (``states`` / ``root``).

Depth convention: leaves (and nullary operators) have depth 0, an operator
node has depth one more than its deepest child.
"""
from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Union

OMEGA = "omega"


class Tree:
    """Base class of tree nodes; instances are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Bot(Tree):
    def __repr__(self):
        return "BOT"


@dataclass(frozen=True)
class Top(Tree):
    def __repr__(self):
        return "TOP"


@dataclass(frozen=True)
class Leaf(Tree):
    value: Any

    def __repr__(self):
        return f"Leaf({self.value!r})"


@dataclass(frozen=True)
class Node(Tree):
    op: str
    children: tuple = ()
    _hash: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "_hash", hash((self.op, self.children)))

    def __hash__(self):
        return self._hash


@dataclass(frozen=True)
class Rec(Tree):
    name: str
    body: Tree


@dataclass(frozen=True)
class Ref(Tree):
    name: str


BOT = Bot()
TOP = Top()


@dataclass(frozen=True)
class Signature:
    """Operators with their arities; ``omega`` names the operators whose
    countable arity has been realised at a finite width."""

    operators: tuple[tuple[str, int], ...]
    omega: frozenset = frozenset()

    def __post_init__(self):
        names = [n for n, _ in self.operators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate operator names")

    @cached_property
    def arities(self) -> dict[str, int]:
        return dict(self.operators)

    def arity(self, op: str) -> int:
        try:
            return self.arities[op]
        except KeyError:
            raise KeyError(f"unknown operator {op!r}") from None

    def __contains__(self, op):
        return op in self.arities

    def nullary(self) -> list[str]:
        return [n for n, a in self.operators if a == 0]

    def validate(self, t: Tree | RegularTree) -> None:
        """Raise ``ValueError`` if an operator is unknown or has the wrong child count."""
        for node in subterms(as_term(t)):
            if isinstance(node, Node):
                if node.op not in self.arities:
                    raise ValueError(f"unknown operator {node.op!r}")
                if len(node.children) != self.arities[node.op]:
                    raise ValueError(
                        f"{node.op} expects {self.arities[node.op]} children, "
                        f"got {len(node.children)}")


class UnguardedRecursion(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RegularTree:
    """A possibly infinite tree with finitely many distinct subtrees.

    The canonical representation is the mu-term ``term``; equality is
    structural on that term.  ``states`` and ``root`` give the same tree as
    a finite system of equations whose bodies reference states via ``Ref``.
    """

    term: Tree

    def __eq__(self, other):
        return isinstance(other, RegularTree) and self.term == other.term

    def __hash__(self):
        return hash(("regular", self.term))

    def __repr__(self):
        return f"RegularTree({self.term!r})"

    @cached_property
    def _system(self) -> tuple[dict[str, Tree], str]:
        return _to_system(self.term)

    @property
    def states(self) -> dict[str, Tree]:
        return self._system[0]

    @property
    def root(self) -> str:
        return self._system[1]

    @classmethod
    def from_states(cls, states: Mapping[str, Tree], root: str) -> RegularTree:
        """Build the mu-term for an equation system.

        A state is emitted as ``rec name. body`` only when it is referenced
        from within its own unfolding; other references are inlined.
        """
        def build(name: str, path: tuple[str, ...]) -> Tree:
            path = path + (name,)
            body = graft(states[name], path)
            return Rec(name, body) if name in _free_refs(body) else body

        def graft(t: Tree, path: tuple[str, ...]) -> Tree:
            if isinstance(t, Ref):
                if t.name in path:
                    return t
                return build(t.name, path)
            if isinstance(t, Node):
                return Node(t.op, tuple(graft(c, path) for c in t.children))
            return t

        return cls(build(root, ()))


def _free_refs(t: Tree) -> set[str]:
    if isinstance(t, Ref):
        return {t.name}
    if isinstance(t, Rec):
        return _free_refs(t.body) - {t.name}
    if isinstance(t, Node):
        out: set[str] = set()
        for c in t.children:
            out |= _free_refs(c)
        return out
    return set()


def _to_system(term: Tree) -> tuple[dict[str, Tree], str]:
    states: dict[str, Tree] = {}

    def fresh(name: str) -> str:
        n, i = name, 0
        while n in states or n == "_root":
            i += 1
            n = f"{name}'{i}"
        return n

    def walk(t: Tree, scope: dict[str, str]) -> Tree:
        if isinstance(t, Rec):
            sid = fresh(t.name)
            states[sid] = BOT  # reserve the name
            states[sid] = walk(t.body, {**scope, t.name: sid})
            return Ref(sid)
        if isinstance(t, Ref):
            if t.name not in scope:
                raise ValueError(f"unbound reference {t.name!r}")
            return Ref(scope[t.name])
        if isinstance(t, Node):
            return Node(t.op, tuple(walk(c, scope) for c in t.children))
        return t

    top = walk(term, {})
    if isinstance(top, Ref):
        root = top.name
    else:
        root = "_root"
        states[root] = top
    # reject alias cycles such as rec s. s
    for name in states:
        seen = set()
        cur: Tree = Ref(name)
        while isinstance(cur, Ref):
            if cur.name in seen:
                raise UnguardedRecursion(f"unguarded recursion through {name!r}")
            seen.add(cur.name)
            cur = states[cur.name]
    return states, root


TreeLike = Union[Tree, RegularTree]


def as_term(t: TreeLike) -> Tree:
    return t.term if isinstance(t, RegularTree) else t


def contains_rec(t: Tree) -> bool:
    return any(isinstance(s, Rec) for s in subterms(t))


def wrap(term: Tree) -> TreeLike:
    """Return ``term`` as a plain tree, or as a :class:`RegularTree` if it has binders."""
    return RegularTree(term) if contains_rec(term) else term


def is_finite(t: TreeLike) -> bool:
    return not isinstance(t, RegularTree) and not contains_rec(t)


def subterms(t: Tree) -> Iterable[Tree]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, Node):
            stack.extend(s.children)
        elif isinstance(s, Rec):
            stack.append(s.body)


def depth(t: Tree) -> int:
    if isinstance(t, Node) and t.children:
        return 1 + max(depth(c) for c in t.children)
    if isinstance(t, Rec):
        return depth(t.body)
    return 0


def size(t: Tree) -> int:
    return sum(1 for _ in subterms(t))


def leaves(t: TreeLike) -> list:
    """Payloads of all ``Leaf`` nodes, left to right."""
    out = []

    def go(s):
        if isinstance(s, Leaf):
            out.append(s.value)
        elif isinstance(s, Node):
            for c in s.children:
                go(c)
        elif isinstance(s, Rec):
            go(s.body)

    go(as_term(t))
    return out


def variables(t: TreeLike) -> list[int]:
    """Sorted distinct variable indices occurring in ``t``."""
    return sorted({v for v in leaves(t)})


# --- monad structure -------------------------------------------------------

def _map_term(f: Callable[[Any], Any], t: Tree) -> Tree:
    if isinstance(t, Leaf):
        return Leaf(f(t.value))
    if isinstance(t, Node):
        return Node(t.op, tuple(_map_term(f, c) for c in t.children))
    if isinstance(t, Rec):
        return Rec(t.name, _map_term(f, t.body))
    return t


def map_tree(f: Callable[[Any], Any], t: TreeLike) -> TreeLike:
    """The functor action T(f): relabel every leaf payload through ``f``."""
    out = _map_term(f, as_term(t))
    return RegularTree(out) if isinstance(t, RegularTree) else out


def _graft(t: Tree, fn: Callable[[Any], TreeLike]) -> Tree:
    if isinstance(t, Leaf):
        return as_term(fn(t.value))
    if isinstance(t, Node):
        return Node(t.op, tuple(_graft(c, fn) for c in t.children))
    if isinstance(t, Rec):
        return Rec(t.name, _graft(t.body, fn))
    return t


def flatten(d: TreeLike) -> TreeLike:
    """The monad multiplication: graft each leaf's tree payload in place."""
    out = _graft(as_term(d), lambda payload: payload)
    return wrap(out)


def substitute(f: Callable[[Any], TreeLike] | Mapping, t: TreeLike) -> TreeLike:
    """Kleisli extension ``f*``.  A mapping leaves unmapped variables in place."""
    if isinstance(f, Mapping):
        mapping = f
        f = lambda x: mapping.get(x, Leaf(x))  # noqa: E731
    return wrap(_graft(as_term(t), f))


def unit(x) -> Leaf:
    return Leaf(x)


# --- coinductive order ------------------------------------------------------

def _resolve(t: Tree, states: Mapping[str, Tree]) -> Tree:
    while isinstance(t, Ref):
        t = states[t.name]
    return t


def _system_of(t: TreeLike) -> tuple[Tree, dict[str, Tree]]:
    if isinstance(t, RegularTree):
        states, root = t.states, t.root
        return states[root], states
    if contains_rec(t):
        return _system_of(RegularTree(t))
    return t, {}


def tree_leq(a: TreeLike, b: TreeLike,
             leaf_leq: Callable[[Any, Any], bool] | None = None) -> bool:
    """Decide ``a <= b`` in the coinductive tree order.

    Leaf payloads are compared with ``leaf_leq`` (equality by default, the
    discrete order).  The rules are purely conjunctive, so the greatest
    fixed point holds iff no reachable pair of subterms fails locally.
    """
    return first_mismatch(a, b, leaf_leq) is None


def first_mismatch(a: TreeLike, b: TreeLike,
                   leaf_leq: Callable[[Any, Any], bool] | None = None):
    """A reachable pair of subterms ``(x, y)`` violating the order, or None.

    Pairs are explored depth-first, left to right, from the roots.
    """
    if leaf_leq is None:
        leaf_leq = lambda x, y: x == y  # noqa: E731
    ra, sa = _system_of(a)
    rb, sb = _system_of(b)
    seen = set()
    work = [(ra, rb)]
    while work:
        x, y = work.pop()
        x, y = _resolve(x, sa), _resolve(y, sb)
        if (x, y) in seen:
            continue
        seen.add((x, y))
        if isinstance(x, Bot) or isinstance(y, Top):
            continue
        if isinstance(x, Leaf):
            if not (isinstance(y, Leaf) and leaf_leq(x.value, y.value)):
                return x, y
            continue
        if isinstance(x, Node):
            if not (isinstance(y, Node) and x.op == y.op
                    and len(x.children) == len(y.children)):
                return x, y
            work.extend(reversed(list(zip(x.children, y.children))))
            continue
        # x is Top and y is not Top
        return x, y
    return None


def tree_equiv(a: TreeLike, b: TreeLike) -> bool:
    return tree_leq(a, b) and tree_leq(b, a)


def truncate(t: TreeLike, depth: int, fill: Tree = BOT) -> Tree:
    """Unfold ``t`` and cut every operator node below ``depth`` to ``fill``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    root, states = _system_of(t)

    def go(s: Tree, d: int) -> Tree:
        s = _resolve(s, states)
        if isinstance(s, Node) and s.children:
            if d == 0:
                return fill
            return Node(s.op, tuple(go(c, d - 1) for c in s.children))
        return s

    return go(root, depth)


def reachable_cycle(t: TreeLike) -> bool:
    """True if unfolding ``t`` is infinite (a state reaches itself)."""
    if is_finite(t):
        return False
    root, states = _system_of(t)
    graph = {name: [r.name for r in subterms(body) if isinstance(r, Ref)]
             for name, body in states.items()}
    start = [r.name for r in subterms(root) if isinstance(r, Ref)]
    colour: dict[str, int] = {}

    def dfs(u) -> bool:
        colour[u] = 1
        for v in graph[u]:
            c = colour.get(v, 0)
            if c == 1 or (c == 0 and dfs(v)):
                return True
        colour[u] = 2
        return False

    return any(colour.get(s, 0) == 0 and dfs(s) for s in start)


# --- relation lifting -------------------------------------------------------

@dataclass(frozen=True)
class BinaryRelation:
    left: frozenset
    right: frozenset
    pairs: frozenset

    def __post_init__(self):
        for x, y in self.pairs:
            if x not in self.left or y not in self.right:
                raise ValueError(f"pair {(x, y)} outside carriers")

    @classmethod
    def of(cls, left: Iterable[Hashable], right: Iterable[Hashable],
           pairs: Iterable[tuple]) -> BinaryRelation:
        return cls(frozenset(left), frozenset(right), frozenset(pairs))

    @classmethod
    def identity(cls, carrier: Iterable[Hashable]) -> BinaryRelation:
        c = frozenset(carrier)
        return cls(c, c, frozenset((x, x) for x in c))

    def __contains__(self, pair):
        return pair in self.pairs

    def compose(self, other: BinaryRelation) -> BinaryRelation:
        """Relational composition: ``x (R;S) z`` iff ``x R y`` and ``y S z``."""
        pairs = {(x, z) for x, y in self.pairs for y2, z in other.pairs if y == y2}
        return BinaryRelation(self.left, other.right, frozenset(pairs))

    def __le__(self, other: BinaryRelation) -> bool:
        return self.pairs <= other.pairs


def lift_relation_check(R, a: Tree, b: Tree) -> bool:
    """Decide ``a T<R> b`` for finite trees.

    ``R`` is a :class:`BinaryRelation`, a set of pairs, or a two-argument
    predicate (useful for lifting an already lifted relation).
    """
    rel = R if callable(R) else (lambda x, y: (x, y) in R)
    if isinstance(a, Bot):
        return isinstance(b, Bot)
    if isinstance(a, Top):
        return isinstance(b, Top)
    if isinstance(a, Leaf):
        return isinstance(b, Leaf) and rel(a.value, b.value)
    if isinstance(a, Node):
        return (isinstance(b, Node) and a.op == b.op
                and len(a.children) == len(b.children)
                and all(lift_relation_check(rel, x, y)
                        for x, y in zip(a.children, b.children)))
    raise TypeError(f"lift_relation_check needs finite trees, got {a!r}")


# --- positions --------------------------------------------------------------

def positions(t: Tree) -> Iterable[tuple[tuple[int, ...], Tree]]:
    """All (path, subtree) pairs of a finite tree, preorder."""
    stack = [((), t)]
    while stack:
        path, s = stack.pop()
        yield path, s
        if isinstance(s, Node):
            for i in reversed(range(len(s.children))):
                stack.append((path + (i,), s.children[i]))


def subtree_at(t: Tree, path: Iterable[int]) -> Tree:
    for i in path:
        if not isinstance(t, Node) or not 0 <= i < len(t.children):
            raise IndexError(f"bad path {tuple(path)!r}")
        t = t.children[i]
    return t


def replace_at(t: Tree, path: tuple[int, ...], new: Tree) -> Tree:
    if not path:
        return new
    if not isinstance(t, Node) or not 0 <= path[0] < len(t.children):
        raise IndexError(f"bad path {path!r}")
    i = path[0]
    kids = list(t.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Node(t.op, tuple(kids))
