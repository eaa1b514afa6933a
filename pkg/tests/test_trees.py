from hypothesis import given
from hypothesis import strategies as st

from conftest import double_trees, regular_trees, trees
from effalg.syntax import parse_tree
from effalg.trees import (BOT, TOP, BinaryRelation, Leaf, Node, RegularTree, flatten,
                          lift_relation_check, map_tree, reachable_cycle, substitute,
                          tree_leq, truncate, unit)

P = parse_tree


# --- oracle examples ------------------------------------------------------------

def test_map_tree_examples():
    assert map_tree(lambda n: n, P("or(x0,bot)")) == P("or(x0,bot)")
    assert map_tree(lambda n: n + 1, P("or(x0,bot)")) == P("or(x1,bot)")
    assert map_tree(lambda n: 0, P("por(x2,x5)")) == P("por(x0,x0)")


def test_flatten_examples():
    assert flatten(Leaf(P("por(top,bot)"))) == P("por(top,bot)")
    assert flatten(Node("or", (Leaf(BOT), Leaf(TOP)))) == P("or(bot,top)")
    assert flatten(Node("or", (Leaf(P("or(x0,x1)")), Leaf(TOP)))) == P("or(or(x0,x1),top)")


def test_substitute_examples():
    assert substitute({0: P("por(top,bot)")}, Leaf(0)) == P("por(top,bot)")
    t = P("or(x0, por(x1, bot))")
    assert substitute(lambda n: Leaf(n), t) == t
    assert substitute({0: BOT, 1: TOP}, P("or(x0,x1)")) == P("or(bot,top)")


def test_tree_leq_examples():
    assert tree_leq(BOT, P("por(x0,x1)"))
    assert not tree_leq(Leaf(0), Leaf(1))
    assert tree_leq(P("or(bot,x0)"), P("or(top,x0)"))


def test_truncate_examples():
    assert truncate(P("rec s. tick(s)"), 3, BOT) == P("tick(tick(tick(bot)))")
    assert truncate(P("rec s. por(top,s)"), 2, BOT) == P("por(top,por(top,bot))")
    assert truncate(P("rec s. por(top,s)"), 2, TOP) == P("por(top,por(top,top))")


def test_truncate_is_identity_past_depth():
    t = P("por(top, por(x0, bot))")
    assert truncate(t, 2) == t
    assert truncate(RegularTree(t), 5, TOP) == t


def test_lifting_examples():
    R = BinaryRelation.of({0}, {1}, {(0, 1)})
    assert lift_relation_check(R, Leaf(0), Leaf(1))
    assert not lift_relation_check(R, BOT, TOP)
    assert not lift_relation_check(set(), BOT, TOP)
    assert lift_relation_check(R, P("or(x0,bot)"), P("or(x1,bot)"))


def test_regular_tree_order():
    inf = P("rec s. or(s, s)")
    assert tree_leq(inf, inf)
    assert tree_leq(inf, P("rec t. or(or(t,t), t)"))
    assert not tree_leq(inf, P("or(bot, bot)"))
    assert reachable_cycle(inf) and not reachable_cycle(P("or(x0,top)"))


def test_rec_one_state():
    t = P("rec s. por(top,s)")
    assert isinstance(t, RegularTree) and len(t.states) == 1


# --- monad laws -------------------------------------------------------------------

@given(trees())
def test_right_unit(t):
    assert flatten(map_tree(unit, t)) == t


@given(trees())
def test_left_unit(t):
    assert flatten(unit(t)) == t


@given(double_trees())
def test_flatten_associative(d):
    # d has trees as leaves; lift each once more to get a triple tree
    triple = map_tree(lambda inner: map_tree(unit, inner), d)
    assert flatten(map_tree(flatten, triple)) == flatten(flatten(triple))


@given(st.lists(trees(max_leaves=4), min_size=3, max_size=3),
       st.lists(trees(max_leaves=4), min_size=3, max_size=3), trees())
def test_kleisli_associative(fs, gs, t):
    f = dict(enumerate(fs))
    g = dict(enumerate(gs))
    assert substitute(g, substitute(f, t)) == substitute(
        lambda n: substitute(g, f.get(n, Leaf(n))), t)


# --- order ----------------------------------------------------------------------

@given(trees())
def test_leq_reflexive_and_bounded(t):
    assert tree_leq(t, t)
    assert tree_leq(BOT, t) and tree_leq(t, TOP)


@given(trees(max_leaves=6), trees(max_leaves=6), trees(max_leaves=6))
def test_leq_transitive(a, b, c):
    if tree_leq(a, b) and tree_leq(b, c):
        assert tree_leq(a, c)


@given(trees(), st.data())
def test_leq_transitive_on_raised_chains(t, data):
    # a <= b <= c built by cutting subtrees to bot and raising them to top
    a = truncate(t, data.draw(st.integers(0, 3)), BOT)
    c = truncate(t, data.draw(st.integers(0, 3)), TOP)
    assert tree_leq(a, t) and tree_leq(t, c) and tree_leq(a, c)


@given(regular_trees(), st.integers(0, 6))
def test_truncation_chain(t, n):
    lo0, lo1 = truncate(t, n, BOT), truncate(t, n + 1, BOT)
    hi1, hi0 = truncate(t, n + 1, TOP), truncate(t, n, TOP)
    assert tree_leq(lo0, lo1) and tree_leq(lo1, hi1) and tree_leq(hi1, hi0)
    assert tree_leq(lo1, t) and tree_leq(t, hi1)


# --- lifting ---------------------------------------------------------------------

@given(trees(), st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2))))
def test_lifting_relates_pointwise_related_maps(t, pairs):
    R = {(x, y) for x, y in pairs}
    # pick g(x) related to f(x) = x whenever possible
    g = {x: next((y for a, y in sorted(R) if a == x), None) for x in range(3)}
    if any(g[x] is None for x in range(3)):
        R |= {(x, x) for x in range(3) if g[x] is None}
        g = {x: g[x] if g[x] is not None else x for x in range(3)}
    assert lift_relation_check(R, map_tree(lambda x: x, t), map_tree(g.__getitem__, t))


@given(double_trees(max_leaves=4), st.lists(st.integers(0, 2), min_size=3, max_size=3),
       st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2))))
def test_lifting_commutes_with_flatten(a, g, extra):
    R = set(extra) | {(x, g[x]) for x in range(3)}
    inner = lambda x, y: lift_relation_check(R, x, y)  # noqa: E731
    b = map_tree(lambda s: map_tree(g.__getitem__, s), a)
    assert lift_relation_check(inner, a, b)
    assert lift_relation_check(R, flatten(a), flatten(b))
