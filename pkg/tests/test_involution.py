import pytest
from hypothesis import given

from conftest import sample_trees, trees
from effalg.dyadic import ONE
from effalg.effects import EFFECT_NAMES, get_effect
from effalg.enumeration import enumerate_trees
from effalg.involution import (COST_NOTICE, Involution, check_involution_preservation,
                               leafless_tree, negate, negate_value)
from effalg.semantics import eval_exact
from effalg.syntax import parse_tree as P
from effalg.syntax import print_tree
from effalg.trees import BOT, TOP, tree_leq


def test_negate_examples():
    assert negate(P("or(top,bot)")) == P("or(bot,top)")
    t = P("rec s. or(s,s)")
    assert negate(t) == t
    assert negate(P("in(x0, x1)"), Involution({0: 1, 1: 0})) == P("in(x1, x0)")


def test_leaf_map_must_be_involutive():
    with pytest.raises(ValueError):
        Involution({0: 1})


@given(trees())
def test_involutive(t):
    assert negate(negate(t)) == t


@given(trees(max_leaves=6), trees(max_leaves=6))
def test_order_reversing(a, b):
    assert tree_leq(a, b) == tree_leq(negate(b), negate(a))


def test_prob_complement():
    prob = get_effect("prob")
    closed = sample_trees(prob, 1000, depth=5, seed=3, nvars=0)
    for t in closed:
        assert eval_exact(prob, negate(t)) == ONE - eval_exact(prob, t)


def test_store_complement_all_depth_two():
    st = get_effect("store")
    closed = enumerate_trees(st.signature, [BOT, TOP], 2)
    full = frozenset({0, 1})
    for t in closed:
        assert eval_exact(st, negate(t)) == full - eval_exact(st, t)


@pytest.mark.parametrize("name", [n for n in EFFECT_NAMES if n != "cost"])
def test_preservation_report(name):
    rep = check_involution_preservation(get_effect(name), samples=200, seed=1)
    assert rep.finite_ok
    assert rep.derived_checked > 0


def test_nondet_regular_witness():
    rep = check_involution_preservation(get_effect("nondet"), samples=100)
    w = rep.regular_witness
    assert w["tree"] == "rec s. or(s, s)"
    assert str(w["value"]) == "bot" and str(w["negated_tree_value"]) == "bot"
    assert str(w["negated_value"]) == "top"


def test_prob_regular_witness():
    rep = check_involution_preservation(get_effect("prob"), samples=50)
    assert rep.regular_witness["tree"] == print_tree(leafless_tree(get_effect("prob")))


def test_cost_notice():
    rep = check_involution_preservation(get_effect("cost"), samples=50)
    assert rep.notice == COST_NOTICE
    with pytest.raises(ValueError):
        negate_value(get_effect("cost"), 3)
