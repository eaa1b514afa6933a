import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from effalg.effects import EFFECT_NAMES, get_effect
from effalg.enumeration import random_tree
from effalg.trees import BOT, TOP, Leaf, Node, Rec, Ref, RegularTree

settings.register_profile("default", max_examples=150, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ALL_EFFECTS = [get_effect(n) for n in EFFECT_NAMES]


@pytest.fixture(params=EFFECT_NAMES)
def effect(request):
    return get_effect(request.param)


def leaves(nvars=3):
    return st.one_of(st.just(BOT), st.just(TOP), st.builds(Leaf, st.integers(0, nvars - 1)))


def trees(effect=None, nvars=3, max_leaves=12):
    """Finite trees over ``effect``'s signature (or a generic binary one)."""
    ops = effect.signature.operators if effect else (("or", 2), ("por", 2), ("tick", 1))
    nullary = [op for op, ar in ops if ar == 0]
    base = leaves(nvars)
    if nullary:
        base = st.one_of(base, st.sampled_from([Node(op, ()) for op in nullary]))

    def extend(children):
        return st.one_of(*[
            st.tuples(*[children] * ar).map(lambda kids, op=op: Node(op, kids))
            for op, ar in ops if ar > 0])

    return st.recursive(base, extend, max_leaves=max_leaves)


def double_trees(max_leaves=6):
    """Trees whose leaves are trees."""
    inner = trees(max_leaves=max_leaves)
    return st.recursive(st.one_of(st.just(BOT), st.just(TOP), inner.map(Leaf)),
                        lambda c: st.tuples(c, c).map(lambda k: Node("or", k)),
                        max_leaves=max_leaves)


@st.composite
def regular_trees(draw, nvars=2):
    """rec s. op(..) terms with back references to the binder."""
    body = draw(st.recursive(
        st.one_of(leaves(nvars), st.just(Ref("s"))),
        lambda c: st.one_of(st.tuples(c, c).map(lambda k: Node("or", k)),
                            c.map(lambda k: Node("tick", (k,)))),
        max_leaves=6))
    guard = draw(st.sampled_from(["or", "tick"]))
    if guard == "or":
        body = Node("or", (body, draw(st.one_of(leaves(nvars), st.just(Ref("s"))))))
    else:
        body = Node("tick", (body,))
    return RegularTree(Rec("s", body))


def sample_trees(effect, n, depth=3, seed=0, nvars=3):
    rng = random.Random(seed)
    leaf = lambda r: r.choice([BOT, TOP] + [Leaf(i) for i in range(nvars)])  # noqa: E731
    return [random_tree(rng, effect.signature, leaf, depth) for _ in range(n)]
