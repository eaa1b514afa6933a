import json

import pytest

from derivation_corpus import MIN_PER_EFFECT, derivations, mutants
from effalg.effects import EFFECT_NAMES, get_effect
from effalg.proofs import (DATA_DIR, AssumptionStep, Derivation, DerivationError,
                           DerivationFormatError, OrderStep, check_derivation, dumps,
                           effect_for, is_valid, load, loads, shipped)
from effalg.relations import check_leq, check_single_valued_instance
from effalg.syntax import parse_tree as P
from effalg.trees import BOT, TOP, Leaf

SHIPPED = sorted(p.name for p in DATA_DIR.glob("*.json"))


def test_order_violation_is_step_zero():
    d = Derivation("nondet", TOP, BOT, [OrderStep(BOT)])
    with pytest.raises(DerivationError) as err:
        check_derivation(get_effect("nondet"), d)
    assert err.value.step == 0 and "order violation" in err.value.reason


def test_store_bot_below_update():
    d = load(shipped("store_bot_upd"))
    assert (d.lhs, d.rhs) == (BOT, P("upd[1](bot)"))
    check_derivation(get_effect("store"), d)


def test_exception_collapse():
    d = load(shipped("exception_collapse"))
    assert d.relation == "eq" and (d.lhs, d.rhs) == (TOP, P("raise[e1]"))
    assert [a.label for a in d.assumptions] == ["catch_leq"]
    check_derivation(get_effect("exceptions"), d)
    # without the assumption the same chain is rejected
    with pytest.raises(DerivationError, match="unknown assumption"):
        check_derivation(get_effect("exceptions"), d, assumptions={})


def test_assumption_table_holds_forward():
    (a,) = load(shipped("exception_collapse")).assumptions
    rep = check_single_valued_instance(get_effect("exceptions"), a.lhs, a.rhs)
    assert len(rep.rows) == 4 and rep.rows_hold("forward")


@pytest.mark.parametrize("name", SHIPPED)
def test_shipped_files_check_and_round_trip(name):
    path = DATA_DIR / name
    d = load(path)
    check_derivation(effect_for(d), d)
    assert dumps(d) == path.read_text(encoding="utf-8")


def test_wrong_effect_rejected():
    d = load(shipped("nondet_absorb"))
    assert not is_valid(get_effect("prob"), d)


def test_format_errors():
    with pytest.raises(DerivationFormatError):
        loads(json.dumps({"effect": "nondet", "steps": []}))
    with pytest.raises(DerivationFormatError):
        loads(json.dumps({"effect": "nondet", "conclusion": {"lhs": "or(top)", "rhs": "top"},
                          "steps": []}))
    bad = {"effect": "nondet", "conclusion": {"lhs": "top", "rhs": "top"},
           "steps": [{"rule": "jump"}]}
    with pytest.raises(DerivationFormatError, match="unknown rule"):
        loads(json.dumps(bad))


def test_assumption_must_match():
    d = Derivation("nondet", TOP, BOT, [AssumptionStep("a")])
    assert is_valid(get_effect("nondet"), d, {"a": (TOP, BOT)})
    assert not is_valid(get_effect("nondet"), d, {"a": (BOT, TOP)})


# --- corpus -------------------------------------------------------------------------

@pytest.fixture(scope="module", params=EFFECT_NAMES)
def corpus(request):
    return request.param, derivations(request.param)


def test_corpus_size_and_validity(corpus):
    name, ds = corpus
    effect = get_effect(name)
    assert len(ds) >= MIN_PER_EFFECT
    for d in ds:
        check_derivation(effect, d)


def test_corpus_round_trip(corpus):
    _, ds = corpus
    for d in ds:
        text = dumps(d)
        assert dumps(loads(text)) == text


def test_checked_derivations_are_sound(corpus):
    name, ds = corpus
    effect = get_effect(name, grid=2)
    for d in ds:
        assert not check_leq(effect, d.lhs, d.rhs).refuted, dumps(d)
        if d.relation == "eq":
            assert not check_leq(effect, d.rhs, d.lhs).refuted, dumps(d)


def test_mutants_rejected(corpus):
    name, ds = corpus
    effect = get_effect(name)
    pool = [BOT, TOP, Leaf(0), Leaf(1)]
    counted = {"rejected": 0, "noop": 0}
    for d in ds:
        for what, m, noop in mutants(d, effect, pool):
            if noop:
                counted["noop"] += 1
                continue
            assert not is_valid(effect, m), (what, dumps(m))
            counted["rejected"] += 1
    if effect.axioms:
        assert counted["rejected"] > 0
    else:
        assert counted == {"rejected": 0, "noop": 0}
