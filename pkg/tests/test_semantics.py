import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from glprover.semantics import (FiniteStructure, all_structures, eval_formula,
                                eval_hypersequent, evaluate, format_structure,
                                format_valuation, max_over_structures, naive_eval,
                                parse_model, sample_refute)
from glprover.syntax import Atom, BOT, Implies, parse
from helpers import rand_fo

A = Atom("A")
DRINKER = "exists x. (A(x) -> forall y. A(y))"


def test_bot_is_one():
    assert eval_formula({}, BOT) == 1


@given(st.fractions(0, 1))
def test_self_implication_is_zero(x):
    assert eval_formula({A: x}, Implies(A, A)) == 0


def test_drinker_is_zero_on_small_structures():
    f = parse(DRINKER, "formula")
    for size in (1, 2, 3):
        for m in all_structures({}, {"A": 1}, size):
            assert evaluate(m, f) == 0


def test_hypersequent_values():
    assert eval_hypersequent({A: Fraction(3, 4)}, parse("A => A, A")) == Fraction(3, 4)
    assert eval_hypersequent({A: Fraction(1)}, parse("bot, bot => A, A")) == 0
    assert eval_hypersequent({}, parse("=>")) == 0


def test_hypersequent_is_min_of_components():
    v = {A: Fraction(1, 2), Atom("B"): Fraction(1, 3)}
    assert eval_hypersequent(v, parse("=> A | => B")) == Fraction(1, 3)


def test_sample_refute_examples():
    v = sample_refute(parse("=> A"), 100)
    assert v == {A: 1}
    assert sample_refute(parse("A => A"), 10_000) is None
    v = sample_refute(parse("bot => A, A"), 100)
    assert 2 * v[A] - 1 > 0


def test_sample_refute_is_deterministic():
    h = parse("B => A | A, A => B")
    assert sample_refute(h, 500, seed=3) == sample_refute(h, 500, seed=3)


def test_sample_refute_rejects_quantifiers():
    with pytest.raises(ValueError):
        sample_refute(parse("=> " + DRINKER), 10)


def test_relation_values_checked():
    with pytest.raises(ValueError):
        FiniteStructure(1, {}, {"A": {(0,): Fraction(2)}})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_two_evaluators_agree(seed):
    rng = random.Random(seed)
    f = rand_fo(rng, 3)
    size = rng.randint(1, 3)
    grid = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(1, 3)]
    rels = {p: {(d,): rng.choice(grid) for d in range(size)} for p in ("P", "Q")}
    m = FiniteStructure(size, {"c": {(): rng.randrange(size)}}, rels)
    assert eval_formula(m, f) == naive_eval(m, f)


def test_max_over_structures_finds_countermodel():
    best, (m, asg) = max_over_structures(parse("=> exists x. A(x)"), 2)
    assert best == 1
    assert evaluate(m, parse("=> exists x. A(x)"), asg) == 1


def test_model_formats_round_trip():
    v = {A: Fraction(1, 2), Atom("B"): Fraction(1)}
    assert parse_model(format_valuation(v)) == v
    m = FiniteStructure(2, {"f": {(0,): 1, (1,): 0}, "c": {(): 0}},
                        {"R": {(0,): Fraction(1, 2), (1,): Fraction(0)}})
    back = parse_model(format_structure(m))
    assert back.size == 2 and back.functions == m.functions and back.relations == m.relations
