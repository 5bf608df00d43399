import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from glprover import kernel as K
from glprover.farkas import fm_feasible
from glprover.propositional import (Invalid, NotAtomic, Valid, atomic_sequent_valid, decide,
                                    farkas_instance, is_valid, leaves, lift_countermodel,
                                    prove_atomic_hypersequent, prove_atomic_sequent)
from glprover.semantics import eval_hypersequent, sample_refute
from glprover.syntax import Atom, Sequent, parse
from helpers import ATOMS, produced, rand_prop_hypersequent, vertex_max

A, B = Atom("A"), Atom("B")


def valid(text, **kw):
    r = decide(parse(text), **kw)
    assert isinstance(r, Valid), text
    assert K.check(produced(r.proof, "propositional"))
    assert r.proof.conclusion == parse(text)
    return r.proof


def test_self_implication():
    p = valid("=> A -> A")
    assert p.rule == "ImpRight"
    assert [q.conclusion for q in p.premises] == [parse("A => A"), parse("=>")]


def test_prelinearity():
    valid("=> (A -> B) | => (B -> A)")
    valid("=> ((A -> B) -> (B -> A)) -> (B -> A)")


def test_atom_invalid():
    r = decide(parse("=> A"))
    assert isinstance(r, Invalid)
    assert r.valuation == {A: 1} and r.value == 1


def test_quantifiers_rejected():
    with pytest.raises(ValueError):
        decide(parse("=> exists x. A(x)"))


def test_atomic_sequent_examples():
    assert prove_atomic_sequent(parse("A => A", "sequent")).rule == "Id"
    p = prove_atomic_sequent(parse("bot, bot => A, A", "sequent"))
    assert p.rule == "Mix" and all(q.rule == "BotLeft" for q in p.premises)
    p = prove_atomic_sequent(parse("bot, A => B", "sequent"))
    assert p.rule == "WL" and p.premises[0].rule == "BotLeft"
    assert prove_atomic_sequent(parse("=> A", "sequent")) is None
    with pytest.raises(NotAtomic):
        prove_atomic_sequent(parse("=> A -> A", "sequent"))


def test_atomic_hypersequent_certificate():
    h = parse("bot => A | A =>")
    assert not fm_feasible(farkas_instance(h)[0])
    r = prove_atomic_hypersequent(h)
    assert isinstance(r, Valid) and K.check(produced(r.proof, "atomic"))
    assert r.proof.conclusion == h


def test_atomic_hypersequent_countermodel():
    r = prove_atomic_hypersequent(parse("=> A | => B"))
    assert isinstance(r, Invalid)
    assert r.valuation == {A: 1, B: 1}


def test_single_component():
    r = prove_atomic_hypersequent(parse("bot, A => A, B"))
    assert isinstance(r, Valid) and K.check(r.proof)


def test_lift_countermodel():
    v = {A: Fraction(0), B: Fraction(1)}
    assert lift_countermodel([], v) == v
    h = parse("=> A -> B")
    assert eval_hypersequent(lift_countermodel([h], v), h) == 1
    v2 = lift_countermodel([parse("A => A, B")], {B: Fraction(1)})
    assert eval_hypersequent(v2, parse("A => A, B")) == eval_hypersequent(v2, parse("=> B"))


def test_leaves_are_atomic_without_pairs():
    h = parse("(A -> B) -> B => (B -> A) -> A | => A -> B")
    for leaf in leaves(h):
        assert all(s.is_atomic() for s in leaf.components)


def test_counter_budget():
    from glprover.farkas import LPBudgetExceeded
    from glprover.propositional import LPCounter
    with pytest.raises(LPBudgetExceeded):
        decide(parse("A -> B => B -> A | B => A"), LPCounter(budget=0), shortcut=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_plain_search_agrees_with_shortcuts(seed):
    h = rand_prop_hypersequent(random.Random(seed), max_mult=2, depth=1)
    fast, plain = decide(h), decide(h, shortcut=False)
    assert type(fast) is type(plain)
    assert is_valid(h) == isinstance(plain, Valid)
    for r in (fast, plain):
        if isinstance(r, Valid):
            assert K.check(produced(r.proof, "propositional")) and r.proof.conclusion == h
            assert sample_refute(h, 2000) is None
        else:
            assert eval_hypersequent(r.valuation, h) == r.value > 0


@settings(max_examples=80, deadline=None)
@given(st.lists(st.sampled_from(ATOMS[:2] + [parse("bot", "formula")]), max_size=5),
       st.lists(st.sampled_from(ATOMS[:2] + [parse("bot", "formula")]), max_size=5))
def test_atomic_sequent_oracle(ante, succ):
    s = Sequent.of(ante, succ)
    p = prove_atomic_sequent(s)
    assert (p is not None) == (vertex_max(s, ATOMS[:2]) <= 0) == atomic_sequent_valid(s)
    if p is not None:
        assert K.check(p)
