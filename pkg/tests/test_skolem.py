import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from glprover.propositional import Valid, decide
from glprover.skolem import (Exhausted, WitnessSet, build_tree, check_sync, combination,
                             enumerate_terms, find_witnesses, leaf_hypersequents, level_set,
                             tree_dump)
from glprover.syntax import (App, Atom, Implies, Sequent, Signature, has_quantifier, parse,
                             to_approx, to_text)
from helpers import rand_fo_hypersequent

DRINKER = parse("=> exists x. (A(x) -> forall y. A(y))")
C0 = App("c0")


def sk(t):
    return App("sk#2", (t,))


@pytest.fixture(scope="module")
def tree():
    return build_tree(DRINKER)


def test_drinker_steps(tree):
    assert [s.kind for s in tree.steps] == ["RightExists", "RightImp", "RightImp",
                                            "LeftExists", "LeftImp"]
    assert tree.h == 6
    assert tree.vars == ["x#1"]


def test_drinker_leftmost_leaf(tree):
    leaf = tree.nodes[tree.leftmost_path()[-1]]
    want = parse("bot, A(x#1) => bot, A(sk#2(x#1)) | A(x#1) => bot", allow_reserved=True)
    assert leaf.hypersequent == want


def test_drinker_leaves(tree):
    leaves = leaf_hypersequents(tree)
    assert [to_text(h) for h in leaves] == [
        "bot, A(x#1) => bot, A(sk#2(x#1)) | A(x#1) => bot", "A(x#1) =>", "=>"]


def test_level_sets(tree):
    assert [nd.hypersequent for nd in level_set(tree, 1)] == [DRINKER]
    for i in range(1, tree.h + 1):
        assert len(level_set(tree, i)) <= 2 ** (i - 1)
    assert {nd.hypersequent for nd in level_set(tree, tree.h)} == set(leaf_hypersequents(tree))
    with pytest.raises(IndexError):
        level_set(tree, tree.h + 1)


def test_sync_drinker(tree):
    assert check_sync(tree)


def test_sync_detects_corruption():
    t = build_tree(DRINKER)
    nd = t.nodes[3]
    nd.comps = ((0, Sequent.of([], [Atom("Z")])),)
    report = check_sync(t)
    assert not report and any("Z" in v for v in report.violations)


def test_quantifier_free_tree():
    h = parse("A => A")
    t = build_tree(h)
    assert t.h == 1 and [nd.hypersequent for nd in level_set(t, 1)] == [h]


def test_single_right_implication():
    t = build_tree(parse("=> A -> B"))
    kids = t.nodes[0].children
    assert [t.nodes[c].hypersequent for c in kids] == [parse("A => B"), parse("=>")]
    assert [t.nodes[c].edge for c in kids] == ["RightImpLeft", "RightImpRight"]


def test_free_variables_rejected():
    with pytest.raises(ValueError):
        build_tree(parse("=> A(x)", variables=["x"]))


def test_enumerate_terms():
    sig = Signature({"c0": 0, "f": 1})
    assert enumerate_terms(sig, 2) == [C0, App("f", (C0,)), App("f", (App("f", (C0,)),))]
    assert enumerate_terms(sig, 0) == [C0]
    for d in range(6):
        assert len(enumerate_terms(sig, d)) == d + 1


def test_witnesses_drinker(tree):
    leaves = leaf_hypersequents(tree)
    w = find_witnesses(leaves, tree.vars, 2, tree.sig)
    assert isinstance(w, WitnessSet)
    assert w.k == 2 and w.tuples == [(C0,), (sk(C0),)]
    # every choice of leaves gives a valid combination
    import itertools
    for choice in itertools.product(leaves, repeat=2):
        assert isinstance(decide(combination(list(choice), tree.vars, w.tuples, 2)), Valid)


def test_witnesses_drinker_single_insufficient(tree):
    w = find_witnesses(leaf_hypersequents(tree), tree.vars, 2, tree.sig, max_k=1, max_depth=3)
    assert isinstance(w, Exhausted)


def test_witness_count_monotone(tree):
    leaves = leaf_hypersequents(tree)
    ks = [find_witnesses(leaves, tree.vars, n, tree.sig).k for n in (1, 2, 3)]
    assert ks == sorted(ks) == [1, 2, 3]


def test_quantifier_free_witnesses():
    h = parse("=> A -> A")
    t = build_tree(h)
    w = find_witnesses(leaf_hypersequents(t), t.vars, 3, t.sig)
    assert w.k == 1 and w.tuples == [()]


def test_budget_exhaustion(tree):
    w = find_witnesses(leaf_hypersequents(tree), tree.vars, 2, tree.sig, lp_budget=1)
    assert isinstance(w, Exhausted) and "budget" in w.reason


def test_deterministic():
    a, b = build_tree(DRINKER), build_tree(DRINKER)
    assert tree_dump(a) == tree_dump(b)
    assert json.loads(tree_dump(a, "structured")) == json.loads(tree_dump(b, "structured"))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_sync_random(seed):
    h = rand_fo_hypersequent(random.Random(seed), depth=2)
    t = build_tree(h)
    assert check_sync(t)
    leaf = t.nodes[t.leftmost_path()[-1]]
    assert not any(has_quantifier(f) for f in leaf.formulas())
