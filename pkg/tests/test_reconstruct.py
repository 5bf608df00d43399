import pytest

from glprover import kernel as K
from glprover.reconstruct import (Element, ReconstructionError, audit, finish, init_wfs,
                                  prove_approx, run, step)
from glprover.propositional import Valid, decide
from glprover.skolem import Exhausted, build_tree, find_witnesses, leaf_hypersequents
from glprover.syntax import parse, to_approx
from helpers import produced

DRINKER = parse("=> exists x. (A(x) -> forall y. A(y))")


def setup(h, n):
    tree = build_tree(h)
    w = find_witnesses(leaf_hypersequents(tree), tree.vars, n, tree.sig)
    return tree, w, init_wfs(tree, w, n)


def test_quantifier_free_singleton():
    h = parse("bot => A | A =>")
    tree, w, wfs = setup(h, 2)
    assert tree.h == 1
    assert w.k == 1 and len(wfs.elements) == 1
    (e,) = wfs.elements.values()
    assert e.proof.conclusion == to_approx(h, 2)


def test_quantifier_free_run_has_no_steps():
    h = parse("A => A | B =>")
    tree, w, wfs = setup(h, 3)
    res = run(wfs, h)
    assert res.iterations == 0
    assert res.proof.conclusion == to_approx(h, 3)


def test_drinker_initial_set():
    tree, w, wfs = setup(DRINKER, 2)
    assert len(wfs.elements) == len(tree.paths()) ** 2 == 9
    assert {e.stage for e in wfs.elements.values()} == {(tree.h, tree.h)}
    assert audit(wfs) == []
    assert wfs.mu() == wfs.leftmost().size


def test_audit_rejects_missing_proof():
    tree, w, wfs = setup(DRINKER, 2)
    labels = next(iter(wfs.elements))
    broken = dict(wfs.elements)
    broken[labels] = Element(labels, None)
    problems = audit(wfs.copy_with(broken))
    assert any("condition 4" in p for p in problems)


def test_audit_rejects_wrong_proof():
    tree, w, wfs = setup(DRINKER, 2)
    labels = list(wfs.elements)[-1]
    broken = dict(wfs.elements)
    broken[labels] = Element(labels, K.id_(parse("A", "formula")))
    assert any("condition 4" in p for p in audit(wfs.copy_with(broken)))


def test_audit_rejects_missing_partner():
    tree, w, wfs = setup(DRINKER, 1)
    # drop every element whose label goes through a right branch
    keep = {l: e for l, e in wfs.elements.items()
            if not any(tree.nodes[l_[1]].edge == "RightImpRight" for l_ in l if len(l_) > 1)
            and not any(tree.nodes[x].edge == "RightImpRight" for l_ in l for x in l_)}
    assert keep and len(keep) < len(wfs.elements)
    assert any("condition 2" in p for p in audit(wfs.copy_with(keep)))


def test_init_rejects_wrong_n():
    tree = build_tree(DRINKER)
    w = find_witnesses(leaf_hypersequents(tree), tree.vars, 2, tree.sig)
    with pytest.raises(ValueError):
        init_wfs(tree, w, 3)


def test_first_case_is_left_implication():
    tree, w, wfs = setup(DRINKER, 2)
    new, entry = step(wfs)
    assert entry.case == 1
    assert entry.mu_after < entry.mu_before
    assert audit(new) == []


def test_fixpoint():
    tree, w, wfs = setup(DRINKER, 1)
    while True:
        new, entry = step(wfs)
        if entry.case == 5:
            break
        wfs = new
    assert new is wfs
    assert all(len(l) == 1 for l in wfs.leftmost().labels)


def test_case_three_merges_partners():
    tree, w, wfs = setup(DRINKER, 2)
    seen = False
    while True:
        before = audit(wfs)
        new, entry = step(wfs)
        if entry.case == 5:
            break
        if entry.case == 3:
            seen = True
            assert before == [] and audit(new) == []
            assert entry.elements + entry.dropped <= len(wfs.elements)
            assert entry.elements < len(wfs.elements)
        wfs = new
    assert seen


@pytest.mark.parametrize("n", [1, 2, 3])
def test_drinker_end_to_end(n):
    r = prove_approx(DRINKER, n)
    assert r.proof.conclusion == to_approx(DRINKER, n)
    assert K.check(produced(r.proof, f"drinker n={n}"))
    mus = [t.mu_before for t in r.trace] + [r.trace[-1].mu_after]
    assert all(a > b for a, b in zip(mus, mus[1:]))


def test_drinker_trace_n2():
    r = prove_approx(DRINKER, 2)
    assert [t.case for t in r.trace] == [1, 1, 4, 3, 3, 2, 4, 3, 3, 2]


def test_exhausted_is_reported():
    r = prove_approx(DRINKER, 2, max_k=1, max_depth=2)
    assert isinstance(r, Exhausted)


def test_finish_requires_root_labels():
    tree, w, wfs = setup(DRINKER, 1)
    with pytest.raises(ReconstructionError):
        finish(wfs, DRINKER)


def test_proofs_without_quantifier_rules_still_valid():
    h = parse("=> exists x. P(x) | exists x. P(x) =>")
    r = prove_approx(h, 2)
    assert K.check(produced(r.proof, "reconstruct"))
    assert r.proof.conclusion == to_approx(h, 2)
