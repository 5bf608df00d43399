import random

import pytest

from glprover import kernel as K
from glprover.macros import (MacroError, div, exists_left_approx, exists_right_approx,
                             imp_left_approx, imp_right_approx, imp_right_approx_size, mul)
from glprover.propositional import Valid, decide
from glprover.syntax import (App, Atom, BOT, Exists, Hypersequent, Implies, Sequent, Signature,
                             Var, approx_sequent, parse)
from helpers import ATOMS, produced

A, B = Atom("A"), Atom("B")
NS = range(1, 6)


def prove(comps):
    r = decide(Hypersequent.of(comps))
    return r.proof if isinstance(r, Valid) else None


def rand_atomic_sequent(rng, pool):
    return Sequent.of([rng.choice(pool) for _ in range(rng.randint(0, 2))],
                      [rng.choice(pool) for _ in range(rng.randint(0, 2))])


def premises(rng, build, pool=ATOMS[:3] + [BOT], tries=200):
    """Random (side, ctx) until every premise hypersequent built from them is valid."""
    for _ in range(tries):
        side = [rand_atomic_sequent(rng, pool) for _ in range(rng.randint(0, 2))]
        ctx = rand_atomic_sequent(rng, pool)
        comps = build(ctx)
        proofs = [prove(side + c) for c in comps]
        if all(proofs):
            return side, ctx, proofs
    raise AssertionError("no valid premises found")


def new_nodes(p, *prems):
    old = set()
    for q in prems:
        old |= {id(x) for x in K.nodes_postorder(q)}
    return sum(1 for x in K.nodes_postorder(p) if id(x) not in old)


@pytest.mark.parametrize("n", NS)
def test_mul_div(n):
    p = K.id_(A)
    s = Sequent.of([A], [A])
    m = mul(p, s, n)
    assert m.conclusion == Hypersequent.of([s.scale(n)])
    assert K.check(produced(m, "macro"))
    assert K.stats(m)["dag_size"] == 1 + (n - 1)
    d = div(m, s, n)
    assert d.conclusion == p.conclusion and K.check(d)
    if n == 1:
        assert m is p and d is p


@pytest.mark.parametrize("n", NS)
def test_mul_div_random(n):
    rng = random.Random(n)
    for _ in range(5):
        side, ctx, (p,) = premises(rng, lambda c: [[c]])
        m = mul(p, ctx, n)
        assert K.check(produced(m, "macro"))
        assert m.conclusion == Hypersequent.of(side + [ctx.scale(n)])
        assert div(m, ctx, n).conclusion == p.conclusion


@pytest.mark.parametrize("n", NS)
def test_imp_right_approx(n):
    rng = random.Random(100 + n)
    for _ in range(5):
        a, b = rng.choice(ATOMS[:3]), rng.choice(ATOMS[:3] + [BOT])
        f = Implies(a, b)

        def shapes(ctx):
            base = approx_sequent(ctx, n)
            return [[base.add(ante=[a] * n, succ=[b] * n)], [base]]

        side, ctx, (p1, p2) = premises(rng, shapes)
        p = imp_right_approx(p1, p2, n, ctx, f)
        assert K.check(produced(p, "macro"))
        assert p.conclusion == Hypersequent.of(side + [approx_sequent(ctx.add(succ=[f]), n)])
        assert new_nodes(p, p1, p2) <= imp_right_approx_size(n)


def test_imp_right_approx_n1_is_one_rule():
    p1, p2 = K.id_(A), K.empty()
    p1 = K.wl(p1, p1.conclusion.components[0], BOT)
    p2 = K.wl(p2, Sequent(), BOT)
    p = imp_right_approx(p1, p2, 1, Sequent(), Implies(A, A))
    assert p.rule == "ImpRight" and p.premises == (p1, p2)


def test_imp_right_approx_n3_atomic():
    f = Implies(A, B)
    base = approx_sequent(Sequent(), 3)
    p1 = prove([base.add(ante=[A] * 3, succ=[B] * 3), Sequent.of([B], [A])])
    p2 = prove([base, Sequent.of([B], [A])])
    p = imp_right_approx(p1, p2, 3, Sequent(), f)
    assert K.check(produced(p, "macro"))
    assert p.conclusion.has(parse("bot => A -> B, A -> B, A -> B", "sequent"))


def test_imp_right_size_regression():
    f = Implies(A, A)
    sizes = []
    for n in range(1, 7):
        base = approx_sequent(Sequent(), n)
        p1 = prove([base.add(ante=[A] * n, succ=[A] * n)])
        p2 = prove([base])
        sizes.append(new_nodes(imp_right_approx(p1, p2, n, Sequent(), f), p1, p2))
    assert all(s <= imp_right_approx_size(n) for s, n in zip(sizes, range(1, 7)))
    # second differences constant: quadratic growth
    d2 = {sizes[i + 2] - 2 * sizes[i + 1] + sizes[i] for i in range(1, 4)}
    assert len(d2) == 1


@pytest.mark.parametrize("n", NS)
def test_imp_left_approx(n):
    rng = random.Random(200 + n)
    for _ in range(5):
        a, b = rng.choice(ATOMS[:3] + [BOT]), rng.choice(ATOMS[:3])
        f = Implies(a, b)

        def shapes(ctx):
            base = approx_sequent(ctx, n)
            return [[base.add(ante=[b] * n, succ=[a] * n), base]]

        side, ctx, (p,) = premises(rng, shapes)
        q = imp_left_approx(p, n, ctx, f)
        assert K.check(produced(q, "macro"))
        assert q.conclusion == Hypersequent.of(side + [approx_sequent(ctx.add(ante=[f]), n)])
        if n == 1:
            assert K.stats(q)["rules"].get("ImpLeft") == 1 + K.stats(p)["rules"].get("ImpLeft", 0)


def test_imp_left_missing_component():
    f = Implies(A, B)
    p = K.wl(K.bot_left(A), Sequent.of([BOT], [A]), B)
    with pytest.raises(MacroError):
        imp_left_approx(p, 1, Sequent(), f)


def P(t):
    return Atom("P", (t,))


EX = Exists("x", P(Var("x")))


@pytest.mark.parametrize("n", NS)
def test_exists_right_approx(n):
    rng = random.Random(300 + n)
    t = App("c")
    for _ in range(5):
        side, ctx, (p,) = premises(
            rng, lambda c: [[approx_sequent(c, n).add(succ=[P(t)] * n)]], pool=[A, P(t), BOT])
        q = exists_right_approx(p, n, ctx, EX, t)
        assert K.check(produced(q, "macro"))
        assert q.conclusion == Hypersequent.of(side + [approx_sequent(ctx.add(succ=[EX]), n)])
        (main,) = q.conclusion.minus(*side)
        assert main.succ.count(EX) == n


@pytest.mark.parametrize("n", NS)
def test_exists_left_approx(n):
    rng = random.Random(400 + n)
    c = App("d")
    for _ in range(5):
        side, ctx, (p,) = premises(
            rng, lambda k: [[approx_sequent(k, n).add(ante=[P(c)] * n)]], pool=[A, B, BOT])
        sig = Signature.of(p.conclusion)
        q = exists_left_approx(p, n, ctx, EX, c, sig)
        assert K.check(produced(q, "macro"))
        assert q.conclusion == Hypersequent.of(side + [approx_sequent(ctx.add(ante=[EX]), n)])


@pytest.mark.parametrize("n", NS)
def test_exists_left_eigen_violation(n):
    c = App("d")
    ctx = Sequent.of([], [P(c)])
    base = approx_sequent(ctx, n)
    p = prove([base.add(ante=[P(c)] * n)])
    assert p is not None
    with pytest.raises(MacroError):
        exists_left_approx(p, n, ctx, EX, c, Signature.of(p.conclusion))
    # the side hypersequent is checked too
    side = Sequent.of([P(c)], [P(c)])
    p2 = prove([Sequent.of([BOT] + [P(c)] * n), side])
    with pytest.raises(MacroError):
        exists_left_approx(p2, n, Sequent(), EX, c, Signature.of(p2.conclusion))


def test_kernel_rejects_eigen_violation_in_macro_output():
    c = App("d")
    n = 2
    p = prove([approx_sequent(Sequent(), n).add(ante=[P(c)] * n)])
    q = exists_left_approx(p, n, Sequent(), EX, c, Signature.of(p.conclusion))
    # rename the eigenvariables so they clash with the conclusion
    node = next(x for x in K.nodes_postorder(q) if x.rule == "ExistsLeft")
    x = node.data["eigen"]
    bad = K.Proof(node.conclusion.plus(Sequent.of([P(x)], [P(x)])), "ExistsLeft", node.data,
                  (K.ew(node.premises[0], Sequent.of([P(x)], [P(x)])),))
    v = K.check(bad)
    assert not v and "eigen" in v.reason


def test_wrong_n():
    with pytest.raises(MacroError):
        mul(K.id_(A), Sequent.of([A], [A]), 0)
