"""Derived rules expanded into primitive kernel steps.

``ctx`` arguments are the unscaled component Gamma => Delta; the macros
work on its 1/n form ``bot, n*Gamma => n*Delta`` (see ``approx_sequent``).
"""

from __future__ import annotations

from . import kernel as K
from .syntax import (Exists, Implies, Sequent, Signature, approx_sequent,
                     occurs_term, subst)


class MacroError(K.ProofError):
    pass


def _need(cond, msg):
    if not cond:
        raise MacroError(msg)


def _check_n(n):
    _need(isinstance(n, int) and n >= 1, f"n must be a positive integer, got {n!r}")


def mul(p: K.Proof, s: Sequent, n: int) -> K.Proof:
    """G | s  to  G | n*s  by n-1 mixes of the shared premise."""
    _check_n(n)
    _need(p.conclusion.has(s), f"mul: {s} is not a component")
    acc, cur = p, s
    for _ in range(n - 1):
        acc = K.mix(acc, p, cur, s)
        cur = cur.union(s)
    return acc


def div(p: K.Proof, s: Sequent, n: int) -> K.Proof:
    """G | n*s  to  G | s  by n-1 splits and n-1 contractions."""
    _check_n(n)
    _need(p.conclusion.has(s.scale(n)), f"div: {s.scale(n)} is not a component")
    acc = p
    for k in range(n - 1, 0, -1):
        acc = K.split(acc, s.scale(k), s)
    for _ in range(n - 1):
        acc = K.ec(acc, s)
    return acc


def imp_left_many(p: K.Proof, base: Sequent, f: Implies, k: int) -> K.Proof:
    """G | base,kB => kA | base  to  G | base, k(A->B)."""
    _check_n(k)
    _need(isinstance(f, Implies), "imp_left: principal formula must be an implication")
    a, b = f.lhs, f.rhs
    first = base.add(ante=[b] * k, succ=[a] * k)
    _need(p.conclusion.has(first, base), "imp_left: premise shape")
    acc = p
    s_i, t_i = first, base
    for _ in range(k):
        # s_i = base, i(A->B), (k-i)B => (k-i)A ; t_i = base, i(A->B)
        side = s_i.remove(ante=[b], succ=[a])
        acc = K.ew(acc, side)
        s_next = side.add(ante=[f])
        acc = K.imp_left(acc, s_next, f)
        acc = K.wl(acc, t_i, f)
        s_i, t_i = s_next, t_i.add(ante=[f])
    return K.ec(acc, t_i)


def imp_left_approx(p: K.Proof, n: int, ctx: Sequent, f: Implies) -> K.Proof:
    """G | Gamma,B =>_n A,Delta | Gamma =>_n Delta  to  G | Gamma, A->B =>_n Delta."""
    _check_n(n)
    return imp_left_many(p, approx_sequent(ctx, n), f, n)


def imp_right_many(p1: K.Proof, p2: K.Proof, base: Sequent, f: Implies, k: int) -> K.Proof:
    """G | base,kA => kB  and  G | base  to  G | base => k(A->B)."""
    _check_n(k)
    _need(isinstance(f, Implies), "imp_right: principal formula must be an implication")
    a, b = f.lhs, f.rhs
    top = base.add(ante=[a] * k, succ=[b] * k)
    _need(p1.conclusion.has(top), "imp_right: left premise shape")
    _need(p2.conclusion.has(base), "imp_right: right premise shape")
    _need(p1.conclusion.minus(top) == p2.conclusion.minus(base),
          "imp_right: side hypersequents differ")

    def q(i):
        if i == k:
            return p1
        if i == 0:
            return p2
        m1 = mul(p1, top, i)
        m2 = mul(p2, base, k - i)
        mixed = K.mix(m1, m2, top.scale(i), base.scale(k - i))
        return div(mixed, base.add(ante=[a] * i, succ=[b] * i), k)

    memo = {}
    for i in range(k + 1):
        memo[i, 0] = q(i)
    for j in range(k):
        for i in range(k - j):
            comp = base.add(ante=[a] * i, succ=[b] * i + [f] * (j + 1))
            memo[i, j + 1] = K.imp_right(memo[i + 1, j], memo[i, j], comp, f)
    return memo[0, k]


def imp_right_approx(p1: K.Proof, p2: K.Proof, n: int, ctx: Sequent, f: Implies) -> K.Proof:
    """G | Gamma,A =>_n B,Delta  and  G | Gamma =>_n Delta  to
    G | Gamma =>_n A->B, Delta."""
    _check_n(n)
    return imp_right_many(p1, p2, approx_sequent(ctx, n), f, n)


def imp_right_approx_size(n: int) -> int:
    """New DAG nodes created by ``imp_right_approx`` (premises excluded)."""
    return 3 * (n - 1) ** 2 + n * (n + 1) // 2


def imp_left_approx_size(n: int) -> int:
    return 3 * n + 1


def exists_left_approx(p: K.Proof, n: int, ctx: Sequent, f: Exists, c, sig: Signature) -> K.Proof:
    """G | Gamma, A(c) =>_n Delta  to  G | Gamma, exists x.A =>_n Delta.

    ``c`` may be any term not occurring in G, Gamma, Delta; it is replaced
    by n fresh variables drawn from ``sig``.
    """
    _check_n(n)
    _need(isinstance(f, Exists), "exists_left_approx: principal formula must be existential")
    base = approx_sequent(ctx, n)
    inst = subst(f.body, {f.var: c})
    prem = base.add(ante=[inst] * n)
    _need(p.conclusion.has(prem), "exists_left_approx: premise shape")
    side = p.conclusion.minus(prem)
    for g in side + [base, Sequent.of([f])]:
        _need(not any(occurs_term(h, c) for h in g.formulas()),
              f"exists_left_approx: eigen term {c} occurs in the context")
    xs = [sig.fresh_var() for _ in range(n)]
    copies = [K.replace_term_in_proof(p, c, x) for x in xs]
    parts = [base.add(ante=[subst(f.body, {f.var: x})] * n) for x in xs]
    acc, cur = copies[0], parts[0]
    for cp, part in zip(copies[1:], parts[1:]):
        acc = K.mix(acc, cp, cur, part)
        cur = cur.union(part)
    unit = base.add(ante=[subst(f.body, {f.var: x}) for x in xs])
    for k in range(n - 1, 0, -1):
        acc = K.split(acc, unit.scale(k), unit)
    for _ in range(n - 1):
        acc = K.ec(acc, unit)
    cur = unit
    for x in xs:
        nxt = cur.remove(ante=[subst(f.body, {f.var: x})]).add(ante=[f])
        acc = K.exists_left(acc, nxt, f, x)
        cur = nxt
    return acc


def exists_right_approx(p: K.Proof, n: int, ctx: Sequent, f: Exists, t) -> K.Proof:
    """G | Gamma =>_n A(t), Delta  to  G | Gamma =>_n exists x.A, Delta."""
    _check_n(n)
    _need(isinstance(f, Exists), "exists_right_approx: principal formula must be existential")
    base = approx_sequent(ctx, n)
    inst = subst(f.body, {f.var: t})
    cur = base.add(succ=[inst] * n)
    _need(p.conclusion.has(cur), "exists_right_approx: premise shape")
    acc = p
    for _ in range(n):
        cur = cur.remove(succ=[inst]).add(succ=[f])
        acc = K.exists_right(acc, cur, f, t)
    return acc
