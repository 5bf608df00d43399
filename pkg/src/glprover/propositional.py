"""Decision procedure and proof construction for quantifier-free hypersequents.

Atoms (ground or not) are treated as propositional variables.  The search
decomposes implications, strips matching atomic pairs, and settles each
atomic leaf with the Farkas alternative: a certificate becomes a proof, a
feasible point becomes a countermodel which is lifted back to the root.
"""

from __future__ import annotations

from collections import Counter
from itertools import product
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import kernel as K
from .farkas import Certificate, FarkasInstance, LPBudgetExceeded, solve
from .macros import imp_left_many, imp_right_many
from .semantics import atoms_of, eval_hypersequent
from .syntax import (Atom, BOT, Bot, Hypersequent, Implies, Sequent,
                     has_quantifier)


@dataclass
class Valid:
    proof: K.Proof


@dataclass
class Invalid:
    valuation: dict
    value: Fraction = None


class NotAtomic(ValueError):
    pass


@dataclass
class LPCounter:
    """Counts LP calls and enforces an optional budget."""

    budget: Optional[int] = None
    calls: int = 0

    def tick(self):
        self.calls += 1
        if self.budget is not None and self.calls > self.budget:
            raise LPBudgetExceeded(f"LP budget of {self.budget} calls exhausted")


# ---------------------------------------------------------------------------
# atomic sequents


def _check_atomic(s: Sequent):
    if not s.is_atomic():
        raise NotAtomic(f"{s} contains a compound formula")


def _common(s: Sequent):
    succ = Counter(s.succ)
    for f in s.ante:
        if succ[f]:
            return f
    return None


def prove_atomic_sequent(s: Sequent) -> Optional[K.Proof]:
    """Proof of a valid atomic sequent, or None when it is not valid."""
    _check_atomic(s)
    pairs = []
    core = s
    while True:
        f = _common(core)
        if f is None:
            break
        pairs.append(f)
        core = core.remove(ante=[f], succ=[f])
    if not core.ante and not core.succ and pairs:
        acc = K.id_(pairs.pop())
        core = acc.conclusion.components[0]
    elif not core.succ:
        acc = K.empty()
        cur = Sequent()
        for f in core.ante:
            acc = K.wl(acc, cur, f)
            cur = cur.add(ante=[f])
    else:
        bots = sum(1 for f in core.ante if isinstance(f, Bot))
        if bots < len(core.succ):
            return None
        acc, cur = None, None
        for d in core.succ:
            b = K.bot_left(d)
            bs = b.conclusion.components[0]
            if acc is None:
                acc, cur = b, bs
            else:
                acc = K.mix(acc, b, cur, bs)
                cur = cur.union(bs)
        rest = core.remove(ante=[BOT] * len(core.succ))
        for f in rest.ante:
            acc = K.wl(acc, cur, f)
            cur = cur.add(ante=[f])
    for f in reversed(pairs):
        i = K.id_(f)
        ic = i.conclusion.components[0]
        acc = K.mix(acc, i, core, ic)
        core = core.union(ic)
    assert acc.conclusion.components == (s,)
    return acc


def atomic_sequent_valid(s: Sequent) -> bool:
    """Vertex test: the value is linear, so its maximum over [0,1]^P sits on a
    {0,1} vertex; checked here by the closed form."""
    _check_atomic(s)
    coeff = Counter()
    const = 0
    for f in s.succ:
        if isinstance(f, Bot):
            const += 1
        else:
            coeff[f] += 1
    for f in s.ante:
        if isinstance(f, Bot):
            const -= 1
        else:
            coeff[f] -= 1
    return const + sum(c for c in coeff.values() if c > 0) <= 0


# ---------------------------------------------------------------------------
# atomic hypersequents


def farkas_instance(h: Hypersequent):
    """The strict system whose solutions are countermodels of atomic ``h``.

    Variables are atom values; rows x_j <= 1, and per component
    -(a_i . x) < c_i with a_ij = mult in succedent - mult in antecedent and
    c_i the same difference for bot.
    """
    atoms = atoms_of(h)
    idx = {a: j for j, a in enumerate(atoms)}
    n = len(atoms)
    M = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    a = [Fraction(1)] * n
    N, b = [], []
    for s in h.components:
        row = [Fraction(0)] * n
        c = 0
        for f in s.succ:
            if isinstance(f, Bot):
                c += 1
            else:
                row[idx[f]] += 1
        for f in s.ante:
            if isinstance(f, Bot):
                c -= 1
            else:
                row[idx[f]] -= 1
        N.append([-v for v in row])
        b.append(Fraction(c))
    return FarkasInstance(M, a, N, b, n=n), atoms


def _atomic_outcome(h: Hypersequent, counter: Optional[LPCounter]):
    for s in h.components:
        _check_atomic(s)
    if counter is not None:
        counter.tick()
    inst, atoms = farkas_instance(h)
    return solve(inst), atoms


def atomic_hypersequent_valid(h: Hypersequent, counter: Optional[LPCounter] = None) -> bool:
    out, _ = _atomic_outcome(h, counter)
    return isinstance(out, Certificate)


def recover_from_combination(p: K.Proof, parts: list, target: Hypersequent) -> K.Proof:
    """Split the single component of ``p`` (the union of ``parts``) right to
    left, then adjust multiplicities with ec/ew until ``target`` is reached."""
    acc = p
    rest = list(parts)
    while len(rest) > 1:
        last = rest.pop()
        left = Sequent.of([f for s in rest for f in s.ante], [f for s in rest for f in s.succ])
        acc = K.split(acc, left, last)
    have = Counter(acc.conclusion.components)
    want = Counter(target.components)
    for s in sorted(set(have) | set(want), key=lambda x: x.key):
        while have[s] > want[s]:
            acc = K.ec(acc, s)
            have[s] -= 1
        while have[s] < want[s]:
            acc = K.ew(acc, s)
            have[s] += 1
    assert acc.conclusion == target
    return acc


def prove_atomic_hypersequent(h: Hypersequent, counter: Optional[LPCounter] = None):
    """Valid(proof) via a Farkas certificate, or Invalid(point)."""
    out, atoms = _atomic_outcome(h, counter)
    if not isinstance(out, Certificate):
        v = dict(zip(atoms, out.x))
        val = eval_hypersequent(v, h)
        assert val > 0, "feasible point does not refute the hypersequent"
        return Invalid(v, val)
    parts = []
    for s, m in zip(h.components, out.mu):
        parts.extend([s] * m)
    combined = parts[0]
    for s in parts[1:]:
        combined = combined.union(s)
    p = prove_atomic_sequent(combined)
    assert p is not None, "certificate combination is not a valid sequent"
    return Valid(recover_from_combination(p, parts, h))


# ---------------------------------------------------------------------------
# decomposition


def _find_implication(h: Hypersequent):
    for s in h.components:
        for f in s.succ:
            if isinstance(f, Implies):
                return "ImpRight", s, f
        for f in s.ante:
            if isinstance(f, Implies):
                return "ImpLeft", s, f
    return None


def _find_pair(h: Hypersequent):
    for s in h.components:
        succ = Counter(s.succ)
        for f in s.ante:
            if isinstance(f, Atom) and succ[f]:
                return s, f
    return None


def _weaken_to(p: K.Proof, extra: list) -> K.Proof:
    for s in extra:
        p = K.ew(p, s)
    return p


def _lift(h: Hypersequent, v: dict) -> dict:
    out = dict(v)
    for a in atoms_of(h):
        out.setdefault(a, Fraction(0))
    val = eval_hypersequent(out, h)
    assert val > 0, f"lifted valuation fails to refute {h}"
    return out


def lift_countermodel(path: list, v: dict) -> dict:
    """Carry a leaf countermodel up a list of hypersequents ordered from the
    leaf towards the root, re-verifying at every step."""
    for h in path:
        v = _lift(h, v)
    return v


def _dedupe(h: Hypersequent):
    """Distinct components of ``h`` and the surplus copies."""
    seen, extra = [], []
    for s in h.components:
        (extra if s in seen else seen).append(s)
    return Hypersequent.of(seen), extra


def _decide(h: Hypersequent, counter, shortcut=True):
    core, extra = _dedupe(h)
    if extra:
        r = _decide(core, counter, shortcut)
        if isinstance(r, Invalid):
            return r
        return Valid(_weaken_to(r.proof, extra))
    atomic = [c for c in h.components if c.is_atomic()]
    if shortcut and atomic and len(atomic) < len(h.components):
        # the atomic part alone may already be valid
        r = prove_atomic_hypersequent(Hypersequent.of(atomic), counter)
        if isinstance(r, Valid):
            rest = list(h.components)
            for c in atomic:
                rest.remove(c)
            return Valid(_weaken_to(r.proof, rest))
    imp = _find_implication(h)
    if imp is not None:
        # all copies of the principal implication are introduced together
        rule, s, f = imp
        g = h.minus(s)
        if rule == "ImpRight":
            k = s.succ.count(f)
            base = s.remove(succ=[f] * k)
            c1 = base.add(ante=[f.lhs] * k, succ=[f.rhs] * k)
            r1 = _decide(Hypersequent.of(g + [c1]), counter, shortcut)
            if isinstance(r1, Invalid):
                return Invalid(_lift(h, r1.valuation))
            r2 = _decide(Hypersequent.of(g + [base]), counter, shortcut)
            if isinstance(r2, Invalid):
                return Invalid(_lift(h, r2.valuation))
            return Valid(imp_right_many(r1.proof, r2.proof, base, f, k))
        k = s.ante.count(f)
        base = s.remove(ante=[f] * k)
        c1 = base.add(ante=[f.rhs] * k, succ=[f.lhs] * k)
        r = _decide(Hypersequent.of(g + [c1, base]), counter, shortcut)
        if isinstance(r, Invalid):
            return Invalid(_lift(h, r.valuation))
        return Valid(imp_left_many(r.proof, base, f, k))
    pair = _find_pair(h)
    if pair is not None:
        s, f = pair
        g = h.minus(s)
        core = s.remove(ante=[f], succ=[f])
        r = _decide(Hypersequent.of(g + [core]), counter, shortcut)
        if isinstance(r, Invalid):
            return Invalid(_lift(h, r.valuation))
        ident = _weaken_to(K.id_(f), g)
        return Valid(K.mix(r.proof, ident, core, Sequent.of([f], [f])))
    return prove_atomic_hypersequent(h, counter)


def vertex_refute(h: Hypersequent, max_atoms: int = 12) -> Optional[dict]:
    """A {0,1} valuation refuting ``h``, if one exists and atoms are few."""
    atoms = atoms_of(h)
    if len(atoms) > max_atoms:
        return None
    for bits in product((Fraction(0), Fraction(1)), repeat=len(atoms)):
        v = dict(zip(atoms, bits))
        if eval_hypersequent(v, h) > 0:
            return v
    return None


def decide(h: Hypersequent, counter: Optional[LPCounter] = None, shortcut: bool = True):
    """Valid(proof) or Invalid(valuation) for a quantifier-free hypersequent.

    With ``shortcut`` off the plain search runs: every branch is decomposed
    down to atomic leaves and each leaf goes to the LP.
    """
    if any(has_quantifier(f) for f in h.formulas()):
        raise ValueError("decide needs a quantifier-free hypersequent")
    if shortcut:
        v = vertex_refute(h)
        if v is not None:
            return Invalid(v, eval_hypersequent(v, h))
    out = _decide(h, counter, shortcut)
    if isinstance(out, Invalid):
        out.valuation = _lift(h, out.valuation)
        out.value = eval_hypersequent(out.valuation, h)
    return out


def leaves(h: Hypersequent) -> list:
    """Atomic leaves of the decomposition (without proofs)."""
    stack, out = [h], []
    while stack:
        cur = _dedupe(stack.pop())[0]
        imp = _find_implication(cur)
        if imp is None:
            out.append(cur)
            continue
        rule, s, f = imp
        g = cur.minus(s)
        if rule == "ImpRight":
            k = s.succ.count(f)
            base = s.remove(succ=[f] * k)
            stack.append(Hypersequent.of(g + [base]))
            stack.append(Hypersequent.of(g + [base.add(ante=[f.lhs] * k, succ=[f.rhs] * k)]))
        else:
            k = s.ante.count(f)
            base = s.remove(ante=[f] * k)
            stack.append(Hypersequent.of(g + [base.add(ante=[f.rhs] * k, succ=[f.lhs] * k), base]))
    return out


def is_valid(h: Hypersequent, counter: Optional[LPCounter] = None) -> bool:
    """Validity without building proofs; one LP per atomic leaf."""
    if any(has_quantifier(f) for f in h.formulas()):
        raise ValueError("is_valid needs a quantifier-free hypersequent")
    return all(atomic_hypersequent_valid(leaf, counter) for leaf in leaves(h))
