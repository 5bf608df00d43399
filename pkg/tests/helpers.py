"""Shared generators, oracles and the registry of produced proofs."""

import itertools
import random
from fractions import Fraction

from glprover import kernel as K
from glprover.semantics import (count_structures, eval_hypersequent, max_over_structures,
                                sample_refute, signature_of)
from glprover.syntax import (App, Atom, BOT, Exists, Hypersequent, Implies, Sequent, Var,
                             has_quantifier)

# conclusions of every proof produced by the suite, keyed for dedup
PRODUCED = {}
# criterion number -> (passed, detail)
CRITERIA = {}


def produced(p: K.Proof, origin: str = "") -> K.Proof:
    PRODUCED.setdefault(p.conclusion, origin)
    return p


ATOMS = [Atom(x) for x in "ABCD"]


def rand_prop(rng, atoms, depth):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice(atoms + [BOT]) if rng.random() < 0.9 else BOT
    return Implies(rand_prop(rng, atoms, depth - 1), rand_prop(rng, atoms, depth - 1))


def rand_prop_hypersequent(rng, n_atoms=4, max_comps=3, max_mult=3, depth=2):
    atoms = ATOMS[:n_atoms]
    comps = []
    for _ in range(rng.randint(1, max_comps)):
        ante, succ = [], []
        for side in (ante, succ):
            for _ in range(rng.randint(0, 2)):
                side.extend([rand_prop(rng, atoms, depth)] * rng.randint(1, max_mult))
        comps.append(Sequent.of(ante, succ))
    return Hypersequent.of(comps)


def rand_fo(rng, depth, bound=(), preds=("P", "Q"), consts=("c",)):
    """Random closed (given ``bound``) first-order formula."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.1:
            return BOT
        terms = [Var(v) for v in bound] + [App(c) for c in consts]
        p = rng.choice(preds)
        return Atom(p, (rng.choice(terms),))
    r = rng.random()
    if r < 0.45:
        return Implies(rand_fo(rng, depth - 1, bound, preds, consts),
                       rand_fo(rng, depth - 1, bound, preds, consts))
    v = f"v{len(bound)}"
    body = rand_fo(rng, depth - 1, bound + (v,), preds, consts)
    if r < 0.75:
        return Exists(v, body)
    # forall as ~exists~
    return Implies(Exists(v, Implies(body, BOT)), BOT)


def rand_fo_hypersequent(rng, depth=3, max_comps=2, per_side=1):
    # Skolem trees double at every implication step, so keep sides short
    comps = []
    for _ in range(rng.randint(1, max_comps)):
        ante = [rand_fo(rng, depth) for _ in range(rng.randint(0, per_side))]
        succ = [rand_fo(rng, depth) for _ in range(rng.randint(0, per_side))]
        comps.append(Sequent.of(ante, succ))
    return Hypersequent.of(comps)


def vertex_max(s: Sequent, atoms):
    """Maximum of an atomic sequent's value over {0,1} valuations."""
    from glprover.semantics import eval_sequent
    best = None
    for bits in itertools.product((0, 1), repeat=len(atoms)):
        v = eval_sequent(dict(zip(atoms, map(Fraction, bits))), s)
        best = v if best is None else max(best, v)
    return best


def soundness_check(h: Hypersequent, trials=10_000, seed=0, max_structures=50_000):
    """None when no counterexample is found; otherwise a description."""
    if not any(has_quantifier(f) for f in h.formulas()):
        v = sample_refute(h, trials, seed)
        if v is not None:
            return f"valuation {v} gives {eval_hypersequent(v, h)}"
        return None
    funcs, preds = signature_of(h)
    if count_structures(funcs, preds, 2) * 2 ** len(h.free_vars()) > max_structures:
        return f"skipped: signature too large ({count_structures(funcs, preds, 2)} structures)"
    best, wit = max_over_structures(h, 2)
    if best is not None and best > 0:
        return f"structure {wit} gives {best}"
    return None


# closed inputs that are valid by construction: propositional tautologies with
# atoms replaced by small closed first-order formulas
TAUTOLOGIES = ["=> A -> A", "=> A -> B | => B -> A", "A -> B, A => B", "A => A | B =>",
               "A, B => B, A", "=> A | A =>", "bot => A", "A => A, B | B =>",
               "=> A -> (B -> A)"]
FO_FILLERS = ["exists x. P(x)", "forall x. P(x)", "P(c)", "exists x. (P(x) -> Q(c))",
              "forall x. Q(x)", "exists x. ~P(x)", "Q(c) -> P(c)"]


def rand_closed_valid(rng):
    import re
    from glprover.syntax import parse, to_text
    text = to_text(parse(rng.choice(TAUTOLOGIES)))
    fill = {a: rng.choice(FO_FILLERS) for a in "AB"}
    return parse(re.sub(r"\b([AB])\b", lambda m: "(" + fill[m.group(1)] + ")", text))
