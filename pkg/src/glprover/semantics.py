"""Exact evaluation over [0,1] with 0 as absolute truth and bot worth 1."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .syntax import (App, Atom, Bot, Exists, Formula, Hypersequent, Implies,
                     Sequent, Term, Var, collect_symbols, has_quantifier)

ONE = Fraction(1)
ZERO = Fraction(0)


class UnboundError(KeyError):
    pass


@dataclass
class FiniteStructure:
    """A finite [0,1]-structure over domain ``range(size)``.

    ``functions`` maps a symbol to a dict from argument tuples to elements
    (constants use the empty tuple); ``relations`` maps a symbol to a dict
    from argument tuples to rationals.
    """

    size: int
    functions: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("domain must be nonempty")
        for name, table in self.relations.items():
            for v in table.values():
                if not 0 <= v <= 1:
                    raise ValueError(f"relation {name} takes value {v} outside [0,1]")

    @property
    def domain(self):
        return range(self.size)

    def term(self, t: Term, assignment: Mapping[str, int]) -> int:
        if isinstance(t, Var):
            if t.name not in assignment:
                raise UnboundError(f"variable {t.name} is unassigned")
            return assignment[t.name]
        args = tuple(self.term(a, assignment) for a in t.args)
        try:
            return self.functions[t.fn][args]
        except KeyError:
            raise UnboundError(f"function {t.fn}{args} is not interpreted") from None


def eval_formula(env, f: Formula, assignment: Optional[Mapping[str, int]] = None) -> Fraction:
    """Value of ``f`` under a valuation (dict Atom -> Fraction) or a structure."""
    if isinstance(env, FiniteStructure):
        return _eval_struct(env, f, dict(assignment or {}))
    return _eval_val(env, f)


def _eval_val(v: Mapping, f: Formula) -> Fraction:
    if isinstance(f, Bot):
        return ONE
    if isinstance(f, Atom):
        try:
            return Fraction(v[f])
        except KeyError:
            raise UnboundError(f"atom {f} has no value") from None
    if isinstance(f, Implies):
        return max(_eval_val(v, f.rhs) - _eval_val(v, f.lhs), ZERO)
    raise ValueError("valuations cannot interpret quantifiers")


def _eval_struct(m: FiniteStructure, f: Formula, asg: dict) -> Fraction:
    if isinstance(f, Bot):
        return ONE
    if isinstance(f, Atom):
        args = tuple(m.term(a, asg) for a in f.args)
        try:
            return Fraction(m.relations[f.pred][args])
        except KeyError:
            raise UnboundError(f"relation {f.pred}{args} is not interpreted") from None
    if isinstance(f, Implies):
        return max(_eval_struct(m, f.rhs, asg) - _eval_struct(m, f.lhs, asg), ZERO)
    best = None
    saved = asg.get(f.var, None)
    for d in m.domain:
        asg[f.var] = d
        val = _eval_struct(m, f.body, asg)
        if best is None or val < best:
            best = val
    if saved is None:
        asg.pop(f.var, None)
    else:
        asg[f.var] = saved
    return best


def eval_sequent(env, s: Sequent, assignment=None) -> Fraction:
    return (sum((eval_formula(env, f, assignment) for f in s.succ), ZERO)
            - sum((eval_formula(env, f, assignment) for f in s.ante), ZERO))


def eval_hypersequent(env, h: Hypersequent, assignment=None) -> Fraction:
    return min(eval_sequent(env, s, assignment) for s in h.components)


def evaluate(env, value, assignment=None) -> Fraction:
    if isinstance(value, Formula):
        return eval_formula(env, value, assignment)
    if isinstance(value, Sequent):
        return eval_sequent(env, value, assignment)
    return eval_hypersequent(env, value, assignment)


# ---------------------------------------------------------------------------
# atoms and sampling


def atoms_of(value) -> list:
    """Atomic formulas other than bot, in canonical order."""
    out = set()

    def walk(f):
        if isinstance(f, Atom):
            out.add(f)
        elif isinstance(f, Implies):
            walk(f.lhs)
            walk(f.rhs)
        elif isinstance(f, Exists):
            raise ValueError("quantified formula has no propositional atoms")

    if isinstance(value, Formula):
        walk(value)
    else:
        fs = value.formulas() if isinstance(value, (Sequent, Hypersequent)) else value
        for f in fs:
            walk(f)
    return sorted(out, key=lambda a: a.key)


def _scaled(f: Formula, ints: dict, d: int) -> int:
    # values are ints / d; bot is d / d
    if isinstance(f, Bot):
        return d
    if isinstance(f, Atom):
        return ints[f]
    r = _scaled(f.rhs, ints, d) - _scaled(f.lhs, ints, d)
    return r if r > 0 else 0


def _scaled_hyp(h: Hypersequent, ints: dict, d: int) -> int:
    return min(sum(_scaled(f, ints, d) for f in s.succ) - sum(_scaled(f, ints, d) for f in s.ante)
               for s in h.components)


def sample_valuations(atoms: list, trials: int, seed=0):
    """Yield (numerators, denominator) pairs.

    Every other sample is a {0,1} vertex; the rest use one random
    denominator in [2, 64] shared by all atoms.
    """
    rng = random.Random(seed)
    for i in range(trials):
        if i % 2 == 0:
            d = 1
        else:
            d = rng.randint(2, 64)
        yield {a: rng.randint(0, d) for a in atoms}, d


def sample_refute(h: Hypersequent, trials: int = 10_000, seed=0) -> Optional[dict]:
    """Search for a valuation giving ``h`` a positive value.

    Returns the valuation (exact, re-verified) or None when nothing is found.
    """
    if any(has_quantifier(f) for f in h.formulas()):
        raise ValueError("sample_refute needs a quantifier-free hypersequent")
    atoms = atoms_of(h)
    for ints, d in sample_valuations(atoms, trials, seed):
        if _scaled_hyp(h, ints, d) > 0:
            v = {a: Fraction(n, d) for a, n in ints.items()}
            assert eval_hypersequent(v, h) > 0
            return v
    return None


# ---------------------------------------------------------------------------
# exhaustive finite structures


def signature_of(h) -> tuple:
    funcs, preds = {}, {}
    fs = h.formulas() if isinstance(h, (Sequent, Hypersequent)) else [h]
    for f in fs:
        collect_symbols(f, funcs, preds)
    return funcs, preds


def all_structures(funcs: dict, preds: dict, size: int, grid=(ZERO, Fraction(1, 2), ONE)):
    """Every structure of the given size with relation values on ``grid``."""
    dom = range(size)
    func_slots = [(name, args) for name, ar in sorted(funcs.items())
                  for args in itertools.product(dom, repeat=ar)]
    rel_slots = [(name, args) for name, ar in sorted(preds.items())
                 for args in itertools.product(dom, repeat=ar)]
    for fvals in itertools.product(dom, repeat=len(func_slots)):
        functions = {name: {} for name in funcs}
        for (name, args), val in zip(func_slots, fvals):
            functions[name][args] = val
        for rvals in itertools.product(grid, repeat=len(rel_slots)):
            relations = {name: {} for name in preds}
            for (name, args), val in zip(rel_slots, rvals):
                relations[name][args] = val
            yield FiniteStructure(size, functions, relations)


def count_structures(funcs, preds, size, grid_size=3) -> int:
    nf = sum(size ** ar for ar in funcs.values())
    nr = sum(size ** ar for ar in preds.values())
    return size ** nf * grid_size ** nr


def max_over_structures(h, max_size: int = 2, grid=(ZERO, Fraction(1, 2), ONE)):
    """Largest value of ``h`` over all small structures and assignments to
    its free variables, together with a witness (structure, assignment)."""
    funcs, preds = signature_of(h)
    free = sorted(h.free_vars() if not isinstance(h, Formula) else h.free_vars)
    best, witness = None, None
    for size in range(1, max_size + 1):
        for m in all_structures(funcs, preds, size, grid):
            for vals in itertools.product(range(size), repeat=len(free)):
                asg = dict(zip(free, vals))
                val = evaluate(m, h, asg)
                if best is None or val > best:
                    best, witness = val, (m, asg)
    return best, witness


def naive_eval(m: FiniteStructure, f: Formula, asg=None) -> Fraction:
    """Second evaluator: substitutes domain constants and recurses."""
    asg = dict(asg or {})
    if isinstance(f, Exists):
        vals = []
        for d in m.domain:
            inner = dict(asg)
            inner[f.var] = d
            vals.append(naive_eval(m, f.body, inner))
        return min(vals)
    if isinstance(f, Implies):
        a, b = naive_eval(m, f.lhs, asg), naive_eval(m, f.rhs, asg)
        return b - a if b > a else ZERO
    if isinstance(f, Bot):
        return ONE
    return Fraction(m.relations[f.pred][tuple(m.term(t, asg) for t in f.args)])


# ---------------------------------------------------------------------------
# model files


def parse_model(text: str):
    """Read a valuation or structure from the key-value model format.

    Valuation lines look like ``A = 1/2`` or ``R(c) = 1``.  A structure
    starts with ``domain = N``; then ``R(0,1) = 1/2`` sets relation values,
    ``f(0) -> 1`` sets function values and ``c -> 0`` interprets constants.
    """
    from .syntax import parse_formula

    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if lines and lines[0].replace(" ", "").startswith("domain="):
        size = int(lines[0].split("=", 1)[1])
        funcs, rels = {}, {}
        for ln in lines[1:]:
            if "->" in ln:
                lhs, rhs = (x.strip() for x in ln.split("->", 1))
                name, args = _split_call(lhs)
                funcs.setdefault(name, {})[args] = int(rhs)
            else:
                lhs, rhs = (x.strip() for x in ln.split("=", 1))
                name, args = _split_call(lhs)
                rels.setdefault(name, {})[args] = Fraction(rhs)
        return FiniteStructure(size, funcs, rels)
    val = {}
    for ln in lines:
        lhs, rhs = (x.strip() for x in ln.split("=", 1))
        atom = parse_formula(lhs, allow_reserved=True)
        if not isinstance(atom, Atom):
            raise ValueError(f"{lhs!r} is not an atom")
        val[atom] = Fraction(rhs)
        if not 0 <= val[atom] <= 1:
            raise ValueError(f"value of {lhs} outside [0,1]")
    return val


def _split_call(text: str):
    if "(" not in text:
        return text, ()
    name, rest = text.split("(", 1)
    inner = rest.rsplit(")", 1)[0]
    args = tuple(int(a) for a in inner.split(",") if a.strip())
    return name.strip(), args


def format_valuation(v: Mapping) -> str:
    return "\n".join(f"{a} = {val}" for a, val in sorted(v.items(), key=lambda kv: kv[0].key))


def format_structure(m: FiniteStructure, assignment: Optional[Mapping[str, int]] = None) -> str:
    """Inverse of ``parse_model`` for structures."""

    def call(name, args):
        return f"{name}({','.join(map(str, args))})" if args else name

    lines = [f"domain = {m.size}"]
    for name in sorted(m.functions):
        for args, v in sorted(m.functions[name].items()):
            lines.append(f"{call(name, args)} -> {v}")
    for name in sorted(m.relations):
        for args, v in sorted(m.relations[name].items()):
            lines.append(f"{call(name, args)} = {v}")
    for var, v in sorted((assignment or {}).items()):
        lines.append(f"# {var} := {v}")
    return "\n".join(lines)
