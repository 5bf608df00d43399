"""Terms, formulas, sequents and hypersequents.

Formulas are kept in core form (``bot``, atoms, ``->``, ``exists``); every
derived connective is expanded by the parser.  Formula equality is equality
up to renaming of bound variables, and sequents/hypersequents are multisets
stored in a canonical sorted order, so ``==`` and ``hash`` are structural
multiset comparisons.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

RESERVED = "#"
FRESH_VAR_RE = re.compile(r"^x#\d+$")


class SyntaxError_(ValueError):
    """Parse failure carrying the character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class ArityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.fn
        return f"{self.fn}({', '.join(str(a) for a in self.args)})"


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def subterms(t: Term):
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def subst_term(t: Term, m: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return m.get(t.name, t)
    if not t.args:
        return t
    return App(t.fn, tuple(subst_term(a, m) for a in t.args))


def replace_in_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, App) and t.args:
        return App(t.fn, tuple(replace_in_term(a, old, new) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# formulas


class Formula:
    """Base class; equality and hashing go through the alpha-invariant key."""

    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, Formula) and self.key == other.key

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return print_formula(self)

    def __repr__(self):
        return f"<{print_formula(self)}>"

    @cached_property
    def key(self) -> str:
        return _fkey(self, {})

    @cached_property
    def free_vars(self) -> frozenset:
        return frozenset(_free_vars(self))

    def is_atomic(self) -> bool:
        return isinstance(self, (Bot, Atom))


@dataclass(frozen=True, eq=False)
class Bot(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    pred: str
    args: tuple = ()


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, eq=False)
class Exists(Formula):
    var: str
    body: Formula


BOT = Bot()


def _term_key(t: Term, env: dict, depth: int) -> str:
    if isinstance(t, Var):
        if t.name in env:
            return f"%{depth - env[t.name]}"
        return "?" + t.name
    if not t.args:
        return t.fn
    return t.fn + "(" + ",".join(_term_key(a, env, depth) for a in t.args) + ")"


def _fkey(f: Formula, env: dict, depth: int = 0) -> str:
    if isinstance(f, Bot):
        return "!"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f.pred + "(" + ",".join(_term_key(a, env, depth) for a in f.args) + ")"
    if isinstance(f, Implies):
        return "[" + _fkey(f.lhs, env, depth) + ">" + _fkey(f.rhs, env, depth) + "]"
    inner = dict(env)
    inner[f.var] = depth + 1
    return "E{" + _fkey(f.body, inner, depth + 1) + "}"


def _free_vars(f: Formula) -> set:
    if isinstance(f, Bot):
        return set()
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Implies):
        return _free_vars(f.lhs) | _free_vars(f.rhs)
    return _free_vars(f.body) - {f.var}


def neg(a: Formula) -> Formula:
    return Implies(a, BOT)


def has_quantifier(f: Formula) -> bool:
    if isinstance(f, Exists):
        return True
    if isinstance(f, Implies):
        return has_quantifier(f.lhs) or has_quantifier(f.rhs)
    return False


def symbols_of_term(t: Term, funcs: dict):
    if isinstance(t, App):
        _note_arity(funcs, t.fn, len(t.args), "function")
        for a in t.args:
            symbols_of_term(a, funcs)


def _note_arity(table: dict, name: str, arity: int, kind: str):
    old = table.setdefault(name, arity)
    if old != arity:
        raise ArityError(f"{kind} symbol {name!r} used with arities {old} and {arity}")


def collect_symbols(f: Formula, funcs: dict, preds: dict, bound=frozenset()):
    """Record function (incl. constants) and predicate arities of ``f``."""
    if isinstance(f, Atom):
        _note_arity(preds, f.pred, len(f.args), "predicate")
        for a in f.args:
            symbols_of_term(a, funcs)
    elif isinstance(f, Implies):
        collect_symbols(f.lhs, funcs, preds, bound)
        collect_symbols(f.rhs, funcs, preds, bound)
    elif isinstance(f, Exists):
        collect_symbols(f.body, funcs, preds, bound | {f.var})


def formula_terms(f: Formula):
    """All terms occurring in ``f`` (bound variables included as Var)."""
    if isinstance(f, Atom):
        for a in f.args:
            yield from subterms(a)
    elif isinstance(f, Implies):
        yield from formula_terms(f.lhs)
        yield from formula_terms(f.rhs)
    elif isinstance(f, Exists):
        yield from formula_terms(f.body)


def _fn_names(f: Formula) -> set:
    return {t.fn for t in formula_terms(f) if isinstance(t, App)}


def _rename_away(name: str, avoid: set) -> str:
    cand = name
    while cand in avoid:
        cand += "'"
    return cand


def subst(f: Formula, m: Mapping[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of free variables."""
    if not m:
        return f
    if isinstance(f, Bot):
        return f
    if isinstance(f, Atom):
        if not f.args:
            return f
        return Atom(f.pred, tuple(subst_term(a, m) for a in f.args))
    if isinstance(f, Implies):
        return Implies(subst(f.lhs, m), subst(f.rhs, m))
    m = {k: v for k, v in m.items() if k != f.var and k in f.body.free_vars}
    if not m:
        return f
    incoming = set()
    for t in m.values():
        incoming |= term_vars(t)
    if f.var in incoming:
        new = _rename_away(f.var, incoming | set(f.body.free_vars) | set(m) | _fn_names(f.body))
        body = subst(f.body, {f.var: Var(new)})
        return Exists(new, subst(body, m))
    return Exists(f.var, subst(f.body, m))


def replace_term(f: Formula, old: Term, new: Term) -> Formula:
    """Replace every free occurrence of the term ``old`` by ``new``.

    ``new`` must not be captured; callers pass fresh variables.
    """
    if isinstance(f, Bot):
        return f
    if isinstance(f, Atom):
        if not f.args:
            return f
        return Atom(f.pred, tuple(replace_in_term(a, old, new) for a in f.args))
    if isinstance(f, Implies):
        return Implies(replace_term(f.lhs, old, new), replace_term(f.rhs, old, new))
    if f.var in term_vars(old):
        return f
    return Exists(f.var, replace_term(f.body, old, new))


def occurs_term(f: Formula, t: Term) -> bool:
    """Does ``t`` occur free in ``f``?"""
    if isinstance(f, Bot):
        return False
    if isinstance(f, Atom):
        return any(s == t for a in f.args for s in subterms(a))
    if isinstance(f, Implies):
        return occurs_term(f.lhs, t) or occurs_term(f.rhs, t)
    if f.var in term_vars(t):
        return False
    return occurs_term(f.body, t)


# ---------------------------------------------------------------------------
# multisets


def _sorted(fs: Iterable[Formula]) -> tuple:
    return tuple(sorted(fs, key=lambda f: f.key))


@dataclass(frozen=True, eq=False)
class Sequent:
    ante: tuple = ()
    succ: tuple = ()

    def __eq__(self, other):
        return isinstance(other, Sequent) and (self is other or self.key == other.key)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    @staticmethod
    def of(ante: Iterable[Formula] = (), succ: Iterable[Formula] = ()) -> "Sequent":
        return Sequent(_sorted(ante), _sorted(succ))

    @cached_property
    def key(self) -> str:
        return ",".join(f.key for f in self.ante) + "=>" + ",".join(f.key for f in self.succ)

    def __lt__(self, other):
        return self.key < other.key

    def __str__(self):
        return print_sequent(self)

    def __repr__(self):
        return f"<{print_sequent(self)}>"

    def formulas(self):
        return self.ante + self.succ

    def union(self, other: "Sequent") -> "Sequent":
        return Sequent.of(self.ante + other.ante, self.succ + other.succ)

    def scale(self, n: int) -> "Sequent":
        return Sequent.of(self.ante * n, self.succ * n)

    def add(self, ante=(), succ=()) -> "Sequent":
        return Sequent.of(self.ante + tuple(ante), self.succ + tuple(succ))

    def remove(self, ante=(), succ=()) -> "Sequent":
        """Multiset difference; raises ValueError if not contained."""
        return Sequent.of(_msub(self.ante, ante), _msub(self.succ, succ))

    def contains(self, ante=(), succ=()) -> bool:
        return _mle(ante, self.ante) and _mle(succ, self.succ)

    def subst(self, m) -> "Sequent":
        return Sequent.of((subst(f, m) for f in self.ante), (subst(f, m) for f in self.succ))

    def free_vars(self) -> set:
        out = set()
        for f in self.formulas():
            out |= f.free_vars
        return out

    def is_atomic(self) -> bool:
        return all(f.is_atomic() for f in self.formulas())


def _msub(xs, ys) -> list:
    c = Counter(xs)
    for y in ys:
        if c[y] <= 0:
            raise ValueError(f"{y} not in multiset")
        c[y] -= 1
    out = []
    for x in xs:
        if c[x] > 0:
            out.append(x)
            c[x] -= 1
    return out


def _mle(small, big) -> bool:
    c = Counter(big)
    c.subtract(Counter(small))
    return all(v >= 0 for v in c.values())


@dataclass(frozen=True, eq=False)
class Hypersequent:
    components: tuple

    def __eq__(self, other):
        return isinstance(other, Hypersequent) and (self is other or self.key == other.key)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    def __post_init__(self):
        if not self.components:
            raise ValueError("a hypersequent needs at least one component")

    @staticmethod
    def of(components: Iterable[Sequent]) -> "Hypersequent":
        return Hypersequent(tuple(sorted(components, key=lambda s: s.key)))

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __str__(self):
        return print_hypersequent(self)

    def __repr__(self):
        return f"<{print_hypersequent(self)}>"

    @cached_property
    def key(self) -> str:
        return " | ".join(s.key for s in self.components)

    def plus(self, *comps: Sequent) -> "Hypersequent":
        return Hypersequent.of(self.components + comps)

    def minus(self, *comps: Sequent) -> list:
        """Components left after removing ``comps`` (may be empty)."""
        return _msub(self.components, comps)

    def has(self, *comps: Sequent) -> bool:
        return _mle(comps, self.components)

    def subst(self, m) -> "Hypersequent":
        return Hypersequent.of(s.subst(m) for s in self.components)

    def free_vars(self) -> set:
        out = set()
        for s in self.components:
            out |= s.free_vars()
        return out

    def formulas(self):
        for s in self.components:
            yield from s.formulas()


def hyp(*components: Sequent) -> Hypersequent:
    return Hypersequent.of(components)


def approx_sequent(s: Sequent, n: int) -> Sequent:
    if n < 1:
        raise ValueError("approximation index must be >= 1")
    return Sequent.of((BOT,) + s.ante * n, s.succ * n)


def to_approx(h: Hypersequent, n: int) -> Hypersequent:
    """``Gamma => Delta`` becomes ``bot, n*Gamma => n*Delta`` componentwise."""
    return Hypersequent.of(approx_sequent(s, n) for s in h.components)


def substitute(target, m: Mapping[str, Term]):
    if isinstance(target, Formula):
        return subst(target, m)
    return target.subst(m)


# ---------------------------------------------------------------------------
# signatures and fresh names


@dataclass
class Signature:
    functions: dict = field(default_factory=dict)
    predicates: dict = field(default_factory=dict)
    counter: int = 0

    @staticmethod
    def of(*items) -> "Signature":
        sig = Signature()
        for it in items:
            sig.absorb(it)
        return sig

    def absorb(self, item):
        if isinstance(item, Formula):
            collect_symbols(item, self.functions, self.predicates)
        elif isinstance(item, Sequent):
            for f in item.formulas():
                collect_symbols(f, self.functions, self.predicates)
        elif isinstance(item, Hypersequent):
            for s in item.components:
                self.absorb(s)
        # keep the counter ahead of any reserved names already present
        for name in list(self.functions):
            self._bump(name)

    def _bump(self, name):
        if RESERVED in name:
            tail = name.rsplit(RESERVED, 1)[1]
            if tail.isdigit():
                self.counter = max(self.counter, int(tail))

    def note_vars(self, names: Iterable[str]):
        for n in names:
            self._bump(n)

    def fresh(self, kind: str = "variable", arity: int = 0) -> str:
        self.counter += 1
        if kind == "variable":
            return f"x#{self.counter}"
        name = f"sk#{self.counter}"
        self.functions[name] = arity
        return name

    def fresh_var(self) -> Var:
        return Var(self.fresh("variable"))

    def constants(self) -> list:
        return sorted(f for f, a in self.functions.items() if a == 0)

    def ensure_constant(self, name: str = "c0") -> None:
        if not self.constants():
            self.functions[name] = 0


def fresh(sig: Signature, kind: str = "variable", arity: int = 0) -> str:
    return sig.fresh(kind, arity)


# ---------------------------------------------------------------------------
# printing

_PREC_IMP, _PREC_UNARY = 1, 5


def print_term(t: Term) -> str:
    return str(t)


def _is_neg(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.rhs, Bot)


def _print(f: Formula, prec: int) -> str:
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(str(a) for a in f.args)})"
    if isinstance(f, Exists):
        # forall x. F  ==  ~(exists x. ~F)
        var = f.var
        names = _fn_names(f.body)
        if var in names:
            var = _rename_away(var, names | set(f.body.free_vars))
        body = subst(f.body, {f.var: Var(var)}) if var != f.var else f.body
        s = f"exists {var}. {_print(body, 0)}"
        return s if prec == 0 else f"({s})"
    if _is_neg(f):
        inner = f.lhs
        if isinstance(inner, Exists) and _is_neg(inner.body):
            var = inner.var
            names = _fn_names(inner.body)
            if var in names:
                var = _rename_away(var, names | set(inner.body.free_vars))
            body = inner.body.lhs
            if var != inner.var:
                body = subst(body, {inner.var: Var(var)})
            s = f"forall {var}. {_print(body, 0)}"
            return s if prec == 0 else f"({s})"
        return "~" + _print(inner, _PREC_UNARY)
    if prec > _PREC_IMP:
        return f"({_print(f, 0)})"
    return f"{_print(f.lhs, _PREC_IMP + 1)} -> {_print(f.rhs, prec)}"


def print_formula(f: Formula) -> str:
    return _print(f, 0)


def _print_side(fs) -> str:
    return ", ".join(_print(f, 0) for f in fs)


def print_sequent(s: Sequent) -> str:
    left, right = _print_side(s.ante), _print_side(s.succ)
    if left and right:
        return f"{left} => {right}"
    if left:
        return f"{left} =>"
    if right:
        return f"=> {right}"
    return "=>"


def print_hypersequent(h: Hypersequent) -> str:
    return " | ".join(print_sequent(s) for s in h.components)


def to_text(value) -> str:
    if isinstance(value, Formula):
        return print_formula(value)
    if isinstance(value, Sequent):
        return print_sequent(value)
    if isinstance(value, Hypersequent):
        return print_hypersequent(value)
    return str(value)


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<seq>=>)
  | (?P<or>\\/)
  | (?P<and>/\\)
  | (?P<int>\d+(?![A-Za-z_#]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\#\d+)?)
  | (?P<punct>[(),.~+*|^])
""", re.VERBOSE)

KEYWORDS = {"bot", "top", "exists", "forall"}


def tokenize(text: str, allow_reserved: bool = False) -> list:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise SyntaxError_(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        val = m.group()
        if kind == "ident" and RESERVED in val and not allow_reserved:
            raise SyntaxError_(f"identifier {val!r} uses the reserved '#'", pos)
        if kind != "ws":
            toks.append((kind if kind != "punct" else val, val, pos))
        pos = m.end()
    toks.append(("eof", "", pos))
    return toks


class _Parser:
    def __init__(self, text, allow_reserved, variables):
        self.toks = tokenize(text, allow_reserved)
        self.i = 0
        self.variables = set(variables or ())
        self.funcs: dict = {}
        self.preds: dict = {}

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg):
        raise SyntaxError_(msg, self.tok[2])

    def eat(self, kind):
        if self.tok[0] != kind:
            self.error(f"expected {kind!r}, found {self.tok[1] or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def at(self, *kinds):
        return self.tok[0] in kinds

    def expect_end(self):
        if not self.at("eof"):
            self.error(f"unexpected {self.tok[1]!r}")

    # formula grammar, loosest first: -> (right), \/, /\, + , *, unary
    def formula(self, bound=frozenset()):
        lhs = self.disj(bound)
        if self.at("arrow"):
            self.eat("arrow")
            return Implies(lhs, self.formula(bound))
        return lhs

    def _binary(self, kind, sub, build, bound):
        left = sub(bound)
        while self.at(kind):
            self.eat(kind)
            left = build(left, sub(bound))
        return left

    def disj(self, bound):
        return self._binary("or", self.conj, lor, bound)

    def conj(self, bound):
        return self._binary("and", self.ssum, land, bound)

    def ssum(self, bound):
        return self._binary("+", self.sprod, oplus, bound)

    def sprod(self, bound):
        return self._binary("*", self.unary, odot, bound)

    def unary(self, bound):
        kind, val, _ = self.tok
        if kind == "~":
            self.eat("~")
            return neg(self.unary(bound))
        if kind == "ident" and val in ("exists", "forall"):
            self.eat("ident")
            var = self.eat("ident")[1]
            if var in KEYWORDS:
                self.error("keyword used as variable")
            self.eat(".")
            body = self.formula(bound | {var})
            return Exists(var, body) if val == "exists" else forall(var, body)
        if kind == "int":
            n = int(self.eat("int")[1])
            self.eat(".")
            return times(n, self.unary(bound))
        return self.postfix(bound)

    def postfix(self, bound):
        f = self.primary(bound)
        while self.at("^"):
            self.eat("^")
            f = power(f, int(self.eat("int")[1]))
        return f

    def primary(self, bound):
        kind, val, _ = self.tok
        if kind == "(":
            self.eat("(")
            f = self.formula(bound)
            self.eat(")")
            return f
        if kind == "ident":
            self.eat("ident")
            if val == "bot":
                return BOT
            if val == "top":
                return neg(BOT)
            if val in KEYWORDS:
                self.error(f"misplaced keyword {val!r}")
            args = self.args(bound)
            _note_arity(self.preds, val, len(args), "predicate")
            return Atom(val, args)
        self.error(f"unexpected {val or 'end of input'!r}")

    def args(self, bound):
        if not self.at("("):
            return ()
        self.eat("(")
        out = [self.term(bound)]
        while self.at(","):
            self.eat(",")
            out.append(self.term(bound))
        self.eat(")")
        return tuple(out)

    def term(self, bound):
        name = self.eat("ident")[1]
        if name in KEYWORDS:
            self.error(f"keyword {name!r} used as a term")
        if self.at("("):
            args = self.args(bound)
            _note_arity(self.funcs, name, len(args), "function")
            return App(name, args)
        if name in bound or name in self.variables or FRESH_VAR_RE.match(name):
            return Var(name)
        _note_arity(self.funcs, name, 0, "function")
        return App(name, ())

    def side(self, stops):
        fs = []
        if self.at(*stops):
            return fs
        fs.append(self.formula())
        while self.at(","):
            self.eat(",")
            fs.append(self.formula())
        return fs

    def sequent(self):
        ante = self.side(("seq",))
        self.eat("seq")
        succ = self.side(("|", "eof", ")"))
        return Sequent.of(ante, succ)

    def hypersequent(self):
        comps = [self.sequent()]
        while self.at("|"):
            self.eat("|")
            comps.append(self.sequent())
        return Hypersequent.of(comps)


def parse(text: str, kind: str = "hypersequent", *, allow_reserved: bool = False,
          variables: Iterable[str] = ()):
    """Parse ``text`` as a formula, sequent or hypersequent.

    Free identifiers in term position are constants unless listed in
    ``variables`` or named like a generated variable (``x#k``).
    """
    p = _Parser(text, allow_reserved, variables)
    if kind == "formula":
        out = p.formula()
    elif kind == "sequent":
        out = p.sequent()
    elif kind == "hypersequent":
        out = p.hypersequent()
    elif kind == "term":
        out = p.term(frozenset())
    else:
        raise ValueError(f"unknown kind {kind!r}")
    p.expect_end()
    return out


def parse_formula(text, **kw) -> Formula:
    return parse(text, "formula", **kw)


def parse_sequent(text, **kw) -> Sequent:
    return parse(text, "sequent", **kw)


def parse_hypersequent(text, **kw) -> Hypersequent:
    return parse(text, "hypersequent", **kw)


# ---------------------------------------------------------------------------
# derived connectives


def oplus(a, b):
    return Implies(neg(a), b)


def odot(a, b):
    return neg(oplus(neg(a), neg(b)))


def lor(a, b):
    return Implies(Implies(a, b), b)


def land(a, b):
    return neg(lor(neg(a), neg(b)))


def times(n: int, a):
    out = BOT
    for _ in range(n):
        out = oplus(a, out)
    return out


def power(a, n: int):
    out = neg(BOT)
    for _ in range(n):
        out = odot(a, out)
    return out


def forall(var: str, body: Formula) -> Formula:
    return neg(Exists(var, neg(body)))
