"""Proof objects and an independent rule-by-rule checker.

A proof is a DAG of ``Proof`` nodes.  Each node stores its conclusion, a
rule tag, the instance data that pins down the premises, and the premise
nodes.  Builders (``mix``, ``split``, ...) compute conclusions forwards from
premises; ``check`` recomputes the expected premises backwards from each
conclusion and compares, so the two directions are written separately.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (App, BOT, Exists, Formula, Hypersequent, Implies,
                     Sequent, Var, occurs_term, parse, print_term, replace_in_term,
                     replace_term, subst, term_vars, to_text)

RULES = ("Id", "EmptySeq", "BotLeft", "EC", "EW", "Split", "Mix", "WL",
         "ImpLeft", "ImpRight", "Cut", "ExistsLeft", "ExistsRight")

FORMAT = "glv-proof/1"


class ProofError(ValueError):
    """Raised by builders when premises do not have the required shape."""


@dataclass(frozen=True, eq=False)
class Proof:
    conclusion: Hypersequent
    rule: str
    data: dict = field(default_factory=dict)
    premises: tuple = ()

    def __repr__(self):
        return f"<{self.rule}: {self.conclusion}>"


# ---------------------------------------------------------------------------
# builders


def _h(comps) -> Hypersequent:
    return Hypersequent.of(comps)


def _need(cond, msg):
    if not cond:
        raise ProofError(msg)


def id_(a: Formula) -> Proof:
    return Proof(_h([Sequent.of([a], [a])]), "Id")


def empty() -> Proof:
    return Proof(_h([Sequent()]), "EmptySeq")


def bot_left(a: Formula) -> Proof:
    return Proof(_h([Sequent.of([BOT], [a])]), "BotLeft")


def ec(p: Proof, s: Sequent) -> Proof:
    _need(p.conclusion.has(s, s), f"ec: {s} does not occur twice")
    return Proof(_h(p.conclusion.minus(s)), "EC", {"component": s}, (p,))


def ew(p: Proof, s: Sequent) -> Proof:
    return Proof(p.conclusion.plus(s), "EW", {"component": s}, (p,))


def split(p: Proof, left: Sequent, right: Sequent) -> Proof:
    joined = left.union(right)
    _need(p.conclusion.has(joined), f"split: {joined} is not a component")
    return Proof(_h(p.conclusion.minus(joined) + [left, right]), "Split",
                 {"left": left, "right": right}, (p,))


def mix(p0: Proof, p1: Proof, left: Sequent, right: Sequent) -> Proof:
    _need(p0.conclusion.has(left), f"mix: {left} missing from left premise")
    _need(p1.conclusion.has(right), f"mix: {right} missing from right premise")
    g = p0.conclusion.minus(left)
    _need(g == p1.conclusion.minus(right), "mix: side hypersequents differ")
    return Proof(_h(g + [left.union(right)]), "Mix", {"left": left, "right": right}, (p0, p1))


def wl(p: Proof, s: Sequent, a: Formula) -> Proof:
    _need(p.conclusion.has(s), f"wl: {s} is not a component")
    new = s.add(ante=[a])
    return Proof(_h(p.conclusion.minus(s) + [new]), "WL", {"component": new, "formula": a}, (p,))


def imp_left(p: Proof, s: Sequent, f: Implies) -> Proof:
    """From G | Gamma,B => A,Delta | Gamma => Delta conclude G | s where s is
    Gamma, f => Delta."""
    _need(isinstance(f, Implies) and s.contains(ante=[f]), "imp_left: bad principal formula")
    exp = _prem_imp_left(s, f)
    _need(p.conclusion.has(*exp), "imp_left: premise lacks the required components")
    return Proof(_h(p.conclusion.minus(*exp) + [s]), "ImpLeft", {"component": s, "formula": f}, (p,))


def imp_right(p1: Proof, p2: Proof, s: Sequent, f: Implies) -> Proof:
    _need(isinstance(f, Implies) and s.contains(succ=[f]), "imp_right: bad principal formula")
    c1, c2 = _prem_imp_right(s, f)
    _need(p1.conclusion.has(c1) and p2.conclusion.has(c2), "imp_right: premise shape")
    g = p1.conclusion.minus(c1)
    _need(g == p2.conclusion.minus(c2), "imp_right: side hypersequents differ")
    return Proof(_h(g + [s]), "ImpRight", {"component": s, "formula": f}, (p1, p2))


def cut(p: Proof, s: Sequent, a: Formula) -> Proof:
    prem = s.add(ante=[a], succ=[a])
    _need(p.conclusion.has(prem), "cut: premise shape")
    return Proof(_h(p.conclusion.minus(prem) + [s]), "Cut", {"component": s, "formula": a}, (p,))


def exists_left(p: Proof, s: Sequent, f: Exists, eigen) -> Proof:
    _need(isinstance(f, Exists) and s.contains(ante=[f]), "exists_left: bad principal formula")
    prem = s.remove(ante=[f]).add(ante=[subst(f.body, {f.var: eigen})])
    _need(p.conclusion.has(prem), "exists_left: premise shape")
    out = Proof(_h(p.conclusion.minus(prem) + [s]), "ExistsLeft",
                {"component": s, "formula": f, "eigen": eigen}, (p,))
    _need(_eigen_ok(out.conclusion, eigen) is None, "exists_left: eigenvariable condition")
    return out


def exists_right(p: Proof, s: Sequent, f: Exists, witness) -> Proof:
    _need(isinstance(f, Exists) and s.contains(succ=[f]), "exists_right: bad principal formula")
    prem = s.remove(succ=[f]).add(succ=[subst(f.body, {f.var: witness})])
    _need(p.conclusion.has(prem), "exists_right: premise shape")
    return Proof(_h(p.conclusion.minus(prem) + [s]), "ExistsRight",
                 {"component": s, "formula": f, "witness": witness}, (p,))


# ---------------------------------------------------------------------------
# checking


def _prem_imp_left(s: Sequent, f: Implies):
    rest = s.remove(ante=[f])
    return rest.add(ante=[f.rhs], succ=[f.lhs]), rest


def _prem_imp_right(s: Sequent, f: Implies):
    rest = s.remove(succ=[f])
    return rest.add(ante=[f.lhs], succ=[f.rhs]), rest


def _eigen_ok(h: Hypersequent, eigen) -> Optional[str]:
    if isinstance(eigen, Var):
        if eigen.name in h.free_vars():
            return f"eigenvariable {eigen} occurs free in the conclusion"
        return None
    if isinstance(eigen, App) and not eigen.args:
        if any(occurs_term(f, eigen) for f in h.formulas()):
            return f"eigenconstant {eigen} occurs in the conclusion"
        return None
    return f"eigen term {print_term(eigen)} is neither a variable nor a constant"


class _Bad(Exception):
    pass


def _expect(cond, msg):
    if not cond:
        raise _Bad(msg)


def _component(h: Hypersequent, data, key="component") -> tuple:
    s = data.get(key)
    _expect(isinstance(s, Sequent), f"rule data lacks {key!r}")
    _expect(h.has(s), f"{key} {s} is not in the conclusion")
    return s, h.minus(s)


def expected_premises(p: Proof, allow_cut: bool = False) -> list:
    """Premise conclusions required by the rule instance at ``p``.

    Raises ``_Bad`` with a reason when the instance itself is malformed.
    """
    h, d, r = p.conclusion, p.data, p.rule
    if r == "Id":
        _expect(len(h) == 1, "id has a single component")
        s = h.components[0]
        _expect(len(s.ante) == 1 and s.ante == s.succ, "not of the form A => A")
        return []
    if r == "EmptySeq":
        _expect(h.components == (Sequent(),), "not the empty sequent")
        return []
    if r == "BotLeft":
        _expect(len(h) == 1, "bot-left has a single component")
        s = h.components[0]
        _expect(s.ante == (BOT,) and len(s.succ) == 1, "not of the form bot => A")
        return []
    if r == "EC":
        s, g = _component(h, d)
        return [_h(g + [s, s])]
    if r == "EW":
        s, g = _component(h, d)
        _expect(g, "ew would leave an empty premise")
        return [_h(g)]
    if r == "Split":
        left, right = d.get("left"), d.get("right")
        _expect(isinstance(left, Sequent) and isinstance(right, Sequent), "split data")
        _expect(h.has(left, right), "split parts are not components")
        return [_h(h.minus(left, right) + [left.union(right)])]
    if r == "Mix":
        left, right = d.get("left"), d.get("right")
        _expect(isinstance(left, Sequent) and isinstance(right, Sequent), "mix data")
        joined = left.union(right)
        _expect(h.has(joined), "merged component missing")
        g = h.minus(joined)
        return [_h(g + [left]), _h(g + [right])]
    if r == "WL":
        s, g = _component(h, d)
        a = d.get("formula")
        _expect(isinstance(a, Formula) and s.contains(ante=[a]), "weakened formula not in antecedent")
        return [_h(g + [s.remove(ante=[a])])]
    if r in ("ImpLeft", "ImpRight"):
        s, g = _component(h, d)
        f = d.get("formula")
        _expect(isinstance(f, Implies), "principal formula is not an implication")
        if r == "ImpLeft":
            _expect(s.contains(ante=[f]), "principal formula not in antecedent")
            a, b = _prem_imp_left(s, f)
            return [_h(g + [a, b])]
        _expect(s.contains(succ=[f]), "principal formula not in succedent")
        a, b = _prem_imp_right(s, f)
        return [_h(g + [a]), _h(g + [b])]
    if r == "Cut":
        _expect(allow_cut, "cut is not allowed")
        s, g = _component(h, d)
        a = d.get("formula")
        _expect(isinstance(a, Formula), "cut formula missing")
        return [_h(g + [s.add(ante=[a], succ=[a])])]
    if r in ("ExistsLeft", "ExistsRight"):
        s, g = _component(h, d)
        f = d.get("formula")
        _expect(isinstance(f, Exists), "principal formula is not existential")
        if r == "ExistsLeft":
            _expect(s.contains(ante=[f]), "principal formula not in antecedent")
            c = d.get("eigen")
            _expect(isinstance(c, (Var, App)), "eigenvariable missing")
            why = _eigen_ok(h, c)
            _expect(why is None, why or "")
            return [_h(g + [s.remove(ante=[f]).add(ante=[subst(f.body, {f.var: c})])])]
        _expect(s.contains(succ=[f]), "principal formula not in succedent")
        t = d.get("witness")
        _expect(isinstance(t, (Var, App)), "witness term missing")
        return [_h(g + [s.remove(succ=[f]).add(succ=[subst(f.body, {f.var: t})])])]
    raise _Bad(f"unknown rule {r!r}")


@dataclass
class Verdict:
    ok: bool
    node: Optional[int] = None
    rule: Optional[str] = None
    reason: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "ok"
        return f"node {self.node} ({self.rule}): {self.reason}"


def nodes_postorder(p: Proof) -> list:
    """Distinct nodes, premises before conclusions, deterministic."""
    seen, order = set(), []
    stack = [(p, False)]
    while stack:
        q, expanded = stack.pop()
        if id(q) in seen:
            continue
        if expanded:
            seen.add(id(q))
            order.append(q)
            continue
        stack.append((q, True))
        for c in reversed(q.premises):
            if id(c) not in seen:
                stack.append((c, False))
    return order


def check(p: Proof, allow_cut: bool = False, cache: Optional[dict] = None) -> Verdict:
    """``cache`` (id -> node) remembers nodes already accepted, so repeated
    checks of growing DAGs only visit new nodes."""
    for idx, q in enumerate(nodes_postorder(p)):
        if cache is not None and cache.get(id(q)) is q:
            continue
        if q.rule not in RULES:
            return Verdict(False, idx, q.rule, f"unknown rule {q.rule!r}")
        try:
            want = expected_premises(q, allow_cut)
        except _Bad as e:
            return Verdict(False, idx, q.rule, str(e))
        except ValueError as e:
            return Verdict(False, idx, q.rule, f"malformed instance: {e}")
        if len(want) != len(q.premises):
            return Verdict(False, idx, q.rule,
                           f"expected {len(want)} premise(s), found {len(q.premises)}")
        for i, (w, prem) in enumerate(zip(want, q.premises)):
            if w != prem.conclusion:
                return Verdict(False, idx, q.rule,
                               f"premise {i} is {prem.conclusion}, expected {w}")
        if cache is not None:
            cache[id(q)] = q
    return Verdict(True)


# ---------------------------------------------------------------------------
# statistics and transformation


def stats(p: Proof) -> dict:
    order = nodes_postorder(p)
    size, depth = {}, {}
    for q in order:
        size[id(q)] = 1 + sum(size[id(c)] for c in q.premises)
        depth[id(q)] = 1 + max((depth[id(c)] for c in q.premises), default=0)
    hist = Counter(q.rule for q in order)
    return {"nodes": size[id(p)], "dag_size": len(order), "depth": depth[id(p)],
            "rules": dict(sorted(hist.items()))}


class _Replacer:
    """Term replacement memoised on object identity; proofs share most of
    their formulas and sequents, so each is rebuilt once."""

    def __init__(self, old, new):
        self.old, self.new = old, new
        self.memo = {}

    def formula(self, f):
        key = id(f)
        if key not in self.memo:
            self.memo[key] = (f, replace_term(f, self.old, self.new))
        return self.memo[key][1]

    def sequent(self, s: Sequent) -> Sequent:
        key = id(s)
        if key not in self.memo:
            self.memo[key] = (s, Sequent.of([self.formula(f) for f in s.ante],
                                            [self.formula(f) for f in s.succ]))
        return self.memo[key][1]

    def hypersequent(self, h: Hypersequent) -> Hypersequent:
        key = id(h)
        if key not in self.memo:
            self.memo[key] = (h, Hypersequent.of(self.sequent(c) for c in h.components))
        return self.memo[key][1]

    def data(self, v):
        if isinstance(v, Sequent):
            return self.sequent(v)
        if isinstance(v, Formula):
            return self.formula(v)
        if isinstance(v, (Var, App)):
            return replace_in_term(v, self.old, self.new)
        return v


def replace_term_in_proof(p: Proof, old, new) -> Proof:
    """Replace every occurrence of the term ``old`` by ``new`` throughout the
    DAG, keeping sharing."""
    r = _Replacer(old, new)
    done = {}
    for q in nodes_postorder(p):
        data = {k: r.data(v) for k, v in q.data.items()}
        done[id(q)] = Proof(r.hypersequent(q.conclusion), q.rule, data,
                            tuple(done[id(c)] for c in q.premises))
    return done[id(p)]


def proofs_equal(p: Proof, q: Proof) -> bool:
    memo = {}
    stack = [(p, q)]
    while stack:
        a, b = stack.pop()
        if (id(a), id(b)) in memo:
            continue
        memo[(id(a), id(b))] = True
        if (a.rule != b.rule or a.conclusion != b.conclusion or a.data.keys() != b.data.keys()
                or len(a.premises) != len(b.premises)):
            return False
        for k in a.data:
            if a.data[k] != b.data[k]:
                return False
        stack.extend(zip(a.premises, b.premises))
    return True


# ---------------------------------------------------------------------------
# serialization

_SEQ_KEYS = ("component", "left", "right")
_TERM_KEYS = ("eigen", "witness")


def _proof_vars(order) -> list:
    names = set()
    for q in order:
        names |= q.conclusion.free_vars()
        for k in _TERM_KEYS:
            if k in q.data:
                names |= term_vars(q.data[k])
        for k in _SEQ_KEYS:
            if k in q.data:
                names |= q.data[k].free_vars()
        if "formula" in q.data:
            names |= set(q.data["formula"].free_vars)
    return sorted(names)


def _dump_data(d: dict) -> dict:
    out = {}
    for k, v in sorted(d.items()):
        if isinstance(v, (Sequent, Formula)):
            out[k] = to_text(v)
        elif isinstance(v, (Var, App)):
            out[k] = print_term(v)
        else:
            out[k] = v
    return out


def to_json(p: Proof) -> dict:
    order = nodes_postorder(p)
    index = {id(q): i for i, q in enumerate(order)}
    nodes = [{"id": index[id(q)], "conclusion": to_text(q.conclusion), "rule": q.rule,
              "data": _dump_data(q.data), "premises": [index[id(c)] for c in q.premises]}
             for q in order]
    return {"format": FORMAT, "root": index[id(p)], "variables": _proof_vars(order), "nodes": nodes}


def serialize(p: Proof) -> str:
    return json.dumps(to_json(p), indent=1, ensure_ascii=False) + "\n"


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def from_json(doc, ids: Optional[dict] = None) -> Proof:
    """Rebuild a proof; ``ids`` (if given) receives id(node) -> file id."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    if doc.get("format") != FORMAT:
        raise SchemaError("$.format", f"expected {FORMAT!r}")
    variables = doc.get("variables", [])
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise SchemaError("$.variables", "expected a list of names")
    nodes = doc.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise SchemaError("$.nodes", "expected a nonempty list")

    parsed = {}

    def rd(text, kind, path):
        if not isinstance(text, str):
            raise SchemaError(path, "expected a string")
        # values are immutable, so repeated strings share one parse
        if (text, kind) not in parsed:
            try:
                parsed[text, kind] = parse(text, kind, allow_reserved=True, variables=variables)
            except ValueError as e:
                raise SchemaError(path, str(e)) from None
        return parsed[text, kind]

    raw = {}
    for i, nd in enumerate(nodes):
        path = f"$.nodes[{i}]"
        if not isinstance(nd, dict):
            raise SchemaError(path, "expected an object")
        for k in ("id", "conclusion", "rule", "premises"):
            if k not in nd:
                raise SchemaError(f"{path}.{k}", "missing")
        if nd["id"] in raw:
            raise SchemaError(f"{path}.id", f"duplicate id {nd['id']!r}")
        if not isinstance(nd["premises"], list):
            raise SchemaError(f"{path}.premises", "expected a list")
        raw[nd["id"]] = (i, nd)
    built = {}

    def build(root_id):
        stack = [(root_id, False)]
        active = set()
        while stack:
            nid, expanded = stack.pop()
            if nid in built:
                continue
            if nid not in raw:
                raise SchemaError("$.nodes", f"dangling premise id {nid!r}")
            i, nd = raw[nid]
            path = f"$.nodes[{i}]"
            if not expanded:
                if nid in active:
                    raise SchemaError(path, "cycle through this node")
                active.add(nid)
                stack.append((nid, True))
                for c in nd["premises"]:
                    if c not in built:
                        if c in active:
                            raise SchemaError(path, "cycle through this node")
                        stack.append((c, False))
                continue
            active.discard(nid)
            data = {}
            for k, v in (nd.get("data") or {}).items():
                if k in _SEQ_KEYS:
                    data[k] = rd(v, "sequent", f"{path}.data.{k}")
                elif k == "formula":
                    data[k] = rd(v, "formula", f"{path}.data.{k}")
                elif k in _TERM_KEYS:
                    data[k] = rd(v, "term", f"{path}.data.{k}")
                else:
                    data[k] = v
            concl = rd(nd["conclusion"], "hypersequent", f"{path}.conclusion")
            for c in nd["premises"]:
                if c not in raw:
                    raise SchemaError(f"{path}.premises", f"dangling premise id {c!r}")
            built[nid] = Proof(concl, str(nd["rule"]), data, tuple(built[c] for c in nd["premises"]))
            if ids is not None:
                ids[id(built[nid])] = nid
        return built[root_id]

    if "root" not in doc:
        raise SchemaError("$.root", "missing")
    return build(doc["root"])


def deserialize(text: str, ids: Optional[dict] = None) -> Proof:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"invalid JSON: {e}") from None
    return from_json(doc, ids)
