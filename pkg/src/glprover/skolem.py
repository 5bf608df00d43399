"""Skolemization tree, level sets and approximate Herbrand witness search."""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .farkas import LPBudgetExceeded
from .propositional import LPCounter, atomic_hypersequent_valid, is_valid
from .syntax import (App, Exists, Hypersequent, Implies, Sequent, Signature, Var,
                     approx_sequent, has_quantifier, print_term, subst, term_depth,
                     to_text)


@dataclass
class Step:
    """One decomposition step, shared by every node at a given depth."""

    kind: str            # RightImp, LeftImp, RightExists, LeftExists
    pos: int
    formula: object
    new_pos: Optional[int] = None
    var: Optional[str] = None
    term: Optional[object] = None

    def describe(self) -> str:
        extra = ""
        if self.kind == "LeftImp":
            extra = f", new position {self.new_pos}"
        elif self.kind == "RightExists":
            extra = f", variable {self.var}"
        elif self.kind == "LeftExists":
            extra = f", term {print_term(self.term)}"
        return f"{self.kind} at position {self.pos} on {self.formula}{extra}"


@dataclass
class Node:
    id: int
    depth: int
    comps: tuple           # ((position, Sequent), ...)
    parent: Optional[int] = None
    edge: Optional[str] = None
    children: list = field(default_factory=list)

    @property
    def hypersequent(self) -> Hypersequent:
        return Hypersequent.of(s for _, s in self.comps)

    def at(self, pos):
        for p, s in self.comps:
            if p == pos:
                return s
        return None

    def formulas(self) -> set:
        return {f for _, s in self.comps for f in s.formulas()}


@dataclass
class SkolemTree:
    root: Hypersequent
    nodes: list
    steps: list
    vars: list
    sig: Signature
    h: int = 1

    def node(self, i) -> Node:
        return self.nodes[i]

    def leaves(self) -> list:
        return [nd for nd in self.nodes if not nd.children]

    def leaves_ordered(self) -> list:
        out, stack = [], [0]
        while stack:
            nd = self.nodes[stack.pop()]
            if nd.children:
                stack.extend(reversed(nd.children))
            else:
                out.append(nd)
        return out

    def path_to(self, i) -> list:
        out = []
        while i is not None:
            out.append(i)
            i = self.nodes[i].parent
        return out[::-1]

    def paths(self) -> list:
        return [self.path_to(nd.id) for nd in self.leaves_ordered()]

    def leftmost_path(self) -> list:
        path = [0]
        while self.nodes[path[-1]].children:
            path.append(self.nodes[path[-1]].children[0])
        return path

    def step_at(self, depth) -> Step:
        """Step taken from ``depth`` to ``depth + 1``."""
        return self.steps[depth - 1]


def _principal(s: Sequent):
    for f in s.succ:
        if not f.is_atomic():
            return "succ", f
    for f in s.ante:
        if not f.is_atomic():
            return "ante", f
    return None


def _choose_step(node: Node, tree: SkolemTree, counter: list) -> Optional[Step]:
    for pos, s in node.comps:
        pr = _principal(s)
        if pr is None:
            continue
        side, f = pr
        if isinstance(f, Implies):
            if side == "succ":
                return Step("RightImp", pos, f)
            counter[0] += 1
            return Step("LeftImp", pos, f, new_pos=counter[0] - 1)
        if side == "succ":
            v = tree.sig.fresh("variable")
            tree.vars.append(v)
            return Step("RightExists", pos, f, var=v)
        args = tuple(Var(v) for v in tree.vars)
        fn = tree.sig.fresh("function", len(args))
        return Step("LeftExists", pos, f, term=App(fn, args))
    return None


def _replace(comps, pos, new):
    out = []
    for p, s in comps:
        if p == pos:
            out.extend(new)
        else:
            out.append((p, s))
    return tuple(out)


def _expand(step: Step, nd: Node):
    """Children (edge tag, comps) of ``nd`` under ``step``."""
    s = nd.at(step.pos)
    f = step.formula
    if step.kind in ("RightImp", "RightExists"):
        present = s is not None and s.contains(succ=[f])
    else:
        present = s is not None and s.contains(ante=[f])
    if not present:
        return [("SelfLoop", nd.comps)]
    if step.kind == "RightImp":
        rest = s.remove(succ=[f])
        return [("RightImpLeft", _replace(nd.comps, step.pos, [(step.pos, rest.add(ante=[f.lhs], succ=[f.rhs]))])),
                ("RightImpRight", _replace(nd.comps, step.pos, [(step.pos, rest)]))]
    if step.kind == "LeftImp":
        rest = s.remove(ante=[f])
        return [("LeftImp", _replace(nd.comps, step.pos, [(step.pos, rest.add(ante=[f.rhs], succ=[f.lhs])),
                                                         (step.new_pos, rest)]))]
    if step.kind == "RightExists":
        inst = subst(f.body, {f.var: Var(step.var)})
        return [("RightExists", _replace(nd.comps, step.pos, [(step.pos, s.remove(succ=[f]).add(succ=[inst]))]))]
    inst = subst(f.body, {f.var: step.term})
    return [("LeftExists", _replace(nd.comps, step.pos, [(step.pos, s.remove(ante=[f]).add(ante=[inst]))]))]


def build_tree(h: Hypersequent, sig: Optional[Signature] = None) -> SkolemTree:
    """Deterministic Skolemization tree of a closed hypersequent."""
    if h.free_vars():
        raise ValueError(f"hypersequent has free variables {sorted(h.free_vars())}")
    if sig is None:
        sig = Signature.of(h)
    sig.ensure_constant()
    root = Node(0, 1, tuple(enumerate(h.components)))
    tree = SkolemTree(h, [root], [], [], sig)
    counter = [len(h.components)]
    leaves = [root]
    while True:
        step = _choose_step(leaves[0], tree, counter)
        if step is None:
            break
        tree.steps.append(step)
        new_leaves = []
        for nd in leaves:
            for tag, comps in _expand(step, nd):
                child = Node(len(tree.nodes), nd.depth + 1, comps, nd.id, tag)
                tree.nodes.append(child)
                nd.children.append(child.id)
                new_leaves.append(child)
        leaves = new_leaves
    tree.h = leaves[0].depth
    return tree


def level_set(tree: SkolemTree, i: int) -> list:
    """Nodes at depth ``i`` in left-to-right order."""
    if not 1 <= i <= tree.h:
        raise IndexError(f"level {i} outside 1..{tree.h}")
    return _level(tree, i)


def _level(tree, i):
    seen, out = set(), []
    for path in tree.paths():
        nid = path[i - 1]
        if nid not in seen:
            seen.add(nid)
            out.append(tree.nodes[nid])
    return out


@dataclass
class SyncReport:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def check_sync(tree: SkolemTree) -> SyncReport:
    bad = []
    left = tree.leftmost_path()
    if len(left) != tree.h:
        bad.append(f"leftmost path has length {len(left)}, expected {tree.h}")
    for p in tree.paths():
        if len(p) != tree.h:
            bad.append(f"path to node {p[-1]} has length {len(p)}")
    leaf = tree.nodes[left[-1]]
    for f in leaf.formulas():
        if has_quantifier(f) or isinstance(f, Implies):
            bad.append(f"leftmost leaf contains {f}")
    for i in range(1, tree.h + 1):
        g = tree.nodes[left[i - 1]]
        gf = g.formulas()
        for nd in _level(tree, i):
            if nd.depth != g.depth:
                bad.append(f"node {nd.id} at level {i} has depth {nd.depth}")
            extra = nd.formulas() - gf
            if extra:
                bad.append(f"node {nd.id} at level {i} has {sorted(map(str, extra))} not in node {g.id}")
    return SyncReport(not bad, bad)


# ---------------------------------------------------------------------------
# terms and witnesses


def enumerate_terms(sig: Signature, depth: int) -> list:
    """Ground terms of depth <= ``depth``, by depth then printed form."""
    consts = [App(c) for c in sig.constants()]
    funcs = sorted((f, a) for f, a in sig.functions.items() if a > 0)
    by_depth = [sorted(consts, key=print_term)]
    upto = list(by_depth[0])
    for d in range(1, depth + 1):
        new = []
        for f, a in funcs:
            for args in itertools.product(upto, repeat=a):
                if max(term_depth(t) for t in args) == d - 1:
                    new.append(App(f, tuple(args)))
        new.sort(key=print_term)
        by_depth.append(new)
        upto = upto + new
    return upto


@dataclass
class WitnessSet:
    k: int
    tuples: list
    n: int
    vars: list

    def describe(self) -> str:
        rows = []
        for i, t in enumerate(self.tuples, 1):
            inner = ", ".join(f"{v} := {print_term(x)}" for v, x in zip(self.vars, t))
            rows.append(f"t{i}: ({inner})")
        return "\n".join(rows)


@dataclass
class Exhausted:
    reason: str
    max_k: int
    max_depth: int
    lp_calls: int


def instantiate(h: Hypersequent, vars: list, terms: tuple) -> Hypersequent:
    return h.subst(dict(zip(vars, terms))) if vars else h


def combination(leaves: list, vars: list, tuples: list, n: int) -> Hypersequent:
    comps = []
    for leaf, t in zip(leaves, tuples):
        for s in instantiate(leaf, vars, t).components:
            comps.append(approx_sequent(s, n))
    return Hypersequent.of(comps)


def _valid(h: Hypersequent, counter) -> bool:
    if all(s.is_atomic() for s in h.components):
        return atomic_hypersequent_valid(h, counter)
    return is_valid(h, counter)


def combos_valid(leaves: list, vars: list, tuples: list, n: int, counter=None) -> bool:
    for choice in itertools.product(leaves, repeat=len(tuples)):
        if not _valid(combination(choice, vars, tuples, n), counter):
            return False
    return True


def _check_job(args):
    leaves, vars, tuples, n = args
    return combos_valid(leaves, vars, tuples, n), len(leaves) ** len(tuples)


def leaf_hypersequents(tree: SkolemTree) -> list:
    out, seen = [], set()
    for nd in tree.leaves_ordered():
        hs = nd.hypersequent
        if hs not in seen:
            seen.add(hs)
            out.append(hs)
    return out


def candidate_tuples(sig: Signature, nvars: int, depth: int) -> list:
    terms = enumerate_terms(sig, depth)
    vecs = list(itertools.product(terms, repeat=nvars))
    vecs.sort(key=lambda v: (max((term_depth(t) for t in v), default=0), [print_term(t) for t in v]))
    return vecs


def find_witnesses(leaves: list, vars: list, n: int, sig: Signature, max_k: int = 4,
                   max_depth: int = 4, lp_budget: int = 100_000, workers: int = 1):
    """First (k, depth) in k-major order whose tuples make every
    combination of approximated leaves valid."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for leaf in leaves:
        if any(has_quantifier(f) for f in leaf.formulas()):
            raise ValueError("leaves must be quantifier-free")
    counter = LPCounter(lp_budget)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for k in range(1, max_k + 1):
            for d in range(0, max_depth + 1):
                vecs = candidate_tuples(sig, len(vars), d)
                fresh = [tuple(v) for v in itertools.combinations(vecs, k)
                         if d == 0 or any(term_depth(t) == d for vec in v for t in vec)]
                if not vars and (k > 1 or d > 0):
                    continue
                found = _scan(fresh, leaves, vars, n, counter, pool)
                if found is not None:
                    return WitnessSet(k, list(found), n, list(vars))
    except LPBudgetExceeded as e:
        return Exhausted(str(e), max_k, max_depth, counter.calls)
    finally:
        if pool is not None:
            pool.shutdown()
    return Exhausted("no witnesses within the bounds", max_k, max_depth, counter.calls)


def _scan(cands, leaves, vars, n, counter, pool):
    if pool is None:
        for c in cands:
            if combos_valid(leaves, vars, list(c), n, counter):
                return c
        return None
    batch = max(1, pool._max_workers * 4)
    for start in range(0, len(cands), batch):
        chunk = cands[start:start + batch]
        results = list(pool.map(_check_job, [(leaves, vars, list(c), n) for c in chunk]))
        for c, (ok, calls) in zip(chunk, results):
            counter.calls += calls
            if counter.budget is not None and counter.calls > counter.budget:
                raise LPBudgetExceeded(f"LP budget of {counter.budget} calls exhausted")
            if ok:
                return c
    return None


# ---------------------------------------------------------------------------
# output


def tree_to_json(tree: SkolemTree) -> dict:
    return {
        "root": to_text(tree.root),
        "height": tree.h,
        "variables": tree.vars,
        "steps": [s.describe() for s in tree.steps],
        "nodes": [{"id": nd.id, "depth": nd.depth, "parent": nd.parent, "edge": nd.edge,
                   "children": nd.children,
                   "components": [[p, to_text(s)] for p, s in nd.comps]} for nd in tree.nodes],
        "leftmost_path": tree.leftmost_path(),
    }


def tree_to_text(tree: SkolemTree) -> str:
    lines = [f"root: {to_text(tree.root)}", f"height: {tree.h}",
             f"variables: {', '.join(tree.vars) or '-'}"]
    for d, s in enumerate(tree.steps, 1):
        lines.append(f"step {d}: {s.describe()}")
    left = set(tree.leftmost_path())
    for nd in tree.nodes:
        mark = "*" if nd.id in left else " "
        comps = " | ".join(f"[{p}] {to_text(s)}" for p, s in nd.comps)
        edge = f" <-{nd.edge}- {nd.parent}" if nd.parent is not None else ""
        lines.append(f"{mark}{nd.id} d{nd.depth}{edge}: {comps}")
    return "\n".join(lines)


def tree_dump(tree: SkolemTree, fmt: str = "text") -> str:
    if fmt == "structured":
        return json.dumps(tree_to_json(tree), indent=1, ensure_ascii=False)
    return tree_to_text(tree)
