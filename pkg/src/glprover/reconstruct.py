"""Label reduction: from proofs of the witness combinations back to H_{1/n}.

An element of a well-formed set is a list of k labeled components.
Component i is the node at the end of its label (a root-to-node path in the
Skolemization tree), instantiated with the i-th witness tuple and
approximated.  Each element carries a proof of the union of its components.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from . import kernel as K
from . import macros
from .propositional import LPCounter, Valid, decide
from .skolem import (Exhausted, SkolemTree, WitnessSet, build_tree, check_sync,
                     find_witnesses, leaf_hypersequents)
from .syntax import Hypersequent, occurs_term, subst, subst_term, to_approx


class ReconstructionError(RuntimeError):
    """An invariant of the reduction failed; always a bug or an unsupported
    corner, never a statement about validity."""


@dataclass
class Element:
    labels: tuple          # one path (tuple of node ids) per component
    proof: K.Proof

    @property
    def stage(self) -> tuple:
        return tuple(len(l) for l in self.labels)

    @property
    def size(self) -> int:
        return sum(self.stage)


@dataclass
class TraceEntry:
    case: int
    component: Optional[int]
    mu_before: int
    mu_after: int
    elements: int
    dropped: int = 0

    def __str__(self):
        comp = "-" if self.component is None else self.component
        extra = f", dropped {self.dropped}" if self.dropped else ""
        return (f"case {self.case} on component {comp}: mu {self.mu_before} -> {self.mu_after}, "
                f"{self.elements} elements{extra}")


@dataclass
class WellFormedSet:
    tree: SkolemTree
    witnesses: WitnessSet
    n: int
    elements: dict                      # labels -> Element, insertion ordered
    _hyp: dict = field(default_factory=dict, repr=False)
    _checked: dict = field(default_factory=dict, repr=False)

    @property
    def k(self) -> int:
        return self.witnesses.k

    def assignment(self, i: int) -> dict:
        return dict(zip(self.witnesses.vars, self.witnesses.tuples[i]))

    def component(self, label: tuple, i: int) -> Hypersequent:
        key = (label[-1], i)
        if key not in self._hyp:
            node = self.tree.nodes[label[-1]]
            self._hyp[key] = to_approx(node.hypersequent.subst(self.assignment(i)), self.n)
        return self._hyp[key]

    def conclusion(self, labels: tuple) -> Hypersequent:
        comps = []
        for i, lab in enumerate(labels):
            comps.extend(self.component(lab, i).components)
        return Hypersequent.of(comps)

    def leftmost(self) -> Element:
        left = self.tree.leftmost_path()
        found = [e for e in self.elements.values()
                 if all(tuple(left[:len(l)]) == l for l in e.labels)]
        if len(found) != 1:
            raise ReconstructionError(f"{len(found)} left-most elements")
        return found[0]

    def mu(self) -> int:
        return self.leftmost().size

    def copy_with(self, elements: dict) -> "WellFormedSet":
        return WellFormedSet(self.tree, self.witnesses, self.n, elements, self._hyp, self._checked)


# ---------------------------------------------------------------------------
# the initial set


def init_wfs(tree: SkolemTree, w: WitnessSet, n: int, leaf_proofs: Optional[dict] = None,
             counter: Optional[LPCounter] = None, audit_set: bool = True) -> WellFormedSet:
    """All k-fold combinations of root-to-leaf paths, each with its proof.

    ``leaf_proofs`` maps combination hypersequents to proofs; when omitted,
    proofs are obtained from the propositional prover.
    """
    if w.n != n:
        raise ValueError(f"witnesses were found for n={w.n}, not n={n}")
    wfs = WellFormedSet(tree, w, n, {})
    paths = [tuple(p) for p in tree.paths()]
    own = {}
    for labels in itertools.product(paths, repeat=w.k):
        concl = wfs.conclusion(labels)
        if leaf_proofs is not None:
            if concl not in leaf_proofs:
                raise ReconstructionError(f"no proof supplied for {concl}")
            proof = leaf_proofs[concl]
        else:
            if concl not in own:
                out = decide(concl, counter)
                if not isinstance(out, Valid):
                    raise ReconstructionError(f"combination {concl} is not valid")
                own[concl] = out.proof
            proof = own[concl]
        wfs.elements[labels] = Element(labels, proof)
    if audit_set:
        problems = audit(wfs)
        if problems:
            raise ReconstructionError("initial set is not well-formed: " + "; ".join(problems[:5]))
    return wfs


# ---------------------------------------------------------------------------
# audit


def _is_path(tree: SkolemTree, label: tuple) -> bool:
    if not label or label[0] != 0:
        return False
    return all(tree.nodes[b].parent == a for a, b in zip(label, label[1:]))


def _left_splits(tree: SkolemTree, label: tuple):
    """Depth indices e such that label[e] is the left child of a RightImp split."""
    for e in range(1, len(label)):
        if tree.nodes[label[e]].edge == "RightImpLeft":
            yield e


def audit(wfs: WellFormedSet, check_proofs: bool = True) -> list:
    """Problems with the well-formedness conditions; empty when fine."""
    tree = wfs.tree
    out = []
    elems = list(wfs.elements.values())
    if not elems:
        return ["empty set"]
    left = tree.leftmost_path()
    lm = [e for e in elems if all(tuple(left[:len(l)]) == l for l in e.labels)]
    if len(lm) != 1:
        out.append(f"condition 1: {len(lm)} left-most elements")
    stage = elems[0].stage
    for e in elems:
        if len(e.labels) != wfs.k:
            out.append(f"condition 3: element {e.labels} has {len(e.labels)} components")
        if e.stage != stage:
            out.append(f"condition 3: stage {e.stage} differs from {stage}")
        for lab in e.labels:
            if not _is_path(tree, lab):
                out.append(f"label {lab} is not a path from the root")
    # condition 2: every left split has its right partner
    prefixes = set()
    for e in elems:
        for c, lab in enumerate(e.labels):
            rest = e.labels[:c] + e.labels[c + 1:]
            for e_ in range(1, len(lab) + 1):
                prefixes.add((c, rest, lab[:e_]))
    for e in elems:
        for c, lab in enumerate(e.labels):
            rest = e.labels[:c] + e.labels[c + 1:]
            for d in _left_splits(tree, lab):
                right = tree.nodes[lab[d - 1]].children[1]
                if (c, rest, lab[:d] + (right,)) not in prefixes:
                    out.append(f"condition 2: element {e.labels} lacks the right partner "
                               f"of component {c} at depth {d + 1}")
    if check_proofs:
        for e in elems:
            if e.proof is None:
                out.append(f"condition 4: element {e.labels} has no proof")
                continue
            want = wfs.conclusion(e.labels)
            if e.proof.conclusion != want:
                out.append(f"condition 4: element {e.labels} proves {e.proof.conclusion}, expected {want}")
                continue
            v = K.check(e.proof, cache=wfs._checked)
            if not v:
                out.append(f"condition 4: element {e.labels}: {v}")
    return out


# ---------------------------------------------------------------------------
# the reduction step


def _edge(tree, label):
    return tree.nodes[label[-1]].edge if len(label) > 1 else None


def _choose(wfs: WellFormedSet, g: Element):
    """(case, component) for the left-most element, or (5, None)."""
    tree = wfs.tree
    edges = [_edge(tree, lab) for lab in g.labels]
    for case, tag in ((1, "LeftImp"), (2, "RightExists"), (3, "RightImpLeft")):
        for m, e in enumerate(edges):
            if e == tag:
                return case, m
    cands = [m for m, e in enumerate(edges) if e == "LeftExists"]
    if not cands:
        return 5, None
    terms = {m: _skolem_term(wfs, g.labels[m], m) for m in cands}
    for m in cands:
        t = terms[m]
        if any(t != terms[j] and _proper_subterm(t, terms[j]) for j in cands):
            continue
        if _eigen_blockers(wfs, g, m, t) == []:
            return 4, m
    raise ReconstructionError("case 4: no Skolem term satisfies the eigencondition")


def _proper_subterm(t, u) -> bool:
    from .syntax import subterms
    return t != u and any(s == t for s in subterms(u))


def _skolem_term(wfs, label, i):
    step = wfs.tree.step_at(len(label) - 1)
    return subst_term(step.term, wfs.assignment(i))


def _same_as(wfs, e: Element, m: int) -> list:
    hm = wfs.component(e.labels[m], m)
    return [j for j in range(len(e.labels)) if j != m and wfs.component(e.labels[j], j) == hm]


def _eigen_blockers(wfs, e: Element, m: int, t) -> list:
    """Components other than m (and its duplicates) mentioning ``t``."""
    dup = set(_same_as(wfs, e, m))
    bad = []
    for j, lab in enumerate(e.labels):
        if j == m or j in dup:
            continue
        if any(occurs_term(f, t) for f in wfs.component(lab, j).formulas()):
            bad.append(j)
    return bad


def _principal_ctx(wfs, label, i):
    """(instantiated principal formula, unscaled instantiated context) at the
    parent node of ``label``'s last edge."""
    tree = wfs.tree
    step = tree.step_at(len(label) - 1)
    parent = tree.nodes[label[-2]]
    s = parent.at(step.pos)
    f = step.formula
    if step.kind in ("RightImp", "RightExists"):
        ctx = s.remove(succ=[f])
    else:
        ctx = s.remove(ante=[f])
    a = wfs.assignment(i)
    return step, subst(f, a), ctx.subst(a)


def _reduce(wfs, e: Element, m: int, case: int, partner: Optional[Element] = None) -> K.Proof:
    lab = e.labels[m]
    step, f, ctx = _principal_ctx(wfs, lab, m)
    n = wfs.n
    if case == 1:
        return macros.imp_left_approx(e.proof, n, ctx, f)
    if case == 2:
        t = wfs.witnesses.tuples[m][wfs.witnesses.vars.index(step.var)]
        return macros.exists_right_approx(e.proof, n, ctx, f, t)
    if case == 3:
        return macros.imp_right_approx(e.proof, partner.proof, n, ctx, f)
    c = subst_term(step.term, wfs.assignment(m))
    dups = _same_as(wfs, e, m)
    p = e.proof
    removed = []
    for j in dups:
        for s in wfs.component(e.labels[j], j).components:
            p = K.ec(p, s)
            removed.append(s)
    p = macros.exists_left_approx(p, n, ctx, f, c, wfs.tree.sig)
    for s in removed:
        p = K.ew(p, s)
    return p


def _shorten(labels, m):
    return labels[:m] + (labels[m][:-1],) + labels[m + 1:]


def _prune(wfs: WellFormedSet, elements: dict) -> int:
    """Drop elements whose left splits lost their right partner, repeatedly."""
    tree = wfs.tree
    dropped = 0
    while True:
        prefixes = set()
        for labels in elements:
            for c, lab in enumerate(labels):
                rest = labels[:c] + labels[c + 1:]
                for e_ in range(1, len(lab) + 1):
                    prefixes.add((c, rest, lab[:e_]))
        bad = []
        for labels in elements:
            for c, lab in enumerate(labels):
                rest = labels[:c] + labels[c + 1:]
                if any((c, rest, lab[:d] + (tree.nodes[lab[d - 1]].children[1],)) not in prefixes
                       for d in _left_splits(tree, lab)):
                    bad.append(labels)
                    break
        if not bad:
            return dropped
        for labels in bad:
            del elements[labels]
        dropped += len(bad)


def step(wfs: WellFormedSet):
    """One application of the reduction; returns (new set, TraceEntry)."""
    g = wfs.leftmost()
    mu0 = g.size
    case, m = _choose(wfs, g)
    if case == 5:
        return wfs, TraceEntry(5, None, mu0, mu0, len(wfs.elements))
    tree = wfs.tree
    glabels = g.labels
    out = {}
    dropped = 0
    consumed = set()
    for labels, e in wfs.elements.items():
        if labels in consumed:
            continue
        edge = _edge(tree, labels[m])
        new_labels = _shorten(labels, m)
        if edge == "SelfLoop":
            out[new_labels] = Element(new_labels, e.proof)
            continue
        if case == 3:
            if edge == "RightImpRight":
                continue            # handled together with its left partner
            right = tree.nodes[labels[m][-2]].children[1]
            pkey = labels[:m] + (labels[m][:-1] + (right,),) + labels[m + 1:]
            partner = wfs.elements.get(pkey)
            if partner is None:
                if labels == glabels:
                    raise ReconstructionError("case 3: partner of the left-most element is missing")
                dropped += 1
                continue
            consumed.add(pkey)
            out[new_labels] = Element(new_labels, _reduce(wfs, e, m, 3, partner))
            continue
        if case == 4:
            t = _skolem_term(wfs, labels[m], m)
            if _eigen_blockers(wfs, e, m, t):
                if labels == glabels:
                    raise ReconstructionError("case 4: eigencondition fails on the left-most element")
                dropped += 1
                continue
        out[new_labels] = Element(new_labels, _reduce(wfs, e, m, case))
    if case == 3:
        # right branches whose left partner was absent cannot be reduced
        for labels, e in wfs.elements.items():
            if _edge(tree, labels[m]) == "RightImpRight" and labels not in consumed:
                dropped += 1
    dropped += _prune(wfs, out)
    new = wfs.copy_with(out)
    mu1 = new.mu()
    if not mu1 < mu0:
        raise ReconstructionError(f"mu did not decrease ({mu0} -> {mu1})")
    return new, TraceEntry(case, m, mu0, mu1, len(out), dropped)


def finish(wfs: WellFormedSet, h: Hypersequent) -> K.Proof:
    """Contract the k copies of H_{1/n} in the left-most element."""
    g = wfs.leftmost()
    if any(len(l) != 1 for l in g.labels):
        raise ReconstructionError("left-most element still has non-root labels")
    target = to_approx(h, wfs.n)
    p = g.proof
    have = Counter(p.conclusion.components)
    want = Counter(target.components)
    for s in sorted(have, key=lambda x: x.key):
        while have[s] > want[s]:
            p = K.ec(p, s)
            have[s] -= 1
    if p.conclusion != target:
        raise ReconstructionError(f"final conclusion {p.conclusion} differs from {target}")
    return p


@dataclass
class RunResult:
    proof: K.Proof
    trace: list
    iterations: int
    audits: int


def run(wfs: WellFormedSet, h: Hypersequent, audit_each: bool = True, on_step=None) -> RunResult:
    """Iterate ``step`` to the fixpoint and conclude H_{1/n}."""
    trace = []
    audits = 0
    limit = wfs.mu()
    while True:
        new, entry = step(wfs)
        if entry.case == 5:
            break
        trace.append(entry)
        if on_step is not None:
            on_step(entry)
        if audit_each:
            problems = audit(new)
            audits += 1
            if problems:
                raise ReconstructionError(f"audit after step {len(trace)}: " + "; ".join(problems[:5]))
        wfs = new
        if len(trace) > limit:
            raise ReconstructionError("more iterations than the initial size")
    proof = finish(wfs, h)
    v = K.check(proof)
    if not v:
        raise ReconstructionError(f"final proof rejected: {v}")
    return RunResult(proof, trace, len(trace), audits)


@dataclass
class Proved:
    proof: K.Proof
    tree: SkolemTree
    witnesses: WitnessSet
    trace: list


def prove_approx(h: Hypersequent, n: int, max_k: int = 4, max_depth: int = 4,
                 lp_budget: int = 100_000, workers: int = 1, audit_each: bool = True,
                 on_step=None):
    """Proof of H_{1/n} for a closed hypersequent, or Exhausted."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tree = build_tree(h)
    sync = check_sync(tree)
    if not sync:
        raise ReconstructionError("tree violates synchronisation: " + "; ".join(sync.violations[:3]))
    leaves = leaf_hypersequents(tree)
    w = find_witnesses(leaves, tree.vars, n, tree.sig, max_k=max_k, max_depth=max_depth,
                       lp_budget=lp_budget, workers=workers)
    if isinstance(w, Exhausted):
        return w
    wfs = init_wfs(tree, w, n, audit_set=audit_each)
    res = run(wfs, h, audit_each=audit_each, on_step=on_step)
    return Proved(res.proof, tree, w, res.trace)
