"""Command-line entry point.

Exit codes: 0 valid or proved, 1 invalid or rejected, 2 input error,
3 bounds exhausted, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import kernel as K
from .farkas import LPBudgetExceeded
from .propositional import Invalid, LPCounter, decide
from .reconstruct import ReconstructionError, prove_approx
from .semantics import (FiniteStructure, UnboundError, count_structures, evaluate,
                        eval_hypersequent, format_structure, format_valuation,
                        max_over_structures, parse_model, sample_refute, signature_of)
from .skolem import Exhausted, build_tree, check_sync, tree_dump
from .syntax import Hypersequent, has_quantifier, parse, to_approx, to_text

EXIT_OK, EXIT_REJECT, EXIT_INPUT, EXIT_BOUNDS, EXIT_INTERNAL = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    n: int = 1
    max_k: int = 4
    max_term_depth: int = 4
    lp_budget: int = 100_000
    seed: int = 0
    format: str = "text"
    allow_cut: bool = False
    trace: bool = False
    workers: int = 1
    model: str = None
    output: str = None
    samples: int = 0

    def validate(self):
        if self.n < 1:
            raise InputError("--n must be at least 1")
        if self.max_k < 0 or self.max_term_depth < 0:
            raise InputError("bounds must be nonnegative")
        if self.lp_budget < 1 or self.workers < 1:
            raise InputError("--lp-budget and --workers must be positive")


def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _hypersequent(text: str) -> Hypersequent:
    try:
        return parse(text.strip(), "hypersequent")
    except ValueError as e:
        raise InputError(f"parse error: {e}") from None


def _emit(cfg: RunConfig, payload: dict, text: str):
    if cfg.format == "structured":
        print(json.dumps(payload, indent=1, ensure_ascii=False))
    else:
        print(text)


def _write_proof(cfg: RunConfig, proof: K.Proof):
    """Serialize, re-read and re-check before anything leaves the process."""
    text = K.serialize(proof)
    again = K.deserialize(text)
    v = K.check(again, allow_cut=False)
    if not v or again.conclusion != proof.conclusion:
        raise ReconstructionError(f"emitted proof fails its self-check: {v}")
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _valuation_json(v):
    return {str(a): str(x) for a, x in sorted(v.items(), key=lambda kv: kv[0].key)}


def cmd_decide(cfg: RunConfig) -> int:
    h = _hypersequent(_read(cfg.input))
    if any(has_quantifier(f) for f in h.formulas()):
        raise InputError("decide needs a quantifier-free hypersequent; use prove")
    out = decide(h, LPCounter(cfg.lp_budget))
    if isinstance(out, Invalid):
        _emit(cfg, {"verdict": "invalid", "value": str(out.value),
                    "countermodel": _valuation_json(out.valuation)},
              f"invalid (value {out.value})\n{format_valuation(out.valuation)}")
        return EXIT_REJECT
    _write_proof(cfg, out.proof)
    st = K.stats(out.proof)
    _emit(cfg, {"verdict": "valid", "proof_nodes": st["dag_size"], "output": cfg.output},
          f"valid ({st['dag_size']} proof nodes)" + (f", proof written to {cfg.output}" if cfg.output else ""))
    return EXIT_OK


def cmd_prove(cfg: RunConfig) -> int:
    h = _hypersequent(_read(cfg.input))
    if h.free_vars():
        raise InputError(f"prove needs a closed hypersequent; free: {', '.join(sorted(h.free_vars()))}")

    def on_step(e):
        print(f"F: {e}", file=sys.stderr)

    res = prove_approx(h, cfg.n, max_k=cfg.max_k, max_depth=cfg.max_term_depth,
                       lp_budget=cfg.lp_budget, workers=cfg.workers,
                       on_step=on_step if cfg.trace else None)
    if isinstance(res, Exhausted):
        _emit(cfg, {"verdict": "exhausted", "reason": res.reason, "max_k": res.max_k,
                    "max_term_depth": res.max_depth, "lp_calls": res.lp_calls},
              f"exhausted: {res.reason} (max-k {res.max_k}, max-term-depth {res.max_depth}, "
              f"{res.lp_calls} LP calls)")
        return EXIT_BOUNDS
    text = _write_proof(cfg, res.proof)
    target = to_text(to_approx(h, cfg.n))
    if cfg.output:
        _emit(cfg, {"verdict": "proved", "conclusion": target, "k": res.witnesses.k,
                    "witnesses": res.witnesses.describe().splitlines(),
                    "iterations": len(res.trace), "output": cfg.output},
              f"proved {target}\nwitnesses (k={res.witnesses.k}):\n{res.witnesses.describe() or '(none)'}\n"
              f"proof written to {cfg.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    try:
        with open(cfg.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(str(e)) from None
    ids = {}
    try:
        proof = K.deserialize(text, ids)
    except K.SchemaError as e:
        raise InputError(f"malformed proof file: {e}") from None
    v = K.check(proof, allow_cut=cfg.allow_cut)
    if not v:
        node = K.nodes_postorder(proof)[v.node]
        fid = ids.get(id(node), v.node)
        _emit(cfg, {"verdict": "rejected", "node": fid, "rule": v.rule, "reason": v.reason},
              f"rejected at node {fid} ({v.rule}): {v.reason}")
        return EXIT_REJECT
    st = K.stats(proof)
    _emit(cfg, {"verdict": "ok", "conclusion": to_text(proof.conclusion), **st},
          f"ok: {to_text(proof.conclusion)} ({st['dag_size']} nodes)")
    return EXIT_OK


MAX_STRUCTURES = 200_000


def cmd_countermodel(cfg: RunConfig) -> int:
    h = _hypersequent(_read(cfg.input))
    if not any(has_quantifier(f) for f in h.formulas()):
        if cfg.samples:
            v = sample_refute(h, cfg.samples, cfg.seed)
            if v is not None:
                val = eval_hypersequent(v, h)
                _emit(cfg, {"verdict": "invalid", "value": str(val), "countermodel": _valuation_json(v)},
                      f"value {val}\n{format_valuation(v)}")
                return EXIT_REJECT
        out = decide(h, LPCounter(cfg.lp_budget))
        if isinstance(out, Invalid):
            _emit(cfg, {"verdict": "invalid", "value": str(out.value),
                        "countermodel": _valuation_json(out.valuation)},
                  f"value {out.value}\n{format_valuation(out.valuation)}")
            return EXIT_REJECT
        _emit(cfg, {"verdict": "valid"}, "valid: no countermodel exists")
        return EXIT_OK
    funcs, preds = signature_of(h)
    size = 2 if count_structures(funcs, preds, 2) <= MAX_STRUCTURES else 1
    if count_structures(funcs, preds, size) > MAX_STRUCTURES:
        raise InputError("signature too large for the structure search")
    best, wit = max_over_structures(h, size)
    if best is not None and best > 0:
        m, asg = wit
        _emit(cfg, {"verdict": "invalid", "value": str(best), "structure": format_structure(m, asg)},
              f"value {best}\n{format_structure(m, asg)}")
        return EXIT_REJECT
    _emit(cfg, {"verdict": "unknown", "max_size": size},
          f"no countermodel among structures of size <= {size} on the grid 0, 1/2, 1")
    return EXIT_BOUNDS


def cmd_skolemize(cfg: RunConfig) -> int:
    h = _hypersequent(_read(cfg.input))
    if h.free_vars():
        raise InputError("skolemize needs a closed hypersequent")
    tree = build_tree(h)
    report = check_sync(tree)
    print(tree_dump(tree, cfg.format))
    if not report:
        for line in report.violations:
            print(f"sync violation: {line}", file=sys.stderr)
        return EXIT_REJECT
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    if not cfg.model:
        raise InputError("eval needs --model")
    text = _read(cfg.input).strip()
    try:
        value = parse(text, "hypersequent")
    except ValueError:
        try:
            value = parse(text, "formula")
        except ValueError as e:
            raise InputError(f"parse error: {e}") from None
    try:
        with open(cfg.model, encoding="utf-8") as fh:
            model = parse_model(fh.read())
    except (OSError, ValueError) as e:
        raise InputError(f"bad model: {e}") from None
    try:
        if isinstance(model, FiniteStructure):
            free = value.free_vars() if isinstance(value, Hypersequent) else value.free_vars
            if free:
                raise InputError("eval over a structure needs a closed input")
        v = evaluate(model, value)
    except UnboundError as e:
        raise InputError(f"model does not interpret {e}") from None
    _emit(cfg, {"value": str(v), "valid_here": v <= 0}, str(v))
    return EXIT_OK


COMMANDS = {"decide": cmd_decide, "prove": cmd_prove, "check": cmd_check,
            "countermodel": cmd_countermodel, "skolemize": cmd_skolemize, "eval": cmd_eval}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "structured"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--lp-budget", type=int, default=100_000)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--trace", action="store_true")

    ap = argparse.ArgumentParser(prog="glprover",
                                 description="Lukasiewicz hypersequent prover and proof checker.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("decide", parents=[common], help="decide a quantifier-free hypersequent")
    p.add_argument("input", help="hypersequent text, a file path, or - for stdin")
    p.add_argument("--output", "-o", help="write the proof here")
    p = sub.add_parser("prove", parents=[common], help="prove H_{1/n} for a closed hypersequent")
    p.add_argument("input")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-k", type=int, default=4)
    p.add_argument("--max-term-depth", type=int, default=4)
    p.add_argument("--output", "-o")
    p = sub.add_parser("check", parents=[common], help="check a glv-proof/1 file")
    p.add_argument("input", help="proof file")
    p.add_argument("--allow-cut", action="store_true")
    p = sub.add_parser("countermodel", parents=[common], help="search for a countermodel")
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=0,
                   help="try this many seeded random valuations before the exact search")
    p = sub.add_parser("skolemize", parents=[common], help="print the Skolemization tree")
    p.add_argument("input")
    p = sub.add_parser("eval", parents=[common], help="evaluate under a model file")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    return ap


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(command=ns.command, input=ns.input)
    for f in ("n", "max_k", "max_term_depth", "lp_budget", "seed", "format", "allow_cut",
              "trace", "workers", "model", "output", "samples"):
        if hasattr(ns, f):
            setattr(cfg, f, getattr(ns, f))
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    cfg = config_from_args(ns)
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except LPBudgetExceeded as e:
        print(f"exhausted: {e}", file=sys.stderr)
        return EXIT_BOUNDS
    except (ReconstructionError, K.ProofError, AssertionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
