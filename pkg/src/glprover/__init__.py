"""Prover, decider and proof checker for Lukasiewicz hypersequent calculi."""

from .kernel import Proof, check, deserialize, serialize
from .propositional import Invalid, Valid, decide
from .reconstruct import Proved, prove_approx
from .skolem import Exhausted, WitnessSet, build_tree
from .syntax import Hypersequent, Sequent, parse, to_approx, to_text

__all__ = ["Proof", "check", "serialize", "deserialize", "decide", "Valid", "Invalid",
           "prove_approx", "Proved", "Exhausted", "WitnessSet", "build_tree",
           "Hypersequent", "Sequent", "parse", "to_approx", "to_text"]
