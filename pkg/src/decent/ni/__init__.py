"""Store equivalence, noninterference checking and program generation."""

from decent.ni.checker import (
    ARG_ROOT, ERROR, FAIL, PASS, NIReport, Witness, check_noninterference, clone_interpreter, differential_check,
    differential_trial, evaluate_setup,
)
from decent.ni.corpus import MUTATION_CORPUS, MutationCase
from decent.ni.equivalence import EquivContext, Mismatch, eq_env, eq_envs, eq_value, follow_path
from decent.ni.generator import gen_program, gen_triple

__all__ = [
    "ARG_ROOT", "ERROR", "FAIL", "PASS", "NIReport", "Witness", "check_noninterference", "clone_interpreter",
    "differential_check", "differential_trial", "evaluate_setup", "MUTATION_CORPUS", "MutationCase",
    "EquivContext", "Mismatch", "eq_env", "eq_envs", "eq_value", "follow_path", "gen_program", "gen_triple",
]
