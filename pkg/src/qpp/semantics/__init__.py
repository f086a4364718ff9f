"""Probabilistic predicative core: states, distributions, programs,
exact evaluation, and refinement checking."""

from .ast import (Assign, Binary, BoolLit, BoolSpec, CallNamed, CustomGate,
                  DistSpec, FloatLit, HadamardGate, IfBool, IfProb, InfLit, IntLit,
                  InvMeanGate, Ok, OracleGate, Primed, QApply, QInit,
                  QMeasure, RandAssign, Seq, TimeTick, Unary, Var, eval_expr,
                  expr_names, flatten_seq, mentions_time, seq,
                  statement_exprs, validate_program, walk_statements)
from .dist import (Distribution, DistributionBuilder, MERGE_TOL, REPORT_EPS,
                   expectation, marginal)
from .evaluator import (DEFAULT_FUEL, ProgramContext, evaluate,
                        fuel_from_env, prob_if, run_sampled, seq_compose,
                        transformer)
from .refine import (MAX_COUNTEREXAMPLES, PRESTATE_BUDGET, REFINE_TOL,
                     SPEC_TIME_WINDOW, Counterexample, RefinementReport,
                     check_refinement, check_timed_refinement)
from .state import (INF, MAX_DOMAIN_SIZE, ProgramState, VarDecl,
                    format_ket, format_state, initial_state)

__all__ = [
    "Assign", "Binary", "BoolLit", "FloatLit", "BoolSpec", "CallNamed", "CustomGate",
    "DistSpec", "HadamardGate", "IfBool", "IfProb", "InfLit", "IntLit",
    "InvMeanGate", "Ok", "OracleGate", "Primed", "QApply", "QInit",
    "QMeasure", "RandAssign", "Seq", "TimeTick", "Unary", "Var",
    "eval_expr", "expr_names", "flatten_seq", "mentions_time", "seq",
    "statement_exprs", "validate_program", "walk_statements",
    "Distribution", "DistributionBuilder", "MERGE_TOL", "REPORT_EPS",
    "expectation", "marginal",
    "DEFAULT_FUEL", "ProgramContext", "evaluate", "fuel_from_env",
    "prob_if", "run_sampled", "seq_compose", "transformer",
    "MAX_COUNTEREXAMPLES", "PRESTATE_BUDGET", "REFINE_TOL",
    "SPEC_TIME_WINDOW", "Counterexample", "RefinementReport",
    "check_refinement", "check_timed_refinement",
    "INF", "MAX_DOMAIN_SIZE", "ProgramState", "VarDecl", "format_ket",
    "format_state", "initial_state",
]
