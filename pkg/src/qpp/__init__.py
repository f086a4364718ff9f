"""Programs and specifications as probability distributions over states:
exact quantum/probabilistic semantics, refinement checking, and the
classic worked algorithms, with a small surface language and CLI."""

from ._kernels import BACKEND
from .errors import (CapacityError, DomainError, ParseError, QppError,
                     ValidationError)
from .qstate import (MAX_QUBITS, NORM_TOL, QuantumState, basis_ket,
                     inner_product, state_approx_eq, tensor)
from .qops import (Operator, adjoint, apply, compose, dense_operator,
                   hadamard_all, identity, inversion_about_mean, is_unitary,
                   phase_oracle, tensor_op, to_dense)
from .qmeasure import (PROB_EPS, MeasurementCollection, MeasurementOutcome,
                       MeasurementOutcomeDist, Observable,
                       measure_computational, measure_general,
                       measure_in_basis, measure_observable)
from .semantics import (DEFAULT_FUEL, INF, REFINE_TOL, BoolSpec, DistSpec,
                        Distribution, ProgramContext, ProgramState,
                        RefinementReport, VarDecl, check_refinement,
                        check_timed_refinement, evaluate, expectation,
                        marginal, prob_if, seq_compose, transformer)
from .algorithms import (GroverAnalysis, OracleFunction, all_promise_oracles,
                         deutsch_jozsa_classical, deutsch_jozsa_quantum,
                         grover_analysis, grover_optimal_iterations,
                         grover_program, grover_run, grover_spec_dist,
                         mixed_state_demos, probabilistic_walk,
                         walk_hitting_law)
from .lang import (SourceProgram, parse, parse_expr, parse_stmt,
                   print_program, render_expr, render_stmt)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "CapacityError", "DomainError", "ParseError", "QppError",
    "ValidationError",
    "MAX_QUBITS", "NORM_TOL", "QuantumState", "basis_ket", "inner_product",
    "state_approx_eq", "tensor",
    "Operator", "adjoint", "apply", "compose", "dense_operator",
    "hadamard_all", "identity", "inversion_about_mean", "is_unitary",
    "phase_oracle", "tensor_op", "to_dense",
    "PROB_EPS", "MeasurementCollection", "MeasurementOutcome",
    "MeasurementOutcomeDist", "Observable", "measure_computational",
    "measure_general", "measure_in_basis", "measure_observable",
    "DEFAULT_FUEL", "INF", "REFINE_TOL", "BoolSpec", "DistSpec",
    "Distribution", "ProgramContext", "ProgramState", "RefinementReport",
    "VarDecl", "check_refinement", "check_timed_refinement", "evaluate",
    "expectation", "marginal", "prob_if", "seq_compose", "transformer",
    "GroverAnalysis", "OracleFunction", "all_promise_oracles",
    "deutsch_jozsa_classical", "deutsch_jozsa_quantum", "grover_analysis",
    "grover_optimal_iterations", "grover_program", "grover_run",
    "grover_spec_dist", "mixed_state_demos", "probabilistic_walk",
    "walk_hitting_law",
    "SourceProgram", "parse", "parse_expr", "parse_stmt", "print_program",
    "render_expr", "render_stmt",
]
