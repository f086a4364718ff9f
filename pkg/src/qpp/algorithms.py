"""Executable worked examples with machine-checked closed forms.

Everything here runs through the exact semantics or the state-vector
kernels; closed-form success probabilities are provided alongside so tests
can compare simulation against formula at tight tolerances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import grover_iteration, hadamard_layer
from .errors import DomainError, ValidationError
from .qmeasure import PROB_EPS
from .qstate import MAX_QUBITS, QuantumState, basis_ket
from .semantics import (Assign, Binary, BoolSpec, CallNamed, DistSpec,
                        Distribution, DistributionBuilder, HadamardGate,
                        IfBool, IntLit, InvMeanGate, Ok, OracleGate,
                        Primed, ProgramContext, ProgramState, QApply, QInit,
                        QMeasure, RandAssign, Seq, TimeTick, Var, VarDecl,
                        evaluate, fuel_from_env, seq)

# --------------------------------------------------------------------------
# Oracles


@dataclass(frozen=True)
class OracleFunction:
    """A function 0,..2^n -> 0,1 as an explicit truth table with a class tag.

    The tag must be consistent with the table: constant means all outputs
    equal, balanced means half ones, point means exactly one 1. Tags enable
    promise checking and solution lookup without rescanning.
    """

    n: int
    table: tuple
    kind: str

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise DomainError(f"oracle arity {self.n} outside 1..{MAX_QUBITS}")
        table = tuple(int(b) for b in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != 1 << self.n:
            raise DomainError(f"oracle table needs {1 << self.n} entries, "
                              f"got {len(table)}")
        if any(b not in (0, 1) for b in table):
            raise DomainError("oracle table entries must be bits")
        ones = sum(table)
        consistent = {
            "constant": ones in (0, len(table)),
            "balanced": 2 * ones == len(table),
            "point": ones == 1,
            "other": True,
        }
        if self.kind not in consistent:
            raise DomainError(f"unknown oracle class {self.kind!r}")
        if not consistent[self.kind]:
            raise ValidationError(
                f"oracle table is not {self.kind}: {ones} ones out of "
                f"{len(table)}")

    @classmethod
    def from_table(cls, table) -> "OracleFunction":
        """Build with the class tag inferred from the table."""
        table = tuple(int(b) for b in table)
        n = max(1, (len(table) - 1).bit_length())
        ones = sum(table)
        if ones in (0, len(table)):
            kind = "constant"
        elif 2 * ones == len(table):
            kind = "balanced"
        elif ones == 1:
            kind = "point"
        else:
            kind = "other"
        return cls(n, table, kind)

    @classmethod
    def constant(cls, n: int, value: int) -> "OracleFunction":
        return cls(n, (int(value),) * (1 << n), "constant")

    @classmethod
    def point(cls, n: int, solution: int) -> "OracleFunction":
        if not 0 <= solution < (1 << n):
            raise DomainError(f"solution {solution} outside 0..{(1 << n) - 1}")
        table = [0] * (1 << n)
        table[solution] = 1
        return cls(n, tuple(table), "point")

    @property
    def solution(self) -> int:
        if self.kind != "point":
            raise ValidationError("only a point oracle has a solution index")
        return self.table.index(1)


def all_promise_oracles(n: int):
    """Every constant and balanced oracle on n bits, in a fixed order."""
    yield OracleFunction.constant(n, 0)
    yield OracleFunction.constant(n, 1)
    size = 1 << n
    for ones in itertools.combinations(range(size), size // 2):
        table = [0] * size
        for index in ones:
            table[index] = 1
        yield OracleFunction(n, tuple(table), "balanced")


# --------------------------------------------------------------------------
# Constant-vs-balanced decision


def _dj_program(n: int):
    return seq(
        QInit(n),
        QApply(HadamardGate()),
        TimeTick(),
        QApply(OracleGate("f")),
        QApply(HadamardGate()),
        QMeasure("r"),
        Assign("b", Binary("=", Var("r"), IntLit(0))),
    )


def _require_promise(f: OracleFunction):
    if f.kind not in ("constant", "balanced"):
        raise ValidationError(
            f"the promise requires a constant or balanced oracle, "
            f"got {f.kind!r}")


def deutsch_jozsa_quantum(f: OracleFunction):
    """One-query quantum decision: returns (final distribution, query count).

    The final flag b is true exactly when f is constant, with probability 1;
    time advances by one unit per oracle application, so the query count is
    read off the final time.
    """
    _require_promise(f)
    context = ProgramContext(oracles={"f": f.table}, n_qubits=f.n)
    start = ProgramState({"r": 0, "b": False}, None, 0)
    dist = evaluate(_dj_program(f.n), start, context)
    times = {state.time for state, _ in dist.items()}
    if times != {1}:
        raise ValidationError(f"query accounting drifted: times {times}")
    return dist, 1


def deutsch_jozsa_classical(f: OracleFunction):
    """Exhaustive classical decision: returns (verdict, query count).

    Queries the table at 0,..2^(n-1)+1 unconditionally — the worst case is
    the only case, so the count is exact, not an upper bound.
    """
    _require_promise(f)
    queries = (1 << (f.n - 1)) + 1
    answers = [f.table[i] for i in range(queries)]
    verdict = all(a == answers[0] for a in answers)
    return verdict, queries


def classical_single_query_insufficient_n1() -> bool:
    """No deterministic single-query strategy decides the n=1 promise.

    Enumerates every (query point, decision table) pair against all four
    promise oracles on one bit and checks each strategy errs somewhere.
    """
    oracles = [OracleFunction.constant(1, 0), OracleFunction.constant(1, 1),
               OracleFunction(1, (0, 1), "balanced"),
               OracleFunction(1, (1, 0), "balanced")]
    for query in (0, 1):
        for decision in itertools.product((True, False), repeat=2):
            errs = any(decision[f.table[query]] != (f.kind == "constant")
                       for f in oracles)
            if not errs:
                return False
    return True


# --------------------------------------------------------------------------
# Amplitude amplification


@dataclass(frozen=True)
class GroverAnalysis:
    """Closed-form success law for single-solution amplitude amplification."""

    n_qubits: int
    N: int
    theta: float
    k_opt: int
    p_opt: float
    approx_k: int
    p_approx: float

    def p_success(self, k: int) -> float:
        return math.sin((2 * k + 1) * self.theta) ** 2


def grover_analysis(N: int) -> GroverAnalysis:
    if N < 2 or N & (N - 1):
        raise DomainError(f"search space size must be a power of two >= 2, "
                          f"got {N}")
    n = N.bit_length() - 1
    theta = math.asin(math.sqrt(1.0 / N))
    real_opt = math.pi / (4.0 * theta) - 0.5
    candidates = sorted({max(0, math.floor(real_opt)),
                         max(0, math.ceil(real_opt))})
    best = candidates[0]
    best_p = math.sin((2 * best + 1) * theta) ** 2
    for k in candidates[1:]:
        p = math.sin((2 * k + 1) * theta) ** 2
        if p > best_p:
            best, best_p = k, p
    approx_k = math.ceil(math.pi * math.sqrt(N) / 4.0)
    p_approx = math.sin((2 * approx_k + 1) * theta) ** 2
    return GroverAnalysis(n, N, theta, best, best_p, approx_k, p_approx)


def grover_optimal_iterations(N: int) -> GroverAnalysis:
    """Iteration count maximizing success, with the square-root rule of thumb.

    Both integer neighbors of the real-valued optimum are enumerated and the
    maximizer returned (ties favor fewer iterations); the rule-of-thumb count
    ceil(pi*sqrt(N)/4) and its success probability ride along.
    """
    return grover_analysis(N)


def grover_run(f: OracleFunction, k: int) -> Distribution:
    """k amplification rounds then measurement, via the fast kernels.

    The result is the exact outcome distribution: classical r is the
    measured index, the register collapses to that basis state, and time
    advances by one unit per oracle application.
    """
    if f.kind != "point":
        raise ValidationError("amplitude amplification needs a point oracle")
    if isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise DomainError(f"iteration count must be a natural number, got {k!r}")
    solution = f.solution
    vec = hadamard_layer(basis_ket(0, f.n).amplitudes)
    for _ in range(k):
        vec = grover_iteration(vec, solution)
    weights = np.abs(vec) ** 2
    builder = DistributionBuilder()
    for outcome, weight in enumerate(weights):
        if weight > PROB_EPS:
            builder.add(ProgramState({"r": outcome},
                                     basis_ket(outcome, f.n), k),
                        float(weight))
    return builder.build()


def grover_program(n: int, solution: int, k: int):
    """The search program as syntax: returns (program, decls, context).

    Cross-checks the kernel path: evaluating this program must produce the
    same outcome distribution as grover_run.
    """
    f = OracleFunction.point(n, solution)
    body = IfBool(
        Binary("=", Var("i"), IntLit(k)),
        QMeasure("r"),
        seq(
            QApply(OracleGate("f")),
            QApply(InvMeanGate()),
            Assign("i", Binary("+", Var("i"), IntLit(1))),
            TimeTick(),
            CallNamed("R"),
        ),
    )
    program = seq(
        Assign("i", IntLit(0)),
        QInit(n),
        QApply(HadamardGate()),
        CallNamed("R"),
    )
    decls = [VarDecl.int_range("i", 0, k + 1, init=0),
             VarDecl.int_range("r", 0, 1 << n, init=0)]
    context = ProgramContext(defs={"R": body}, oracles={"f": f.table},
                             n_qubits=n)
    return program, decls, context


def grover_spec_dist(n: int, solution: int, k: int) -> DistSpec:
    """The claimed outcome law as a distribution specification over (r, t)."""
    analysis = grover_analysis(1 << n)
    p_hit = analysis.p_success(k)
    p_miss = (1.0 - p_hit) / (analysis.N - 1) if analysis.N > 1 else 0.0

    def claim(pre: ProgramState, post: ProgramState) -> float:
        if post.time != pre.time + k:
            return 0.0
        return p_hit if post.classical["r"] == solution else p_miss

    return DistSpec(claim, ("r", "t"),
                    label=f"amplified search outcome law (n={n}, k={k})")


# --------------------------------------------------------------------------
# The decrement walk


def walk_program():
    """The random decrement loop: returns (program, decls, context).

    W = if x = 0 then ok else (r := rand(2); x := x - r; tick; call W)
    """
    body = IfBool(
        Binary("=", Var("x"), IntLit(0)),
        Ok(),
        seq(
            RandAssign("r", 2),
            Assign("x", Binary("-", Var("x"), Var("r"))),
            TimeTick(),
            CallNamed("W"),
        ),
    )
    decls = [VarDecl.int_range("x", -4, 9, init=3),
             VarDecl.int_range("r", 0, 2, init=0)]
    context = ProgramContext(defs={"W": body})
    return CallNamed("W"), decls, context


def walk_time_bound_spec() -> BoolSpec:
    """Time lower bound for the walk: t' >= t + x."""
    return BoolSpec(Binary(">=", Primed("t"),
                           Binary("+", Var("t"), Var("x"))))


def probabilistic_walk(x0: int, fuel=None) -> Distribution:
    """Exact distribution over (x, t) after the decrement walk from x0.

    Each round subtracts 0 or 1 with equal probability and charges one time
    unit, stopping at zero. The hitting-time law is negative binomial:
    P(t'-t = j and x'=0) = C(j-1, x0-1) / 2^j for j >= x0 > 0.
    """
    if isinstance(x0, bool) or not isinstance(x0, int) or x0 < 0:
        raise DomainError(f"starting value must be a natural number, got {x0!r}")
    if fuel is None:
        fuel = max(fuel_from_env(), 4 * x0 + 64)
    if fuel < 4 * x0 + 64:
        raise DomainError(
            f"fuel {fuel} is too small: need at least {4 * x0 + 64} to cover "
            "all but a negligible tail of the walk's mass")
    program, _, context = walk_program()
    start = ProgramState({"x": x0, "r": 0}, None, 0)
    return evaluate(program, start, context, fuel).marginal(["x", "t"])


def walk_hitting_law(x0: int, j: int) -> float:
    """Closed-form P(t'-t = j and x'=0) for the decrement walk."""
    if x0 == 0:
        return 1.0 if j == 0 else 0.0
    if j < x0:
        return 0.0
    return math.comb(j - 1, x0 - 1) / 2.0 ** j


# --------------------------------------------------------------------------
# Mixed-state identities


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    distance: float


@dataclass(frozen=True)
class MixedStateReport:
    checks: tuple

    @property
    def holds(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def max_distance(self) -> float:
        return max(check.distance for check in self.checks)


def _expected_mixture(entries) -> Distribution:
    builder = DistributionBuilder()
    for psi, p in entries:
        builder.add(ProgramState({}, psi, None), p)
    return builder.build()


_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def mixed_state_demos(tol: float = 1e-12) -> MixedStateReport:
    """Machine-check the three mixture identities.

    (a) measuring an equal superposition leaves the register in each basis
        state with probability one half;
    (b) the two-branch demonstration program ends in the mixture of the
        re-superposed state and the one state, each with probability half;
    (c) measuring twice equals measuring once, as distributions.
    """
    checks = []

    program_a = seq(QInit(1), QApply(HadamardGate()), QMeasure("r"))
    dist_a = evaluate(program_a, ProgramState({"r": 0}, None, 0),
                      ProgramContext(n_qubits=1)).marginal(["psi"])
    expect_a = _expected_mixture([(basis_ket(0, 1), 0.5),
                                  (basis_ket(1, 1), 0.5)])
    dist_ab = dist_a.distance(expect_a)
    checks.append(CheckResult("measurement yields the basis mixture",
                              dist_ab <= tol, dist_ab))

    program_b = seq(
        QInit(1), QApply(HadamardGate()), QMeasure("r"),
        IfBool(Binary("=", Var("r"), IntLit(0)),
               QApply(HadamardGate()), Ok()),
    )
    dist_b = evaluate(program_b, ProgramState({"r": 0}, None, 0),
                      ProgramContext(n_qubits=1)).marginal(["psi"])
    plus = QuantumState(np.array([_INV_SQRT2, _INV_SQRT2], dtype=complex))
    expect_b = _expected_mixture([(plus, 0.5), (basis_ket(1, 1), 0.5)])
    dist_bb = dist_b.distance(expect_b)
    checks.append(CheckResult("two-branch program ends in the half/half "
                              "mixture", dist_bb <= tol, dist_bb))

    worst = 0.0
    for psi in (QuantumState(hadamard_layer(basis_ket(0, 1).amplitudes)),
                QuantumState(hadamard_layer(basis_ket(0, 2).amplitudes))):
        start = ProgramState({"r": 0}, psi, 0)
        once = evaluate(QMeasure("r"), start, ProgramContext())
        twice = evaluate(Seq(QMeasure("r"), QMeasure("r")), start,
                         ProgramContext())
        worst = max(worst, once.distance(twice))
    checks.append(CheckResult("measuring twice equals measuring once",
                              worst <= tol, worst))

    return MixedStateReport(tuple(checks))
