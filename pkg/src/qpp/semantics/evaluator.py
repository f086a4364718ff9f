"""Exact evaluation of programs as distribution transformers.

A program maps an input distribution over states to the exact distribution
over poststates. Probabilistic constructs branch with exact weights — no
sampling is involved. Recursion is evaluated in rounds: one round unfolds
every pending named call once, and pending configurations that reach a call
in the same residual continuation and state are merged first, which keeps
branching recursions (random walks) at polynomial width. After ``fuel``
rounds, mass still in flight is reported at time infinity and flagged on the
result rather than raised.

A seeded single-trajectory sampler is provided for demonstration; exact
evaluation never uses randomness.
"""

from __future__ import annotations

import os

import numpy as np

from .. import _kernels as kernels
from ..errors import DomainError, ValidationError
from ..qmeasure import PROB_EPS
from ..qstate import QuantumState, basis_ket
from .ast import (Assign, CallNamed, CustomGate, HadamardGate, IfBool, IfProb,
                  InvMeanGate, Ok, OracleGate, QApply, QInit, QMeasure,
                  RandAssign, Seq, TimeTick, eval_expr)
from .dist import Distribution, DistributionBuilder
from .state import INF, ProgramState

DEFAULT_FUEL = 10_000


def fuel_from_env(default: int = DEFAULT_FUEL) -> int:
    """Fuel to use: the QPP_FUEL environment variable, or the default."""
    raw = os.environ.get("QPP_FUEL")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise ValidationError(f"QPP_FUEL must be a positive integer, got {raw!r}")
    return value


class ProgramContext:
    """Named definitions, bound specifications, and oracle tables."""

    __slots__ = ("defs", "specs", "oracles", "n_qubits", "_tables")

    def __init__(self, defs=None, specs=None, oracles=None, n_qubits=None):
        self.defs = dict(defs or {})
        self.specs = dict(specs or {})
        self.oracles = {}
        for name, bits in dict(oracles or {}).items():
            table = tuple(int(b) for b in bits)
            if any(b not in (0, 1) for b in table):
                raise ValidationError(f"oracle {name!r} has entries outside 0/1")
            self.oracles[name] = table
        self.n_qubits = n_qubits
        self._tables = {}

    def oracle_table(self, name: str) -> np.ndarray:
        if name not in self.oracles:
            raise ValidationError(f"undeclared oracle {name!r}")
        if name not in self._tables:
            self._tables[name] = np.array(self.oracles[name], dtype=np.int8)
        return self._tables[name]


def _env_of(state: ProgramState) -> dict:
    env = dict(state.classical)
    if state.time is not None:
        env["t"] = state.time
    return env


def _assigned_value(var, value):
    if isinstance(value, bool) or (isinstance(value, int)):
        return value
    raise DomainError(
        f"assignment to {var!r} must produce an integer or boolean, "
        f"got {value!r}")


def _probability(value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DomainError(f"branch probability must be numeric, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"branch probability {value!r} outside [0, 1]")
    return float(value)


def _apply_gate(gate, psi: QuantumState, context: ProgramContext) -> QuantumState:
    if isinstance(gate, HadamardGate):
        return QuantumState(kernels.hadamard_layer(psi.amplitudes))
    if isinstance(gate, OracleGate):
        table = context.oracle_table(gate.name)
        if table.size != psi.dim:
            raise ValidationError(
                f"oracle {gate.name!r} has {table.size} entries but the "
                f"register holds {psi.dim} amplitudes")
        return QuantumState(kernels.phase_flip(psi.amplitudes, table))
    if isinstance(gate, InvMeanGate):
        return QuantumState(kernels.invert_about_mean(psi.amplitudes))
    if isinstance(gate, CustomGate):
        return gate.operator.apply(psi)
    raise DomainError(f"unknown gate reference {gate!r}")


def _require_register(state: ProgramState) -> QuantumState:
    if state.quantum is None:
        raise ValidationError("quantum statement before register initialization")
    return state.quantum


def evaluate(program, initial, context=None, fuel=None) -> Distribution:
    """Exact poststate distribution of a program from an input distribution.

    ``initial`` may be a ProgramState or a Distribution. ``fuel`` bounds
    recursion unfoldings (default from QPP_FUEL or 10^4); mass that has not
    terminated within fuel appears in the result at time infinity, and the
    result's ``nonterminated_mass`` records its total.
    """
    context = context if context is not None else ProgramContext()
    if fuel is None:
        fuel = fuel_from_env()
    if isinstance(fuel, bool) or not isinstance(fuel, int) or fuel < 0:
        raise DomainError(f"fuel must be a nonnegative integer, got {fuel!r}")
    if isinstance(initial, ProgramState):
        initial = Distribution.point(initial)

    done = DistributionBuilder()
    pending = {}

    def run(cont, state, prob):
        stack = [(cont, state, prob)]
        while stack:
            cont, state, prob = stack.pop()
            if prob <= 0.0:
                continue
            if not cont:
                done.add(state, prob)
                continue
            head, rest = cont[0], cont[1:]
            if isinstance(head, Ok):
                stack.append((rest, state, prob))
            elif isinstance(head, Assign):
                value = eval_expr(head.expr, _env_of(state))
                stack.append((rest,
                              state.with_classical(head.var,
                                                   _assigned_value(head.var, value)),
                              prob))
            elif isinstance(head, Seq):
                stack.append(((head.first, head.second) + rest, state, prob))
            elif isinstance(head, IfBool):
                cond = eval_expr(head.cond, _env_of(state))
                if not isinstance(cond, bool):
                    raise DomainError(f"condition must be boolean, got {cond!r}")
                stack.append(((head.then if cond else head.els,) + rest,
                              state, prob))
            elif isinstance(head, IfProb):
                p = _probability(eval_expr(head.prob, _env_of(state)))
                if p > 0.0:
                    stack.append(((head.then,) + rest, state, prob * p))
                if p < 1.0:
                    stack.append(((head.els,) + rest, state, prob * (1.0 - p)))
            elif isinstance(head, RandAssign):
                share = prob / head.bound
                for value in range(head.bound):
                    stack.append((rest, state.with_classical(head.var, value),
                                  share))
            elif isinstance(head, QInit):
                stack.append((rest,
                              state.with_quantum(basis_ket(0, head.n_qubits)),
                              prob))
            elif isinstance(head, QApply):
                psi = _require_register(state)
                stack.append((rest,
                              state.with_quantum(_apply_gate(head.gate, psi,
                                                             context)),
                              prob))
            elif isinstance(head, QMeasure):
                if head.kind != "computational":
                    raise ValidationError(
                        f"unsupported measurement kind {head.kind!r}")
                psi = _require_register(state)
                weights = np.abs(psi.amplitudes) ** 2
                for outcome, weight in enumerate(weights):
                    if weight > PROB_EPS:
                        post = state.with_classical(head.var, outcome) \
                                    .with_quantum(basis_ket(outcome, psi.n_qubits))
                        stack.append((rest, post, prob * float(weight)))
            elif isinstance(head, TimeTick):
                if state.time is None:
                    raise ValidationError("tick requires a timed state")
                stack.append((rest, state.ticked(), prob))
            elif isinstance(head, CallNamed):
                if head.name not in context.defs:
                    raise ValidationError(f"call of undefined name {head.name!r}")
                key = (head.name, rest, state.key())
                slot = pending.get(key)
                if slot is None:
                    pending[key] = [state, prob]
                else:
                    slot[1] += prob
            else:
                raise DomainError(f"not a program statement: {head!r}")

    for state, prob in initial.items():
        run((program,), state, prob)
    rounds = 0
    while pending and rounds < fuel:
        rounds += 1
        batch, pending = pending, {}
        for (name, rest, _), (state, prob) in batch.items():
            run((context.defs[name],) + rest, state, prob)

    residual = 0.0
    for (_, _, _), (state, prob) in pending.items():
        done.add(state.with_time(INF), prob)
        residual += prob
    return done.build(nonterminated_mass=residual)


def transformer(program, context=None, fuel=None):
    """The program as a function from distributions to distributions."""
    def apply(dist: Distribution) -> Distribution:
        return evaluate(program, dist, context, fuel)
    return apply


def seq_compose(r, s):
    """Sequential composition of two distribution transformers."""
    def composed(dist: Distribution) -> Distribution:
        return s(r(dist))
    return composed


def prob_if(p: float, r, s):
    """Convex combination of two distribution transformers."""
    if isinstance(p, bool) or not isinstance(p, (int, float)) \
            or not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p!r} outside [0, 1]")
    def choice(dist: Distribution) -> Distribution:
        builder = DistributionBuilder()
        residual = 0.0
        if p > 0.0:
            left = r(dist)
            for state, q in left.items():
                builder.add(state, p * q)
            residual += p * left.nonterminated_mass
        if p < 1.0:
            right = s(dist)
            for state, q in right.items():
                builder.add(state, (1.0 - p) * q)
            residual += (1.0 - p) * right.nonterminated_mass
        return builder.build(nonterminated_mass=residual)
    return choice


def run_sampled(program, initial_state: ProgramState, context=None,
                rng=None, fuel=None) -> ProgramState:
    """One pseudo-random trajectory; a demonstration aid, never exact.

    Probabilistic branches are resolved with the supplied random generator.
    Exceeding fuel returns the in-flight state at time infinity.
    """
    import random

    context = context if context is not None else ProgramContext()
    rng = rng if rng is not None else random.Random()
    if fuel is None:
        fuel = fuel_from_env()
    state = initial_state
    cont = [program]
    unfoldings = 0
    while cont:
        head = cont.pop()
        if isinstance(head, Ok):
            pass
        elif isinstance(head, Assign):
            value = eval_expr(head.expr, _env_of(state))
            state = state.with_classical(head.var,
                                         _assigned_value(head.var, value))
        elif isinstance(head, Seq):
            cont.append(head.second)
            cont.append(head.first)
        elif isinstance(head, IfBool):
            cond = eval_expr(head.cond, _env_of(state))
            if not isinstance(cond, bool):
                raise DomainError(f"condition must be boolean, got {cond!r}")
            cont.append(head.then if cond else head.els)
        elif isinstance(head, IfProb):
            p = _probability(eval_expr(head.prob, _env_of(state)))
            cont.append(head.then if rng.random() < p else head.els)
        elif isinstance(head, RandAssign):
            state = state.with_classical(head.var, rng.randrange(head.bound))
        elif isinstance(head, QInit):
            state = state.with_quantum(basis_ket(0, head.n_qubits))
        elif isinstance(head, QApply):
            psi = _require_register(state)
            state = state.with_quantum(_apply_gate(head.gate, psi, context))
        elif isinstance(head, QMeasure):
            if head.kind != "computational":
                raise ValidationError(f"unsupported measurement kind {head.kind!r}")
            psi = _require_register(state)
            weights = (np.abs(psi.amplitudes) ** 2).tolist()
            outcome = rng.choices(range(psi.dim), weights=weights)[0]
            state = state.with_classical(head.var, outcome) \
                         .with_quantum(basis_ket(outcome, psi.n_qubits))
        elif isinstance(head, TimeTick):
            if state.time is None:
                raise ValidationError("tick requires a timed state")
            state = state.ticked()
        elif isinstance(head, CallNamed):
            if head.name not in context.defs:
                raise ValidationError(f"call of undefined name {head.name!r}")
            unfoldings += 1
            if unfoldings > fuel:
                return state.with_time(INF)
            cont.append(context.defs[head.name])
        else:
            raise DomainError(f"not a program statement: {head!r}")
    return state
