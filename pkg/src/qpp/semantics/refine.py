"""Exhaustive refinement checking over declared finite windows.

A specification is refined by a program when every behavior of the program
satisfies the specification, universally over prestates. The checker sweeps
every prestate in the declared classical windows (times a pair of starting
times when the specification mentions time) and verifies poststates.

Boolean specifications are checked relationally: the program is executed
over sets of states, taking every branch of probabilistic choices and
measurements. A named call whose target has a bound specification is not
unfolded; instead the call steps directly to every poststate satisfying that
specification — the standard one-step recursion rule, which makes recursive
programs checkable without divergence, including branches that never
terminate. Poststates of such a spec step are enumerated over the declared
classical windows, times within SPEC_TIME_WINDOW ticks of the call (plus
infinity), with the quantum component carried unchanged; the report states
this window. Calls without a bound specification are inlined, which
requires them to be non-recursive.

Distribution specifications claim the exact probability of each poststate.
The checker evaluates the program exactly from every prestate, marginalizes
onto the claimed variables, and compares pointwise; it also checks that the
claim itself sums to one over the window.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, ValidationError
from ..qmeasure import PROB_EPS
from .ast import (BoolSpec, CallNamed, DistSpec, IfBool, IfProb, Ok, QApply,
                  QInit, QMeasure, RandAssign, Seq, TimeTick, eval_expr,
                  expr_names, flatten_seq, validate_program, walk_statements)
from .ast import Assign
from .evaluator import (ProgramContext, _apply_gate, _assigned_value,
                        _env_of, _probability, _require_register, evaluate)
from .state import INF, ProgramState, format_state
from ..qstate import basis_ket

REFINE_TOL = 1e-9
SPEC_TIME_WINDOW = 64
PRESTATE_BUDGET = 1 << 20
MAX_COUNTEREXAMPLES = 20
TIMED_START_TIMES = (0, 3)


@dataclass
class Counterexample:
    pre: ProgramState
    post: ProgramState | None
    detail: str

    def __str__(self):
        post = "" if self.post is None else f"  post {format_state(self.post)}"
        return f"pre {format_state(self.pre)}{post}: {self.detail}"


@dataclass
class RefinementReport:
    holds: bool
    mode: str
    checked_prestates: int
    checked_pairs: int
    window: str
    counterexamples: list = field(default_factory=list)
    max_error: float = 0.0
    notes: tuple = ()

    def summary(self) -> str:
        verdict = "holds" if self.holds else "FAILS"
        lines = [f"refinement {verdict} ({self.mode}): "
                 f"{self.checked_prestates} prestates, "
                 f"{self.checked_pairs} pairs checked"]
        if self.mode == "distribution":
            lines.append(f"max pointwise error {self.max_error:.3g}")
        lines.append(f"window: {self.window}")
        lines.extend(str(note) for note in self.notes)
        return "\n".join(lines)


# --------------------------------------------------------------------------
# Shared plumbing


def _domain_budget(decls):
    product = 1
    for decl in decls:
        product *= decl.size
    if product > PRESTATE_BUDGET:
        raise CapacityError(
            f"product of declared domain sizes is {product}, over the "
            f"exhaustive-check budget {PRESTATE_BUDGET}")
    return product


def _validate_spec_names(names, decls):
    declared = {decl.name for decl in decls} | {"t"}
    for name in names:
        if name not in declared:
            raise ValidationError(f"specification references undeclared "
                                  f"variable {name!r}")


def _validate_reachable(program, decls, context):
    declared = [decl.name for decl in decls]
    validate_program(program, declared, context.defs, context.oracles,
                     context.n_qubits)
    for body in context.defs.values():
        validate_program(body, declared, context.defs, context.oracles,
                         context.n_qubits)


def _require_specs_for_cycles(program, context):
    """Spec-less definitions get inlined, so they must form no cycle."""
    def calls(stmt):
        return [node.name for node in walk_statements(stmt)
                if isinstance(node, CallNamed)]

    def visit(name, trail):
        if name in context.specs:
            return
        if name in trail:
            raise ValidationError(
                f"recursive definition {name!r} has no bound specification; "
                "bind one to make the refinement check well-founded")
        body = context.defs.get(name)
        if body is None:
            raise ValidationError(f"call of undefined name {name!r}")
        for callee in calls(body):
            visit(callee, trail | {name})

    for callee in calls(program):
        visit(callee, frozenset())


def _check_ticks_precede_calls(stmt, where):
    """Every named call must directly follow a tick in its statement block."""
    block = flatten_seq(stmt)
    for index, node in enumerate(block):
        if isinstance(node, CallNamed):
            if index == 0 or not isinstance(block[index - 1], TimeTick):
                raise ValidationError(
                    f"timed refinement requires a tick immediately before "
                    f"call {node.name!r} (in {where})")
        if isinstance(node, (IfBool, IfProb)):
            _check_ticks_precede_calls(node.then, where)
            _check_ticks_precede_calls(node.els, where)


def _prestates(decls, start_times):
    names = [decl.name for decl in decls]
    pools = [list(decl.values()) for decl in decls]
    for values in itertools.product(*pools):
        classical = dict(zip(names, values))
        for start in start_times:
            yield ProgramState(classical, None, start)


def _spec_env(pre, post):
    env = dict(pre.classical)
    if pre.time is not None:
        env["t"] = pre.time
    for name, value in post.classical.items():
        env[name + "'"] = value
    if post.time is not None:
        env["t'"] = post.time
    return env


def _holds(pred, pre, post):
    value = eval_expr(pred, _spec_env(pre, post))
    if not isinstance(value, bool):
        raise ValidationError(f"specification must be boolean, got {value!r}")
    return value


def _window_text(timed):
    time_part = (f"; spec-step poststate times within {SPEC_TIME_WINDOW} "
                 "ticks of the call or infinity" if timed else "")
    return ("classical variables over their declared ranges" + time_part
            + "; quantum states restricted to the program's reachable support")


# --------------------------------------------------------------------------
# Boolean mode: relational evaluation with spec steps


def _satisfy_states(pred, pre, decls, timed):
    """Every windowed poststate satisfying the predicate from a prestate."""
    names = [decl.name for decl in decls]
    pools = [list(decl.values()) for decl in decls]
    if timed:
        base = pre.time if pre.time is not None else 0
        times = list(range(base, base + SPEC_TIME_WINDOW + 1)) + [INF]
    else:
        times = [pre.time]
    out = []
    for values in itertools.product(*pools):
        classical = dict(zip(names, values))
        for time in times:
            post = ProgramState(classical, pre.quantum, time)
            if _holds(pred, pre, post):
                out.append(post)
    return out


def _relational_postimage(program, sigma0, decls, context, timed):
    """All final states reachable from one prestate, using spec steps."""
    finals = {}
    seen = set()
    empty_spec_steps = 0
    stack = [((program,), sigma0)]
    while stack:
        cont, state = stack.pop()
        mark = (cont, state.key())
        if mark in seen:
            continue
        seen.add(mark)
        if not cont:
            finals[state.key()] = state
            continue
        head, rest = cont[0], cont[1:]
        if isinstance(head, Ok):
            stack.append((rest, state))
        elif isinstance(head, Assign):
            value = eval_expr(head.expr, _env_of(state))
            stack.append((rest, state.with_classical(
                head.var, _assigned_value(head.var, value))))
        elif isinstance(head, Seq):
            stack.append(((head.first, head.second) + rest, state))
        elif isinstance(head, IfBool):
            cond = eval_expr(head.cond, _env_of(state))
            if not isinstance(cond, bool):
                raise ValidationError(f"condition must be boolean, got {cond!r}")
            stack.append(((head.then if cond else head.els,) + rest, state))
        elif isinstance(head, IfProb):
            p = _probability(eval_expr(head.prob, _env_of(state)))
            if p > 0.0:
                stack.append(((head.then,) + rest, state))
            if p < 1.0:
                stack.append(((head.els,) + rest, state))
        elif isinstance(head, RandAssign):
            for value in range(head.bound):
                stack.append((rest, state.with_classical(head.var, value)))
        elif isinstance(head, QInit):
            stack.append((rest, state.with_quantum(basis_ket(0, head.n_qubits))))
        elif isinstance(head, QApply):
            psi = _require_register(state)
            stack.append((rest,
                          state.with_quantum(_apply_gate(head.gate, psi,
                                                         context))))
        elif isinstance(head, QMeasure):
            if head.kind != "computational":
                raise ValidationError(f"unsupported measurement kind "
                                      f"{head.kind!r}")
            psi = _require_register(state)
            weights = np.abs(psi.amplitudes) ** 2
            for outcome, weight in enumerate(weights):
                if weight > PROB_EPS:
                    stack.append((rest,
                                  state.with_classical(head.var, outcome)
                                       .with_quantum(basis_ket(outcome,
                                                               psi.n_qubits))))
        elif isinstance(head, TimeTick):
            if state.time is None:
                raise ValidationError("tick requires a timed state")
            stack.append((rest, state.ticked()))
        elif isinstance(head, CallNamed):
            spec = context.specs.get(head.name)
            if spec is None:
                body = context.defs[head.name]
                stack.append(((body,) + rest, state))
            else:
                successors = _satisfy_states(spec.pred, state, decls, timed)
                if not successors:
                    empty_spec_steps += 1
                for post in successors:
                    stack.append((rest, post))
        else:
            raise ValidationError(f"not a program statement: {head!r}")
    return list(finals.values()), empty_spec_steps


def _check_boolean(spec, program, decls, context, timed):
    _domain_budget(decls)
    _validate_spec_names({n for n, _ in expr_names(spec.pred)}, decls)
    _validate_reachable(program, decls, context)
    _require_specs_for_cycles(program, context)
    for name, bound in context.specs.items():
        if not isinstance(bound, BoolSpec):
            raise ValidationError(
                f"the specification bound to {name!r} must be boolean to "
                "support spec steps")
    if timed:
        _check_ticks_precede_calls(program, "the program body")
        for name, body in context.defs.items():
            _check_ticks_precede_calls(body, f"definition {name!r}")

    start_times = TIMED_START_TIMES if timed else (0,)
    counterexamples = []
    notes = []
    empty_steps_total = 0
    checked_prestates = 0
    checked_pairs = 0
    for sigma0 in _prestates(decls, start_times):
        checked_prestates += 1
        finals, empty_steps = _relational_postimage(program, sigma0, decls,
                                                    context, timed)
        empty_steps_total += empty_steps
        for sigma1 in finals:
            checked_pairs += 1
            if not _holds(spec.pred, sigma0, sigma1):
                if len(counterexamples) < MAX_COUNTEREXAMPLES:
                    counterexamples.append(Counterexample(
                        sigma0, sigma1, "specification violated"))
    if empty_steps_total:
        notes.append(f"note: {empty_steps_total} spec step(s) admitted no "
                     "poststate in the window (possibly unimplementable "
                     "call specification)")
    return RefinementReport(
        holds=not counterexamples,
        mode="boolean-timed" if timed else "boolean",
        checked_prestates=checked_prestates,
        checked_pairs=checked_pairs,
        window=_window_text(timed),
        counterexamples=counterexamples,
        notes=tuple(notes))


# --------------------------------------------------------------------------
# Distribution mode: exact evaluation, pointwise comparison


def _claim_candidates(spec, decls, start_time):
    kept = [decl for decl in decls if decl.name in spec.vars]
    names = [decl.name for decl in kept]
    pools = [list(decl.values()) for decl in kept]
    with_time = "t" in spec.vars
    if with_time:
        times = list(range(start_time, start_time + SPEC_TIME_WINDOW + 1)) \
            + [INF]
    else:
        times = [None]
    for values in itertools.product(*pools):
        classical = dict(zip(names, values))
        for time in times:
            yield ProgramState(classical, None, time)


def _check_distribution(spec, program, decls, context, tol, fuel):
    _domain_budget(decls)
    _validate_spec_names(set(spec.vars) - {"t"}, decls)
    _validate_reachable(program, decls, context)

    start_times = TIMED_START_TIMES if spec.mentions_time() else (0,)
    counterexamples = []
    max_error = 0.0
    checked_prestates = 0
    checked_pairs = 0
    for sigma0 in _prestates(decls, start_times):
        checked_prestates += 1
        result = evaluate(program, sigma0, context, fuel)
        if result.nonterminated_mass > tol:
            if len(counterexamples) < MAX_COUNTEREXAMPLES:
                counterexamples.append(Counterexample(
                    sigma0, None,
                    f"mass {result.nonterminated_mass:.3g} did not "
                    "terminate within fuel; the claim cannot be certified"))
            continue
        computed = result.marginal(spec.vars)
        seen_keys = set()
        claimed_total = 0.0
        for candidate in _claim_candidates(spec, decls, sigma0.time):
            claimed = float(spec.fn(sigma0, candidate))
            claimed_total += claimed
            actual = computed.probability_of(candidate)
            seen_keys.add(candidate.key())
            checked_pairs += 1
            error = abs(claimed - actual)
            max_error = max(max_error, error)
            if error > tol and len(counterexamples) < MAX_COUNTEREXAMPLES:
                counterexamples.append(Counterexample(
                    sigma0, candidate,
                    f"claimed {claimed:.12g}, computed {actual:.12g}"))
        for post, actual in computed.items():
            if post.key() in seen_keys:
                continue
            checked_pairs += 1
            claimed = float(spec.fn(sigma0, post))
            error = abs(claimed - actual)
            max_error = max(max_error, error)
            if error > tol and len(counterexamples) < MAX_COUNTEREXAMPLES:
                counterexamples.append(Counterexample(
                    sigma0, post,
                    f"claimed {claimed:.12g}, computed {actual:.12g} "
                    "(poststate outside the claim window)"))
        if abs(claimed_total - 1.0) > tol \
                and len(counterexamples) < MAX_COUNTEREXAMPLES:
            counterexamples.append(Counterexample(
                sigma0, None,
                f"claimed probabilities sum to {claimed_total:.12g}, not 1"))
    return RefinementReport(
        holds=not counterexamples,
        mode="distribution",
        checked_prestates=checked_prestates,
        checked_pairs=checked_pairs,
        window=_window_text(spec.mentions_time()),
        counterexamples=counterexamples,
        max_error=max_error)


# --------------------------------------------------------------------------
# Entry points


def check_refinement(spec, program, decls, context=None, tol=REFINE_TOL,
                     fuel=None) -> RefinementReport:
    """Does every behavior of the program satisfy the specification?

    Boolean specifications that mention time are routed through the timed
    checker (which also validates tick placement); distribution
    specifications are compared pointwise at the given tolerance.
    """
    context = context if context is not None else ProgramContext()
    if isinstance(spec, DistSpec):
        return _check_distribution(spec, program, decls, context, tol, fuel)
    if not isinstance(spec, BoolSpec):
        spec = BoolSpec(spec)
    if spec.mentions_time():
        return check_timed_refinement(spec, program, decls, context, tol)
    return _check_boolean(spec, program, decls, context, timed=False)


def check_timed_refinement(spec, program, decls, context=None,
                           tol=REFINE_TOL) -> RefinementReport:
    """Refinement for specifications over time, including infinity branches.

    Requires every named call in the program and its definitions to be
    immediately preceded by a tick, so that recursion is honestly charged.
    """
    context = context if context is not None else ProgramContext()
    if not isinstance(spec, BoolSpec):
        spec = BoolSpec(spec)
    return _check_boolean(spec, program, decls, context, timed=True)
