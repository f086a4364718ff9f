"""Abstract syntax for programs and specifications.

Nodes are frozen dataclasses, so structural equality and hashing come for
free; the evaluator uses continuation tuples as worklist keys and the parser
round-trip tests compare whole trees.

Expressions range over integers, booleans, and the extended time value
infinity. A primed variable refers to the poststate in a two-state
specification; expressions inside program statements may use only unprimed
names. The reserved name ``t`` denotes the time variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError, ValidationError

# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class FloatLit:
    """Decimal literal such as ``0.5``; probabilities are the main use."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError("decimal literals must be finite")


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class InfLit:
    """The extended time value, written ``inf`` in source."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Primed:
    """Poststate reference ``x'``; meaningful only inside specifications."""

    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-" | "not"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # arithmetic + - * div mod /, comparisons = # < <= > >=, logic /\ \/ =>
    left: "Expr"
    right: "Expr"


Expr = IntLit | FloatLit | BoolLit | InfLit | Var | Primed | Unary | Binary

_ARITH_OPS = {"+", "-", "*", "div", "mod", "/"}
_CMP_OPS = {"=", "#", "<", "<=", ">", ">="}
_LOGIC_OPS = {"/\\", "\\/", "=>"}


def _number(value, op):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DomainError(f"operator {op!r} needs a numeric operand, got {value!r}")
    return value


def _boolean(value, op):
    if not isinstance(value, bool):
        raise DomainError(f"operator {op!r} needs a boolean operand, got {value!r}")
    return value


def eval_expr(expr: Expr, env) -> object:
    """Evaluate an expression in an environment mapping names to values.

    Primed names are stored in the environment with a trailing quote
    (``env["x'"]``); looking one up in an environment that lacks it reports
    a primed reference outside a specification.
    """
    if isinstance(expr, (IntLit, FloatLit)):
        return expr.value
    if isinstance(expr, BoolLit):
        return expr.value
    if isinstance(expr, InfLit):
        return math.inf
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise ValidationError(f"undeclared variable {expr.name!r}") from None
    if isinstance(expr, Primed):
        try:
            return env[expr.name + "'"]
        except KeyError:
            raise ValidationError(
                f"primed variable {expr.name}' is only meaningful in a "
                "specification") from None
    if isinstance(expr, Unary):
        if expr.op == "-":
            return -_number(eval_expr(expr.operand, env), "-")
        if expr.op == "not":
            return not _boolean(eval_expr(expr.operand, env), "not")
        raise DomainError(f"unknown unary operator {expr.op!r}")
    if isinstance(expr, Binary):
        return _eval_binary(expr, env)
    raise DomainError(f"not an expression node: {expr!r}")


def _eval_binary(expr: Binary, env):
    op = expr.op
    if op in _LOGIC_OPS:
        left = _boolean(eval_expr(expr.left, env), op)
        if op == "/\\":
            return left and _boolean(eval_expr(expr.right, env), op)
        if op == "\\/":
            return left or _boolean(eval_expr(expr.right, env), op)
        return (not left) or _boolean(eval_expr(expr.right, env), op)
    left = eval_expr(expr.left, env)
    right = eval_expr(expr.right, env)
    if op in _CMP_OPS:
        if op == "=":
            return left == right
        if op == "#":
            return left != right
        left = _number(left, op)
        right = _number(right, op)
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    if op in _ARITH_OPS:
        left = _number(left, op)
        right = _number(right, op)
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if right == 0 and op in ("div", "mod", "/"):
            raise DomainError("division by zero")
        if op == "div":
            return left // right
        if op == "mod":
            return left % right
        return left / right
    raise DomainError(f"unknown binary operator {op!r}")


def expr_names(expr: Expr):
    """Yield (name, primed) pairs for every variable reference."""
    if isinstance(expr, Var):
        yield (expr.name, False)
    elif isinstance(expr, Primed):
        yield (expr.name, True)
    elif isinstance(expr, Unary):
        yield from expr_names(expr.operand)
    elif isinstance(expr, Binary):
        yield from expr_names(expr.left)
        yield from expr_names(expr.right)


def mentions_time(expr: Expr) -> bool:
    """True when the expression reads t, t', or the infinity literal."""
    if isinstance(expr, InfLit):
        return True
    if isinstance(expr, (Var, Primed)):
        return expr.name == "t"
    if isinstance(expr, Unary):
        return mentions_time(expr.operand)
    if isinstance(expr, Binary):
        return mentions_time(expr.left) or mentions_time(expr.right)
    return False


# --------------------------------------------------------------------------
# Gate references inside quantum statements


@dataclass(frozen=True)
class HadamardGate:
    """Hadamard on every qubit of the register."""


@dataclass(frozen=True)
class OracleGate:
    """Phase oracle named in the program's oracle declarations."""

    name: str


@dataclass(frozen=True)
class InvMeanGate:
    """Inversion about the mean of the amplitudes."""


@dataclass(frozen=True, eq=False)
class CustomGate:
    """A directly supplied Operator; constructed from code, never parsed."""

    operator: object


Gate = HadamardGate | OracleGate | InvMeanGate | CustomGate


# --------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class Ok:
    """The empty program: poststate equals prestate."""


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class RandAssign:
    """Uniform choice of var from 0,..bound (bound excluded)."""

    var: str
    bound: int

    def __post_init__(self):
        if not isinstance(self.bound, int) or isinstance(self.bound, bool) \
                or self.bound < 1:
            raise DomainError(f"rand bound must be a positive integer, "
                              f"got {self.bound!r}")


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class IfBool:
    cond: Expr
    then: "Stmt"
    els: "Stmt"


@dataclass(frozen=True)
class IfProb:
    """Probabilistic choice; prob may depend on the current state."""

    prob: Expr
    then: "Stmt"
    els: "Stmt"


@dataclass(frozen=True)
class QInit:
    """Set the register to the all-zero basis state on n_qubits qubits."""

    n_qubits: int


@dataclass(frozen=True)
class QApply:
    gate: Gate


@dataclass(frozen=True)
class QMeasure:
    """Computational-basis measurement storing the outcome in var."""

    var: str
    kind: str = "computational"


@dataclass(frozen=True)
class TimeTick:
    """Advance time by one unit."""


@dataclass(frozen=True)
class CallNamed:
    name: str


Stmt = (Ok | Assign | RandAssign | Seq | IfBool | IfProb | QInit | QApply
        | QMeasure | TimeTick | CallNamed)


# --------------------------------------------------------------------------
# Specifications


@dataclass(frozen=True)
class BoolSpec:
    """Two-state predicate over unprimed (pre) and primed (post) names."""

    pred: Expr

    def mentions_time(self) -> bool:
        return mentions_time(self.pred)


@dataclass(frozen=True, eq=False)
class DistSpec:
    """Claimed poststate distribution, as a callable of (pre, post) states.

    ``vars`` lists the names the claim constrains (``"t"`` for time); the
    checker marginalizes computed results onto exactly these names. The
    callable must return the claimed probability of the poststate.
    """

    fn: object
    vars: tuple
    label: str = ""

    def mentions_time(self) -> bool:
        return "t" in self.vars


Spec = BoolSpec | DistSpec


# --------------------------------------------------------------------------
# Helpers


def seq(*stmts: Stmt) -> Stmt:
    """Right-nested sequential composition of one or more statements."""
    if not stmts:
        return Ok()
    out = stmts[-1]
    for stmt in reversed(stmts[:-1]):
        out = Seq(stmt, out)
    return out


def flatten_seq(stmt: Stmt):
    """The statement as a flat list, dissolving Seq nesting."""
    if isinstance(stmt, Seq):
        return flatten_seq(stmt.first) + flatten_seq(stmt.second)
    return [stmt]


def walk_statements(stmt: Stmt):
    """Yield every statement node in the tree, including branch bodies."""
    yield stmt
    if isinstance(stmt, Seq):
        yield from walk_statements(stmt.first)
        yield from walk_statements(stmt.second)
    elif isinstance(stmt, (IfBool, IfProb)):
        yield from walk_statements(stmt.then)
        yield from walk_statements(stmt.els)


def statement_exprs(stmt: Stmt):
    """Yield every expression appearing directly in one statement node."""
    if isinstance(stmt, Assign):
        yield stmt.expr
    elif isinstance(stmt, IfBool):
        yield stmt.cond
    elif isinstance(stmt, IfProb):
        yield stmt.prob


def validate_program(stmt: Stmt, declared, defs=(), oracles=None,
                     n_qubits=None) -> None:
    """Check name discipline for one statement tree.

    Every variable reference must be declared (``t`` is built in), primed
    names may not appear in program expressions, called names must be
    defined, oracle references must resolve, and register initialization
    must match the declared register size.
    """
    declared = set(declared) | {"t"}
    defs = set(defs)
    oracles = {} if oracles is None else oracles
    for node in walk_statements(stmt):
        for expr in statement_exprs(node):
            for name, primed in expr_names(expr):
                if primed:
                    raise ValidationError(
                        f"primed variable {name}' cannot appear in a program")
                if name not in declared:
                    raise ValidationError(f"undeclared variable {name!r}")
        if isinstance(node, (Assign, RandAssign, QMeasure)):
            if node.var == "t":
                raise ValidationError("the time variable cannot be assigned; "
                                      "use tick")
            if node.var not in declared:
                raise ValidationError(f"undeclared variable {node.var!r}")
        if isinstance(node, CallNamed) and node.name not in defs:
            raise ValidationError(f"call of undefined name {node.name!r}")
        if isinstance(node, QApply) and isinstance(node.gate, OracleGate):
            if node.gate.name not in oracles:
                raise ValidationError(f"undeclared oracle {node.gate.name!r}")
        if isinstance(node, QInit) and n_qubits is not None \
                and node.n_qubits != n_qubits:
            raise ValidationError(
                f"register initialized with {node.n_qubits} qubits but "
                f"{n_qubits} declared")
