"""Surface syntax: lexer, parser, printer, and the source-program container.

A source file is a sequence of declarations::

    var x : -4 .. 9 init 3        -- integer range, upper bound excluded
    var b : bool init false
    qubits 2
    oracle f = 0110               -- truth table, one bit per input
    def P = if x = 0 then ok else (x := x - 1 ; tick ; call P)
    spec S = 0 <= x => x' = 0
    main = call P
    refine S by P

Comments run from ``--`` to end of line. Statements are composed with ``;``
(binding looser than if-then-else, so branch bodies holding sequences need
parentheses). The printer emits minimal parentheses and flattens sequence
nesting to the parser's own right-nested shape, so parse(print(p)) == p
for any parsed program.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from .errors import CapacityError, ParseError, ValidationError
from .qstate import MAX_QUBITS
from .semantics import (Assign, Binary, BoolLit, BoolSpec, CallNamed,
                        CustomGate, FloatLit, HadamardGate, IfBool, IfProb,
                        InfLit, IntLit, InvMeanGate, Ok, OracleGate, Primed,
                        ProgramContext, QApply, QInit, QMeasure, RandAssign,
                        Seq, TimeTick, Unary, Var, VarDecl, expr_names,
                        flatten_seq, initial_state, seq, validate_program)

_KEYWORDS = frozenset("""
    var bool init qubits oracle def spec main refine by ok tick call measure
    psi if prob then else rand zero apply H invmean not div mod true false inf
""".split())

_SYMBOLS = (":=", "..", "<=", ">=", "=>", "/\\", "\\/",
            "(", ")", ",", ";", ":", "=", "#", "<", ">", "+", "-", "*", "/")

_CMP_OPS = ("=", "#", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Token:
    kind: str  # "kw" | "ident" | "pident" | "nat" | "sym" | "eof"
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def _tokenize(text: str):
    tokens = []
    line, column = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch in " \t\r":
            column += 1
            i += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            kind = "nat"
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                kind = "float"
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token(kind, text[i:j], line, column))
            column += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if j < n and text[j] == "'":
                j += 1
                tokens.append(Token("pident", word + "'", line, column))
            elif word in _KEYWORDS:
                tokens.append(Token("kw", word, line, column))
            else:
                tokens.append(Token("ident", word, line, column))
            column += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("sym", sym, line, column))
                column += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, column,
                             expected=("a token",))
    tokens.append(Token("eof", "", line, column))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, kind: str, text=None) -> bool:
        token = self.peek()
        return token.kind == kind and (text is None or token.text == text)

    def take(self, kind: str, text=None):
        if self.at(kind, text):
            token = self.peek()
            self.pos += 1
            return token
        return None

    def fail(self, *expected):
        token = self.peek()
        raise ParseError(f"unexpected {token.describe()}", token.line,
                         token.column, expected=expected)

    def expect(self, kind: str, text=None, label=None) -> Token:
        token = self.take(kind, text)
        if token is None:
            self.fail(label or (text if text is not None else f"a {kind}"))
        return token

    def expect_eof(self) -> None:
        if not self.at("eof"):
            self.fail("end of input")

    # -- expressions

    def parse_expr(self):
        left = self._or()
        if self.take("sym", "=>"):
            return Binary("=>", left, self.parse_expr())
        return left

    def _or(self):
        expr = self._and()
        while self.take("sym", "\\/"):
            expr = Binary("\\/", expr, self._and())
        return expr

    def _and(self):
        expr = self._not()
        while self.take("sym", "/\\"):
            expr = Binary("/\\", expr, self._not())
        return expr

    def _not(self):
        if self.take("kw", "not"):
            return Unary("not", self._not())
        return self._comparison()

    def _comparison(self):
        left = self._additive()
        for op in _CMP_OPS:
            if self.at("sym", op):
                self.pos += 1
                return Binary(op, left, self._additive())
        return left

    def _additive(self):
        expr = self._multiplicative()
        while True:
            if self.take("sym", "+"):
                expr = Binary("+", expr, self._multiplicative())
            elif self.take("sym", "-"):
                expr = Binary("-", expr, self._multiplicative())
            else:
                return expr

    def _multiplicative(self):
        expr = self._unary()
        while True:
            if self.take("sym", "*"):
                expr = Binary("*", expr, self._unary())
            elif self.take("sym", "/"):
                expr = Binary("/", expr, self._unary())
            elif self.take("kw", "div"):
                expr = Binary("div", expr, self._unary())
            elif self.take("kw", "mod"):
                expr = Binary("mod", expr, self._unary())
            else:
                return expr

    def _unary(self):
        if self.take("sym", "-"):
            operand = self._unary()
            if isinstance(operand, IntLit):
                return IntLit(-operand.value)
            if isinstance(operand, FloatLit):
                return FloatLit(-operand.value)
            return Unary("-", operand)
        return self._atom_expr()

    def _atom_expr(self):
        token = self.take("nat")
        if token is not None:
            return IntLit(int(token.text))
        token = self.take("float")
        if token is not None:
            return FloatLit(float(token.text))
        if self.take("kw", "true"):
            return BoolLit(True)
        if self.take("kw", "false"):
            return BoolLit(False)
        if self.take("kw", "inf"):
            return InfLit()
        token = self.take("ident")
        if token is not None:
            return Var(token.text)
        token = self.take("pident")
        if token is not None:
            return Primed(token.text[:-1])
        if self.take("sym", "("):
            expr = self.parse_expr()
            self.expect("sym", ")")
            return expr
        self.fail("an expression")

    # -- statements

    def parse_stmt(self):
        parts = [self._atom_stmt()]
        while self.take("sym", ";"):
            parts.append(self._atom_stmt())
        return seq(*parts)

    def _atom_stmt(self):
        if self.take("sym", "("):
            stmt = self.parse_stmt()
            self.expect("sym", ")")
            return stmt
        if self.take("kw", "ok"):
            return Ok()
        if self.take("kw", "tick"):
            return TimeTick()
        if self.take("kw", "call"):
            return CallNamed(self.expect("ident").text)
        if self.take("kw", "measure"):
            self.expect("kw", "psi")
            return QMeasure(self.expect("ident").text)
        if self.take("kw", "if"):
            if self.take("kw", "prob"):
                self.expect("sym", "(")
                prob = self.parse_expr()
                self.expect("sym", ")")
                self.expect("kw", "then")
                then = self._atom_stmt()
                self.expect("kw", "else")
                return IfProb(prob, then, self._atom_stmt())
            cond = self.parse_expr()
            self.expect("kw", "then")
            then = self._atom_stmt()
            self.expect("kw", "else")
            return IfBool(cond, then, self._atom_stmt())
        if self.take("kw", "psi"):
            self.expect("sym", ":=")
            if self.take("kw", "zero"):
                self.expect("sym", "(")
                size = int(self.expect("nat").text)
                self.expect("sym", ")")
                return QInit(size)
            if self.take("kw", "apply"):
                self.expect("sym", "(")
                gate = self._gate()
                self.expect("sym", ",")
                self.expect("kw", "psi")
                self.expect("sym", ")")
                return QApply(gate)
            self.fail("zero", "apply")
        token = self.take("ident")
        if token is not None:
            self.expect("sym", ":=")
            if self.take("kw", "rand"):
                self.expect("sym", "(")
                bound = int(self.expect("nat").text)
                self.expect("sym", ")")
                return RandAssign(token.text, bound)
            return Assign(token.text, self.parse_expr())
        self.fail("a statement")

    def _gate(self):
        if self.take("kw", "H"):
            return HadamardGate()
        if self.take("kw", "invmean"):
            return InvMeanGate()
        if self.take("kw", "oracle"):
            return OracleGate(self.expect("ident").text)
        self.fail("H", "oracle", "invmean")

    # -- declarations

    def _signed_int(self) -> int:
        negative = self.take("sym", "-") is not None
        value = int(self.expect("nat", label="an integer").text)
        return -value if negative else value

    def _init_value(self):
        if self.take("kw", "true"):
            return True
        if self.take("kw", "false"):
            return False
        return self._signed_int()

    def _var_decl(self) -> VarDecl:
        name = self.expect("ident", label="a variable name").text
        self.expect("sym", ":")
        if self.take("kw", "bool"):
            init = self._init_value() if self.take("kw", "init") else None
            return VarDecl.boolean(name, init)
        lo = self._signed_int()
        self.expect("sym", "..")
        hi = self._signed_int()
        init = self._init_value() if self.take("kw", "init") else None
        return VarDecl.int_range(name, lo, hi, init)

    def parse_program(self) -> "SourceProgram":
        decls = []
        n_qubits = None
        oracles = {}
        defs = {}
        specs = {}
        main = None
        refinements = []

        def check_fresh(name, namespace, what):
            if name in namespace:
                raise ValidationError(f"duplicate {what} {name!r}")

        while not self.at("eof"):
            if self.take("kw", "var"):
                decl = self._var_decl()
                check_fresh(decl.name, {d.name for d in decls}, "variable")
                decls.append(decl)
            elif self.take("kw", "qubits"):
                if n_qubits is not None:
                    raise ValidationError("duplicate qubits declaration")
                n_qubits = int(self.expect("nat").text)
                if not 1 <= n_qubits <= MAX_QUBITS:
                    raise CapacityError(
                        f"register size {n_qubits} outside 1..{MAX_QUBITS}")
            elif self.take("kw", "oracle"):
                name = self.expect("ident", label="an oracle name").text
                check_fresh(name, oracles, "oracle")
                self.expect("sym", "=")
                bits = self.expect("nat", label="a bit string").text
                if set(bits) - {"0", "1"}:
                    raise ValidationError(
                        f"oracle {name!r} must be given as a string of bits")
                oracles[name] = bits
            elif self.take("kw", "def"):
                name = self.expect("ident", label="a definition name").text
                check_fresh(name, defs, "definition")
                self.expect("sym", "=")
                defs[name] = self.parse_stmt()
            elif self.take("kw", "spec"):
                name = self.expect("ident", label="a specification name").text
                check_fresh(name, specs, "specification")
                self.expect("sym", "=")
                specs[name] = BoolSpec(self.parse_expr())
            elif self.take("kw", "main"):
                if main is not None:
                    raise ValidationError("duplicate main")
                self.expect("sym", "=")
                main = self.parse_stmt()
            elif self.take("kw", "refine"):
                spec_name = self.expect("ident",
                                        label="a specification name").text
                self.expect("kw", "by")
                refinements.append((spec_name,
                                    self.expect("ident",
                                                label="a definition name").text))
            else:
                self.fail("var", "qubits", "oracle", "def", "spec", "main",
                          "refine")
        program = SourceProgram(tuple(decls), n_qubits, oracles, defs, specs,
                                main, tuple(refinements))
        program.check()
        return program


@dataclass
class SourceProgram:
    """A parsed source file: declarations, definitions, main, refinements."""

    decls: tuple = ()
    n_qubits: object = None
    oracles: dict = field(default_factory=dict)  # name -> bit string
    defs: dict = field(default_factory=dict)
    specs: dict = field(default_factory=dict)  # name -> BoolSpec
    main: object = None
    refinements: tuple = ()  # (spec name, def name) pairs

    def check(self) -> None:
        """Name resolution and shape checks beyond the grammar."""
        var_names = [decl.name for decl in self.decls]
        if self.oracles and self.n_qubits is None:
            raise ValidationError(
                "oracle declared without a qubits declaration")
        for name, bits in self.oracles.items():
            if len(bits) != 1 << (self.n_qubits or 0):
                raise ValidationError(
                    f"oracle {name!r} has {len(bits)} entries; the declared "
                    f"register needs {1 << self.n_qubits}")
        bodies = dict(self.defs)
        if self.main is not None:
            bodies["main"] = self.main
        for where, body in bodies.items():
            try:
                validate_program(body, var_names, self.defs, self.oracles,
                                 self.n_qubits)
            except ValidationError as exc:
                raise ValidationError(f"in {where}: {exc}") from None
        declared = set(var_names) | {"t"}
        for name, spec in self.specs.items():
            for ref, _ in expr_names(spec.pred):
                if ref not in declared:
                    raise ValidationError(
                        f"specification {name!r} references undeclared "
                        f"variable {ref!r}")
        bound_defs = set()
        for spec_name, def_name in self.refinements:
            if spec_name not in self.specs:
                raise ValidationError(
                    f"refine names unknown specification {spec_name!r}")
            if def_name not in self.defs:
                raise ValidationError(
                    f"refine names unknown definition {def_name!r}")
            if def_name in bound_defs:
                raise ValidationError(
                    f"definition {def_name!r} bound by more than one refine")
            bound_defs.add(def_name)

    def context(self) -> ProgramContext:
        specs = {def_name: self.specs[spec_name]
                 for spec_name, def_name in self.refinements}
        oracles = {name: tuple(int(b) for b in bits)
                   for name, bits in self.oracles.items()}
        return ProgramContext(defs=self.defs, specs=specs, oracles=oracles,
                              n_qubits=self.n_qubits)

    def initial(self):
        """Starting state from the declared initial values, at time zero."""
        return initial_state(self.decls)


def parse(text: str) -> SourceProgram:
    """Parse a source file; raises ParseError with line/column on bad input."""
    return _Parser(_tokenize(text)).parse_program()


def parse_stmt(text: str):
    parser = _Parser(_tokenize(text))
    stmt = parser.parse_stmt()
    parser.expect_eof()
    return stmt


def parse_expr(text: str):
    parser = _Parser(_tokenize(text))
    expr = parser.parse_expr()
    parser.expect_eof()
    return expr


# --------------------------------------------------------------------------
# Printing

_PREC = {"=>": 1, "\\/": 2, "/\\": 3,
         "=": 5, "#": 5, "<": 5, "<=": 5, ">": 5, ">=": 5,
         "+": 6, "-": 6, "*": 7, "div": 7, "mod": 7, "/": 7}
_ATOM_PREC = 9
_UNARY_MINUS_PREC = 8
_NOT_PREC = 4


def _render_float(value: float) -> str:
    text = repr(value)
    if "e" in text or "E" in text:
        # exact decimal expansion; a double always has a finite one
        text = format(Decimal(value), "f")
    if "." not in text:
        text += ".0"
    return text


def _expr_parts(expr):
    if isinstance(expr, IntLit):
        prec = _ATOM_PREC if expr.value >= 0 else _UNARY_MINUS_PREC
        return str(expr.value), prec
    if isinstance(expr, FloatLit):
        prec = _ATOM_PREC if expr.value >= 0.0 else _UNARY_MINUS_PREC
        return _render_float(expr.value), prec
    if isinstance(expr, BoolLit):
        return ("true" if expr.value else "false"), _ATOM_PREC
    if isinstance(expr, InfLit):
        return "inf", _ATOM_PREC
    if isinstance(expr, Var):
        return expr.name, _ATOM_PREC
    if isinstance(expr, Primed):
        return expr.name + "'", _ATOM_PREC
    if isinstance(expr, Unary):
        text, prec = _expr_parts(expr.operand)
        if expr.op == "-":
            if prec < _UNARY_MINUS_PREC or text.startswith("-"):
                text = "(" + text + ")"
            return "-" + text, _UNARY_MINUS_PREC
        if prec < _NOT_PREC:
            text = "(" + text + ")"
        return "not " + text, _NOT_PREC
    if isinstance(expr, Binary):
        prec = _PREC[expr.op]
        left, left_prec = _expr_parts(expr.left)
        right, right_prec = _expr_parts(expr.right)
        if expr.op == "=>":
            need_left, need_right = left_prec <= prec, right_prec < prec
        elif prec == 5:  # comparisons do not chain
            need_left, need_right = left_prec <= prec, right_prec <= prec
        else:
            need_left, need_right = left_prec < prec, right_prec <= prec
        if need_left:
            left = "(" + left + ")"
        if need_right:
            right = "(" + right + ")"
        return f"{left} {expr.op} {right}", prec
    raise ValidationError(f"not an expression node: {expr!r}")


def render_expr(expr) -> str:
    return _expr_parts(expr)[0]


def _render_branch(stmt) -> str:
    if isinstance(stmt, Seq):
        return "(" + render_stmt(stmt) + ")"
    return _render_atom(stmt)


def _render_atom(stmt) -> str:
    if isinstance(stmt, Ok):
        return "ok"
    if isinstance(stmt, TimeTick):
        return "tick"
    if isinstance(stmt, CallNamed):
        return f"call {stmt.name}"
    if isinstance(stmt, QMeasure):
        return f"measure psi {stmt.var}"
    if isinstance(stmt, QInit):
        return f"psi := zero({stmt.n_qubits})"
    if isinstance(stmt, QApply):
        gate = stmt.gate
        if isinstance(gate, HadamardGate):
            return "psi := apply(H, psi)"
        if isinstance(gate, InvMeanGate):
            return "psi := apply(invmean, psi)"
        if isinstance(gate, OracleGate):
            return f"psi := apply(oracle {gate.name}, psi)"
        if isinstance(gate, CustomGate):
            raise ValidationError("a directly supplied operator has no "
                                  "source form")
        raise ValidationError(f"unknown gate reference {gate!r}")
    if isinstance(stmt, Assign):
        return f"{stmt.var} := {render_expr(stmt.expr)}"
    if isinstance(stmt, RandAssign):
        return f"{stmt.var} := rand({stmt.bound})"
    if isinstance(stmt, IfBool):
        return (f"if {render_expr(stmt.cond)} then {_render_branch(stmt.then)}"
                f" else {_render_branch(stmt.els)}")
    if isinstance(stmt, IfProb):
        return (f"if prob({render_expr(stmt.prob)}) then "
                f"{_render_branch(stmt.then)} else {_render_branch(stmt.els)}")
    raise ValidationError(f"not a statement node: {stmt!r}")


def render_stmt(stmt) -> str:
    return " ; ".join(_render_atom(part) for part in flatten_seq(stmt))


def _render_init(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def _render_decl(decl: VarDecl) -> str:
    if decl.kind == "bool":
        text = f"var {decl.name} : bool"
    else:
        text = f"var {decl.name} : {decl.lo} .. {decl.hi}"
    if decl.init is not None:
        text += f" init {_render_init(decl.init)}"
    return text


def print_program(program: SourceProgram) -> str:
    """Render a source program; parsing the result reproduces the program."""
    lines = [_render_decl(decl) for decl in program.decls]
    if program.n_qubits is not None:
        lines.append(f"qubits {program.n_qubits}")
    lines.extend(f"oracle {name} = {bits}"
                 for name, bits in program.oracles.items())
    lines.extend(f"def {name} = {render_stmt(body)}"
                 for name, body in program.defs.items())
    lines.extend(f"spec {name} = {render_expr(spec.pred)}"
                 for name, spec in program.specs.items())
    if program.main is not None:
        lines.append(f"main = {render_stmt(program.main)}")
    lines.extend(f"refine {spec_name} by {def_name}"
                 for spec_name, def_name in program.refinements)
    return "\n".join(lines) + "\n"
