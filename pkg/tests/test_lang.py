"""Surface syntax: lexing, parsing, printing, and their round trip."""

import random

import pytest

from qpp.errors import CapacityError, ParseError, ValidationError
from qpp.lang import (
    SourceProgram,
    parse,
    parse_expr,
    parse_stmt,
    print_program,
    render_expr,
    render_stmt,
)
from qpp.semantics import (
    Assign,
    Binary,
    BoolLit,
    CallNamed,
    FloatLit,
    HadamardGate,
    IfBool,
    IfProb,
    InfLit,
    IntLit,
    Ok,
    Primed,
    QApply,
    QInit,
    QMeasure,
    RandAssign,
    Seq,
    TimeTick,
    Unary,
    Var,
    check_refinement,
)

from gen import gen_bool_expr, gen_source_program

COUNTDOWN = """\
-- decrement to zero
var x : -4 .. 9
def P = if x = 0 then ok else (x := x - 1 ; call P)
spec S = 0 <= x => x' = 0
refine S by P
"""


# ---------------------------------------------------------------------------
# Parsing statements and expressions


def test_assignment_parses_to_its_node():
    stmt = parse_stmt("x := x - 1")
    assert stmt == Assign("x", Binary("-", Var("x"), IntLit(1)))


def test_every_statement_form_parses():
    assert parse_stmt("ok") == Ok()
    assert parse_stmt("tick") == TimeTick()
    assert parse_stmt("call P") == CallNamed("P")
    assert parse_stmt("x := rand(4)") == RandAssign("x", 4)
    assert parse_stmt("psi := zero(2)") == QInit(2)
    assert parse_stmt("psi := apply(H, psi)") == QApply(HadamardGate())
    assert parse_stmt("measure psi r") == QMeasure("r")
    assert parse_stmt("if x = 0 then ok else tick") == IfBool(
        Binary("=", Var("x"), IntLit(0)), Ok(), TimeTick())
    assert parse_stmt("if prob(0.5) then ok else tick") == IfProb(
        FloatLit(0.5), Ok(), TimeTick())


def test_sequencing_is_right_nested():
    stmt = parse_stmt("ok ; tick ; ok")
    assert stmt == Seq(Ok(), Seq(TimeTick(), Ok()))


def test_branches_may_be_parenthesized_blocks():
    stmt = parse_stmt("if x = 0 then (ok ; tick) else ok ; tick")
    # the trailing tick binds to the whole conditional, not the else branch
    assert isinstance(stmt, Seq)
    assert isinstance(stmt.first, IfBool)
    assert stmt.first.then == Seq(Ok(), TimeTick())


def test_expression_precedence():
    assert parse_expr("a + b * c") == Binary(
        "+", Var("a"), Binary("*", Var("b"), Var("c")))
    assert parse_expr("(a + b) * c") == Binary(
        "*", Binary("+", Var("a"), Var("b")), Var("c"))
    assert parse_expr("a \\/ b /\\ c") == Binary(
        "\\/", Var("a"), Binary("/\\", Var("b"), Var("c")))
    assert parse_expr("a => b => c") == Binary(
        "=>", Var("a"), Binary("=>", Var("b"), Var("c")))
    assert parse_expr("x = 1 \\/ y = 2") == Binary(
        "\\/", Binary("=", Var("x"), IntLit(1)),
        Binary("=", Var("y"), IntLit(2)))
    assert parse_expr("not x = 1") == Unary("not", Binary("=", Var("x"),
                                                          IntLit(1)))


def test_comparisons_do_not_chain():
    with pytest.raises(ParseError):
        parse_expr("1 < 2 < 3")


def test_literals():
    assert parse_expr("42") == IntLit(42)
    assert parse_expr("-7") == IntLit(-7)
    assert parse_expr("0.25") == FloatLit(0.25)
    assert parse_expr("true") == BoolLit(True)
    assert parse_expr("false") == BoolLit(False)
    assert parse_expr("inf") == InfLit()
    assert parse_expr("1 / 2") == Binary("/", IntLit(1), IntLit(2))
    assert parse_expr("x - -3") == Binary("-", Var("x"), IntLit(-3))


def test_primed_names():
    assert parse_expr("x' = x + 1") == Binary(
        "=", Primed("x"), Binary("+", Var("x"), IntLit(1)))
    assert parse_expr("t' >= t") == Binary(">=", Primed("t"), Var("t"))


def test_comments_are_skipped():
    assert parse_stmt("ok -- trailing note") == Ok()
    assert parse_expr("1 +\n-- comment line\n2") == Binary("+", IntLit(1),
                                                           IntLit(2))


# ---------------------------------------------------------------------------
# Diagnostics


def test_incomplete_branch_reports_position_and_expectations():
    source = "var x : 0 .. 4\nmain = if prob(0.5) then ok else"
    with pytest.raises(ParseError) as caught:
        parse(source)
    err = caught.value
    assert err.line == 2
    assert err.column == 33
    assert err.expected  # names what could continue the statement
    assert "2:33" in str(err)


@pytest.mark.parametrize("source", [
    "var x :",
    "var x : 0 ..",
    "x := ",
    "if x = 1 then",
    "psi := apply(",
    "measure psi",
    "oracle f =",
    "refine S by",
    "x @ 1",
    "x := (1 + 2",
])
def test_malformed_inputs_carry_positions(source):
    with pytest.raises(ParseError) as caught:
        parse_stmt(source) if ":=" in source or source.startswith(
            ("if", "measure", "psi")) else parse(source)
    err = caught.value
    assert err.line >= 1 and err.column >= 1
    assert str(err)


def test_unknown_character_is_rejected():
    with pytest.raises(ParseError):
        parse_expr("x ? 1")


# ---------------------------------------------------------------------------
# Program files


def test_countdown_program_parses_and_its_refinement_holds():
    program = parse(COUNTDOWN)
    assert [d.name for d in program.decls] == ["x"]
    assert program.decls[0].lo == -4 and program.decls[0].hi == 9
    assert set(program.defs) == {"P"}
    assert program.refinements == (("S", "P"),)
    context = program.context()
    report = check_refinement(context.specs["P"], program.defs["P"],
                              program.decls, context)
    assert report.holds


def test_program_level_validation():
    with pytest.raises(ValidationError):
        parse("var x : 0 .. 4\nvar x : 0 .. 2")  # duplicate variable
    with pytest.raises(ValidationError):
        parse("def P = ok\ndef P = tick")  # duplicate definition
    with pytest.raises(ValidationError):
        parse("main = ok\nmain = tick")  # duplicate main
    with pytest.raises(ValidationError):
        parse("oracle f = 01")  # oracle without qubits
    with pytest.raises(ValidationError):
        parse("qubits 2\noracle f = 01")  # table sized for one qubit
    with pytest.raises(ValidationError):
        parse("qubits 1\noracle f = 02")  # not a bit string
    with pytest.raises(CapacityError):
        parse("qubits 13")
    with pytest.raises(ValidationError):
        parse("main = call P")  # undefined name
    with pytest.raises(ValidationError):
        parse("var x : 0 .. 2\nmain = y := 1")  # undeclared variable
    with pytest.raises(ValidationError):
        parse("var x : 0 .. 2\nmain = x := x'")  # primed outside a spec
    with pytest.raises(ValidationError):
        parse("main = t := 1")  # time is not assignable
    with pytest.raises(ValidationError):
        parse("spec S = y' = 0")  # spec names must be declared
    with pytest.raises(ValidationError):
        parse("def P = ok\nrefine S by P")  # unknown specification
    with pytest.raises(ValidationError):
        parse("var x : 0 .. 2\nspec S = x' = 0\nrefine S by P")
    with pytest.raises(ValidationError):
        parse("var x : 0 .. 2\nspec S = x' = 0\nspec T = x' = 1\n"
              "def P = ok\nrefine S by P\nrefine T by P")


def test_half_open_range_with_init():
    program = parse("var x : -4 .. 9 init 3")
    decl = program.decls[0]
    assert decl.init == 3
    assert list(decl.values())[-1] == 8
    start = program.initial()
    assert start["x"] == 3 and start.time == 0


def test_boolean_declaration_forms():
    program = parse("var b : bool\nvar c : bool init true")
    assert program.decls[0].kind == "bool"
    assert program.decls[1].init is True


# ---------------------------------------------------------------------------
# Printing


def test_printer_uses_minimal_parentheses():
    for text in ("a + b * c", "(a + b) * c", "a => b => c", "(a => b) => c",
                 "not x = 1", "not (x \\/ y)", "x - -3", "-(x + 1)",
                 "0 <= x => x' = 0", "1 / 2", "a - (b - c)", "x mod 2 = 0"):
        assert render_expr(parse_expr(text)) == text


def test_unary_minus_never_prints_as_a_comment():
    expr = Unary("-", Unary("-", Var("x")))
    assert render_expr(expr) == "-(-x)"
    assert parse_expr(render_expr(expr)) == expr


def test_statement_rendering():
    text = "if x = 0 then ok else (x := x - 1 ; tick ; call P)"
    assert render_stmt(parse_stmt(text)) == text
    assert render_stmt(parse_stmt("if prob(0.5) then ok else tick")) == \
        "if prob(0.5) then ok else tick"


def test_print_program_is_the_parse_inverse_on_the_countdown():
    program = parse(COUNTDOWN)
    printed = print_program(program)
    assert printed == (
        "var x : -4 .. 9\n"
        "def P = if x = 0 then ok else (x := x - 1 ; call P)\n"
        "spec S = 0 <= x => x' = 0\n"
        "refine S by P\n"
    )
    assert parse(printed) == program


def test_float_rendering_round_trips():
    assert render_expr(FloatLit(0.5)) == "0.5"
    assert render_expr(FloatLit(0.0625)) == "0.0625"
    tiny = FloatLit(1e-05)
    assert parse_expr(render_expr(tiny)) == tiny  # exact decimal expansion
    assert parse_stmt(render_stmt(IfProb(tiny, Ok(), Ok()))) == IfProb(
        tiny, Ok(), Ok())


# ---------------------------------------------------------------------------
# Generated round trips


def test_parse_print_round_trip_on_generated_programs():
    rng = random.Random(20240817)
    for _ in range(500):
        program = gen_source_program(rng)
        printed = print_program(program)
        assert parse(printed) == program, printed


def test_render_parse_round_trip_on_generated_expressions():
    rng = random.Random(31415926)
    names = ("x", "y", "t")
    for _ in range(500):
        expr = gen_bool_expr(rng, names, ("b",), depth=4, primed=names,
                             allow_inf=True)
        assert parse_expr(render_expr(expr)) == expr, render_expr(expr)
