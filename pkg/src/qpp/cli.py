"""Command-line interface.

Subcommands::

    qpp dist FILE       evaluate the file's main body, print the final
                        distribution (table, or --format json as one JSON
                        object per line)
    qpp refine FILE     check every `refine S by P` clause in the file;
                        exit 0 iff all hold, counterexamples go to stderr
    qpp demo dj         Deutsch-Jozsa over every promise oracle
    qpp demo grover     search over every solution position
    qpp demo walk       random decrement walk vs. its closed-form law
                        (--sample switches to seeded Monte Carlo)
    qpp demo mixed      the three mixture identities

Exit codes: 0 success / refinement holds, 1 refinement fails or a demo
check misses its tolerance, 2 usage or parse or validation error,
3 capacity exceeded. QPP_FUEL overrides the default unfolding bound;
--fuel overrides both.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass

from .algorithms import (OracleFunction, all_promise_oracles,
                         deutsch_jozsa_classical, deutsch_jozsa_quantum,
                         grover_analysis, grover_run, mixed_state_demos,
                         probabilistic_walk, walk_hitting_law, walk_program)
from .errors import (CapacityError, DomainError, ParseError, QppError,
                     ValidationError)
from .lang import parse
from .semantics import (REFINE_TOL, ProgramState, check_refinement, evaluate,
                        format_ket, run_sampled)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

_DEMO_ORACLE_LIMIT = 4  # all balanced oracles: C(2^n, 2^(n-1)) blows up past this
_DEMO_GROVER_LIMIT = 10


@dataclass
class CliConfig:
    """Checked bundle of command-line options."""

    command: str
    algorithm: str | None = None
    path: str | None = None
    fuel: int | None = None
    tolerance: float | None = None
    output: str = "table"
    seed: int = 0
    n: int | None = None
    k: int | None = None
    x: int | None = None
    samples: int | None = None

    def __post_init__(self):
        if self.fuel is not None and self.fuel <= 0:
            raise ValidationError("fuel must be positive")
        if self.tolerance is not None and self.tolerance <= 0.0:
            raise ValidationError("tolerance must be positive")
        if self.samples is not None and self.samples <= 0:
            raise ValidationError("sample count must be positive")
        if self.output not in ("table", "json"):
            raise ValidationError(f"unknown output format {self.output!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpp",
        description="Evaluate, check, and demonstrate quantum and "
                    "probabilistic programs with exact distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol_default=None):
        p.add_argument("--format", dest="output", choices=("table", "json"),
                       default="table", help="output style (default: table)")
        p.add_argument("--tol", dest="tolerance", type=float,
                       default=tol_default, metavar="EPS",
                       help="comparison tolerance")

    p_dist = sub.add_parser("dist", help="print a program's final distribution")
    p_dist.add_argument("file")
    p_dist.add_argument("--fuel", type=int, help="recursion unfolding bound")
    p_dist.add_argument("--format", dest="output", choices=("table", "json"),
                        default="table")

    p_refine = sub.add_parser("refine",
                              help="check the file's refinement clauses")
    p_refine.add_argument("file")
    p_refine.add_argument("--fuel", type=int)
    common(p_refine, tol_default=REFINE_TOL)

    p_demo = sub.add_parser("demo", help="built-in worked examples")
    demo = p_demo.add_subparsers(dest="algorithm", required=True)

    p_dj = demo.add_parser("dj", help="Deutsch-Jozsa, all promise oracles")
    p_dj.add_argument("--n", type=int, default=2, help="input bits")
    common(p_dj, tol_default=1e-9)

    p_grover = demo.add_parser("grover", help="search, every solution position")
    p_grover.add_argument("--n", type=int, default=2, help="register qubits")
    p_grover.add_argument("--k", type=int, default=None,
                          help="iterations (default: the optimum)")
    common(p_grover, tol_default=1e-9)

    p_walk = demo.add_parser("walk", help="random decrement walk")
    p_walk.add_argument("--x", type=int, default=3, help="starting value")
    p_walk.add_argument("--fuel", type=int)
    p_walk.add_argument("--sample", dest="samples", type=int, default=None,
                        metavar="COUNT", help="Monte Carlo trajectories "
                        "instead of exact evaluation")
    p_walk.add_argument("--seed", type=int, default=0,
                        help="sampler seed (with --sample)")
    common(p_walk, tol_default=1e-9)

    p_mixed = demo.add_parser("mixed", help="mixture identities")
    common(p_mixed, tol_default=1e-12)
    return parser


def config_from_args(args: argparse.Namespace) -> CliConfig:
    return CliConfig(command=args.command,
                     algorithm=getattr(args, "algorithm", None),
                     path=getattr(args, "file", None),
                     fuel=getattr(args, "fuel", None),
                     tolerance=getattr(args, "tolerance", None),
                     output=getattr(args, "output", "table"),
                     seed=getattr(args, "seed", 0),
                     n=getattr(args, "n", None),
                     k=getattr(args, "k", None),
                     x=getattr(args, "x", None),
                     samples=getattr(args, "samples", None))


# --------------------------------------------------------------------------
# Formatting


def _fmt_prob(p: float) -> str:
    return "%.10g" % p


def _fmt_cell(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return _fmt_prob(value)
    return str(value)


def _fmt_time(time) -> str:
    if time is None:
        return "-"
    if isinstance(time, float) and math.isinf(time):
        return "inf"
    return str(time)


def _align(headers, rows) -> str:
    table = [list(headers)] + [list(r) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
             for row in table]
    return "\n".join(lines)


def _distribution_table(dist, var_order) -> str:
    entries = dist.sorted_entries()
    if not entries:
        return "(empty distribution)"
    seen = set()
    for state, _ in entries:
        seen.update(state.classical)
    names = [n for n in var_order if n in seen]
    names += sorted(seen - set(names))
    has_time = any(state.time is not None for state, _ in entries)
    has_psi = any(state.quantum is not None for state, _ in entries)
    headers = list(names)
    if has_time:
        headers.append("t")
    if has_psi:
        headers.append("psi")
    headers.append("p")
    rows = []
    for state, prob in entries:
        row = [_fmt_cell(state.classical[n]) if n in state.classical else "-"
               for n in names]
        if has_time:
            row.append(_fmt_time(state.time))
        if has_psi:
            row.append(format_ket(state.quantum)
                       if state.quantum is not None else "-")
        row.append(_fmt_prob(prob))
        rows.append(row)
    return _align(headers, rows)


def _report_json(report: dict) -> str:
    fields = ("algorithm", "n", "cases_checked", "max_abs_error",
              "oracle_calls", "pass")
    return json.dumps({key: report[key] for key in fields})


def _report_table(report: dict, extras=()) -> str:
    pairs = [("algorithm", report["algorithm"]), ("n", report["n"])]
    pairs += list(extras)
    pairs += [("cases_checked", report["cases_checked"]),
              ("max_abs_error", report["max_abs_error"]),
              ("oracle_calls", report["oracle_calls"]),
              ("pass", report["pass"])]
    width = max(len(key) for key, _ in pairs)
    return "\n".join(f"{key.ljust(width)}  {_fmt_cell(value)}"
                     for key, value in pairs)


def _emit_report(report: dict, extras, config: CliConfig) -> int:
    if config.output == "json":
        print(_report_json(report))
    else:
        print(_report_table(report, extras))
    return EXIT_OK if report["pass"] else EXIT_REFUTED


# --------------------------------------------------------------------------
# Commands


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse(text)
    except ParseError as exc:
        exc.path = path
        raise


def cmd_dist(config: CliConfig) -> int:
    program = _load(config.path)
    if program.main is None:
        raise ValidationError(f"{config.path} has no main to evaluate")
    dist = evaluate(program.main, program.initial(), program.context(),
                    fuel=config.fuel)
    if config.output == "json":
        text = dist.to_json_lines()
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        print(_distribution_table(dist, [d.name for d in program.decls]))
    return EXIT_OK


def cmd_refine(config: CliConfig) -> int:
    program = _load(config.path)
    if not program.refinements:
        print("no refinement clauses in file")
        return EXIT_OK
    context = program.context()
    all_hold = True
    for spec_name, def_name in program.refinements:
        report = check_refinement(program.specs[spec_name],
                                  program.defs[def_name],
                                  program.decls, context,
                                  tol=config.tolerance or REFINE_TOL,
                                  fuel=config.fuel)
        all_hold = all_hold and report.holds
        verdict = "holds" if report.holds else "FAILS"
        if config.output == "json":
            print(json.dumps({
                "spec": spec_name, "def": def_name, "holds": report.holds,
                "mode": report.mode,
                "checked_prestates": report.checked_prestates,
                "checked_pairs": report.checked_pairs,
                "max_error": report.max_error,
                "counterexamples": len(report.counterexamples)}))
        else:
            print(f"refine {spec_name} by {def_name}: {verdict} "
                  f"({report.mode}; {report.checked_prestates} prestates, "
                  f"{report.checked_pairs} pairs)")
        for example in report.counterexamples:
            print(f"counterexample [{spec_name} by {def_name}] {example}",
                  file=sys.stderr)
    return EXIT_OK if all_hold else EXIT_REFUTED


def demo_dj(config: CliConfig) -> int:
    n = config.n
    if n < 1:
        raise ValidationError("n must be at least 1")
    if n > _DEMO_ORACLE_LIMIT:
        raise CapacityError(
            f"the promise-oracle sweep enumerates all balanced functions; "
            f"n={n} exceeds the supported bound {_DEMO_ORACLE_LIMIT}")
    tol = config.tolerance
    max_err = 0.0
    quantum_calls = 1
    oracles = tuple(all_promise_oracles(n))
    for oracle in oracles:
        dist, quantum_calls = deutsch_jozsa_quantum(oracle)
        expected = oracle.kind == "constant"
        hit = dist.prob(lambda s: s.classical["b"] == expected)
        max_err = max(max_err, abs(hit - 1.0))
        verdict, classical_calls = deutsch_jozsa_classical(oracle)
        if verdict != expected or classical_calls != 2 ** (n - 1) + 1:
            max_err = max(max_err, 1.0)
    report = {"algorithm": "deutsch-jozsa", "n": n,
              "cases_checked": len(oracles), "max_abs_error": max_err,
              "oracle_calls": quantum_calls, "pass": max_err <= tol}
    extras = [("classical_calls", 2 ** (n - 1) + 1)]
    return _emit_report(report, extras, config)


def demo_grover(config: CliConfig) -> int:
    n = config.n
    if n < 1:
        raise ValidationError("n must be at least 1")
    if n > _DEMO_GROVER_LIMIT:
        raise CapacityError(
            f"the sweep over all solution positions is bounded at "
            f"n={_DEMO_GROVER_LIMIT}; got {n}")
    size = 1 << n
    analysis = grover_analysis(size)
    k = analysis.k_opt if config.k is None else config.k
    if k < 0:
        raise ValidationError("k must be nonnegative")
    predicted = analysis.p_success(k)
    miss = (1.0 - predicted) / (size - 1) if size > 1 else 0.0
    tol = config.tolerance
    max_err = 0.0
    for solution in range(size):
        dist = grover_run(OracleFunction.point(n, solution), k)
        for outcome in range(size):
            prob = dist.prob(
                lambda s, outcome=outcome: s.classical["r"] == outcome)
            target = predicted if outcome == solution else miss
            max_err = max(max_err, abs(prob - target))
    report = {"algorithm": "grover", "n": n, "cases_checked": size,
              "max_abs_error": max_err, "oracle_calls": k,
              "pass": max_err <= tol}
    extras = [("k", k), ("predicted_hit", _fmt_prob(predicted)),
              ("optimal_k", analysis.k_opt)]
    return _emit_report(report, extras, config)


def demo_walk(config: CliConfig) -> int:
    if config.samples is not None:
        return _demo_walk_sampled(config)
    x0 = config.x
    dist = probabilistic_walk(x0, fuel=config.fuel)
    tol = config.tolerance
    max_err = 0.0
    cases = 0
    mean = 0.0
    horizon = 0
    for state, prob in dist.items():
        if state.time is None or (isinstance(state.time, float)
                                  and math.isinf(state.time)):
            max_err = max(max_err, prob)
            continue
        horizon = max(horizon, state.time)
        mean += prob * state.time
    for j in range(horizon + 1):
        law = walk_hitting_law(x0, j)
        observed = dist.prob(lambda s, j=j: s.time == j)
        max_err = max(max_err, abs(observed - law))
        cases += 1
    mean_err = abs(mean - 2.0 * x0)
    passed = max_err <= tol and mean_err <= 1e-6
    report = {"algorithm": "walk", "n": x0, "cases_checked": cases,
              "max_abs_error": max_err, "oracle_calls": 0, "pass": passed}
    extras = [("mean_steps", _fmt_prob(mean)),
              ("expected_mean", _fmt_prob(2.0 * x0))]
    return _emit_report(report, extras, config)


def _demo_walk_sampled(config: CliConfig) -> int:
    x0 = config.x
    if x0 < 0:
        raise DomainError(f"starting value must be a natural number, got {x0}")
    program, _, context = walk_program()
    start = ProgramState({"x": x0, "r": 0}, None, 0)
    rng = random.Random(config.seed)
    samples = config.samples
    total = 0.0
    finished = 0
    for _ in range(samples):
        end = run_sampled(program, start, context, rng=rng, fuel=config.fuel)
        if not (isinstance(end.time, float) and math.isinf(end.time)):
            total += end.time
            finished += 1
    mean = total / finished if finished else float("inf")
    mean_err = abs(mean - 2.0 * x0)
    # 5-sigma band around the negative-binomial mean; variance is 2*x0
    band = max(5.0 * math.sqrt(max(2.0 * x0, 1.0) / samples), 1e-9)
    passed = finished == samples and mean_err <= band
    report = {"algorithm": "walk-sampled", "n": x0, "cases_checked": samples,
              "max_abs_error": mean_err, "oracle_calls": 0, "pass": passed}
    extras = [("seed", config.seed), ("mean_steps", _fmt_prob(mean)),
              ("expected_mean", _fmt_prob(2.0 * x0)),
              ("tolerance_band", _fmt_prob(band))]
    return _emit_report(report, extras, config)


def demo_mixed(config: CliConfig) -> int:
    result = mixed_state_demos(tol=config.tolerance)
    report = {"algorithm": "mixed", "n": 2,
              "cases_checked": len(result.checks),
              "max_abs_error": result.max_distance, "oracle_calls": 0,
              "pass": result.holds}
    extras = [(f"check_{i}", f"{'pass' if check.passed else 'FAIL'} - {check.name}")
              for i, check in enumerate(result.checks, start=1)]
    return _emit_report(report, extras, config)


_DEMOS = {"dj": demo_dj, "grover": demo_grover, "walk": demo_walk,
          "mixed": demo_mixed}


def run_cli(config: CliConfig) -> int:
    """Dispatch one parsed invocation; returns the process exit code."""
    if config.command == "dist":
        return cmd_dist(config)
    if config.command == "refine":
        return cmd_refine(config)
    if config.command == "demo":
        return _DEMOS[config.algorithm](config)
    raise ValidationError(f"unknown command {config.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_cli(config_from_args(args))
    except ParseError as exc:
        path = getattr(exc, "path", "<input>")
        print(f"{path}:{exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QppError as exc:  # pragma: no cover - belt and braces
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
