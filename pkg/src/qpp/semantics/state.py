"""Program states: classical variables, optional quantum register, and time.

Time is a natural number or infinity (math.inf); an infinite final time is how
nontermination shows up as data. Marginal distributions may drop the time or
quantum components, in which case those fields are None.

Variable domains are finite windows declared for exhaustive checking. They
bound the refinement checker's prestate enumeration and the initial states
built from declarations; evaluation itself lets assignments step outside the
window (a countdown started below zero must keep running so its infinite-time
behavior is observable).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

from ..errors import CapacityError, DomainError, ValidationError
from ..qstate import QuantumState

INF = math.inf

MAX_DOMAIN_SIZE = 1 << 16
RESERVED_NAMES = frozenset({"t", "psi"})


@dataclass(frozen=True)
class VarDecl:
    """A declared classical variable with a finite domain.

    Integer domains are half-open: lo,..hi covers lo to hi-1.
    """

    name: str
    kind: str  # "int" or "bool"
    lo: int = 0
    hi: int = 0
    init: object = None

    def __post_init__(self):
        if not self.name.isidentifier():
            raise ValidationError(f"variable name {self.name!r} is not an identifier")
        if self.name in RESERVED_NAMES:
            raise ValidationError(f"variable name {self.name!r} is reserved")
        if self.kind == "int":
            if not (isinstance(self.lo, int) and isinstance(self.hi, int)):
                raise ValidationError("integer domain bounds must be integers")
            if self.hi <= self.lo:
                raise ValidationError(
                    f"empty domain for {self.name!r}: {self.lo},..{self.hi}")
            if self.hi - self.lo > MAX_DOMAIN_SIZE:
                raise CapacityError(
                    f"domain of {self.name!r} has {self.hi - self.lo} values "
                    f"(max {MAX_DOMAIN_SIZE})")
        elif self.kind != "bool":
            raise ValidationError(f"unknown variable kind {self.kind!r}")
        if self.init is not None and not self.contains(self.init):
            raise ValidationError(
                f"initial value {self.init!r} outside the domain of {self.name!r}")

    @classmethod
    def int_range(cls, name, lo, hi, init=None):
        return cls(name, "int", lo, hi, init)

    @classmethod
    def boolean(cls, name, init=None):
        return cls(name, "bool", init=init)

    def values(self):
        if self.kind == "bool":
            return (False, True)
        return range(self.lo, self.hi)

    @property
    def size(self) -> int:
        return 2 if self.kind == "bool" else self.hi - self.lo

    def contains(self, value) -> bool:
        if self.kind == "bool":
            return isinstance(value, bool)
        return isinstance(value, int) and not isinstance(value, bool) \
            and self.lo <= value < self.hi


def _check_time(time):
    if time is None:
        return None
    if isinstance(time, numbers.Integral) and not isinstance(time, bool) and time >= 0:
        return int(time)
    if isinstance(time, float) and math.isinf(time) and time > 0:
        return INF
    raise DomainError(f"time must be a natural number or infinity, got {time!r}")


class ProgramState:
    """One support point: classical valuation, optional register state, time."""

    __slots__ = ("classical", "quantum", "time", "_key")

    def __init__(self, classical=None, quantum=None, time=0):
        self.classical = dict(classical or {})
        if quantum is not None and not isinstance(quantum, QuantumState):
            raise DomainError("quantum component must be a QuantumState or None")
        self.quantum = quantum
        self.time = _check_time(time)
        self._key = None

    def key(self):
        """Hashable identity; quantum amplitudes keyed on a 1e-10 grid."""
        if self._key is None:
            qkey = None if self.quantum is None else self.quantum.grid_key()
            self._key = (tuple(sorted(self.classical.items())), self.time, qkey)
        return self._key

    def with_classical(self, name, value) -> "ProgramState":
        nxt = dict(self.classical)
        nxt[name] = value
        return ProgramState(nxt, self.quantum, self.time)

    def with_quantum(self, quantum) -> "ProgramState":
        return ProgramState(self.classical, quantum, self.time)

    def with_time(self, time) -> "ProgramState":
        return ProgramState(self.classical, self.quantum, time)

    def ticked(self) -> "ProgramState":
        return self.with_time(self.time + 1)  # inf + 1 stays inf

    def __getitem__(self, name):
        if name == "t":
            return self.time
        try:
            return self.classical[name]
        except KeyError:
            raise ValidationError(f"variable {name!r} has no value in this state") from None

    def __repr__(self):
        return f"ProgramState({format_state(self)})"


def format_state(state: ProgramState) -> str:
    """Compact single-line rendering used in reports and counterexamples."""
    parts = [f"{name}={_fmt_value(value)}"
             for name, value in sorted(state.classical.items())]
    if state.time is not None:
        parts.append("t=inf" if state.time is INF else f"t={state.time}")
    if state.quantum is not None:
        parts.append(f"psi={format_ket(state.quantum)}")
    return ", ".join(parts) if parts else "(empty)"


def _fmt_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def format_ket(psi: QuantumState, digits: int = 10) -> str:
    """Render nonzero amplitudes as a sum of basis kets."""
    width = psi.n_qubits
    terms = []
    for x, a in enumerate(psi.amplitudes):
        if abs(a) == 0.0:
            continue
        if a.imag == 0.0:
            coeff = f"{a.real:.{digits}g}"
        else:
            coeff = f"({a.real:.{digits}g}{a.imag:+.{digits}g}i)"
        terms.append(f"{coeff}|{x:0{width}b}>")
    return " + ".join(terms) if terms else "0"


def initial_state(decls, time=0, quantum=None) -> ProgramState:
    """Build the starting state from declarations; every init must be present."""
    classical = {}
    for d in decls:
        if d.init is None:
            raise ValidationError(
                f"variable {d.name!r} has no initial value; add one to evaluate")
        classical[d.name] = d.init
    return ProgramState(classical, quantum, time)
