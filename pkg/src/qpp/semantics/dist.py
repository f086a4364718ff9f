"""Finite distributions over program states.

The support is a sparse map keyed by the state's hashable identity. Quantum
components are keyed on a 1e-10 amplitude grid, and states that agree
componentwise within 1e-10 inside the same classical/time bucket are merged
into a probability-weighted representative (never renormalized; the drift is
second-order in the tolerance). Entries at or below PROB_EPS are dropped.

Serialization is line-oriented JSON, one support entry per line, in a
deterministic order: lexicographic by classical values, then time (infinity
last), then the quantum grid key.
"""

from __future__ import annotations

import json
import math

import numpy as np

from ..errors import ValidationError
from ..qmeasure import PROB_EPS
from ..qstate import QuantumState
from .state import INF, ProgramState

MERGE_TOL = 1e-10
REPORT_EPS = 1e-9


class DistributionBuilder:
    """Accumulates (state, probability) pairs with approximate-state merging."""

    def __init__(self, merge_tol: float = MERGE_TOL):
        self.merge_tol = merge_tol
        self._buckets = {}  # (classical key, time) -> list of [qkey, state, prob]

    def add(self, state: ProgramState, prob: float) -> None:
        if prob <= 0.0:
            return
        classical_key, time_key, qkey = state.key()
        bucket = self._buckets.setdefault((classical_key, time_key), [])
        if state.quantum is None:
            if bucket:
                bucket[0][2] += prob
            else:
                bucket.append([None, state, prob])
            return
        for entry in bucket:
            if entry[0] == qkey:
                self._merge(entry, state, prob)
                return
        for entry in bucket:
            other = entry[1].quantum
            if np.max(np.abs(other.amplitudes - state.quantum.amplitudes)) <= self.merge_tol:
                self._merge(entry, state, prob)
                return
        bucket.append([qkey, state, prob])

    @staticmethod
    def _merge(entry, state, prob):
        old_state, old_prob = entry[1], entry[2]
        total = old_prob + prob
        if not np.array_equal(old_state.quantum.amplitudes, state.quantum.amplitudes):
            rep = (old_prob * old_state.quantum.amplitudes
                   + prob * state.quantum.amplitudes) / total
            entry[1] = old_state.with_quantum(QuantumState(rep))
        entry[2] = total

    def add_all(self, pairs) -> None:
        for state, prob in pairs:
            self.add(state, prob)

    def build(self, nonterminated_mass: float = 0.0) -> "Distribution":
        entries = {}
        for bucket in self._buckets.values():
            for _, state, prob in bucket:
                if prob > PROB_EPS:
                    entries[state.key()] = (state, prob)
        return Distribution(entries, nonterminated_mass)


class Distribution:
    """Immutable finite-support distribution over ProgramState."""

    __slots__ = ("_entries", "nonterminated_mass")

    def __init__(self, entries, nonterminated_mass: float = 0.0):
        self._entries = dict(entries)
        self.nonterminated_mass = nonterminated_mass

    @classmethod
    def point(cls, state: ProgramState) -> "Distribution":
        return cls({state.key(): (state, 1.0)})

    @classmethod
    def from_pairs(cls, pairs) -> "Distribution":
        builder = DistributionBuilder()
        builder.add_all(pairs)
        return builder.build()

    def items(self):
        """Iterate (state, probability) pairs in insertion order."""
        return iter(self._entries.values())

    def __len__(self):
        return len(self._entries)

    def total(self) -> float:
        return float(sum(p for _, p in self._entries.values()))

    def prob(self, predicate) -> float:
        """Total probability of states satisfying a predicate."""
        return float(sum(p for s, p in self._entries.values() if predicate(s)))

    def probability_of(self, state: ProgramState, state_tol: float = MERGE_TOL) -> float:
        entry = self._find(state, state_tol)
        return entry[1] if entry is not None else 0.0

    def _find(self, state: ProgramState, state_tol: float):
        key = state.key()
        hit = self._entries.get(key)
        if hit is not None:
            return hit
        if state.quantum is None:
            return None
        classical_key, time_key, _ = key
        for (ck, tk, _), (other, p) in self._entries.items():
            if ck != classical_key or tk != time_key or other.quantum is None:
                continue
            delta = np.max(np.abs(other.quantum.amplitudes - state.quantum.amplitudes))
            if delta <= state_tol:
                return (other, p)
        return None

    def marginal(self, keep) -> "Distribution":
        """Project onto a subset of names; 't' and 'psi' name time and register."""
        keep = set(keep)
        known = {"t", "psi"}
        for state, _ in self._entries.values():
            known.update(state.classical)
        unknown = keep - known
        if unknown:
            raise ValidationError(f"cannot marginalize on unknown names {sorted(unknown)}")
        builder = DistributionBuilder()
        for state, p in self._entries.values():
            classical = {k: v for k, v in state.classical.items() if k in keep}
            builder.add(ProgramState(classical,
                                     state.quantum if "psi" in keep else None,
                                     state.time if "t" in keep else None), p)
        return builder.build(self.nonterminated_mass)

    def expectation(self, f) -> float:
        """Expected value of f over the support (may be infinite)."""
        return float(sum(f(s) * p for s, p in self._entries.values()))

    def distance(self, other: "Distribution", state_tol: float = MERGE_TOL) -> float:
        """Max absolute probability difference under approximate state matching."""
        worst = 0.0
        matched = set()
        for state, p in self._entries.values():
            hit = other._find(state, state_tol)
            if hit is None:
                worst = max(worst, p)
            else:
                worst = max(worst, abs(p - hit[1]))
                matched.add(hit[0].key())
        for key, (state, p) in other._entries.items():
            if key not in matched and self._find(state, state_tol) is None:
                worst = max(worst, p)
        return worst

    def approx_eq(self, other: "Distribution", tol: float,
                  state_tol: float = MERGE_TOL) -> bool:
        return self.distance(other, state_tol) <= tol

    def sorted_entries(self):
        """Deterministic order: classical values, then time (inf last), then qkey."""
        def sort_key(item):
            state, _ = item
            names = tuple(sorted(state.classical))
            values = tuple(_orderable(state.classical[n]) for n in names)
            time_rank = (-1, 0.0) if state.time is None else (0, float(state.time))
            qkey = () if state.quantum is None else state.quantum.grid_key()
            return (names, values, time_rank, qkey)
        return sorted(self._entries.values(), key=sort_key)

    def to_json_lines(self) -> str:
        lines = []
        for state, p in self.sorted_entries():
            if state.time is None:
                time_field = None
            elif state.time == INF:
                time_field = "inf"
            else:
                time_field = state.time
            quantum = None
            if state.quantum is not None:
                quantum = [[float(a.real), float(a.imag)]
                           for a in state.quantum.amplitudes]
            lines.append(json.dumps(
                {"classical": dict(sorted(state.classical.items())),
                 "quantum": quantum, "time": time_field, "p": p},
                sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_json_lines(cls, text: str) -> "Distribution":
        builder = DistributionBuilder()
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            time = obj.get("time")
            if time == "inf":
                time = INF
            quantum = obj.get("quantum")
            if quantum is not None:
                quantum = QuantumState([complex(re, im) for re, im in quantum])
            builder.add(ProgramState(obj.get("classical", {}), quantum, time),
                        float(obj["p"]))
        return builder.build()

    def __repr__(self):
        return f"Distribution({len(self._entries)} states, total={self.total():.6g})"


def _orderable(value):
    return (0, int(value)) if isinstance(value, bool) else (1, value)


def marginal(dist: Distribution, keep) -> Distribution:
    return dist.marginal(keep)


def expectation(dist: Distribution, f) -> float:
    return dist.expectation(f)
