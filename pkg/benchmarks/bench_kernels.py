"""Benchmark the compiled amplitude kernels against the NumPy fallback.

Run as a script::

    python3 benchmarks/bench_kernels.py [--qubits 4 8 12] [--repeat 200]

Reports per-call time for each kernel and backend plus the speedup, and
cross-checks that the two backends agree to 1e-12 on every benchmarked
input so the timings always compare like with like.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from qpp._kernels import BACKEND, fallback

try:
    from qpp._kernels import _core
except ImportError:  # pragma: no cover - extension not built
    _core = None


def _random_state(rng, n):
    vec = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    vec = vec.astype(np.complex128)
    return vec / math.sqrt(float(np.vdot(vec, vec).real))


def _time(fn, args, repeat):
    best = math.inf
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeat):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / repeat)
    return best


def bench(qubits, repeat):
    rng = np.random.default_rng(20240817)
    print(f"default backend: {BACKEND}")
    if _core is None:
        print("compiled extension not importable; timing the fallback only")
    header = f"{'kernel':<18} {'n':>3} {'python':>12} {'compiled':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in qubits:
        vec = _random_state(rng, n)
        table = (np.arange(1 << n) % 2).astype(np.int8)
        solution = (1 << n) // 2
        cases = [
            ("hadamard_layer", (vec,)),
            ("phase_flip", (vec, table)),
            ("invert_about_mean", (vec,)),
            ("grover_iteration", (vec, solution)),
        ]
        for name, args in cases:
            py_fn = getattr(fallback, name)
            py_time = _time(py_fn, args, repeat)
            if _core is not None:
                c_fn = getattr(_core, name)
                agree = np.max(np.abs(py_fn(*args) - c_fn(*args)))
                if agree > 1e-12:
                    raise AssertionError(
                        f"{name} backends disagree by {agree:g} at n={n}")
                c_time = _time(c_fn, args, repeat)
                ratio = py_time / c_time if c_time > 0 else math.inf
                print(f"{name:<18} {n:>3} {py_time * 1e6:>10.2f}us "
                      f"{c_time * 1e6:>10.2f}us {ratio:>7.1f}x")
            else:
                print(f"{name:<18} {n:>3} {py_time * 1e6:>10.2f}us "
                      f"{'-':>12} {'-':>8}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 12])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    bench(args.qubits, args.repeat)


if __name__ == "__main__":
    main()
