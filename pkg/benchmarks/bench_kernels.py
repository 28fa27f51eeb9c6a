"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints a table of best-of-N wall times and the speedup per kernel.  The
compiled module must be built (``pip install -e . --no-build-isolation``).
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from conelab import _pykernels as py

try:
    from conelab import _ckernels as cy
except ImportError:  # pragma: no cover - depends on the build
    cy = None


def cases(rng: np.random.Generator):
    rays = rng.normal(size=(10_000, 4))
    sym = rng.normal(size=(8, 8))
    sym = np.ascontiguousarray(sym + sym.T)
    return [
        ("soc_margins 10^4 x 4", "soc_margins", (rays,)),
        ("jacobi_eigvalsh 8x8", "jacobi_eigvalsh", (sym,)),
        ("nilpotent_candidates d=3 b=1", "nilpotent_candidates", (3, 1)),
        ("nilpotent_candidates d=2 b=3", "nilpotent_candidates", (2, 3)),
    ]


def best(fn, args, repeat: int) -> float:
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if cy is None:
        raise SystemExit("compiled kernels not built; run: pip install -e . --no-build-isolation")
    print(f"{'kernel':34s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for label, name, fargs in cases(np.random.default_rng(args.seed)):
        a = getattr(py, name)(*fargs)
        b = getattr(cy, name)(*fargs)
        if not np.allclose(a, b, atol=1e-10):
            raise SystemExit(f"{name}: backends disagree")
        tp = best(getattr(py, name), fargs, args.repeat)
        tc = best(getattr(cy, name), fargs, args.repeat)
        print(f"{label:34s} {tp * 1e3:10.3f}ms {tc * 1e3:10.3f}ms {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
