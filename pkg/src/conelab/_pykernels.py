"""Pure-Python implementations of the hot loops.

Used when the compiled extension is unavailable or ``CONELAB_PURE_PYTHON``
is set.  Results match ``_ckernels`` to rounding.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def soc_margins(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return X[:, 0] - np.sqrt(np.sum(X[:, 1:] ** 2, axis=1))


def jacobi_eigvalsh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    a = [list(map(float, row)) for row in np.asarray(A, dtype=np.float64)]
    n = len(a)
    scale = sum(x * x for row in a for x in row)
    for _ in range(max_sweeps):
        off = sum(a[p][q] ** 2 for p in range(n) for q in range(p + 1, n))
        if off == 0.0 or off <= tol * tol * scale:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for row in a:
                    akp, akq = row[p], row[q]
                    row[p] = c * akp - s * akq
                    row[q] = s * akp + c * akq
                rp, rq = a[p], a[q]
                for k in range(n):
                    akp, akq = rp[k], rq[k]
                    rp[k] = c * akp - s * akq
                    rq[k] = s * akp + c * akq
    return np.sort(np.array([a[i][i] for i in range(n)]))


def _nilpotent(N: list[list[int]], d: int) -> bool:
    P = N
    for _ in range(d - 1):
        P = [[sum(P[i][k] * N[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    return not any(x for row in P for x in row)


def nilpotent_candidates(dim: int, bound: int) -> np.ndarray:
    values = range(-bound, bound + 1)
    found = []
    # row-major entries, first entry varying fastest: same order as the compiled kernel
    for digits in itertools.product(values, repeat=dim * dim):
        flat = digits[::-1]
        if sum(flat[i * dim + i] for i in range(dim)) != 0:
            continue
        N = [list(flat[i * dim:(i + 1) * dim]) for i in range(dim)]
        if _nilpotent(N, dim):
            found.append(N)
    if not found:
        return np.zeros((0, dim, dim), dtype=np.int64)
    return np.array(found, dtype=np.int64)
