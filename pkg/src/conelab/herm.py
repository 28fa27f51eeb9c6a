"""Coordinates for Hermitian / real-symmetric matrices.

A ``k x k`` Hermitian matrix ``A`` is encoded by real coordinates in the
fixed basis

    E_ii                    (i = 0..k-1)
    E_ij + E_ji             (i < j, lexicographic)
    i (E_ij - E_ji)         (i < j, complex field only)

so ``A = [[a, b], [conj(b), c]]`` has coordinates ``(a, c, Re b, Im b)``.
The real-symmetric coordinates are a prefix of the complex ones.

Complex matrices are carried as ``(re, im)`` pairs of real matrices, which
keeps rational data exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import exact as ex

CMatrix = tuple[list[list[Fraction]], list[list[Fraction]]]


def offdiag_pairs(k: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(k) for j in range(i + 1, k)]


def herm_dim(k: int, field: str) -> int:
    if field == "real":
        return k * (k + 1) // 2
    if field == "complex":
        return k * k
    raise ValueError(f"unknown field {field!r}")


def reconstruct(x: Sequence, k: int, field: str) -> CMatrix:
    """Matrix ``(re, im)`` with the given coordinates."""
    if len(x) != herm_dim(k, field):
        raise ValueError(f"expected {herm_dim(k, field)} coordinates, got {len(x)}")
    zero = x[0] * 0
    re = [[zero] * k for _ in range(k)]
    im = [[zero] * k for _ in range(k)]
    for i in range(k):
        re[i][i] = x[i]
    pairs = offdiag_pairs(k)
    for n, (i, j) in enumerate(pairs):
        re[i][j] = re[j][i] = x[k + n]
    if field == "complex":
        base = k + len(pairs)
        for n, (i, j) in enumerate(pairs):
            im[i][j] = x[base + n]
            im[j][i] = -x[base + n]
    return re, im


def coordinates(a: CMatrix, k: int, field: str) -> list:
    """Coordinates of a Hermitian matrix; the anti-Hermitian part is dropped."""
    re, im = a
    pairs = offdiag_pairs(k)
    out = [re[i][i] for i in range(k)]
    out += [(re[i][j] + re[j][i]) * Fraction(1, 2) for i, j in pairs]
    if field == "complex":
        out += [(im[i][j] - im[j][i]) * Fraction(1, 2) for i, j in pairs]
    return out


def is_hermitian(a: CMatrix) -> bool:
    re, im = a
    k = len(re)
    return all(re[i][j] == re[j][i] and im[i][j] == -im[j][i] for i in range(k) for j in range(k))


def real_embedding(a: CMatrix) -> list[list]:
    """``[[re, -im], [im, re]]``: PSD exactly when the Hermitian matrix is."""
    re, im = a
    top = [list(r) + [-x for x in i] for r, i in zip(re, im)]
    bottom = [list(i) + list(r) for r, i in zip(re, im)]
    return top + bottom


def identity_coords(k: int, field: str) -> list[Fraction]:
    return [Fraction(1)] * k + [Fraction(0)] * (herm_dim(k, field) - k)


def cmat(re: Sequence[Sequence], im: Sequence[Sequence] | None = None) -> CMatrix:
    re_m = ex.as_fraction_matrix(re)
    im_m = ex.as_fraction_matrix(im) if im is not None else ex.zeros(len(re_m))
    return re_m, im_m


def cmat_mul(a: CMatrix, b: CMatrix) -> CMatrix:
    ar, ai = a
    br, bi = b
    return (
        ex.mat_sub(ex.mat_mul(ar, br), ex.mat_mul(ai, bi)),
        ex.mat_add(ex.mat_mul(ar, bi), ex.mat_mul(ai, br)),
    )


def cmat_adjoint(a: CMatrix) -> CMatrix:
    re, im = a
    return ex.transpose(re), [[-x for x in row] for row in ex.transpose(im)]


def outer(x_re: Sequence, x_im: Sequence) -> CMatrix:
    """Rank-one ``x x*`` for ``x = x_re + i x_im``."""
    k = len(x_re)
    re = [[x_re[i] * x_re[j] + x_im[i] * x_im[j] for j in range(k)] for i in range(k)]
    im = [[x_im[i] * x_re[j] - x_re[i] * x_im[j] for j in range(k)] for i in range(k)]
    return re, im


def soc_matrix(dim: int) -> list[list[Fraction]]:
    """Matrix of the order isomorphism 2x2 Hermitian (dim 4) or real
    symmetric (dim 3) coordinates -> second-order cone coordinates."""
    if dim not in (3, 4):
        raise ValueError("herm_to_soc needs 2x2 coordinates of dimension 3 or 4")
    h = Fraction(1, 2)
    m = ex.identity(dim)
    m[0][0], m[0][1] = h, h
    m[1][0], m[1][1] = h, -h
    return m


def herm_to_soc(x: Sequence) -> list:
    """``(a, c, Re b, Im b) -> ((a+c)/2, (a-c)/2, Re b, Im b)``."""
    if len(x) not in (3, 4):
        raise ValueError(f"expected 3 or 4 coordinates, got {len(x)}")
    a, c = x[0], x[1]
    h = Fraction(1, 2)
    return [(a + c) * h, (a - c) * h, *x[2:]]


def soc_to_herm(y: Sequence) -> list:
    if len(y) not in (3, 4):
        raise ValueError(f"expected 3 or 4 coordinates, got {len(y)}")
    return [y[0] + y[1], y[0] - y[1], *y[2:]]


def cmat_inverse(a: CMatrix) -> CMatrix:
    k = len(a[0])
    inv = ex.inverse(real_embedding(a))
    return [row[:k] for row in inv[:k]], [row[:k] for row in inv[k:]]


def cmat_identity(k: int) -> CMatrix:
    return ex.identity(k), ex.zeros(k)


def cmat_sub(a: CMatrix, b: CMatrix) -> CMatrix:
    return ex.mat_sub(a[0], b[0]), ex.mat_sub(a[1], b[1])


def cmat_is_zero(a: CMatrix) -> bool:
    return ex.is_zero_matrix(a[0]) and ex.is_zero_matrix(a[1])
