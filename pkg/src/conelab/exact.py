"""Exact rational linear algebra on small dense matrices.

Matrices are lists of rows, vectors are lists; entries are ``Fraction``
(or ``int``, which mixes freely with ``Fraction``).  Nothing here rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Sequence

Matrix = list[list[Fraction]]
Vector = list[Fraction]


class NotRationalError(TypeError):
    """Raised when exact arithmetic is requested on non-rational data."""


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, ints or Fractions exactly.

    Floats are rejected; an exact toolkit must not silently accept a
    rounded binary value.
    """
    if isinstance(value, bool):
        raise NotRationalError(f"boolean is not a rational: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in "eE.") or text.count("/") > 1:
            raise NotRationalError(f"invalid rational literal: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise NotRationalError(f"invalid rational literal: {value!r}") from exc
    raise NotRationalError(f"not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_fraction_vector(v: Sequence) -> Vector:
    return [parse_rational(x) for x in v]


def as_fraction_matrix(m: Sequence[Sequence]) -> Matrix:
    return [[parse_rational(x) for x in row] for row in m]


def zeros(n: int, m: int | None = None) -> Matrix:
    return [[Fraction(0)] * (n if m is None else m) for _ in range(n)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def vec_add(u: Sequence, v: Sequence) -> Vector:
    return [x + y for x, y in zip(u, v)]


def vec_sub(u: Sequence, v: Sequence) -> Vector:
    return [x - y for x, y in zip(u, v)]


def vec_scale(c, v: Sequence) -> Vector:
    return [c * x for x in v]


def is_zero_vector(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def is_zero_matrix(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def mat_pow(a: Matrix, k: int) -> Matrix:
    """``a**k`` by repeated squaring (``k >= 0``)."""
    if k < 0:
        raise ValueError("negative matrix power")
    result = identity(len(a))
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        k >>= 1
        if k:
            base = mat_mul(base, base)
    return result


def kron(a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for ra in a:
        for rb in b:
            rows.append([x * y for x in ra for y in rb])
    return rows


def _integer_rows(a: Matrix) -> list[list[int]]:
    out = []
    for row in a:
        den = 1
        for x in row:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def rank(a: Matrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    if not a or not a[0]:
        return 0
    m = _integer_rows(a)
    nrows, ncols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c, ncols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in row] for row in a]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def nullspace(a: Matrix, ncols: int | None = None) -> list[Vector]:
    """Basis of ``{x : a x = 0}``."""
    if not a:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    n = len(a[0])
    m, pivots = rref(a)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, pc in zip(m, pivots):
            x[pc] = -row[f]
        basis.append(x)
    return basis


def solve(a: Matrix, b: Sequence) -> Vector | None:
    """A solution of ``a x = b`` (free variables set to zero), or ``None``."""
    n = len(a[0])
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    m, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(m, pivots):
        x[pc] = row[n]
    return x


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        p = m[c][c]
        result *= p
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return sign * result


def primitive(v: Sequence) -> Vector:
    """Scale a nonzero rational vector to coprime integers, keeping direction."""
    den = 1
    for x in v:
        d = Fraction(x).denominator
        den = den * d // gcd(den, d)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return [Fraction(0)] * len(ints)
    return [Fraction(x // g) for x in ints]


def is_psd_exact(a: Matrix) -> bool:
    """Exact PSD test for a rational symmetric matrix.

    Symmetric elimination with diagonal pivots: a negative pivot, or a zero
    pivot with a nonzero row remainder, means the matrix is not PSD.
    """
    m = [[Fraction(x) for x in row] for row in a]
    n = len(m)
    active = list(range(n))
    while active:
        k = max(active, key=lambda i: m[i][i])
        p = m[k][k]
        if p < 0:
            return False
        if p == 0:
            return all(m[i][j] == 0 for i in active for j in active)
        active.remove(k)
        row_k = m[k]
        for i in active:
            f = m[i][k] / p
            if f:
                row_i = m[i]
                for j in active:
                    row_i[j] -= f * row_k[j]
    return True
