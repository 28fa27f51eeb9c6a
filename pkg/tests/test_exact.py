from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conelab import exact as ex

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_parse_rational_strings():
    assert ex.parse_rational("1/3") == Fraction(1, 3)
    assert ex.parse_rational(" -7 ") == -7
    assert ex.parse_rational(4) == 4


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e3", "1/2/3", "", "x", True, None, "1/0"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ex.NotRationalError):
        ex.parse_rational(bad)


def test_format_round_trip():
    for q in (Fraction(1, 3), Fraction(-4), Fraction(22, 7)):
        assert ex.parse_rational(ex.format_rational(q)) == q
    assert ex.format_rational(Fraction(6, 3)) == "2"


@given(square(3))
def test_rank_and_det_match_sympy(a):
    M = sympy.Matrix(a)
    assert ex.rank(a) == M.rank()
    assert ex.det(a) == Fraction(str(M.det()))


@given(square(3), square(3))
def test_det_multiplicative(a, b):
    assert ex.det(ex.mat_mul(a, b)) == ex.det(a) * ex.det(b)


@given(square(3))
def test_inverse(a):
    if ex.det(a) == 0:
        with pytest.raises(ZeroDivisionError):
            ex.inverse(a)
    else:
        assert ex.mat_mul(ex.inverse(a), a) == ex.identity(3)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=3))
def test_nullspace(a):
    basis = ex.nullspace(a, 4)
    assert len(basis) == 4 - ex.rank(a)
    for v in basis:
        assert ex.is_zero_vector(ex.mat_vec(a, v))


def test_mat_pow_and_kron():
    J = ex.as_fraction_matrix([[1, 1], [0, 1]])
    assert ex.mat_pow(J, 5) == [[1, 5], [0, 1]]
    assert ex.mat_pow(J, 0) == ex.identity(2)
    K = ex.kron([[1, 2], [3, 4]], [[0, 1], [1, 0]])
    assert K[0] == [0, 1, 0, 2] and K[3] == [3, 0, 4, 0]


def test_primitive():
    assert ex.primitive([Fraction(1, 2), Fraction(-1, 3), 0]) == [3, -2, 0]


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_psd_exact_on_gram_matrices(rows):
    gram = ex.mat_mul(ex.transpose(rows), rows)
    assert ex.is_psd_exact(gram)
    assert np.linalg.eigvalsh(np.array(gram, dtype=float)).min() > -1e-9


def test_psd_exact_negative():
    assert not ex.is_psd_exact(ex.as_fraction_matrix([[0, 1], [1, 1]]))
    assert not ex.is_psd_exact(ex.as_fraction_matrix([[1, 0], [0, -1]]))
    assert ex.is_psd_exact(ex.as_fraction_matrix([[0, 0], [0, 2]]))
    assert not ex.is_psd_exact(ex.as_fraction_matrix([[0, 1], [1, 0]]))
