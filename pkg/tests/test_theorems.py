import math
from fractions import Fraction

import pytest

from conelab import exact as ex
from conelab.cones import Psd, SecondOrder, four_ray_cone, standard_cone
from conelab.instances import cayley_unitary, trial_rng
from conelab.operators import LinearMap, congruence_map, identity_map
from conelab.theorems import (
    check_cor_generalized_ev,
    check_cor_jordan2,
    check_cor_odd,
    check_higher_rank,
    check_intermediate_inequality,
    check_rank2,
    check_richter_expansive,
    generalized_eigen_top,
    hockey_stick,
)

JORDAN3 = LinearMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
Z = [1, -1, 1]
ICE = congruence_map([[1, 1], [0, 1]])
PSD2 = Psd(2, "complex")
ID2 = [1, 1, 0, 0]
T_N = LinearMap([[1, 0, 2], [0, 1, 1], [0, 0, 1]])  # N >= 0 with N^2 = 0


def test_rank2_standard_cone():
    out = check_rank2(standard_cone(3), T_N, [1, 2, 3], n_max=20)
    assert out.precondition_met and out.conclusion_holds


def test_rank2_ice_cream_precondition_unmet():
    out = check_rank2(PSD2, ICE, ID2)
    assert not out.precondition_met and out.conclusion_holds is None


@pytest.mark.parametrize("cone,v", [(four_ray_cone(), Z), (PSD2, ID2), (SecondOrder(3), [2, 1, 1])])
def test_rank2_identity(cone, v):
    out = check_rank2(cone, identity_map(cone.ambient_dim), v, n_max=5)
    assert out.precondition_met and out.conclusion_holds


def test_higher_rank_examples():
    out = check_higher_rank(PSD2, ICE, ID2, 2)
    assert out.precondition_met and out.conclusion_holds
    out = check_higher_rank(four_ray_cone(), JORDAN3, Z, 2)
    assert out.precondition_met and out.conclusion_holds
    out = check_higher_rank(four_ray_cone(), JORDAN3, [1, 0, 0], 0)
    assert out.precondition_met and out.conclusion_holds


def test_higher_rank_rejects_negative_r():
    with pytest.raises(ValueError):
        check_higher_rank(four_ray_cone(), JORDAN3, Z, -1)


def test_skip_when_v_outside():
    out = check_higher_rank(four_ray_cone(), JORDAN3, [-1, 0, 0], 2)
    assert not out.precondition_met and "not in the cone" in out.skip_reason


def test_skip_when_not_positive():
    out = check_higher_rank(standard_cone(2), LinearMap([[1, -1], [0, 1]]), [1, 1], 1)
    assert not out.precondition_met and "positivity" in out.skip_reason


def test_intermediate_inequality_four_ray():
    out = check_intermediate_inequality(four_ray_cone(), JORDAN3, Z, 2, s=2, n_max=20)
    assert out.precondition_met and out.conclusion_holds
    out = check_intermediate_inequality(four_ray_cone(), JORDAN3, Z, 2, s=None, n_max=20)
    assert out.conclusion_holds


def test_intermediate_inequality_identity():
    out = check_intermediate_inequality(standard_cone(2), identity_map(2), [1, 1], 2, s=1, n_max=5)
    assert out.precondition_met and out.conclusion_holds


def test_intermediate_inequality_bad_s():
    with pytest.raises(ValueError):
        check_intermediate_inequality(four_ray_cone(), JORDAN3, Z, 2, s=3)


def test_hockey_stick_examples():
    assert hockey_stick(5, 2) == 10
    assert all(hockey_stick(n, 0) == n for n in range(10))
    assert all(hockey_stick(0, t) == 0 for t in range(5))


def test_hockey_stick_range():
    for n1 in range(31):
        for t in range(11):
            assert hockey_stick(n1, t) == math.comb(n1, t + 1)


def test_jordan2_examples():
    out = check_cor_jordan2(standard_cone(3), T_N)
    assert out.precondition_met and out.conclusion_holds
    G = ex.as_fraction_matrix([[1, 1, 0], [0, 1, 1], [1, 0, 2]])
    T = LinearMap(ex.mat_mul(ex.mat_mul(G, T_N.rows()), ex.inverse(G)))
    cone = four_ray_cone().__class__(tuple(map(tuple, ex.transpose(G))))
    out = check_cor_jordan2(cone, T)
    assert out.precondition_met and out.conclusion_holds
    out = check_cor_jordan2(four_ray_cone(), JORDAN3)
    assert not out.precondition_met


def test_generalized_ev_examples():
    out = check_cor_generalized_ev(PSD2, ICE, ID2, 1)
    assert out.precondition_met and out.conclusion_holds
    assert generalized_eigen_top(ICE, ID2, 1)[1] == [0, 2, 0, 0]
    out = check_cor_generalized_ev(four_ray_cone(), JORDAN3, Z, 1)
    assert out.conclusion_holds
    assert generalized_eigen_top(JORDAN3, Z, 1) == (2, [1, 0, 0])
    assert generalized_eigen_top(JORDAN3, [1, 0, 0], 1) == (0, [1, 0, 0])


def test_generalized_ev_skips():
    assert not check_cor_generalized_ev(four_ray_cone(), JORDAN3, Z, 2).precondition_met
    assert not check_cor_generalized_ev(four_ray_cone(), JORDAN3, Z, -1).precondition_met


def test_cor_odd_examples():
    out = check_cor_odd(standard_cone(3), identity_map(3), [1, 2, 3], 1)
    assert out.precondition_met and out.conclusion_holds
    P = LinearMap([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    out = check_cor_odd(standard_cone(3), P, [1, 1, 5], 1)
    assert out.precondition_met and out.conclusion_holds
    D = LinearMap([[2, 0], [0, Fraction(1, 2)]])
    out = check_cor_odd(standard_cone(2), D, [1, 1], 1)
    assert not out.precondition_met


def test_cor_odd_psd_with_inverse_form():
    L = [[1, 1], [0, 1]]
    T = congruence_map(L)
    T_inv = congruence_map([[1, -1], [0, 1]])
    out = check_cor_odd(PSD2, T, ID2, 3, T_inv=T_inv)
    assert out.precondition_met and out.conclusion_holds


def test_cor_odd_rejects_even_r():
    with pytest.raises(ValueError):
        check_cor_odd(standard_cone(2), identity_map(2), [1, 1], 2)


def test_cor_odd_not_invertible():
    out = check_cor_odd(standard_cone(2), LinearMap([[1, 0], [0, 0]]), [1, 1], 1)
    assert not out.precondition_met


def test_richter_examples():
    out = check_richter_expansive(cayley_unitary(trial_rng(0, 0), 2))
    assert out.precondition_met and out.conclusion_holds and out.certificates[0] == 1
    out = check_richter_expansive([[1, 1], [0, 1]])
    assert not out.precondition_met
    out = check_richter_expansive([[2, 0], [0, 1]])
    assert not out.precondition_met
