import json
from fractions import Fraction

import pytest

from conelab import exact as ex
from conelab.cones import four_ray_cone, membership
from conelab.instances import (
    KINDS,
    cayley_orthogonal,
    cayley_unitary,
    generate_instance,
    lorentz_boost,
    nilpotent_rejection_draws,
    precondition_rays,
    random_lorentz,
    trial_rng,
)
from conelab import herm
from conelab.operators import LinearMap, is_positive, is_spectrum_singleton
from conelab.suites import SUITES, generator_automorphisms, run_suite, run_trial, suite_context
from conelab.theorems import exactly_certified


def test_simplicial_unipotent_instance():
    inst = generate_instance("simplicial-unipotent", 3, 0)
    assert exactly_certified(is_positive(inst.T, inst.cone))
    assert is_spectrum_singleton(inst.T, 1)
    assert membership(inst.cone, inst.v).inside


def test_dim_one_instance():
    inst = generate_instance("simplicial-unipotent", 1, 5)
    assert inst.T.rows() == [[1]]


def test_nilpotent_rejection_rediscovers_jordan_block():
    draws = nilpotent_rejection_draws(four_ray_cone(), seed=0, draws=1000)
    target = LinearMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]]).matrix
    assert any(d.T.matrix == target for d in draws)


@pytest.mark.parametrize("kind", KINDS)
def test_generate_instance_deterministic(kind):
    a = generate_instance(kind, 3, 42)
    b = generate_instance(kind, 3, 42)
    assert a.T.matrix == b.T.matrix and a.v == b.v


def test_generate_instance_errors():
    with pytest.raises(ValueError):
        generate_instance("simplicial-unipotent", 7, 0)
    with pytest.raises(ValueError):
        generate_instance("nope", 3, 0)


def test_rational_orthogonal_and_unitary():
    rng = trial_rng(1, 2)
    Q = cayley_orthogonal(rng, 3)
    assert ex.mat_mul(ex.transpose(Q), Q) == ex.identity(3)
    U = cayley_unitary(rng, 3)
    assert herm.cmat_mul(herm.cmat_adjoint(U), U) == herm.cmat_identity(3)


def test_lorentz_maps_preserve_form():
    J = [[Fraction(0)] * 4 for _ in range(4)]
    for i in range(4):
        J[i][i] = Fraction(1 if i == 0 else -1)
    for seed in range(5):
        B = random_lorentz(trial_rng(seed, 0), 4)
        assert ex.mat_mul(ex.mat_mul(ex.transpose(B), J), B) == J
    assert lorentz_boost(3, 1, Fraction(1, 2))[0][0] == Fraction(5, 3)


def test_precondition_rays_are_in_k():
    T = LinearMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    cone = four_ray_cone()
    D = ex.mat_sub(T.rows(), ex.identity(3))
    for ray in precondition_rays(cone, T, 2):
        assert membership(cone, ray).inside
        assert membership(cone, ex.vec_scale(-1, ex.mat_vec(ex.mat_pow(D, 2), ray))).inside


def test_four_ray_automorphisms():
    autos = generator_automorphisms(four_ray_cone())
    assert len(autos) >= 2
    assert tuple(map(tuple, ex.identity(3))) in autos


@pytest.mark.parametrize("name", SUITES)
def test_suite_small_run(name):
    rep = run_suite(name, 60, 3)
    assert rep.failures == 0
    assert rep.trials == rep.passes + rep.failures + rep.skips
    assert rep.passes > 0


def test_suite_determinism():
    assert run_suite("cor-odd", 40, 9).dumps() == run_suite("cor-odd", 40, 9).dumps()
    doc = json.loads(run_suite("rank2", 10, 1).dumps())
    assert {"trials", "passes", "failures", "skips", "seed"} <= set(doc)


def test_trial_is_pure_function_of_seed_and_index():
    ctx = suite_context(5)
    a = run_trial("higher-rank", 5, 17, ctx)
    b = run_trial("higher-rank", 5, 17)
    assert a[0] == b[0] and a[1].conclusion_holds == b[1].conclusion_holds


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", 1, 0)
