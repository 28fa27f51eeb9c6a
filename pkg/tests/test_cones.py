import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from conelab import exact as ex
from conelab.cones import (
    APPROX,
    EXACT,
    Coeffs,
    ConeError,
    DimensionError,
    EigenFloor,
    Farkas,
    PolyhedralH,
    PolyhedralV,
    Psd,
    SecondOrder,
    SocMargin,
    cone_from_json,
    cone_to_json,
    double_description,
    dual_generators,
    four_ray_cone,
    h_to_v,
    membership,
    recheck,
    recording,
    standard_cone,
    v_to_h,
    vector_from_json,
    vector_to_json,
    verdict_from_json,
    verdict_to_json,
    verify_verdict,
)


def rays_up_to_scaling(vectors):
    return {tuple(ex.primitive(list(v))) for v in vectors}


def lp_member(gens, v) -> bool:
    """Float oracle: v = G c with c >= 0 feasible."""
    G = np.array([[float(x) for x in g] for g in gens]).T
    res = linprog(np.zeros(G.shape[1]), A_eq=G, b_eq=[float(x) for x in v], bounds=(0, None), method="highs")
    return res.status == 0


# ---- worked examples


def test_four_ray_e1_coeffs():
    vd = membership(four_ray_cone(), [1, 0, 0])
    assert vd.inside and vd.certificate == Coeffs((1, 0, 0, 0))
    assert vd.margin >= 0


def test_four_ray_outside_farkas():
    cone = four_ray_cone()
    v = [-1, 1, 0]
    vd = membership(cone, v)
    assert not vd.inside and isinstance(vd.certificate, Farkas)
    y = vd.certificate.y
    assert all(ex.dot(y, g) >= 0 for g in cone.generators)
    assert ex.dot(y, v) < 0
    # the witness (1,0,1) passes the same exhaustive sign check
    assert all(ex.dot([1, 0, 1], g) >= 0 for g in cone.generators) and ex.dot([1, 0, 1], v) == -1


def test_soc_boundary():
    vd = membership(SecondOrder(4), [1, 1, 0, 0])
    assert vd.inside and vd.margin == 0 and isinstance(vd.certificate, SocMargin)


def test_soc_outside_and_irrational_margin():
    vd = membership(SecondOrder(3), [1, 1, 1])
    assert not vd.inside and vd.margin < 0
    assert membership(SecondOrder(3), [3, 1, 1]).inside


def test_dual_standard_cone():
    assert rays_up_to_scaling(dual_generators(standard_cone(3))) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}


def test_dual_four_ray():
    assert rays_up_to_scaling(dual_generators(four_ray_cone())) == {(1, 0, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)}


def test_dual_half_line():
    cone = PolyhedralV(((1, 0),))
    dual = dual_generators(cone)
    assert (1, 0) in rays_up_to_scaling(dual)
    assert {(0, 1), (0, -1)} <= rays_up_to_scaling(dual)


def test_v_to_h_examples():
    assert rays_up_to_scaling(v_to_h(standard_cone(3)).inequalities) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert rays_up_to_scaling(v_to_h(PolyhedralV(((1, 0), (1, 1)))).inequalities) == {(0, 1), (1, -1)}
    assert rays_up_to_scaling(v_to_h(four_ray_cone()).inequalities) == rays_up_to_scaling(
        dual_generators(four_ray_cone())
    )


def test_h_to_v_round_trip():
    h = v_to_h(four_ray_cone())
    assert rays_up_to_scaling(h_to_v(h).generators) == rays_up_to_scaling(four_ray_cone().generators)


def test_h_cone_membership_matches_v():
    h = PolyhedralH(((1, 0, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)))
    for v in ([1, 0, 0], [-1, 1, 0], [1, -1, 1], [2, -1, 1]):
        assert membership(h, v).inside == membership(four_ray_cone(), v).inside


def test_psd_examples():
    real = Psd(2, "real")
    assert membership(real, [1, 1, 0]).inside
    vd = membership(real, [0, 1, 1])  # [[0,1],[1,1]]: det -1
    assert not vd.inside and isinstance(vd.certificate, EigenFloor)
    c = Psd(2, "complex")
    assert membership(c, [1, 1, 0, 1]).inside  # [[1, i],[-i, 1]]: det 0
    assert not membership(c, [1, 1, 1, 1]).inside
    assert membership(Psd(3, "real"), [1, 1, 1, 0, 0, 0]).inside


def test_errors():
    with pytest.raises(DimensionError):
        membership(four_ray_cone(), [1, 0])
    with pytest.raises(DimensionError):
        PolyhedralV(((1, 0), (1, 0, 0)))
    with pytest.raises(ConeError):
        PolyhedralV(((0, 0),))
    with pytest.raises(ConeError):
        PolyhedralV(((1, 0), (-1, 0), (0, 1)))  # contains a line
    with pytest.raises(ex.NotRationalError):
        membership(four_ray_cone(), [0.5, 0, 0])


def test_approx_mode_accepts_floats():
    vd = membership(four_ray_cone(), [0.5, 0.0, 0.0], mode=APPROX)
    assert vd.inside and vd.mode == APPROX
    assert not membership(four_ray_cone(), [-1e-3, 0.0, 0.0], mode=APPROX).inside
    assert membership(four_ray_cone(), [-1e-12, 0.0, 0.0], mode=APPROX).inside


# ---- properties


def random_cone(rng, d, m):
    while True:
        gens = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(m)]
        if any(all(x == 0 for x in g) for g in gens):
            continue
        try:
            return PolyhedralV(tuple(map(tuple, gens)))
        except ConeError:
            continue


@pytest.mark.parametrize("seed", range(200))
def test_polyhedral_duality(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    cone = random_cone(rng, d, rng.randint(1, 6))
    dual = dual_generators(cone)
    for _ in range(100):
        v = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(d)]
        vd = membership(cone, v)
        assert vd.inside == all(ex.dot(y, v) >= 0 for y in dual)
        assert verify_verdict(cone, v, vd)


@pytest.mark.parametrize("seed", range(30))
def test_membership_against_lp_oracle(seed):
    rng = random.Random(1000 + seed)
    d = rng.randint(2, 4)
    cone = random_cone(rng, d, rng.randint(d, 6))
    for _ in range(20):
        v = [rng.randint(-4, 4) for _ in range(d)]
        assert membership(cone, v).inside == lp_member(cone.generators, v)


def test_double_description_small_cases():
    rays, lin = double_description([[1, 0], [0, 1]], 2)
    assert rays_up_to_scaling(rays) == {(1, 0), (0, 1)} and lin == []
    rays, lin = double_description([[1, 0]], 2)
    assert rays_up_to_scaling(rays) == {(1, 0)} and rays_up_to_scaling(lin) <= {(0, 1), (0, -1)}


soc_vec = st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), min_size=3, max_size=3)


def lift_to_soc(rest, extra):
    head = Fraction(int(sum(float(x) ** 2 for x in rest) ** 0.5) + 1) + extra
    return [head, *rest]


@given(soc_vec, soc_vec, st.integers(0, 3), st.integers(0, 3))
def test_soc_self_dual_pairs(r1, r2, a, b):
    u, v = lift_to_soc(r1, a), lift_to_soc(r2, b)
    assert membership(SecondOrder(4), u).inside and membership(SecondOrder(4), v).inside
    assert ex.dot(u, v) >= 0


@pytest.mark.parametrize("seed", range(20))
def test_soc_outside_has_separating_boundary_ray(seed):
    rng = np.random.default_rng(seed)
    found = 0
    for _ in range(50):
        v = rng.normal(size=4)
        if v[0] >= np.linalg.norm(v[1:]):
            continue
        u = np.concatenate([[1.0], -v[1:] / np.linalg.norm(v[1:])])  # boundary ray
        found += u @ v < 0
    assert found > 0


def test_recording_and_recheck():
    with recording() as log:
        membership(four_ray_cone(), [1, 0, 0])
        membership(four_ray_cone(), [-1, 1, 0])
        membership(SecondOrder(3), [1, 0, 1])
        membership(Psd(2, "complex"), [1, 2, 1, 0])
    assert len(log) == 4
    assert recheck(log) == []
    cone, v, vd = log[1]
    forged = type(vd)(True, vd.margin, Coeffs((0, 0, 0, 0)), vd.mode)
    assert recheck([(cone, v, forged)])


# ---- file format


@pytest.mark.parametrize(
    "cone",
    [four_ray_cone(), PolyhedralH(((1, 0), (1, -1))), SecondOrder(4), Psd(2, "complex"), Psd(3, "real")],
)
def test_cone_json_round_trip(cone):
    doc = json.loads(json.dumps(cone_to_json(cone)))
    assert cone_from_json(doc) == cone


def test_cone_json_spec_shape():
    doc = {"kind": "polyhedral-v", "generators": [["1", "0"], ["1/3", "1"]]}
    cone = cone_from_json(doc)
    assert cone.generators[1][0] == Fraction(1, 3)
    assert cone_to_json(cone) == doc


def test_vector_and_verdict_round_trip():
    v = [Fraction(1, 3), Fraction(-2)]
    assert vector_from_json(json.loads(json.dumps(vector_to_json(v)))) == v
    for cone, w in ((four_ray_cone(), [-1, 1, 0]), (four_ray_cone(), [2, 1, 1]), (Psd(2, "complex"), [1, 2, 1, 0])):
        vd = membership(cone, w)
        assert verdict_from_json(json.loads(json.dumps(verdict_to_json(vd)))) == vd


def test_exact_json_refuses_floats():
    with pytest.raises(ex.NotRationalError):
        cone_from_json({"kind": "polyhedral-v", "generators": [[1.0, 0]]})
    with pytest.raises(ex.NotRationalError):
        vector_from_json([0.1, 1], EXACT)
