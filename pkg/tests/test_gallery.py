import copy
import json
from fractions import Fraction

import pytest

from conelab.cones import PolyhedralV, Psd, SecondOrder, four_ray_cone, standard_cone
from conelab.gallery import (
    CASES,
    GalleryError,
    SearchConfig,
    canonical,
    golden,
    matches_golden,
    random_simplicial_cones,
    run_gallery,
    search_bits,
    search_counterexamples,
    simplicial_sanity,
    verify_record,
)
from conelab.operators import LinearMap

JORDAN3 = ((1, 1, 0), (0, 1, 1), (0, 0, 1))


@pytest.mark.parametrize("case", CASES)
def test_gallery_matches_golden(case):
    record = run_gallery(case)
    assert verify_record(record) == []
    assert matches_golden(record)
    assert all(record.checks.values())


def test_unknown_case():
    with pytest.raises(ValueError):
        run_gallery("Nope")


def test_four_ray_record():
    rec = run_gallery("FourRay")
    assert rec.jordan.block_sizes == (3,)
    assert rec.nilpotency == 3
    assert rec.violation.v == (1, -1, 1)
    assert rec.violation.image == (-1, 1, 0)


def test_ice_cream4_record():
    rec = run_gallery("IceCream4")
    assert rec.nilpotency == 3
    assert rec.jordan.block_sizes == (3, 1)
    assert rec.growth_exponent is not None and rec.growth_exponent > 0
    doc = rec.to_json()
    assert doc["certificates"]["violation"]["v"] == ["1", "1", "0", "0"]


def test_verify_record_catches_tampering():
    rec = run_gallery("FourRay")
    bad = copy.copy(rec)
    bad.T = LinearMap([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert verify_record(bad) != []


def test_golden_is_canonical_json():
    for case in CASES:
        doc = golden(case)
        assert canonical(doc) == doc
        assert "timing" not in json.dumps(doc)


def test_four_ray_search_finds_jordan_block():
    records = search_counterexamples(SearchConfig(four_ray_cone(), 1))
    maps = {r.T.matrix for r in records}
    assert tuple(tuple(Fraction(x) for x in row) for row in JORDAN3) in maps
    assert all(verify_record(r) == [] for r in records)


def test_search_deterministic():
    a = search_counterexamples(SearchConfig(four_ray_cone(), 1))
    b = search_counterexamples(SearchConfig(four_ray_cone(), 1))
    assert [r.to_json() for r in a] == [r.to_json() for r in b]


def test_simplicial_search_empty():
    for cone in random_simplicial_cones(20, 0):
        assert search_counterexamples(SearchConfig(cone, 1)) == []
    assert search_counterexamples(SearchConfig(standard_cone(3), 1)) == []


def test_search_sample_strategy():
    records = search_counterexamples(SearchConfig(four_ray_cone(), 2, seed=3, max_trials=300, strategy="sample"))
    assert all(verify_record(r) == [] for r in records)


def test_search_soc():
    records = search_counterexamples(SearchConfig(SecondOrder(3), 1, seed=0, max_trials=50, strategy="sample"))
    assert records and all(verify_record(r) == [] for r in records)


def test_search_psd():
    records = search_counterexamples(SearchConfig(Psd(2, "complex"), 1, seed=0, max_trials=20, strategy="sample"))
    assert records and all(r.positivity.method == "congruence-form" for r in records)


def test_search_limits():
    assert search_bits(3, 1) == pytest.approx(9 * 1.5849625, rel=1e-6)
    with pytest.raises(ValueError, match="bits"):
        search_counterexamples(SearchConfig(four_ray_cone(), 3))
    with pytest.raises(ValueError):
        search_counterexamples(SearchConfig(SecondOrder(5), 1))
    with pytest.raises(ValueError):
        search_counterexamples(SearchConfig(four_ray_cone(), 1, strategy="nope"))
    with pytest.raises(ValueError):
        search_counterexamples(SearchConfig(four_ray_cone(), 0))


def test_simplicial_sanity():
    rep = simplicial_sanity(100, 0, dims=(2, 3, 4))
    assert rep.failures == 0 and rep.passes == 100
