"""Acceptance criteria 1-10, one test each.

Every membership decision made while checking criteria 1-8 is logged with
``recording()``; criterion 9 re-verifies the whole log.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from conelab import exact as ex
from conelab.cones import Farkas, SecondOrder, four_ray_cone, membership, recheck, recording
from conelab.gallery import (
    SearchConfig,
    _check_positivity,
    random_simplicial_cones,
    run_gallery,
    search_counterexamples,
    verify_record,
)
from conelab.instances import rand_q, random_soc_map, trial_rng
from conelab.operators import NOT_POSITIVE, POSITIVE, GeneratorCheck, apply, is_positive, product_law_deviation, soc_falsifier
from conelab.suites import SUITES, run_suite
from conelab.theorems import hockey_stick

LOG: dict[int, list] = {}
SUITE_TRIALS = 1250


def _timed(n, fn):
    with recording() as log:
        start = time.perf_counter()
        out = fn()
        elapsed = time.perf_counter() - start
    LOG[n] = list(log)
    return out, elapsed


# ---- 1-3: the gallery


def criterion_1():
    rec = run_gallery("FourRay")
    cone = four_ray_cone()
    cert = rec.positivity.certificate
    images_ok = isinstance(cert, GeneratorCheck) and all(
        vd.inside and membership(cone, list(w)).inside for _, w, vd in cert.images
    )
    z = [1, -1, 1]
    tz = apply(rec.T, z)
    dz = ex.vec_sub(tz, ex.as_fraction_vector(z))
    farkas = membership(cone, dz).certificate
    farkas_ok = isinstance(farkas, Farkas) and all(ex.dot(farkas.y, g) >= 0 for g in cone.generators) and ex.dot(farkas.y, dz) < 0
    return {
        "positivity": rec.positivity.status == POSITIVE and images_ok and _check_positivity(rec.T, cone, rec.positivity),
        "Tz": tz == [0, 0, 1],
        "D_z": dz == [-1, 1, 0] and farkas_ok,
        "jordan": rec.jordan.block_sizes == (3,),
        "record": verify_record(rec) == [],
    }


def criterion_2():
    rec = run_gallery("IceCream4")
    c = rec.checks
    return {
        "T_id": c["T_id"] == [["1", "1"], ["1", "2"]] and c["T_id_imag_zero"],
        "det": c["det_T_id_minus_id"] == "-1",
        "singleton": c["D4_zero"] and rec.singleton_spectrum,
        "nilpotency": c["D3_zero"] and c["D2_nonzero"] and rec.nilpotency == 3,
        "witness_id": list(rec.violation.v) == [1, 1, 0, 0],
        "soc_side": c["second_order_cone"]["verified"],
        "record": verify_record(rec) == [],
    }


def criterion_3():
    rec = run_gallery("IceCream3")
    c = rec.checks
    return {
        "invariant": c["invariant_real_subspace"] and c["restriction_matches_real_congruence"],
        "violation": verify_record(rec) == [] and c["second_order_cone"]["verified"],
    }


@pytest.mark.parametrize("n,fn,limit", [(1, criterion_1, 1.0), (2, criterion_2, 1.0), (3, criterion_3, None)])
def test_gallery_criteria(n, fn, limit, criterion):
    checks, elapsed = _timed(n, fn)
    failed = [k for k, ok in checks.items() if not ok]
    passed = not failed and (limit is None or elapsed < limit)
    criterion(n, passed, elapsed, "all checks hold" if not failed else f"failed: {failed}")
    assert not failed
    if limit is not None:
        assert elapsed < limit


# ---- 4: spectrum product law


def criterion_4():
    worst = 0.0
    for i in range(100):
        rng = trial_rng(4, i, "product-law")
        L = [[rand_q(rng, -4, 4) for _ in range(3)] for _ in range(3)]
        R = [[rand_q(rng, -4, 4) for _ in range(3)] for _ in range(3)]
        worst = max(worst, product_law_deviation(L, R))
    return worst


def test_spectrum_product_law(criterion):
    worst, elapsed = _timed(4, criterion_4)
    passed = worst <= 1e-6 and elapsed < 5
    criterion(4, passed, elapsed, f"max deviation {worst:.2e} over 100 pairs")
    assert worst <= 1e-6
    assert elapsed < 5


# ---- 5: theorem suites


def criterion_5():
    return [run_suite(name, SUITE_TRIALS, 2026) for name in SUITES]


def test_theorem_suites(criterion):
    reports, elapsed = _timed(5, criterion_5)
    low = [r.suite for r in reports if r.passes + r.failures < 1000]
    failures = sum(r.failures for r in reports)
    counts = ", ".join(f"{r.suite} {r.passes}/{r.trials}" for r in reports)
    criterion(5, not low and failures == 0 and elapsed < 60, elapsed, f"{failures} failures; certified {counts}")
    assert not low, f"fewer than 1000 certified instances: {low}"
    assert failures == 0
    assert elapsed < 60


# ---- 6: hockey stick


def test_hockey_stick(criterion):
    start = time.perf_counter()
    bad = [(n1, t) for n1 in range(31) for t in range(11) if hockey_stick(n1, t) != math.comb(n1, t + 1)]
    criterion(6, not bad, time.perf_counter() - start, "n1 <= 30, t <= 10")
    assert not bad


# ---- 7: search


def criterion_7():
    records = search_counterexamples(SearchConfig(four_ray_cone(), 1))
    target = tuple(tuple(Fraction(x) for x in row) for row in ((1, 1, 0), (0, 1, 1), (0, 0, 1)))
    found = any(r.T.matrix == target for r in records)
    verified = all(verify_record(r) == [] for r in records)
    nonempty = [i for i, cone in enumerate(random_simplicial_cones(100, 7)) if search_counterexamples(SearchConfig(cone, 1))]
    return found, verified, len(records), nonempty


def test_search(criterion):
    (found, verified, count, nonempty), elapsed = _timed(7, criterion_7)
    passed = found and verified and not nonempty and elapsed < 30
    criterion(7, passed, elapsed, f"four-ray: {count} records, target found={found}; simplicial nonempty={len(nonempty)}/100")
    assert found and verified
    assert nonempty == []
    assert elapsed < 30


# ---- 8: second-order cone consistency


def criterion_8():
    tally = {POSITIVE: 0, NOT_POSITIVE: 0, "unknown": 0}
    problems = []
    for i in range(100):
        rng = random.Random(f"soc-consistency:{i}")
        n = 3 if i % 2 == 0 else 4
        cone = SecondOrder(n)
        T = random_soc_map(rng, n)
        vd = is_positive(T, cone, seed=i, samples=10_000)
        tally[vd.status] += 1
        if vd.status == POSITIVE:
            if soc_falsifier(T, cone, seed=10_000 + i, samples=10_000) is not None:
                problems.append((i, "mu certificate contradicted by a sampled ray"))
            if not _check_positivity(T, cone, vd):
                problems.append((i, "mu certificate does not re-verify"))
        elif vd.status == NOT_POSITIVE:
            ray = vd.certificate
            v, w = list(ray.v), list(ray.image)
            if not (membership(cone, v).inside and apply(T, v) == w and not membership(cone, w).inside):
                problems.append((i, "counterexample ray does not verify"))
    return tally, problems


def test_soc_consistency(criterion):
    (tally, problems), elapsed = _timed(8, criterion_8)
    criterion(8, not problems, elapsed, f"verdicts {tally}; {len(problems)} problems")
    assert problems == []


# ---- 9: every certificate re-verifies


def test_certificates_recheck(criterion):
    missing = [n for n in range(1, 9) if n != 6 and n not in LOG]
    runners = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 7: criterion_7, 8: criterion_8}
    for n in missing:
        _timed(n, runners[n])
    records = [r for n in sorted(LOG) for r in LOG[n]]
    start = time.perf_counter()
    bad = recheck(records)
    elapsed = time.perf_counter() - start
    criterion(9, bool(records) and not bad, elapsed, f"{len(records)} recorded verdicts, {len(bad)} discrepancies")
    assert records
    assert bad == []


# ---- 10: growth exponent (reported only)


def test_growth_exponent_reported(criterion):
    start = time.perf_counter()
    g = run_gallery("IceCream4").growth_exponent
    criterion(10, g is not None and math.isfinite(g), time.perf_counter() - start, f"IceCream4 growth exponent {g:.3f} (reported, not asserted)")
    assert g is not None and math.isfinite(g)
