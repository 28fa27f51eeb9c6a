"""Reproducible counterexamples to ``T >= 0, sigma(T) = {1} => T >= id``.

Three fixed cases live here, together with a search over unipotent
candidates ``T = id + N`` and the simplicial regression, where no
counterexample can exist.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from . import exact as ex
from . import herm
from .cones import (
    Cone,
    PolyhedralH,
    PolyhedralV,
    Psd,
    SecondOrder,
    cone_to_json,
    four_ray_cone,
    membership,
    verify_verdict,
)
from .instances import random_simplicial, trial_rng
from .kernels import nilpotent_candidates
from .operators import (
    CongruenceForm,
    GeneratorCheck,
    JordanProfile,
    LinearMap,
    MuCertificate,
    RankOneCertificate,
    OrderViolation,
    PositivityVerdict,
    _congruence_matches,
    _exact_mu_ok,
    apply,
    congruence_map,
    find_violation,
    growth_exponent,
    identity_map,
    is_positive,
    is_spectrum_singleton,
    jordan_profile,
    jordan_to_json,
    map_to_json,
    nilpotency_index,
    positivity_to_json,
    soc_conjugate,
    violation_to_json,
)
from .suites import SuiteReport

CASES = ("FourRay", "IceCream4", "IceCream3")
SEARCH_BITS = 20


class GalleryError(RuntimeError):
    """A stored counterexample no longer verifies."""


@dataclass
class CounterexampleRecord:
    case: str
    cone: Cone
    T: LinearMap
    positivity: PositivityVerdict
    singleton_spectrum: bool
    nilpotency: int | None
    violation: OrderViolation
    jordan: JordanProfile
    growth_exponent: float | None = None
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        doc = {
            "case": self.case,
            "cone": cone_to_json(self.cone),
            "map": map_to_json(self.T),
            "certificates": {
                "positivity": positivity_to_json(self.positivity),
                "singleton_spectrum": {"lambda": "1", "holds": self.singleton_spectrum, "nilpotency": self.nilpotency},
                "violation": violation_to_json(self.violation),
                "jordan": jordan_to_json(self.jordan),
            },
            "checks": self.checks,
        }
        if self.growth_exponent is not None:
            doc["growth_exponent"] = round(self.growth_exponent, 2)
        return doc


# ---- independent verification


def _check_positivity(T: LinearMap, cone: Cone, verdict: PositivityVerdict) -> bool:
    if not verdict.positive:
        return False
    cert = verdict.certificate
    if isinstance(cert, GeneratorCheck):
        if isinstance(cone, PolyhedralH):
            cone = cone.v_cone
        gens = {tuple(g) for g in cone.generators_list()}
        if {tuple(g) for g, _, _ in cert.images} != gens:
            return False
        return all(
            list(w) == apply(T, g) and vd.inside and verify_verdict(cone, w, vd) and membership(cone, w).inside
            for g, w, vd in cert.images
        )
    if isinstance(cert, MuCertificate):
        e1 = [Fraction(int(i == 0)) for i in range(T.n)]
        img = apply(T, e1)
        return (
            cert.exact
            and cert.mu > 0
            and _exact_mu_ok(T, cert.mu)
            and membership(cone, img).inside
            and verify_verdict(cone, img, cert.e1_image)
        )
    if isinstance(cert, RankOneCertificate):
        u, w = list(cert.u), list(cert.w)
        return (
            isinstance(cone, SecondOrder)
            and T.rows() == [[a * b for b in w] for a in u]
            and membership(cone, u).inside
            and membership(cone, w).inside
            and verify_verdict(cone, u, cert.u_verdict)
            and verify_verdict(cone, w, cert.w_verdict)
        )
    if isinstance(cert, CongruenceForm):
        return isinstance(cone, Psd) and cert.k == cone.k and cert.field == cone.field and _congruence_matches(T, cert)
    return False


def _check_violation(T: LinearMap, cone: Cone, violation: OrderViolation) -> bool:
    v, w = list(violation.v), list(violation.image)
    D = T - identity_map(T.n)
    inside = membership(cone, v)
    outside = membership(cone, w)
    return (
        apply(D, v) == w
        and inside.inside
        and not outside.inside
        and verify_verdict(cone, v, violation.v_verdict)
        and verify_verdict(cone, w, violation.image_verdict)
        and violation.v_verdict.inside
        and not violation.image_verdict.inside
    )


def verify_record(record: CounterexampleRecord) -> list[str]:
    """Re-derive every certificate of ``record``; returns the failures."""
    T, cone = record.T, record.cone
    problems = []
    if not _check_positivity(T, cone, record.positivity):
        problems.append("positivity certificate does not verify")
    if not is_spectrum_singleton(T, 1):
        problems.append("spectrum is not {1}")
    if not ex.is_zero_matrix(ex.mat_pow(ex.mat_sub(T.rows(), ex.identity(T.n)), T.n)):
        problems.append("(T - id)^dim is not zero")
    if not _check_violation(T, cone, record.violation):
        problems.append("order violation does not verify")
    if jordan_profile(T, 1) != record.jordan:
        problems.append("Jordan profile does not reproduce")
    if record.jordan.largest_block < 3:
        problems.append("largest Jordan block below 3")
    return problems


def _finish(case, cone, T, positivity, violation, growth=None, checks=None) -> CounterexampleRecord:
    if violation is None:
        raise GalleryError(f"{case}: no order violation found")
    record = CounterexampleRecord(
        case=case,
        cone=cone,
        T=T,
        positivity=positivity,
        singleton_spectrum=is_spectrum_singleton(T, 1),
        nilpotency=nilpotency_index(T, 1),
        violation=violation,
        jordan=jordan_profile(T, 1),
        growth_exponent=growth,
        checks=checks or {},
    )
    problems = verify_record(record)
    if problems:
        raise GalleryError(f"{case}: " + "; ".join(problems))
    return record


# ---- the fixed cases

JORDAN3 = ((1, 1, 0), (0, 1, 1), (0, 0, 1))
J2 = [[1, 1], [0, 1]]


def _vec(v):
    return [ex.format_rational(x) for x in v]


def _herm_det2(x) -> Fraction:
    (re, im) = herm.reconstruct(x, 2, "complex")
    return re[0][0] * re[1][1] - re[0][1] ** 2 - im[0][1] ** 2


def _power_zero(M, p: int) -> bool:
    return ex.is_zero_matrix(ex.mat_pow(M, p))


def _gallery_four_ray() -> CounterexampleRecord:
    cone = four_ray_cone()
    T = LinearMap([list(r) for r in JORDAN3])
    z = [1, -1, 1]
    positivity = is_positive(T, cone)
    tz = apply(T, z)
    dz = ex.vec_sub(tz, ex.as_fraction_vector(z))
    dz_verdict = membership(cone, dz)
    alt_y = [1, 0, 1]
    alt_ok = all(ex.dot(alt_y, g) >= 0 for g in cone.generators) and ex.dot(alt_y, dz) < 0
    checks = {
        "Tz": _vec(tz),
        "Tz_is_e3": tz == [0, 0, 1],
        "D_z": _vec(dz),
        "D_z_outside": not dz_verdict.inside and verify_verdict(cone, dz, dz_verdict),
        "farkas_y": _vec(dz_verdict.certificate.y),
        "farkas_alternative_101_valid": alt_ok,
    }
    violation = find_violation(identity_map(3), T, cone)
    record = _finish("FourRay", cone, T, positivity, violation, checks=checks)
    if not (checks["Tz_is_e3"] and checks["D_z_outside"] and alt_ok and record.jordan.block_sizes == (3,)):
        raise GalleryError("FourRay: stored values do not reproduce")
    if list(record.violation.v) != z:
        raise GalleryError("FourRay: violation witness is not z")
    return record


def _soc_side(T: LinearMap, n: int) -> dict:
    """The same map written on the second-order cone of R^n."""
    S = soc_conjugate(T)
    cone = SecondOrder(n)
    pos = is_positive(S, cone)
    viol = find_violation(identity_map(n), S, cone)
    ok = _check_positivity(S, cone, pos) and viol is not None and _check_violation(S, cone, viol)
    return {
        "map": map_to_json(S),
        "positivity": positivity_to_json(pos),
        "violation": None if viol is None else violation_to_json(viol),
        "verified": ok,
    }


def _gallery_ice_cream4() -> CounterexampleRecord:
    cone = Psd(2, "complex")
    T = congruence_map(J2, "complex")
    eye = herm.identity_coords(2, "complex")
    t_id = apply(T, eye)
    re, im = herm.reconstruct(t_id, 2, "complex")
    D = ex.mat_sub(T.rows(), ex.identity(4))
    checks = {
        "T_id": [_vec(r) for r in re],
        "T_id_imag_zero": ex.is_zero_matrix(im),
        "det_T_id_minus_id": ex.format_rational(_herm_det2(ex.vec_sub(t_id, eye))),
        "D4_zero": _power_zero(D, 4),
        "D3_zero": _power_zero(D, 3),
        "D2_nonzero": not _power_zero(D, 2),
        "second_order_cone": _soc_side(T, 4),
    }
    violation = find_violation(identity_map(4), T, cone)
    growth = growth_exponent(T)
    positivity = is_positive(T, cone)
    if positivity.method != "congruence-form":
        raise GalleryError("IceCream4: positivity not certified by the congruence form")
    record = _finish("IceCream4", cone, T, positivity, violation, growth, checks)
    expected = {
        "T_id": [["1", "1"], ["1", "2"]],
        "T_id_imag_zero": True,
        "det_T_id_minus_id": "-1",
        "D4_zero": True,
        "D3_zero": True,
        "D2_nonzero": True,
    }
    if any(checks[k] != v for k, v in expected.items()) or not checks["second_order_cone"]["verified"]:
        raise GalleryError("IceCream4: stored values do not reproduce")
    if list(record.violation.v) != eye:
        raise GalleryError("IceCream4: violation witness is not the identity")
    return record


def real_subspace_invariant(T4: LinearMap) -> bool:
    """``T`` maps real-symmetric coordinates (imaginary part zero) to
    themselves, and acts there as the real congruence."""
    A = T4.rows()
    return all(A[3][j] == 0 for j in range(3))


def _gallery_ice_cream3() -> CounterexampleRecord:
    T4 = congruence_map(J2, "complex")
    A = T4.rows()
    restricted = [row[:3] for row in A[:3]]
    cone = Psd(2, "real")
    T = congruence_map(J2, "real")
    eye = herm.identity_coords(2, "real")
    checks = {
        "invariant_real_subspace": real_subspace_invariant(T4),
        "restriction_matches_real_congruence": restricted == T.rows(),
        "second_order_cone": _soc_side(T, 3),
    }
    violation = find_violation(identity_map(3), T, cone)
    record = _finish("IceCream3", cone, T, is_positive(T, cone), violation, checks=checks)
    if not (checks["invariant_real_subspace"] and checks["restriction_matches_real_congruence"]):
        raise GalleryError("IceCream3: real-symmetric subspace is not invariant")
    if not checks["second_order_cone"]["verified"] or list(record.violation.v) != eye:
        raise GalleryError("IceCream3: violation does not persist on the restriction")
    return record


_BUILDERS = {"FourRay": _gallery_four_ray, "IceCream4": _gallery_ice_cream4, "IceCream3": _gallery_ice_cream3}


def run_gallery(case: str) -> CounterexampleRecord:
    try:
        builder = _BUILDERS[case]
    except KeyError:
        raise ValueError(f"unknown gallery case {case!r}; expected one of {', '.join(CASES)}") from None
    return builder()


def canonical(doc):
    """Stable view for golden comparison: floats rounded to 9 significant digits."""
    if isinstance(doc, dict):
        return {k: canonical(v) for k, v in doc.items() if k != "metadata"}
    if isinstance(doc, list):
        return [canonical(v) for v in doc]
    if isinstance(doc, float):
        return float(f"{doc:.9g}") if doc != 0 else 0.0
    return doc


def golden(case: str) -> dict:
    text = resources.files("conelab").joinpath("golden").joinpath(f"{case}.json").read_text()
    return json.loads(text)


def matches_golden(record: CounterexampleRecord) -> bool:
    return canonical(record.to_json()) == golden(record.case)


# ---- search


@dataclass(frozen=True)
class SearchConfig:
    cone: Cone
    entry_bound: int = 1
    seed: int = 0
    max_trials: int = 1000
    strategy: str = "enumerate"


def search_bits(dim: int, entry_bound: int) -> float:
    return dim * dim * math.log2(2 * entry_bound + 1)


def _integer_rows(vectors) -> np.ndarray:
    return np.array([[float(x) for x in ex.primitive(list(v))] for v in vectors], dtype=np.float64)


def _polyhedral_screen(cone: PolyhedralV, Ns: np.ndarray) -> np.ndarray:
    """Indices of candidates with ``F (I+N) G >= 0`` and ``F N G`` not.

    Facets and generators are scaled to primitive integers, so the float
    products are exact for the small entries used here."""
    F = _integer_rows(cone.facets)
    G = _integer_rows(cone.generators).T
    FNG = np.einsum("fi,kij,jg->kfg", F, Ns.astype(np.float64), G)
    FG = F @ G
    positive = np.all(FNG + FG >= 0, axis=(1, 2))
    not_above_id = np.any(FNG < 0, axis=(1, 2))
    return np.nonzero(positive & not_above_id)[0]


def _congruence_candidates(cone: Cone, rng: random.Random, bound: int, count: int):
    """``id + N`` from a unipotent congruence ``A -> L^* A L``."""
    k = 2 if isinstance(cone, SecondOrder) else cone.k
    field_ = "real" if isinstance(cone, SecondOrder) and cone.n == 3 else getattr(cone, "field", "complex")
    seen = set()
    for _ in range(count):
        L = ex.identity(k)
        i, j = rng.sample(range(k), 2) if k > 1 else (0, 0)
        if k == 1:
            return
        L[i][j] = Fraction(rng.choice([a for a in range(-bound, bound + 1) if a]))
        key = tuple(map(tuple, L))
        if key in seen:
            continue
        seen.add(key)
        T = congruence_map(L, field_)
        yield soc_conjugate(T) if isinstance(cone, SecondOrder) else T


def _record_from_candidate(cone: Cone, T: LinearMap, seed: int) -> CounterexampleRecord | None:
    positivity = is_positive(T, cone, seed=seed)
    if not positivity.positive or not _check_positivity(T, cone, positivity):
        return None
    violation = find_violation(identity_map(T.n), T, cone, seed=seed)
    if violation is None:
        return None
    return _finish("search", cone, T, positivity, violation)


def _candidate_key(T: LinearMap):
    return tuple(Fraction(x) for row in T.matrix for x in row)


def search_counterexamples(config: SearchConfig) -> list[CounterexampleRecord]:
    cone = config.cone.v_cone if isinstance(config.cone, PolyhedralH) else config.cone
    d = cone.ambient_dim
    if d > 4:
        raise ValueError("search supports cones of ambient dimension <= 4")
    if config.entry_bound < 1:
        raise ValueError("entry_bound must be a positive integer")
    if config.strategy not in ("enumerate", "sample"):
        raise ValueError(f"unknown strategy {config.strategy!r}")
    rng = random.Random(config.seed)
    candidates: list[LinearMap] = []
    if isinstance(cone, PolyhedralV):
        if config.strategy == "enumerate":
            if search_bits(d, config.entry_bound) > SEARCH_BITS:
                raise ValueError(
                    f"enumeration needs dim^2 * log2(2b+1) <= {SEARCH_BITS} bits; use strategy 'sample'"
                )
            Ns = nilpotent_candidates(d, config.entry_bound)
        else:
            Ns = _sampled_nilpotents(rng, d, config.entry_bound, config.max_trials)
        hits = _polyhedral_screen(cone, Ns) if len(Ns) else []
        eye = ex.identity(d)
        candidates = [LinearMap(ex.mat_add(eye, ex.as_fraction_matrix(Ns[i].tolist()))) for i in hits]
    else:
        candidates = list(_congruence_candidates(cone, rng, config.entry_bound, config.max_trials))
    records = []
    for T in candidates:
        rec = _record_from_candidate(cone, T, config.seed)
        if rec is not None:
            records.append(rec)
    records.sort(key=lambda r: _candidate_key(r.T))
    return records


def _sampled_nilpotents(rng: random.Random, d: int, bound: int, count: int) -> np.ndarray:
    """Strictly upper-triangular integer matrices under random coordinate
    permutations: nilpotent by construction."""
    out = set()
    for _ in range(count):
        N = np.zeros((d, d), dtype=np.int64)
        for i in range(d):
            for j in range(i + 1, d):
                N[i, j] = rng.randint(-bound, bound)
        p = list(range(d))
        rng.shuffle(p)
        N = N[np.ix_(p, p)]
        out.add(N.tobytes())
    mats = [np.frombuffer(b, dtype=np.int64).reshape(d, d) for b in sorted(out)]
    return np.array(mats, dtype=np.int64).reshape(-1, d, d)


def random_simplicial_cones(count: int, seed: int, dim: int = 3) -> list[PolyhedralV]:
    return [random_simplicial(trial_rng(seed, i, "simplicial"), dim) for i in range(count)]


# ---- simplicial regression


def simplicial_sanity(trials: int, seed: int, dims=(3,)) -> SuiteReport:
    """``T = G M G^-1`` with ``M`` nonnegative unipotent upper triangular
    must dominate the identity on the cone spanned by the columns of G."""
    import time

    start = time.perf_counter()
    passes = failures = 0
    failing = []
    for index in range(trials):
        rng = trial_rng(seed, index, "simplicial-sanity")
        d = dims[index % len(dims)]
        cone = random_simplicial(rng, d)
        G = ex.transpose(cone.generators_list())
        M = ex.identity(d)
        for i in range(d):
            for j in range(i + 1, d):
                M[i][j] = Fraction(rng.randint(0, 3), rng.choice((1, 2)))
        T = LinearMap(ex.mat_mul(ex.mat_mul(G, M), ex.inverse(G)))
        verdict = is_positive(T - identity_map(d), cone)
        if verdict.positive and is_positive(T, cone).positive:
            passes += 1
        else:
            failures += 1
            failing.append(index)
    return SuiteReport(
        suite="simplicial",
        trials=trials,
        passes=passes,
        failures=failures,
        skips=0,
        seed=seed,
        elapsed=time.perf_counter() - start,
        failing_indices=failing,
    )
