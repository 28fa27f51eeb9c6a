"""Seeded theorem suites.

Each trial is a pure function of ``(seed, index)``: a family is drawn, an
instance is built, and the matching check runs.  Instances whose hypotheses
cannot be certified count as skips.
"""

from __future__ import annotations

import itertools
import json
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import exact as ex
from . import herm
from .cones import PolyhedralV, Psd, SecondOrder, four_ray_cone
from .instances import (
    TheoremInstance,
    cayley_orthogonal,
    cayley_unitary,
    cone_pool,
    conjugate,
    face_nilpotent,
    generator_matrix,
    is_simplicial,
    positive_map,
    precondition_rays,
    rand_q,
    random_cone_vector,
    random_psd_coords,
    random_soc_vector,
    trial_rng,
    unipotent_factor,
)
from .operators import LinearMap, congruence_map, identity_map, soc_conjugate
from .theorems import (
    CheckOutcome,
    check_cor_generalized_ev,
    check_cor_jordan2,
    check_cor_odd,
    check_higher_rank,
    check_intermediate_inequality,
    check_rank2,
    check_richter_expansive,
)

SUITES = ("rank2", "higher-rank", "inequality-s", "jordan2", "cor-ev", "cor-odd", "richter")
R_MAX = 4
N_MAX = 20


@dataclass
class SuiteReport:
    suite: str
    trials: int
    passes: int
    failures: int
    skips: int
    seed: int
    elapsed: float = 0.0
    families: dict = field(default_factory=dict)
    failing_indices: list = field(default_factory=list)

    @property
    def precondition_unmet_skips(self) -> int:
        return self.skips

    @property
    def certified(self) -> int:
        return self.passes + self.failures

    def to_json(self, timing: bool = False) -> dict:
        doc = {
            "suite": self.suite,
            "trials": self.trials,
            "passes": self.passes,
            "failures": self.failures,
            "skips": self.skips,
            "seed": self.seed,
            "families": {k: {"met": m, "drawn": n} for k, (m, n) in sorted(self.families.items())},
            "failing_indices": self.failing_indices,
        }
        if timing:
            doc["elapsed"] = round(self.elapsed, 3)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---- instance families
#
# Every builder takes (rng, ctx, r) and returns a TheoremInstance or None.


def _poly_cone(rng, ctx) -> PolyhedralV:
    return rng.choice(ctx["pool"])


def _unipotent_poly(rng, cone: PolyhedralV, square_zero: bool = False) -> LinearMap:
    """``T = id + N`` positive on ``cone`` with ``N`` nilpotent."""
    d = cone.ambient_dim
    if is_simplicial(cone) and rng.random() < 0.6:
        N = ex.zeros(d)
        if square_zero:
            split = rng.randint(1, d)
            for i in range(split):
                for j in range(split, d):
                    N[i][j] = Fraction(rng.choice((0, 1, 2)))
        else:
            for i in range(d):
                for j in range(i + 1, d):
                    N[i][j] = Fraction(rng.choice((0, 1, 1, 2)))
        return conjugate(generator_matrix(cone), ex.mat_add(ex.identity(d), N))
    N = face_nilpotent(rng, cone)
    if N is None:
        return identity_map(d)
    return LinearMap(ex.mat_add(ex.identity(d), N))


def _k_vector(rng, cone: PolyhedralV, T: LinearMap, power: int):
    rays = precondition_rays(cone, T, power)
    if not rays:
        return None
    return random_cone_vector(rng, rays)


def fam_poly_unipotent(rng, ctx, r):
    cone = _poly_cone(rng, ctx)
    T = _unipotent_poly(rng, cone)
    v = _k_vector(rng, cone, T, r + 1)
    return None if v is None else TheoremInstance(cone, T, tuple(v), r)


def fam_poly_general(rng, ctx, r):
    cone = _poly_cone(rng, ctx)
    T = positive_map(rng, cone)
    v = _k_vector(rng, cone, T, r + 1)
    return None if v is None else TheoremInstance(cone, T, tuple(v), r)


def fam_four_ray(rng, ctx, r):
    cone = ctx["four_ray"]
    T = LinearMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    if r >= 2:
        v = random_cone_vector(rng, cone.generators)
    else:
        v = _k_vector(rng, cone, T, r + 1)
        if v is None:
            return None
    return TheoremInstance(cone, T, tuple(v), r)


def _fixed_psd_vector(rng, k):
    """Multiple of ``e_k e_k^*``: fixed by congruence with an upper
    unipotent factor."""
    v = [Fraction(0)] * (k * k)
    v[k - 1] = Fraction(rng.randint(1, 4))
    return v


def fam_psd_unipotent(rng, ctx, r):
    k = rng.choice((1, 2, 2, 2, 3))
    L = unipotent_factor(rng, k)
    T = congruence_map(L, "complex")
    index = 2 * k - 1
    v = random_psd_coords(rng, k, "complex") if r + 1 >= index or rng.random() < 0.3 else _fixed_psd_vector(rng, k)
    return TheoremInstance(Psd(k, "complex"), T, tuple(v), r)


def fam_psd_unitary(rng, ctx, r):
    k = rng.choice((1, 2, 2, 3))
    T = congruence_map(cayley_unitary(rng, k), "complex")
    s = Fraction(rng.randint(1, 5))
    return TheoremInstance(Psd(k, "complex"), T, tuple(s * x for x in herm.identity_coords(k, "complex")), r)


def fam_soc_parabolic(rng, ctx, r):
    """Ice-cream-type maps: unipotent congruence seen in Lorentz coordinates."""
    field_ = rng.choice(("real", "complex"))
    L = unipotent_factor(rng, 2, field_)
    T = soc_conjugate(congruence_map(L if field_ == "complex" else L[0], field_))
    n = 4 if field_ == "complex" else 3
    if r >= 2:
        v = random_soc_vector(rng, n)
    else:
        s = Fraction(rng.randint(1, 4))
        v = herm.herm_to_soc([Fraction(0), s] + [Fraction(0)] * (n - 2))
    return TheoremInstance(SecondOrder(n), T, tuple(v), r)


def fam_soc_rotation(rng, ctx, r):
    """Spatial rotation: fixes the axis ``e_1``."""
    n = rng.choice((3, 4))
    Q = cayley_orthogonal(rng, n - 1)
    R = ex.identity(n)
    for i in range(1, n):
        R[i][1:] = Q[i - 1]
    s = Fraction(rng.randint(1, 4))
    return TheoremInstance(SecondOrder(n), LinearMap(R), (s,) + (Fraction(0),) * (n - 1), r)


CHAIN_FAMILIES = (
    (fam_poly_unipotent, 4),
    (fam_poly_general, 3),
    (fam_four_ray, 1),
    (fam_psd_unipotent, 2),
    (fam_psd_unitary, 1),
    (fam_soc_parabolic, 2),
    (fam_soc_rotation, 1),
)


def _pick(rng, families):
    funcs, weights = zip(*families)
    return rng.choices(funcs, weights=weights)[0]


# ---- jordan-2 families


def fam_j2_poly(rng, ctx):
    cone = _poly_cone(rng, ctx)
    return TheoremInstance(cone, _unipotent_poly(rng, cone, square_zero=True), ())


def fam_j2_distractor(rng, ctx):
    """Maps that fail a hypothesis: block size 3 or a spectrum off {1}."""
    cone = _poly_cone(rng, ctx)
    if rng.random() < 0.5:
        return TheoremInstance(ctx["four_ray"], LinearMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]]), ())
    return TheoremInstance(cone, positive_map(rng, cone), ())


# ---- generalized eigenvector families


def fam_ev_poly(rng, ctx):
    cone = _poly_cone(rng, ctx)
    T = _unipotent_poly(rng, cone)
    c = rand_q(rng, 1, 3)
    v = random_cone_vector(rng, cone.generators)
    return TheoremInstance(cone, T.scaled(c), tuple(v), lam=c)


def fam_ev_psd(rng, ctx):
    k = rng.choice((1, 2, 2, 3))
    s = rand_q(rng, 1, 2)
    re, im = unipotent_factor(rng, k)
    L = (ex.mat_scale(s, re), ex.mat_scale(s, im))
    T = congruence_map(L, "complex")
    return TheoremInstance(Psd(k, "complex"), T, tuple(random_psd_coords(rng, k, "complex")), lam=s * s)


def fam_ev_soc(rng, ctx):
    field_ = rng.choice(("real", "complex"))
    s = rand_q(rng, 1, 2)
    re, im = unipotent_factor(rng, 2, field_)
    L = ex.mat_scale(s, re) if field_ == "real" else (ex.mat_scale(s, re), ex.mat_scale(s, im))
    T = soc_conjugate(congruence_map(L, field_))
    n = T.n
    return TheoremInstance(SecondOrder(n), T, tuple(random_soc_vector(rng, n)), lam=s * s)


EV_FAMILIES = ((fam_ev_poly, 5), (fam_ev_psd, 3), (fam_ev_soc, 2))


# ---- odd-r families (T and T^-1 both positive)


@lru_cache(maxsize=64)
def generator_automorphisms(cone: PolyhedralV) -> tuple:
    """Linear maps permuting the generator set of a polyhedral cone."""
    gens = [list(g) for g in cone.generators_list()]
    d = cone.ambient_dim
    basis_idx = next(
        idx for idx in itertools.combinations(range(len(gens)), d) if ex.rank([gens[i] for i in idx]) == d
    )
    B = ex.transpose([gens[i] for i in basis_idx])
    B_inv = ex.inverse(B)
    gen_set = {tuple(g) for g in gens}
    out = []
    for images in itertools.permutations(range(len(gens)), d):
        M = ex.mat_mul(ex.transpose([gens[i] for i in images]), B_inv)
        if {tuple(ex.mat_vec(M, g)) for g in gens} == gen_set:
            out.append(M)
    return tuple(tuple(map(tuple, M)) for M in out)


def fam_odd_poly(rng, ctx, r):
    cone = _poly_cone(rng, ctx)
    d = cone.ambient_dim
    if is_simplicial(cone):
        perm = list(range(d))
        rng.shuffle(perm)
        diag = [rand_q(rng, 1, 3) if rng.random() < 0.4 else Fraction(1) for _ in range(d)]
        M = [[diag[i] if perm[i] == j else Fraction(0) for j in range(d)] for i in range(d)]
        G = generator_matrix(cone)
        T = conjugate(G, M)
    else:
        T = LinearMap(rng.choice(generator_automorphisms(cone)))
    v = _k_vector(rng, cone, T, r + 1)
    return None if v is None else TheoremInstance(cone, T, tuple(v), r, T_inv=LinearMap(ex.inverse(T.rows())))


def fam_odd_four_ray(rng, ctx, r):
    cone = ctx["four_ray"]
    T = LinearMap(rng.choice(generator_automorphisms(cone)))
    v = _k_vector(rng, cone, T, r + 1)
    return None if v is None else TheoremInstance(cone, T, tuple(v), r, T_inv=LinearMap(ex.inverse(T.rows())))


def _psd_pair(L):
    return congruence_map(L, "complex"), congruence_map(herm.cmat_inverse(L), "complex")


def fam_odd_psd(rng, ctx, r):
    k = rng.choice((1, 2, 2, 3))
    if rng.random() < 0.5:
        L = unipotent_factor(rng, k)
        T, T_inv = _psd_pair(L)
        nilp = 2 * k - 1
        v = random_psd_coords(rng, k, "complex") if r + 1 >= nilp else _fixed_psd_vector(rng, k)
    else:
        T, T_inv = _psd_pair(cayley_unitary(rng, k))
        v = ex.vec_scale(rng.randint(1, 4), herm.identity_coords(k, "complex"))
    return TheoremInstance(Psd(k, "complex"), T, tuple(v), r, T_inv=T_inv)


def fam_odd_soc(rng, ctx, r):
    field_ = rng.choice(("real", "complex"))
    L = unipotent_factor(rng, 2, field_)
    Lc = L if field_ == "complex" else (L[0], ex.zeros(2))
    L_inv = herm.cmat_inverse(Lc)
    if field_ == "real":
        T = soc_conjugate(congruence_map(L[0], "real"))
        T_inv = soc_conjugate(congruence_map(L_inv[0], "real"))
    else:
        T = soc_conjugate(congruence_map(L, "complex"))
        T_inv = soc_conjugate(congruence_map(L_inv, "complex"))
    n = T.n
    if r >= 2:
        v = random_soc_vector(rng, n)
    else:
        v = herm.herm_to_soc([Fraction(0), Fraction(rng.randint(1, 4))] + [Fraction(0)] * (n - 2))
    return TheoremInstance(SecondOrder(n), T, tuple(v), r, T_inv=T_inv)


ODD_FAMILIES = ((fam_odd_poly, 4), (fam_odd_four_ray, 1), (fam_odd_psd, 3), (fam_odd_soc, 2))


# ---- trial runners


def _family_name(func) -> str:
    return func.__name__.removeprefix("fam_").replace("_", "-")


def _chain_trial(rng, ctx, check):
    r = rng.randint(0, R_MAX)
    fam = _pick(rng, CHAIN_FAMILIES)
    inst = fam(rng, ctx, r)
    if inst is None:
        return _family_name(fam), None
    return _family_name(fam), check(rng, inst)


def trial_rank2(rng, ctx):
    fam = _pick(rng, CHAIN_FAMILIES)
    inst = fam(rng, ctx, 1)
    if inst is None:
        return _family_name(fam), None
    return _family_name(fam), check_rank2(inst.cone, inst.T, inst.v, n_max=N_MAX)


def trial_higher_rank(rng, ctx):
    return _chain_trial(rng, ctx, lambda rng, i: check_higher_rank(i.cone, i.T, i.v, i.r))


def trial_inequality_s(rng, ctx):
    def check(rng, i):
        s = rng.randint(0, i.r)
        return check_intermediate_inequality(i.cone, i.T, i.v, i.r, s=s, n_max=N_MAX)

    return _chain_trial(rng, ctx, check)


def trial_jordan2(rng, ctx):
    fam = fam_j2_distractor if rng.random() < 0.1 else fam_j2_poly
    inst = fam(rng, ctx)
    return _family_name(fam), check_cor_jordan2(inst.cone, inst.T)


def trial_cor_ev(rng, ctx):
    fam = _pick(rng, EV_FAMILIES)
    inst = fam(rng, ctx)
    return _family_name(fam), check_cor_generalized_ev(inst.cone, inst.T, inst.v, inst.lam)


def trial_cor_odd(rng, ctx):
    r = rng.choice((1, 3))
    fam = _pick(rng, ODD_FAMILIES)
    inst = fam(rng, ctx, r)
    if inst is None:
        return _family_name(fam), None
    return _family_name(fam), check_cor_odd(inst.cone, inst.T, inst.v, r, T_inv=inst.T_inv)


def trial_richter(rng, ctx):
    k = rng.randint(1, 4)
    roll = rng.random()
    if roll < 0.93:
        name, L = "unitary", cayley_unitary(rng, k)
    elif roll < 0.965:
        name, L = "unipotent", unipotent_factor(rng, max(k, 2))
    else:
        name = "random"
        L = ([[rand_q(rng, -2, 2) for _ in range(k)] for _ in range(k)], ex.zeros(k))
    return name, check_richter_expansive(L)


TRIALS = {
    "rank2": trial_rank2,
    "higher-rank": trial_higher_rank,
    "inequality-s": trial_inequality_s,
    "jordan2": trial_jordan2,
    "cor-ev": trial_cor_ev,
    "cor-odd": trial_cor_odd,
    "richter": trial_richter,
}


def run_trial(name: str, seed: int, index: int, ctx: dict | None = None) -> tuple[str, CheckOutcome | None]:
    ctx = ctx or suite_context(seed)
    return TRIALS[name](trial_rng(seed, index, name), ctx)


def suite_context(seed: int) -> dict:
    return {"pool": cone_pool(seed), "four_ray": four_ray_cone()}


def run_suite(name: str, trials: int, seed: int) -> SuiteReport:
    if name not in TRIALS:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    start = time.perf_counter()
    ctx = suite_context(seed)
    passes = failures = 0
    met, drawn = Counter(), Counter()
    failing = []
    for index in range(trials):
        family, outcome = run_trial(name, seed, index, ctx)
        drawn[family] += 1
        if outcome is None or not outcome.precondition_met:
            continue
        met[family] += 1
        if outcome.conclusion_holds:
            passes += 1
        else:
            failures += 1
            failing.append(index)
    return SuiteReport(
        suite=name,
        trials=trials,
        passes=passes,
        failures=failures,
        skips=trials - passes - failures,
        seed=seed,
        elapsed=time.perf_counter() - start,
        families={f: (met[f], drawn[f]) for f in drawn},
        failing_indices=failing,
    )
