"""Seeded instance families for the theorem checks.

All randomness goes through ``random.Random`` seeded from explicit integers,
so a family member is a pure function of ``(seed, index)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact as ex
from . import herm
from .cones import (
    Cone,
    PolyhedralV,
    Psd,
    SecondOrder,
    double_description,
    four_ray_cone,
    membership,
    standard_cone,
)
from .operators import LinearMap, congruence_map, identity_map, is_positive, soc_conjugate
from .theorems import exactly_certified

KINDS = ("simplicial-unipotent", "nilpotent-rejection", "soc-random", "psd-congruence")


@dataclass(frozen=True)
class TheoremInstance:
    cone: Cone
    T: LinearMap
    v: tuple
    r: int = 0
    lam: Fraction = Fraction(1)
    T_inv: LinearMap | None = None
    family: str = ""


def trial_rng(seed: int, index: int, salt: str = "") -> random.Random:
    return random.Random(f"{seed}:{salt}:{index}")


def rand_q(rng: random.Random, lo: int, hi: int, dens: Sequence[int] = (1, 1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def random_simplicial(rng: random.Random, d: int, bound: int = 2) -> PolyhedralV:
    """Random simplicial cone: ``d`` independent integer generators with
    positive first coordinate and ``|det| >= 1e-3`` (float pre-screen)."""
    if d == 1:
        return PolyhedralV(((1,),))
    while True:
        cols = [[rng.randint(1, bound)] + [rng.randint(-bound, bound) for _ in range(d - 1)] for _ in range(d)]
        if abs(np.linalg.det(np.array(cols, dtype=float))) < 1e-3:
            continue
        if ex.det(ex.as_fraction_matrix(cols)) != 0:
            return PolyhedralV(tuple(map(tuple, cols)))


def random_polyhedral(rng: random.Random, d: int, m: int, bound: int = 2) -> PolyhedralV:
    """Pointed cone with ``m`` integer generators (first coordinate > 0)."""
    while True:
        gens = {tuple([rng.randint(1, bound)] + [rng.randint(-bound, bound) for _ in range(d - 1)]) for _ in range(m)}
        if len(gens) < m:
            continue
        if ex.rank([list(g) for g in gens]) == d:
            return PolyhedralV(tuple(sorted(gens)))


def generator_matrix(cone: PolyhedralV) -> list[list[Fraction]]:
    return ex.transpose(cone.generators_list())


def conjugate(G: list[list[Fraction]], M: list[list[Fraction]]) -> LinearMap:
    return LinearMap(ex.mat_mul(ex.mat_mul(G, M), ex.inverse(G)))


def random_cone_vector(rng: random.Random, rays: Sequence[Sequence], max_coeff: int = 3) -> list[Fraction]:
    """Nonzero nonnegative integer combination of ``rays``."""
    while True:
        c = [rng.randint(0, max_coeff) for _ in rays]
        if any(c):
            break
    d = len(rays[0])
    return [sum((ci * Fraction(r[i]) for ci, r in zip(c, rays)), Fraction(0)) for i in range(d)]


def precondition_rays(cone: PolyhedralV, T: LinearMap, power: int) -> list[list[Fraction]]:
    """Extreme rays of ``{v in C : -(T - id)^power v in C}``."""
    D = T.rows()
    for i in range(T.n):
        D[i][i] -= 1
    Dp = ex.mat_pow(D, power)
    rows = [list(f) for f in cone.facets]
    rows += [[-x for x in ex.mat_vec(ex.transpose(Dp), f)] for f in cone.facets]
    rays, lin = double_description(rows, cone.ambient_dim)
    return rays if not lin else []


# ---- positive maps by construction


def upper_nonneg(rng, d, values=(0, 0, 1, 2), diag=(1,)) -> list[list[Fraction]]:
    return [
        [Fraction(rng.choice(diag)) if i == j else (Fraction(rng.choice(values)) if j > i else Fraction(0)) for j in range(d)]
        for i in range(d)
    ]


def rank_one_positive(rng, cone: PolyhedralV, terms: int) -> list[list[Fraction]]:
    """``sum a_k g_k f_k^T`` with generators ``g`` and dual rays ``f``."""
    d = cone.ambient_dim
    M = ex.zeros(d)
    for _ in range(terms):
        g = rng.choice(cone.generators)
        f = rng.choice(cone.facets)
        a = rand_q(rng, 1, 2)
        M = ex.mat_add(M, [[a * g[i] * f[j] for j in range(d)] for i in range(d)])
    return M


def face_nilpotent(rng, cone: PolyhedralV) -> list[list[Fraction]] | None:
    """``N = sum a_k g_k f^T`` with every ``g_k`` on the facet ``f``:
    ``N >= 0`` on the cone and ``N^2 = 0``."""
    f = rng.choice(cone.facets)
    face = [g for g in cone.generators if ex.dot(f, g) == 0]
    if not face:
        return None
    d = cone.ambient_dim
    N = ex.zeros(d)
    for g in rng.sample(face, rng.randint(1, len(face))):
        a = rand_q(rng, 1, 2)
        N = ex.mat_add(N, [[a * g[i] * f[j] for j in range(d)] for i in range(d)])
    return N


def cayley_orthogonal(rng, k: int, bound: int = 2) -> list[list[Fraction]]:
    """Rational orthogonal matrix ``(I - K)(I + K)^-1``, ``K`` skew."""
    K = ex.zeros(k)
    for i in range(k):
        for j in range(i + 1, k):
            K[i][j] = rand_q(rng, -bound, bound)
            K[j][i] = -K[i][j]
    eye = ex.identity(k)
    return ex.mat_mul(ex.mat_sub(eye, K), ex.inverse(ex.mat_add(eye, K)))


def cayley_unitary(rng, k: int, bound: int = 2) -> herm.CMatrix:
    """Rational unitary ``(I - K)(I + K)^-1`` for skew-Hermitian ``K``."""
    re, im = ex.zeros(k), ex.zeros(k)
    for i in range(k):
        im[i][i] = rand_q(rng, -bound, bound)
        for j in range(i + 1, k):
            re[i][j] = rand_q(rng, -bound, bound)
            re[j][i] = -re[i][j]
            im[i][j] = im[j][i] = rand_q(rng, -bound, bound)
    K = (re, im)
    eye = herm.cmat_identity(k)
    plus = (ex.mat_add(eye[0], re), ex.mat_add(eye[1], im))
    return herm.cmat_mul(herm.cmat_sub(eye, K), herm.cmat_inverse(plus))


def lorentz_boost(n: int, axis: int, t: Fraction) -> list[list[Fraction]]:
    """Rational boost in the ``(x_1, x_axis)`` plane, ``|t| < 1``."""
    ch = (1 + t * t) / (1 - t * t)
    sh = 2 * t / (1 - t * t)
    B = ex.identity(n)
    B[0][0], B[0][axis], B[axis][0], B[axis][axis] = ch, sh, sh, ch
    return B


def random_lorentz(rng, n: int) -> list[list[Fraction]]:
    """Product of a spatial rotation and a boost: maps the cone onto itself."""
    R = ex.identity(n)
    Q = cayley_orthogonal(rng, n - 1)
    for i in range(n - 1):
        for j in range(n - 1):
            R[i + 1][j + 1] = Q[i][j]
    t = Fraction(rng.randint(-3, 3), 4)
    return ex.mat_mul(lorentz_boost(n, rng.randint(1, n - 1), t), R)


def random_soc_vector(rng, n: int) -> list[Fraction]:
    rest = [rand_q(rng, -3, 3) for _ in range(n - 1)]
    head = Fraction(int(sum(float(x) ** 2 for x in rest) ** 0.5) + rng.randint(0, 2))
    while head * head < sum(x * x for x in rest):
        head += 1
    return [head] + rest


def random_psd_coords(rng, k: int, field: str, terms: int = 2) -> list[Fraction]:
    total = [Fraction(0)] * herm.herm_dim(k, field)
    for _ in range(terms):
        xr = [Fraction(rng.randint(-2, 2)) for _ in range(k)]
        xi = [Fraction(rng.randint(-2, 2)) for _ in range(k)] if field == "complex" else [Fraction(0)] * k
        total = ex.vec_add(total, herm.coordinates(herm.outer(xr, xi), k, field))
    if all(x == 0 for x in total):
        total = herm.identity_coords(k, field)
    return total


def unipotent_factor(rng, k: int = 2, field: str = "complex") -> herm.CMatrix:
    """Upper-triangular ``L`` with unit diagonal and a nonzero corner."""
    re, im = ex.identity(k), ex.zeros(k)
    for i in range(k):
        for j in range(i + 1, k):
            re[i][j] = rand_q(rng, -2, 2)
            if field == "complex":
                im[i][j] = rand_q(rng, -2, 2)
    if re[0][k - 1] == 0 and im[0][k - 1] == 0:
        re[0][k - 1] = Fraction(1)
    return re, im


# ---- generate_instance


def generate_instance(
    kind: str,
    dim: int,
    seed: int,
    *,
    cone: Cone | None = None,
    entry_bound: int = 1,
    budget: int = 1000,
) -> TheoremInstance | None:
    """One seeded instance of a named family.

    ``nilpotent-rejection`` returns ``None`` when no draw within ``budget``
    passes the filter.
    """
    if dim > 6:
        raise ValueError("instances are generated for dim <= 6")
    rng = trial_rng(seed, 0, kind)
    if kind == "simplicial-unipotent":
        C = cone if cone is not None else random_simplicial(rng, dim)
        G = generator_matrix(C)
        T = conjugate(G, upper_nonneg(rng, dim))
        v = random_cone_vector(rng, C.generators)
        return TheoremInstance(C, T, tuple(v), r=max(dim - 1, 0), family=kind)
    if kind == "nilpotent-rejection":
        C = cone if cone is not None else four_ray_cone()
        d = C.ambient_dim
        for _ in range(budget):
            hit = _nilpotent_draw(rng, C, d, entry_bound)
            if hit is not None:
                return hit
        return None
    if kind == "soc-random":
        n = max(dim, 2)
        c = Fraction(rng.choice([1, 1, 2, 3]), rng.choice([1, 2]))
        T = LinearMap(ex.mat_scale(c, random_lorentz(rng, n)))
        return TheoremInstance(SecondOrder(n), T, tuple(random_soc_vector(rng, n)), r=1, lam=c, family=kind)
    if kind == "psd-congruence":
        k = max(1, min(dim, 4))
        L = unipotent_factor(rng, k) if k > 1 else (ex.identity(1), ex.zeros(1))
        T = congruence_map(L, "complex")
        v = random_psd_coords(rng, k, "complex")
        return TheoremInstance(Psd(k, "complex"), T, tuple(v), r=2 * (k - 1), family=kind)
    raise ValueError(f"unknown instance kind {kind!r}; expected one of {KINDS}")


def _nilpotent_draw(rng, C: PolyhedralV, d: int, bound: int) -> TheoremInstance | None:
    N = [[Fraction(rng.randint(-bound, bound)) if j > i else Fraction(0) for j in range(d)] for i in range(d)]
    T = LinearMap(ex.mat_add(ex.identity(d), N))
    v = rng.choice(C.generators)
    if not exactly_certified(is_positive(T, C)):
        return None
    return TheoremInstance(C, T, tuple(v), r=d - 1, family="nilpotent-rejection")


def nilpotent_rejection_draws(cone: PolyhedralV, seed: int, draws: int, entry_bound: int = 1):
    """Every accepted draw among the first ``draws`` of the rejection sampler."""
    rng = trial_rng(seed, 0, "nilpotent-rejection")
    out = []
    for _ in range(draws):
        hit = _nilpotent_draw(rng, cone, cone.ambient_dim, entry_bound)
        if hit is not None:
            out.append(hit)
    return out


def cone_pool(seed: int) -> list[PolyhedralV]:
    """Fixed polyhedral cones shared by a suite run."""
    rng = trial_rng(seed, 0, "cone-pool")
    pool = [standard_cone(2), standard_cone(3), standard_cone(4), four_ray_cone()]
    pool += [random_simplicial(rng, d) for d in (2, 3, 3, 4)]
    pool += [random_polyhedral(rng, 3, m) for m in (4, 5)]
    pool += [random_polyhedral(rng, 4, 5)]
    return pool


def is_simplicial(cone: PolyhedralV) -> bool:
    return len(cone.generators) == cone.ambient_dim


def positive_map(rng, cone: PolyhedralV) -> LinearMap:
    """A map that is positive on ``cone`` by construction."""
    d = cone.ambient_dim
    if is_simplicial(cone) and rng.random() < 0.6:
        diag = (1, 1, 1, Fraction(1, 2), Fraction(2, 3), Fraction(3, 2))
        M = upper_nonneg(rng, d, diag=diag)
        if rng.random() < 0.3 and d > 1:
            i, j = rng.sample(range(d), 2)
            M[max(i, j)][min(i, j)] = Fraction(rng.randint(0, 1))
        return conjugate(generator_matrix(cone), M)
    c = Fraction(rng.choice([0, 1, 1, 1, 2]), rng.choice([1, 2]))
    M = ex.mat_add(ex.mat_scale(c, ex.identity(d)), rank_one_positive(rng, cone, rng.randint(1, 3)))
    if rng.random() < 0.5:
        N = face_nilpotent(rng, cone)
        if N is not None:
            M = ex.mat_add(ex.identity(d), N) if rng.random() < 0.5 else ex.mat_add(M, N)
    return LinearMap(M)


def four_ray_jordan() -> LinearMap:
    return LinearMap([[1, 1, 0], [0, 1, 1], [0, 0, 1]])


def ice_cream_map(field: str = "complex") -> LinearMap:
    return congruence_map([[1, 1], [0, 1]], field)


def ice_cream3_soc(a: Fraction = Fraction(1)) -> LinearMap:
    """Congruence by ``[[1, a], [0, 1]]`` on real symmetric 2x2 matrices,
    written in second-order cone coordinates of R^3."""
    return soc_conjugate(congruence_map([[1, a], [0, 1]], "real"))


def random_soc_map(rng: random.Random, n: int) -> LinearMap:
    """Mixed corpus for second-order cone positivity: scaled Lorentz maps,
    ice-cream-type parabolic maps, rank-one maps and random matrices."""
    kind = rng.randrange(4)
    if kind == 0:
        return LinearMap(ex.mat_scale(rand_q(rng, 1, 3), random_lorentz(rng, n)))
    if kind == 1 and n in (3, 4):
        field_ = "real" if n == 3 else "complex"
        L = unipotent_factor(rng, 2, field_)
        return soc_conjugate(congruence_map(L[0] if field_ == "real" else L, field_))
    if kind == 2:
        u = random_soc_vector(rng, n)
        w = [rand_q(rng, -2, 2) for _ in range(n)]
        return LinearMap([[ui * wj for wj in w] for ui in u])
    return LinearMap([[rand_q(rng, -3, 3) for _ in range(n)] for _ in range(n)])
