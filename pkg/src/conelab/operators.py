"""Linear maps on cone ambient spaces.

Spectra, exact singleton-spectrum and Jordan-profile tests, positivity of a
map relative to a cone (with certificates or a falsifying ray), order
comparison ``S <= T`` and explicit violation witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact as ex
from . import herm
from .cones import (
    APPROX,
    EXACT,
    Cone,
    DimensionError,
    MembershipVerdict,
    PolyhedralH,
    PolyhedralV,
    Psd,
    SecondOrder,
    membership,
    verdict_to_json,
)
from .kernels import jacobi_eigvalsh, soc_margins

POSITIVE = "positive"
NOT_POSITIVE = "not-positive"
UNKNOWN = "unknown"

DEFAULT_SAMPLES = 10_000


def _is_exact(entries) -> bool:
    return all(isinstance(x, (int, Fraction)) for row in entries for x in row)


@dataclass(frozen=True)
class CongruenceForm:
    """``A -> sum_i L_i^* A L_i`` on ``k x k`` Hermitian coordinates."""

    factors: tuple  # of (re, im) pairs, each a tuple of row tuples
    k: int
    field: str


@dataclass(frozen=True)
class LinearMap:
    matrix: tuple
    congruence: CongruenceForm | None = None

    def __post_init__(self):
        rows = tuple(tuple(x if isinstance(x, (float, Fraction)) else ex.parse_rational(x) for x in r) for r in self.matrix)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise DimensionError("linear map matrix must be square and nonempty")
        object.__setattr__(self, "matrix", rows)

    @property
    def n(self) -> int:
        return len(self.matrix)

    @property
    def exact(self) -> bool:
        return _is_exact(self.matrix)

    def rows(self) -> list[list]:
        return [list(r) for r in self.matrix]

    def as_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.matrix], dtype=np.float64)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        rows = ex.mat_sub(self.rows(), other.rows())
        return LinearMap(rows, congruence=_form_difference(self, other))

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(ex.mat_add(self.rows(), other.rows()))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(ex.mat_mul(self.rows(), other.rows()))

    def power(self, k: int) -> "LinearMap":
        return LinearMap(ex.mat_pow(self.rows(), k))

    def scaled(self, c) -> "LinearMap":
        return LinearMap(ex.mat_scale(c, self.rows()))


def _form_difference(T: LinearMap, S: LinearMap) -> CongruenceForm | None:
    """Congruence form of ``T - S`` when ``S``'s factors (or the identity)
    are among ``T``'s factors; the result is re-verified before use."""
    form = T.congruence
    if form is None:
        return None
    if S.congruence is not None:
        remove = list(S.congruence.factors)
    elif S.matrix == tuple(map(tuple, ex.identity(S.n))):
        k = form.k
        remove = [(tuple(map(tuple, ex.identity(k))), tuple(map(tuple, ex.zeros(k))))]
    else:
        return None
    rest = list(form.factors)
    for f in remove:
        if f not in rest:
            return None
        rest.remove(f)
    if not rest:
        return None
    return CongruenceForm(tuple(rest), form.k, form.field)


def identity_map(n: int) -> LinearMap:
    return LinearMap(ex.identity(n))


def apply(T: LinearMap, v: Sequence) -> list:
    if len(v) != T.n:
        raise DimensionError(f"map acts on R^{T.n}, vector has dimension {len(v)}")
    if T.exact and all(isinstance(x, (int, Fraction)) for x in v):
        return ex.mat_vec(T.rows(), v)
    return [sum(float(a) * float(b) for a, b in zip(row, v)) for row in T.matrix]


# --------------------------------------------------------------------------
# constructions


def lift_two_sided(L: Sequence[Sequence], R: Sequence[Sequence]) -> LinearMap:
    """Matrix of ``A -> L A R`` under column-stacking vec: ``R^T (x) L``."""
    L = ex.as_fraction_matrix(L)
    R = ex.as_fraction_matrix(R)
    if len(L) != len(R) or any(len(r) != len(L) for r in L + R):
        raise DimensionError("L and R must be square of equal size")
    return LinearMap(ex.kron(ex.transpose(R), L))


def vec(A: Sequence[Sequence]) -> list:
    """Column-stacking vectorisation."""
    return [A[i][j] for j in range(len(A[0])) for i in range(len(A))]


def unvec(x: Sequence, k: int) -> list[list]:
    return [[x[j * k + i] for j in range(k)] for i in range(k)]


def _as_cmatrix(L) -> herm.CMatrix:
    if isinstance(L, tuple) and len(L) == 2 and isinstance(L[0][0], (list, tuple)):
        return herm.cmat(L[0], L[1])
    return herm.cmat(L)


def congruence_map(L, field: str = "complex") -> LinearMap:
    """Matrix of ``A -> L^* A L`` on Hermitian coordinates.

    ``L`` is a real matrix or an ``(re, im)`` pair.  With ``field="real"``
    the map acts on real-symmetric coordinates and ``L`` must be real.
    """
    return congruence_sum([L], field)


def congruence_sum(factors: Sequence, field: str = "complex") -> LinearMap:
    cms = [_as_cmatrix(L) for L in factors]
    k = len(cms[0][0])
    if field == "real" and any(not ex.is_zero_matrix(im) for _, im in cms):
        raise ValueError("a real-field congruence needs a real factor")
    dim = herm.herm_dim(k, field)
    cols = []
    for j in range(dim):
        e = [Fraction(int(i == j)) for i in range(dim)]
        b = herm.reconstruct(e, k, field)
        total = [Fraction(0)] * dim
        for Lc in cms:
            img = herm.cmat_mul(herm.cmat_mul(herm.cmat_adjoint(Lc), b), Lc)
            total = ex.vec_add(total, herm.coordinates(img, k, field))
        cols.append(total)
    form = CongruenceForm(tuple((tuple(map(tuple, re)), tuple(map(tuple, im))) for re, im in cms), k, field)
    return LinearMap(ex.transpose(cols), congruence=form)


def soc_conjugate(T: LinearMap) -> LinearMap:
    """Transport a map on 2x2 Hermitian coordinates (dim 3 or 4) to the
    second-order cone coordinates."""
    P = herm.soc_matrix(T.n)
    return LinearMap(ex.mat_mul(ex.mat_mul(P, T.rows()), ex.inverse(P)))


# --------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple
    exact_singleton: tuple | None
    residual: float


def charpoly(T: LinearMap) -> list[Fraction]:
    """Characteristic polynomial ``det(x I - T)``, highest degree first.

    Faddeev-LeVerrier on the integer matrix ``d T`` (``d`` the common
    denominator), where every division is exact; coefficients are then
    rescaled by powers of ``d``.
    """
    A = T.rows()
    n = T.n
    d = math.lcm(*(Fraction(x).denominator for row in A for x in row))
    B = [[int(x * d) for x in row] for row in A]
    coeffs = [1]
    M = [[0] * n for _ in range(n)]
    c = 1
    for k in range(1, n + 1):
        cols = list(zip(*M))
        M = [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in B]
        for i in range(n):
            M[i][i] += c
        trace = sum(sum(B[i][j] * M[j][i] for j in range(n)) for i in range(n))
        c = -trace // k
        coeffs.append(c)
    return [Fraction(c, d**k) for k, c in enumerate(coeffs)]


def _poly_trim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _poly_divmod(a, b):
    a = list(a)
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    return q or [Fraction(0)], _poly_trim(a or [Fraction(0)])


def _poly_gcd(a, b):
    a, b = _poly_trim(a), _poly_trim(b)
    while not (len(b) == 1 and b[0] == 0):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return [x / a[0] for x in a]


def _poly_deriv(p):
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])] or [Fraction(0)]


def _poly_sub(a, b):
    size = max(len(a), len(b))
    a = [Fraction(0)] * (size - len(a)) + list(a)
    b = [Fraction(0)] * (size - len(b)) + list(b)
    return _poly_trim([x - y for x, y in zip(a, b)])


def squarefree_factors(p) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: ``p = prod a_i^i`` with square-free monic ``a_i``."""
    out = []
    dp = _poly_deriv(p)
    g = _poly_gcd(p, dp)
    b, _ = _poly_divmod(p, g)
    c, _ = _poly_divmod(dp, g)
    d = _poly_sub(c, _poly_deriv(b))
    i = 1
    while len(b) > 1:
        a = _poly_gcd(b, d)
        if len(a) > 1:
            out.append(([x / a[0] for x in a], i))
        b, _ = _poly_divmod(b, a)
        c, _ = _poly_divmod(d, a)
        d = _poly_sub(c, _poly_deriv(b))
        i += 1
    return out


def _poly_eval(p, x):
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


def _roots(poly) -> list:
    """Roots of a square-free rational polynomial; rational roots are
    recovered exactly and returned as ``Fraction``."""
    if len(poly) == 2:
        return [-poly[1] / poly[0]]
    out = []
    for r in np.roots([float(x) for x in poly]):
        r = complex(r)
        if abs(r.imag) < 1e-7:
            q = Fraction(r.real).limit_denominator(10**6)
            if _poly_eval(poly, q) == 0:
                out.append(q)
                continue
        out.append(r)
    return out


def spectrum(T: LinearMap, lam=None) -> SpectrumReport:
    """Eigenvalues with multiplicity; ``lam`` adds the exact singleton test."""
    if T.n > 16:
        raise ValueError("spectrum supports n <= 16")
    if T.exact:
        eig: list[complex] = []
        for factor, mult in squarefree_factors(charpoly(T)):
            for r in _roots(factor):
                eig.extend([complex(r)] * mult)
    else:
        eig = [complex(x) for x in np.linalg.eigvals(T.as_float())]
    eig.sort(key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    A = T.as_float().astype(complex)
    eye = np.eye(T.n)
    residual = max((abs(np.linalg.det(A - z * eye)) for z in eig), default=0.0)
    singleton = None
    if lam is not None:
        singleton = (Fraction(lam), is_spectrum_singleton(T, lam))
    return SpectrumReport(tuple(eig), singleton, float(residual))


def _shifted(T: LinearMap, lam) -> list[list[Fraction]]:
    if not T.exact:
        raise ex.NotRationalError("exact spectral tests need rational matrix entries")
    lam = ex.parse_rational(lam)
    A = T.rows()
    for i in range(T.n):
        A[i][i] -= lam
    return A


def is_spectrum_singleton(T: LinearMap, lam=1) -> bool:
    """``sigma(T) = {lam}`` decided exactly as nilpotency of ``T - lam``."""
    return ex.is_zero_matrix(ex.mat_pow(_shifted(T, lam), T.n))


@dataclass(frozen=True)
class JordanProfile:
    lam: Fraction
    rank_sequence: tuple
    block_sizes: tuple

    @property
    def largest_block(self) -> int:
        return max(self.block_sizes, default=0)

    @property
    def algebraic_multiplicity(self) -> int:
        return sum(self.block_sizes)


def blocks_from_ranks(ranks: Sequence[int]) -> tuple[int, ...]:
    """Jordan block sizes from ``rank (T - lam)^k``, ``k = 0..n``."""
    n = len(ranks) - 1
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, n + 1)] + [0]
    sizes = []
    for k in range(1, n + 1):
        sizes += [k] * (at_least[k - 1] - at_least[k])
    return tuple(sorted(sizes, reverse=True))


def jordan_profile(T: LinearMap, lam=1) -> JordanProfile:
    N = _shifted(T, lam)
    ranks = [T.n]
    P = ex.identity(T.n)
    for _ in range(T.n):
        P = ex.mat_mul(P, N)
        ranks.append(ex.rank(P))
    return JordanProfile(Fraction(lam), tuple(ranks), blocks_from_ranks(ranks))


def nilpotency_index(T: LinearMap, lam=1) -> int | None:
    N = _shifted(T, lam)
    P = ex.identity(T.n)
    for k in range(T.n + 1):
        if ex.is_zero_matrix(P):
            return k
        P = ex.mat_mul(P, N)
    return None


def growth_exponent(T: LinearMap, exponents: Sequence[int] = range(4, 11)) -> float:
    """Least-squares slope of ``log |T^n|_F`` against ``log n`` for
    ``n = 2^e``."""
    ns = [2**e for e in exponents]
    A = T.rows()
    norms = []
    for n in ns:
        P = ex.mat_pow(A, n)
        norms.append(math.sqrt(float(sum(x * x for row in P for x in row))))
    slope, _ = np.polyfit(np.log(ns), np.log(norms), 1)
    return float(slope)


def m_isometry_order(L, m_max: int) -> int | None:
    """Smallest ``m <= m_max`` with ``(id - T)^m I = 0`` for ``T A = L^* A L``."""
    Lc = _as_cmatrix(L)
    k = len(Lc[0])
    if k > 4:
        raise ValueError("m_isometry_order supports k <= 4")
    Ladj = herm.cmat_adjoint(Lc)
    X = herm.cmat_identity(k)
    for m in range(1, m_max + 1):
        X = herm.cmat_sub(X, herm.cmat_mul(herm.cmat_mul(Ladj, X), Lc))
        if herm.cmat_is_zero(X):
            return m
    return None


# --------------------------------------------------------------------------
# positivity


@dataclass(frozen=True)
class GeneratorCheck:
    images: tuple  # of (generator, image, MembershipVerdict)


@dataclass(frozen=True)
class MuCertificate:
    mu: float | Fraction
    floor: float
    exact: bool
    e1_image: MembershipVerdict


@dataclass(frozen=True)
class RankOneCertificate:
    """``T = u w^T`` with ``u`` in the cone and ``w`` in the dual cone."""

    u: tuple
    w: tuple
    u_verdict: MembershipVerdict
    w_verdict: MembershipVerdict


@dataclass(frozen=True)
class CounterexampleRay:
    v: tuple
    v_verdict: MembershipVerdict
    image: tuple
    image_verdict: MembershipVerdict


@dataclass(frozen=True)
class PositivityVerdict:
    status: str
    method: str
    certificate: object = None
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def positive(self) -> bool:
        return self.status == POSITIVE


def is_positive(
    T: LinearMap,
    cone: Cone,
    *,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    mu_max: float | None = None,
    mode: str | None = None,
    tol: float = 1e-9,
) -> PositivityVerdict:
    """Decide or certify ``T(cone) subset cone``.

    Polyhedral cones are decided completely.  Second-order cones get a
    multiplier certificate or a sampled counterexample; PSD cones are
    certified only for maps carrying a congruence form.  When no certificate
    and no counterexample is found the status is ``"unknown"``.
    """
    if T.n != cone.ambient_dim:
        raise DimensionError(f"map acts on R^{T.n}, cone lives in R^{cone.ambient_dim}")
    mode = mode or (EXACT if T.exact else APPROX)
    if isinstance(cone, PolyhedralH):
        cone = cone.v_cone
    if isinstance(cone, PolyhedralV):
        return _positive_polyhedral(T, cone, mode, tol)
    if isinstance(cone, SecondOrder):
        return _positive_soc(T, cone, seed, samples, mu_max, mode, tol)
    return _positive_psd(T, cone, seed, samples, mode, tol)


def _positive_polyhedral(T, cone: PolyhedralV, mode, tol) -> PositivityVerdict:
    images = []
    for g in cone.generators_list():
        w = apply(T, g)
        verdict = membership(cone, w, mode, tol)
        if not verdict.inside:
            ray = CounterexampleRay(tuple(g), membership(cone, g, mode, tol), tuple(w), verdict)
            return PositivityVerdict(NOT_POSITIVE, "falsified-by-sample", ray)
        images.append((tuple(g), tuple(w), verdict))
    return PositivityVerdict(POSITIVE, "generator-check", GeneratorCheck(tuple(images)))


# ---- second-order cone


def _lorentz(n: int) -> np.ndarray:
    J = -np.eye(n)
    J[0, 0] = 1.0
    return J


def psd_floor(M) -> float:
    arr = np.ascontiguousarray(np.asarray(M, dtype=np.float64))
    return float(jacobi_eigvalsh(arr)[0])


def _mu_search(T: LinearMap, mu_max: float, resolution: float = 1e-6):
    A = T.as_float()
    n = T.n
    J = _lorentz(n)
    Q = A.T @ J @ A
    Q = (Q + Q.T) / 2

    def f(mu):
        return psd_floor(Q - mu * J)

    lo, hi = 0.0, float(mu_max)
    delta = 1e-9 * (1.0 + hi)
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if f(mid + delta) >= f(mid):
            lo = mid
        else:
            hi = mid
    mu = (lo + hi) / 2
    grid = np.linspace(0.0, float(mu_max), 9)
    vals = [f(m) for m in grid]
    scale = 1e-9 * (1.0 + max(abs(v) for v in vals))
    concave = all(vals[i] >= (vals[i - 1] + vals[i + 1]) / 2 - scale for i in range(1, len(vals) - 1))
    return mu, f(mu), concave, Q, J


def _rational_candidates(mu: float):
    seen = set()
    for d in (1, 2, 3, 4, 8, 10, 16, 100, 1000, 10**4, 10**6):
        q = Fraction(mu).limit_denominator(d)
        if q > 0 and q not in seen:
            seen.add(q)
            yield q


def _exact_mu_ok(T: LinearMap, mu: Fraction) -> bool:
    A = T.rows()
    n = T.n
    J = [[Fraction(0)] * n for _ in range(n)]
    J[0][0] = Fraction(1)
    for i in range(1, n):
        J[i][i] = Fraction(-1)
    Q = ex.mat_mul(ex.mat_mul(ex.transpose(A), J), A)
    return ex.is_psd_exact(ex.mat_sub(Q, ex.mat_scale(mu, J)))


def _positive_soc(T, cone, seed, samples, mu_max, mode, tol) -> PositivityVerdict:
    n = cone.n
    if mu_max is None:
        mu_max = float(np.sum(T.as_float() ** 2))
    mu_max = max(mu_max, 1.0)
    mu, floor, concave, Qf, Jf = _mu_search(T, mu_max)
    meta = {"mu_max": mu_max, "concave_on_grid": concave, "mu_float": mu, "floor_float": floor}
    e1 = [Fraction(int(i == 0)) for i in range(n)]
    exact = T.exact and mode == EXACT
    e1_img = membership(cone, apply(T, e1), mode if T.exact else APPROX, tol)
    if exact:
        rank_one = rank_one_certificate(T, cone)
        if rank_one is not None:
            return PositivityVerdict(POSITIVE, "rank-one", rank_one, meta)
    if e1_img.inside:
        if exact:
            for q in _rational_candidates(mu):
                if _exact_mu_ok(T, q):
                    floor_q = psd_floor(Qf - float(q) * Jf)
                    return PositivityVerdict(POSITIVE, "mu-certificate", MuCertificate(q, floor_q, True, e1_img), meta)
    if e1_img.inside and not exact:
        scale = 1.0 + float(np.sum(T.as_float() ** 2))
        if mu > 1e-9 * scale and floor >= -1e-9 * scale:
            return PositivityVerdict(POSITIVE, "mu-certificate", MuCertificate(mu, floor, False, e1_img), meta)
    ray = soc_falsifier(T, cone, seed=seed, samples=samples, mode=mode, tol=tol)
    if ray is not None:
        return PositivityVerdict(NOT_POSITIVE, "falsified-by-sample", ray, meta)
    return PositivityVerdict(UNKNOWN, "falsified-by-sample", None, meta)


def rank_one_factors(T: LinearMap) -> tuple[list[Fraction], list[Fraction]] | None:
    """Exact ``u, w`` with ``T = u w^T``, or ``None`` if the rank is not one."""
    A = T.rows()
    j = next((j for j in range(T.n) if any(A[i][j] != 0 for i in range(T.n))), None)
    if j is None:
        return None
    u = [A[i][j] for i in range(T.n)]
    p = next(i for i in range(T.n) if u[i] != 0)
    w = [A[p][k] / u[p] for k in range(T.n)]
    if any(A[i][k] != u[i] * w[k] for i in range(T.n) for k in range(T.n)):
        return None
    return u, w


def rank_one_certificate(T: LinearMap, cone: SecondOrder) -> RankOneCertificate | None:
    """The cone is self-dual, so ``u w^T`` is positive iff ``u`` and ``w``
    (after a common sign flip) both lie in it."""
    factors = rank_one_factors(T)
    if factors is None:
        return None
    u, w = factors
    if u[0] < 0:
        u, w = [-x for x in u], [-x for x in w]
    uv, wv = membership(cone, u), membership(cone, w)
    if uv.inside and wv.inside:
        return RankOneCertificate(tuple(u), tuple(w), uv, wv)
    return None


def rational_unit_vector(u: np.ndarray, max_den: int = 10**6) -> list[Fraction]:
    """Exact rational point on the unit sphere near ``u``, through
    stereographic projection from ``-e_last``."""
    u = np.asarray(u, dtype=np.float64)
    u = u / np.linalg.norm(u)
    m = len(u)
    if m == 1:
        return [Fraction(1 if u[0] >= 0 else -1)]
    if u[-1] < -1 + 1e-12:
        return [Fraction(0)] * (m - 1) + [Fraction(-1)]
    s = [Fraction(float(x / (1.0 + u[-1]))).limit_denominator(max_den) for x in u[:-1]]
    s2 = sum(x * x for x in s)
    return [2 * x / (1 + s2) for x in s] + [(1 - s2) / (1 + s2)]


def soc_boundary_rays(n: int, seed: int, count: int) -> np.ndarray:
    """``count`` float boundary rays ``(1, u)`` with ``u`` normalized Gaussian."""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((count, n - 1))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    return np.hstack([np.ones((count, 1)), U])


def soc_falsifier(
    T: LinearMap,
    cone: SecondOrder,
    *,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    mode: str = EXACT,
    tol: float = 1e-9,
    shortlist: int = 32,
) -> CounterexampleRay | None:
    """Search boundary rays ``x`` of the cone with ``T x`` outside.

    Float screening over ``samples`` seeded rays, then exact confirmation
    on rational boundary rays near the worst candidates, then coordinate
    descent on the sphere from the best float candidate.
    """
    n = cone.n
    A = T.as_float()
    exact = T.exact and mode == EXACT
    canon = [np.eye(n)[0]] + [np.eye(n)[0] + s * np.eye(n)[i] for i in range(1, n) for s in (1.0, -1.0)]
    for ray in canon:
        hit = _confirm_soc(T, cone, ray, exact, tol)
        if hit is not None:
            return hit
    rays = soc_boundary_rays(n, seed, samples)
    margins = soc_margins(np.ascontiguousarray(rays @ A.T))
    order = np.argsort(margins, kind="stable")
    for idx in order[:shortlist]:
        if margins[idx] >= 0:
            break
        hit = _confirm_soc(T, cone, rays[idx], exact, tol)
        if hit is not None:
            return hit
    best = rays[order[0]][1:]
    u = _descend(A, best)
    return _confirm_soc(T, cone, np.concatenate([[1.0], u]), exact, tol)


def _descend(A: np.ndarray, u: np.ndarray, steps: int = 200) -> np.ndarray:
    def margin(w):
        w = w / np.linalg.norm(w)
        y = A @ np.concatenate([[1.0], w])
        return y[0] - np.linalg.norm(y[1:])

    best = margin(u)
    step = 0.5
    for _ in range(steps):
        improved = False
        for i in range(len(u)):
            for s in (step, -step):
                w = u.copy()
                w[i] += s
                if np.linalg.norm(w) == 0:
                    continue
                m = margin(w)
                if m < best:
                    u, best, improved = w / np.linalg.norm(w), m, True
        if not improved:
            step /= 2
            if step < 1e-9:
                break
    return u / np.linalg.norm(u)


def _confirm_soc(T, cone, ray: np.ndarray, exact: bool, tol) -> CounterexampleRay | None:
    if exact:
        if all(float(r).is_integer() for r in ray):
            x = [Fraction(int(r)) for r in ray]
        else:
            x = [Fraction(1)] + rational_unit_vector(ray[1:])
        mode = EXACT
    else:
        x = [float(v) for v in ray]
        mode = APPROX
    img = apply(T, x)
    img_v = membership(cone, img, mode, tol)
    if img_v.inside:
        return None
    return CounterexampleRay(tuple(x), membership(cone, x, mode, tol), tuple(img), img_v)


# ---- PSD cone


def _congruence_matches(T: LinearMap, form: CongruenceForm) -> bool:
    ref = congruence_sum([(list(map(list, re)), list(map(list, im))) for re, im in form.factors], form.field)
    return ref.matrix == T.matrix


def four_squares(m: int) -> tuple[int, int, int, int] | None:
    """Integers with ``a^2 + b^2 + c^2 + d^2 == m``; ``None`` past a small search."""
    if m < 0:
        return None
    for a in range(math.isqrt(m), -1, -1):
        ra = m - a * a
        for b in range(min(a, math.isqrt(ra)), -1, -1):
            rb = ra - b * b
            for c in range(min(b, math.isqrt(rb)), -1, -1):
                d2 = rb - c * c
                d = math.isqrt(d2)
                if d * d == d2 and d <= c:
                    return a, b, c, d
        if m - a * a > 3 * a * a:
            break
    return None


def scalar_form(T: LinearMap, cone: Psd) -> CongruenceForm | None:
    """Congruence form for ``T = c * id`` with rational ``c >= 0``.

    ``c = m / q^2`` with ``m = p q``; splitting ``m`` into four squares gives
    ``c A = sum (a_i / q)^2 A``.
    """
    if not T.exact:
        return None
    c = T.matrix[0][0]
    if any(T.matrix[i][j] != (c if i == j else 0) for i in range(T.n) for j in range(T.n)):
        return None
    c = Fraction(c)
    if c < 0 or c.numerator * c.denominator > 10**9:
        return None
    parts = four_squares(c.numerator * c.denominator)
    if parts is None:
        return None
    k = cone.k
    zero = tuple(tuple(Fraction(0) for _ in range(k)) for _ in range(k))
    factors = tuple(
        (tuple(tuple(Fraction(a, c.denominator) if i == j else Fraction(0) for j in range(k)) for i in range(k)), zero)
        for a in parts
        if a
    ) or ((zero, zero),)
    return CongruenceForm(factors, k, cone.field)


def _positive_psd(T, cone: Psd, seed, samples, mode, tol) -> PositivityVerdict:
    form = T.congruence
    if form is None or form.k != cone.k or form.field != cone.field:
        form = scalar_form(T, cone)
    if form is not None and form.k == cone.k and form.field == cone.field and _congruence_matches(T, form):
        return PositivityVerdict(POSITIVE, "congruence-form", form)
    ray = psd_falsifier(T, cone, seed=seed, samples=samples, mode=mode, tol=tol)
    if ray is not None:
        return PositivityVerdict(NOT_POSITIVE, "falsified-by-sample", ray)
    return PositivityVerdict(UNKNOWN, "falsified-by-sample", None)


def psd_canonical_inputs(cone: Psd) -> list[list[Fraction]]:
    """Identity, then the diagonal units ``e_i e_i^*``."""
    dim = cone.ambient_dim
    out = [herm.identity_coords(cone.k, cone.field)]
    for i in range(cone.k):
        out.append([Fraction(int(j == i)) for j in range(dim)])
    return out


def psd_rank_one_inputs(cone: Psd, seed: int, count: int) -> list[list[Fraction]]:
    """Seeded rank-one inputs ``x x^*`` with small-integer ``x``."""
    rng = np.random.default_rng(seed)
    k = cone.k
    out = []
    for _ in range(count):
        xr = [Fraction(int(a)) for a in rng.integers(-3, 4, size=k)]
        xi = [Fraction(int(a)) for a in rng.integers(-3, 4, size=k)] if cone.field == "complex" else [Fraction(0)] * k
        if all(a == 0 for a in xr + xi):
            continue
        out.append(herm.coordinates(herm.outer(xr, xi), k, cone.field))
    return out


def _psd_floors(cone: Psd, images: np.ndarray) -> np.ndarray:
    mats = []
    for y in images:
        a = herm.reconstruct(list(y), cone.k, cone.field)
        m = a[0] if cone.field == "real" else herm.real_embedding(a)
        mats.append(np.array(m, dtype=np.float64))
    return np.linalg.eigvalsh(np.array(mats))[:, 0]


def psd_falsifier(
    T: LinearMap,
    cone: Psd,
    *,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    mode: str = EXACT,
    tol: float = 1e-9,
    shortlist: int = 32,
) -> CounterexampleRay | None:
    exact = T.exact and mode == EXACT
    m = EXACT if exact else APPROX

    def confirm(x):
        x = x if exact else [float(a) for a in x]
        img = apply(T, x)
        img_v = membership(cone, img, m, tol)
        if img_v.inside:
            return None
        return CounterexampleRay(tuple(x), membership(cone, x, m, tol), tuple(img), img_v)

    for x in psd_canonical_inputs(cone):
        hit = confirm(x)
        if hit is not None:
            return hit
    inputs = psd_rank_one_inputs(cone, seed, samples)
    if not inputs:
        return None
    X = np.array([[float(x) for x in v] for v in inputs])
    traces = X[:, : cone.k].sum(axis=1)
    floors = _psd_floors(cone, X @ T.as_float().T) / traces
    order = np.argsort(floors, kind="stable")
    for idx in order[:shortlist]:
        if floors[idx] >= 0:
            break
        hit = confirm(inputs[idx])
        if hit is not None:
            return hit
    return None


# --------------------------------------------------------------------------
# order


@dataclass(frozen=True)
class OrderViolation:
    v: tuple
    v_verdict: MembershipVerdict
    image: tuple
    image_verdict: MembershipVerdict


def order_leq(S: LinearMap, T: LinearMap, cone: Cone, **kwargs) -> PositivityVerdict:
    """``S <= T`` means ``T - S`` is positive."""
    return is_positive(T - S, cone, **kwargs)


def find_violation(
    S: LinearMap,
    T: LinearMap,
    cone: Cone,
    *,
    seed: int = 0,
    samples: int = DEFAULT_SAMPLES,
    tol: float = 1e-9,
) -> OrderViolation | None:
    """A vector ``v`` in the cone with ``(T - S) v`` outside, or ``None``.

    Generators are tried first (polyhedral), or the identity element and
    canonical rays (second-order / PSD), before seeded random rays.
    """
    D = T - S
    if D.n != cone.ambient_dim:
        raise DimensionError(f"maps act on R^{D.n}, cone lives in R^{cone.ambient_dim}")
    mode = EXACT if D.exact else APPROX
    if isinstance(cone, PolyhedralH):
        cone = cone.v_cone
    if isinstance(cone, PolyhedralV):
        verdict = _positive_polyhedral(D, cone, mode, tol)
        ray = verdict.certificate if verdict.status == NOT_POSITIVE else None
    elif isinstance(cone, SecondOrder):
        ray = soc_falsifier(D, cone, seed=seed, samples=samples, mode=mode, tol=tol)
    else:
        ray = psd_falsifier(D, cone, seed=seed, samples=samples, mode=mode, tol=tol)
    if ray is None:
        return None
    return OrderViolation(ray.v, ray.v_verdict, ray.image, ray.image_verdict)


# --------------------------------------------------------------------------
# file format


def _enc(x):
    return ex.format_rational(x) if isinstance(x, (int, Fraction)) else float(x)


def map_to_json(T: LinearMap) -> dict:
    if T.congruence is not None:
        form = T.congruence
        factors = [
            [[[_enc(a), _enc(b)] for a, b in zip(rr, ir)] for rr, ir in zip(re, im)] for re, im in form.factors
        ]
        doc = {"kind": "congruence", "field": form.field}
        if len(factors) == 1:
            doc["L"] = factors[0]
        else:
            doc["factors"] = factors
        return doc
    return {"matrix": [[_enc(x) for x in row] for row in T.matrix]}


def _parse_entry(x, mode):
    if isinstance(x, list):
        if len(x) != 2:
            raise ValueError(f"complex entry must be [re, im], got {x!r}")
        return _parse_entry(x[0], mode), _parse_entry(x[1], mode)
    if mode == EXACT:
        return ex.parse_rational(x)
    return float(Fraction(x)) if isinstance(x, str) else float(x)


def _parse_complex_matrix(rows, mode) -> herm.CMatrix:
    re, im = [], []
    for row in rows:
        rr, ir = [], []
        for x in row:
            e = _parse_entry(x, mode)
            if isinstance(e, tuple):
                rr.append(e[0])
                ir.append(e[1])
            else:
                rr.append(e)
                ir.append(Fraction(0))
        re.append(rr)
        im.append(ir)
    return re, im


def map_from_json(doc: dict, mode: str = EXACT) -> LinearMap:
    kind = doc.get("kind", "matrix")
    if kind == "congruence":
        field_ = doc.get("field", "complex")
        raw = doc["factors"] if "factors" in doc else [doc["L"]]
        return congruence_sum([_parse_complex_matrix(L, EXACT) for L in raw], field_)
    if kind == "two-sided":
        return lift_two_sided(ex.as_fraction_matrix(doc["L"]), ex.as_fraction_matrix(doc["R"]))
    if kind == "matrix":
        rows = [[_parse_entry(x, mode) for x in row] for row in doc["matrix"]]
        return LinearMap(rows)
    raise ValueError(f"unknown map kind {kind!r}")


def _vec(v) -> list:
    return [_enc(x) for x in v]


def _meta(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, Fraction)):
        return ex.format_rational(x)
    return float(x)


def positivity_to_json(verdict: PositivityVerdict) -> dict:
    cert = verdict.certificate
    if isinstance(cert, GeneratorCheck):
        body = {
            "kind": "generator-check",
            "images": [
                {"generator": _vec(g), "image": _vec(w), "verdict": verdict_to_json(vd)} for g, w, vd in cert.images
            ],
        }
    elif isinstance(cert, MuCertificate):
        body = {
            "kind": "mu",
            "mu": _enc(cert.mu),
            "floor": float(cert.floor),
            "exact": cert.exact,
            "e1_image": verdict_to_json(cert.e1_image),
        }
    elif isinstance(cert, RankOneCertificate):
        body = {
            "kind": "rank-one",
            "u": _vec(cert.u),
            "w": _vec(cert.w),
            "u_verdict": verdict_to_json(cert.u_verdict),
            "w_verdict": verdict_to_json(cert.w_verdict),
        }
    elif isinstance(cert, CounterexampleRay):
        body = {"kind": "ray", **violation_to_json(cert)}
    elif isinstance(cert, CongruenceForm):
        factors = [(list(map(list, re)), list(map(list, im))) for re, im in cert.factors]
        body = {"kind": "congruence", **map_to_json(congruence_sum(factors, cert.field))}
    else:
        body = None
    return {
        "status": verdict.status,
        "method": verdict.method,
        "certificate": body,
        "metadata": {k: _meta(v) for k, v in sorted(verdict.metadata.items())},
    }


def violation_to_json(violation: OrderViolation | CounterexampleRay) -> dict:
    return {
        "v": _vec(violation.v),
        "v_verdict": verdict_to_json(violation.v_verdict),
        "image": _vec(violation.image),
        "image_verdict": verdict_to_json(violation.image_verdict),
    }


def jordan_to_json(profile: JordanProfile) -> dict:
    return {
        "lambda": _enc(profile.lam),
        "rank_sequence": list(profile.rank_sequence),
        "block_sizes": list(profile.block_sizes),
        "largest_block": profile.largest_block,
    }


def spectrum_to_json(report: SpectrumReport) -> dict:
    def enc(z: complex):
        return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]

    doc = {"eigenvalues": [enc(z) for z in report.eigenvalues], "residual": float(report.residual)}
    if report.exact_singleton is not None:
        lam, holds = report.exact_singleton
        doc["singleton"] = {"lambda": _enc(lam), "holds": holds}
    return doc


def match_spectra(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest distance under the optimal one-to-one matching of two
    eigenvalue multisets of equal size."""
    from scipy.optimize import linear_sum_assignment

    if len(a) != len(b):
        raise ValueError("multisets differ in size")
    if not a:
        return 0.0
    cost = np.abs(np.subtract.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)))
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def product_law_deviation(L: Sequence[Sequence], R: Sequence[Sequence]) -> float:
    """Deviation between ``spectrum(lift(L, R))`` and ``spectrum(L) * spectrum(R)``."""
    lifted = spectrum(lift_two_sided(L, R)).eigenvalues
    left = spectrum(LinearMap(L)).eigenvalues
    right = spectrum(LinearMap(R)).eigenvalues
    return match_spectra(lifted, [x * y for x in left for y in right])
