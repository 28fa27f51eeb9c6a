"""Cones in R^n, membership with checkable certificates, polyhedral duality.

Four cone variants are supported:

* ``PolyhedralV`` -- the conic hull of finitely many generators,
* ``PolyhedralH`` -- ``{x : <y, x> >= 0 for every row y}``,
* ``SecondOrder`` -- ``{x : x_1 >= |(x_2, ..., x_n)|}``,
* ``Psd`` -- positive semidefinite matrices in the coordinates of
  :mod:`conelab.herm`.

Polyhedral work is done in exact rational arithmetic.  Duals are computed by
the double description method, so every "outside" verdict on a polyhedral
cone carries a dual vector ``y`` with ``<y, g> >= 0`` on every generator and
``<y, v> < 0``.
"""

from __future__ import annotations

import contextlib
import contextvars
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence, Union

import numpy as np

from . import exact as ex
from . import herm
from .kernels import jacobi_eigvalsh

EXACT = "exact"
APPROX = "approx"


class DimensionError(ValueError):
    """Vector or map dimension does not match the cone."""


class ConeError(ValueError):
    """Invalid cone data (zero generator, non-pointed cone, ...)."""


# --------------------------------------------------------------------------
# double description


def _orthogonal_basis(vectors: list[list[Fraction]]) -> list[list[Fraction]]:
    basis: list[list[Fraction]] = []
    for v in vectors:
        w = list(v)
        for b in basis:
            w = ex.vec_sub(w, ex.vec_scale(ex.dot(w, b) / ex.dot(b, b), b))
        if not ex.is_zero_vector(w):
            basis.append(w)
    return basis


def _project_out(v: list[Fraction], ortho: list[list[Fraction]]) -> list[Fraction]:
    for b in ortho:
        c = ex.dot(v, b)
        if c:
            v = ex.vec_sub(v, ex.vec_scale(c / ex.dot(b, b), b))
    return v


def double_description(rows: Sequence[Sequence], dim: int) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Generators of ``{x in Q^dim : <a, x> >= 0 for a in rows}``.

    Returns ``(rays, lineality)``: the cone is ``cone(rays) + span(lineality)``.
    Rays are primitive integer vectors orthogonal to the lineality space and
    each is extreme modulo lineality.
    """
    rows = [ex.as_fraction_vector(a) for a in rows]
    lin = ex.identity(dim)
    rays: list[list[Fraction]] = []
    processed: list[list[Fraction]] = []
    for a in rows:
        if ex.is_zero_vector(a):
            continue
        lin_vals = [ex.dot(a, l) for l in lin]
        k = next((i for i, s in enumerate(lin_vals) if s != 0), None)
        if k is not None:
            l0 = lin[k]
            s0 = lin_vals[k]
            if s0 < 0:
                l0, s0 = ex.vec_scale(-1, l0), -s0
            lin = [ex.vec_sub(l, ex.vec_scale(s / s0, l0)) for i, (l, s) in enumerate(zip(lin, lin_vals)) if i != k]
            rays = [ex.vec_sub(r, ex.vec_scale(ex.dot(a, r) / s0, l0)) for r in rays] + [l0]
        else:
            pos, zero, neg = [], [], []
            for r in rays:
                s = ex.dot(a, r)
                (pos if s > 0 else neg if s < 0 else zero).append((r, s))
            combined = [
                ex.vec_sub(ex.vec_scale(sp, rn), ex.vec_scale(sn, rp)) for rp, sp in pos for rn, sn in neg
            ]
            rays = [r for r, _ in pos] + [r for r, _ in zero] + combined
        processed.append(a)
        rays = _prune(rays, processed, lin, dim)
    ortho = _orthogonal_basis(lin)
    lin_out = [ex.primitive(l) for l in ortho]
    return rays, lin_out


def _prune(rays, processed, lin, dim):
    ortho = _orthogonal_basis(lin)
    target = dim - len(ortho) - 1
    seen = set()
    out = []
    for r in rays:
        r = ex.primitive(_project_out(r, ortho))
        if ex.is_zero_vector(r):
            continue
        key = tuple(r)
        if key in seen:
            continue
        seen.add(key)
        tight = [a for a in processed if ex.dot(a, r) == 0]
        if (ex.rank(tight) if tight else 0) == target:
            out.append(r)
    return out


# --------------------------------------------------------------------------
# cone variants


def _freeze(vectors) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(ex.parse_rational(x) for x in v) for v in vectors)


@dataclass(frozen=True)
class PolyhedralV:
    generators: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        gens = _freeze(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ConeError("a polyhedral cone needs at least one generator")
        dims = {len(g) for g in gens}
        if len(dims) != 1:
            raise DimensionError(f"generators have mixed dimensions {sorted(dims)}")
        if any(all(x == 0 for x in g) for g in gens):
            raise ConeError("generators must be nonzero")
        if ex.rank([list(f) for f in self.facets]) != self.ambient_dim:
            raise ConeError("cone is not pointed (contains a line)")

    @property
    def ambient_dim(self) -> int:
        return len(self.generators[0])

    @property
    def kind(self) -> str:
        return "polyhedral-v"

    @cached_property
    def facets(self) -> tuple[tuple[Fraction, ...], ...]:
        """Generators of the dual cone (lineality directions as +/- pairs)."""
        rays, lin = double_description(self.generators, self.ambient_dim)
        out = [tuple(r) for r in rays]
        for l in lin:
            out += [tuple(l), tuple(-x for x in l)]
        return tuple(out)

    @cached_property
    def _bases(self):
        """Linearly independent generator subsets of full rank with a
        left inverse, in lexicographic order of generator indices."""
        gens = [list(g) for g in self.generators]
        r = ex.rank(gens)
        out = []
        for idx in itertools.combinations(range(len(gens)), r):
            cols = [gens[i] for i in idx]
            b = ex.transpose(cols)
            _, pivot_rows = ex.rref(cols)
            if len(pivot_rows) != r:
                continue
            sub = [b[i] for i in pivot_rows]
            out.append((idx, pivot_rows, ex.inverse(sub)))
        return out

    def generators_list(self) -> list[list[Fraction]]:
        return [list(g) for g in self.generators]


@dataclass(frozen=True)
class PolyhedralH:
    inequalities: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = _freeze(self.inequalities)
        object.__setattr__(self, "inequalities", rows)
        if not rows:
            raise ConeError("an H-cone needs at least one inequality")
        dims = {len(r) for r in rows}
        if len(dims) != 1:
            raise DimensionError(f"inequalities have mixed dimensions {sorted(dims)}")
        if any(all(x == 0 for x in r) for r in rows):
            raise ConeError("inequality rows must be nonzero")
        if ex.rank([list(r) for r in rows]) != self.ambient_dim:
            raise ConeError("cone is not pointed (contains a line)")

    @property
    def ambient_dim(self) -> int:
        return len(self.inequalities[0])

    @property
    def kind(self) -> str:
        return "polyhedral-h"

    @cached_property
    def v_cone(self) -> PolyhedralV:
        return h_to_v(self)


@dataclass(frozen=True)
class SecondOrder:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ConeError("second-order cone needs ambient dimension >= 2")

    @property
    def ambient_dim(self) -> int:
        return self.n

    @property
    def kind(self) -> str:
        return "soc"


@dataclass(frozen=True)
class Psd:
    k: int
    field: str = "real"

    def __post_init__(self):
        if self.field not in ("real", "complex"):
            raise ConeError(f"unknown field {self.field!r}")
        if self.k < 1 or (self.field == "complex" and self.k > 4) or self.ambient_dim > 16:
            raise ConeError(f"unsupported PSD cone size k={self.k} ({self.field})")

    @property
    def ambient_dim(self) -> int:
        return herm.herm_dim(self.k, self.field)

    @property
    def kind(self) -> str:
        return "psd"


Cone = Union[PolyhedralV, PolyhedralH, SecondOrder, Psd]


def standard_cone(d: int) -> PolyhedralV:
    return PolyhedralV(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))


def four_ray_cone() -> PolyhedralV:
    """Cone in R^3 spanned by e1, e2, e3 and (1, -1, 1)."""
    return PolyhedralV(((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -1, 1)))


def simplicial_cone(columns: Sequence[Sequence]) -> PolyhedralV:
    return PolyhedralV(tuple(tuple(c) for c in columns))


# --------------------------------------------------------------------------
# duality and conversion


def dual_generators(cone: Cone) -> list[list[Fraction]]:
    """Vectors generating ``{y : <y, x> >= 0 for all x in cone}``."""
    if isinstance(cone, PolyhedralV):
        return [list(f) for f in cone.facets]
    if isinstance(cone, PolyhedralH):
        out, seen = [], set()
        for r in cone.inequalities:
            p = tuple(ex.primitive(r))
            if p not in seen:
                seen.add(p)
                out.append(list(p))
        return out
    raise TypeError(f"dual generators need a polyhedral cone, got {type(cone).__name__}")


def v_to_h(cone: PolyhedralV) -> PolyhedralH:
    if not isinstance(cone, PolyhedralV):
        raise TypeError("v_to_h expects a PolyhedralV cone")
    return PolyhedralH(tuple(cone.facets))


def h_to_v(cone: PolyhedralH) -> PolyhedralV:
    if not isinstance(cone, PolyhedralH):
        raise TypeError("h_to_v expects a PolyhedralH cone")
    rays, lin = double_description(cone.inequalities, cone.ambient_dim)
    if lin:
        raise ConeError("cone is not pointed (contains a line)")
    if not rays:
        raise ConeError("degenerate H-cone: only the origin")
    return PolyhedralV(tuple(tuple(r) for r in rays))


# --------------------------------------------------------------------------
# certificates and verdicts


@dataclass(frozen=True)
class Coeffs:
    c: tuple


@dataclass(frozen=True)
class Farkas:
    y: tuple


@dataclass(frozen=True)
class EigenFloor:
    lam_min: float | Fraction
    exact: bool = False


@dataclass(frozen=True)
class SocMargin:
    m: float | Fraction


Certificate = Union[Coeffs, Farkas, EigenFloor, SocMargin]


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    margin: float | Fraction
    certificate: Certificate
    mode: str = EXACT


_RECORDER: contextvars.ContextVar[list | None] = contextvars.ContextVar("conelab_recorder", default=None)


@contextlib.contextmanager
def recording() -> Iterator[list]:
    """Collect ``(cone, v, verdict)`` for every membership decision made
    inside the block."""
    log: list = []
    token = _RECORDER.set(log)
    try:
        yield log
    finally:
        _RECORDER.reset(token)


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _check_dim(cone: Cone, v: Sequence) -> None:
    if len(v) != cone.ambient_dim:
        raise DimensionError(f"vector has dimension {len(v)}, cone lives in R^{cone.ambient_dim}")


def membership(cone: Cone, v: Sequence, mode: str = EXACT, tol: float = 1e-9) -> MembershipVerdict:
    """Decide ``v in cone`` and return a certificate for the answer."""
    _check_dim(cone, v)
    if mode not in (EXACT, APPROX):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == EXACT:
        v = ex.as_fraction_vector(v)
    else:
        v = [float(x) for x in v]
    if isinstance(cone, PolyhedralH):
        verdict = _polyhedral(cone.v_cone, v, mode, tol)
    elif isinstance(cone, PolyhedralV):
        verdict = _polyhedral(cone, v, mode, tol)
    elif isinstance(cone, SecondOrder):
        verdict = _soc(v, mode, tol)
    else:
        verdict = _psd(cone, v, mode, tol)
    log = _RECORDER.get()
    if log is not None:
        log.append((cone, tuple(v), verdict))
    return verdict


def _coeffs(cone: PolyhedralV, v: list[Fraction]) -> tuple[Fraction, ...] | None:
    """Nonnegative generator weights for ``v``, tried basis by basis.

    Only called once the dual test has put ``v`` in the cone, hence in the
    span of every basis.
    """
    ngen = len(cone.generators)
    for idx, rows, inv in cone._bases:
        sub = [v[i] for i in rows]
        c = []
        for row in inv:
            x = sum((a * b for a, b in zip(row, sub)), Fraction(0))
            if x < 0:
                break
            c.append(x)
        else:
            full = [Fraction(0)] * ngen
            for i, ci in zip(idx, c):
                full[i] = ci
            return tuple(full)
    return None


def _polyhedral(cone: PolyhedralV, v, mode: str, tol: float) -> MembershipVerdict:
    q = v if mode == EXACT else [Fraction(x) for x in v]
    vals = [ex.dot(f, q) for f in cone.facets]
    worst = min(range(len(vals)), key=lambda i: vals[i])
    if mode == EXACT:
        if vals[worst] < 0:
            return MembershipVerdict(False, vals[worst], Farkas(cone.facets[worst]), mode)
        c = _coeffs(cone, q)
        assert c is not None, "dual test and primal decomposition disagree"
        return MembershipVerdict(True, vals[worst], Coeffs(c), mode)
    scaled = [float(val) / math.sqrt(sum(float(x) ** 2 for x in f)) for val, f in zip(vals, cone.facets)]
    worst = min(range(len(scaled)), key=lambda i: scaled[i])
    margin = scaled[worst]
    if margin < -tol:
        return MembershipVerdict(False, margin, Farkas(cone.facets[worst]), mode)
    c = _coeffs(cone, q) if vals[worst] >= 0 else None
    if c is None:
        c = _nearest_coeffs(cone, q)
    return MembershipVerdict(True, margin, Coeffs(tuple(float(x) for x in c)), mode)


def _nearest_coeffs(cone: PolyhedralV, q):
    best, best_neg = None, None
    for idx, rows, inv in cone._bases:
        c = ex.mat_vec(inv, [q[i] for i in rows])
        neg = -sum(x for x in c if x < 0)
        if best is None or neg < best_neg:
            best, best_neg = (idx, c), neg
    idx, c = best
    full = [0.0] * len(cone.generators)
    for i, ci in zip(idx, c):
        full[i] = max(float(ci), 0.0)
    return full


def _soc(v, mode: str, tol: float) -> MembershipVerdict:
    head, rest = v[0], v[1:]
    sq = sum((x * x for x in rest), 0 * head)
    if mode == EXACT:
        inside = head >= 0 and head * head >= sq
        root = _rational_sqrt(sq)
        margin = head - root if root is not None else float(head) - math.sqrt(sq)
        return MembershipVerdict(inside, margin, SocMargin(margin), mode)
    margin = head - math.sqrt(sq)
    return MembershipVerdict(margin >= -tol, margin, SocMargin(margin), mode)


def _psd_floor(cone: Psd, v) -> float:
    a = herm.reconstruct(v, cone.k, cone.field)
    m = a[0] if cone.field == "real" else herm.real_embedding(a)
    arr = np.array([[float(x) for x in row] for row in m], dtype=np.float64)
    return float(jacobi_eigvalsh(arr)[0])


def _psd(cone: Psd, v, mode: str, tol: float) -> MembershipVerdict:
    if mode == EXACT:
        re, im = herm.reconstruct(v, cone.k, cone.field)
        if cone.k == 2:
            tr = re[0][0] + re[1][1]
            det = re[0][0] * re[1][1] - re[0][1] ** 2 - im[0][1] ** 2
            inside = tr >= 0 and det >= 0
            root = _rational_sqrt(tr * tr - 4 * det)
            if root is not None:
                lam = (tr - root) / 2
                return MembershipVerdict(inside, lam, EigenFloor(lam, exact=True), mode)
        elif cone.k == 1:
            lam = re[0][0]
            return MembershipVerdict(lam >= 0, lam, EigenFloor(lam, exact=True), mode)
        else:
            m = re if cone.field == "real" else herm.real_embedding((re, im))
            inside = ex.is_psd_exact(m)
        lam = _psd_floor(cone, v)
        return MembershipVerdict(inside, lam, EigenFloor(lam, exact=False), mode)
    lam = _psd_floor(cone, v)
    return MembershipVerdict(lam >= -tol, lam, EigenFloor(lam), mode)


def verify_verdict(cone: Cone, v: Sequence, verdict: MembershipVerdict, tol: float = 1e-9) -> bool:
    """Re-check a verdict's certificate from scratch."""
    cert = verdict.certificate
    if isinstance(cone, (PolyhedralV, PolyhedralH)):
        gens = cone.generators_list() if isinstance(cone, PolyhedralV) else cone.v_cone.generators_list()
        if isinstance(cert, Coeffs):
            if not verdict.inside or len(cert.c) != len(gens) or any(c < 0 for c in cert.c):
                return False
            combo = [sum(c * g[i] for c, g in zip(cert.c, gens)) for i in range(len(v))]
            if verdict.mode == EXACT:
                return combo == list(ex.as_fraction_vector(v))
            return max(abs(float(a) - float(b)) for a, b in zip(combo, v)) <= 1e3 * tol * (1 + max(abs(float(x)) for x in v))
        if isinstance(cert, Farkas):
            y = cert.y
            q = [Fraction(x) for x in v]
            return (not verdict.inside) and all(ex.dot(y, g) >= 0 for g in gens) and ex.dot(y, q) < 0
        return False
    if isinstance(cone, SecondOrder):
        if not isinstance(cert, SocMargin):
            return False
        head, rest = v[0], v[1:]
        sq = sum(x * x for x in rest)
        if verdict.mode == EXACT:
            q = ex.as_fraction_vector(v)
            inside = q[0] >= 0 and q[0] ** 2 >= sum(x * x for x in q[1:])
        else:
            inside = float(head) - math.sqrt(float(sq)) >= -tol
        recomputed = float(head) - math.sqrt(float(sq))
        return inside == verdict.inside and abs(recomputed - float(cert.m)) <= 1e-9 * (1 + abs(recomputed))
    if isinstance(cone, Psd):
        if not isinstance(cert, EigenFloor):
            return False
        if verdict.mode == EXACT:
            re, im = herm.reconstruct(ex.as_fraction_vector(v), cone.k, cone.field)
            m = re if cone.field == "real" else herm.real_embedding((re, im))
            inside = ex.is_psd_exact(m)
        else:
            inside = _psd_floor(cone, v) >= -tol
        floor = _psd_floor(cone, [float(x) for x in v])
        return inside == verdict.inside and abs(floor - float(cert.lam_min)) <= 1e-7 * (1 + abs(floor))
    return False


def recheck(records: Sequence) -> list:
    """Independent re-check of recorded verdicts; returns the discrepancies."""
    bad = []
    for cone, v, verdict in records:
        again = membership(cone, v, mode=verdict.mode)
        if again.inside != verdict.inside or not verify_verdict(cone, v, verdict):
            bad.append((cone, v, verdict))
    return bad


# --------------------------------------------------------------------------
# file format


def cone_to_json(cone: Cone) -> dict:
    if isinstance(cone, PolyhedralV):
        return {"kind": "polyhedral-v", "generators": [[ex.format_rational(x) for x in g] for g in cone.generators]}
    if isinstance(cone, PolyhedralH):
        return {"kind": "polyhedral-h", "inequalities": [[ex.format_rational(x) for x in r] for r in cone.inequalities]}
    if isinstance(cone, SecondOrder):
        return {"kind": "soc", "dim": cone.n}
    return {"kind": "psd", "k": cone.k, "field": cone.field}


def cone_from_json(doc: dict) -> Cone:
    kind = doc.get("kind")
    if kind == "polyhedral-v":
        return PolyhedralV(_freeze(doc["generators"]))
    if kind == "polyhedral-h":
        return PolyhedralH(_freeze(doc["inequalities"]))
    if kind == "soc":
        return SecondOrder(int(doc["dim"]))
    if kind == "psd":
        return Psd(int(doc["k"]), doc.get("field", "real"))
    raise ConeError(f"unknown cone kind {kind!r}")


def vector_to_json(v: Sequence) -> list:
    return [ex.format_rational(x) if isinstance(x, (int, Fraction)) else float(x) for x in v]


def vector_from_json(doc, mode: str = EXACT) -> list:
    if mode == EXACT:
        return ex.as_fraction_vector(doc)
    return [float(Fraction(x)) if isinstance(x, str) else float(x) for x in doc]


def certificate_to_json(cert: Certificate) -> dict:
    def enc(x):
        return ex.format_rational(x) if isinstance(x, (int, Fraction)) else float(x)

    if isinstance(cert, Coeffs):
        return {"type": "coeffs", "c": [enc(x) for x in cert.c]}
    if isinstance(cert, Farkas):
        return {"type": "farkas", "y": [enc(x) for x in cert.y]}
    if isinstance(cert, EigenFloor):
        return {"type": "eigen-floor", "lambda_min": enc(cert.lam_min), "exact": cert.exact}
    return {"type": "soc-margin", "m": enc(cert.m)}


def certificate_from_json(doc: dict) -> Certificate:
    def dec(x):
        return ex.parse_rational(x) if isinstance(x, str) else float(x)

    kind = doc["type"]
    if kind == "coeffs":
        return Coeffs(tuple(dec(x) for x in doc["c"]))
    if kind == "farkas":
        return Farkas(tuple(dec(x) for x in doc["y"]))
    if kind == "eigen-floor":
        return EigenFloor(dec(doc["lambda_min"]), bool(doc.get("exact", False)))
    if kind == "soc-margin":
        return SocMargin(dec(doc["m"]))
    raise ValueError(f"unknown certificate type {kind!r}")


def verdict_to_json(verdict: MembershipVerdict) -> dict:
    m = verdict.margin
    return {
        "inside": verdict.inside,
        "margin": ex.format_rational(m) if isinstance(m, (int, Fraction)) else float(m),
        "certificate": certificate_to_json(verdict.certificate),
        "mode": verdict.mode,
    }


def verdict_from_json(doc: dict) -> MembershipVerdict:
    m = doc["margin"]
    return MembershipVerdict(
        bool(doc["inside"]),
        ex.parse_rational(m) if isinstance(m, str) else float(m),
        certificate_from_json(doc["certificate"]),
        doc.get("mode", EXACT),
    )
