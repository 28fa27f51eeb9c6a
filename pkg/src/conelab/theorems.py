"""Checks of the generalized-eigenvector theorems on concrete instances.

Every check first certifies its hypotheses (positivity of ``T`` with an
exact certificate, membership of ``v``, the order precondition) and only
then evaluates the conclusion.  An instance whose hypotheses cannot be
certified is reported as skipped, never as passed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact as ex
from . import herm
from .cones import EXACT, Cone, Psd, membership
from .operators import (
    LinearMap,
    PositivityVerdict,
    congruence_map,
    identity_map,
    is_positive,
    is_spectrum_singleton,
    m_isometry_order,
)


@dataclass
class CheckOutcome:
    precondition_met: bool
    conclusion_holds: bool | None = None
    certificates: list = field(default_factory=list)
    skip_reason: str | None = None

    @property
    def failed(self) -> bool:
        return self.precondition_met and self.conclusion_holds is False


def _skip(reason: str, certs=None) -> CheckOutcome:
    return CheckOutcome(False, None, certs or [], reason)


def exactly_certified(verdict: PositivityVerdict) -> bool:
    """Positive with a certificate that involves no floating point."""
    if not verdict.positive:
        return False
    if verdict.method == "mu-certificate":
        return verdict.certificate.exact
    if verdict.method == "generator-check":
        return all(vd.mode == EXACT for _, _, vd in verdict.certificate.images)
    return verdict.method in ("congruence-form", "rank-one")


def certify_positive(T: LinearMap, cone: Cone, positivity: PositivityVerdict | None = None) -> PositivityVerdict | None:
    verdict = positivity if positivity is not None else is_positive(T, cone, samples=256)
    return verdict if exactly_certified(verdict) else None


def _minus_id(T: LinearMap) -> list[list[Fraction]]:
    D = T.rows()
    for i in range(T.n):
        D[i][i] -= 1
    return D


def _power_chain(D, v, count: int) -> list[list[Fraction]]:
    """``[v, D v, D^2 v, ..., D^count v]``."""
    out = [list(v)]
    for _ in range(count):
        out.append(ex.mat_vec(D, out[-1]))
    return out


def _hypotheses(cone, T, v, positivity):
    """Certificates for ``T >= 0`` and ``v >= 0``, or a skip outcome."""
    if not T.exact:
        return None, _skip("map is not rational")
    pos = certify_positive(T, cone, positivity)
    if pos is None:
        return None, _skip("positivity of T not certified")
    v_in = membership(cone, v)
    if not v_in.inside:
        return None, _skip("v is not in the cone", [pos, v_in])
    return [pos, v_in], None


def check_higher_rank(cone: Cone, T: LinearMap, v: Sequence, r: int, positivity=None) -> CheckOutcome:
    """If ``(T - id)^(r+1) v <= 0`` then ``(T - id)^r v >= 0``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    certs, skip = _hypotheses(cone, T, v, positivity)
    if skip:
        return skip
    chain = _power_chain(_minus_id(T), ex.as_fraction_vector(v), r + 1)
    pre = membership(cone, ex.vec_scale(-1, chain[r + 1]))
    certs.append(pre)
    if not pre.inside:
        return CheckOutcome(False, None, certs, "precondition not met")
    concl = membership(cone, chain[r])
    certs.append(concl)
    return CheckOutcome(True, concl.inside, certs)


def check_rank2(cone: Cone, T: LinearMap, v: Sequence, positivity=None, n_max: int = 0) -> CheckOutcome:
    """If ``(T - id)^2 v <= 0`` then ``T v >= v``.

    With ``n_max > 0`` the telescoped bound ``T^n v - v <= n (T - id) v`` is
    also checked for ``n = 1..n_max`` and folded into the conclusion.
    """
    out = check_higher_rank(cone, T, v, 1, positivity)
    if not out.precondition_met or n_max <= 0:
        return out
    v = ex.as_fraction_vector(v)
    A = T.rows()
    dv = ex.vec_sub(ex.mat_vec(A, v), v)
    tn = v
    ok = out.conclusion_holds
    for n in range(1, n_max + 1):
        tn = ex.mat_vec(A, tn)
        gap = membership(cone, ex.vec_sub(ex.vec_scale(n, dv), ex.vec_sub(tn, v)))
        out.certificates.append(gap)
        ok = ok and gap.inside
    out.conclusion_holds = ok
    return out


def check_intermediate_inequality(
    cone: Cone, T: LinearMap, v: Sequence, r: int, s: int | None = None, n_max: int = 20, positivity=None
) -> CheckOutcome:
    """For ``0 <= s <= r`` and ``0 <= n <= n_max``::

        T^n D^(r-s) v <= sum_{t=0}^{s} C(n, t) D^(t + r - s) v,   D = T - id

    under the precondition ``D^(r+1) v <= 0``.  ``s=None`` checks every s.
    """
    base = check_higher_rank(cone, T, v, r, positivity)
    if not base.precondition_met:
        return base
    certs = base.certificates[:3]
    D = _minus_id(T)
    A = T.rows()
    chain = _power_chain(D, ex.as_fraction_vector(v), r + 1)
    ok = True
    for s_ in range(r + 1) if s is None else [s]:
        if not 0 <= s_ <= r:
            raise ValueError("need 0 <= s <= r")
        lhs = chain[r - s_]
        for n in range(n_max + 1):
            rhs = [Fraction(0)] * len(lhs)
            for t in range(min(s_, n) + 1):
                rhs = ex.vec_add(rhs, ex.vec_scale(math.comb(n, t), chain[t + r - s_]))
            verdict = membership(cone, ex.vec_sub(rhs, lhs))
            certs.append(verdict)
            ok = ok and verdict.inside
            lhs = ex.mat_vec(A, lhs)
    return CheckOutcome(True, ok, certs)


def hockey_stick(n1: int, t: int) -> int:
    """``sum_{n=0}^{n1-1} C(n, t)``; raises if it differs from ``C(n1, t+1)``."""
    if n1 < 0 or t < 0:
        raise ValueError("n1 and t must be nonnegative")
    total = sum(math.comb(n, t) for n in range(n1))
    if total != math.comb(n1, t + 1):
        raise ArithmeticError(f"hockey-stick identity fails at n1={n1}, t={t}")
    return total


def check_cor_jordan2(cone: Cone, T: LinearMap, positivity=None) -> CheckOutcome:
    """``T >= 0``, ``sigma(T) = {1}`` and ``(T - id)^2 = 0`` imply ``T >= id``."""
    if not T.exact:
        return _skip("map is not rational")
    pos = certify_positive(T, cone, positivity)
    if pos is None:
        return _skip("positivity of T not certified")
    if not is_spectrum_singleton(T, 1):
        return _skip("spectrum is not {1}", [pos])
    D = _minus_id(T)
    if not ex.is_zero_matrix(ex.mat_mul(D, D)):
        return _skip("Jordan block of size >= 3", [pos])
    concl = is_positive(T - identity_map(T.n), cone, samples=256)
    return CheckOutcome(True, exactly_certified(concl), [pos, concl])


def generalized_eigen_top(T: LinearMap, v: Sequence, lam) -> tuple[int, list[Fraction]] | None:
    """``(r, w)`` with ``w = (T/lam - id)^r v != 0`` and ``(T/lam - id) w = 0``,
    or ``None`` when ``v`` is not a generalized eigenvector."""
    lam = ex.parse_rational(lam)
    D = ex.mat_scale(1 / lam, T.rows())
    for i in range(T.n):
        D[i][i] -= 1
    w = ex.as_fraction_vector(v)
    if ex.is_zero_vector(w):
        return None
    for r in range(T.n + 1):
        nxt = ex.mat_vec(D, w)
        if ex.is_zero_vector(nxt):
            return r, w
        w = nxt
    return None


def check_cor_generalized_ev(cone: Cone, T: LinearMap, v: Sequence, lam, positivity=None) -> CheckOutcome:
    """A positive generalized eigenvector for ``lam > 0`` yields a positive
    eigenvector ``w = (T/lam - id)^r v``."""
    lam = ex.parse_rational(lam)
    if lam <= 0:
        return _skip("eigenvalue must be positive")
    certs, skip = _hypotheses(cone, T, v, positivity)
    if skip:
        return skip
    top = generalized_eigen_top(T, v, lam)
    if top is None:
        return _skip("v is not a generalized eigenvector", certs)
    _, w = top
    concl = membership(cone, w)
    certs.append(concl)
    return CheckOutcome(True, concl.inside, certs)


def check_cor_odd(
    cone: Cone, T: LinearMap, v: Sequence, r: int, T_inv: LinearMap | None = None, positivity=None
) -> CheckOutcome:
    """``T`` and ``T^-1`` positive, ``r`` odd: ``(T - id)^(r+1) v <= 0``
    forces ``(T - id)^r v = 0``."""
    if r < 1 or r % 2 == 0:
        raise ValueError("r must be an odd positive integer")
    if not T.exact:
        return _skip("map is not rational")
    if ex.det(T.rows()) == 0:
        return _skip("T is not invertible")
    if T_inv is None:
        T_inv = LinearMap(ex.inverse(T.rows()))
    elif ex.mat_mul(T.rows(), T_inv.rows()) != ex.identity(T.n):
        return _skip("supplied inverse is wrong")
    certs, skip = _hypotheses(cone, T, v, positivity)
    if skip:
        return skip
    inv_pos = certify_positive(T_inv, cone)
    if inv_pos is None:
        return _skip("positivity of T^-1 not certified", certs)
    certs.append(inv_pos)
    chain = _power_chain(_minus_id(T), ex.as_fraction_vector(v), r + 1)
    pre = membership(cone, ex.vec_scale(-1, chain[r + 1]))
    certs.append(pre)
    if not pre.inside:
        return CheckOutcome(False, None, certs, "precondition not met")
    return CheckOutcome(True, ex.is_zero_vector(chain[r]), certs)


def check_richter_expansive(L) -> CheckOutcome:
    """A 2-isometry ``L`` (``(id - T)^2 I = 0`` for ``T A = L^* A L``)
    satisfies ``L^* L >= I``."""
    Lc = L if isinstance(L, tuple) else herm.cmat(L)
    k = len(Lc[0])
    order = m_isometry_order(Lc, 2)
    if order is None:
        return _skip("not a 2-isometry")
    gram = herm.cmat_mul(herm.cmat_adjoint(Lc), Lc)
    excess = herm.cmat_sub(gram, herm.cmat_identity(k))
    cone = Psd(k, "complex")
    verdict = membership(cone, herm.coordinates(excess, k, "complex"))
    return CheckOutcome(True, verdict.inside, [order, verdict])


def congruence_positivity(L, field: str = "complex") -> tuple[LinearMap, PositivityVerdict]:
    T = congruence_map(L, field)
    k = len(T.congruence.factors[0][0])
    return T, is_positive(T, Psd(k, field))
