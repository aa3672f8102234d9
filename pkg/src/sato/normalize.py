"""Conjugation to normal form, admissible operators and first-order gauges."""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import (
    NonUnit,
    NonUnitLeading,
    NotMonic,
    UnsupportedRing,
    WrongOrder,
    ZeroN,
)
from .pdo import (
    DEFAULT_XPREC,
    PseudoOp,
    _Derivatives,
    binomial,
    invert,
    multiply,
)
from .ring import XSeries, XSeriesRing
from .series import TruncLaurent, order_of

STANDARD_TAG = "s0(0)=1, sl(0)=0 for l>=1"


@dataclass(frozen=True)
class ConjugationResult:
    conjugator: PseudoOp
    residual: PseudoOp
    tag: str

    def verified(self) -> bool:
        return self.residual.is_zero()


def _require_xseries(P):
    if not isinstance(P.ring, XSeriesRing):
        raise UnsupportedRing(f"{P.ring} has no integration; x-series coefficients are required")


def conjugator_to_power(L: PseudoOp, N: int, constants: dict | None = None) -> ConjugationResult:
    """Find ``X`` of order 0 with ``X^-1 L X = D^N``.

    ``constants`` overrides the integration constants ``s_l(0)``; by default
    ``s_0(0) = 1`` and ``s_l(0) = 0`` for ``l >= 1``.
    """
    if N == 0:
        raise ZeroN("the target power must be nonzero")
    _require_xseries(L)
    ring = L.ring
    base = ring.base
    L = L.normalized()
    if L.top != N:
        raise NotMonic(f"operator has order {L.top}, expected {N}")
    if not L.is_monic():
        raise NotMonic("leading coefficient is not 1")
    constants = dict(constants or {})
    u = L.terms
    depth = len(u) - 1
    if depth < 1:
        X = PseudoOp.scalar(ring, ring.one(), 1)
        return ConjugationResult(X, _residual(L, X, N), _tag(constants))
    u1 = u[1].coeffs
    prec_u1 = u[1].prec
    s = []
    ds = _Derivatives(ring, s)
    for k in range(depth):
        # right-hand side from already known s_0 .. s_{k-1}
        rhs = None
        l = k + 1
        for m in range(l + 1):
            for i in range(l - m + 1):
                if m + i < 2:
                    continue
                n = l - m - i
                if n > k - 1:
                    continue
                c = binomial(N - m, i)
                if c == 0:
                    continue
                term = u[m] * ds.get(n, i) * c
                rhs = term if rhs is None else rhs + term
        if rhs is None:
            rhs_coeffs, rhs_prec = (), None
        else:
            rhs = -rhs
            rhs_coeffs, rhs_prec = rhs.coeffs, rhs.prec
        prec = prec_u1 if rhs_prec is None else min(rhs_prec, prec_u1)
        prec += 1
        start = constants.get(k, 1 if k == 0 else 0)
        sk = [base(start)]
        zero = base.zero()
        for j in range(prec - 1):
            acc = rhs_coeffs[j] if j < len(rhs_coeffs) else zero
            for i in range(j + 1):
                if u1[j - i] and sk[i]:
                    acc = acc - u1[j - i] * sk[i]
            sk.append(acc * mpq(1, N * (j + 1)))
        sk = XSeries(ring, tuple(sk), prec)
        s.append(sk)
        ds.towers.append([sk])
    X = PseudoOp(ring, 0, s)
    return ConjugationResult(X, _residual(L, X, N), _tag(constants))


def _tag(constants):
    if not constants:
        return STANDARD_TAG
    items = ", ".join(f"s{k}(0)={v}" for k, v in sorted(constants.items()))
    return f"{items}; other s_l(0) standard"


def _residual(L, X, N):
    conj = multiply(multiply(invert(X), L), X)
    return conj - PseudoOp.d(L.ring, N, conj.depth)


def uniqueness_defect(X1: PseudoOp, X2: PseudoOp) -> PseudoOp:
    return multiply(invert(X1), X2)


def is_admissible(T: PseudoOp) -> bool:
    """Whether ``T D T^-1`` has constant coefficients inside the window."""
    T = T.normalized()
    if T.top != 0:
        return False
    if not T.ring.is_unit(T.terms[0]):
        raise NonUnitLeading("admissible operators have a unit leading coefficient")
    D = PseudoOp.d(T.ring, 1, T.depth + 1)
    return multiply(multiply(T, D), invert(T)).has_constant_coefficients()


def admissible_structure(T: PseudoOp):
    """Write ``T = exp(c x) * sum f_i D^-i`` with polynomial ``f_i`` of degree <= i.

    Returns ``(c, [f_0, f_1, ...])`` with each ``f_i`` an x-series, or
    ``None`` when the shape is violated inside the window.
    """
    _require_xseries(T)
    T = T.normalized()
    if T.top != 0:
        return None
    ring = T.ring
    t0 = T.terms[0]
    if not ring.is_unit(t0):
        raise NonUnitLeading("leading coefficient is not a unit")
    ratio = t0.derive() * t0.inverse()
    if ratio.prec < 1 or not ratio.is_constant():
        return None
    c = ratio.coeffs[0]
    damp = ring.exp(-c, max(t.prec for t in T.terms))
    fs = []
    for i, t in enumerate(T.terms):
        f = damp * t
        if any(f.coeffs[i + 1:]):
            return None
        fs.append(f)
    return c, fs


def admissible_root(v: TruncLaurent, r: int, xprec: int = DEFAULT_XPREC) -> PseudoOp:
    """Admissible ``T`` with ``T D^-r T^-1`` equal to the operator of symbol ``v``."""
    if r == 0:
        raise ZeroN("r must be nonzero")
    if order_of(v) != -r:
        raise WrongOrder(f"series has order {order_of(v)}, expected {-r}")
    if not v.is_monic():
        raise NotMonic("series is not monic")
    ring = XSeriesRing(v.ring, xprec)
    V = PseudoOp.from_series(ring, v)
    return conjugator_to_power(V, -r).conjugator


def gauge_first_order(u: XSeries) -> XSeries:
    """``f`` with ``f(0) = 1`` and ``f' = u f``, so that ``f^-1 D f = D + u``."""
    base = u.ring.base
    f = [base.one()]
    for i in range(u.prec):
        acc = base.zero()
        for j in range(i + 1):
            acc = acc + f[j] * u.coeffs[i - j]
        f.append(acc * mpq(1, i + 1))
    return XSeries(u.ring, tuple(f), u.prec + 1)


def conjugate_by_unit(P: PseudoOp, f: XSeries) -> PseudoOp:
    """``f P f^-1``."""
    ring = P.ring
    f = ring(f)
    if not ring.is_unit(f):
        raise NonUnit("conjugating element must have a unit constant term")
    finv = PseudoOp.scalar(ring, ring.inverse(f), max(P.depth, P.top + 1))
    return multiply(P.scale_left(f), finv)


def find_gauge(B1, B2):
    """An x-series ``f`` with ``B1[k] = f B2[k] f^-1`` for every ``k``, or ``None``.

    ``f`` is read off the subleading coefficient of the first generator of
    nonzero order and normalized to ``f(0) = 1``.
    """
    for P1, P2 in zip(B1, B2):
        P1, P2 = P1.normalized(), P2.normalized()
        if P1.top != 0:
            break
    else:
        return None
    if P1.top != P2.top or P1.depth < 2 or P2.depth < 2:
        return None
    ring = P1.ring
    a0 = P1.terms[0]
    if not ring.is_unit(a0):
        return None
    g = (P2.terms[1] - P1.terms[1]) * ring.inverse(a0 * P1.top)
    f = gauge_first_order(g)
    for Q1, Q2 in zip(B1, B2):
        if not conjugate_by_unit(Q2, f).eq_within(Q1):
            return None
    return f
