"""Formal pseudo-differential operators.

An operator is stored in right normal form ``sum_m a_m D^(top - m)`` for
``m < depth``; terms below the window are unknown (not zero). With
x-series coefficients every term additionally carries its own x-precision,
so the loss caused by differentiating inside the Leibniz rule is tracked
per term.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from .errors import (
    IndeterminateOrder,
    NonUnitLeading,
    RingMismatch,
    UnsupportedRing,
)
from .ring import QQ, DiffPolynomialRing, Poly, Ring, XSeries, XSeriesRing
from .series import TruncLaurent

DEFAULT_DEPTH = 16
DEFAULT_XPREC = 16


@lru_cache(maxsize=None)
def binomial(n: int, i: int) -> int:
    """Generalized binomial ``n (n-1) ... (n-i+1) / i!`` for any integer ``n``."""
    if i < 0:
        return 0
    num = 1
    for k in range(i):
        num *= n - k
    return num // factorial(i)


class _Derivatives:
    """Lazily computed derivative towers of a coefficient list."""

    def __init__(self, ring, terms):
        self.ring = ring
        self.towers = [[t] for t in terms]

    def get(self, n, i):
        tower = self.towers[n]
        while len(tower) <= i:
            tower.append(self.ring.derive(tower[-1]))
        return tower[i]


class PseudoOp:
    __slots__ = ("ring", "top", "terms")

    def __init__(self, ring: Ring, top: int, terms):
        if not terms:
            raise ValueError("an operator needs at least one known term")
        self.ring = ring
        self.top = top
        self.terms = tuple(ring(t) for t in terms)

    # -- constructors
    @classmethod
    def from_dict(cls, ring, coeffs: dict, depth: int = DEFAULT_DEPTH, top: int | None = None):
        """Operator ``sum coeffs[k] D^k`` known for ``depth`` exponents from ``top`` down."""
        if top is None:
            top = max(coeffs) if coeffs else 0
        zero = ring.zero()
        return cls(ring, top, [coeffs.get(top - m, zero) for m in range(depth)])

    @classmethod
    def d(cls, ring, n: int = 1, depth: int = DEFAULT_DEPTH):
        return cls.from_dict(ring, {n: ring.one()}, depth)

    @classmethod
    def scalar(cls, ring, f, depth: int = DEFAULT_DEPTH):
        return cls.from_dict(ring, {0: ring(f)}, depth, top=0)

    @classmethod
    def from_series(cls, ring, v: TruncLaurent):
        """Constant-coefficient operator with symbol ``v`` (``y`` read as ``D^-1``)."""
        if len(v) == 0:
            raise IndeterminateOrder("cannot lift an empty series")
        return cls(ring, -v.low, [ring(c) for c in v.coeffs])

    # -- queries
    @property
    def depth(self) -> int:
        return len(self.terms)

    @property
    def low_exp(self) -> int:
        """Lowest exponent of ``D`` whose coefficient is known."""
        return self.top - len(self.terms) + 1

    def coeff(self, k: int):
        """Coefficient of ``D^k`` in right normal form."""
        m = self.top - k
        if m < 0:
            return self.ring.zero()
        if m >= len(self.terms):
            raise IndexError(f"D^{k} lies below the known window")
        return self.terms[m]

    def _lead_index(self):
        for m, t in enumerate(self.terms):
            if not self.ring.is_zero(t):
                return m
        raise IndeterminateOrder("every known term vanishes")

    def order(self) -> int:
        return self.top - self._lead_index()

    def leading(self):
        return self.terms[self._lead_index()]

    def is_monic(self) -> bool:
        lead = self.leading()
        if isinstance(lead, XSeries):
            return lead.is_constant() and lead.prec >= 1 and lead.coeffs[0] == 1
        return lead == 1

    def normalized(self) -> "PseudoOp":
        """Drop vanishing leading terms so that ``top`` equals the order."""
        m = self._lead_index()
        if m == 0:
            return self
        return PseudoOp(self.ring, self.top - m, self.terms[m:])

    def truncate(self, depth: int) -> "PseudoOp":
        return self if depth >= self.depth else PseudoOp(self.ring, self.top, self.terms[:depth])

    def with_low(self, low_exp: int) -> "PseudoOp":
        """Cut the window at ``D^low_exp``."""
        return self.truncate(self.top - low_exp + 1)

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(t) for t in self.terms)

    def is_differential(self) -> bool:
        return all(self.ring.is_zero(t) for m, t in enumerate(self.terms) if self.top - m < 0)

    def has_constant_coefficients(self) -> bool:
        return all(is_constant_element(self.ring, t) for t in self.terms)

    def min_prec(self):
        if not isinstance(self.ring, XSeriesRing):
            return None
        return min(t.prec for t in self.terms)

    # -- comparison
    def eq_within(self, other) -> bool:
        other = self._lift(other)
        hi = max(self.top, other.top)
        lo = max(self.low_exp, other.low_exp)
        for k in range(hi, lo - 1, -1):
            a, b = self.coeff(k), other.coeff(k)
            if isinstance(a, XSeries):
                if not a.eq_within(b):
                    return False
            elif a != b:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, PseudoOp):
            return NotImplemented
        return self.ring == other.ring and self.top == other.top and self.terms == other.terms

    def __hash__(self):
        return hash((self.top, self.terms))

    # -- arithmetic
    def _lift(self, other):
        if isinstance(other, PseudoOp):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return self._scalar_like(other)

    def _scalar_like(self, c):
        return PseudoOp.scalar(self.ring, self.ring(c), max(1, 1 - self.low_exp))

    def _add(self, other, sign):
        if not isinstance(other, PseudoOp):
            other = self._scalar_like(other)
        elif other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        hi = max(self.top, other.top)
        lo = max(self.low_exp, other.low_exp)
        if lo > hi:
            lo = hi
        terms = []
        for k in range(hi, lo - 1, -1):
            a, b = self.coeff(k), other.coeff(k)
            terms.append(a + b if sign > 0 else a - b)
        return PseudoOp(self.ring, hi, terms)

    def __add__(self, other):
        return self._add(other, 1)

    def __radd__(self, other):
        return self._add(other, 1)

    def __sub__(self, other):
        return self._add(other, -1)

    def __rsub__(self, other):
        return (-self)._add(other, 1)

    def __neg__(self):
        return PseudoOp(self.ring, self.top, [-t for t in self.terms])

    def scale_left(self, f) -> "PseudoOp":
        """``f * P`` for a coefficient ``f`` (multiplication operator on the left)."""
        f = self.ring(f)
        return PseudoOp(self.ring, self.top, [f * t for t in self.terms])

    def __mul__(self, other):
        if isinstance(other, PseudoOp):
            return multiply(self, other)
        if _is_rational_scalar(other):
            return PseudoOp(self.ring, self.top, [t * other for t in self.terms])
        return multiply(self, PseudoOp.scalar(self.ring, other, self.depth))

    def __rmul__(self, other):
        return self.scale_left(other)

    def __pow__(self, n: int):
        if n < 0:
            return invert(self) ** (-n)
        result = PseudoOp.scalar(self.ring, 1, self.depth)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"PseudoOp({self})"


def _is_rational_scalar(v):
    from .ring import MPQ, MPZ
    from fractions import Fraction

    return isinstance(v, (int, MPQ, MPZ, Fraction)) and not isinstance(v, bool)


def is_constant_element(ring, c) -> bool:
    if isinstance(c, XSeries):
        return c.is_constant()
    if isinstance(ring, DiffPolynomialRing):
        return c.is_constant()
    return True


def _strip_exact(P):
    if not P.ring.exact:
        return P
    m = 0
    while m < len(P.terms) - 1 and not P.terms[m]:
        m += 1
    return P if m == 0 else PseudoOp(P.ring, P.top - m, P.terms[m:])


def multiply(P: PseudoOp, Q: PseudoOp) -> PseudoOp:
    """Leibniz product in right normal form."""
    if P.ring != Q.ring:
        raise RingMismatch(f"{P.ring} vs {Q.ring}")
    P, Q = _strip_exact(P), _strip_exact(Q)
    ring = P.ring
    M, N = P.top, Q.top
    depth = min(P.depth, Q.depth)
    a = P.terms
    db = _Derivatives(ring, Q.terms)
    exact = ring.exact
    out = []
    for l in range(depth):
        acc = None
        for m in range(l + 1):
            am = a[m]
            if exact and not am:
                continue
            # group the Leibniz sum over i before multiplying by a_m
            inner = None
            for i in range(l - m + 1):
                c = binomial(M - m, i)
                if c == 0:
                    break
                b = db.get(l - m - i, i)
                if exact and not b:
                    continue
                term = b if c == 1 else b * c
                inner = term if inner is None else inner + term
            if inner is None:
                continue
            term = am * inner
            acc = term if acc is None else acc + term
        if acc is None:
            acc = _zero_term(ring, a, Q.terms, l)
        out.append(acc)
    return PseudoOp(ring, M + N, out)


def _zero_term(ring, a, b, l):
    if isinstance(ring, XSeriesRing):
        prec = min(min(t.prec for t in a[: l + 1]), min(t.prec for t in b[: l + 1]))
        return ring.zero(max(prec - l, 0))
    return ring.zero()


def commutator(P: PseudoOp, Q: PseudoOp) -> PseudoOp:
    return multiply(P, Q) - multiply(Q, P)


def invert(P: PseudoOp) -> PseudoOp:
    """Two-sided inverse; the leading coefficient has to be a unit."""
    P = P.normalized()
    ring = P.ring
    a0 = P.terms[0]
    if not ring.is_unit(a0):
        raise NonUnitLeading(f"leading coefficient {ring.format(a0)} is not a unit")
    inv0 = ring.inverse(a0)
    N = P.top
    da = _Derivatives(ring, P.terms)
    t = []
    for l in range(P.depth):
        acc = ring.one() if l == 0 else None
        for m in range(l):
            inner = None
            for i in range(l - m + 1):
                c = binomial(-N - m, i)
                if c == 0:
                    break
                term = da.get(l - m - i, i) * c
                inner = term if inner is None else inner + term
            term = t[m] * inner
            acc = -term if acc is None else acc - term
        t.append(acc * inv0)
    return PseudoOp(ring, -N, t)


@dataclass(frozen=True)
class LeftNormalForm:
    """``sum_n D^(top - n) b_n`` (coefficients to the right of the powers)."""

    ring: Ring
    top: int
    terms: tuple

    def to_right(self) -> PseudoOp:
        db = _Derivatives(self.ring, self.terms)
        out = []
        for l in range(len(self.terms)):
            acc = None
            for n in range(l + 1):
                c = binomial(self.top - n, l - n)
                if c == 0:
                    continue
                term = db.get(n, l - n) * c
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else self.ring.zero())
        return PseudoOp(self.ring, self.top, out)


def left_normal_form(P: PseudoOp) -> LeftNormalForm:
    ring = P.ring
    b = []
    db = _Derivatives(ring, b)
    for l, al in enumerate(P.terms):
        acc = al
        for n in range(l):
            c = binomial(P.top - n, l - n)
            if c:
                acc = acc - db.get(n, l - n) * c
        b.append(acc)
        db.towers.append([acc])
    return LeftNormalForm(ring, P.top, tuple(b))


def sigma(P: PseudoOp, var: str = "y") -> TruncLaurent:
    """Evaluate right-normal-form coefficients at ``x = 0`` and write ``y`` for ``D^-1``."""
    ring = P.ring
    if isinstance(ring, XSeriesRing):
        base = ring.base
        coeffs = [t.constant_term() for t in P.terms]
    elif isinstance(ring, DiffPolynomialRing):
        raise UnsupportedRing("sigma needs x-series (or constant) coefficients")
    else:
        base = ring
        coeffs = list(P.terms)
    return TruncLaurent(base, var, -P.top, coeffs)


def constant_lift(ring: XSeriesRing, v: TruncLaurent) -> PseudoOp:
    return PseudoOp(ring, -v.low, [ring.constant(c) for c in v.coeffs] or [ring.zero()])


def act(P: PseudoOp, v: TruncLaurent) -> TruncLaurent:
    """Right action ``P(v) = sigma(Q P)`` where ``Q`` lifts ``v``."""
    ring = P.ring
    if len(v) == 0:
        return TruncLaurent.empty(v.ring, v.var, v.guaranteed - P.top)
    if isinstance(ring, XSeriesRing):
        Q = constant_lift(ring, v)
    else:
        Q = PseudoOp(ring, -v.low, list(v.coeffs))
    return sigma(multiply(Q, P), v.var)


def as_series(P: PseudoOp, var: str = "y") -> TruncLaurent:
    """Symbol of a constant-coefficient operator as a series in ``y``."""
    return sigma(P, var)


def partial(ring: Ring, n: int = 1, depth: int = DEFAULT_DEPTH) -> PseudoOp:
    return PseudoOp.d(ring, n, depth)


def format_operator(P: PseudoOp) -> str:
    ring = P.ring
    pieces = []
    for m, t in enumerate(P.terms):
        if ring.is_zero(t):
            continue
        k = P.top - m
        mon = "" if k == 0 else ("D" if k == 1 else f"D^{k}")
        cs = _coeff_text(ring, t)
        if not mon:
            pieces.append(cs)
        elif cs == "1":
            pieces.append(mon)
        elif cs == "-1":
            pieces.append("-" + mon)
        else:
            pieces.append(f"{cs}*{mon}")
    body = " + ".join(pieces).replace("+ -", "- ") if pieces else "0"
    k = P.low_exp - 1
    return f"{body} + O({'D' if k == 1 else f'D^{k}'})"


def _coeff_text(ring, t):
    if isinstance(t, XSeries):
        text = str(t)
        cut = text.rfind(" + O(")
        core = text[:cut] if cut >= 0 else text
        simple = core.lstrip("-").replace("/", "").isdigit()
        return core if simple else f"({core})"
    text = ring.format(t)
    if isinstance(t, Poly) and len(t.terms) > 1:
        return f"({text})"
    return text


def xseries_ring(base: Ring = QQ, prec: int = DEFAULT_XPREC) -> XSeriesRing:
    return XSeriesRing(base, prec)
