"""Truncated Laurent series in one variable.

A :class:`TruncLaurent` stores the coefficients for exponents
``low .. guaranteed-1``; everything at or above ``guaranteed`` is unknown.
Over exact coefficient rings leading zeros are stripped, so ``low`` is the
valuation whenever the series is nonzero.

``order`` follows the pole-order convention: ``order_of(z**-3 + z) == 3``.
"""

from __future__ import annotations

from gmpy2 import mpq

from .errors import (
    BadValuation,
    DivisibilityViolation,
    IndeterminateOrder,
    NonPositiveValuation,
    NonUnitLeading,
    NotMonic,
    RingMismatch,
    ZeroPrecision,
)
from .ring import QQ, Ring, format_rational, Poly, XSeries


class TruncLaurent:
    __slots__ = ("ring", "var", "low", "coeffs")

    def __init__(self, ring: Ring, var: str, low: int, coeffs):
        coeffs = [ring(c) for c in coeffs]
        if ring.exact:
            k = 0
            while k < len(coeffs) and not coeffs[k]:
                k += 1
            if k:
                low += k
                coeffs = coeffs[k:]
        self.ring = ring
        self.var = var
        self.low = low
        self.coeffs = tuple(coeffs)

    # -- constructors
    @classmethod
    def empty(cls, ring, var, guaranteed):
        return cls(ring, var, guaranteed, ())

    @classmethod
    def from_dict(cls, ring, var, terms: dict, guaranteed: int):
        """Series with the given ``{exponent: coefficient}`` known below ``guaranteed``."""
        lo = min((e for e in terms if e < guaranteed), default=guaranteed)
        coeffs = [terms.get(e, 0) for e in range(lo, guaranteed)]
        return cls(ring, var, lo, coeffs)

    @classmethod
    def monomial(cls, ring, var, exp: int, guaranteed: int, coeff=1):
        return cls.from_dict(ring, var, {exp: coeff}, guaranteed)

    @classmethod
    def constant(cls, ring, var, c, guaranteed: int):
        return cls.from_dict(ring, var, {0: c}, guaranteed)

    # -- queries
    @property
    def guaranteed(self) -> int:
        return self.low + len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, e: int):
        if e >= self.guaranteed:
            raise ZeroPrecision(f"exponent {e} is beyond the known window (< {self.guaranteed})")
        if e < self.low:
            return self.ring.zero()
        return self.coeffs[e - self.low]

    def items(self):
        """Nonzero ``(exponent, coefficient)`` pairs."""
        return [(self.low + i, c) for i, c in enumerate(self.coeffs) if not self.ring.is_zero(c)]

    def valuation(self) -> int:
        """Lowest exponent with a nonzero coefficient (``guaranteed`` if none)."""
        for i, c in enumerate(self.coeffs):
            if not self.ring.is_zero(c):
                return self.low + i
        return self.guaranteed

    def is_zero(self) -> bool:
        return self.valuation() == self.guaranteed

    def order(self) -> int:
        return order_of(self)

    def leading(self):
        v = self.valuation()
        if v == self.guaranteed:
            raise IndeterminateOrder("all known coefficients vanish")
        return self.coeffs[v - self.low]

    def is_monic(self) -> bool:
        try:
            return self.leading() == 1
        except IndeterminateOrder:
            return False

    # -- window manipulation
    def truncate(self, guaranteed: int) -> "TruncLaurent":
        if guaranteed >= self.guaranteed:
            return self
        if guaranteed <= self.low:
            return TruncLaurent.empty(self.ring, self.var, guaranteed)
        return TruncLaurent(self.ring, self.var, self.low, self.coeffs[: guaranteed - self.low])

    def shift(self, k: int) -> "TruncLaurent":
        """Multiply by ``var**k``."""
        return TruncLaurent(self.ring, self.var, self.low + k, self.coeffs)

    def map_coeffs(self, fn, ring: Ring | None = None) -> "TruncLaurent":
        ring = ring or self.ring
        return TruncLaurent(ring, self.var, self.low, [fn(c) for c in self.coeffs])

    def rename(self, var: str) -> "TruncLaurent":
        return TruncLaurent(self.ring, var, self.low, self.coeffs)

    def _strip(self):
        v = self.valuation()
        return TruncLaurent(self.ring, self.var, v, self.coeffs[v - self.low:])

    # -- comparison
    def _check(self, other):
        if not isinstance(other, TruncLaurent):
            return False
        if other.var != self.var or other.ring != self.ring:
            raise RingMismatch(f"{self.ring}/{self.var} vs {other.ring}/{other.var}")
        return True

    def eq_within(self, other) -> bool:
        """Agreement on the intersection of both known windows."""
        other = self._lift(other)
        top = min(self.guaranteed, other.guaranteed)
        lo = min(self.low, other.low)
        for e in range(lo, top):
            a, b = self.coeff(e), other.coeff(e)
            if isinstance(a, XSeries) or isinstance(b, XSeries):
                if not self.ring(a).eq_within(self.ring(b)):
                    return False
            elif a != b:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, TruncLaurent):
            return NotImplemented
        return (
            self.var == other.var
            and self.ring == other.ring
            and self.guaranteed == other.guaranteed
            and self._strip().coeffs == other._strip().coeffs
            and self.valuation() == other.valuation()
        )

    def __hash__(self):
        s = self._strip()
        return hash((self.var, s.low, s.coeffs))

    # -- arithmetic
    def _lift(self, other):
        if isinstance(other, TruncLaurent):
            self._check(other)
            return other
        c = self.ring(other)
        # scalars are exact: known to every order
        return TruncLaurent.constant(self.ring, self.var, c, max(self.guaranteed, 1))

    def __add__(self, other):
        if not isinstance(other, TruncLaurent):
            try:
                c = self.ring(other)
            except (TypeError, ValueError):
                return NotImplemented
            if self.guaranteed <= 0:
                return self
            terms = dict(self._as_dict())
            terms[0] = terms.get(0, self.ring.zero()) + c
            return TruncLaurent.from_dict(self.ring, self.var, terms, self.guaranteed)
        self._check(other)
        top = min(self.guaranteed, other.guaranteed)
        lo = min(self.low, other.low)
        coeffs = []
        for e in range(lo, top):
            coeffs.append(self.coeff(e) + other.coeff(e))
        return TruncLaurent(self.ring, self.var, min(lo, top), coeffs)

    __radd__ = __add__

    def _as_dict(self):
        return {self.low + i: c for i, c in enumerate(self.coeffs)}

    def __neg__(self):
        return TruncLaurent(self.ring, self.var, self.low, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, TruncLaurent):
            return self + (-other)
        try:
            return self + (-self.ring(other))
        except (TypeError, ValueError):
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncLaurent":
        c = self.ring(c)
        return TruncLaurent(self.ring, self.var, self.low, [x * c for x in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, TruncLaurent):
            try:
                return self.scale(other)
            except (TypeError, ValueError):
                return NotImplemented
        self._check(other)
        va, vb = self.valuation(), other.valuation()
        top = min(self.guaranteed + vb, other.guaranteed + va)
        lo = va + vb
        if lo >= top:
            return TruncLaurent.empty(self.ring, self.var, top)
        zero = self.ring.zero()
        out = [zero] * (top - lo)
        a = self.coeffs[va - self.low:]
        b = other.coeffs[vb - other.low:]
        n = top - lo
        for i, ai in enumerate(a[:n]):
            if self.ring.exact and not ai:
                continue
            for j in range(min(len(b), n - i)):
                bj = b[j]
                if self.ring.exact and not bj:
                    continue
                out[i + j] = out[i + j] + ai * bj
        return TruncLaurent(self.ring, self.var, lo, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncLaurent):
            return self * invert(other)
        return self.scale(self.ring.inverse(self.ring(other)))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return invert(self) ** (-n)
        result = TruncLaurent.constant(self.ring, self.var, 1, self._one_window())
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def _one_window(self):
        # the exact series 1, with a window wide enough not to limit products
        return max(self.guaranteed - self.valuation(), 1) + max(0, -self.valuation()) + 1

    # -- display
    def __str__(self):
        pieces = []
        for e, c in self.items():
            cs = _coeff_str(self.ring, c)
            mon = "" if e == 0 else (self.var if e == 1 else f"{self.var}^{e}")
            if not mon:
                pieces.append(cs)
            elif cs == "1":
                pieces.append(mon)
            elif cs == "-1":
                pieces.append("-" + mon)
            else:
                pieces.append(f"{cs}*{mon}")
        body = " + ".join(pieces).replace("+ -", "- ") if pieces else "0"
        tail = self.var if self.guaranteed == 1 else f"{self.var}^{self.guaranteed}"
        return f"{body} + O({tail})"

    def __repr__(self):
        return f"TruncLaurent({self})"


def _coeff_str(ring, c):
    if ring is QQ or ring == QQ:
        return format_rational(c)
    text = ring.format(c)
    if isinstance(c, Poly) and len(c.terms) > 1:
        return f"({text})"
    if isinstance(c, XSeries):
        return f"({text})"
    return text


def order_of(v: TruncLaurent) -> int:
    val = v.valuation()
    if val == v.guaranteed:
        raise IndeterminateOrder("all known coefficients vanish; the order is not determined")
    return -val


def _unit_part(s: TruncLaurent):
    """Split ``s = var**v * u`` with ``u(0)`` the leading coefficient."""
    v = s.valuation()
    if v == s.guaranteed:
        raise IndeterminateOrder("cannot invert a series with no known nonzero coefficient")
    return v, list(s.coeffs[v - s.low:])


def invert(s: TruncLaurent) -> TruncLaurent:
    ring = s.ring
    v, u = _unit_part(s)
    if not ring.is_unit(u[0]):
        raise NonUnitLeading(f"leading coefficient {ring.format(u[0])} is not a unit")
    inv0 = ring.inverse(u[0])
    t = [inv0]
    for l in range(1, len(u)):
        acc = ring.zero()
        for j in range(l):
            acc = acc + u[l - j] * t[j]
        t.append(-(acc * inv0))
    return TruncLaurent(ring, s.var, -v, t)


def nth_root(s: TruncLaurent, N: int) -> TruncLaurent:
    """The unique monic ``t`` with ``t**N == s``."""
    if N == 0:
        raise DivisibilityViolation("N must be nonzero")
    v, u = _unit_part(s)
    if u[0] != 1:
        raise NotMonic(f"leading coefficient {s.ring.format(u[0])} is not 1")
    if v % N:
        raise DivisibilityViolation(f"order {-v} is not divisible by {N}")
    ring = s.ring
    b = [ring.one()]
    for n in range(1, len(u)):
        acc = ring.zero()
        for k in range(1, n + 1):
            w = mpq(k, N) - (n - k)
            if w:
                acc = acc + u[k] * b[n - k] * w
        b.append(acc * mpq(1, n))
    return TruncLaurent(ring, s.var, v // N, b)


def compose(f: TruncLaurent, g: TruncLaurent) -> TruncLaurent:
    """``f(g)`` for ``g`` of positive valuation; the result lives in ``g``'s variable."""
    if f.ring != g.ring:
        raise RingMismatch(f"{f.ring} vs {g.ring}")
    vg = g.valuation()
    if vg == g.guaranteed:
        raise NonPositiveValuation("inner series has no known nonzero coefficient")
    if vg <= 0:
        raise NonPositiveValuation(f"inner series has valuation {vg} <= 0")
    ring = f.ring
    top = f.guaranteed * vg
    terms = [(e, c) for e, c in f.items()]
    if not terms:
        return TruncLaurent.empty(ring, g.var, top)
    lo_e = terms[0][0]
    hi_e = terms[-1][0]
    powers = {}
    if hi_e >= 0:
        p = TruncLaurent.constant(ring, g.var, 1, top)
        for k in range(0, hi_e + 1):
            powers[k] = p
            p = p * g
    if lo_e < 0:
        gi = invert(g)
        p = gi
        for k in range(-1, lo_e - 1, -1):
            powers[k] = p
            p = p * gi
    acc = None
    for e, c in terms:
        term = powers[e].scale(c)
        acc = term if acc is None else acc + term
    return acc.truncate(top)


def revert(f: TruncLaurent) -> TruncLaurent:
    """Compositional inverse of a series of valuation exactly one."""
    v = f.valuation()
    if v != 1 or f.low < 1:
        raise BadValuation(f"reversion needs valuation exactly 1 (got {v})")
    ring = f.ring
    f1 = f.coeff(1)
    if not ring.is_unit(f1):
        raise BadValuation(f"linear coefficient {ring.format(f1)} is not a unit")
    inv1 = ring.inverse(f1)
    top = f.guaranteed
    z = TruncLaurent.monomial(ring, f.var, 1, top)
    g = z.scale(inv1)
    # g <- g - (f(g) - z)/f1 gains at least one correct coefficient per pass
    for _ in range(max(top - 2, 0)):
        fg = compose(f, g)
        g = g - (fg - z).scale(inv1)
        g = g.truncate(top)
    return g
