"""Differential coefficient rings of characteristic zero.

Four instances are provided:

* :class:`RationalField` -- elements are ``gmpy2.mpq``; zero derivation.
* :class:`PolynomialRing` -- ``Q[a, b, ...]``; zero derivation.
* :class:`DiffPolynomialRing` -- differential polynomials in jet variables
  ``u, u', u'', ...`` with the total derivative ``u^(j) -> u^(j+1)``.
* :class:`XSeriesRing` -- truncated power series ``R[[x]]`` over one of the
  above, with ``d/dx`` as derivation.

Polynomial-type elements are :class:`Poly`, power series are
:class:`XSeries`. All values are immutable. Every ring contains ``Q`` so
division by nonzero integers is always available.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import gmpy2
from gmpy2 import mpq

from .errors import (
    JetOrderExceeded,
    NonUnit,
    RingMismatch,
    UnsupportedRing,
    ZeroPrecision,
)

MPQ = type(mpq(0))
MPZ = type(gmpy2.mpz(0))
_ZERO = mpq(0)
_ONE = mpq(1)


def qq(value) -> MPQ:
    """Exact rational from an int, ``"p/q"`` string, Fraction or mpq."""
    if isinstance(value, MPQ):
        return value
    if isinstance(value, (int, MPZ)) and not isinstance(value, bool):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except ValueError:
            raise ValueError(f"not a rational literal: {value!r}") from None
    raise TypeError(f"cannot coerce {type(value).__name__} to an exact rational")


def format_rational(q) -> str:
    q = qq(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# ring descriptors


class Ring:
    """Common interface of the coefficient rings."""

    exact = True
    is_field = False

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def __call__(self, value):
        raise NotImplementedError

    def derive(self, e):
        raise NotImplementedError

    def integrate_zero(self, e):
        raise UnsupportedRing(f"{self} has no total integration")

    def eval_at_zero(self, e):
        raise UnsupportedRing(f"{self} is not a power series ring")

    def is_zero(self, e) -> bool:
        return not e

    def is_unit(self, e) -> bool:
        raise NotImplementedError

    def inverse(self, e):
        raise NotImplementedError

    def format(self, e) -> str:
        return str(e)


class RationalField(Ring):
    is_field = True

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def zero(self):
        return _ZERO

    def one(self):
        return _ONE

    def __call__(self, value):
        if isinstance(value, Poly):
            if not value.is_constant():
                raise RingMismatch(f"{value} is not a rational constant")
            return value.constant_term()
        return qq(value)

    def derive(self, e):
        return _ZERO

    def is_unit(self, e):
        return e != 0

    def inverse(self, e):
        if e == 0:
            raise NonUnit("0 is not invertible")
        return 1 / qq(e)

    def format(self, e):
        return format_rational(e)


QQ = RationalField()


class _PolyRingBase(Ring):
    """Shared machinery for commutative polynomial rings over Q."""

    var_names: tuple

    def zero(self):
        return Poly(self, {})

    def one(self):
        return Poly(self, {(): _ONE})

    def constant(self, c):
        c = qq(c)
        return Poly(self, {(): c} if c else {})

    def __call__(self, value):
        if isinstance(value, Poly):
            if value.ring != self:
                if value.is_constant():
                    return self.constant(value.constant_term())
                raise RingMismatch(f"{value!r} does not belong to {self}")
            return value
        return self.constant(value)

    def var(self, index: int) -> "Poly":
        return Poly(self, {((index, 1),): _ONE})

    def var_index(self, name: str) -> int:
        try:
            return self.var_names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def gen(self, name: str) -> "Poly":
        return self.var(self.var_index(name))

    def is_unit(self, e):
        e = self(e)
        return e.is_constant() and e.constant_term() != 0

    def inverse(self, e):
        e = self(e)
        if not self.is_unit(e):
            raise NonUnit(f"{e} is not a unit of {self}")
        return self.constant(1 / e.constant_term())

    def format(self, e):
        return str(self(e))

    def sort_key(self, mono):
        """Graded lexicographic key (larger sorts first when reversed)."""
        exps = [0] * len(self.var_names)
        for v, k in mono:
            exps[v] = k
        return (sum(exps), tuple(exps))


class PolynomialRing(_PolyRingBase):
    """``Q[v1, ..., vn]`` with the zero derivation."""

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names) or not names:
            raise ValueError("polynomial ring needs distinct variable names")
        self.var_names = names

    def __repr__(self):
        return f"QQ[{', '.join(self.var_names)}]"

    def __eq__(self, other):
        return isinstance(other, PolynomialRing) and other.var_names == self.var_names

    def __hash__(self):
        return hash(("poly", self.var_names))

    def derive(self, e):
        return self.zero()


class DiffPolynomialRing(_PolyRingBase):
    """Differential polynomials in jets ``u^(j)``, ``0 <= j <= max_jet``.

    Variable index ``s * (max_jet + 1) + j`` is the ``j``-th jet of symbol
    ``s``. Differentiating a jet of order ``max_jet`` raises
    :class:`JetOrderExceeded` instead of growing the ring.
    """

    def __init__(self, symbols, max_jet: int = 6):
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols) or not symbols:
            raise ValueError("need distinct function symbols")
        if max_jet < 0:
            raise ValueError("max_jet must be >= 0")
        self.symbols = symbols
        self.max_jet = max_jet
        self.var_names = tuple(
            s + "'" * j for s in symbols for j in range(max_jet + 1)
        )

    def __repr__(self):
        return f"QQ{{{', '.join(self.symbols)}; jets<={self.max_jet}}}"

    def __eq__(self, other):
        return (
            isinstance(other, DiffPolynomialRing)
            and other.symbols == self.symbols
            and other.max_jet == self.max_jet
        )

    def __hash__(self):
        return hash(("diffpoly", self.symbols, self.max_jet))

    def jet(self, symbol: str, order: int = 0) -> "Poly":
        if order > self.max_jet:
            raise JetOrderExceeded(f"{symbol} jet {order} exceeds bound {self.max_jet}")
        return self.var(self.symbols.index(symbol) * (self.max_jet + 1) + order)

    def derive(self, e):
        e = self(e)
        width = self.max_jet + 1
        out = {}
        for mono, c in e.terms.items():
            for pos, (v, k) in enumerate(mono):
                if v % width == self.max_jet:
                    raise JetOrderExceeded(
                        f"derivative of {self.var_names[v]} exceeds jet bound {self.max_jet}"
                    )
                rest = list(mono)
                if k == 1:
                    del rest[pos]
                else:
                    rest[pos] = (v, k - 1)
                new = _mono_mul(tuple(rest), ((v + 1, 1),))
                out[new] = out.get(new, _ZERO) + c * k
        return Poly(self, {m: c for m, c in out.items() if c})


def _mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ka = a[i]
        vb, kb = b[j]
        if va == vb:
            out.append((va, ka + kb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


class Poly:
    """Sparse polynomial over Q; monomial -> coefficient, zeros never stored."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._hash = None

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, MPQ, MPZ, Fraction)):
            return self.ring.constant(other)
        return None

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_term(self):
        return self.terms.get((), _ZERO)

    def degree(self):
        return max((sum(k for _, k in m) for m in self.terms), default=-1)

    def degree_in(self, index):
        return max((k for m in self.terms for v, k in m if v == index), default=0)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, _ZERO) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, MPQ, MPZ, Fraction)):
            c = qq(other)
            if not c:
                return Poly(self.ring, {})
            return Poly(self.ring, {m: v * c for m, v in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, _ZERO) + ca * cb
        return Poly(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, MPQ, MPZ, Fraction)):
            return self * (1 / qq(other))
        if isinstance(other, Poly) and other.is_constant() and other.constant_term():
            return self * (1 / other.constant_term())
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomials only support nonnegative integer powers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, MPQ, MPZ, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_term())
            else:
                self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def coefficient(self, **exps):
        """Coefficient of the monomial given by ``name=exponent`` pairs."""
        mono = tuple(sorted((self.ring.var_index(k), v) for k, v in exps.items() if v))
        return self.terms.get(mono, _ZERO)

    def substitute(self, values: dict, target: Ring | None = None):
        """Evaluate variables given by name; the rest stay symbolic.

        Returns an element of ``target`` (default: this ring, or ``QQ`` when
        every variable is substituted by a rational).
        """
        names = self.ring.var_names
        out = None
        for mono, c in self.terms.items():
            term = c
            for v, k in mono:
                name = names[v]
                if name in values:
                    term = term * values[name] ** k
                else:
                    term = term * self.ring.var(v) ** k
            out = term if out is None else out + term
        if out is None:
            out = _ZERO
        if target is not None:
            return target(out)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.ring.sort_key(kv[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.var_names
        pieces = []
        for mono, c in self.sorted_terms():
            factors = []
            for v, k in mono:
                factors.append(names[v] if k == 1 else f"{names[v]}^{k}")
            body = "*".join(factors)
            mag = abs(c)
            if not body:
                text = format_rational(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{format_rational(mag)}*{body}"
            pieces.append(("-" if c < 0 else "+", text))
        sign, first = pieces[0]
        out = ("-" if sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"Poly({self})"


# ---------------------------------------------------------------------------
# power series in x


class XSeriesRing(Ring):
    """``base[[x]]`` truncated at a default precision, with ``d/dx``."""

    exact = False

    def __init__(self, base: Ring = QQ, prec: int = 16):
        if isinstance(base, XSeriesRing):
            raise UnsupportedRing("nested x-series rings are not supported")
        if prec < 0:
            raise ValueError("precision must be >= 0")
        self.base = base
        self.prec = prec

    def __repr__(self):
        return f"{self.base!r}[[x]]/x^{self.prec}"

    def __eq__(self, other):
        # the default precision is a construction convenience, not part of the ring
        return isinstance(other, XSeriesRing) and other.base == self.base

    def __hash__(self):
        return hash(("xseries", self.base))

    def with_prec(self, prec: int) -> "XSeriesRing":
        return XSeriesRing(self.base, prec)

    def zero(self, prec=None):
        p = self.prec if prec is None else prec
        return XSeries(self, (self.base.zero(),) * p, p)

    def one(self, prec=None):
        return self.constant(1, prec)

    def constant(self, c, prec=None):
        p = self.prec if prec is None else prec
        z = self.base.zero()
        if p == 0:
            return XSeries(self, (), 0)
        return XSeries(self, (self.base(c),) + (z,) * (p - 1), p)

    def x(self, prec=None):
        return self.from_coeffs([0, 1], prec)

    def from_coeffs(self, coeffs, prec=None):
        p = self.prec if prec is None else prec
        cs = [self.base(c) for c in coeffs[:p]]
        cs.extend([self.base.zero()] * (p - len(cs)))
        return XSeries(self, tuple(cs), p)

    def exp(self, c, prec=None):
        """Truncated ``exp(c*x)`` with exact coefficients ``c^i / i!``."""
        p = self.prec if prec is None else prec
        c = self.base(c)
        out = []
        power = self.base.one()
        for i in range(p):
            out.append(power * qq(mpq(1, factorial(i))))
            power = power * c
        return XSeries(self, tuple(out), p)

    def __call__(self, value):
        if isinstance(value, XSeries):
            if value.ring != self:
                raise RingMismatch(f"{value.ring} vs {self}")
            return value
        return self.constant(value)

    def derive(self, e):
        return self(e).derive()

    def integrate_zero(self, e):
        return self(e).integrate()

    def eval_at_zero(self, e):
        return self(e).constant_term()

    def is_zero(self, e):
        return self(e).is_zero()

    def is_unit(self, e):
        e = self(e)
        return e.prec >= 1 and self.base.is_unit(e.coeffs[0])

    def inverse(self, e):
        return self(e).inverse()

    def format(self, e):
        return str(self(e))


class XSeries:
    """Power series in ``x`` known modulo ``x^prec``.

    ``coeffs`` always has exactly ``prec`` entries. Arithmetic reports the
    largest precision provable from the inputs (valuations included).
    """

    __slots__ = ("ring", "coeffs", "prec")

    def __init__(self, ring: XSeriesRing, coeffs: tuple, prec: int):
        self.ring = ring
        self.coeffs = coeffs
        self.prec = prec

    # -- basic queries
    def valuation(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return self.prec

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_constant(self) -> bool:
        return not any(self.coeffs[1:])

    def constant_term(self):
        if self.prec < 1:
            raise ZeroPrecision("nothing is known about the constant term")
        return self.coeffs[0]

    def __getitem__(self, i):
        if i >= self.prec:
            raise ZeroPrecision(f"coefficient x^{i} lies beyond precision {self.prec}")
        return self.coeffs[i] if i >= 0 else self.ring.base.zero()

    def truncate(self, prec: int) -> "XSeries":
        if prec >= self.prec:
            return self
        prec = max(prec, 0)
        return XSeries(self.ring, self.coeffs[:prec], prec)

    def eq_within(self, other) -> bool:
        """Agreement on the common known window."""
        other = self._coerce(other)
        p = min(self.prec, other.prec)
        return self.coeffs[:p] == other.coeffs[:p]

    def __eq__(self, other):
        if isinstance(other, XSeries):
            return self.ring == other.ring and self.prec == other.prec and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.prec, self.coeffs))

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, XSeries):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return None

    def _scalar(self, other):
        if isinstance(other, (int, MPQ, MPZ, Fraction, Poly)):
            return self.ring.base(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            c = self._scalar(other)
            if c is None:
                return NotImplemented
            if self.prec == 0:
                return self
            return XSeries(self.ring, (self.coeffs[0] + c,) + self.coeffs[1:], self.prec)
        p = min(self.prec, o.prec)
        a, b = self.coeffs, o.coeffs
        return XSeries(self.ring, tuple(a[i] + b[i] for i in range(p)), p)

    __radd__ = __add__

    def __neg__(self):
        return XSeries(self.ring, tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            c = self._scalar(other)
            if c is None:
                return NotImplemented
            return self + (-c)
        p = min(self.prec, o.prec)
        a, b = self.coeffs, o.coeffs
        return XSeries(self.ring, tuple(a[i] - b[i] for i in range(p)), p)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "XSeries":
        c = self.ring.base(c)
        return XSeries(self.ring, tuple(x * c for x in self.coeffs), self.prec)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            c = self._scalar(other)
            if c is None:
                return NotImplemented
            return self.scale(c)
        va, vb = self.valuation(), o.valuation()
        p = min(self.prec + vb, o.prec + va)
        zero = self.ring.base.zero()
        if va >= self.prec or vb >= o.prec:
            return XSeries(self.ring, (zero,) * p, p)
        a, b = self.coeffs, o.coeffs
        out = [zero] * p
        top_a = min(self.prec, p - vb)
        for i in range(va, top_a):
            ai = a[i]
            if not ai:
                continue
            for j in range(vb, min(o.prec, p - i)):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return XSeries(self.ring, tuple(out), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, XSeries):
            return self * other.inverse()
        c = self._scalar(other)
        if c is None:
            return NotImplemented
        return self.scale(self.ring.base.inverse(c))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer exponent required")
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one(self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "XSeries":
        """Units are exactly the series with invertible constant term."""
        if self.prec < 1:
            raise NonUnit("zero-precision series cannot be inverted")
        base = self.ring.base
        s0 = self.coeffs[0]
        if not base.is_unit(s0):
            raise NonUnit(f"constant term {base.format(s0)} is not a unit")
        inv0 = base.inverse(s0)
        s = self.coeffs
        t = [inv0]
        for l in range(1, self.prec):
            acc = base.zero()
            for j in range(l):
                if s[l - j]:
                    acc += s[l - j] * t[j]
            t.append(-acc * inv0)
        return XSeries(self.ring, tuple(t), self.prec)

    def derive(self) -> "XSeries":
        if self.prec <= 1:
            return XSeries(self.ring, (), 0)
        return XSeries(
            self.ring, tuple(self.coeffs[i] * i for i in range(1, self.prec)), self.prec - 1
        )

    def integrate(self) -> "XSeries":
        """Antiderivative with zero constant term; precision grows by one."""
        cs = (self.ring.base.zero(),) + tuple(
            c * mpq(1, i + 1) for i, c in enumerate(self.coeffs)
        )
        return XSeries(self.ring, cs, self.prec + 1)

    def map_coeffs(self, fn, ring: XSeriesRing | None = None) -> "XSeries":
        ring = ring or self.ring
        return XSeries(ring, tuple(fn(c) for c in self.coeffs), self.prec)

    def __str__(self):
        base = self.ring.base
        pieces = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            cs = base.format(c)
            mon = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mon:
                pieces.append(cs)
            elif c == 1:
                pieces.append(mon)
            elif c == -1:
                pieces.append("-" + mon)
            elif isinstance(c, Poly) and len(c.terms) > 1:
                pieces.append(f"({cs})*{mon}")
            else:
                pieces.append(f"{cs}*{mon}")
        body = " + ".join(pieces).replace("+ -", "- ") if pieces else "0"
        return f"{body} + O({'x' if self.prec == 1 else f'x^{self.prec}'})"

    def __repr__(self):
        return f"XSeries({self})"


def derive(e, ring: Ring | None = None):
    """Derivation of ``e`` in its ring (``QQ`` for bare rationals)."""
    return _owner(e, ring).derive(e)


def integrate_zero(e, ring: Ring | None = None):
    return _owner(e, ring).integrate_zero(e)


def eval_at_zero(e, ring: Ring | None = None):
    return _owner(e, ring).eval_at_zero(e)


def _owner(e, ring):
    if ring is not None:
        return ring
    if isinstance(e, (XSeries, Poly)):
        return e.ring
    return QQ


def ring_of(e) -> Ring:
    return _owner(e, None)
