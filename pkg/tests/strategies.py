"""Hypothesis strategies and sympy oracles shared by the test modules."""

import sympy
from gmpy2 import mpq
from hypothesis import strategies as st

from sato.pdo import PseudoOp
from sato.ring import QQ, XSeries, XSeriesRing
from sato.series import TruncLaurent

small_ints = st.integers(min_value=-5, max_value=5)
rationals = st.builds(lambda p, q: mpq(p, q), st.integers(-9, 9), st.integers(1, 4))
nonzero_rationals = rationals.filter(lambda q: q != 0)


@st.composite
def xseries(draw, prec=8, unit=False, ring=None):
    ring = ring or XSeriesRing(QQ, prec)
    coeffs = draw(st.lists(rationals, min_size=prec, max_size=prec))
    if unit and coeffs[0] == 0:
        coeffs[0] = mpq(1)
    return XSeries(ring, tuple(coeffs), prec)


@st.composite
def laurent(draw, length=8, low=None, monic=False, unit=False, var="z"):
    low = draw(st.integers(-4, 3)) if low is None else low
    coeffs = draw(st.lists(rationals, min_size=length, max_size=length))
    if monic:
        coeffs[0] = mpq(1)
    elif unit and coeffs[0] == 0:
        coeffs[0] = draw(nonzero_rationals)
    return TruncLaurent(QQ, var, low, coeffs)


@st.composite
def operators(draw, depth=6, xprec=8, top=None, unit=True, monic=False):
    ring = XSeriesRing(QQ, xprec)
    top = draw(st.integers(-2, 3)) if top is None else top
    terms = [draw(xseries(xprec, ring=ring)) for _ in range(depth)]
    if monic:
        terms[0] = ring.one()
    elif unit and terms[0].coeffs[0] == 0:
        terms[0] = terms[0] + 1
    return PseudoOp(ring, top, terms)


X = sympy.Symbol("x")


def to_sympy_series(s: XSeries):
    return sum(sympy.Rational(int(c.numerator), int(c.denominator)) * X**i
               for i, c in enumerate(s.coeffs))


def sympy_coeffs(expr, n):
    """First ``n`` Taylor coefficients of ``expr`` at ``x = 0``."""
    poly = sympy.series(expr, X, 0, n).removeO()
    return [sympy.Rational(poly.coeff(X, i)) for i in range(n)]


def as_mpq(r):
    r = sympy.Rational(r)
    return mpq(int(r.p), int(r.q))
