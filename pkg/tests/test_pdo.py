import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from sato.errors import NonUnitLeading, RingMismatch, UnsupportedRing, ZeroPrecision
from sato.pdo import (
    PseudoOp,
    act,
    commutator,
    constant_lift,
    invert,
    left_normal_form,
    multiply,
    sigma,
)
from sato.ring import QQ, DiffPolynomialRing, XSeries, XSeriesRing
from sato.series import TruncLaurent
from strategies import X, as_mpq, operators, rationals, to_sympy_series

XP = 12
R = XSeriesRing(QQ, XP)
x = R.x()


def op(coeffs, depth=8, top=None):
    return PseudoOp.from_dict(R, coeffs, depth, top)


def D(n=1, depth=8):
    return PseudoOp.d(R, n, depth)


def y_series(terms, g):
    return TruncLaurent.from_dict(QQ, "y", terms, g)


# -- independent product oracle: the generalized Leibniz sum in sympy


def naive_product(P, Q, depth):
    a = [to_sympy_series(t) for t in P.terms]
    b = [to_sympy_series(t) for t in Q.terms]
    M = P.top
    out = []
    for l in range(depth):
        acc = 0
        for m in range(l + 1):
            for i in range(l - m + 1):
                acc += sympy.binomial(M - m, i) * a[m] * sympy.diff(b[l - m - i], X, i)
        out.append(sympy.expand(acc))
    return out


@st.composite
def poly_operators(draw, depth=5):
    top = draw(st.integers(-2, 3))
    terms = []
    for _ in range(depth):
        cs = draw(st.lists(rationals, min_size=3, max_size=3))
        terms.append(R.from_coeffs(cs + [0] * (XP - 3)))
    return PseudoOp(R, top, terms)


@settings(max_examples=40, deadline=None)
@given(poly_operators(), poly_operators())
def test_product_matches_naive_leibniz(P, Q):
    got = multiply(P, Q)
    want = naive_product(P, Q, got.depth)
    assert got.top == P.top + Q.top
    for t, w in zip(got.terms, want):
        for j in range(t.prec):
            assert t.coeffs[j] == as_mpq(w.coeff(X, j))


def apply_diff(P, g):
    """Apply a differential operator with (polynomial) x-series coefficients to a sympy g."""
    out = 0
    for m, t in enumerate(P.terms):
        k = P.top - m
        if k < 0:
            break
        out += to_sympy_series(t) * sympy.diff(g, X, k)
    return sympy.expand(out)


def test_product_acts_as_composition():
    P = op({2: 1, 1: x, 0: 3 * x * x}, depth=6)
    Q = op({1: 1 + x, 0: x}, depth=5)
    g = sympy.exp(2 * X) * (1 + X**3)
    PQ = multiply(P, Q)
    assert PQ.low_exp <= 0 and PQ.is_differential()
    lhs = sympy.series(apply_diff(PQ, g), X, 0, 6).removeO()
    rhs = sympy.series(apply_diff(P, apply_diff(Q, g)), X, 0, 6).removeO()
    assert sympy.expand(lhs - rhs) == 0


# -- multiply examples


def test_d_times_x():
    assert multiply(D(), op({0: x})).eq_within(op({1: x, 0: 1}))


def test_dinv_times_x():
    P = multiply(D(-1), op({0: x}))
    assert P.coeff(-1).eq_within(x)
    assert P.coeff(-2).eq_within(R.constant(-1))
    assert P.coeff(-3).is_zero()
    # left-multiplying by D gives x back
    assert multiply(D(), P).eq_within(op({0: x}))


def test_d2_dm2():
    assert multiply(D(2), D(-2)).eq_within(op({0: 1}))


def test_ring_mismatch():
    S = XSeriesRing(DiffPolynomialRing(["u"], 2), 4)
    with pytest.raises(RingMismatch):
        multiply(D(), PseudoOp.d(S, 1, 3))


# -- normal forms


def test_left_normal_form_examples():
    L = left_normal_form(op({1: x}, depth=3))
    assert L.terms[0].eq_within(x) and L.terms[1].eq_within(R.constant(-1))
    L = left_normal_form(D(3))
    assert all(t.is_constant() for t in L.terms)
    L = left_normal_form(op({2: x * x}, depth=3))
    assert L.terms[0].eq_within(x * x)
    assert L.terms[1].eq_within(-4 * x)
    assert L.terms[2].eq_within(R.constant(2))


@settings(max_examples=40, deadline=None)
@given(operators(depth=6, xprec=10))
def test_normal_form_round_trip(P):
    L = left_normal_form(P)
    back = L.to_right()
    assert back.eq_within(P)
    assert L.top == P.top
    assert L.terms[0].eq_within(P.terms[0])


# -- inversion


def test_invert_examples():
    assert invert(op({0: 1})).eq_within(op({0: 1}))
    T = op({0: 1, -1: x})
    Ti = invert(T)
    assert Ti.coeff(-1).eq_within(-x)
    one = op({0: 1})
    assert multiply(T, Ti).eq_within(one) and multiply(Ti, T).eq_within(one)
    with pytest.raises(NonUnitLeading):
        invert(op({1: x, 0: 1}))


@settings(max_examples=40, deadline=None)
@given(operators(depth=8, xprec=10))
def test_invert_both_sides_and_unique(P):
    Q = invert(P)
    one = PseudoOp.scalar(R, 1, 8)
    assert multiply(P, Q).eq_within(one)
    assert multiply(Q, P).eq_within(one)
    # a second route: invert D^-N P and multiply by D^-N
    Q2 = multiply(invert(multiply(PseudoOp.d(R, -P.top, 8), P)), PseudoOp.d(R, -P.top, 8))
    assert Q2.eq_within(Q)


@settings(max_examples=30, deadline=None)
@given(operators(depth=6, xprec=10), operators(depth=6, xprec=10), operators(depth=6, xprec=10))
def test_associativity(P, Q, S):
    assert multiply(multiply(P, Q), S).eq_within(multiply(P, multiply(Q, S)))


@settings(max_examples=30, deadline=None)
@given(operators(depth=6, monic=True), operators(depth=6, monic=True))
def test_order_additive(P, Q):
    assert multiply(P, Q).order() == P.order() + Q.order()


# -- sigma and act


def test_sigma_examples():
    assert sigma(op({1: x, 0: 1})).eq_within(y_series({0: 1}, 6))
    assert sigma(op({2: 1, 1: x * x})).eq_within(y_series({-2: 1}, 5))
    assert sigma(D(-1)).eq_within(y_series({1: 1}, 8))
    with pytest.raises(ZeroPrecision):
        sigma(PseudoOp(R, 0, [XSeries(R, (), 0)]))
    with pytest.raises(UnsupportedRing):
        sigma(PseudoOp.d(DiffPolynomialRing(["u"], 2), 1, 2))


def test_act_examples():
    assert act(D(), y_series({1: 1}, 8)).eq_within(y_series({0: 1}, 8))
    assert act(op({1: x}), y_series({0: 1}, 8)).is_zero()
    T = op({0: 1, -1: x})
    got = act(T, y_series({-1: 1}, 8))
    assert got.eq_within(y_series({-1: 1, 1: 1}, 5))


def test_act_constant_coefficients_is_multiplication():
    P = op({2: 1, 0: 3, -1: mpq(1, 2)})
    v = y_series({-1: 1, 0: 2, 2: 5}, 6)
    assert act(P, v).eq_within(sigma(P) * v)


@settings(max_examples=30, deadline=None)
@given(operators(depth=6, xprec=10), st.lists(rationals, min_size=4, max_size=4),
       st.lists(rationals, min_size=4, max_size=4))
def test_act_independent_of_lift(P, vs, noise):
    v = TruncLaurent(QQ, "y", -1, vs)
    Q = constant_lift(R, v)
    # add an element of x*E: coefficients vanishing at 0
    E = PseudoOp(R, 1, [x * c for c in noise])
    Q2 = Q + E
    assert sigma(multiply(Q, P)).eq_within(sigma(multiply(Q2, P)))


@settings(max_examples=30, deadline=None)
@given(operators(depth=8, xprec=10, top=0), st.integers(-2, 2))
def test_order_zero_act_preserves_filtration(P, n):
    v = y_series({n: 1}, n + 6)
    w = act(P, v)
    assert w.valuation() == n
    # bijective: the inverse operator undoes it
    assert act(invert(P), w).eq_within(v)


# -- commutator and differential test


def test_commutator_examples():
    assert commutator(D(), op({0: x})).eq_within(op({0: 1}))
    assert commutator(D(2), D(3)).is_zero()
    V = DiffPolynomialRing(["v"], 4)
    v = V.jet("v")
    C = commutator(PseudoOp.d(V, 2, 4), PseudoOp.scalar(V, v, 4)).normalized()
    assert C.top == 1
    assert C.terms[0] == 2 * V.jet("v", 1) and C.terms[1] == V.jet("v", 2)


def test_is_differential_examples():
    assert op({2: 1, 0: x}).is_differential()
    assert not D(-1).is_differential()
    assert not op({0: 1, -1: x}).is_differential()


@settings(max_examples=30, deadline=None)
@given(operators(depth=6, xprec=10, top=2), st.booleans())
def test_sato_criterion(P, make_differential):
    if make_differential:
        P = PseudoOp(R, P.top, [t if P.top - m >= 0 else R.zero() for m, t in enumerate(P.terms)])
    # P preserves sigma(D) = span{y^-n : n >= 0} iff it is differential
    preserved = True
    for Q in (op({0: 1}), D(1), D(2), D(3), op({1: 1 + x, 0: x})):
        image = act(P, sigma(Q))
        if any(e > 0 for e, _ in image.items()):
            preserved = False
    assert preserved == P.is_differential()


def test_printing():
    assert str(op({1: x, 0: 1}, depth=3)) == "(x)*D + 1 + O(D^-2)"
