import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from sato.curvelab import (
    constant_conjugate_test,
    eigen_check,
    elliptic_family,
    elliptic_point_pair,
    functional_eigen,
    gap_genus,
    kdv_eliminate,
    kdv_ring,
    kdv_residual,
    kdv_system,
    pointwise_eigen,
    singular_cubic,
)
from sato.errors import DepthTooSmall, UnstableBound, WrongShape
from sato.normalize import conjugate_by_unit, gauge_first_order
from sato.pdo import PseudoOp, invert, multiply
from sato.ring import QQ, PolynomialRing, XSeriesRing
from sato.schur import BigCellBasis, EmbeddedSchurPair, mu_inverse, validate_pair
from sato.series import TruncLaurent
from strategies import nonzero_rationals, rationals, xseries

XP = 12
R = XSeriesRing(QQ, XP)
x = R.x()


def y(terms, g=24):
    return TruncLaurent.from_dict(QQ, "y", terms, g)


def op(coeffs, depth=10, ring=R):
    return PseudoOp.from_dict(ring, coeffs, depth)


# -- gaps


def test_gap_examples():
    p = gap_genus([y({-1: 1})])
    assert p.gaps == () and p.genus == 0
    p = gap_genus([y({-2: 1}), y({-3: 1})])
    assert p.gaps == (1,) and p.genus == 1 and p.conductor == 2
    p = gap_genus([y({-2: 1}), y({-5: 1})])
    assert p.gaps == (1, 3) and p.genus == 2


def test_gap_unstable_bound():
    with pytest.raises(UnstableBound):
        gap_genus([y({-5: 1}), y({-7: 1})], bound=20)


def brute_force_gaps(orders, bound):
    reach = {0}
    for n in range(1, bound + 1):
        if any(n - a in reach for a in orders if a <= n):
            reach.add(n)
    return tuple(n for n in range(bound + 1) if n not in reach)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 6), min_size=2, max_size=3), st.lists(nonzero_rationals, min_size=3, max_size=3))
def test_gap_invariances(orders, units):
    gens = [y({-k: 1}) for k in orders]
    bound = 40
    want = brute_force_gaps(orders, bound)
    if 2 * (max(want, default=-1) + 1) > bound:
        return
    p = gap_genus(gens, bound)
    assert p.gaps == want
    # unit multiples and a redundant product give the same monoid
    scaled = [g.scale(u) for g, u in zip(gens, units)]
    assert gap_genus(scaled, bound).gaps == want
    assert gap_genus(gens + [gens[0] * gens[-1]], bound).gaps == want


# -- elliptic family


def test_elliptic_family():
    data = elliptic_family(12)
    A, B = data.ring.gen("A"), data.ring.gen("B")
    assert data.y0_series.coeff(3) == 1
    assert data.y0_series.coeff(7) == A
    assert all(data.checks.values()), data.report()
    want = TruncLaurent.from_dict(data.ring, "alpha", {-2: 1, 2: A, 4: B}, data.inv_y1_squared.guaranteed)
    assert data.inv_y1_squared.eq_within(want)
    with pytest.raises(DepthTooSmall):
        elliptic_family(4)


def test_elliptic_fixed_point_stability():
    a = elliptic_family(8).y0_series
    b = elliptic_family(12).y0_series
    assert b.eq_within(a)


def test_elliptic_point_pair_is_valid():
    pr = elliptic_point_pair((2, 3), 0, 1, 12)
    assert validate_pair(pr).valid
    B = mu_inverse(pr)
    assert [P.normalized().top for P in B] == [2, 3]
    assert constant_conjugate_test(B) is None


# -- singular cubics


def test_singular_cubic_tags():
    assert singular_cubic(0).tag == "cusp"
    a, b = singular_cubic(0).generators
    assert a.eq_within(y({-2: 1})) and b.eq_within(y({-3: 1}))
    assert singular_cubic(1).tag == "node"
    P = PolynomialRing(["delta"])
    assert singular_cubic(P.gen("delta")).tag == "parametric"


@pytest.mark.parametrize("delta", [0, 1, mpq(-2, 3)])
def test_singular_cubic_admits_constant_conjugation(delta):
    alg = singular_cubic(delta)
    W = BigCellBasis.standard(QQ, 16)
    B = mu_inverse(EmbeddedSchurPair(alg, W, 1))
    T = constant_conjugate_test(B)
    assert T is not None
    assert gap_genus(alg).gaps == (1,)


# -- KdV


def test_kdv_system():
    sysm = kdv_system()
    R = kdv_ring()
    j = R.jet
    assert sysm.coefficients[3] == sysm.sign * 2 * j("alpha", 1)
    assert sysm.coefficients[2] == sysm.sign * (j("alpha", 2) + 2 * j("beta", 1) - 3 * j("v", 1))
    const = {n: R.zero() for n in ("v", "alpha'", "beta'", "gamma'", "v'", "v''", "v'''",
                                   "alpha''", "beta''", "gamma''")}
    for k, c in sysm.coefficients.items():
        assert c.substitute(const, R) == 0


def test_kdv_elimination():
    remaining, _ = kdv_eliminate()
    R = kdv_ring()
    beta = R.jet("beta")
    # alpha drops out; what is left is the residual at -beta
    assert remaining == kdv_residual(-beta, R)
    assert remaining != kdv_residual(beta, R)


def test_kdv_residual_examples():
    assert kdv_residual(mpq(5), QQ) == 0
    assert kdv_residual(R.constant(3)).is_zero()
    assert kdv_residual(x).eq_within(x * mpq(-2, 3))


# -- constant conjugation


def test_constant_conjugate_trivial():
    B = [op({2: 1}), op({3: 1, 1: 2})]
    T = constant_conjugate_test(B)
    assert T is not None and T.eq_within(op({0: 1}))


@settings(max_examples=10, deadline=None)
@given(rationals, xseries(XP, ring=R))
def test_constant_conjugate_gauge(d, u):
    f = gauge_first_order(u)
    B = [conjugate_by_unit(P, f) for P in (op({2: 1}), op({3: 1, 1: d}))]
    T = constant_conjugate_test(B)
    assert T is not None
    Ti = invert(T)
    for P in B:
        Q = multiply(multiply(T, P), Ti)
        assert Q.has_constant_coefficients() and Q.is_differential()


def test_constant_conjugate_shape_errors():
    with pytest.raises(WrongShape):
        constant_conjugate_test([op({1: 1})])
    with pytest.raises(WrongShape):
        constant_conjugate_test([op({2: 1})])


# -- eigenfunctions


def test_eigen_examples():
    c = mpq(3, 2)
    R16 = XSeriesRing(QQ, 16)
    assert eigen_check([op({1: 1}, ring=R16)], R16.exp(c), [c])
    assert eigen_check([op({2: 1})], R.one(), [0])
    assert not eigen_check([op({1: 1})], x, [1])


@settings(max_examples=20, deadline=None)
@given(rationals, rationals, st.booleans())
def test_eigen_formulations_agree(c, lam, honest):
    f = R.exp(c)
    B = [op({2: 1}), op({3: 1, 1: 1})]
    lams = [c * c, c**3 + c] if honest else [lam, lam]
    assert pointwise_eigen(B, f, lams) == functional_eigen(B, f, lams)
