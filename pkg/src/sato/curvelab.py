"""Worked examples: gap sequences, an elliptic family, singular cubics,
the stationary KdV system and common eigenfunctions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import sympy
from gmpy2 import mpq

from .errors import (
    ConsistencyError,
    DepthTooSmall,
    IndeterminateOrder,
    NotDifferential,
    UnstableBound,
    WrongShape,
)
from .normalize import admissible_root, conjugator_to_power
from .pdo import PseudoOp, invert, multiply, sigma
from .ring import (
    QQ,
    DiffPolynomialRing,
    Poly,
    PolynomialRing,
    XSeries,
    derive,
    qq,
)
from .schur import (
    BigCellBasis,
    EmbeddedSchurPair,
    PureRankAlgebra,
    echelon,
)
from .series import TruncLaurent, invert as invert_series, nth_root, order_of, revert


# ---------------------------------------------------------------------------
# gaps and genus


@dataclass(frozen=True)
class GapProfile:
    achievable: tuple
    gaps: tuple
    genus: int
    conductor: int
    bound: int


def gap_genus(algebra, bound: int = 20) -> GapProfile:
    """Orders realised by the algebra up to ``bound``.

    Orders come from an echelon form of the generator monomials (so that
    cancellations between monomials are seen) and are then closed under
    addition.
    """
    if not isinstance(algebra, PureRankAlgebra):
        gens = list(algebra)
        algebra = PureRankAlgebra(gens[0].ring, gens)
    monos = [s for _, s in algebra.products(bound)]
    piv = echelon(monos, unit_pivots=False)
    found = {-e for e in piv if 0 <= -e <= bound}
    found.add(0)
    reach = [False] * (bound + 1)
    reach[0] = True
    for n in range(1, bound + 1):
        reach[n] = n in found or any(reach[a] and reach[n - a] for a in found if 0 < a < n)
    achievable = tuple(n for n in range(bound + 1) if reach[n])
    gaps = tuple(n for n in range(bound + 1) if not reach[n])
    conductor = 0
    for n in range(bound, -1, -1):
        if not reach[n]:
            conductor = n + 1
            break
    if 2 * conductor > bound:
        raise UnstableBound(f"bound {bound} is below twice the conductor {conductor}")
    return GapProfile(achievable, gaps, len(gaps), conductor, bound)


# ---------------------------------------------------------------------------
# elliptic family y0 = y1^3 + A y0^2 y1 + B y0^3


@dataclass
class EllipticLocalData:
    ring: object
    y0_series: TruncLaurent
    alpha_series: TruncLaurent
    y1_of_alpha: TruncLaurent
    gen1: TruncLaurent
    gen2: TruncLaurent
    inv_y1_squared: TruncLaurent
    checks: dict = field(default_factory=dict)

    def report(self) -> str:
        lines = [
            f"y0(y1)      = {self.y0_series}",
            f"alpha(y1)   = {self.alpha_series}",
            f"y1(alpha)   = {self.y1_of_alpha}",
            f"1/y1^2      = {self.inv_y1_squared}",
            f"gen1        = {self.gen1}",
            f"gen2        = {self.gen2}",
        ]
        for name, ok in self.checks.items():
            lines.append(f"[{'ok' if ok else 'FAIL'}] {name}")
        return "\n".join(lines)


def elliptic_family(depth: int = 12, specialize: dict | None = None) -> EllipticLocalData:
    """Local expansions at the point at infinity of ``z0 z2^2 = z1^3 + A z0^2 z1 + B z0^3``.

    ``specialize`` maps ``"A"``/``"B"`` to rationals; when both are given the
    result lives over ``QQ``.
    """
    if depth < 6:
        raise DepthTooSmall("depth must be at least 6")
    R = PolynomialRing(["A", "B"])
    A, B = R.gen("A"), R.gen("B")
    G = depth + 6
    y1 = TruncLaurent.monomial(R, "y1", 1, G)
    y0 = TruncLaurent.empty(R, "y1", G)
    for _ in range(G):
        nxt = y1**3 + (y0 * y0 * y1).scale(A) + (y0 * y0 * y0).scale(B)
        nxt = nxt.truncate(G)
        if nxt == y0:
            break
        y0 = nxt
    base = R
    if specialize:
        values = {k: qq(v) for k, v in specialize.items()}
        target = QQ if set(values) >= {"A", "B"} else R

        def sub(c):
            return c.substitute(values, target)

        y0 = y0.map_coeffs(sub, target)
        base = target
        A = sub(A)
        B = sub(B)
    ratio = y0 * invert_series(TruncLaurent.monomial(base, "y1", 1, G))
    alpha = nth_root(ratio, 2)
    y1a = revert(alpha).rename("alpha")
    inv_y1 = invert_series(y1a)
    inv_sq = inv_y1 * inv_y1
    top = inv_sq.guaranteed
    gen1 = TruncLaurent.monomial(base, "alpha", -2, top + 8)
    gen2 = gen1 * inv_y1
    expected = TruncLaurent.from_dict(base, "alpha", {-2: 1, 2: A, 4: B}, top)
    affine = gen2 * gen2 - gen1 * gen1 * gen1 - gen1.scale(A) - B
    y1 = TruncLaurent.monomial(base, "y1", 1, G)
    data = EllipticLocalData(base, y0, alpha, y1a, gen1, gen2, inv_sq)
    data.checks = {
        "y0 solves the cubic": (
            y0 - (y1**3 + (y0 * y0 * y1).scale(A) + (y0 * y0 * y0).scale(B))
        ).is_zero(),
        "alpha^2 = y0/y1": (alpha * alpha).eq_within(ratio),
        "1/y1^2 = alpha^-2 + A alpha^2 + B alpha^4": inv_sq.eq_within(expected),
        "gen2^2 - gen1^3 - A gen1 - B = 0": affine.is_zero(),
    }
    return data


def elliptic_point_pair(point=(2, 3), A=0, B=1, depth: int = 12) -> EmbeddedSchurPair:
    """Schur pair of the sheaf ``O(Q)`` on a smooth member of the family.

    ``W`` is spanned by the affine ring and ``g = (gen2 + y(Q)) / (gen1 - x(Q))``,
    which has a single simple pole at the point ``Q = (x, y)`` opposite to the
    affine point ``(x, -y)``.
    """
    px, py = qq(point[0]), qq(point[1])
    if py * py != px**3 + qq(A) * px + qq(B):
        raise ValueError(f"{point} is not on the curve")
    data = elliptic_family(depth, {"A": A, "B": B})
    g1 = data.gen1.rename("y")
    g2 = data.gen2.rename("y")
    top = g2.guaranteed
    g1 = g1.truncate(top + 2)
    g = (g2 + py) * invert_series(g1 - px)
    one = TruncLaurent.constant(QQ, "y", 1, top + 3)
    rows = [one, g]
    for n in range(2, depth + 1):
        j = n % 2
        i = (n - 3 * j) // 2
        row = g1**i * g2 if j else g1**i
        if row.guaranteed - row.valuation() < 2:
            break
        rows.append(row)
    W = BigCellBasis(rows)
    algebra = PureRankAlgebra(QQ, [g1, g2], tag="smooth")
    return EmbeddedSchurPair(algebra, W, 1, -1, 0)


# ---------------------------------------------------------------------------
# singular cubics z0 z2^2 = z1 (z1 + delta z0)^2


def singular_cubic(delta, depth: int = 16) -> PureRankAlgebra:
    """``k[y^-2, y^-3 + delta y^-1]`` tagged ``cusp``, ``node`` or ``parametric``."""
    if isinstance(delta, Poly):
        ring = delta.ring
        if delta.is_constant():
            tag = "cusp" if delta.constant_term() == 0 else "node"
        else:
            tag = "parametric"
    else:
        ring = QQ
        delta = qq(delta)
        tag = "cusp" if delta == 0 else "node"
    a = TruncLaurent.monomial(ring, "y", -2, depth - 2)
    b = TruncLaurent.from_dict(ring, "y", {-3: 1, -1: delta}, depth - 3)
    return PureRankAlgebra(ring, [a, b], tag=tag)


# ---------------------------------------------------------------------------
# stationary KdV


def kdv_ring(max_jet: int = 6) -> DiffPolynomialRing:
    return DiffPolynomialRing(["v", "alpha", "beta", "gamma"], max_jet)


def kdv_reference(ring: DiffPolynomialRing | None = None) -> dict:
    """The four equations (coefficients of D^3 .. D^0) written out by hand."""
    R = ring or kdv_ring()
    j = R.jet
    return {
        3: 2 * j("alpha", 1),
        2: j("alpha", 2) + 2 * j("beta", 1) - 3 * j("v", 1),
        1: j("beta", 2) + 2 * j("gamma", 1) - 3 * j("v", 2) - 2 * j("alpha") * j("v", 1),
        0: j("gamma", 2) - j("v", 3) - j("alpha") * j("v", 2) - j("beta") * j("v", 1),
    }


@dataclass(frozen=True)
class KdvSystem:
    coefficients: dict
    sign: int
    convention: str = "[L,P] = L*P - P*L"


def kdv_system(ring: DiffPolynomialRing | None = None) -> KdvSystem:
    """Coefficients of ``[L, P]`` for ``L = D^2 + v``, ``P = D^3 + alpha D^2 + beta D + gamma``.

    The result records the global sign relating them to :func:`kdv_reference`.
    """
    R = ring or kdv_ring()
    j = R.jet
    L = PseudoOp.from_dict(R, {2: R.one(), 0: j("v")}, depth=6)
    P = PseudoOp.from_dict(R, {3: R.one(), 2: j("alpha"), 1: j("beta"), 0: j("gamma")}, depth=6)
    C = multiply(L, P) - multiply(P, L)
    if C.coeff(5) or C.coeff(4):
        raise ConsistencyError("commutator has terms above D^3")
    coeffs = {k: C.coeff(k) for k in (3, 2, 1, 0)}
    ref = kdv_reference(R)
    if all(coeffs[k] == ref[k] for k in ref):
        sign = 1
    elif all(coeffs[k] == -ref[k] for k in ref):
        sign = -1
    else:
        raise ConsistencyError("commutator does not match the reference equations up to sign")
    return KdvSystem(coeffs, sign)


def kdv_residual(beta, ring=None):
    """``(1/6) beta''' - (2/3) beta beta'``."""
    d1 = derive(beta, ring)
    d3 = derive(derive(d1, ring), ring)
    return d3 * mpq(1, 6) - beta * d1 * mpq(2, 3)


def kdv_eliminate(ring: DiffPolynomialRing | None = None):
    """Solve (I)-(III) for ``alpha' = 0``, ``v`` and ``gamma'`` and substitute into (IV).

    Returns ``(remaining, solved)`` where ``remaining`` is a differential
    polynomial in the jets of ``beta`` and ``alpha``.
    """
    R = ring or kdv_ring()
    j = R.jet
    n = R.max_jet
    alpha = j("alpha")
    values = {}
    for k in range(1, n + 1):
        values["alpha" + "'" * k] = R.zero()
    # (II) with alpha' = 0: v' = (2/3) beta'
    for k in range(0, n + 1):
        values["v" + "'" * k] = j("beta", k) * mpq(2, 3)
    # (III): gamma' = beta''/2 + (2/3) alpha beta'
    for k in range(1, n + 1):
        if k + 1 > n:
            break
        values["gamma" + "'" * k] = j("beta", k + 1) * mpq(1, 2) + alpha * j("beta", k) * mpq(2, 3)
    system = kdv_system(R).coefficients
    reduced = {k: system[k].substitute(values, R) for k in system}
    for k in (3, 2, 1):
        if reduced[k]:
            raise ConsistencyError(f"equation at D^{k} does not vanish after substitution")
    return reduced[0], values


# ---------------------------------------------------------------------------
# conjugation to constant coefficients


def _find_order(B, n):
    for P in B:
        try:
            Q = P.normalized()
        except IndeterminateOrder:
            continue
        if Q.top == n and Q.is_monic():
            return Q
    return None


def _constant_differential(ops) -> bool:
    return all(P.has_constant_coefficients() and P.is_differential() for P in ops)


def _to_sympy(p: Poly, c):
    expr = sympy.Integer(0)
    for mono, coeff in p.terms.items():
        term = sympy.Rational(int(coeff.numerator), int(coeff.denominator))
        for _, k in mono:
            term *= c**k
        expr += term
    return expr


def constant_conjugate_test(B, xprec: int | None = None):
    """Search ``T`` with every ``T P T^-1`` differential with constant coefficients.

    Returns ``T`` or ``None`` (nothing found inside the window; not a proof).
    """
    B = list(B)
    if not B:
        raise WrongShape("empty algebra")
    if _find_order(B, 1) is not None:
        raise WrongShape("algebra contains a monic element of order 1")
    P2, P3 = _find_order(B, 2), _find_order(B, 3)
    if P2 is None or P3 is None:
        raise WrongShape("need monic generators of orders 2 and 3")
    ring = P2.ring
    X = conjugator_to_power(P2, 2).conjugator
    Xinv = invert(X)
    conj = [multiply(multiply(Xinv, P), X) for P in B]
    if _constant_differential(conj):
        return Xinv
    if ring.base != QQ:
        return None
    a3 = sigma(multiply(multiply(Xinv, P3), X))
    # a2 = y^-2 = w^2 - c for w = y^-1 sqrt(1 + c y^2); ask for a3 in k[w]
    Rc = PolynomialRing(["c"])
    c = Rc.gen("c")
    top = a3.guaranteed
    s = TruncLaurent.from_dict(Rc, "y", {0: 1, 2: c}, top + 4)
    w = nth_root(s, 2).shift(-1)
    rem = a3.map_coeffs(Rc.constant, Rc)
    powers = {0: TruncLaurent.constant(Rc, "y", 1, top + 4)}
    for k in (1, 2, 3):
        powers[k] = powers[k - 1] * w
    for k in (3, 2, 1, 0):
        b = rem.coeff(-k)
        if b:
            rem = rem - powers[k].scale(b)
    csym = sympy.Symbol("c")
    conditions = [_to_sympy(coeff, csym) for _, coeff in rem.items()]
    if not conditions:
        return None
    g = conditions[0]
    for expr in conditions[1:]:
        g = sympy.gcd(g, expr)
    if g.is_number:
        return None
    roots = [r for r in sympy.roots(sympy.Poly(g, csym), filter="Q")]
    xprec = xprec or min(t.prec for t in X.terms)
    for r0 in roots:
        c0 = mpq(int(sympy.fraction(r0)[0]), int(sympy.fraction(r0)[1]))
        w0 = w.map_coeffs(lambda p: p.substitute({"c": c0}, QQ), QQ)
        T = admissible_root(w0, -1, xprec)
        total = invert(multiply(X, T))
        inv_total = invert(total)
        ops = [multiply(multiply(total, P), inv_total) for P in B]
        if _constant_differential(ops):
            return total
    return None


# ---------------------------------------------------------------------------
# eigenfunctions


def _apply(P: PseudoOp, f: XSeries) -> XSeries:
    """``P(f)`` for a differential operator ``P``."""
    if not P.is_differential():
        raise NotDifferential("only differential operators act on functions")
    out = None
    for m, a in enumerate(P.terms):
        k = P.top - m
        if k < 0:
            break
        g = f
        for _ in range(k):
            g = g.derive()
        term = a * g
        out = term if out is None else out + term
    return out


def pointwise_eigen(B, f: XSeries, lam) -> bool:
    for P, l in zip(B, lam):
        if not _apply(P, f).eq_within(f * f.ring.base(l)):
            return False
    return True


def functional_eigen(B, f: XSeries, lam, samples: int = 4) -> bool:
    """``f(a w) = lambda(P) f(w)`` on sampled rows, with ``f(sigma(D^n S)) = n! f_n``."""
    best = None
    for P in B:
        Q = P.normalized()
        if Q.top > 0 and Q.is_monic() and (best is None or Q.top < best.top):
            best = Q
    if best is None:
        raise WrongShape("no monic element of positive order")
    ring = best.ring
    S = conjugator_to_power(best, best.top).conjugator
    Sinv = invert(S)
    rows = []
    for n in range(S.depth):
        P = multiply(PseudoOp.d(ring, n, S.depth), S)
        terms = []
        for t in P.terms:
            if t.prec < 1:
                break
            terms.append(t)
        if not terms:
            break
        rows.append(sigma(PseudoOp(ring, P.top, terms)))

    def value(n):
        return f[n] * factorial(n)

    for P, l in zip(B, lam):
        a = sigma(multiply(multiply(Sinv, P), S))
        da = order_of(a)
        for n in range(samples):
            if da + n >= len(rows) or da + n >= f.prec:
                break
            v = a * rows[n]
            acc = 0
            for m in range(da + n, -1, -1):
                cm = v.coeff(-m)
                if cm:
                    v = v - rows[m].scale(cm)
                    acc = acc + cm * value(m)
            if not v.is_zero():
                raise ConsistencyError("a * w does not reduce to zero against the rows")
            if acc != value(n) * l:
                return False
    return True


def eigen_check(B, f: XSeries, lam, samples: int = 4) -> bool:
    """Common-eigenfunction test, cross-checked by the functional criterion."""
    B = list(B)
    lam = [f.ring.base(l) for l in lam]
    point = pointwise_eigen(B, f, lam)
    func = functional_eigen(B, f, lam, samples)
    if point != func:
        raise ConsistencyError(f"pointwise ({point}) and functional ({func}) criteria disagree")
    return point
