"""Pure-rank algebras, big-cell points and the Sato / Krichever-type maps.

Series here are :class:`TruncLaurent` in ``y`` (read as ``D^-1``) over a
base ring of constants, usually ``QQ`` or a polynomial ring. A point ``W``
is represented by finitely many rows; all statements are made inside the
window those rows determine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial, gcd

from gmpy2 import mpq

from .errors import (
    IndeterminateOrder,
    NoPositiveOrder,
    NonCommuting,
    NotBigCell,
    NotDifferential,
    NotMonic,
    NotMonicOrderZero,
    StabilityViolation,
    WindowTooSmall,
)
from .normalize import conjugator_to_power
from .pdo import (
    DEFAULT_XPREC,
    PseudoOp,
    binomial,
    invert,
    multiply,
    sigma,
)
from .ring import Ring, XSeries, XSeriesRing
from .series import TruncLaurent, invert as invert_series, order_of


# ---------------------------------------------------------------------------
# algebras


def pure_rank(gens) -> int:
    """gcd of the orders of the positive-order generators."""
    r = 0
    positive = False
    for g in gens:
        n = order_of(g)
        if n > 0:
            positive = True
            r = gcd(r, n)
    if not positive:
        raise NoPositiveOrder("no generator of positive order")
    return r


@dataclass
class PureRankAlgebra:
    ring: Ring
    generators: list
    declared_rank: int | None = None
    tag: str | None = None

    @property
    def rank(self) -> int:
        return pure_rank(self.generators)

    def orders(self):
        return [order_of(g) for g in self.generators]

    def products(self, max_order: int, max_length: int | None = None):
        """Monomials in the positive-order generators of order ``<= max_order``.

        Yields ``(exponents, series)`` with the empty product ``1`` first.
        """
        gens = [(order_of(g), g) for g in self.generators]
        gens = [(n, g) for n, g in gens if n > 0]
        window = max(g.guaranteed - g.valuation() for _, g in gens) if gens else 1
        one = TruncLaurent.constant(self.ring, "y", 1, window)
        out = [((0,) * len(gens), one)]
        frontier = [((0,) * len(gens), one, 0, 0)]
        length = 0
        while frontier:
            length += 1
            if max_length is not None and length > max_length:
                break
            nxt = []
            for exps, series, order, start in frontier:
                for k in range(start, len(gens)):
                    n, g = gens[k]
                    if order + n > max_order:
                        continue
                    e = list(exps)
                    e[k] += 1
                    s = series * g
                    out.append((tuple(e), s))
                    nxt.append((tuple(e), s, order + n, k))
            frontier = nxt
        return out


def uniformizer_z(a: TruncLaurent, b: TruncLaurent):
    """``z = a^-i b^j`` of order ``-r``; returns ``(z, i, j)``."""
    for s in (a, b):
        if not s.is_monic():
            raise NotMonic("uniformizer needs monic inputs")
    p, q = order_of(a), order_of(b)
    if p <= 0 or q <= 0:
        raise NotMonic("uniformizer needs inputs of positive order")
    r = gcd(p, q)
    i = 1
    while (i * p - r) % q:
        i += 1
    j = (i * p - r) // q
    z = invert_series(a) ** i
    if j:
        z = z * b**j
    return z, i, j


def split_level(v: TruncLaurent, r: int, alpha: int) -> dict:
    """Split ``v`` into residue components ``i`` in ``-alpha .. -alpha+r-1``.

    ``y^(r q + i)`` contributes ``z^q`` to component ``i``.
    """
    if r < 1:
        raise ValueError("r must be positive")
    comps = {}
    g = v.guaranteed
    for i in range(-alpha, -alpha + r):
        top = -((i - g) // r)  # ceil((g - i) / r)
        terms = {}
        for e, c in v.items():
            if (e - i) % r == 0:
                terms[(e - i) // r] = c
        comps[i] = TruncLaurent.from_dict(v.ring, "z", terms, top)
    return comps


def join_level(comps: dict, r: int, var: str = "y") -> TruncLaurent:
    ring = next(iter(comps.values())).ring
    terms = {}
    top = None
    for i, c in comps.items():
        for q, coeff in c.items():
            terms[r * q + i] = coeff
        t = r * c.guaranteed + i
        top = t if top is None else min(top, t)
    return TruncLaurent.from_dict(ring, var, terms, top)


# ---------------------------------------------------------------------------
# echelon forms


def echelon(rows, unit_pivots: bool = True):
    """Echelon form by lowest exponent.

    With ``unit_pivots`` every pivot is made 1 and the form is fully
    reduced; a non-unit pivot raises :class:`NotBigCell`. Otherwise rows are
    combined fraction-free, which is echelon form over the fraction field.
    Returns ``{pivot_exponent: row}``.
    """
    pivots = {}
    pending = [r for r in rows]
    while pending:
        row = pending.pop(0)
        while True:
            if row.is_zero():
                row = None
                break
            e = row.valuation()
            if e not in pivots:
                break
            prow = pivots[e]
            c = row.coeff(e)
            if unit_pivots:
                row = row - prow.scale(c)
            else:
                row = row.scale(prow.coeff(e)) - prow.scale(c)
        if row is None:
            continue
        e = row.valuation()
        lead = row.coeff(e)
        if unit_pivots:
            if not row.ring.is_unit(lead):
                raise NotBigCell(f"pivot {row.ring.format(lead)} at y^{e} is not a unit")
            if lead != 1:
                row = row.scale(row.ring.inverse(lead))
        pivots[e] = row
    if unit_pivots:
        # full reduction: clear each pivot column from the other rows
        for e in sorted(pivots):
            prow = pivots[e]
            for f in sorted(pivots):
                if f == e:
                    continue
                other = pivots[f]
                if e < other.guaranteed and f < e:
                    c = other.coeff(e)
                    if c:
                        pivots[f] = other - prow.scale(c)
    return dict(sorted(pivots.items()))


def reduce_against(v: TruncLaurent, pivots: dict) -> TruncLaurent:
    """Remainder of ``v`` after clearing every pivot exponent (unit pivots)."""
    while True:
        changed = False
        for e in sorted(pivots):
            if e >= v.guaranteed:
                break
            c = v.coeff(e)
            if c:
                v = v - pivots[e].scale(c)
                changed = True
                break
        if not changed:
            return v


# ---------------------------------------------------------------------------
# big cell


@dataclass
class BigCellBasis:
    """Rows ``w_0, w_1, ...`` with ``w_n = y^-n + (higher powers of y)``."""

    rows: list

    def __post_init__(self):
        for n, w in enumerate(self.rows):
            try:
                o = order_of(w)
            except IndeterminateOrder:
                raise NotBigCell(f"row {n} has no known nonzero coefficient") from None
            if o != n or not w.is_monic():
                raise NotBigCell(f"row {n} is not monic of order {n}")

    @classmethod
    def from_rows(cls, rows) -> "BigCellBasis":
        """Triangularize an arbitrary spanning set."""
        piv = echelon(rows, unit_pivots=True)
        out = []
        n = 0
        while -n in piv:
            out.append(piv[-n])
            n += 1
        if not out or any(e > 0 for e in piv) or len(out) != len(piv):
            missing = n
            raise NotBigCell(f"no row of order {missing} (pivots {sorted(piv)})")
        return cls(out)

    @classmethod
    def standard(cls, ring: Ring, depth: int = 16, window: int | None = None):
        """Rows ``y^-n``, i.e. the point ``sigma(D)``."""
        window = depth if window is None else window
        return cls([TruncLaurent.monomial(ring, "y", -n, window - n) for n in range(depth)])

    @property
    def ring(self):
        return self.rows[0].ring

    def __len__(self):
        return len(self.rows)

    def reduced(self) -> list:
        """Rows ``y^-m + (positive powers only)``, the canonical basis."""
        out = []
        for m, w in enumerate(self.rows):
            for e in range(-m + 1, 1):
                if e >= w.guaranteed:
                    break
                c = w.coeff(e)
                if c:
                    w = w - out[-e].scale(c)
            out.append(w)
        return out

    def pivots(self) -> dict:
        return {-m: w for m, w in enumerate(self.reduced())}

    def contains(self, v: TruncLaurent):
        """``True``/``False`` inside the window, ``None`` if rows are missing."""
        if v.is_zero():
            return True
        if order_of(v) >= len(self.rows):
            return None
        rem = reduce_against(v, self.pivots())
        return rem.is_zero()

    def spans_equal(self, other: "BigCellBasis") -> bool:
        a, b = self.reduced(), other.reduced()
        return all(x.eq_within(y) for x, y in zip(a, b))


def jet_system_matrix(k: int):
    """Coefficient matrix ``C(n, j)`` (``n, j < k``) of the level-``k`` jet system."""
    return [[binomial(n, j) if j <= n else 0 for j in range(k)] for n in range(k)]


def sato_forward(S: PseudoOp, rows: int | None = None) -> BigCellBasis:
    """Rows ``w_n = sigma(D^n S)``.

    ``S`` must have order 0 with leading coefficient ``1 + O(x)``; it is first
    divided by that leading coefficient (which does not change the point).
    """
    ring = S.ring
    try:
        S = S.normalized()
    except IndeterminateOrder:
        raise NotMonicOrderZero("operator vanishes in its window") from None
    lead = S.terms[0]
    lead0 = lead.constant_term() if isinstance(lead, XSeries) else lead
    if S.top != 0 or lead0 != 1:
        raise NotMonicOrderZero(f"expected a monic operator of order 0 (order {S.top})")
    if isinstance(lead, XSeries) and not lead.is_constant():
        S = multiply(PseudoOp.scalar(ring, lead.inverse(), S.depth), S)
    n_rows = S.depth if rows is None else rows
    out = []
    for n in range(n_rows):
        P = multiply(PseudoOp.d(ring, n, S.depth), S)
        terms = list(P.terms)
        if isinstance(ring, XSeriesRing):
            k = 0
            while k < len(terms) and terms[k].prec >= 1:
                k += 1
            terms = terms[:k]
        if not terms:
            break
        out.append(sigma(PseudoOp(ring, P.top, terms)))
    return BigCellBasis(out)


def sato_inverse(W, xprec: int = DEFAULT_XPREC) -> PseudoOp:
    """The monic ``S`` of order 0 with ``sato_forward(S) == W`` in the window."""
    if not isinstance(W, BigCellBasis):
        W = BigCellBasis.from_rows(list(W))
    base = W.ring
    ring = XSeriesRing(base, xprec)
    red = W.reduced()
    D = len(red)
    # jets[i][j] = s_i^(j)(0); s_0 = 1
    jets = {0: {0: base.one()}}

    def jet(i, j):
        if i == 0:
            return base.one() if j == 0 else base.zero()
        return jets[i][j]

    def cnm(n, m):
        acc = base.zero()
        for i in range(n - m + 1):
            j = n - m - i
            acc = acc + jet(i, j) * binomial(n, j)
        return acc

    level = 0
    for k in range(1, D + 1):
        ok = all(k - n < red[m].guaranteed for n in range(k) for m in range(n + 1))
        if not ok:
            break
        rhs = []
        for n in range(k):
            acc = base.zero()
            for m in range(n + 1):
                c = red[m].coeff(k - n)
                if c:
                    acc = acc + cnm(n, m) * c
            rhs.append(acc)
        # lower unitriangular in j = k - i: forward substitution
        sol = {}
        for n in range(k):
            acc = rhs[n]
            for j in range(n):
                acc = acc - sol[j] * binomial(n, j)
            sol[n] = acc
        for j, val in sol.items():
            jets.setdefault(k - j, {})[j] = val
        level = k
    terms = []
    for i in range(level + 1):
        prec = min(level - i + 1, xprec)
        coeffs = [jet(i, j) * mpq(1, factorial(j)) for j in range(prec)]
        terms.append(XSeries(ring, tuple(base(c) for c in coeffs), prec))
    return PseudoOp(ring, 0, terms)


# ---------------------------------------------------------------------------
# Schur pairs and the correspondence with algebras of differential operators


@dataclass
class EmbeddedSchurPair:
    algebra: PureRankAlgebra
    W: BigCellBasis
    rank: int
    level: int = -1
    index: int = 0
    conjugator: PseudoOp | None = None


def _monic_positive(P: PseudoOp) -> bool:
    try:
        Q = P.normalized()
    except IndeterminateOrder:
        return False
    return Q.top > 0 and Q.is_monic()


def mu_forward(B, max_length: int = 3) -> EmbeddedSchurPair:
    """Schur pair ``(X^-1 B X, sigma(D X))`` of a commutative algebra ``B``."""
    B = list(B)
    if not B:
        raise NoPositiveOrder("empty generator list")
    ring = B[0].ring
    for P in B:
        if not P.is_differential():
            raise NotDifferential(f"{P} has negative powers of D")
    best = None
    for length in range(1, max_length + 1):
        for combo in combinations_with_replacement(range(len(B)), length):
            P = B[combo[0]]
            for k in combo[1:]:
                P = multiply(P, B[k])
            if _monic_positive(P):
                P = P.normalized()
                if best is None or P.top < best.top:
                    best = P
        if best is not None and best.top == 1:
            break
    if best is None:
        raise NoPositiveOrder("no monic element of positive order found")
    X = conjugator_to_power(best, best.top).conjugator
    Xinv = invert(X)
    gens = []
    for Q in B:
        A = multiply(multiply(Xinv, Q), X)
        if not A.has_constant_coefficients():
            raise NonCommuting("a conjugated generator has non-constant coefficients")
        gens.append(sigma(A))
    algebra = PureRankAlgebra(ring.base, gens)
    W = sato_forward(X)
    return EmbeddedSchurPair(algebra, W, algebra.rank, -1, 0, X)


def mu_inverse(pair: EmbeddedSchurPair, xprec: int = DEFAULT_XPREC) -> list:
    """Generators ``S a S^-1`` of the algebra of differential operators."""
    S = sato_inverse(pair.W, xprec)
    ring = S.ring
    Sinv = invert(S)
    out = []
    for a in pair.algebra.generators:
        A = PseudoOp.from_series(ring, a)
        P = multiply(multiply(S, A), Sinv)
        if not P.is_differential():
            raise StabilityViolation("A W is not contained in W: the conjugate has negative-order terms")
        out.append(P)
    return out


@dataclass
class ValidationReport:
    stable: bool
    intersection_ok: bool
    rank_ok: bool
    checked: int = 0
    skipped: int = 0
    problems: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.stable and self.intersection_ok and self.rank_ok

    def __bool__(self):
        return self.valid


def validate_pair(pair: EmbeddedSchurPair, sample_length: int = 2) -> ValidationReport:
    problems = []
    algebra, W = pair.algebra, pair.W
    stable = True
    checked = skipped = 0
    for gi, a in enumerate(algebra.generators):
        for n, w in enumerate(W.rows):
            v = a * w
            verdict = W.contains(v)
            if verdict is None:
                skipped += 1
                continue
            checked += 1
            if not verdict:
                stable = False
                problems.append(f"generator {gi} times row {n} leaves W")
    intersection_ok = True
    samples = list(algebra.generators)
    gens = algebra.generators
    if sample_length >= 2:
        for i in range(len(gens)):
            for j in range(i, len(gens)):
                samples.append(gens[i] * gens[j])
    for s in samples:
        try:
            o = order_of(s)
        except IndeterminateOrder:
            continue
        if o <= 0 and any(e != 0 for e, _ in s.items()):
            intersection_ok = False
            problems.append(f"{s} lies in R[[y]] but is not a constant")
    try:
        r = algebra.rank
        rank_ok = pair.rank == r and (algebra.declared_rank in (None, r))
        if not rank_ok:
            problems.append(f"declared rank {pair.rank}, computed {r}")
    except NoPositiveOrder:
        rank_ok = False
        problems.append("algebra has no element of positive order")
    return ValidationReport(stable, intersection_ok, rank_ok, checked, skipped, problems)


def _fraction_pivots(rows):
    piv = echelon(rows, unit_pivots=False)
    if not piv:
        raise WindowTooSmall("empty basis")
    return piv


def index_of(rows, alpha: int) -> int:
    """``dim(W cap y^-alpha R[[y]]) - dim R((y)) / (W + y^-alpha R[[y]])``.

    Dimensions are over the fraction field of the base. The rows must
    contain a contiguous run of pivots at the bottom of the window; all
    lower exponents are assumed to be pivots of rows beyond it.
    """
    if isinstance(rows, BigCellBasis):
        rows = rows.rows
    piv = _fraction_pivots(rows)
    exps = sorted(piv)
    lo = exps[0]
    cut = -alpha
    if cut <= lo + 1 or lo + 1 not in piv:
        raise WindowTooSmall(f"cut y^{cut} is not inside the stabilized window (lowest pivot {lo})")
    inside = sum(1 for e in exps if e >= cut)
    quotient = sum(1 for e in range(lo, cut) if e not in piv)
    return inside - quotient


def is_strongly_semistable(rows, alpha: int = -1):
    """Smallest ``N`` with ``W (+) y^(N - alpha) R[[y]] = R((y))``, or ``None``.

    The splitting exists exactly when the pivot exponents are all integers
    up to some ``e`` with unit pivots; then ``N = e + 1 + alpha``.
    """
    if isinstance(rows, BigCellBasis):
        rows = rows.rows
    piv = _fraction_pivots(rows)
    exps = sorted(piv)
    lo, hi = exps[0], exps[-1]
    if lo + 1 not in piv and lo != hi:
        raise WindowTooSmall("pivots at the bottom of the window are not contiguous")
    if exps != list(range(lo, hi + 1)):
        return None
    ring = rows[0].ring
    if not all(ring.is_unit(piv[e].coeff(e)) for e in exps):
        return None
    return hi + 1 + alpha
