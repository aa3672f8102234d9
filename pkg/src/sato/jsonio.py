"""JSON encoding of rings, elements, series, operators and Schur pairs.

Rationals travel as ``"p/q"`` strings so that output is byte stable.
Ring descriptors look like ``{"kind": "QQ"}``, ``{"kind": "poly", "vars": [...]}``,
``{"kind": "diff", "symbols": [...], "max_jet": n}`` or
``{"kind": "xseries", "base": {...}, "prec": n}``.
"""

from __future__ import annotations

import json

from .errors import UnsupportedRing
from .pdo import PseudoOp
from .ring import (
    QQ,
    DiffPolynomialRing,
    Poly,
    PolynomialRing,
    RationalField,
    XSeries,
    XSeriesRing,
    format_rational,
    qq,
)
from .schur import BigCellBasis, EmbeddedSchurPair, PureRankAlgebra
from .series import TruncLaurent


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# -- rings


def ring_to_json(ring) -> dict:
    if isinstance(ring, RationalField):
        return {"kind": "QQ"}
    if isinstance(ring, DiffPolynomialRing):
        return {"kind": "diff", "symbols": list(ring.symbols), "max_jet": ring.max_jet}
    if isinstance(ring, PolynomialRing):
        return {"kind": "poly", "vars": list(ring.var_names)}
    if isinstance(ring, XSeriesRing):
        return {"kind": "xseries", "base": ring_to_json(ring.base), "prec": ring.prec}
    raise UnsupportedRing(f"no JSON form for {ring!r}")


def ring_from_json(data):
    if data is None:
        return QQ
    if isinstance(data, str):
        data = json.loads(data) if data.lstrip().startswith("{") else {"kind": data}
    kind = data.get("kind", "QQ")
    if kind in ("QQ", "qq", "Q"):
        return QQ
    if kind == "poly":
        return PolynomialRing(data["vars"])
    if kind == "diff":
        return DiffPolynomialRing(data["symbols"], data.get("max_jet", 6))
    if kind == "xseries":
        return XSeriesRing(ring_from_json(data.get("base")), data.get("prec", 16))
    raise UnsupportedRing(f"unknown ring kind {kind!r}")


# -- ring elements


def element_to_json(ring, e):
    if isinstance(ring, RationalField):
        return format_rational(e)
    if isinstance(ring, XSeriesRing):
        return {"coeffs": [element_to_json(ring.base, c) for c in e.coeffs], "prec": e.prec}
    names = ring.var_names
    monomials = []
    for mono, c in sorted(e.terms.items(), key=lambda kv: ring.sort_key(kv[0])):
        monomials.append({"coeffs": format_rational(c), "exps": {names[i]: k for i, k in mono}})
    return {"monomials": monomials}


def element_from_json(ring, data):
    if isinstance(ring, RationalField):
        return qq(data)
    if isinstance(ring, XSeriesRing):
        coeffs = tuple(element_from_json(ring.base, c) for c in data["coeffs"])
        return XSeries(ring, coeffs, data.get("prec", len(coeffs)))
    if isinstance(data, (str, int)):
        return ring.constant(qq(data))
    terms = {}
    for m in data["monomials"]:
        mono = tuple(sorted((ring.var_index(n), int(k)) for n, k in m["exps"].items() if k))
        terms[mono] = terms.get(mono, 0) + qq(m["coeffs"])
    return Poly(ring, terms)


# -- series and operators


def series_to_json(v: TruncLaurent) -> dict:
    return {
        "ring": ring_to_json(v.ring),
        "var": v.var,
        "low": v.low,
        "coeffs": [element_to_json(v.ring, c) for c in v.coeffs],
        "guaranteed": v.guaranteed,
    }


def series_from_json(data, ring=None) -> TruncLaurent:
    ring = ring or ring_from_json(data.get("ring"))
    coeffs = [element_from_json(ring, c) for c in data["coeffs"]]
    v = TruncLaurent(ring, data.get("var", "y"), data["low"], coeffs)
    if "guaranteed" in data and data["guaranteed"] != v.guaranteed:
        raise ValueError("guaranteed does not match low + len(coeffs)")
    return v


def operator_to_json(P: PseudoOp) -> dict:
    prec = [t.prec for t in P.terms] if isinstance(P.ring, XSeriesRing) else None
    return {
        "ring": ring_to_json(P.ring),
        "top_order": P.top,
        "terms": [element_to_json(P.ring, t) for t in P.terms],
        "prec": prec,
    }


def operator_from_json(data, ring=None) -> PseudoOp:
    ring = ring or ring_from_json(data.get("ring"))
    return PseudoOp(ring, data["top_order"], [element_from_json(ring, t) for t in data["terms"]])


# -- Schur pairs


def pair_to_json(pair: EmbeddedSchurPair) -> dict:
    out = {
        "A": {"generators": [series_to_json(g) for g in pair.algebra.generators]},
        "W": {"rows": [series_to_json(w) for w in pair.W.rows]},
        "rank": pair.rank,
        "level": pair.level,
        "index": pair.index,
    }
    if pair.algebra.tag:
        out["A"]["tag"] = pair.algebra.tag
    return out


def pair_from_json(data) -> EmbeddedSchurPair:
    gens = [series_from_json(g) for g in data["A"]["generators"]]
    rows = [series_from_json(w) for w in data["W"]["rows"]]
    ring = gens[0].ring if gens else rows[0].ring
    algebra = PureRankAlgebra(ring, gens, data.get("rank"), data["A"].get("tag"))
    return EmbeddedSchurPair(
        algebra, BigCellBasis(rows), data.get("rank", 1), data.get("level", -1), data.get("index", 0)
    )


def to_json(obj):
    """Dispatch on the object type."""
    if isinstance(obj, PseudoOp):
        return operator_to_json(obj)
    if isinstance(obj, TruncLaurent):
        return series_to_json(obj)
    if isinstance(obj, EmbeddedSchurPair):
        return pair_to_json(obj)
    if isinstance(obj, (list, tuple)):
        return [to_json(o) for o in obj]
    if isinstance(obj, XSeries):
        return element_to_json(obj.ring, obj)
    if isinstance(obj, Poly):
        return element_to_json(obj.ring, obj)
    try:
        return format_rational(obj)
    except TypeError:
        return obj
