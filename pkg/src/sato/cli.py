"""``sato`` command line.

Results are printed as text on stdout; ``--json-out PATH`` also writes them
as JSON. Module errors go to stderr as ``{"error": <category>, ...}`` and the
process exits with status 2.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import curvelab, normalize, pdo, schur, series
from .errors import SatoError, UnknownSymbol
from .jsonio import dumps, pair_from_json, ring_from_json, to_json
from .parser import parse, parse_list
from .ring import XSeriesRing, qq

DEFAULTS = {"depth": pdo.DEFAULT_DEPTH, "xprec": pdo.DEFAULT_XPREC, "ring": None,
            "json_out": None, "as_": "operator"}


class Context:
    def __init__(self, args):
        self.depth = args.depth
        self.xprec = args.xprec
        self.base = ring_from_json(args.ring)
        self.as_ = args.as_

    def op(self, text):
        return parse(text, ring=self.base, mode="operator", depth=self.depth, xprec=self.xprec)

    def ops(self, text):
        return parse_list(text, ring=self.base, mode="operator", depth=self.depth, xprec=self.xprec)

    def series(self, text):
        return parse(text, ring=self.base, mode="series", depth=self.depth)

    def series_list(self, text):
        return parse_list(text, ring=self.base, mode="series", depth=self.depth)

    def element(self, text, ring=None):
        return parse(text, ring=ring or self.base, mode="element", xprec=self.xprec)

    def value(self, text):
        return self.series(text) if self.as_ == "series" else self.op(text)


# -- handlers: each returns (text, json-able)


def cmd_mul(ctx, a):
    vals = [ctx.value(t) for t in a.exprs]
    out = vals[0]
    for v in vals[1:]:
        out = out * v
    return str(out), to_json(out)


def cmd_invert(ctx, a):
    v = ctx.value(a.expr)
    out = series.invert(v) if ctx.as_ == "series" else pdo.invert(v)
    return str(out), to_json(out)


def cmd_conjugate(ctx, a):
    L = ctx.op(a.expr)
    N = a.power if a.power is not None else L.order()
    constants = {}
    for item in a.constant or []:
        k, _, v = item.partition("=")
        constants[int(k)] = ctx.element(v)
    res = normalize.conjugator_to_power(L, N, constants)
    data = {"conjugator": to_json(res.conjugator), "verified": res.verified(), "tag": res.tag}
    text = f"X = {res.conjugator}\nverified: {str(res.verified()).lower()}\nconstants: {res.tag}"
    return text, data


def cmd_sigma(ctx, a):
    out = pdo.sigma(ctx.op(a.expr))
    return str(out), to_json(out)


def cmd_act(ctx, a):
    out = pdo.act(ctx.op(a.op), ctx.series(a.series))
    return str(out), to_json(out)


def cmd_commutator(ctx, a):
    out = pdo.commutator(ctx.op(a.left), ctx.op(a.right))
    return str(out), to_json(out)


def cmd_root(ctx, a):
    out = series.nth_root(ctx.series(a.expr), a.n)
    return str(out), to_json(out)


def cmd_compose(ctx, a):
    out = series.compose(ctx.series(a.outer), ctx.series(a.inner))
    return str(out), to_json(out)


def cmd_revert(ctx, a):
    out = series.revert(ctx.series(a.expr))
    return str(out), to_json(out)


def _load_pair(ctx, a):
    if a.pair:
        with open(a.pair) as fh:
            return pair_from_json(json.load(fh))
    if not (a.gens and a.rows):
        raise SystemExit("need --pair FILE or both --gens and --rows")
    gens = ctx.series_list(a.gens)
    algebra = schur.PureRankAlgebra(gens[0].ring, gens)
    return schur.EmbeddedSchurPair(algebra, schur.BigCellBasis(ctx.series_list(a.rows)),
                                   algebra.rank)


def cmd_schur(ctx, a):
    if a.action == "extract":
        if not a.gens:
            raise SystemExit("schur extract needs --gens")
        pair = schur.mu_forward(ctx.ops(a.gens))
        lines = ["A:"] + [f"  {g}" for g in pair.algebra.generators]
        lines += ["W:"] + [f"  {w}" for w in pair.W.rows]
        lines.append(f"rank {pair.rank}")
        return "\n".join(lines), to_json(pair)
    pair = _load_pair(ctx, a)
    if a.action == "rebuild":
        ops = schur.mu_inverse(pair, ctx.xprec)
        return "\n".join(str(P) for P in ops), to_json(ops)
    if a.action == "validate":
        rep = schur.validate_pair(pair)
        data = {"valid": rep.valid, "stable": rep.stable, "intersection": rep.intersection_ok,
                "rank": rep.rank_ok, "checked": rep.checked, "skipped": rep.skipped,
                "problems": rep.problems}
        text = f"valid: {str(rep.valid).lower()}" + "".join(f"\n  {p}" for p in rep.problems)
        return text, data
    idx = schur.index_of(pair.W, a.alpha)
    n = schur.is_strongly_semistable(pair.W, a.alpha)
    text = f"index {idx}\nstrongly semistable: " + ("no" if n is None else f"N = {n}")
    return text, {"index": idx, "semistable_N": n}


def cmd_kdv(ctx, a):
    R = curvelab.kdv_ring()
    if a.action == "system":
        system = curvelab.kdv_system(R)
        remaining, _ = curvelab.kdv_eliminate(R)
        lines = [f"D^{k}: {system.coefficients[k]}" for k in (3, 2, 1, 0)]
        lines.append(f"sign {system.sign} ({system.convention})")
        lines.append(f"eliminated: {remaining}")
        data = {"coefficients": {str(k): to_json(v) for k, v in system.coefficients.items()},
                "sign": system.sign, "convention": system.convention,
                "eliminated": to_json(remaining)}
        return "\n".join(lines), data
    if a.beta is None:
        raise SystemExit("kdv residual needs --beta")
    try:
        beta = ctx.element(a.beta, R)
    except UnknownSymbol:
        R = XSeriesRing(ctx.base, ctx.xprec)
        beta = ctx.element(a.beta, R)
    res = curvelab.kdv_residual(beta, R)
    return str(res), to_json(res)


def cmd_elliptic(ctx, a):
    values = {k: qq(v) for k, v in (("A", a.A), ("B", a.B)) if v is not None}
    data = curvelab.elliptic_family(min(ctx.depth, 12) if a.depth_local is None else a.depth_local,
                                    values or None)
    text = data.report()
    out = {"checks": data.checks, "gen1": to_json(data.gen1), "gen2": to_json(data.gen2)}
    if a.point:
        px, py = (qq(t) for t in a.point.split(","))
        pair = curvelab.elliptic_point_pair((px, py), values.get("A", 0), values.get("B", 1))
        B = schur.mu_inverse(pair, ctx.xprec)
        T = curvelab.constant_conjugate_test(B)
        text += f"\nconstant-coefficient conjugate: {'found' if T is not None else 'none in window'}"
        out["constant_conjugate"] = T is not None
    return text, out


def cmd_cubic(ctx, a):
    delta = ctx.element(a.delta)
    algebra = curvelab.singular_cubic(delta, ctx.depth)
    profile = curvelab.gap_genus(algebra)
    W = schur.BigCellBasis.standard(algebra.ring, ctx.depth)
    B = schur.mu_inverse(schur.EmbeddedSchurPair(algebra, W, algebra.rank), ctx.xprec)
    lines = [f"tag {algebra.tag}"] + [f"  {g}" for g in algebra.generators]
    lines.append(f"genus {profile.genus}, gaps {list(profile.gaps)}")
    lines += [f"  {P}" for P in B]
    data = {"tag": algebra.tag, "generators": to_json(algebra.generators),
            "genus": profile.genus, "gaps": list(profile.gaps), "operators": to_json(B)}
    return "\n".join(lines), data


def cmd_genus(ctx, a):
    gens = ctx.series_list(a.gens)
    profile = curvelab.gap_genus(gens, a.bound)
    text = f"genus {profile.genus}\ngaps {list(profile.gaps)}\nconductor {profile.conductor}"
    return text, {"genus": profile.genus, "gaps": list(profile.gaps),
                  "conductor": profile.conductor, "bound": profile.bound}


# -- argument parsing


def _common():
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--depth", type=int, default=S, help="operator/series window (default 16)")
    p.add_argument("--xprec", type=int, default=S, help="x-series precision (default 16)")
    p.add_argument("--ring", default=S, help="coefficient ring as JSON, e.g. '{\"kind\":\"poly\",\"vars\":[\"a\"]}'")
    p.add_argument("--json-out", dest="json_out", default=S, help="also write the result as JSON")
    p.add_argument("--as", dest="as_", choices=("series", "operator"), default=S,
                   help="how to read ambiguous expressions (default operator)")
    return p


def build_parser():
    common = _common()
    ap = argparse.ArgumentParser(prog="sato", parents=[common],
                                 description="Pseudo-differential operators, Schur pairs and examples.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=fn)
        return p

    add("mul", cmd_mul, "product of operators or series").add_argument("exprs", nargs="+")
    add("invert", cmd_invert, "inverse").add_argument("expr")
    p = add("conjugate", cmd_conjugate, "X with X^-1 L X = D^N")
    p.add_argument("expr")
    p.add_argument("--power", type=int)
    p.add_argument("--constant", action="append", metavar="K=VALUE", help="override s_K(0)")
    add("sigma", cmd_sigma, "symbol at x = 0").add_argument("expr")
    p = add("act", cmd_act, "action on a series")
    p.add_argument("op")
    p.add_argument("series")
    p = add("commutator", cmd_commutator, "[P, Q]")
    p.add_argument("left")
    p.add_argument("right")
    p = add("root", cmd_root, "N-th root of a series")
    p.add_argument("expr")
    p.add_argument("--n", type=int, required=True)
    p = add("compose", cmd_compose, "outer(inner)")
    p.add_argument("outer")
    p.add_argument("inner")
    add("revert", cmd_revert, "compositional inverse").add_argument("expr")
    p = add("schur", cmd_schur, "Schur pairs")
    p.add_argument("action", choices=("extract", "rebuild", "validate", "index"))
    p.add_argument("--gens")
    p.add_argument("--rows")
    p.add_argument("--pair", help="pair JSON file")
    p.add_argument("--alpha", type=int, default=-1)
    p = add("kdv", cmd_kdv, "stationary KdV")
    p.add_argument("action", choices=("system", "residual"))
    p.add_argument("--beta")
    p = add("elliptic", cmd_elliptic, "elliptic family checks")
    p.add_argument("--A")
    p.add_argument("--B")
    p.add_argument("--point", help="x,y of a point on the specialized curve")
    p.add_argument("--family-depth", dest="depth_local", type=int)
    p = add("cubic", cmd_cubic, "singular cubic algebra")
    p.add_argument("--delta", default="0")
    p = add("genus", cmd_genus, "gap genus of an algebra of series")
    p.add_argument("--gens", required=True)
    p.add_argument("--bound", type=int, default=20)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        ctx = Context(args)
        text, data = args.handler(ctx, args)
    except SatoError as exc:
        err = {"error": exc.category, "message": str(exc)}
        pos = getattr(exc, "position", None)
        if pos is not None:
            err["position"] = pos
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    print(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(dumps(data))
    return 0


if __name__ == "__main__":
    sys.exit(main())
