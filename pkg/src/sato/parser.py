"""Expression language for operators and series.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' int)?
    atom   := rational | 'x' | 'D' | 'y' | ident | 'O' '(' expr ')' | '(' expr ')'

``D`` is the derivation and ``y`` stands for ``D^-1``.  In series mode both
name the series variable.  Identifiers resolve against the coefficient ring,
including jet names such as ``u''``.  ``O(D^k)`` (or ``O(y^k)``, ``O(x^k)``)
marks where the known window ends, which is what the printers emit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, UnknownSymbol
from .pdo import DEFAULT_DEPTH, DEFAULT_XPREC, PseudoOp
from .ring import QQ, MPQ, DiffPolynomialRing, XSeriesRing, _PolyRingBase, format_rational, qq
from .series import TruncLaurent

# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Num:
    value: MPQ


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class BigO:
    arg: object


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            node = BinOp("*", node, self.factor())
        return node

    def factor(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            node = Pow(node, self.integer())
        return node

    def integer(self):
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        kind, text, pos = self.take()
        if kind != "num" or "/" in text:
            raise ParseError(f"exponent must be an integer, found {text or 'end of input'!r}", pos)
        return sign * int(text)

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(qq(text))
        if kind == "name":
            if text == "O" and self.peek()[:2] == ("op", "("):
                self.take()
                inner = self.expr()
                self.expect(")")
                return BigO(inner)
            return Sym(text)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse_ast(text: str):
    p = _Parser(text)
    node = p.expr()
    kind, rest, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {rest!r}", pos)
    return node


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 4


def to_text(node) -> str:
    """Canonical text; ``parse_ast(to_text(e)) == e``."""
    if isinstance(node, Num):
        return format_rational(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, BigO):
        return f"O({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        return f"-{inner}" if _prec(node.arg) >= 3 else f"-({inner})"
    if isinstance(node, Pow):
        inner = to_text(node.base)
        if _prec(node.base) < 4 or isinstance(node.base, Pow):
            inner = f"({inner})"
        return f"{inner}^{node.exp}"
    p = _PREC[node.op]
    left = to_text(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = to_text(node.right)
    if _prec(node.right) <= p:
        right = f"({right})"
    sep = "*" if node.op == "*" else f" {node.op} "
    return f"{left}{sep}{right}"


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class _Cut:
    symbol: str
    exp: int


class _Evaluator:
    def __init__(self, mode, base, depth, xprec, var):
        self.mode = mode
        self.base = base
        self.depth = depth
        self.var = var
        if mode in ("series", "element"):
            self.ring = base
        elif isinstance(base, DiffPolynomialRing):
            self.ring = base
        else:
            self.ring = XSeriesRing(base, xprec)
        self.window = depth

    # atoms -------------------------------------------------------------
    def const(self, c):
        if self.mode == "element":
            return self.ring(c)
        if self.mode == "series":
            return TruncLaurent.constant(self.ring, self.var, c, self.window)
        return PseudoOp.scalar(self.ring, c, self.window)

    def power_of_var(self, k):
        if self.mode == "element":
            raise UnknownSymbol("coefficient expressions cannot contain D or y")
        if self.mode == "series":
            return TruncLaurent.monomial(self.ring, self.var, k, k + self.window)
        # known from D^k down to D^-window
        return PseudoOp.d(self.ring, k, max(1, k + self.window + 1))

    def is_var(self, name):
        if self.mode == "series":
            return name in ("D", "y", self.var)
        return name == "D"

    def symbol(self, name):
        if self.is_var(name):
            return self.power_of_var(1)
        if self.mode == "operator" and name == "y":
            return self.power_of_var(-1)
        if name == "x" and isinstance(self.ring, XSeriesRing):
            x = self.ring.x()
            return x if self.mode == "element" else PseudoOp.scalar(self.ring, x, self.window)
        if isinstance(self.base, _PolyRingBase) and name in self.base.var_names:
            return self.const(self.base.gen(name))
        raise UnknownSymbol(f"unknown symbol {name!r}")

    def cut(self, node):
        if isinstance(node, Pow) and isinstance(node.base, Sym):
            name, k = node.base.name, node.exp
        elif isinstance(node, Sym):
            name, k = node.name, 1
        else:
            raise ParseError("O(...) takes a power of D, y or x")
        if self.mode == "operator" and name == "y":
            name, k = "D", -k
        if self.is_var(name) or name == "x":
            return _Cut("x" if name == "x" else "var", k)
        raise UnknownSymbol(f"unknown symbol {name!r} inside O(...)")

    # tree walk ---------------------------------------------------------
    def eval(self, node):
        if isinstance(node, Num):
            return self.const(node.value)
        if isinstance(node, Sym):
            return self.symbol(node.name)
        if isinstance(node, BigO):
            return self.cut(node.arg)
        if isinstance(node, Neg):
            return -self.value(node.arg)
        if isinstance(node, Pow):
            b = node.base
            if isinstance(b, Sym) and (self.is_var(b.name) or (self.mode == "operator" and b.name == "y")):
                k = node.exp if b.name != "y" or self.mode == "series" else -node.exp
                return self.power_of_var(k)
            v = self.value(b)
            if self.mode == "element" and node.exp < 0:
                return self.ring.inverse(v) ** -node.exp
            return v ** node.exp
        left, right = self.eval(node.left), self.eval(node.right)
        if node.op == "*":
            return self.plain(left) * self.plain(right)
        if isinstance(right, _Cut):
            return self.apply_cut(self.plain(left), right)
        if isinstance(left, _Cut):
            sign = 1 if node.op == "+" else -1
            return self.apply_cut(self.plain(right) * sign, left)
        return left + right if node.op == "+" else left - right

    def value(self, node):
        return self.plain(self.eval(node))

    def plain(self, v):
        if isinstance(v, _Cut):
            raise ParseError("O(...) may only be added to an expression")
        return v

    def apply_cut(self, v, cut):
        if cut.symbol == "x":
            if not isinstance(self.ring, XSeriesRing):
                raise UnknownSymbol("x has no meaning over this ring")
            return PseudoOp(v.ring, v.top, [t.truncate(cut.exp) for t in v.terms])
        if self.mode == "series":
            return v.truncate(cut.exp)
        if cut.exp + 1 > v.top:
            return PseudoOp(v.ring, cut.exp + 1, [v.ring.zero()])
        return v.with_low(cut.exp + 1)


def _has_cut(node):
    if isinstance(node, BigO):
        return True
    if isinstance(node, BinOp):
        return _has_cut(node.left) or _has_cut(node.right)
    if isinstance(node, (Neg, Pow)):
        return _has_cut(node.base if isinstance(node, Pow) else node.arg)
    return False


def parse(text: str, ring=QQ, mode: str = "operator", depth: int = DEFAULT_DEPTH,
          xprec: int = DEFAULT_XPREC, var: str = "y"):
    """Parse ``text`` into a :class:`PseudoOp` (``mode="operator"``), a
    :class:`TruncLaurent` (``mode="series"``) or a bare ring element
    (``mode="element"``) over ``ring``."""
    if mode not in ("operator", "series", "element"):
        raise ValueError(f"unknown mode {mode!r}")
    node = parse_ast(text)
    ev = _Evaluator(mode, ring, depth, xprec, var)
    if mode == "element":
        if _has_cut(node):
            raise ParseError("O(...) is not allowed in a coefficient")
        return ev.value(node)
    explicit = _has_cut(node)
    # widen the atoms until the result keeps the requested window
    for pad in (0, depth, 4 * depth):
        ev.window = depth + pad
        result = ev.value(node)
        if explicit:
            return result
        if mode == "series":
            if result.guaranteed - result.valuation() >= depth or result.is_zero():
                return result.truncate(result.valuation() + depth) if not result.is_zero() else result
        elif result.depth >= depth:
            return result.truncate(depth)
    return result


def parse_list(text: str, **kwargs):
    """Comma-separated expressions."""
    return [parse(part, **kwargs) for part in _split_top(text)]


def _split_top(text):
    parts, level, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            level += 1
        elif ch == ")":
            level -= 1
        elif ch == "," and level == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p for p in (s.strip() for s in parts) if p]
