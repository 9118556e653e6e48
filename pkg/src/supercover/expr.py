"""Text syntax for superfunctions.

Grammar::

    expr  := term (('+'|'-') term)*
    term  := unary (('*'|'/') unary)*
    unary := ('-')* power
    power := atom ('^' posint)?
    atom  := rational | identifier | '(' expr ')'

Integers and ``p/q`` are the only literals.  Division is allowed only by
a nonzero pure base function.  `render` produces canonical text that
`parse` maps back to the same value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra.base import BaseFunction, Poly
from .algebra.superfunction import GeneratorSet, Superfunction
from .errors import GeneratorMismatchError, ParseError

_TOKEN = re.compile(r"(?P<ws>[ \t\r\n]+)|(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            for i, ch in enumerate(text):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            out.append(Token(kind, text, line, pos - line_start + 1))  # type: ignore[arg-type]
        pos = m.end()
    out.append(Token("end", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, src: str, gens: GeneratorSet, cutoff: int | None):
        self.toks = tokenize(src)
        self.i = 0
        self.gens = gens
        self.cutoff = cutoff

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def parse(self) -> Superfunction:
        if self.peek().kind == "end":
            self.fail("empty expression")
        v = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected token {self.peek().text!r}")
        return v

    def expr(self) -> Superfunction:
        v = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> Superfunction:
        v = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op_tok = self.take()
            rhs = self.unary()
            if op_tok.text == "*":
                v = v * rhs
            else:
                if not rhs.is_base():
                    self.fail("divisor must be a function of the weight-0 even coordinates only", op_tok)
                if rhs.is_zero():
                    self.fail("division by zero", op_tok)
                v = v / rhs
        return v

    def unary(self) -> Superfunction:
        neg = False
        while self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            neg = not neg
        v = self.power()
        return -v if neg else v

    def power(self) -> Superfunction:
        v = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.peek()
            if t.kind != "num":
                self.fail("exponent must be a positive integer")
            self.take()
            e = int(t.text)
            if e < 1:
                self.fail("exponent must be a positive integer", t)
            v = v**e
        return v

    def atom(self) -> Superfunction:
        t = self.peek()
        if t.kind == "num":
            self.take()
            return Superfunction.const(self.gens, int(t.text), self.cutoff)
        if t.kind == "id":
            self.take()
            if t.text not in self.gens:
                self.fail(f"unknown identifier {t.text!r}", t)
            return Superfunction.gen(self.gens, t.text, self.cutoff)
        if t.kind == "op" and t.text == "(":
            self.take()
            v = self.expr()
            if not (self.peek().kind == "op" and self.peek().text == ")"):
                self.fail("expected ')'")
            self.take()
            return v
        if t.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {t.text!r}")
        raise AssertionError  # pragma: no cover


def parse(src: str, gens, cutoff: int | None = None) -> Superfunction:
    """Parse `src` into a Superfunction over `gens` (a GeneratorSet or a chart)."""
    gs = gens if isinstance(gens, GeneratorSet) else getattr(gens, "gens", None)
    if not isinstance(gs, GeneratorSet):
        raise GeneratorMismatchError("parse needs a GeneratorSet or an object with a .gens GeneratorSet")
    return _Parser(src, gs, cutoff).parse()


# rendering


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_mono(m) -> str:
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def _poly_terms(p: Poly) -> list[tuple[Fraction, str]]:
    order = sorted(p.terms, key=lambda m: (-sum(e for _, e in m), m))
    return [(p.terms[m], _poly_mono(m)) for m in order]


def _signed_join(parts: list[str]) -> str:
    out = parts[0]
    for s in parts[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


def _scaled(c: Fraction, mono: str) -> str:
    if not mono:
        return _frac(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{_frac(c)}*{mono}"


def render_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    return _signed_join([_scaled(c, m) for c, m in _poly_terms(p)])


def _is_simple_power(p: Poly) -> bool:
    if len(p.terms) != 1:
        return False
    ((m, c),) = p.terms.items()
    return c == 1 and len(m) == 1


def render_base(b: BaseFunction) -> str:
    if b.den.is_constant():
        return render_poly(b.num * (1 / b.den.constant_value()))
    num = render_poly(b.num)
    if len(b.num.terms) > 1:
        num = f"({num})"
    den = render_poly(b.den)
    if not _is_simple_power(b.den):
        den = f"({den})"
    return f"{num}/{den}"


def _coeff_times(c: BaseFunction, mono: str) -> str:
    if c.is_constant():
        return _scaled(c.constant_value(), mono)
    if c.den.is_constant() and len(c.num.terms) == 1:
        ((m, k),) = c.num.terms.items()
        k = k / c.den.constant_value()
        return _scaled(k, _poly_mono(m) + "*" + mono)
    if len(c.num.terms) == 1 and next(iter(c.num.terms.values())) < 0:
        return "-(" + render_base(-c) + ")*" + mono
    return "(" + render_base(c) + ")*" + mono


def render(f: Superfunction) -> str:
    """Canonical text for `f`: terms ordered by weight, then monomial."""
    if f.is_zero():
        return "0"
    gens = f.gens
    parts: list[str] = []
    for m in sorted(f.terms, key=lambda m: (gens.mono_weight(m), m)):
        c = f.terms[m]
        if not m:
            if c.den.is_constant():
                parts.extend(_scaled(k, s) for k, s in _poly_terms(c.num * (1 / c.den.constant_value())))
            else:
                parts.append(render_base(c))
            continue
        mono = "*".join(gens.gens[i].name if e == 1 else f"{gens.gens[i].name}^{e}" for i, e in m)
        parts.append(_coeff_times(c, mono))
    return _signed_join(parts)
