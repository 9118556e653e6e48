"""Exact rational functions in the weight-0 even coordinates.

`Poly` is a sparse multivariate polynomial over `Fraction`; `BaseFunction`
is a quotient of two such polynomials.  Equality of base functions is
decided by cross-multiplication, so no canonical form is required for
correctness; normalization only keeps expressions small.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from ..errors import DegenerateDenominatorError

Monomial = tuple[tuple[str, int], ...]
Scalar = Union[int, Fraction]

_ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def _mono_div(a: Monomial, b: Monomial) -> Monomial | None:
    """Return a/b if b divides a, else None."""
    exps = dict(a)
    for v, e in b:
        have = exps.get(v, 0)
        if have < e:
            return None
        if have == e:
            del exps[v]
        else:
            exps[v] = have - e
    return tuple(sorted(exps.items()))


def _canonical(m: Monomial) -> Monomial:
    """Sorted, merged exponents with zero exponents dropped."""
    if all(e > 0 for _, e in m) and all(m[i][0] < m[i + 1][0] for i in range(len(m) - 1)):
        return m
    exps: dict[str, int] = {}
    for v, e in m:
        if e < 0:
            raise ValueError(f"negative exponent for {v} in a polynomial")
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in exps.items() if e))


class Poly:
    """Sparse polynomial with rational coefficients; values are immutable."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if not c:
                    continue
                m = _canonical(m)
                clean[m] = clean.get(m, 0) + Fraction(c)
        self.terms = {m: c for m, c in clean.items() if c}
        self._hash: int | None = None

    # construction helpers
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls({_ONE_MONO: c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(_ONE_MONO, Fraction(0))

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self.terms), default=0)

    # arithmetic
    def __add__(self, other: "Poly | Scalar") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly | Scalar") -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Poly":
        return Poly.const(other) - self

    def __mul__(self, other: "Poly | Scalar") -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            if not c:
                return Poly()
            return Poly._raw({m: v * c for m, v in self.terms.items()})
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative exponent")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def derivative(self, name: str) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(name, 0)
            if not e:
                continue
            if e == 1:
                del exps[name]
            else:
                exps[name] = e - 1
            key = tuple(sorted(exps.items()))
            out[key] = out.get(key, 0) + c * e
        return Poly(out)

    # ordering and division
    def _order(self, others: Iterable["Poly"] = ()) -> list[str]:
        names = self.variables()
        for o in others:
            names |= o.variables()
        return sorted(names)

    @staticmethod
    def _vec(m: Monomial, order: list[str]) -> tuple[int, ...]:
        d = dict(m)
        return tuple(d.get(v, 0) for v in order)

    def leading(self, order: list[str] | None = None) -> tuple[Monomial, Fraction]:
        """Lex-leading term with respect to `order` (sorted names by default)."""
        if order is None:
            order = self._order()
        m = max(self.terms, key=lambda mm: Poly._vec(mm, order))
        return m, self.terms[m]

    def exact_div(self, other: "Poly") -> "Poly | None":
        """Quotient self/other if it is a polynomial, otherwise None."""
        if other.is_zero():
            raise DegenerateDenominatorError("division by the zero polynomial")
        if self.is_zero():
            return Poly()
        order = self._order([other])
        lm, lc = other.leading(order)
        rem = self
        quo: dict[Monomial, Fraction] = {}
        while not rem.is_zero():
            rm, rc = rem.leading(order)
            q = _mono_div(rm, lm)
            if q is None:
                return None
            c = rc / lc
            quo[q] = quo.get(q, 0) + c
            rem = rem - other * Poly._raw({q: c})
        return Poly(quo)

    def monomial_content(self) -> Monomial:
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        try:
            common = dict(next(it))
        except StopIteration:
            return _ONE_MONO
        for m in it:
            d = dict(m)
            for v in list(common):
                e = min(common[v], d.get(v, 0))
                if e:
                    common[v] = e
                else:
                    del common[v]
            if not common:
                break
        return tuple(sorted(common.items()))

    def divide_monomial(self, m: Monomial) -> "Poly":
        out = {}
        for mm, c in self.terms.items():
            q = _mono_div(mm, m)
            assert q is not None
            out[q] = c
        return Poly._raw(out)

    def evaluate(self, values: Mapping[str, "BaseFunction"]) -> "BaseFunction":
        """Substitute base functions for variables; missing names stay as is."""
        total = BaseFunction.zero()
        cache: dict[tuple[str, int], BaseFunction] = {}
        for m, c in self.terms.items():
            term = BaseFunction.const(c)
            for v, e in m:
                if v in values:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = values[v] ** e
                    term = term * cache[key]
                else:
                    term = term * BaseFunction(Poly({((v, e),): 1}))
            total = total + term
        return total

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            exps: dict[str, int] = {}
            for v, e in m:
                w = mapping.get(v, v)
                exps[w] = exps.get(w, 0) + e
            key = tuple(sorted(exps.items()))
            out[key] = out.get(key, 0) + c
        return Poly(out)

    def __repr__(self) -> str:
        from ..expr import render_poly

        return f"Poly({render_poly(self)})"


def _univariate_gcd(a: Poly, b: Poly, name: str) -> Poly:
    """Monic gcd of two polynomials in the single variable `name`."""

    def coeffs(p: Poly) -> list[Fraction]:
        deg = p.degree_in(name)
        out = [Fraction(0)] * (deg + 1)
        for m, c in p.terms.items():
            out[dict(m).get(name, 0)] = c
        return out

    def trim(c: list[Fraction]) -> list[Fraction]:
        while c and c[-1] == 0:
            c.pop()
        return c

    x, y = trim(coeffs(a)), trim(coeffs(b))
    while y:
        r = list(x)
        while len(r) >= len(y) and r:
            f = r[-1] / y[-1]
            shift = len(r) - len(y)
            for i, c in enumerate(y):
                r[i + shift] -= f * c
            r.pop()
            trim(r)
        x, y = y, r
    lead = x[-1]
    return Poly({((name, i),) if i else _ONE_MONO: c / lead for i, c in enumerate(x) if c})


class BaseFunction:
    """Quotient ``num/den`` of polynomials in weight-0 even coordinates.

    Not hashable: two different representations may denote the same
    function, and equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly | Scalar = 0, den: Poly | Scalar = 1, *, normalize: bool = True):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise DegenerateDenominatorError("denominator is the zero polynomial")
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def zero(cls) -> "BaseFunction":
        return cls(Poly(), Poly.const(1), normalize=False)

    @classmethod
    def one(cls) -> "BaseFunction":
        return cls(Poly.const(1), Poly.const(1), normalize=False)

    @classmethod
    def const(cls, c: Scalar) -> "BaseFunction":
        return cls(Poly.const(c), Poly.const(1), normalize=False)

    @classmethod
    def var(cls, name: str) -> "BaseFunction":
        return cls(Poly.var(name), Poly.const(1), normalize=False)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_value() / self.den.constant_value()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    @staticmethod
    def _coerce(x: "BaseFunction | Poly | Scalar") -> "BaseFunction":
        if isinstance(x, BaseFunction):
            return x
        if isinstance(x, Poly):
            return BaseFunction(x, Poly.const(1), normalize=False)
        return BaseFunction.const(x)

    def __add__(self, other: "BaseFunction | Scalar") -> "BaseFunction":
        o = BaseFunction._coerce(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return BaseFunction(self.num + o.num, self.den)
        q = o.den.exact_div(self.den) if len(o.den.terms) >= len(self.den.terms) else None
        if q is not None:
            return BaseFunction(self.num * q + o.num, o.den)
        q = self.den.exact_div(o.den)
        if q is not None:
            return BaseFunction(self.num + o.num * q, self.den)
        return BaseFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "BaseFunction":
        return BaseFunction(-self.num, self.den, normalize=False)

    def __sub__(self, other: "BaseFunction | Scalar") -> "BaseFunction":
        return self + (-BaseFunction._coerce(other))

    def __rsub__(self, other: Scalar) -> "BaseFunction":
        return BaseFunction._coerce(other) - self

    def __mul__(self, other: "BaseFunction | Scalar") -> "BaseFunction":
        if not isinstance(other, (BaseFunction, Poly)):
            c = Fraction(other)
            if not c:
                return BaseFunction.zero()
            return BaseFunction(self.num * c, self.den, normalize=False)
        o = BaseFunction._coerce(other)
        if self.is_zero() or o.is_zero():
            return BaseFunction.zero()
        if o.is_constant():
            return BaseFunction(self.num * o.constant_value(), self.den, normalize=False)
        if self.is_constant():
            return BaseFunction(o.num * self.constant_value(), o.den, normalize=False)
        return BaseFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "BaseFunction":
        if self.is_zero():
            raise DegenerateDenominatorError("inverse of the zero function")
        return BaseFunction(self.den, self.num)

    def __truediv__(self, other: "BaseFunction | Scalar") -> "BaseFunction":
        return self * BaseFunction._coerce(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "BaseFunction":
        return BaseFunction._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "BaseFunction":
        if n < 0:
            return self.inverse() ** (-n)
        return BaseFunction(self.num**n, self.den**n, normalize=False)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Poly)):
            other = BaseFunction._coerce(other)
        if not isinstance(other, BaseFunction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None  # type: ignore[assignment]

    def derivative(self, name: str) -> "BaseFunction":
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        if dd.is_zero():
            return BaseFunction(dn, self.den)
        return BaseFunction(dn * self.den - self.num * dd, self.den * self.den)

    def compose(self, values: Mapping[str, "BaseFunction"]) -> "BaseFunction":
        """Substitute base functions for the variables named in `values`."""
        if not values or not (self.variables() & set(values)):
            return self
        n = self.num.evaluate(values)
        d = self.den.evaluate(values)
        if d.is_zero():
            raise DegenerateDenominatorError("denominator vanishes identically after composition")
        return n / d

    def rename(self, mapping: Mapping[str, str]) -> "BaseFunction":
        return BaseFunction(self.num.rename(mapping), self.den.rename(mapping), normalize=False)

    def __repr__(self) -> str:
        from ..expr import render_base

        return f"BaseFunction({render_base(self)})"

    def __str__(self) -> str:
        from ..expr import render_base

        return render_base(self)


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero():
        return Poly(), Poly.const(1)
    if den.is_constant():
        c = den.constant_value()
        return (num * (1 / c) if c != 1 else num), Poly.const(1)
    common = _mono_gcd(num.monomial_content(), den.monomial_content())
    if common:
        num = num.divide_monomial(common)
        den = den.divide_monomial(common)
    names = num.variables() | den.variables()
    if len(names) == 1 and not den.is_constant():
        (name,) = names
        g = _univariate_gcd(num, den, name)
        if not g.is_constant():
            num = num.exact_div(g)  # type: ignore[assignment]
            den = den.exact_div(g)  # type: ignore[assignment]
    elif not den.is_constant():
        q = num.exact_div(den)
        if q is not None:
            num, den = q, Poly.const(1)
        elif len(num.terms) > 1:
            q = den.exact_div(num)
            if q is not None:
                num, den = Poly.const(1), q
    _, lc = den.leading()
    if lc != 1:
        num = num * (1 / lc)
        den = den * (1 / lc)
    return num, den


def _mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    out = []
    for v, e in a:
        f = min(e, db.get(v, 0))
        if f:
            out.append((v, f))
    return tuple(out)
