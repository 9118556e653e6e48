"""Supercommutative algebras with weighted generators.

A `Superfunction` is a finite sum ``c(x) * m`` where ``c`` is a
`BaseFunction` in the weight-0 even generators and ``m`` is a monomial in
the remaining generators, stored in a fixed canonical order with the
Koszul sign absorbed into the coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from ..errors import (
    CutoffMismatchError,
    DegenerateDenominatorError,
    GeneratorMismatchError,
)
from .base import BaseFunction, Poly

SMono = tuple[tuple[int, int], ...]
Coeff = Union[int, Fraction, BaseFunction]

EVEN, ODD = 0, 1


def parse_parity(p: int | str) -> int:
    if p in (0, "even", "0"):
        return EVEN
    if p in (1, "odd", "1"):
        return ODD
    raise ValueError(f"invalid parity {p!r}")


@dataclass(frozen=True, order=True)
class Generator:
    name: str
    weight: int
    parity: int

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError(f"negative weight for generator {self.name}")
        object.__setattr__(self, "parity", parse_parity(self.parity))

    @property
    def is_base(self) -> bool:
        """True for weight-0 even generators, which live in coefficients."""
        return self.parity == EVEN and self.weight == 0

    @property
    def parity_name(self) -> str:
        return "odd" if self.parity else "even"


class GeneratorSet:
    """An ordered, duplicate-free collection of generators.

    The canonical order puts even generators first and sorts each parity
    class by name.  Monomials refer to generators by position.
    """

    __slots__ = ("gens", "_index", "_key", "_mul_cache", "_wt_cache", "base_names", "_hash")

    def __init__(self, gens: Iterable[Generator]):
        gl = sorted(gens, key=lambda g: (g.parity, g.name))
        names = [g.name for g in gl]
        if len(set(names)) != len(names):
            raise GeneratorMismatchError(f"duplicate generator names in {names}")
        self.gens: tuple[Generator, ...] = tuple(gl)
        self._index = {g.name: i for i, g in enumerate(gl)}
        self._key = self.gens
        self._hash = hash(self._key)
        self._mul_cache: dict[tuple[SMono, SMono], tuple[int, SMono]] = {}
        self._wt_cache: dict[SMono, int] = {}
        self.base_names = frozenset(g.name for g in gl if g.is_base)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.gens)

    def __len__(self) -> int:
        return len(self.gens)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __getitem__(self, name: str) -> Generator:
        try:
            return self.gens[self._index[name]]
        except KeyError:
            raise GeneratorMismatchError(f"unknown generator {name!r}") from None

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GeneratorMismatchError(f"unknown generator {name!r}") from None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GeneratorSet) and (self is other or self._key == other._key)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "GeneratorSet(" + ", ".join(f"{g.name}:{g.weight}{'o' if g.parity else 'e'}" for g in self.gens) + ")"

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.gens]

    def base(self) -> list[Generator]:
        return [g for g in self.gens if g.is_base]

    def nonbase(self) -> list[Generator]:
        return [g for g in self.gens if not g.is_base]

    def odd(self) -> list[Generator]:
        return [g for g in self.gens if g.parity == ODD]

    def mono_weight(self, m: SMono) -> int:
        w = self._wt_cache.get(m)
        if w is None:
            w = sum(self.gens[i].weight * e for i, e in m)
            self._wt_cache[m] = w
        return w

    def mono_parity(self, m: SMono) -> int:
        return sum(self.gens[i].parity * e for i, e in m) % 2

    def mono_mul(self, a: SMono, b: SMono) -> tuple[int, SMono]:
        """Product of two monomials as ``(sign, monomial)``; sign 0 means zero."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        gens = self.gens
        exps = dict(a)
        for i, e in b:
            if i in exps:
                if gens[i].parity == ODD:
                    self._mul_cache[key] = (0, ())
                    return 0, ()
                exps[i] += e
            else:
                exps[i] = e
        # Koszul sign: each odd generator of b passes the larger odd ones of a.
        swaps = 0
        odd_a = [i for i, _ in a if gens[i].parity == ODD]
        for j, _ in b:
            if gens[j].parity == ODD:
                swaps += sum(1 for i in odd_a if i > j)
        res = (-1 if swaps % 2 else 1, tuple(sorted(exps.items())))
        self._mul_cache[key] = res
        return res

    def monomial(self, names: Iterable[str]) -> tuple[int, SMono]:
        """Canonical monomial for the product of generators in the given order."""
        sign, m = 1, ()
        for n in names:
            i = self.index(n)
            if self.gens[i].is_base:
                raise GeneratorMismatchError(f"{n} is a base coordinate, not a monomial factor")
            s, m = self.mono_mul(m, ((i, 1),))
            sign *= s
            if not sign:
                return 0, ()
        return sign, m

    def union(self, other: "GeneratorSet") -> "GeneratorSet":
        merged = {g.name: g for g in self.gens}
        for g in other.gens:
            if g.name in merged and merged[g.name] != g:
                raise GeneratorMismatchError(f"conflicting declarations of {g.name}")
            merged[g.name] = g
        return GeneratorSet(merged.values())


def _as_base(c: Coeff) -> BaseFunction:
    if isinstance(c, BaseFunction):
        return c
    if isinstance(c, Poly):
        return BaseFunction(c)
    return BaseFunction.const(c)


class Superfunction:
    """An element of a supercommutative algebra, optionally taken mod I_k.

    Equality compares the underlying terms exactly and ignores the cutoff
    tag, so a truncated value equals its untruncated twin whenever they
    have the same terms.
    """

    __slots__ = ("gens", "terms", "cutoff")

    def __init__(self, gens: GeneratorSet, terms: Mapping[SMono, BaseFunction] | None = None, cutoff: int | None = None):
        self.gens = gens
        self.cutoff = cutoff
        clean: dict[SMono, BaseFunction] = {}
        if terms:
            for m, c in terms.items():
                if cutoff is not None and gens.mono_weight(m) > cutoff:
                    continue
                if not c.is_zero():
                    clean[m] = c
        self.terms = clean

    @classmethod
    def _raw(cls, gens: GeneratorSet, terms: dict[SMono, BaseFunction], cutoff: int | None) -> "Superfunction":
        f = cls.__new__(cls)
        f.gens = gens
        f.terms = terms
        f.cutoff = cutoff
        return f

    # constructors
    @classmethod
    def zero(cls, gens: GeneratorSet, cutoff: int | None = None) -> "Superfunction":
        return cls._raw(gens, {}, cutoff)

    @classmethod
    def const(cls, gens: GeneratorSet, c: Coeff, cutoff: int | None = None) -> "Superfunction":
        return cls(gens, {(): _as_base(c)}, cutoff)

    @classmethod
    def one(cls, gens: GeneratorSet, cutoff: int | None = None) -> "Superfunction":
        return cls.const(gens, 1, cutoff)

    @classmethod
    def gen(cls, gens: GeneratorSet, name: str, cutoff: int | None = None) -> "Superfunction":
        g = gens[name]
        if g.is_base:
            return cls(gens, {(): BaseFunction.var(name)}, cutoff)
        return cls(gens, {((gens.index(name), 1),): BaseFunction.one()}, cutoff)

    @classmethod
    def monomial(cls, gens: GeneratorSet, names: Iterable[str], coeff: Coeff = 1, cutoff: int | None = None) -> "Superfunction":
        """``coeff * g1 * g2 * ...`` for the named generators, in that order."""
        base = _as_base(coeff)
        out = cls.one(gens, cutoff) * base
        for n in names:
            out = out * cls.gen(gens, n, cutoff)
        return out

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self) -> Iterator[tuple[SMono, BaseFunction]]:
        return iter(self.terms.items())

    def weights(self) -> set[int]:
        return {self.gens.mono_weight(m) for m in self.terms}

    def max_weight(self) -> int:
        return max(self.weights(), default=-1)

    def min_weight(self) -> int | None:
        return min(self.weights(), default=None)

    def parity(self) -> int | None:
        """0 or 1 for parity-homogeneous values, None when mixed; zero is even."""
        ps = {self.gens.mono_parity(m) for m in self.terms}
        if not ps:
            return EVEN
        return ps.pop() if len(ps) == 1 else None

    def is_base(self) -> bool:
        return all(not m for m in self.terms)

    def base_part(self) -> BaseFunction:
        return self.terms.get((), BaseFunction.zero())

    def coefficient(self, names: Iterable[str] = ()) -> BaseFunction:
        """Coefficient of the product of `names` written in the given order."""
        sign, m = self.gens.monomial(names)
        if not sign:
            raise ValueError("monomial vanishes identically")
        c = self.terms.get(m, BaseFunction.zero())
        return c if sign > 0 else -c

    def variables(self) -> set[str]:
        out: set[str] = set()
        for m, c in self.terms.items():
            out |= c.variables()
            out |= {self.gens.gens[i].name for i, _ in m}
        return out

    # cutoff handling
    def _merge_cutoff(self, other: "Superfunction") -> int | None:
        if self.gens != other.gens:
            raise GeneratorMismatchError(f"operands over different generators: {self.gens} vs {other.gens}")
        a, b = self.cutoff, other.cutoff
        if a is not None and b is not None and a != b:
            raise CutoffMismatchError(f"cutoffs {a} and {b} differ")
        return a if a is not None else b

    def _lift(self, other: "Superfunction | Coeff") -> "Superfunction":
        if isinstance(other, Superfunction):
            return other
        return Superfunction.const(self.gens, other, self.cutoff)

    def pr(self, q: int) -> "Superfunction":
        gw = self.gens.mono_weight
        return Superfunction._raw(self.gens, {m: c for m, c in self.terms.items() if gw(m) == q}, self.cutoff)

    def truncate(self, k: int) -> "Superfunction":
        if k < 0:
            raise ValueError("truncation level must be non-negative")
        gw = self.gens.mono_weight
        return Superfunction._raw(self.gens, {m: c for m, c in self.terms.items() if gw(m) <= k}, k)

    def with_cutoff(self, k: int | None) -> "Superfunction":
        if k is None:
            return Superfunction._raw(self.gens, dict(self.terms), None)
        return self.truncate(k)

    def components(self) -> dict[int, "Superfunction"]:
        return {q: self.pr(q) for q in sorted(self.weights())}

    # arithmetic
    def __add__(self, other: "Superfunction | Coeff") -> "Superfunction":
        other = self._lift(other)
        cutoff = self._merge_cutoff(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            if cutoff is not None and self.gens.mono_weight(m) > cutoff:
                continue
            prev = out.get(m)
            if prev is None:
                out[m] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[m]
                else:
                    out[m] = s
        if cutoff is not None and self.cutoff is None:
            out = {m: c for m, c in out.items() if self.gens.mono_weight(m) <= cutoff}
        return Superfunction._raw(self.gens, out, cutoff)

    def __radd__(self, other: Coeff) -> "Superfunction":
        return self + other

    def __neg__(self) -> "Superfunction":
        return Superfunction._raw(self.gens, {m: -c for m, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other: "Superfunction | Coeff") -> "Superfunction":
        return self + (-self._lift(other))

    def __rsub__(self, other: Coeff) -> "Superfunction":
        return self._lift(other) - self

    def scale(self, c: Coeff) -> "Superfunction":
        b = _as_base(c)
        if b.is_zero():
            return Superfunction.zero(self.gens, self.cutoff)
        out = {}
        for m, v in self.terms.items():
            p = v * b
            if not p.is_zero():
                out[m] = p
        return Superfunction._raw(self.gens, out, self.cutoff)

    def __mul__(self, other: "Superfunction | Coeff") -> "Superfunction":
        if not isinstance(other, Superfunction):
            return self.scale(other)
        cutoff = self._merge_cutoff(other)
        gens = self.gens
        gw = gens.mono_weight
        mul = gens.mono_mul
        out: dict[SMono, BaseFunction] = {}
        for m1, c1 in self.terms.items():
            w1 = gw(m1)
            if cutoff is not None and w1 > cutoff:
                continue
            for m2, c2 in other.terms.items():
                if cutoff is not None and w1 + gw(m2) > cutoff:
                    continue
                sign, m = mul(m1, m2)
                if not sign:
                    continue
                p = c1 * c2
                if sign < 0:
                    p = -p
                prev = out.get(m)
                if prev is None:
                    out[m] = p
                else:
                    s = prev + p
                    if s.is_zero():
                        del out[m]
                    else:
                        out[m] = s
        return Superfunction._raw(gens, {m: c for m, c in out.items() if not c.is_zero()}, cutoff)

    def __rmul__(self, other: Coeff) -> "Superfunction":
        return self.scale(other)

    def __pow__(self, n: int) -> "Superfunction":
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = Superfunction.one(self.gens, self.cutoff)
        for _ in range(n):
            result = result * self
            if result.is_zero():
                break
        return result

    def __truediv__(self, other: "Superfunction | Coeff") -> "Superfunction":
        if isinstance(other, Superfunction):
            if other.gens != self.gens:
                raise GeneratorMismatchError("division across generator sets")
            if not other.is_base():
                raise DegenerateDenominatorError("divisor must be a pure base function")
            other = other.base_part()
        b = _as_base(other)
        if b.is_zero():
            raise DegenerateDenominatorError("division by zero")
        return self.scale(b.inverse())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, BaseFunction)):
            other = Superfunction.const(self.gens, other)
        if not isinstance(other, Superfunction):
            return NotImplemented
        if other.gens != self.gens:
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[m] for m, c in self.terms.items())

    __hash__ = None  # type: ignore[assignment]

    # calculus
    def left_derivative(self, name: str) -> "Superfunction":
        g = self.gens[name]
        gens = self.gens
        out: dict[SMono, BaseFunction] = {}
        if g.is_base:
            for m, c in self.terms.items():
                d = c.derivative(name)
                if not d.is_zero():
                    out[m] = d
            return Superfunction._raw(gens, out, self.cutoff)
        idx = gens.index(name)
        for m, c in self.terms.items():
            exps = dict(m)
            e = exps.get(idx)
            if e is None:
                continue
            if g.parity == ODD:
                before = sum(1 for i, _ in m if i < idx and gens.gens[i].parity == ODD)
                coeff = -c if before % 2 else c
                del exps[idx]
            else:
                coeff = c * e
                if e == 1:
                    del exps[idx]
                else:
                    exps[idx] = e - 1
            key = tuple(sorted(exps.items()))
            prev = out.get(key)
            out[key] = coeff if prev is None else prev + coeff
        return Superfunction._raw(gens, {m: c for m, c in out.items() if not c.is_zero()}, self.cutoff)

    def map_coefficients(self, fn) -> "Superfunction":
        return Superfunction(self.gens, {m: fn(c) for m, c in self.terms.items()}, self.cutoff)

    def __repr__(self) -> str:
        from ..expr import render

        tag = "" if self.cutoff is None else f" mod I_{self.cutoff}"
        return f"Superfunction({render(self)}{tag})"

    def __str__(self) -> str:
        from ..expr import render

        return render(self)
