"""Substitution homomorphisms, derivations, and the log/exp correspondence."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping

from ..errors import FiltrationError, GeneratorMismatchError, SubstitutionError
from .base import BaseFunction
from .superfunction import GeneratorSet, Superfunction

_MAX_TAYLOR = 512


class Substitution:
    """A homomorphism given by the images of the source generators.

    `images[name]` is a Superfunction over `target` for every generator of
    `source`.  With a cutoff the substitution works mod I_k in the target
    (graded mode); without one it relies on nilpotency (super mode).
    Parity preservation is always checked.  Weight homogeneity of the
    non-base images is checked only when `homogeneous=True`.
    """

    __slots__ = ("source", "target", "images", "cutoff")

    def __init__(
        self,
        source: GeneratorSet,
        target: GeneratorSet,
        images: Mapping[str, Superfunction],
        cutoff: int | None = None,
        homogeneous: bool = False,
    ):
        self.source = source
        self.target = target
        self.cutoff = cutoff
        imgs: dict[str, Superfunction] = {}
        for g in source:
            if g.name not in images:
                raise SubstitutionError(f"no image given for generator {g.name}")
            img = images[g.name]
            if img.gens != target:
                raise GeneratorMismatchError(f"image of {g.name} is not over the target generators")
            if cutoff is not None:
                img = img.truncate(cutoff)
            elif img.cutoff is not None:
                img = img.with_cutoff(None)
            p = img.parity()
            if p is None or (p != g.parity and not img.is_zero()):
                raise SubstitutionError(f"image of {g.name} does not have parity {g.parity_name}")
            if homogeneous and not g.is_base and not img.is_zero() and img.weights() != {g.weight}:
                raise SubstitutionError(f"image of {g.name} is not homogeneous of weight {g.weight}")
            if homogeneous and g.is_base and not img.is_zero() and img.weights() != {0}:
                raise SubstitutionError(f"image of {g.name} is not of weight 0")
            imgs[g.name] = img
        extra = set(images) - set(source.names)
        if extra:
            raise GeneratorMismatchError(f"images given for unknown generators {sorted(extra)}")
        self.images = imgs

    @property
    def mode(self) -> str:
        return "super" if self.cutoff is None else "graded"

    @classmethod
    def identity(cls, gens: GeneratorSet, cutoff: int | None = None) -> "Substitution":
        return cls(gens, gens, {g.name: Superfunction.gen(gens, g.name, cutoff) for g in gens}, cutoff)

    def __call__(self, f: Superfunction) -> Superfunction:
        return substitute(f, self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and all(self.images[n] == other.images[n] for n in self.images)
        )

    __hash__ = None  # type: ignore[assignment]

    def then(self, other: "Substitution") -> "Substitution":
        """``compose(self, other)``: substitute `other` into the images of `self`."""
        return compose(self, other)

    def __repr__(self) -> str:
        body = ", ".join(f"{n} -> {v}" for n, v in self.images.items())
        return f"Substitution({body})"


def _taylor(
    coeff: BaseFunction,
    names: list[str],
    pos: int,
    base_values: Mapping[str, BaseFunction],
    nil_powers: Mapping[str, list[Superfunction]],
    target: GeneratorSet,
    cutoff: int | None,
) -> Superfunction:
    """Expand ``coeff(g0 + g')`` over the variables ``names[pos:]``."""
    if pos == len(names):
        return Superfunction.const(target, coeff.compose(base_values), cutoff)
    name = names[pos]
    powers = nil_powers.get(name)
    if not powers or name not in coeff.variables():
        return _taylor(coeff, names, pos + 1, base_values, nil_powers, target, cutoff)
    total = Superfunction.zero(target, cutoff)
    d = coeff
    n = 0
    while True:
        if n >= len(powers):
            if n > _MAX_TAYLOR:
                raise SubstitutionError("Taylor expansion does not terminate; is a cutoff missing?")
            nxt = powers[-1] * powers[1]
            powers.append(nxt)
        pw = powers[n]
        if pw.is_zero() or d.is_zero():
            break
        inner = _taylor(d * Fraction(1, factorial(n)), names, pos + 1, base_values, nil_powers, target, cutoff)
        total = total + inner * pw
        d = d.derivative(name)
        n += 1
    return total


def substitute(f: Superfunction, s: Substitution) -> Superfunction:
    """Image of `f` under the homomorphism `s`."""
    if f.gens != s.source:
        raise GeneratorMismatchError("superfunction is not over the substitution's source generators")
    target, cutoff = s.target, s.cutoff
    base_names = [g.name for g in s.source.base()]
    base_values: dict[str, BaseFunction] = {}
    nil_powers: dict[str, list[Superfunction]] = {}
    for n in base_names:
        img = s.images[n]
        base_values[n] = img.base_part()
        rest = Superfunction(target, {m: c for m, c in img.terms.items() if m}, cutoff)
        if not rest.is_zero():
            nil_powers[n] = [Superfunction.one(target, cutoff), rest]
    src = s.source.gens
    mono_cache: dict = {}

    def mono_image(m) -> Superfunction:
        hit = mono_cache.get(m)
        if hit is None:
            hit = Superfunction.one(target, cutoff)
            for i, e in m:
                hit = hit * (s.images[src[i].name] ** e)
                if hit.is_zero():
                    break
            mono_cache[m] = hit
        return hit

    result = Superfunction.zero(target, cutoff)
    for m, c in f.terms.items():
        mi = mono_image(m)
        if mi.is_zero():
            continue
        if c.is_constant():
            result = result + mi.scale(c)
            continue
        expanded = _taylor(c, base_names, 0, base_values, nil_powers, target, cutoff)
        result = result + expanded * mi
    return result


def compose(s: Substitution, t: Substitution) -> Substitution:
    """The homomorphism ``f -> t(s(f))``."""
    if s.target != t.source:
        raise GeneratorMismatchError("substitutions are not composable")
    cutoff = t.cutoff if t.cutoff is not None else s.cutoff
    images = {n: substitute(img, t) for n, img in s.images.items()}
    return Substitution(s.source, t.target, images, cutoff)


def rename_generators(f: Superfunction, target: GeneratorSet, mapping: Mapping[str, str]) -> Superfunction:
    """Move `f` to `target` by renaming generators (names absent from `mapping` keep their name)."""
    images = {g.name: Superfunction.gen(target, mapping.get(g.name, g.name), f.cutoff) for g in f.gens}
    return substitute(f, Substitution(f.gens, target, images, f.cutoff))


class DerivationTable:
    """An even derivation given by its values on generators.

    It acts by ``D(f) = sum_g D(g) * d_g f`` with left derivatives, which is
    the correct Leibniz extension for a parity-preserving derivation.
    """

    __slots__ = ("gens", "images", "cutoff")

    def __init__(self, gens: GeneratorSet, images: Mapping[str, Superfunction], cutoff: int | None = None):
        self.gens = gens
        self.cutoff = cutoff
        imgs = {}
        for g in gens:
            img = images.get(g.name, Superfunction.zero(gens, cutoff))
            if img.gens != gens:
                raise GeneratorMismatchError(f"derivation value on {g.name} over wrong generators")
            img = img.with_cutoff(cutoff)
            p = img.parity()
            if p is None or (not img.is_zero() and p != g.parity):
                raise SubstitutionError(f"derivation value on {g.name} breaks parity")
            imgs[g.name] = img
        self.images = imgs

    @classmethod
    def zero(cls, gens: GeneratorSet, cutoff: int | None = None) -> "DerivationTable":
        return cls(gens, {}, cutoff)

    def apply(self, f: Superfunction) -> Superfunction:
        out = Superfunction.zero(self.gens, self.cutoff)
        f = f.with_cutoff(self.cutoff) if self.cutoff is not None else f
        for name, img in self.images.items():
            if img.is_zero():
                continue
            d = f.left_derivative(name)
            if not d.is_zero():
                out = out + img * d
        return out

    __call__ = apply

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.images.values())

    def component(self, shift: int) -> "DerivationTable":
        """Part of the derivation raising weight by exactly `shift`."""
        return DerivationTable(
            self.gens, {g.name: self.images[g.name].pr(g.weight + shift) for g in self.gens}, self.cutoff
        )

    def __add__(self, other: "DerivationTable") -> "DerivationTable":
        return DerivationTable(self.gens, {n: self.images[n] + other.images[n] for n in self.images}, self.cutoff)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DerivationTable):
            return NotImplemented
        return self.gens == other.gens and all(self.images[n] == other.images[n] for n in self.images)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = ", ".join(f"{n} -> {v}" for n, v in self.images.items() if not v.is_zero())
        return f"DerivationTable({body or '0'})"


def _filtration_gap(gens: GeneratorSet, name: str, delta: Superfunction) -> int | None:
    w = delta.min_weight()
    return None if w is None else w - gens[name].weight


def check_aut2(a: Substitution) -> None:
    """Raise FiltrationError unless ``a(u) - u`` raises weight by at least 2 for all u."""
    if a.source != a.target:
        raise FiltrationError("an automorphism must map a chart to itself")
    for g in a.source:
        delta = a.images[g.name] - Superfunction.gen(a.target, g.name, a.cutoff)
        gap = _filtration_gap(a.source, g.name, delta)
        if gap is not None and gap < 2:
            raise FiltrationError(f"{g.name} is moved by a term of filtration shift {gap} < 2")


def log_automorphism(a: Substitution, k: int | None = None) -> DerivationTable:
    """``log a = sum (-1)^(m+1) (a - id)^m / m`` as a derivation table."""
    if k is not None and a.cutoff != k:
        a = Substitution(a.source, a.target, a.images, k)
    check_aut2(a)
    gens = a.source
    cutoff = a.cutoff
    out = {}
    for g in gens:
        h = a.images[g.name] - Superfunction.gen(gens, g.name, cutoff)
        total = Superfunction.zero(gens, cutoff)
        m = 1
        while not h.is_zero():
            if m > _MAX_TAYLOR:
                raise FiltrationError("log series does not terminate")
            term = h.scale(Fraction(1, m))
            total = total + (term if m % 2 else -term)
            h = substitute(h, a) - h
            m += 1
        out[g.name] = total
    return DerivationTable(gens, out, cutoff)


def apply_log_series(a: Substitution, f: Superfunction) -> Superfunction:
    """Evaluate ``(log a)(f)`` straight from the series, without a table."""
    gens = a.source
    h = substitute(f, a) - f.with_cutoff(a.cutoff)
    total = Superfunction.zero(gens, a.cutoff)
    m = 1
    while not h.is_zero():
        if m > _MAX_TAYLOR:
            raise FiltrationError("log series does not terminate")
        term = h.scale(Fraction(1, m))
        total = total + (term if m % 2 else -term)
        h = substitute(h, a) - h
        m += 1
    return total


def exp_derivation(D: DerivationTable, k: int | None = None) -> Substitution:
    """``exp D = sum D^m / m!`` as a substitution of the chart into itself."""
    cutoff = D.cutoff if k is None else k
    if k is not None and D.cutoff != k:
        D = DerivationTable(D.gens, D.images, k)
    gens = D.gens
    for g in gens:
        gap = _filtration_gap(gens, g.name, D.images[g.name])
        if gap is not None and gap < 2:
            raise FiltrationError(f"derivation lowers the filtration gap on {g.name} to {gap}")
    images = {}
    for g in gens:
        cur = Superfunction.gen(gens, g.name, cutoff)
        total = cur
        m = 1
        while True:
            cur = D.apply(cur)
            if cur.is_zero():
                break
            if m > _MAX_TAYLOR:
                raise FiltrationError("exponential series does not terminate")
            total = total + cur.scale(Fraction(1, factorial(m)))
            m += 1
        images[g.name] = total
    return Substitution(gens, gens, images, cutoff)


def lambda2(a: Substitution, k: int | None = None) -> DerivationTable:
    """Weight-shift-2 component of ``log a``."""
    return log_automorphism(a, k).component(2)
