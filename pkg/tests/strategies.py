"""Random data for property tests: superfunctions, atlases and morphisms."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from supercover.algebra import BaseFunction, Generator, GeneratorSet, Poly, Substitution, Superfunction, substitute
from supercover.atlas import SUPER, Atlas, Chart, TransitionMap, compose

# a fixed mixed generator set: two base coordinates, one weighted even, three odd
MIXED = GeneratorSet(
    [
        Generator("x", 0, 0),
        Generator("y", 0, 0),
        Generator("z", 2, 0),
        Generator("xi1", 1, 1),
        Generator("xi2", 1, 1),
        Generator("xi3", 1, 1),
    ]
)

small_fracs = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def base_functions(draw, names=("x", "y"), allow_den: bool = True) -> BaseFunction:
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        mono = []
        for n in names:
            e = draw(st.integers(0, 2))
            if e:
                mono.append((n, e))
        terms[tuple(mono)] = draw(small_fracs)
    num = Poly(terms)
    den = Poly.const(1)
    if allow_den and draw(st.booleans()):
        choice = draw(st.sampled_from(["mono", "shift"]))
        v = draw(st.sampled_from(names))
        den = Poly.var(v) ** draw(st.integers(1, 2)) if choice == "mono" else Poly.var(v) + draw(st.integers(1, 3))
    return BaseFunction(num, den)


def _mono_strategy(gens: GeneratorSet):
    nonbase = [g.name for g in gens.nonbase()]
    return st.lists(st.sampled_from(nonbase), max_size=3) if nonbase else st.just([])


@st.composite
def superfunctions(draw, gens: GeneratorSet = MIXED, max_terms: int = 5, parity: int | None = None) -> Superfunction:
    names = tuple(g.name for g in gens.base())
    f = Superfunction.zero(gens)
    for _ in range(draw(st.integers(0, max_terms))):
        mono = draw(_mono_strategy(gens))
        coeff = draw(base_functions(names)) if names else BaseFunction.const(draw(small_fracs))
        term = Superfunction.monomial(gens, mono, coeff)
        if parity is not None and term.parity() != parity:
            continue
        f = f + term
    return f


@st.composite
def homogeneous_superfunctions(draw, gens: GeneratorSet = MIXED) -> Superfunction:
    p = draw(st.sampled_from([0, 1]))
    return draw(superfunctions(gens, parity=p))


# seeded generators used by the acceptance suite


def rand_frac(rng: random.Random, bound: int = 3) -> Fraction:
    while True:
        q = rng.randint(1, 3)
        p = rng.randint(-bound * q, bound * q)
        if p:
            return Fraction(p, q)


def random_poly_superfunction(
    rng: random.Random, gens: GeneratorSet, parity: int, max_degree: int = 2, max_terms: int = 4
) -> Superfunction:
    """Polynomial of the given parity with total degree <= max_degree."""
    names = gens.names
    f = Superfunction.zero(gens)
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(0, max_degree)
        picks = [rng.choice(names) for _ in range(deg)]
        base = [n for n in picks if gens[n].is_base]
        rest = [n for n in picks if not gens[n].is_base]
        if sum(gens[n].parity for n in rest) % 2 != parity:
            continue
        coeff = BaseFunction(Poly({tuple(sorted({n: base.count(n) for n in base}.items())): rand_frac(rng)}))
        f = f + Superfunction.monomial(gens, rest, coeff)
    return f


def super_chart(cid: str, evens: list[str], odds: list[str]) -> Chart:
    gens = [Generator(n, 0, 0) for n in evens] + [Generator(n, 1, 1) for n in odds]
    return Chart(cid, gens, SUPER)


def random_polynomial_morphism(rng: random.Random, src: Chart, dst: Chart) -> TransitionMap:
    images = {}
    for g in dst.generators:
        images[g.name] = random_poly_superfunction(rng, src.gens, g.parity)
    return TransitionMap(src, dst, images)


def random_chart_shape(rng: random.Random, cid: str, prefix: str) -> Chart:
    ne = rng.randint(0, 2)
    no = rng.randint(0, 3)
    if ne + no == 0:
        ne = 1
    return super_chart(cid, [f"{prefix}{i}" for i in range(1, ne + 1)], [f"{prefix}o{i}" for i in range(1, no + 1)])


# invertible atlases


def _bf(expr_terms: dict, den: dict | None = None) -> BaseFunction:
    return BaseFunction(Poly(expr_terms), Poly(den) if den else Poly.const(1))


def random_base_map(rng: random.Random, xs: list[str], ys: list[str]):
    """Return (forward, inverse) base maps: forward[y] over xs, inverse[x] over ys."""
    if len(xs) == 1:
        x, y = xs[0], ys[0]
        X, Y = BaseFunction.var(x), BaseFunction.var(y)
        kind = rng.choice(["affine", "inv", "mobius"])
        a = rand_frac(rng)
        b = Fraction(rng.randint(-3, 3))
        if kind == "affine":
            return {y: X * a + b}, {x: (Y - b) / a}
        if kind == "inv":
            return {y: (X + b).inverse() * a}, {x: Y.inverse() * a - b}
        c = rand_frac(rng)
        d = Fraction(rng.randint(-3, 3))
        # (a x + b) / (c x + d) with a d - b c != 0
        while a * d - b * c == 0:
            d += 1
        fwd = (X * a + b) / (X * c + d)
        inv = (Y * (-d) + b) / (Y * c - a)
        return {y: fwd}, {x: inv}
    x1, x2 = xs
    y1, y2 = ys
    a, c = rand_frac(rng), rand_frac(rng)
    b = Fraction(rng.randint(-3, 3))
    p = BaseFunction.var(x1) * Fraction(rng.randint(-2, 2)) + BaseFunction.var(x1) ** 2 * Fraction(rng.randint(-1, 1))
    fwd = {y1: BaseFunction.var(x1) * a + b, y2: BaseFunction.var(x2) * c + p}
    X1 = (BaseFunction.var(y1) - b) / a
    p_back = p.compose({x1: X1})
    inv = {x1: X1, x2: (BaseFunction.var(y2) - p_back) / c}
    return fwd, inv


def random_h_matrix(rng: random.Random, xs: list[str]) -> list[list[BaseFunction]]:
    x = BaseFunction.var(xs[0])
    d1 = x ** rng.randint(-2, 2) * rand_frac(rng)
    d2 = x ** rng.randint(-2, 2) * rand_frac(rng)
    w = BaseFunction(Poly({((xs[0], rng.randint(0, 1)),) if rng.random() < 0.5 else (): rng.randint(-2, 2)}))
    if rng.random() < 0.5:
        return [[d1, d1 * w], [BaseFunction.zero(), d2]]
    return [[d1, BaseFunction.zero()], [d2 * w, d2]]


def invert_super_map(t: TransitionMap, base_inverse: dict[str, BaseFunction]) -> TransitionMap:
    """Inverse transition by fixed-point iteration, starting from exact base and linear inverses.

    Only used to manufacture test atlases; the result is validated by the
    cocycle check.
    """
    from supercover.algebra import matrix as mx

    src, dst = t.from_chart, t.to_chart
    xs = [g.name for g in src.even0()]
    ys = [g.name for g in dst.even0()]
    xis = [g.name for g in src.odd()]
    etas = [g.name for g in dst.odd()]
    G = dst.gens

    def lift(b: BaseFunction) -> Superfunction:
        return Superfunction.const(G, b)

    H = [[t.images[e].coefficient([q]).compose(base_inverse) for q in xis] for e in etas]
    K = mx.inverse(H) if H else []
    images: dict[str, Superfunction] = {x: lift(base_inverse[x]) for x in xs}
    for row, xi in zip(K, xis):
        f = Superfunction.zero(G)
        for c, e in zip(row, etas):
            f = f + Superfunction.gen(G, e).scale(c)
        images[xi] = f
    J = [[t.images[y].base_part().derivative(x).compose(base_inverse) for x in xs] for y in ys]
    Jinv = mx.inverse(J) if J else []
    for _ in range(len(xis) + 2):
        guess = Substitution(src.gens, G, images)
        res = {n: substitute(t.images[n], guess) - Superfunction.gen(G, n) for n in ys + etas}
        if all(r.is_zero() for r in res.values()):
            break
        new = dict(images)
        for i, x in enumerate(xs):
            corr = Superfunction.zero(G)
            for j, y in enumerate(ys):
                corr = corr + res[y].scale(Jinv[i][j])
            new[x] = images[x] - corr
        for i, xi in enumerate(xis):
            corr = Superfunction.zero(G)
            for j, e in enumerate(etas):
                corr = corr + res[e].scale(K[i][j])
            new[xi] = images[xi] - corr
        images = new
    return TransitionMap(dst, src, images)


def random_odd2_atlas(rng: random.Random, n_even: int | None = None, split: bool = False) -> Atlas:
    """Two-chart atlas of odd dimension 2 with exactly invertible transitions."""
    ne = n_even if n_even is not None else rng.choice([1, 1, 2])
    xs = ["x"] if ne == 1 else ["x1", "x2"]
    ys = ["y"] if ne == 1 else ["y1", "y2"]
    c0 = super_chart("0", xs, ["xi1", "xi2"])
    c1 = super_chart("1", ys, ["eta1", "eta2"])
    fwd, inv = random_base_map(rng, xs, ys)
    H = random_h_matrix(rng, xs)
    G0 = c0.gens
    images = {}
    x0 = BaseFunction.var(xs[0])
    for y in ys:
        Z = BaseFunction.zero()
        if not split:
            Z = x0 ** rng.randint(-3, 1) * rand_frac(rng) + Fraction(rng.randint(-1, 1))
        images[y] = Superfunction.const(G0, fwd[y]) + Superfunction.monomial(G0, ["xi1", "xi2"], Z)
    for row, e in zip(H, ["eta1", "eta2"]):
        f = Superfunction.zero(G0)
        for c, q in zip(row, ["xi1", "xi2"]):
            f = f + Superfunction.gen(G0, q).scale(c)
        images[e] = f
    t01 = TransitionMap(c0, c1, images)
    t10 = invert_super_map(t01, inv)
    return Atlas(SUPER, [c0, c1], {("0", "1"): t01, ("1", "0"): t10})


def three_chart_atlas(rng: random.Random, split: bool = False) -> Atlas:
    """Charts 0, 1, 2 on one even and two odd coordinates, glued consistently."""
    a = random_odd2_atlas(rng, 1, split)
    b = random_odd2_atlas(rng, 1, split)
    c0, c1 = a.charts
    c2 = super_chart("2", ["w"], ["zeta1", "zeta2"])
    ren_src = {"x": "y", "xi1": "eta1", "xi2": "eta2"}
    ren_dst = {"y": "w", "eta1": "zeta1", "eta2": "zeta2"}

    def moved(t: TransitionMap, new_src: Chart, new_dst: Chart, smap: dict, dmap: dict) -> TransitionMap:
        imgs = {}
        for g in t.to_chart.generators:
            f = t.images[g.name]
            sub = Substitution(f.gens, new_src.gens, {h.name: Superfunction.gen(new_src.gens, smap[h.name]) for h in f.gens})
            imgs[dmap[g.name]] = substitute(f, sub)
        return TransitionMap(new_src, new_dst, imgs)

    t12 = moved(b.transition("0", "1"), c1, c2, ren_src, ren_dst)
    t21 = moved(b.transition("1", "0"), c2, c1, ren_dst, ren_src)
    t01, t10 = a.transition("0", "1"), a.transition("1", "0")
    t02 = compose(t01, t12)
    t20 = compose(t21, t10)
    trans = {("0", "1"): t01, ("1", "0"): t10, ("1", "2"): t12, ("2", "1"): t21, ("0", "2"): t02, ("2", "0"): t20}
    return Atlas(SUPER, [c0, c1, c2], trans, [("0", "1", "2")])


def random_aut2(rng: random.Random, chart: Chart, k: int | None = None) -> Substitution:
    """Random automorphism moving each coordinate by terms two weights higher."""
    gens = chart.gens
    odd = [g.name for g in chart.odd()]
    evens = [g.name for g in chart.even0()]
    images = {}
    for g in chart.generators:
        f = Superfunction.gen(gens, g.name)
        target_weight = g.weight + 2
        picks = [m for m in _subsets(odd) if len(m) >= target_weight and len(m) % 2 == g.parity]
        for m in picks:
            if rng.random() < 0.7:
                coeff = rand_frac(rng)
                b = BaseFunction.const(coeff)
                if evens and rng.random() < 0.5:
                    b = b * BaseFunction.var(rng.choice(evens)) ** rng.randint(-1, 2)
                f = f + Superfunction.monomial(gens, m, b)
        images[g.name] = f
    return Substitution(gens, gens, images, k)


def _subsets(items: list[str]) -> list[list[str]]:
    out: list[list[str]] = [[]]
    for it in items:
        out += [s + [it] for s in out]
    return out
