"""Acceptance criteria 1-10.

Each test carries ``@pytest.mark.criterion(n)``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import random
import time
from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracles
import strategies as S
from supercover import cli, covering, loop, obstruction
from supercover.algebra import (
    BaseFunction,
    GeneratorSet,
    Poly,
    Substitution,
    Superfunction,
    exp_derivation,
    log_automorphism,
    substitute,
)
from supercover.algebra import matrix as mx
from supercover.atlas import SUPER, Atlas, atlas_from_json, check_cocycle, compose, gr_atlas, load_atlas

DATA = Path(covering.__file__).parent / "data"
SQ = DATA / "superquadric.json"

N_RANDOM = 20


@pytest.fixture(scope="module")
def superquadric() -> Atlas:
    return load_atlas(SQ)


@pytest.fixture(scope="module")
def random_atlases() -> list[Atlas]:
    return [S.random_odd2_atlas(random.Random(seed)) for seed in range(N_RANDOM)]


def _report(n: int, ok: bool, detail: str = "") -> None:
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


# 1


@pytest.mark.criterion(1)
def test_criterion_01_superquadric_cover(tmp_path):
    out = tmp_path / "p2.json"
    t0 = time.perf_counter()
    code = cli.main(["cover", str(SQ), "--degree", "2", "--output", str(out)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    p2 = atlas_from_json(json.loads(out.read_text()))
    t01 = p2.transition("0", "1")
    c0 = p2.chart("0")
    # x, xi_j, x__2 on chart 0 and y, eta_j, y__2 on chart 1
    expected = {
        "y__0": "1/x__0",
        "eta1__1": "xi1__1/x__0^2",
        "eta2__1": "xi2__1/x__0^2",
        "y__2": "-x__2/x__0^2 + xi1__1*xi2__1/x__0^3",
    }
    assert set(t01.images) == set(expected)
    for name, src in expected.items():
        assert t01.images[name] == c0.parse(src), name
    text = json.loads(out.read_text())
    line = [t for t in text["transitions"] if t["from"] == "0"][0]["images"]["y__2"]
    assert line == "-(1/x__0^2)*x__2 + (1/x__0^3)*xi1__1*xi2__1"
    assert check_cocycle(p2).ok
    assert elapsed < 1.0, elapsed
    _report(1, True, f"({elapsed:.3f} s)")


# 2


def _cpoly_to_super(table: dict, gens: GeneratorSet, evens: list[int]) -> Superfunction:
    f = Superfunction.zero(gens)
    for e, c in table.items():
        names = [f"x__{s}" for s, k in zip(evens, e) if s > 0 for _ in range(k)]
        coeff = BaseFunction(Poly({(("x__0", e[0]),) if e[0] else (): c}))
        f = f + Superfunction.monomial(gens, names, coeff)
    return f


def _degree4_polys() -> list[list[Fraction]]:
    basis = [[Fraction(int(i == j)) for j in range(5)] for i in range(5)]
    rng = random.Random(2)
    rand = [[S.rand_frac(rng) for _ in range(5)] for _ in range(10)]
    return basis + rand


@pytest.mark.criterion(2)
def test_criterion_02_one_zero_projection_table():
    chart = S.super_chart("0", ["x"], [])
    cov = covering.covering_chart(chart, 6)
    G = cov.gens
    y = {s: Superfunction.gen(G, f"x__{s}") for s in (2, 4, 6)}
    for coeffs in _degree4_polys():
        F = Superfunction.const(chart.gens, BaseFunction(Poly({(("x", i),) if i else (): c for i, c in enumerate(coeffs) if c})))
        lifted = covering.lift_superfunction(F, 6, chart)

        def deriv(order: int) -> BaseFunction:
            d = oracles.univariate_derivative(coeffs, order)
            return BaseFunction(Poly({(("x__0", i),) if i else (): c for i, c in enumerate(d) if c}))

        closed_form = {
            0: Superfunction.const(G, deriv(0)),
            2: y[2].scale(deriv(1)),
            4: y[4].scale(deriv(1)) + (y[2] * y[2]).scale(deriv(2) * Fraction(1, 2)),
            6: y[6].scale(deriv(1)) + (y[2] * y[4]).scale(deriv(2)) + (y[2] ** 3).scale(deriv(3) * Fraction(1, 6)),
        }
        table = oracles.one_zero_projection_table(coeffs, 6)
        for q in range(7):
            got = lifted.pr(q)
            assert got == closed_form.get(q, Superfunction.zero(G)), (coeffs, q)
            assert got == _cpoly_to_super(table.get(q, {}), G, [0, 2, 4, 6]), (coeffs, q)
    _report(2, True)


# 3


def _grass_to_super(d: dict, gens: GeneratorSet) -> Superfunction:
    f = Superfunction.zero(gens)
    for m, c in d.items():
        f = f + Superfunction.monomial(gens, list(m), c)
    return f


@pytest.mark.criterion(3)
def test_criterion_03_zero_two_lift_formula():
    chart = S.super_chart("0", [], ["xi1", "xi2"])
    rng = random.Random(3)
    for trial in range(12):
        c = {(): S.rand_frac(rng), ("xi1",): S.rand_frac(rng), ("xi2",): S.rand_frac(rng), ("xi1", "xi2"): S.rand_frac(rng)}
        if trial < 4:
            # single-monomial cases isolate each part of the formula
            keep = [(), ("xi1",), ("xi2",), ("xi1", "xi2")][trial]
            c = {keep: c[keep]}
        F = Superfunction.zero(chart.gens)
        for m, v in c.items():
            F = F + Superfunction.monomial(chart.gens, list(m), v)
        at_pt = F.base_part()
        d1 = F.left_derivative("xi1").base_part()
        d2 = F.left_derivative("xi2").base_part()
        # the mixed second derivative of the formula, differentiating xi1 first
        d12 = F.left_derivative("xi1").left_derivative("xi2").base_part()
        for k in range(0, 7):
            G = covering.covering_chart(chart, k).gens
            lifted = covering.lift_superfunction(F, k, chart)
            formula = Superfunction.const(G, at_pt)
            for i, d in ((1, d1), (2, d2)):
                for t in range(1, k + 1, 2):
                    formula = formula + Superfunction.gen(G, f"xi{i}__{t}").scale(d)
            for q in range(1, k // 2 + 1):
                for q1 in range(1, 2 * q, 2):
                    q2 = 2 * q - q1
                    formula = formula + Superfunction.monomial(G, [f"xi1__{q1}", f"xi2__{q2}"], d12)
            brute = _grass_to_super(oracles.lift_pure_odd(c, k), G)
            assert lifted == formula, (c, k)
            assert lifted == brute, (c, k)
    _report(3, True)


# 4


def _morphism_pairs(count: int):
    rng = random.Random(4)
    out = []
    for _ in range(count):
        A = S.random_chart_shape(rng, "A", "a")
        B = S.random_chart_shape(rng, "B", "b")
        C = S.random_chart_shape(rng, "C", "c")
        out.append((S.random_polynomial_morphism(rng, A, B), S.random_polynomial_morphism(rng, B, C)))
    return out


@pytest.mark.criterion(4)
def test_criterion_04_functoriality():
    pairs = _morphism_pairs(50)
    t0 = time.perf_counter()
    checked = 0
    for psi, psi2 in pairs:
        both = compose(psi, psi2)  # psi2 after psi
        for n in (2, 3, 5):
            lhs = covering.lift_morphism(both, n)
            rhs = compose(covering.lift_morphism(psi, n), covering.lift_morphism(psi2, n), n)
            assert lhs == rhs
            checked += 1
    elapsed = time.perf_counter() - t0
    assert checked == 150
    assert elapsed < 30.0, elapsed
    _report(4, True, f"({elapsed:.2f} s)")


# 5


@pytest.mark.criterion(5)
def test_criterion_05_omega_equals_atiyah(superquadric, random_atlases):
    w = obstruction.omega2(superquadric)
    assert not w.is_zero()
    # g: x -> x - x^{-1} xi1 xi2 by hand composition of psi with the gr inverse
    c0 = superquadric.chart("0")
    assert w.data[("0", "1")] == {"x": c0.parse("-(1/x)*xi1*xi2")}
    assert obstruction.atiyah_cocycle_P2(superquadric) == w
    for a in random_atlases:
        assert obstruction.omega2(a) == obstruction.atiyah_cocycle_P2(a)
    split = [gr_atlas(superquadric)] + [S.random_odd2_atlas(random.Random(50 + s), split=True) for s in range(5)]
    split += [gr_atlas(a) for a in random_atlases[:5]]
    for a in split:
        assert obstruction.omega2(a).is_zero()
        assert obstruction.atiyah_cocycle_P2(a).is_zero()
    _report(5, True)


# 6


@pytest.mark.criterion(6)
def test_criterion_06_donagi_witten(superquadric, random_atlases):
    assert obstruction.DW_NORMALIZATION == -1
    for a in [superquadric] + random_atlases:
        for i, j in a.overlaps():
            assert mx.is_identity(obstruction.dw_pair_product(a, i, j))
        assert obstruction.dw_extension_class(a) == obstruction.omega2(a)
    for seed in range(3):
        a = S.three_chart_atlas(random.Random(60 + seed))
        for t in a.triples:
            assert mx.is_identity(obstruction.dw_triple_product(a, t))
        assert obstruction.dw_extension_class(a) == obstruction.omega2(a)
    _report(6, True)


# 7


@pytest.mark.criterion(7)
def test_criterion_07_reconstruction_round_trip(superquadric, random_atlases):
    for a in [superquadric] + random_atlases:
        back = covering.reconstruct_odd2(covering.build_covering_atlas(a, 2))
        for key, t in a.transitions.items():
            r = back.transition(*key)
            assert r.from_chart == t.from_chart and r.to_chart == t.to_chart
            assert r == t, key
    _report(7, True)


# 8


@pytest.mark.criterion(8)
def test_criterion_08_injectivity(superquadric):
    odd2 = Atlas(SUPER, [S.super_chart("0", [], ["xi1", "xi2"])], {})
    charts = [odd2, superquadric] + [S.random_odd2_atlas(random.Random(80 + s), 1) for s in range(5)]
    for a in charts:
        rep = covering.check_injectivity(a, 2)
        assert rep.injective
        assert all(c.rank == 4 for c in rep.charts)
    # a function with a nonzero xi1 xi2 component dies in the first quotient
    for a, src in ((odd2, "3*xi1*xi2"), (superquadric, "(1/x^3)*xi1*xi2")):
        chart = a.charts[0]
        f = chart.parse(src)
        assert covering.lift_superfunction(f, 1, chart).is_zero()
        rep = covering.check_injectivity(a, 1, {chart.id: [f]})
        assert not rep.injective
        first = rep.charts[0]
        assert first.rank == 3 and first.kernel == ["xi1*xi2"]
        assert first.vanishing_functions
    _report(8, True)


# 9


@pytest.mark.criterion(9)
def test_criterion_09_loop_gl11():
    g = loop.gl(1, 1)
    p = loop.build_loop(g, 4)
    real = loop.gl_matrix_realization(1, 1, 4)
    assert len(p) == len(real.algebra) == 10
    assert loop.same_structure(p, real.algebra)
    # independent check on the matrices: every surviving bracket is the matrix supercommutator
    mats = real.matrices

    def mul(x, y):
        out = {}
        for (i, k), a in x.items():
            for (k2, l), b in y.items():
                if k == k2:
                    out[(i, l)] = out.get((i, l), 0) + a * b
        return out

    for x, y in product(p.basis, repeat=2):
        dx, dy = p.degrees[x], p.degrees[y]
        if dx + dy > 4:
            assert not p.bracket_basis(x, y)
            continue
        s = -1 if dx % 2 and dy % 2 else 1
        xy, yx = mul(mats[x], mats[y]), mul(mats[y], mats[x])
        comm = {k: xy.get(k, 0) - s * yx.get(k, 0) for k in set(xy) | set(yx)}
        recon = {}
        for e, c in p.bracket_basis(x, y).items():
            for pos, v in mats[e].items():
                recon[pos] = recon.get(pos, 0) + c * v
        assert {k: v for k, v in comm.items() if v} == {k: v for k, v in recon.items() if v}, (x, y)
    # graded Jacobi on every triple that escapes truncation, by brute force
    for x, y, z in product(p.basis, repeat=3):
        if p.degrees[x] + p.degrees[y] + p.degrees[z] > 4:
            continue
        px, py, pz = (p.parity[v] for v in (x, y, z))
        one = lambda n: {n: Fraction(1)}  # noqa: E731
        t1 = p.bracket(one(x), p.bracket(one(y), one(z)))
        t2 = p.bracket(p.bracket(one(x), one(y)), one(z))
        t3 = p.bracket(one(y), p.bracket(one(x), one(z)))
        sign = -1 if px and py else 1
        total = {k: t1.get(k, 0) - t2.get(k, 0) - sign * t3.get(k, 0) for k in set(t1) | set(t2) | set(t3)}
        assert not any(total.values()), (x, y, z)
    assert p.jacobi_violations() == []
    assert p.covering_violations() == []
    # psi = covering projection of the degree-2 loop lifts back to the identity;
    # exhaustive search over basis combinations confirms nothing else projects correctly
    a = loop.build_loop(g, 2)
    p2 = loop.build_loop(g, 2)
    psi = {x: {a.projection[x]: Fraction(1)} for x in a.basis}
    rep = loop.lift_homomorphism(a, psi, p2)
    assert rep.ok
    for x in a.basis:
        assert rep.lift[x] == {x: Fraction(1)}
        part = p2.degree_part(a.degrees[x])
        hits = []
        for coeffs in product([Fraction(-1), Fraction(0), Fraction(1)], repeat=len(part)):
            v = {b: c for b, c in zip(part, coeffs) if c}
            if p2.project(v) == psi[x]:
                hits.append(v)
        assert hits == [rep.lift[x]]
    _report(9, True)


# 10

hyp = settings(max_examples=125, deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def _substitutions(draw) -> Substitution:
    G = S.MIXED
    a = draw(st.sampled_from([1, 2, -1, Fraction(1, 2)]))
    b = draw(st.integers(-2, 2))
    c = draw(st.sampled_from([1, 3, -2]))
    d = draw(st.integers(-2, 2))
    x, y = BaseFunction.var("x"), BaseFunction.var("y")
    nil_x = draw(S.superfunctions(G, 2, parity=0))
    # the Taylor part of a base image must be nilpotent: keep odd-only terms
    nil_x = Superfunction(G, {m: q for m, q in nil_x.terms.items() if m and all(G.gens[i].parity for i, _ in m)})
    images = {
        "x": Superfunction.const(G, x * a + b) + nil_x,
        "y": Superfunction.const(G, y * c + x * d),
        "z": draw(S.superfunctions(G, 3, parity=0)),
    }
    for n in ("xi1", "xi2", "xi3"):
        images[n] = draw(S.superfunctions(G, 3, parity=1))
    return Substitution(G, G, images)


@pytest.mark.criterion(10)
@hyp
@given(S.homogeneous_superfunctions(), S.homogeneous_superfunctions())
def test_criterion_10_supercommutativity(f, g):
    sign = -1 if f.parity() == 1 and g.parity() == 1 else 1
    assert f * g == (g * f).scale(sign)


@pytest.mark.criterion(10)
@hyp
@given(S.superfunctions(), S.superfunctions(), S.superfunctions())
def test_criterion_10_associativity(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@pytest.mark.criterion(10)
@hyp
@given(S.homogeneous_superfunctions(), S.superfunctions(), st.sampled_from(S.MIXED.names))
def test_criterion_10_leibniz(f, g, name):
    d_par = S.MIXED[name].parity
    sign = -1 if d_par and f.parity() else 1
    lhs = (f * g).left_derivative(name)
    rhs = f.left_derivative(name) * g + (f * g.left_derivative(name)).scale(sign)
    assert lhs == rhs


@pytest.mark.criterion(10)
@hyp
@given(S.superfunctions(max_terms=3), S.superfunctions(max_terms=3), _substitutions())
def test_criterion_10_homomorphism(f, g, s):
    assert substitute(f * g, s) == substitute(f, s) * substitute(g, s)
    assert substitute(f + g, s) == substitute(f, s) + substitute(g, s)


@pytest.mark.criterion(10)
def test_criterion_10_log_exp_round_trips():
    rng = random.Random(10)
    done = 0
    nontrivial = 0
    while done < 50:
        ne = rng.randint(1, 2)
        no = rng.choice([2, 3])
        chart = S.super_chart("0", [f"x{i}" for i in range(1, ne + 1)], [f"xi{i}" for i in range(1, no + 1)])
        k = rng.randint(2, 4)
        a = S.random_aut2(rng, chart, k)
        D = log_automorphism(a, k)
        assert exp_derivation(D, k) == a
        b = S.random_aut2(rng, chart, k)
        E = log_automorphism(b, k)
        assert log_automorphism(exp_derivation(E, k), k) == E
        nontrivial += not D.is_zero()
        done += 1
    assert nontrivial > 25
