"""Truncated Z>=0-coverings of supermanifolds given by atlases.

A super chart with coordinates ``x_a`` (even) and ``xi_b`` (odd) yields a
covering chart of degree ``n`` with generators ``x_a__s`` (s even, weight s)
and ``xi_b__t`` (t odd, weight t).  Every covering generator keeps the
name of the coordinate it comes from, followed by ``__`` and its weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping

from .algebra.base import BaseFunction
from .algebra.substitution import Substitution, substitute
from .algebra.superfunction import EVEN, ODD, Generator, GeneratorSet, Superfunction
from .atlas import GRADED, SUPER, Atlas, Chart, TransitionMap, check_cocycle
from .errors import AtlasError, SupercoverError
from .expr import render

SEP = "__"


def covering_name(name: str, weight: int) -> str:
    return f"{name}{SEP}{weight}"


def split_covering_name(name: str) -> tuple[str, int] | None:
    base, sep, w = name.rpartition(SEP)
    if sep and base and w.isdigit():
        return base, int(w)
    return None


def covering_generators(chart: Chart, n: int) -> list[Generator]:
    out = []
    for g in chart.generators:
        start = 0 if g.parity == EVEN else 1
        for s in range(start, n + 1, 2):
            out.append(Generator(covering_name(g.name, s), s, s % 2))
    return out


def covering_chart(chart: Chart, n: int) -> Chart:
    """The degree-n covering chart over a super chart."""
    if chart.kind != SUPER:
        raise AtlasError(f"chart {chart.id} is not a super chart")
    if n < 0:
        raise ValueError("degree must be non-negative")
    return Chart(chart.id, covering_generators(chart, n), GRADED, n)


def projection(chart: Chart, n: int, cov: Chart | None = None) -> Substitution:
    """``x -> x__0 + x__2 + ...`` and ``xi -> xi__1 + xi__3 + ...`` mod I_n."""
    cov = cov or covering_chart(chart, n)
    images = {}
    for g in chart.generators:
        start = 0 if g.parity == EVEN else 1
        img = Superfunction.zero(cov.gens, n)
        for s in range(start, n + 1, 2):
            img = img + cov.gen(covering_name(g.name, s))
        images[g.name] = img
    return Substitution(chart.gens, cov.gens, images, n)


def _chart_for(gens: GeneratorSet) -> Chart:
    return Chart("_", gens.gens, SUPER)


def lift_superfunction(f: Superfunction, k: int, chart: Chart | None = None) -> Superfunction:
    """Image of `f` in O_P / I_k under the covering projection."""
    chart = chart or _chart_for(f.gens)
    return substitute(f.with_cutoff(None), projection(chart, k))


def lift_morphism(t: TransitionMap, n: int) -> TransitionMap:
    """The induced morphism of degree-n covering charts.

    The covering coordinate ``z__t`` of a target coordinate ``z`` is sent to
    ``pr_t`` of the lift of the image of ``z``.
    """
    src = covering_chart(t.from_chart, n)
    dst = covering_chart(t.to_chart, n)
    proj = projection(t.from_chart, n, src)
    images = {}
    for g in t.to_chart.generators:
        lifted = substitute(t.images[g.name], proj)
        start = 0 if g.parity == EVEN else 1
        for s in range(start, n + 1, 2):
            images[covering_name(g.name, s)] = lifted.pr(s)
    return TransitionMap(src, dst, images)


def build_covering_atlas(a: Atlas, n: int, verify: bool = True) -> Atlas:
    """Glue the lifted transitions into the degree-n covering atlas."""
    if a.kind != SUPER:
        raise AtlasError("coverings are built from super atlases")
    if verify:
        rep = check_cocycle(a)
        if not rep.ok:
            raise AtlasError(f"input atlas fails the cocycle check at {len(rep.residuals)} places")
    charts = {c.id: covering_chart(c, n) for c in a.charts}
    transitions = {p: lift_morphism(t, n) for p, t in a.transitions.items()}
    # Chart objects must be shared so that equality checks stay cheap.
    for p, t in transitions.items():
        t.from_chart, t.to_chart = charts[p[0]], charts[p[1]]
    out = Atlas(GRADED, [charts[c.id] for c in a.charts], transitions, list(a.triples), n)
    if verify:
        rep = check_cocycle(out)
        if not rep.ok:
            raise SupercoverError("lifted atlas fails the cocycle check; this indicates a bug")
    return out


# injectivity


@dataclass
class ChartInjectivity:
    chart: str
    basis: list[str]
    rank: int
    kernel: list[str] = field(default_factory=list)
    vanishing_functions: list[str] = field(default_factory=list)

    @property
    def injective(self) -> bool:
        return self.rank == len(self.basis) and not self.vanishing_functions

    def to_json(self) -> dict[str, Any]:
        return {
            "chart": self.chart,
            "basis": self.basis,
            "rank": self.rank,
            "injective": self.injective,
            "kernel": self.kernel,
            "vanishing_functions": self.vanishing_functions,
        }


@dataclass
class InjectivityReport:
    k: int
    charts: list[ChartInjectivity]

    @property
    def injective(self) -> bool:
        return all(c.injective for c in self.charts)

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k, "injective": self.injective, "charts": [c.to_json() for c in self.charts]}


def _subsets(items: list[str]) -> list[list[str]]:
    out: list[list[str]] = [[]]
    for it in items:
        out += [s + [it] for s in out]
    return sorted(out, key=lambda s: (len(s), [items.index(x) for x in s]))


def _odd_part(f: Superfunction) -> dict:
    """Terms whose monomial contains only odd covering generators."""
    g = f.gens.gens
    return {m: c for m, c in f.terms.items() if all(g[i].parity == ODD for i, _ in m)}


def _kernel_basis(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Left kernel of a rational matrix (vectors v with v * rows = 0)."""
    n = len(rows)
    cols = len(rows[0]) if rows else 0
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][c]
        aug[r] = [x / p for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        r += 1
    return [row[cols:] for row in aug[r:]]


def check_injectivity(
    a: Atlas, k: int, functions: Mapping[str, Iterable[Superfunction]] | None = None
) -> InjectivityReport:
    """Test whether the lift O_M -> O_P / I_k has trivial kernel on each chart.

    Write ``F = sum_I c_I(x) xi_I``.  Every Taylor correction in the lift
    carries a positive-weight even generator, so the part of ``lift(F)``
    involving only odd generators is ``sum_I c_I(x__0) lift(xi_I)``, and
    ``lift(xi_I)`` has constant coefficients.  The lift is therefore
    injective exactly when the vectors ``lift(xi_I)`` are linearly
    independent over the rationals, and a dependence yields an explicit
    nonzero function with vanishing lift.  Optional `functions` (by chart
    id) are also lifted and reported when their lift vanishes.
    """
    functions = functions or {}
    reports = []
    for chart in a.charts:
        odd = [g.name for g in chart.generators if g.parity == ODD]
        subsets = _subsets(odd)
        lifts = []
        for s in subsets:
            mono = Superfunction.monomial(chart.gens, s)
            lifts.append(_odd_part(lift_superfunction(mono, k, chart)))
        monos = sorted({m for t in lifts for m in t})
        rows = [[t.get(m, BaseFunction.zero()).constant_value() for m in monos] for t in lifts]
        names = ["*".join(s) if s else "1" for s in subsets]
        if monos:
            kernel = _kernel_basis(rows)
        else:
            kernel = [[Fraction(int(i == j)) for j in range(len(rows))] for i in range(len(rows))]
        rank = len(rows) - len(kernel)
        kernel_txt = []
        for v in kernel:
            f = Superfunction.zero(chart.gens)
            for c, s in zip(v, subsets):
                if c:
                    f = f + Superfunction.monomial(chart.gens, s, c)
            kernel_txt.append(render(f))
        vanishing = []
        for f in functions.get(chart.id, ()):
            if not f.is_zero() and lift_superfunction(f, k, chart).is_zero():
                vanishing.append(render(f))
        reports.append(ChartInjectivity(chart.id, names, rank, kernel_txt, vanishing))
    return InjectivityReport(k, reports)


# reconstruction from degree-2 graded data


def _pair_generators(chart: Chart) -> tuple[list[Generator], list[Generator], list[Generator]]:
    w0 = chart.by_weight(0)
    w1 = chart.by_weight(1)
    w2 = chart.by_weight(2)
    if any(g.parity != EVEN for g in w0 + w2) or any(g.parity != ODD for g in w1):
        raise AtlasError(f"chart {chart.id}: parity must equal weight mod 2")
    if len(w1) != 2:
        raise AtlasError(f"chart {chart.id}: expected exactly 2 weight-1 generators, found {len(w1)}")
    if len(w2) != len(w0):
        raise AtlasError(f"chart {chart.id}: need as many weight-2 as weight-0 generators")
    if any(g.weight > 2 for g in chart.generators):
        raise AtlasError(f"chart {chart.id}: generators of weight above 2")

    def stem(g: Generator) -> str | None:
        sp = split_covering_name(g.name)
        return sp[0] if sp else None

    stems0 = [stem(g) for g in w0]
    by_stem2 = {stem(g): g for g in w2}
    if all(s is not None and s in by_stem2 for s in stems0) and len(set(stems0)) == len(stems0):
        w2 = [by_stem2[s] for s in stems0]
    return w0, w1, w2


def _plain_name(g: Generator) -> str:
    sp = split_covering_name(g.name)
    return sp[0] if sp and sp[1] == g.weight else g.name


@dataclass
class _ChartPlan:
    graded: Chart
    super_chart: Chart
    w0: list[Generator]
    w1: list[Generator]
    w2: list[Generator]
    to_super: Substitution
    rename: dict[str, str]


def _plan(chart: Chart) -> _ChartPlan:
    w0, w1, w2 = _pair_generators(chart)
    names = [_plain_name(g) for g in w0 + w1]
    if len(set(names)) != len(names):
        names = [g.name for g in w0 + w1]
    sgens = [Generator(n, g.weight, g.parity) for n, g in zip(names, w0 + w1)]
    order = {g.name: i for i, g in enumerate(chart.generators)}
    sgens_sorted = [sg for _, sg in sorted(zip(w0 + w1, sgens), key=lambda p: order[p[0].name])]
    schart = Chart(chart.id, sgens_sorted, SUPER)
    rename = {g.name: n for g, n in zip(w0 + w1, names)}
    images = {}
    for g in chart.generators:
        if g.name in rename:
            images[g.name] = schart.gen(rename[g.name])
        else:
            images[g.name] = Superfunction.zero(schart.gens)
    return _ChartPlan(chart, schart, w0, w1, w2, Substitution(chart.gens, schart.gens, images), rename)


def reconstruct_odd2(g: Atlas) -> Atlas:
    """Recover a supermanifold of odd dimension 2 from degree-2 graded data.

    Each weight-2 image must read ``z' = (dX/dx) z + Z theta_1 theta_2``;
    the result has transitions ``x' = X(x) + Z xi_1 xi_2`` and
    ``xi' = Y(x) xi``.
    """
    if g.kind != GRADED or g.degree != 2:
        raise AtlasError("reconstruction needs a graded atlas of degree 2")
    plans = {c.id: _plan(c) for c in g.charts}
    transitions = {}
    for (i, j), t in g.transitions.items():
        src, dst = plans[i], plans[j]
        images = {}
        for gen in dst.w0 + dst.w1:
            img = t.images[gen.name]
            if gen.weight == 0 and not img.is_base():
                raise AtlasError(f"transition {i}->{j}: weight-0 image of {gen.name} is not a base function")
            images[gen.name] = img
        for a0, a2 in zip(dst.w0, dst.w2):
            img = t.images[a2.name]
            X = t.images[a0.name]
            jac = Superfunction.zero(src.graded.gens, 2)
            for b0, b2 in zip(src.w0, src.w2):
                jac = jac + X.left_derivative(b0.name) * src.graded.gen(b2.name)
            rest = img - jac
            ggens = src.graded.gens.gens
            if any(ggens[ix].parity == EVEN for m in rest.terms for ix, _ in m):
                raise AtlasError(
                    f"transition {i}->{j}: weight-2 image of {a2.name} is not the Jacobian term plus a theta-theta term"
                )
            images[a0.name] = images[a0.name] + rest
        super_images = {}
        for gen in dst.w0 + dst.w1:
            new = substitute(images[gen.name].with_cutoff(None), src.to_super)
            super_images[dst.rename[gen.name]] = new
        transitions[(i, j)] = TransitionMap(src.super_chart, dst.super_chart, super_images)
    out = Atlas(SUPER, [plans[c.id].super_chart for c in g.charts], transitions, list(g.triples))
    rep = check_cocycle(out)
    if not rep.ok:
        raise AtlasError(f"reconstructed atlas fails the cocycle check at {len(rep.residuals)} places")
    return out

