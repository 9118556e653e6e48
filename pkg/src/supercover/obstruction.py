"""Green cocycles, the first obstruction class and its two cross-checks.

Conventions.  A transition ``T_ij`` expresses the chart-j coordinates in
terms of the chart-i coordinates, so it is a pull-back ``O_j -> O_i``.
Composition of such maps is written as for sheaf morphisms: ``a o b``
means "apply b, then a".

* ``phi_ij = gr(T_ij)`` and, by functoriality of gr, ``phi_ij^{-1} = gr(T_ji)``.
* ``g_ij = psi_ij o phi_ij^{-1}`` is an automorphism of chart i.
* ``omega2`` keeps the weight-raising-by-2 part of ``log g_ij`` on the even
  coordinates; entries are stored as ``{x_a: sum_{p<q} c^{pq}_a xi_p xi_q}``
  over chart i.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .algebra import matrix as mx
from .algebra.base import BaseFunction
from .algebra.substitution import Substitution, check_aut2, compose, lambda2, substitute
from .algebra.superfunction import EVEN, ODD, GeneratorSet, Superfunction
from .atlas import SUPER, Atlas, Chart, TransitionMap, gr_transition
from .covering import covering_chart, covering_name, lift_morphism
from .errors import FiltrationError, ObstructionError
from .expr import render, render_base

# omega2 = DW_NORMALIZATION * (off-diagonal block) * (Jacobian block)^{-1},
# both sides taken in the source chart's coordinates.
DW_NORMALIZATION = -1


def _require_super(a: Atlas) -> None:
    if a.kind != SUPER:
        raise ObstructionError("obstruction classes are computed for super atlases")


def pair_key(i: str, j: str) -> str:
    return f"({i},{j})"


@dataclass
class MatrixBlock:
    """Transition matrix of operator generators on one overlap."""

    rows: list[str]
    cols: list[str]
    entries: list[list[BaseFunction]]
    coordinates: str

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.entries for e in r)

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "matrix",
            "coordinates": self.coordinates,
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[render_base(e) for e in r] for r in self.entries],
        }


@dataclass
class CechCocycle:
    """Per-overlap data; either derivation entries or operator matrices."""

    kind: str
    data: dict[tuple[str, str], Any] = field(default_factory=dict)

    def is_zero(self) -> bool:
        if self.kind == "derivation":
            return all(not entries for entries in self.data.values())
        return all(b.is_zero() for b in self.data.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CechCocycle) or other.kind != self.kind:
            return NotImplemented
        if set(self.data) != set(other.data):
            return False
        if self.kind == "derivation":
            for p, ent in self.data.items():
                o = other.data[p]
                if set(ent) != set(o) or any(ent[k] != o[k] for k in ent):
                    return False
            return True
        return all(
            mx.equal(self.data[p].entries, other.data[p].entries)
            and self.data[p].rows == other.data[p].rows
            and self.data[p].cols == other.data[p].cols
            for p in self.data
        )

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for (i, j) in sorted(self.data):
            v = self.data[(i, j)]
            if self.kind == "derivation":
                out[pair_key(i, j)] = {
                    "type": "derivation",
                    "coordinates": i,
                    "entries": {name: render(f) for name, f in sorted(v.items())},
                }
            else:
                out[pair_key(i, j)] = v.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


# Green cocycle and omega2


def phi(a: Atlas, i: str, j: str) -> Substitution:
    """``phi_ij``: the split transition as a map ``O_j -> O_i``."""
    return gr_transition(a.transition(i, j)).substitution()


def phi_inverse(a: Atlas, i: str, j: str) -> Substitution:
    """``phi_ij^{-1}`` as a map ``O_i -> O_j``, read off the reverse transition."""
    return gr_transition(a.transition(j, i)).substitution()


def green_cocycle(a: Atlas, overlap: tuple[str, str]) -> Substitution:
    """``g_ij = psi_ij o phi_ij^{-1}``, verified to lie in Aut_(2)."""
    _require_super(a)
    i, j = overlap
    g = compose(phi_inverse(a, i, j), a.transition(i, j).substitution())
    try:
        check_aut2(g)
    except FiltrationError as exc:
        raise ObstructionError(f"Green cocycle on ({i},{j}) is not in Aut_(2): {exc}") from None
    return g


def omega2_entries(g: Substitution) -> dict[str, Superfunction]:
    """Even-coordinate components of ``lambda_2(g)``, zeros dropped."""
    lam = lambda2(g)
    out = {}
    for gen in g.source:
        if gen.parity == EVEN and gen.weight == 0:
            v = lam.images[gen.name]
            if not v.is_zero():
                out[gen.name] = v
    return out


def omega2(a: Atlas) -> CechCocycle:
    _require_super(a)
    data = {}
    for i, j in a.overlaps():
        if i == j:
            continue
        data[(i, j)] = omega2_entries(green_cocycle(a, (i, j)))
    return CechCocycle("derivation", data)


def green_triple_residual(a: Atlas, triple: tuple[str, str, str]) -> dict[str, Superfunction]:
    """Residual of ``g_ij o (phi_ij g_jk phi_ij^-1) o (phi_ik g_ki phi_ik^-1) = id``.

    The composite is an automorphism of chart i; nonzero residuals are
    returned by generator name.
    """
    i, j, k = triple

    def conj(p: Substitution, inner: Substitution, p_inv: Substitution) -> Substitution:
        # p o inner o p_inv, with sheaf-map composition order
        return compose(compose(p_inv, inner), p)

    g_ij = green_cocycle(a, (i, j))
    t2 = conj(phi(a, i, j), green_cocycle(a, (j, k)), phi_inverse(a, i, j))
    phi_ik = compose(phi(a, j, k), phi(a, i, j))
    phi_ik_inv = compose(phi_inverse(a, i, j), phi_inverse(a, j, k))
    t3 = conj(phi_ik, green_cocycle(a, (k, i)), phi_ik_inv)
    total = compose(compose(t3, t2), g_ij)
    out = {}
    for gen in total.source:
        r = total.images[gen.name] - Superfunction.gen(total.source, gen.name)
        if not r.is_zero():
            out[gen.name] = r
    return out


# P2 Atiyah cocycle


def _coeff_matrix(images: Mapping[str, Superfunction], rows: list[str], cols: list[str]) -> mx.Matrix:
    out = []
    for r in rows:
        f = images[r]
        out.append([f.coefficient([c]) for c in cols])
    return out


def _apply_linear(
    m: mx.Matrix, cols: list[str], gens: GeneratorSet, rename: Mapping[str, BaseFunction], cutoff: int
) -> list[Superfunction]:
    out = []
    for row in m:
        f = Superfunction.zero(gens, cutoff)
        for c, name in zip(row, cols):
            if not c.is_zero():
                f = f + Superfunction.gen(gens, name, cutoff).scale(c.compose(rename))
        out.append(f)
    return out


def _cover_to_super(cov: Chart, chart: Chart) -> Substitution:
    """Weight-0 and weight-1 covering coordinates back to the super coordinates."""
    images = {}
    for g in chart.generators:
        for h in cov.generators:
            if h.name == covering_name(g.name, g.weight):
                images[h.name] = chart.gen(g.name)
    for h in cov.generators:
        images.setdefault(h.name, Superfunction.zero(chart.gens))
    return Substitution(cov.gens, chart.gens, images)


def atiyah_entries(a: Atlas, i: str, j: str) -> dict[str, Superfunction]:
    """Degree-2 extension data of ``h = psi~ o phi~^{-1}`` on the overlap (i, j)."""
    t = a.transition(i, j)
    ci, cj = t.from_chart, t.to_chart
    psi = lift_morphism(t, 2)
    cov_i, cov_j = psi.from_chart, psi.to_chart
    i0 = [covering_name(g.name, 0) for g in ci.even0()]
    i1 = [covering_name(g.name, 1) for g in ci.odd()]
    i2 = [covering_name(g.name, 2) for g in ci.even0()]
    j0 = [covering_name(g.name, 0) for g in cj.even0()]
    j1 = [covering_name(g.name, 1) for g in cj.odd()]
    j2 = [covering_name(g.name, 2) for g in cj.even0()]

    # weight-graded linear parts of phi~ (coefficients over chart-i base)
    H = _coeff_matrix(psi.images, j1, i1)
    A = _coeff_matrix(psi.images, j2, i2)
    # base inverse x = F^{-1}(y) from the reverse transition, in covering names
    back = a.transition(j, i)
    base_inv: dict[str, BaseFunction] = {}
    yren = {g.name: covering_name(g.name, 0) for g in cj.even0()}
    for g in ci.even0():
        base_inv[covering_name(g.name, 0)] = back.images[g.name].base_part().rename(yren)
    try:
        H_inv = mx.inverse(H)
        A_inv = mx.inverse(A)
    except ZeroDivisionError as exc:
        raise ObstructionError(f"linear part of the P2 transition ({i},{j}) is singular: {exc}") from None
    phi_inv_images: dict[str, Superfunction] = {}
    for name in i0:
        phi_inv_images[name] = Superfunction.const(cov_j.gens, base_inv[name], 2)
    for name, f in zip(i1, _apply_linear(H_inv, j1, cov_j.gens, base_inv, 2)):
        phi_inv_images[name] = f
    for name, f in zip(i2, _apply_linear(A_inv, j2, cov_j.gens, base_inv, 2)):
        phi_inv_images[name] = f
    for g in cov_i.generators:
        if g.name not in phi_inv_images:
            raise ObstructionError("P2 atiyah cocycle is implemented for degree-2 coverings only")
    phi_inv = Substitution(cov_i.gens, cov_j.gens, phi_inv_images, 2)
    h = compose(phi_inv, psi.substitution(2))

    for name in i0 + i1:
        if h.images[name] != Superfunction.gen(cov_i.gens, name, 2):
            raise ObstructionError(f"h on ({i},{j}) does not fix {name}")
    back_to_super = _cover_to_super(cov_i, ci)
    out = {}
    z_names = set(i2)
    for g, name in zip(ci.even0(), i2):
        res = h.images[name] - Superfunction.gen(cov_i.gens, name, 2)
        if any(cov_i.gens.gens[ix].name in z_names for m in res.terms for ix, _ in m):
            raise ObstructionError(f"h on ({i},{j}) has a weight-2 linear part beyond the identity")
        v = substitute(res.with_cutoff(None), back_to_super)
        if not v.is_zero():
            out[g.name] = v
    return out


def atiyah_cocycle_P2(a: Atlas) -> CechCocycle:
    _require_super(a)
    data = {}
    for i, j in a.overlaps():
        if i == j:
            continue
        data[(i, j)] = atiyah_entries(a, i, j)
    return CechCocycle("derivation", data)


# Donagi-Witten transitions


def _pairs(names: list[str]) -> list[tuple[str, str]]:
    return [(p, q) for k, p in enumerate(names) for q in names[k + 1 :]]


def operator_labels(chart: Chart) -> list[str]:
    even = [f"d/d{g.name}" for g in chart.even0()]
    odd = [f"d/d{p}*d/d{q}" for p, q in _pairs([g.name for g in chart.odd()])]
    return even + odd


@dataclass
class TransitionData:
    """``y_a = F_a + (1/2) G_a^{pq} xi_p xi_q + ...`` and ``eta_b = H_b^q xi_q + ...``."""

    F: dict[str, BaseFunction]
    G: dict[str, dict[tuple[str, str], BaseFunction]]
    H: dict[str, dict[str, BaseFunction]]


def transition_data(t: TransitionMap) -> TransitionData:
    ci, cj = t.from_chart, t.to_chart
    odd_i = [g.name for g in ci.odd()]
    F, G, H = {}, {}, {}
    for y in cj.even0():
        img = t.images[y.name]
        F[y.name] = img.base_part()
        gy = {}
        for p, q in _pairs(odd_i):
            c = img.coefficient([p, q])
            gy[(p, q)] = c
            gy[(q, p)] = -c
        G[y.name] = gy
    for eta in cj.odd():
        img = t.images[eta.name]
        H[eta.name] = {q: img.coefficient([q]) for q in odd_i}
    return TransitionData(F, G, H)


def dw_matrix_source(t: TransitionMap) -> MatrixBlock:
    """Donagi-Witten matrix with entries in the source chart's coordinates.

    Row ``d/dx_b`` is ``sum_a dF_a/dx_b d/dy_a``; row ``d/dxi_p*d/dxi_q``
    (p before q) has ``G_a^{qp}`` in column ``d/dy_a`` and the 2x2 minor
    ``H_r^p H_s^q - H_s^p H_r^q`` in column ``d/deta_r*d/deta_s``.
    """
    ci, cj = t.from_chart, t.to_chart
    data = transition_data(t)
    ys = [g.name for g in cj.even0()]
    etas = [g.name for g in cj.odd()]
    rows: list[list[BaseFunction]] = []
    for xb in ci.even0():
        rows.append([data.F[y].derivative(xb.name) for y in ys] + [BaseFunction.zero()] * len(_pairs(etas)))
    for p, q in _pairs([g.name for g in ci.odd()]):
        row = [data.G[y][(q, p)] for y in ys]
        for r, s in _pairs(etas):
            row.append(data.H[r][p] * data.H[s][q] - data.H[s][p] * data.H[r][q])
        rows.append(row)
    return MatrixBlock(operator_labels(ci), operator_labels(cj), rows, ci.id)


def base_map(a: Atlas, i: str, j: str) -> dict[str, BaseFunction]:
    """Chart-j base coordinates as functions of chart-i base coordinates."""
    t = a.transition(i, j)
    return {g.name: t.images[g.name].base_part() for g in t.to_chart.even0()}


def recoordinate(block: MatrixBlock, values: Mapping[str, BaseFunction], chart: str) -> MatrixBlock:
    return MatrixBlock(block.rows, block.cols, mx.map_entries(block.entries, lambda e: e.compose(values)), chart)


def donagi_witten_transitions(a: Atlas, overlap: tuple[str, str]) -> MatrixBlock:
    """DW matrix on (i, j), entries written in the target chart's coordinates."""
    _require_super(a)
    i, j = overlap
    src = dw_matrix_source(a.transition(i, j))
    return recoordinate(src, base_map(a, j, i), j)


def donagi_witten_cocycle(a: Atlas) -> CechCocycle:
    return CechCocycle(
        "matrix", {(i, j): donagi_witten_transitions(a, (i, j)) for i, j in a.overlaps() if i != j}
    )


def dw_pair_product(a: Atlas, i: str, j: str) -> mx.Matrix:
    """``M_ij * M_ji`` with both factors in chart-j coordinates (identity when consistent)."""
    m_ij = donagi_witten_transitions(a, (i, j))
    m_ji = recoordinate(donagi_witten_transitions(a, (j, i)), base_map(a, j, i), j)
    return mx.matmul(m_ij.entries, m_ji.entries)


def dw_triple_product(a: Atlas, triple: tuple[str, str, str]) -> mx.Matrix:
    """``M_ij * M_jk * M_ki`` in chart-i coordinates."""
    i, j, k = triple
    m_ij = recoordinate(donagi_witten_transitions(a, (i, j)), base_map(a, i, j), i)
    m_jk = recoordinate(donagi_witten_transitions(a, (j, k)), base_map(a, i, k), i)
    m_ki = donagi_witten_transitions(a, (k, i))
    return mx.matmul(mx.matmul(m_ij.entries, m_jk.entries), m_ki.entries)


def dw_extension_entries(a: Atlas, i: str, j: str) -> dict[str, Superfunction]:
    """Extension data ``DW_NORMALIZATION * G_off * J^{-1}`` in omega2's normal form."""
    t = a.transition(i, j)
    ci = t.from_chart
    block = dw_matrix_source(t)
    ne = len(ci.even0())
    jac = [row[:ne] for row in block.entries[:ne]]
    goff = [row[:ne] for row in block.entries[ne:]]
    if not goff:
        return {}
    ext = mx.matmul(goff, mx.inverse(jac))
    out = {}
    pairs = _pairs([g.name for g in ci.odd()])
    for c, xc in enumerate(ci.even0()):
        f = Superfunction.zero(ci.gens)
        for (p, q), row in zip(pairs, ext):
            if not row[c].is_zero():
                f = f + Superfunction.monomial(ci.gens, [p, q], row[c] * DW_NORMALIZATION)
        if not f.is_zero():
            out[xc.name] = f
    return out


def dw_extension_class(a: Atlas) -> CechCocycle:
    _require_super(a)
    return CechCocycle("derivation", {(i, j): dw_extension_entries(a, i, j) for i, j in a.overlaps() if i != j})


def odd_dimension(a: Atlas) -> set[int]:
    return {len([g for g in c.generators if g.parity == ODD]) for c in a.charts}
