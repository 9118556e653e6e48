"""Lie superalgebras, their truncated loop coverings and gl(m|n) realizations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import LieAlgebraError, ParseError

Vector = dict[str, Fraction]


def _frac(text: Any) -> Fraction:
    if isinstance(text, bool):
        raise LieAlgebraError(f"invalid rational {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not s or "." in s or "e" in s.lower():
        raise LieAlgebraError(f"invalid rational {text!r}; use integers or p/q")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise LieAlgebraError(f"invalid rational {text!r}") from None


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _add(acc: Vector, v: Mapping[str, Fraction], c: Fraction = Fraction(1)) -> None:
    for k, x in v.items():
        s = acc.get(k, 0) + c * x
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


class LieSuperalgebra:
    """Structure constants ``[e_i, e_j] = sum_k c^k_ij e_k`` over the rationals.

    `degrees`, when given, is a Z-grading of the basis; it must be
    compatible with the bracket.  Construction checks graded
    antisymmetry, parity, and the graded Jacobi identity.
    """

    def __init__(
        self,
        basis: Iterable[tuple[str, int]],
        brackets: Mapping[tuple[str, str], Mapping[str, Fraction]],
        degrees: Mapping[str, int] | None = None,
        validate: bool = True,
        jacobi: bool = True,
    ):
        self.basis: list[str] = []
        self.parity: dict[str, int] = {}
        for name, p in basis:
            if name in self.parity:
                raise LieAlgebraError(f"duplicate basis element {name}")
            if p not in (0, 1):
                raise LieAlgebraError(f"parity of {name} must be 0 or 1")
            self.basis.append(name)
            self.parity[name] = p
        self.degrees = dict(degrees) if degrees is not None else None
        table: dict[tuple[str, str], Vector] = {}
        for (i, j), v in brackets.items():
            if i not in self.parity or j not in self.parity:
                raise LieAlgebraError(f"bracket [{i},{j}] uses an unknown basis element")
            clean: Vector = {}
            for k, c in v.items():
                if k not in self.parity:
                    raise LieAlgebraError(f"bracket [{i},{j}] has unknown component {k}")
                c = Fraction(c)
                if c:
                    clean[k] = c
            if clean:
                table[(i, j)] = clean
        self.table = table
        if validate:
            self.validate(jacobi=jacobi)

    # basic operations
    def __len__(self) -> int:
        return len(self.basis)

    def bracket_basis(self, i: str, j: str) -> Vector:
        return dict(self.table.get((i, j), {}))

    def bracket(self, u: Mapping[str, Fraction], v: Mapping[str, Fraction]) -> Vector:
        out: Vector = {}
        for i, a in u.items():
            if not a:
                continue
            for j, b in v.items():
                if b:
                    t = self.table.get((i, j))
                    if t:
                        _add(out, t, a * b)
        return out

    def vector_parity(self, v: Mapping[str, Fraction]) -> int | None:
        ps = {self.parity[k] for k, c in v.items() if c}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def sign(self, i: str, j: str) -> int:
        return -1 if self.parity[i] and self.parity[j] else 1

    # validation
    def antisymmetry_violations(self) -> list[tuple[str, str]]:
        bad = []
        for i, j in product(self.basis, repeat=2):
            lhs = self.table.get((i, j), {})
            rhs = {k: -self.sign(i, j) * c for k, c in self.table.get((j, i), {}).items()}
            if lhs != rhs:
                bad.append((i, j))
        return bad

    def parity_violations(self) -> list[tuple[str, str, str]]:
        bad = []
        for (i, j), v in self.table.items():
            for k in v:
                if self.parity[k] != (self.parity[i] + self.parity[j]) % 2:
                    bad.append((i, j, k))
                if self.degrees is not None and self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    bad.append((i, j, k))
        return bad

    def jacobi_residual(self, x: str, y: str, z: str) -> Vector:
        """``[x,[y,z]] - [[x,y],z] - (-1)^{|x||y|} [y,[x,z]]``."""
        ex, ey, ez = {x: Fraction(1)}, {y: Fraction(1)}, {z: Fraction(1)}
        out = self.bracket(ex, self.bracket(ey, ez))
        _add(out, self.bracket(self.bracket(ex, ey), ez), Fraction(-1))
        _add(out, self.bracket(ey, self.bracket(ex, ez)), Fraction(-self.sign(x, y)))
        return out

    def jacobi_triples(self) -> Iterable[tuple[str, str, str]]:
        return product(self.basis, repeat=3)

    def jacobi_violations(self) -> list[tuple[str, str, str]]:
        return [t for t in self.jacobi_triples() if self.jacobi_residual(*t)]

    def validate(self, jacobi: bool = True) -> None:
        bad = self.antisymmetry_violations()
        if bad:
            raise LieAlgebraError(f"graded antisymmetry fails for {bad[:3]}")
        pbad = self.parity_violations()
        if pbad:
            raise LieAlgebraError(f"bracket breaks the grading at {pbad[:3]}")
        if jacobi:
            jbad = self.jacobi_violations()
            if jbad:
                raise LieAlgebraError(f"graded Jacobi identity fails for {jbad[:3]}")

    def structure_constants(self) -> dict[tuple[str, str, str], Fraction]:
        return {(i, j, k): c for (i, j), v in self.table.items() for k, c in v.items()}

    def is_homomorphism(self, other: "LieSuperalgebra", images: Mapping[str, Mapping[str, Fraction]], pairs=None) -> list[tuple[str, str]]:
        """Pairs of basis elements on which `images` fails to preserve brackets."""
        bad = []
        for i, j in pairs if pairs is not None else product(self.basis, repeat=2):
            lhs: Vector = {}
            for k, c in self.table.get((i, j), {}).items():
                _add(lhs, images.get(k, {}), c)
            rhs = other.bracket(images.get(i, {}), images.get(j, {}))
            if lhs != rhs:
                bad.append((i, j))
        return bad

    # serialization
    def to_json(self) -> dict[str, Any]:
        basis = []
        for b in self.basis:
            d: dict[str, Any] = {"name": b, "parity": "odd" if self.parity[b] else "even"}
            if self.degrees is not None:
                d["degree"] = self.degrees[b]
            basis.append(d)
        idx = {b: n for n, b in enumerate(self.basis)}
        brackets = [
            {"i": i, "j": j, "k": k, "c": _fmt(c)}
            for (i, j, k), c in sorted(self.structure_constants().items(), key=lambda t: (idx[t[0][0]], idx[t[0][1]], idx[t[0][2]]))
        ]
        return {"basis": basis, "brackets": brackets}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "LieSuperalgebra":
        """Read the structure-constant document; missing reverse brackets come from antisymmetry."""
        try:
            raw_basis = data["basis"]
        except (KeyError, TypeError):
            raise LieAlgebraError("structure-constant file needs a 'basis' list") from None
        basis: list[tuple[str, int]] = []
        degrees: dict[str, int] = {}
        for k, b in enumerate(raw_basis):
            try:
                name = str(b["name"])
                p = b["parity"]
            except (KeyError, TypeError):
                raise LieAlgebraError(f"basis[{k}] needs 'name' and 'parity'") from None
            par = {"even": 0, "odd": 1, 0: 0, 1: 1}.get(p)
            if par is None:
                raise LieAlgebraError(f"basis[{k}]: invalid parity {p!r}")
            basis.append((name, par))
            if "degree" in b:
                degrees[name] = int(b["degree"])
        if degrees and len(degrees) != len(basis):
            raise LieAlgebraError("either every basis element has a degree or none does")
        names = [b for b, _ in basis]
        parity = dict(basis)

        def ref(x: Any) -> str:
            if isinstance(x, int) and not isinstance(x, bool):
                if not 0 <= x < len(names):
                    raise LieAlgebraError(f"basis index {x} out of range")
                return names[x]
            s = str(x)
            if s not in parity:
                raise LieAlgebraError(f"unknown basis element {s!r}")
            return s

        given: dict[tuple[str, str], Vector] = {}
        for k, br in enumerate(data.get("brackets") or []):
            try:
                i, j, e, c = ref(br["i"]), ref(br["j"]), ref(br["k"]), _frac(br["c"])
            except (KeyError, TypeError):
                raise LieAlgebraError(f"brackets[{k}] needs 'i', 'j', 'k' and 'c'") from None
            _add(given.setdefault((i, j), {}), {e: c})
        table = {key: dict(v) for key, v in given.items()}
        for (i, j), v in given.items():
            if (j, i) not in given and i != j:
                s = -1 if parity[i] and parity[j] else 1
                table[(j, i)] = {e: -s * c for e, c in v.items()}
        return cls(basis, table, degrees or None)

    @classmethod
    def load(cls, path: str | Path) -> "LieSuperalgebra":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return cls.from_json(data)


def gl_index_name(i: int, j: int, size: int) -> str:
    return f"E{i}{j}" if size < 10 else f"E{i}_{j}"


def gl(m: int, n: int) -> LieSuperalgebra:
    """gl(m|n) in the matrix-unit basis ``E_ij`` (1-based indices)."""
    if m < 0 or n < 0 or m + n == 0:
        raise LieAlgebraError("gl(m|n) needs m, n >= 0 and m + n > 0")
    size = m + n

    def p(i: int) -> int:
        return 0 if i <= m else 1

    names = {(i, j): gl_index_name(i, j, size) for i in range(1, size + 1) for j in range(1, size + 1)}
    par = {ij: (p(ij[0]) + p(ij[1])) % 2 for ij in names}
    table: dict[tuple[str, str], Vector] = {}
    for (i, j), (k, l) in product(names, repeat=2):
        v: Vector = {}
        if j == k:
            _add(v, {names[(i, l)]: Fraction(1)})
        if l == i:
            s = -1 if par[(i, j)] and par[(k, l)] else 1
            _add(v, {names[(k, j)]: Fraction(-s)})
        if v:
            table[(names[(i, j)], names[(k, l)])] = v
    return LieSuperalgebra([(names[ij], par[ij]) for ij in names], table)


def loop_name(name: str, degree: int) -> str:
    return f"{name}@{degree}"


def split_loop_name(name: str) -> tuple[str, int]:
    base, _, d = name.rpartition("@")
    return base, int(d)


class LoopAlgebra(LieSuperalgebra):
    """``⊕ g_{d mod 2} t^d`` for degrees in the support, brackets beyond it set to 0.

    The default support is ``0..n``; with ``symmetric=True`` it is
    ``-n..n``.  Only the non-negative version is a quotient algebra, so the
    symmetric one checks Jacobi on triples whose partial sums stay inside
    the support.
    """

    def __init__(self, base: LieSuperalgebra, n: int, symmetric: bool = False):
        if n < 0:
            raise LieAlgebraError("maximal degree must be non-negative")
        self.base = base
        self.max_degree = n
        self.symmetric = symmetric
        lo = -n if symmetric else 0
        self.support = range(lo, n + 1)
        basis = []
        degrees = {}
        self.projection: dict[str, str] = {}
        for d in self.support:
            for e in base.basis:
                if base.parity[e] == d % 2:
                    nm = loop_name(e, d)
                    basis.append((nm, d % 2))
                    degrees[nm] = d
                    self.projection[nm] = e
        table: dict[tuple[str, str], Vector] = {}
        for (x, _), (y, _) in product(basis, repeat=2):
            s = degrees[x] + degrees[y]
            if s not in self.support:
                continue
            v = base.table.get((self.projection[x], self.projection[y]))
            if v:
                table[(x, y)] = {loop_name(k, s): c for k, c in v.items()}
        super().__init__(basis, table, degrees, validate=True)

    def in_support(self, d: int) -> bool:
        return d in self.support

    def jacobi_triples(self) -> Iterable[tuple[str, str, str]]:
        deg = self.degrees
        assert deg is not None
        for x, y, z in product(self.basis, repeat=3):
            a, b, c = deg[x], deg[y], deg[z]
            if all(self.in_support(s) for s in (a + b, b + c, a + c, a + b + c)):
                yield x, y, z

    def degree_part(self, d: int) -> list[str]:
        assert self.degrees is not None
        return [b for b in self.basis if self.degrees[b] == d]

    def project(self, v: Mapping[str, Fraction]) -> Vector:
        out: Vector = {}
        for k, c in v.items():
            _add(out, {self.projection[k]: c})
        return out

    def covering_violations(self) -> list[tuple[str, str]]:
        """Pairs where ``p([X,Y]) != [p(X), p(Y)]`` although the bracket is not truncated."""
        deg = self.degrees
        assert deg is not None
        bad = []
        for x, y in product(self.basis, repeat=2):
            if not self.in_support(deg[x] + deg[y]):
                continue
            lhs = self.project(self.bracket_basis(x, y))
            rhs = self.base.bracket({self.projection[x]: Fraction(1)}, {self.projection[y]: Fraction(1)})
            if lhs != rhs:
                bad.append((x, y))
        return bad

    def degree_bijective(self, d: int) -> bool:
        """Whether p restricted to degree d is a bijection onto g_{d mod 2}."""
        part = self.degree_part(d)
        images = sorted(self.projection[x] for x in part)
        target = sorted(e for e in self.base.basis if self.base.parity[e] == d % 2)
        return images == target


def build_loop(g: LieSuperalgebra, n: int, symmetric: bool = False) -> LoopAlgebra:
    g.validate()
    return LoopAlgebra(g, n, symmetric)


@dataclass
class LiftReport:
    lift: dict[str, Vector]
    homomorphism_violations: list[tuple[str, str]]
    unique: bool
    degree_ranks: dict[int, tuple[int, int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.homomorphism_violations and self.unique

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "unique": self.unique,
            "violations": [list(p) for p in self.homomorphism_violations],
            "lift": {x: {k: _fmt(c) for k, c in sorted(v.items())} for x, v in sorted(self.lift.items())},
        }


def _rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    r = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
    return r


def lift_homomorphism(a: LieSuperalgebra, psi: Mapping[str, Mapping[str, Fraction]], p: LoopAlgebra) -> LiftReport:
    """The unique degree-preserving lift of ``psi: a -> g`` through ``p``.

    `a` must carry a Z-grading inside the support of `p`.  Uniqueness is
    checked by showing that the projection is injective on every degree
    that occurs, which forces any graded lift to agree with this one.
    """
    if a.degrees is None:
        raise LieAlgebraError("the source algebra needs a Z-grading")
    g = p.base
    psi = {x: {k: Fraction(c) for k, c in psi.get(x, {}).items() if c} for x in a.basis}
    for x, v in psi.items():
        for k in v:
            if k not in g.parity:
                raise LieAlgebraError(f"image of {x} uses unknown element {k}")
        par = g.vector_parity(v)
        if par is None or (v and par != a.parity[x]):
            raise LieAlgebraError(f"psi does not preserve the parity of {x}")
    # Pairs whose degrees add up beyond the support are truncated in p, so
    # psi only has to respect the remaining brackets.
    pairs = [(x, y) for x, y in product(a.basis, repeat=2) if p.in_support(a.degrees[x] + a.degrees[y])]
    bad = a.is_homomorphism(g, psi, pairs)
    if bad:
        raise LieAlgebraError(f"psi is not a bracket homomorphism on {bad[:3]}")
    lift: dict[str, Vector] = {}
    for x in a.basis:
        s = a.degrees[x]
        if not p.in_support(s):
            raise LieAlgebraError(f"degree {s} of {x} lies outside the support of the loop algebra")
        if psi[x] and s % 2 != a.parity[x]:
            raise LieAlgebraError(f"{x} has degree {s} but parity {a.parity[x]}; no lift exists")
        lift[x] = {loop_name(k, s): c for k, c in psi[x].items()}
    violations = a.is_homomorphism(p, lift, pairs)
    ranks = {}
    unique = True
    for s in sorted({a.degrees[x] for x in a.basis}):
        part = p.degree_part(s)
        targets = g.basis
        rows = [[Fraction(int(p.projection[b] == t)) for t in targets] for b in part]
        rk = _rank(rows) if rows else 0
        ranks[s] = (rk, len(part))
        if rk != len(part):
            unique = False
    return LiftReport(lift, violations, unique, ranks)


# block-matrix realization


@dataclass
class GLRealization:
    algebra: LieSuperalgebra
    matrices: dict[str, dict[tuple[int, int], Fraction]]
    size: int
    block_sizes: list[int]
    projection: dict[str, str]


def gl_matrix_realization(m: int, n_odd: int, depth: int) -> GLRealization:
    """Block lower-triangular matrices with repeating diagonals.

    Block row r has size m for even r and n_odd for odd r.  Block (r, c)
    with d = r - c >= 0 holds A_d, B_d, C_d or D_d according to the
    parities of r and c, and only depends on d.  The matrix for the basis
    element ``E_ij@d`` puts the matrix unit in every block of sub-diagonal
    d of the matching type.  Brackets are matrix supercommutators; the
    component of degree depth+1 is dropped, which gives the quotient by
    degrees above `depth`.
    """
    if m < 1 or n_odd < 1 or depth < 0:
        raise LieAlgebraError("need m, n_odd >= 1 and depth >= 0")
    g = gl(m, n_odd)
    nblocks = depth + 2
    sizes = [m if r % 2 == 0 else n_odd for r in range(nblocks)]
    offsets = [sum(sizes[:r]) for r in range(nblocks)]
    total = sum(sizes)
    gsize = m + n_odd

    def local(i: int) -> tuple[int, int]:
        return (0, i - 1) if i <= m else (1, i - m - 1)

    units: dict[str, tuple[int, int, int, int]] = {}
    for i in range(1, gsize + 1):
        for j in range(1, gsize + 1):
            (pi, li), (pj, lj) = local(i), local(j)
            units[gl_index_name(i, j, gsize)] = (pi, li, pj, lj)

    basis: list[tuple[str, int]] = []
    degrees: dict[str, int] = {}
    projection: dict[str, str] = {}
    matrices: dict[str, dict[tuple[int, int], Fraction]] = {}
    for d in range(depth + 1):
        for e in g.basis:
            if g.parity[e] != d % 2:
                continue
            pi, li, pj, lj = units[e]
            mat: dict[tuple[int, int], Fraction] = {}
            for c in range(nblocks - d):
                r = c + d
                if r % 2 == pi and c % 2 == pj:
                    mat[(offsets[r] + li, offsets[c] + lj)] = Fraction(1)
            name = loop_name(e, d)
            basis.append((name, d % 2))
            degrees[name] = d
            projection[name] = e
            matrices[name] = mat

    def mul(x: dict, y: dict) -> dict:
        rows: dict[int, list[tuple[int, Fraction]]] = {}
        for (k, l), c in y.items():
            rows.setdefault(k, []).append((l, c))
        out: dict[tuple[int, int], Fraction] = {}
        for (i, k), a in x.items():
            for l, b in rows.get(k, ()):
                s = out.get((i, l), 0) + a * b
                if s:
                    out[(i, l)] = s
                else:
                    out.pop((i, l), None)
        return out

    # canonical read-off position of each basis element
    canon: dict[tuple[int, int], str] = {}
    for name in matrices:
        d = degrees[name]
        pi, li, pj, lj = units[projection[name]]
        c = 0 if pj == 0 else 1
        r = c + d
        canon[(offsets[r] + li, offsets[c] + lj)] = name

    names = [b for b, _ in basis]
    table: dict[tuple[str, str], Vector] = {}
    for x, y in product(names, repeat=2):
        s = -1 if degrees[x] % 2 and degrees[y] % 2 else 1
        comm = mul(matrices[x], matrices[y])
        for pos, c in mul(matrices[y], matrices[x]).items():
            v = comm.get(pos, 0) - s * c
            if v:
                comm[pos] = v
            else:
                comm.pop(pos, None)
        deg = degrees[x] + degrees[y]
        if deg > depth:
            continue
        v: Vector = {}
        for pos, c in comm.items():
            if pos in canon:
                v[canon[pos]] = c
        # the read-off must reproduce the whole commutator
        recon: dict[tuple[int, int], Fraction] = {}
        for k, c in v.items():
            for pos, e in matrices[k].items():
                recon[pos] = recon.get(pos, 0) + c * e
        if {p: c for p, c in recon.items() if c} != comm:
            raise LieAlgebraError(f"commutator of {x} and {y} is not in the span of the realization")
        if v:
            table[(x, y)] = v
    alg = LieSuperalgebra(basis, table, degrees)
    return GLRealization(alg, matrices, total, sizes, projection)


def same_structure(a: LieSuperalgebra, b: LieSuperalgebra, bijection: Mapping[str, str] | None = None) -> bool:
    """Equal structure-constant tables under the given (default: identical names) bijection."""
    bij = dict(bijection) if bijection is not None else {x: x for x in a.basis}
    if sorted(bij) != sorted(a.basis) or sorted(bij.values()) != sorted(b.basis):
        return False
    if any(a.parity[x] != b.parity[bij[x]] for x in a.basis):
        return False
    mapped = {(bij[i], bij[j], bij[k]): c for (i, j, k), c in a.structure_constants().items()}
    return mapped == b.structure_constants()


def parse_hom(data: Mapping[str, Any]) -> dict[str, Vector]:
    """Read ``{"map": {"X": {"e": "p/q", ...}, ...}}``."""
    raw = data.get("map", data) if isinstance(data, Mapping) else None
    if not isinstance(raw, Mapping):
        raise LieAlgebraError("homomorphism file must map basis names to coefficient objects")
    out: dict[str, Vector] = {}
    for x, v in raw.items():
        if not isinstance(v, Mapping):
            raise LieAlgebraError(f"image of {x} must be an object of coefficients")
        out[str(x)] = {str(k): _frac(c) for k, c in v.items()}
    return out
