"""Charts, transition maps and atlases of super- and graded manifolds."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .algebra.substitution import Substitution, substitute
from .algebra.superfunction import EVEN, Generator, GeneratorSet, Superfunction, parse_parity
from .errors import AtlasError, GeneratorMismatchError, ParseError, SupercoverError
from .expr import parse, render

SUPER, GRADED = "super", "graded"


class Chart:
    """A coordinate system: an id plus generators in their declared order."""

    __slots__ = ("id", "generators", "kind", "degree", "gens")

    def __init__(self, id: str, generators: Iterable[Generator], kind: str = SUPER, degree: int | None = None):
        self.id = str(id)
        self.generators: tuple[Generator, ...] = tuple(generators)
        self.kind = kind
        self.degree = degree
        if kind not in (SUPER, GRADED):
            raise AtlasError(f"chart {self.id}: unknown kind {kind!r}")
        self.gens = GeneratorSet(self.generators)
        for g in self.generators:
            if kind == SUPER and (g.weight not in (0, 1) or g.parity != g.weight):
                raise AtlasError(f"chart {self.id}: super coordinate {g.name} must have weight = parity in {{0, 1}}")
            if kind == GRADED:
                if degree is None:
                    raise AtlasError(f"chart {self.id}: graded charts need a degree")
                if g.weight > degree:
                    raise AtlasError(f"chart {self.id}: weight of {g.name} exceeds degree {degree}")

    @property
    def cutoff(self) -> int | None:
        return self.degree if self.kind == GRADED else None

    def by_weight(self, w: int) -> list[Generator]:
        return [g for g in self.generators if g.weight == w]

    def even0(self) -> list[Generator]:
        return [g for g in self.generators if g.is_base]

    def odd(self) -> list[Generator]:
        return [g for g in self.generators if g.parity != EVEN]

    def parse(self, src: str) -> Superfunction:
        return parse(src, self.gens, self.cutoff)

    def gen(self, name: str) -> Superfunction:
        return Superfunction.gen(self.gens, name, self.cutoff)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Chart)
            and self.id == other.id
            and self.generators == other.generators
            and self.kind == other.kind
            and self.degree == other.degree
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Chart({self.id!r}, {[g.name for g in self.generators]}, {self.kind})"

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "generators": [{"name": g.name, "weight": g.weight, "parity": g.parity_name} for g in self.generators],
        }


class TransitionMap:
    """Coordinate change on an overlap.

    `images` maps every generator of `to_chart` to a Superfunction over the
    generators of `from_chart`, i.e. it expresses the new coordinates in
    terms of the old ones.
    """

    __slots__ = ("from_chart", "to_chart", "images")

    def __init__(self, from_chart: Chart, to_chart: Chart, images: Mapping[str, Superfunction]):
        self.from_chart = from_chart
        self.to_chart = to_chart
        graded = from_chart.kind == GRADED and to_chart.kind == GRADED
        try:
            sub = Substitution(to_chart.gens, from_chart.gens, images, from_chart.cutoff, homogeneous=graded)
        except SupercoverError as exc:
            raise type(exc)(f"transition {from_chart.id}->{to_chart.id}: {exc}") from None
        self.images = sub.images

    @property
    def source(self) -> str:
        return self.from_chart.id

    @property
    def target(self) -> str:
        return self.to_chart.id

    def substitution(self, cutoff: int | None = None) -> Substitution:
        """The pull-back: to-chart generators replaced by their images."""
        c = self.from_chart.cutoff if cutoff is None else cutoff
        return Substitution(self.to_chart.gens, self.from_chart.gens, self.images, c)

    def pull_back(self, f: Superfunction, cutoff: int | None = None) -> Superfunction:
        return substitute(f, self.substitution(cutoff))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionMap):
            return NotImplemented
        return (
            self.from_chart == other.from_chart
            and self.to_chart == other.to_chart
            and all(self.images[n] == other.images[n] for n in self.images)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = "; ".join(f"{n} = {render(v)}" for n, v in self.images.items())
        return f"TransitionMap({self.source}->{self.target}: {body})"

    def to_json(self) -> dict[str, Any]:
        return {
            "from": self.source,
            "to": self.target,
            "images": {g.name: render(self.images[g.name]) for g in self.to_chart.generators},
        }

    @classmethod
    def identity(cls, chart: Chart) -> "TransitionMap":
        return cls(chart, chart, {g.name: chart.gen(g.name) for g in chart.generators})


@dataclass
class Atlas:
    kind: str
    charts: list[Chart]
    transitions: dict[tuple[str, str], TransitionMap]
    triples: list[tuple[str, str, str]] = field(default_factory=list)
    degree: int | None = None

    def __post_init__(self) -> None:
        ids = [c.id for c in self.charts]
        if len(set(ids)) != len(ids):
            raise AtlasError(f"duplicate chart ids {ids}")
        for c in self.charts:
            if c.kind != self.kind:
                raise AtlasError(f"chart {c.id} has kind {c.kind}, atlas has {self.kind}")
            if self.kind == GRADED and c.degree != self.degree:
                raise AtlasError(f"chart {c.id} has degree {c.degree}, atlas has {self.degree}")
        for (i, j), t in self.transitions.items():
            if t.source != i or t.target != j:
                raise AtlasError(f"transition stored under ({i},{j}) goes {t.source}->{t.target}")
            if i not in ids or j not in ids:
                raise AtlasError(f"transition {i}->{j} refers to an unknown chart")
            if (j, i) not in self.transitions:
                raise AtlasError(f"overlap ({i},{j}) lacks the reverse transition {j}->{i}")
        for tr in self.triples:
            if len(tr) != 3:
                raise AtlasError(f"triple {tr} does not have three charts")
            a, b, c = tr
            for p in ((a, b), (b, c), (c, a)):
                if p not in self.transitions:
                    raise AtlasError(f"triple {tr} needs transition {p[0]}->{p[1]}")
        self.triples = [tuple(t) for t in self.triples]  # type: ignore[misc]

    def chart(self, cid: str) -> Chart:
        for c in self.charts:
            if c.id == cid:
                return c
        raise AtlasError(f"unknown chart {cid!r}")

    def transition(self, i: str, j: str) -> TransitionMap:
        try:
            return self.transitions[(i, j)]
        except KeyError:
            raise AtlasError(f"no transition {i}->{j}") from None

    def overlaps(self) -> list[tuple[str, str]]:
        """Ordered pairs ``(i, j)`` with a declared transition, sorted."""
        return sorted(self.transitions)

    @property
    def cutoff(self) -> int | None:
        return self.degree if self.kind == GRADED else None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "kind": self.kind,
            "charts": [c.to_json() for c in self.charts],
            "transitions": [self.transitions[p].to_json() for p in sorted(self.transitions)],
            "triples": [list(t) for t in self.triples],
        }
        if self.kind == GRADED:
            out["degree"] = self.degree
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Atlas":
        return atlas_from_json(data)


def atlas_from_json(data: Mapping[str, Any]) -> Atlas:
    """Build an atlas from the JSON document structure."""
    if not isinstance(data, Mapping):
        raise AtlasError("atlas document must be a JSON object")
    kind = data.get("kind")
    if kind not in (SUPER, GRADED):
        raise AtlasError(f"atlas 'kind' must be 'super' or 'graded', got {kind!r}")
    degree = data.get("degree")
    if kind == GRADED:
        if not isinstance(degree, int) or degree < 0:
            raise AtlasError("graded atlases need a non-negative integer 'degree'")
    else:
        degree = None
    charts = []
    for k, cd in enumerate(data.get("charts") or []):
        try:
            gens = [Generator(str(g["name"]), int(g["weight"]), parse_parity(g["parity"])) for g in cd["generators"]]
            charts.append(Chart(str(cd["id"]), gens, kind, degree))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SupercoverError):
                raise
            raise AtlasError(f"charts[{k}]: malformed chart ({exc})") from None
    if not charts:
        raise AtlasError("atlas has no charts")
    by_id = {c.id: c for c in charts}
    transitions: dict[tuple[str, str], TransitionMap] = {}
    for k, td in enumerate(data.get("transitions") or []):
        try:
            i, j = str(td["from"]), str(td["to"])
            imgs_src = td["images"]
        except (KeyError, TypeError):
            raise AtlasError(f"transitions[{k}]: needs 'from', 'to' and 'images'") from None
        if i not in by_id or j not in by_id:
            raise AtlasError(f"transitions[{k}]: unknown chart in {i}->{j}")
        src, dst = by_id[i], by_id[j]
        images = {}
        for name, text in imgs_src.items():
            if name not in dst.gens:
                raise AtlasError(f"transitions[{k}] ({i}->{j}): {name!r} is not a generator of chart {j}")
            try:
                images[name] = src.parse(str(text))
            except ParseError as exc:
                raise ParseError(f"transition {i}->{j}, image of {name}: {exc.message}", exc.line, exc.column) from None
        missing = [g.name for g in dst.generators if g.name not in images]
        if missing:
            raise AtlasError(f"transitions[{k}] ({i}->{j}): missing images for {missing}")
        if (i, j) in transitions:
            raise AtlasError(f"duplicate transition {i}->{j}")
        transitions[(i, j)] = TransitionMap(src, dst, images)
    triples = [tuple(str(x) for x in t) for t in data.get("triples") or []]
    return Atlas(kind, charts, transitions, triples, degree)  # type: ignore[arg-type]


def load_atlas(path: str | Path) -> Atlas:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return atlas_from_json(data)


def compose(t1: TransitionMap, t2: TransitionMap, k: int | None = None) -> TransitionMap:
    """Go along `t1` then `t2`: images of t2's targets pulled back through t1."""
    if t1.to_chart != t2.from_chart:
        raise GeneratorMismatchError(f"cannot compose {t1.source}->{t1.target} with {t2.source}->{t2.target}")
    cutoff = t1.from_chart.cutoff if k is None or t1.from_chart.kind == SUPER else k
    sub = t1.substitution(cutoff)
    images = {n: substitute(img, sub) for n, img in t2.images.items()}
    return TransitionMap(t1.from_chart, t2.to_chart, images)


@dataclass
class Residual:
    path: tuple[str, ...]
    generator: str
    residual: Superfunction

    def to_json(self) -> dict[str, Any]:
        return {"path": list(self.path), "generator": self.generator, "residual": render(self.residual)}


@dataclass
class CocycleReport:
    checked_pairs: list[tuple[str, str]]
    checked_triples: list[tuple[str, str, str]]
    residuals: list[Residual]

    @property
    def ok(self) -> bool:
        return not self.residuals

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "pairs": [list(p) for p in self.checked_pairs],
            "triples": [list(t) for t in self.checked_triples],
            "residuals": [r.to_json() for r in self.residuals],
        }


def _identity_residuals(path: tuple[str, ...], t: TransitionMap) -> list[Residual]:
    out = []
    for g in t.to_chart.generators:
        res = t.images[g.name] - t.from_chart.gen(g.name)
        if not res.is_zero():
            out.append(Residual(path, g.name, res))
    return out


def check_cocycle(a: Atlas, k: int | None = None) -> CocycleReport:
    """Verify ``T_ij then T_ji = id`` on pairs and the loop condition on triples."""
    pairs, triples, residuals = [], [], []
    for i, j in a.overlaps():
        if i == j:
            residuals += _identity_residuals((i, i), a.transitions[(i, j)])
            pairs.append((i, j))
            continue
        loop = compose(a.transitions[(i, j)], a.transitions[(j, i)], k)
        pairs.append((i, j))
        residuals += _identity_residuals((i, j, i), loop)
    for i, j, l in a.triples:
        loop = compose(compose(a.transitions[(i, j)], a.transitions[(j, l)], k), a.transitions[(l, i)], k)
        triples.append((i, j, l))
        residuals += _identity_residuals((i, j, l, i), loop)
    return CocycleReport(pairs, triples, residuals)


def gr_transition(t: TransitionMap) -> TransitionMap:
    """Keep the weight-0 part of even images and the linear part of odd ones."""
    images = {}
    for g in t.to_chart.generators:
        img = t.images[g.name]
        images[g.name] = img.pr(g.weight)
    return TransitionMap(t.from_chart, t.to_chart, images)


def gr_atlas(a: Atlas) -> Atlas:
    """The split atlas with the same charts and lowest-order transition data."""
    if a.kind != SUPER:
        raise AtlasError("gr is defined for super atlases")
    return Atlas(a.kind, list(a.charts), {p: gr_transition(t) for p, t in a.transitions.items()}, list(a.triples))


def is_split(a: Atlas) -> bool:
    return all(gr_transition(t) == t for t in a.transitions.values())
