"""Command-line driver.

Exit status: 0 on success, 1 when a verification fails, 2 on bad input or
an operation error.  JSON output always uses sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import covering, loop, obstruction
from .algebra import matrix as mx
from .atlas import check_cocycle, gr_atlas, load_atlas
from .errors import ParseError, SupercoverError
from .expr import render

OK, FAILED, BAD_INPUT = 0, 1, 2


def _dump(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def cmd_check_cocycle(args) -> int:
    a = load_atlas(args.atlas)
    rep = check_cocycle(a, args.degree)
    if args.json:
        _emit(_dump(rep.to_json()), args.output)
    else:
        lines = [f"pairs checked: {len(rep.checked_pairs)}, triples checked: {len(rep.checked_triples)}"]
        for r in rep.residuals:
            lines.append(f"residual {'->'.join(r.path)} {r.generator}: {render(r.residual)}")
        lines.append("OK" if rep.ok else "FAILED")
        _emit("\n".join(lines) + "\n", args.output)
    return OK if rep.ok else FAILED


def cmd_gr(args) -> int:
    _emit(gr_atlas(load_atlas(args.atlas)).dumps(), args.output)
    return OK


def cmd_cover(args) -> int:
    a = load_atlas(args.atlas)
    _emit(covering.build_covering_atlas(a, args.degree).dumps(), args.output)
    return OK


def cmd_lift_fn(args) -> int:
    a = load_atlas(args.atlas)
    chart = a.chart(args.chart) if args.chart is not None else a.charts[0]
    f = chart.parse(args.expr)
    lifted = covering.lift_superfunction(f, args.degree, chart)
    if args.json:
        comps = {str(q): render(lifted.pr(q)) for q in range(args.degree + 1)}
        _emit(_dump({"chart": chart.id, "degree": args.degree, "lift": render(lifted), "components": comps}), args.output)
    else:
        _emit(render(lifted) + "\n", args.output)
    return OK


def cmd_reconstruct(args) -> int:
    a = load_atlas(args.atlas)
    _emit(covering.reconstruct_odd2(a).dumps(), args.output)
    return OK


def _cocycle_lines(c: obstruction.CechCocycle) -> list[str]:
    lines = []
    for (i, j) in sorted(c.data):
        for name, f in sorted(c.data[(i, j)].items()):
            lines.append(f"({i},{j}) {name}: {render(f)}")
    return lines


def cmd_omega2(args) -> int:
    a = load_atlas(args.atlas)
    c = obstruction.omega2(a)
    verdict = "ZERO" if c.is_zero() else "NONZERO"
    if args.json:
        _emit(_dump({"verdict": verdict, "cocycle": c.to_json()}), args.output)
        return OK
    if args.output:
        Path(args.output).write_text(c.dumps())
    sys.stdout.write("\n".join([verdict] + _cocycle_lines(c)) + "\n")
    return OK


def cmd_atiyah(args) -> int:
    a = load_atlas(args.atlas)
    _emit(obstruction.atiyah_cocycle_P2(a).dumps(), args.output)
    return OK


def cmd_dw(args) -> int:
    a = load_atlas(args.atlas)
    c = obstruction.donagi_witten_cocycle(a)
    failures = []
    for i, j in sorted(c.data):
        if not mx.is_identity(obstruction.dw_pair_product(a, i, j)):
            failures.append(f"pair ({i},{j}): M_ij * M_ji is not the identity")
    for t in a.triples:
        if not mx.is_identity(obstruction.dw_triple_product(a, t)):
            failures.append(f"triple {t}: product around the triple is not the identity")
    _emit(c.dumps(), args.output)
    for f in failures:
        sys.stderr.write(f + "\n")
    return FAILED if failures else OK


def cmd_loop(args) -> int:
    g = loop.LieSuperalgebra.load(args.algebra)
    p = loop.build_loop(g, args.degree, symmetric=args.symmetric)
    bad = p.covering_violations()
    _emit(p.dumps(), args.output)
    for x, y in bad:
        sys.stderr.write(f"covering map fails on [{x},{y}]\n")
    return FAILED if bad else OK


def cmd_gl_loop(args) -> int:
    real = loop.gl_matrix_realization(args.m, args.n, args.degree)
    ref = loop.build_loop(loop.gl(args.m, args.n), args.degree)
    same = loop.same_structure(ref, real.algebra)
    _emit(real.algebra.dumps(), args.output)
    if not same:
        sys.stderr.write("matrix realization differs from the loop algebra\n")
    return OK if same else FAILED


def cmd_lift_hom(args) -> int:
    a = loop.LieSuperalgebra.load(args.source)
    g = loop.LieSuperalgebra.load(args.target)
    psi = loop.parse_hom(_read_json(args.map))
    p = loop.build_loop(g, args.degree)
    rep = loop.lift_homomorphism(a, psi, p)
    _emit(_dump(rep.to_json()), args.output)
    return OK if rep.ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="supercover", description="Coverings of supermanifolds and obstruction classes.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", "-o", help="write the result here instead of stdout")
        p.add_argument("--json", action="store_true", help="machine-readable report")

    p = sub.add_parser("check-cocycle", help="verify the cocycle conditions of an atlas")
    p.add_argument("atlas")
    p.add_argument("--degree", type=int, help="truncation level (graded atlases default to their degree)")
    common(p)
    p.set_defaults(func=cmd_check_cocycle)

    p = sub.add_parser("gr", help="split atlas of a super atlas")
    p.add_argument("atlas")
    common(p)
    p.set_defaults(func=cmd_gr)

    p = sub.add_parser("cover", help="degree-n covering atlas")
    p.add_argument("atlas")
    p.add_argument("--degree", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("lift-fn", help="lift a superfunction to the covering")
    p.add_argument("atlas")
    p.add_argument("--chart", help="chart id (default: first chart)")
    p.add_argument("--expr", required=True)
    p.add_argument("--degree", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_lift_fn)

    p = sub.add_parser("reconstruct-odd2", help="supermanifold from a degree-2 graded atlas")
    p.add_argument("atlas")
    common(p)
    p.set_defaults(func=cmd_reconstruct)

    for verb, fn, text in (
        ("omega2", cmd_omega2, "first obstruction class via Green cocycles"),
        ("atiyah-p2", cmd_atiyah, "Atiyah cocycle of the degree-2 covering"),
        ("dw", cmd_dw, "Donagi-Witten transition matrices"),
    ):
        p = sub.add_parser(verb, help=text)
        p.add_argument("atlas")
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("loop", help="truncated loop superalgebra")
    p.add_argument("algebra")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--symmetric", action="store_true", help="support -n..n instead of 0..n")
    common(p)
    p.set_defaults(func=cmd_loop)

    p = sub.add_parser("gl-loop", help="block-matrix realization of the gl(m|n) loop algebra")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--degree", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_gl_loop)

    p = sub.add_parser("lift-hom", help="lift a homomorphism into the loop algebra")
    p.add_argument("source", help="graded algebra (basis entries carry 'degree')")
    p.add_argument("target", help="algebra g")
    p.add_argument("map", help='JSON {"map": {"X": {"e": "p/q"}}}')
    p.add_argument("--degree", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_lift_hom)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    if getattr(args, "degree", None) is not None and args.degree < 0:
        sys.stderr.write("error: --degree must be non-negative\n")
        return BAD_INPUT
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return BAD_INPUT
    except (SupercoverError, OSError, ValueError, ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
