"""Dense matrices over the field of rational base functions."""

from __future__ import annotations

from typing import Sequence

from ..errors import DegenerateDenominatorError
from .base import BaseFunction

Matrix = list[list[BaseFunction]]


def identity(n: int) -> Matrix:
    return [[BaseFunction.one() if i == j else BaseFunction.zero() for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[BaseFunction]], b: Sequence[Sequence[BaseFunction]]) -> Matrix:
    if a and len(a[0]) != len(b):
        raise ValueError("shape mismatch in matrix product")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = BaseFunction.zero()
            for k, x in enumerate(row):
                if x.is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + x * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def transpose(a: Sequence[Sequence[BaseFunction]]) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def equal(a: Sequence[Sequence[BaseFunction]], b: Sequence[Sequence[BaseFunction]]) -> bool:
    return len(a) == len(b) and all(
        len(r) == len(s) and all(x == y for x, y in zip(r, s)) for r, s in zip(a, b)
    )


def is_identity(a: Sequence[Sequence[BaseFunction]]) -> bool:
    return equal(a, identity(len(a)))


def map_entries(a: Sequence[Sequence[BaseFunction]], fn) -> Matrix:
    return [[fn(x) for x in row] for row in a]


def _echelon(a: Sequence[Sequence[BaseFunction]], augment: Matrix | None = None) -> tuple[Matrix, Matrix | None, int]:
    m = [list(r) for r in a]
    aug = [list(r) for r in augment] if augment is not None else None
    rows = len(m)
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        if aug is not None:
            aug[r], aug[piv] = aug[piv], aug[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        if aug is not None:
            aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
                if aug is not None:
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        r += 1
        if r == rows:
            break
    return m, aug, r


def rank(a: Sequence[Sequence[BaseFunction]]) -> int:
    return _echelon(a)[2]


def inverse(a: Sequence[Sequence[BaseFunction]]) -> Matrix:
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("only square matrices can be inverted")
    _, aug, r = _echelon(a, identity(n))
    if r < n:
        raise DegenerateDenominatorError("matrix is singular over the rational functions")
    assert aug is not None
    return aug


def det(a: Sequence[Sequence[BaseFunction]]) -> BaseFunction:
    n = len(a)
    m = [list(r) for r in a]
    out = BaseFunction.one()
    for c in range(n):
        piv = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
        if piv is None:
            return BaseFunction.zero()
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out = out * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if not m[i][c].is_zero():
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out
