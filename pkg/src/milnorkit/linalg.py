"""Exact rational linear algebra on dense lists of Fractions."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(v, (int, str)):
        return Fraction(v)
    raise ValueError(f"cannot read {v!r} as an exact rational")


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form with first-nonzero-column pivoting.

    Returns ``(R, pivots, transform)`` where ``transform @ rows == R``.
    """
    A = [[to_fraction(x) for x in r] for r in rows]
    m = len(A)
    n = ncols if ncols is not None else (len(A[0]) if A else 0)
    T = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        T[r], T[p] = T[p], T[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        T[r] = [x * inv for x in T[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
                T[i] = [x - f * y for x, y in zip(T[i], T[r])]
        pivots.append(c)
        r += 1
    return A, pivots, T


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of ``{x : A x = 0}``, one vector per free column in increasing order."""
    R, pivots, _ = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -R[i][f]
        basis.append(x)
    return basis


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in A]


def transpose(A: Sequence[Sequence], ncols: int | None = None) -> list:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*A)]


def solve(A: Sequence[Sequence], b: Sequence, ncols: int):
    """Particular solution of ``A x = b`` (free variables zero), or ``None`` if inconsistent.

    On inconsistency the second return value is a row vector ``y`` with
    ``y A = 0`` and ``y b != 0``.
    """
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots, T = rref(aug, ncols + 1)
    if ncols in pivots:
        k = pivots.index(ncols)
        return None, T[k]
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][ncols]
    return x, None


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    if not vectors:
        return all(to_fraction(t) == 0 for t in v)
    return solve(transpose(vectors), v, len(vectors))[0] is not None
