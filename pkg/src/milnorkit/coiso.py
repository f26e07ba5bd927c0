"""Bounded-norm solutions of sparse +-1 linear systems and simplicial coboundary primitives."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .linalg import fraction_str, to_fraction


class Inconsistent(ValueError):
    """``A x = b`` has no rational solution; ``certificate`` satisfies ``y A = 0``, ``y b != 0``."""

    def __init__(self, certificate: list, message: str = "system is inconsistent"):
        super().__init__(message)
        self.certificate = certificate


class NotACoboundary(Inconsistent):
    pass


@dataclass(frozen=True)
class SparseSignMatrix:
    M: int
    N: int
    entries: tuple

    def __post_init__(self):
        ent = tuple(sorted((int(r), int(c), int(v)) for r, c, v in self.entries))
        seen = set()
        for r, c, v in ent:
            if v not in (1, -1):
                raise ValueError(f"entry ({r},{c}) is {v}, not +-1")
            if not (0 <= r < self.M and 0 <= c < self.N):
                raise ValueError(f"entry ({r},{c}) outside a {self.M}x{self.N} matrix")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry ({r},{c})")
            seen.add((r, c))
        object.__setattr__(self, "entries", ent)

    @property
    def p(self) -> int:
        counts = [0] * self.M
        for r, _, _ in self.entries:
            counts[r] += 1
        return max(counts, default=0)

    def dense(self) -> list:
        A = [[0] * self.N for _ in range(self.M)]
        for r, c, v in self.entries:
            A[r][c] = v
        return A

    @classmethod
    def from_dense(cls, A: Sequence[Sequence[int]]) -> "SparseSignMatrix":
        M = len(A)
        N = len(A[0]) if M else 0
        return cls(M, N, tuple((r, c, v) for r, row in enumerate(A) for c, v in enumerate(row) if v))

    def apply(self, x: Sequence) -> list:
        out = [Fraction(0)] * self.M
        for r, c, v in self.entries:
            out[r] += v * x[c]
        return out

    def to_json(self) -> dict:
        return {"M": self.M, "N": self.N, "entries": [list(e) for e in self.entries]}

    @classmethod
    def from_json(cls, obj) -> "SparseSignMatrix":
        try:
            return cls(int(obj["M"]), int(obj["N"]), tuple(tuple(e) for e in obj["entries"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed matrix literal: {exc}") from exc


def solution_bound(M: int, N: int, p: int, b_norm) -> Fraction:
    k = min(M, N)
    if k == 0:
        return Fraction(0)
    return Fraction(k) * Fraction(p) ** (k - 1) * Fraction(b_norm)


def inf_norm(v: Sequence) -> Fraction:
    return max((abs(Fraction(x)) for x in v), default=Fraction(0))


@dataclass(frozen=True)
class BoundedSolution:
    x: tuple
    inf_norm: Fraction
    certified_bound: Fraction
    rank: int
    rows: tuple
    cols: tuple

    def to_json(self) -> dict:
        return {
            "x": [fraction_str(v) for v in self.x],
            "inf_norm": fraction_str(self.inf_norm),
            "certified_bound": fraction_str(self.certified_bound),
            "rank": self.rank,
            "rows": list(self.rows),
            "cols": list(self.cols),
        }


def _independent_rows(A: list, N: int):
    """Greedy row selection in natural order; returns (rows, echelon basis, combination map)."""
    basis = []  # (pivot col, row vector, combination of original rows)
    chosen = []
    for r, row in enumerate(A):
        v = [Fraction(x) for x in row]
        comb = {r: Fraction(1)}
        for pc, brow, bcomb in basis:
            if v[pc] != 0:
                f = v[pc] / brow[pc]
                v = [a - f * b for a, b in zip(v, brow)]
                for k, c in bcomb.items():
                    comb[k] = comb.get(k, 0) - f * c
        pc = next((c for c in range(N) if v[c] != 0), None)
        if pc is None:
            continue
        basis.append((pc, v, comb))
        chosen.append(r)
    return chosen, basis


def _independent_cols(A: list, rows: Sequence[int], N: int) -> list:
    sub = [[Fraction(A[r][c]) for c in range(N)] for r in rows]
    T = [[sub[i][c] for i in range(len(rows))] for c in range(N)]
    cols, _ = _independent_rows(T, len(rows))
    return cols


def bareiss_solve(R: Sequence[Sequence[int]], b: Sequence) -> list:
    """Solve the square nonsingular system ``R y = b`` by fraction-free elimination."""
    n = len(R)
    den = 1
    for v in b:
        den = den * Fraction(v).denominator // _gcd(den, Fraction(v).denominator)
    aug = [[int(x) for x in row] + [int(Fraction(v) * den)] for row, v in zip(R, b)]
    prev = 1
    for k in range(n):
        p = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        aug[k], aug[p] = aug[p], aug[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                aug[i][j] = (aug[i][j] * aug[k][k] - aug[i][k] * aug[k][j]) // prev
            aug[i][k] = 0
        prev = aug[k][k]
    y = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(aug[i][n]) - sum(aug[i][j] * y[j] for j in range(i + 1, n))
        y[i] = s / aug[i][i]
    return [v / den for v in y]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def solve_bounded(A: SparseSignMatrix, b: Sequence) -> BoundedSolution:
    """Solve ``A x = b`` through a maximal nonsingular submatrix and certify the norm bound.

    Raises ``Inconsistent`` with a left-kernel certificate when no solution exists.
    """
    if len(b) != A.M:
        raise ValueError(f"right-hand side has length {len(b)}, expected {A.M}")
    b = [to_fraction(v) for v in b]
    D = A.dense()
    rows, basis = _independent_rows(D, A.N)
    # consistency: every dropped row must be the same combination of b
    chosen = set(rows)
    for r in range(A.M):
        if r in chosen:
            continue
        v = [Fraction(x) for x in D[r]]
        comb = {r: Fraction(1)}
        for pc, brow, bcomb in basis:
            if v[pc] != 0:
                f = v[pc] / brow[pc]
                v = [a - f * c for a, c in zip(v, brow)]
                for k, c in bcomb.items():
                    comb[k] = comb.get(k, 0) - f * c
        if sum((c * b[k] for k, c in comb.items()), Fraction(0)) != 0:
            cert = [comb.get(k, Fraction(0)) for k in range(A.M)]
            raise Inconsistent(cert)
    cols = _independent_cols(D, rows, A.N)
    x = [Fraction(0)] * A.N
    if rows:
        R = [[D[r][c] for c in cols] for r in rows]
        y = bareiss_solve(R, [b[r] for r in rows])
        for c, v in zip(cols, y):
            x[c] = v
    if A.apply(x) != b:
        raise ArithmeticError("internal error: solution does not satisfy A x = b")
    bound = solution_bound(A.M, A.N, A.p, inf_norm(b))
    norm = inf_norm(x)
    if norm > bound:
        raise ArithmeticError(f"norm {norm} exceeds certified bound {bound}")
    return BoundedSolution(tuple(x), norm, bound, len(rows), tuple(rows), tuple(cols))


# -- simplicial complexes --------------------------------------------------


class SimplicialComplex:
    """Finite simplicial complex; simplices are stored as sorted vertex tuples."""

    def __init__(self, simplices: Mapping[int, Sequence[Sequence[int]]] | Sequence[Sequence[int]]):
        if isinstance(simplices, Mapping):
            given = [tuple(s) for group in simplices.values() for s in group]
        else:
            given = [tuple(s) for s in simplices]
        closed = set()
        for s in given:
            s = tuple(sorted(s))
            if len(set(s)) != len(s) or not s:
                raise ValueError(f"invalid simplex {s}")
            for k in range(1, len(s) + 1):
                closed.update(combinations(s, k))
        self.by_dim: dict = {}
        for s in sorted(closed):
            self.by_dim.setdefault(len(s) - 1, []).append(s)
        self._pos = {d: {s: i for i, s in enumerate(ss)} for d, ss in self.by_dim.items()}

    @property
    def dimension(self) -> int:
        return max(self.by_dim, default=-1)

    @property
    def vertices(self) -> list:
        return [s[0] for s in self.by_dim.get(0, [])]

    def simplices(self, q: int) -> list:
        return list(self.by_dim.get(q, []))

    def count(self, q: int) -> int:
        return len(self.by_dim.get(q, []))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * len(s) for d, s in self.by_dim.items())

    def to_json(self) -> dict:
        return {"simplices": {str(d): [list(s) for s in ss] for d, ss in sorted(self.by_dim.items())}}

    @classmethod
    def from_json(cls, obj) -> "SimplicialComplex":
        try:
            data = obj["simplices"]
        except (KeyError, TypeError) as exc:
            raise ValueError("complex literal needs 'simplices'") from exc
        if isinstance(data, Mapping):
            return cls({int(k): v for k, v in data.items()})
        return cls(data)


def coboundary_matrix(K: SimplicialComplex, q: int) -> SparseSignMatrix:
    """Matrix of ``delta: C^(q-1) -> C^q``; row ``s`` has ``(-1)^i`` at the face omitting vertex ``i``."""
    if q < 1:
        raise ValueError("q must be at least 1")
    top, low = K.simplices(q), K.simplices(q - 1)
    if not top or not low:
        raise ValueError(f"complex has no simplices in dimension {q if not top else q - 1}")
    pos = K._pos[q - 1]
    entries = []
    for r, s in enumerate(top):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            entries.append((r, pos[face], -1 if i % 2 else 1))
    return SparseSignMatrix(len(top), len(low), tuple(entries))


def primitive_bound(K: SimplicialComplex, q: int, b_norm) -> Fraction:
    """``min(M, N) (q+1)^(min(M, N) - 1) ||b||``: row support of the coboundary is ``q+1``."""
    M, N = K.count(q), K.count(q - 1)
    return solution_bound(M, N, q + 1, b_norm)


@dataclass(frozen=True)
class Primitive:
    c: tuple
    inf_norm: Fraction
    certified_bound: Fraction

    def to_json(self) -> dict:
        return {"c": [fraction_str(v) for v in self.c], "inf_norm": fraction_str(self.inf_norm),
                "certified_bound": fraction_str(self.certified_bound)}


def coboundary_primitive(K: SimplicialComplex, q: int, b: Sequence) -> Primitive:
    """A ``(q-1)``-cochain ``c`` with ``delta c = b`` and certified sup-norm bound."""
    A = coboundary_matrix(K, q)
    try:
        sol = solve_bounded(A, b)
    except Inconsistent as exc:
        raise NotACoboundary(exc.certificate,
                             "cochain is not a coboundary; certificate is a q-cycle pairing "
                             "nontrivially with it") from None
    bound = primitive_bound(K, q, inf_norm([to_fraction(v) for v in b]))
    if sol.inf_norm > bound:
        raise ArithmeticError("primitive exceeds the certified bound")
    return Primitive(sol.x, sol.inf_norm, bound)


# -- fixtures --------------------------------------------------------------


def circle(n: int = 3) -> SimplicialComplex:
    return SimplicialComplex([(i, (i + 1) % n) for i in range(n)])


def tetrahedron_boundary() -> SimplicialComplex:
    return SimplicialComplex(list(combinations(range(4), 3)))


def octahedron_boundary() -> SimplicialComplex:
    # antipodal pairs (0,1), (2,3), (4,5)
    return SimplicialComplex([(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)])


def torus(n: int = 3) -> SimplicialComplex:
    """Standard triangulation of an ``n x n`` grid with opposite sides glued (``n >= 3``)."""
    if n < 3:
        raise ValueError("grid torus needs n >= 3")

    def v(i, j):
        return (i % n) * n + (j % n)

    tris = []
    for i in range(n):
        for j in range(n):
            tris.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            tris.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
    return SimplicialComplex(tris)
