"""Massey products on finite-basis differential graded algebras over the rationals.

Cochains are sparse dicts ``{basis index: Fraction}``.  All arithmetic is
exact.  A DGA may be truncated: products landing above the truncation degree
are zero, and the validator only checks identities within range.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Mapping, Sequence

from . import linalg
from .linalg import fraction_str, to_fraction

Vector = dict


def _clean(v: Mapping) -> dict:
    return {k: c for k, c in v.items() if c != 0}


def vadd(u: Mapping, v: Mapping, scale=1) -> dict:
    out = dict(u)
    for k, c in v.items():
        out[k] = out.get(k, 0) + scale * c
    return _clean(out)


def vscale(v: Mapping, s) -> dict:
    return _clean({k: s * c for k, c in v.items()})


@dataclass(frozen=True)
class Violation:
    kind: str
    elements: tuple
    detail: str

    def __str__(self):
        return f"{self.kind} at {', '.join(self.elements)}: {self.detail}"


class Dga:
    """Finite-basis DGA.

    ``diff[i]`` is ``d`` of basis element ``i``; ``mult[(i, j)]`` the product
    of basis elements ``i`` and ``j``.  Missing entries are zero.
    """

    def __init__(self, basis: Sequence, diff: Mapping, mult: Mapping,
                 truncation: int | None = None, graded_commutative: bool = True):
        self.names = [str(n) for n, _ in basis]
        self.degrees = [int(d) for _, d in basis]
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be distinct")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.truncation = truncation
        self.graded_commutative = graded_commutative
        self.diff = {i: _clean({k: to_fraction(c) for k, c in v.items()})
                     for i, v in diff.items()}
        self.mult = {ij: _clean({k: to_fraction(c) for k, c in v.items()})
                     for ij, v in mult.items()}
        for i, v in self.diff.items():
            for k in v:
                if self.degrees[k] != self.degrees[i] + 1:
                    raise ValueError(f"d({self.names[i]}) has a term of the wrong degree")
        for (i, j), v in self.mult.items():
            for k in v:
                if self.degrees[k] != self.degrees[i] + self.degrees[j]:
                    raise ValueError(
                        f"{self.names[i]}*{self.names[j]} has a term of the wrong degree")

    def __len__(self):
        return len(self.names)

    def in_degree(self, k: int) -> list:
        return [i for i, d in enumerate(self.degrees) if d == k]

    @property
    def top_degree(self) -> int:
        return max(self.degrees) if self.degrees else 0

    def above_truncation(self, k: int) -> bool:
        return self.truncation is not None and k > self.truncation

    def d(self, v: Mapping) -> dict:
        out: dict = {}
        for i, c in v.items():
            for k, e in self.diff.get(i, {}).items():
                out[k] = out.get(k, 0) + c * e
        return _clean(out)

    def mul(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                if self.above_truncation(self.degrees[i] + self.degrees[j]):
                    continue
                for k, e in self.mult.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * e
        return _clean(out)

    def degree_of(self, v: Mapping) -> int | None:
        degs = {self.degrees[i] for i in v}
        if len(degs) > 1:
            raise ValueError("cochain is not homogeneous")
        return degs.pop() if degs else None

    def basis_vector(self, name: str) -> dict:
        return {self.index[name]: Fraction(1)}

    def vector(self, terms) -> dict:
        """Cochain from ``{name: coefficient}`` or ``[[name, coefficient], ...]``."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict = {}
        for name, c in items:
            if name not in self.index:
                raise ValueError(f"unknown basis element {name!r}")
            k = self.index[name]
            out[k] = out.get(k, 0) + to_fraction(c)
        return _clean(out)

    def format(self, v: Mapping) -> list:
        return [[self.names[k], fraction_str(c)] for k, c in sorted(v.items())]

    def differential_matrix(self, k: int) -> list:
        """Matrix of ``d: C^k -> C^(k+1)`` in the basis order."""
        src, dst = self.in_degree(k), self.in_degree(k + 1)
        pos = {b: r for r, b in enumerate(dst)}
        A = [[Fraction(0)] * len(src) for _ in dst]
        for c, i in enumerate(src):
            for k2, e in self.diff.get(i, {}).items():
                A[pos[k2]][c] = e
        return A

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)],
            "diff": [[self.names[i], self.format(v)] for i, v in sorted(self.diff.items()) if v],
            "mult": [[self.names[i], self.names[j], self.format(v)]
                     for (i, j), v in sorted(self.mult.items()) if v],
            "truncation": self.truncation,
        }
        if not self.graded_commutative:
            out["graded_commutative"] = False
        return out

    @classmethod
    def from_json(cls, obj) -> "Dga":
        try:
            basis = [(b["name"], b["degree"]) for b in obj["basis"]]
            names = {n: i for i, (n, _) in enumerate(basis)}

            def vec(terms):
                return {names[n]: to_fraction(c) for n, c in terms}

            diff = {names[n]: vec(t) for n, t in obj.get("diff", [])}
            mult = {(names[a], names[b]): vec(t) for a, b, t in obj.get("mult", [])}
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed DGA literal: {exc}") from exc
        return cls(basis, diff, mult, obj.get("truncation"),
                   obj.get("graded_commutative", True))


def validate_dga(D: Dga) -> list:
    """All violated DGA identities, checked exactly on basis elements within the truncation."""
    out = []
    n = len(D)
    deg = D.degrees
    e = [{i: Fraction(1)} for i in range(n)]

    for i in range(n):
        if D.d(D.d(e[i])):
            out.append(Violation("d^2", (D.names[i],), "d(d(x)) is nonzero"))

    for i, j in cartesian(range(n), repeat=2):
        if D.above_truncation(deg[i] + deg[j] + 1):
            continue
        lhs = D.d(D.mul(e[i], e[j]))
        sign = -1 if deg[i] % 2 else 1
        rhs = vadd(D.mul(D.d(e[i]), e[j]), D.mul(e[i], D.d(e[j])), sign)
        if vadd(lhs, rhs, -1):
            out.append(Violation("leibniz", (D.names[i], D.names[j]),
                                 "d(ab) != (da)b + (-1)^|a| a(db)"))
        if D.graded_commutative:
            s = -1 if (deg[i] * deg[j]) % 2 else 1
            if vadd(D.mul(e[i], e[j]), D.mul(e[j], e[i]), -s):
                out.append(Violation("commutativity", (D.names[i], D.names[j]),
                                     "ab != (-1)^(|a||b|) ba"))

    prods = {(i, j): D.mul(e[i], e[j]) for i, j in cartesian(range(n), repeat=2)}
    for i, j, k in cartesian(range(n), repeat=3):
        if D.above_truncation(deg[i] + deg[j] + deg[k]):
            continue
        ab, bc = prods[(i, j)], prods[(j, k)]
        if not ab and not bc:
            continue
        if vadd(D.mul(ab, e[k]), D.mul(e[i], bc), -1):
            out.append(Violation("associativity", (D.names[i], D.names[j], D.names[k]),
                                 "(ab)c != a(bc)"))
    return out


# -- free graded-commutative algebras --------------------------------------


def _sort_monomial(seq: list, gdeg: Sequence[int]):
    """Bubble-sort generator indices with Koszul signs; ``None`` if an odd generator repeats."""
    seq = list(seq)
    sign = 1
    for end in range(len(seq) - 1, 0, -1):
        for k in range(end):
            a, b = seq[k], seq[k + 1]
            if a > b:
                seq[k], seq[k + 1] = b, a
                if gdeg[a] % 2 and gdeg[b] % 2:
                    sign = -sign
    for a, b in zip(seq, seq[1:]):
        if a == b and gdeg[a] % 2:
            return None
    return sign, tuple(seq)


def free_cdga(generators: Sequence, differentials: Mapping, truncation: int | None = None) -> Dga:
    """Free graded-commutative DGA on named generators, truncated above ``truncation``.

    ``generators`` is a list of ``(name, degree)`` with positive degrees.
    ``differentials`` maps a generator name to a list of
    ``(coefficient, [generator names])`` terms.
    """
    gnames = [g for g, _ in generators]
    gdeg = [int(d) for _, d in generators]
    if any(q < 1 for q in gdeg):
        raise ValueError("generator degrees must be positive")
    if truncation is None:
        if any(q % 2 == 0 for q in gdeg):
            raise ValueError("even-degree generators need a truncation degree")
        truncation = sum(gdeg)
    gidx = {g: i for i, g in enumerate(gnames)}

    # enumerate monomials by degree
    monos = [()]
    frontier = [()]
    while frontier:
        nxt = []
        for m in frontier:
            start = m[-1] if m else 0
            tot = sum(gdeg[a] for a in m)
            for g in range(start, len(gnames)):
                if m and g == m[-1] and gdeg[g] % 2:
                    continue
                if tot + gdeg[g] <= truncation:
                    nxt.append(m + (g,))
        monos.extend(nxt)
        frontier = nxt
    monos.sort(key=lambda m: (sum(gdeg[a] for a in m), m))
    midx = {m: i for i, m in enumerate(monos)}

    def name(m):
        return "*".join(gnames[a] for a in m) if m else "1"

    def mono_mul(a, b):
        r = _sort_monomial(list(a) + list(b), gdeg)
        if r is None or r[1] not in midx:
            return {}
        return {midx[r[1]]: Fraction(r[0])}

    dgen = {}
    for g, terms in differentials.items():
        v: dict = {}
        for c, word in terms:
            seq = [gidx[x] for x in word]
            r = _sort_monomial(seq, gdeg)
            if r is None:
                continue
            if r[1] not in midx:
                raise ValueError(f"d({g}) leaves the truncated range")
            v[midx[r[1]]] = v.get(midx[r[1]], 0) + r[0] * to_fraction(c)
        dgen[gidx[g]] = _clean(v)

    mult = {}
    for a in monos:
        for b in monos:
            p = mono_mul(a, b)
            if p:
                mult[(midx[a], midx[b])] = p

    # Leibniz extension of d to monomials
    diff = {}
    for m in monos:
        v: dict = {}
        pre = 0
        for pos, g in enumerate(m):
            sign = -1 if pre % 2 else 1
            for k, c in dgen.get(g, {}).items():
                seq = list(m[:pos]) + list(monos[k]) + list(m[pos + 1:])
                r = _sort_monomial(seq, gdeg)
                if r is None or r[1] not in midx:
                    continue
                t = midx[r[1]]
                v[t] = v.get(t, 0) + sign * r[0] * c
            pre += gdeg[g]
        if _clean(v):
            diff[midx[m]] = _clean(v)

    basis = [(name(m), sum(gdeg[a] for a in m)) for m in monos]
    return Dga(basis, diff, mult, truncation, True)


def borromean_fixture() -> Dga:
    """Model for the complement of the Borromean rings, truncated above degree 3."""
    gens = [("x1", 1), ("x2", 1), ("x3", 1), ("y1", 1), ("y2", 1), ("y3", 1)]
    diffs = {
        "y1": [(1, ["x2", "x3"])],
        "y2": [(1, ["x3", "x1"])],
        "y3": [(1, ["x1", "x2"])],
    }
    return free_cdga(gens, diffs, truncation=3)


def borromean_dual(D: Dga) -> dict:
    """Functional reading off the coefficient of ``x1*y1``; it kills every exact 2-cochain."""
    return D.basis_vector("x1*y1")


def exterior_algebra(n: int = 1) -> Dga:
    return free_cdga([(f"x{i}", 1) for i in range(1, n + 1)], {})


# -- cohomology ------------------------------------------------------------


@dataclass(frozen=True)
class CohomClass:
    degree: int
    representative: dict


def cocycles(D: Dga, k: int) -> list:
    src = D.in_degree(k)
    if not src:
        return []
    A = D.differential_matrix(k)
    return [{src[c]: x for c, x in enumerate(v) if x != 0}
            for v in linalg.nullspace(A, len(src))]


def coboundaries(D: Dga, k: int) -> list:
    return [v for v in (D.d({i: Fraction(1)}) for i in D.in_degree(k - 1)) if v]


def _coords(D: Dga, vs: Sequence[Mapping], k: int) -> list:
    idx = D.in_degree(k)
    return [[Fraction(v.get(i, 0)) for i in idx] for v in vs]


def is_exact(D: Dga, v: Mapping, k: int | None = None) -> bool:
    if not v:
        return True
    if k is None:
        k = D.degree_of(v)
    B = coboundaries(D, k)
    return linalg.in_span(_coords(D, B, k), _coords(D, [v], k)[0])


def solve_primitive(D: Dga, rhs: Mapping, k: int):
    """Some ``a`` in degree ``k`` with ``d a = rhs``, or ``None``."""
    src = D.in_degree(k)
    dst = D.in_degree(k + 1)
    if not src:
        return {} if not rhs else None
    b = [Fraction(rhs.get(i, 0)) for i in dst]
    if any(i not in set(dst) for i in rhs):
        raise ValueError("right-hand side has the wrong degree")
    x, _ = linalg.solve(D.differential_matrix(k), b, len(src))
    if x is None:
        return None
    return _clean({src[c]: v for c, v in enumerate(x)})


def cohomology(D: Dga, k: int) -> list:
    """Representatives of a basis of ``H^k``, chosen from cocycles in pivot order."""
    if k < 0 or not D.in_degree(k):
        return []
    Z = cocycles(D, k)
    chosen = _coords(D, coboundaries(D, k), k)
    out = []
    for z in Z:
        row = _coords(D, [z], k)[0]
        if not linalg.in_span(chosen, row):
            chosen.append(row)
            out.append(CohomClass(k, z))
    return out


def same_class(D: Dga, u: Mapping, v: Mapping, k: int) -> bool:
    return is_exact(D, vadd(u, v, -1), k)


# -- Massey products -------------------------------------------------------


def massey_degree(q: Sequence[int], d: int | None = None) -> int:
    if d is None:
        d = len(q)
    if d != len(q):
        raise ValueError("d must equal the number of degrees")
    if d < 2:
        raise ValueError("Massey products need at least two classes")
    return sum(q) - (d - 2)


class MasseyObstruction(ArithmeticError):
    """No primitive exists for ``a[i..j]``; ``cochain`` is the closed obstruction."""

    def __init__(self, i: int, j: int, cochain: dict, degree: int):
        super().__init__(f"defining system obstructed at ({i},{j})")
        self.i, self.j = i, j
        self.cochain = cochain
        self.degree = degree


@dataclass
class DefiningSystem:
    d: int
    a: dict = field(default_factory=dict)
    degrees: dict = field(default_factory=dict)


def _bar(D: Dga, v: Mapping, k: int) -> dict:
    return vscale(v, -1) if k % 2 else dict(v)


def _sum_products(D: Dga, sys: DefiningSystem, i: int, j: int) -> dict:
    out: dict = {}
    for k in range(i, j):
        out = vadd(out, D.mul(_bar(D, sys.a[(i, k)], sys.degrees[(i, k)]), sys.a[(k + 1, j)]))
    return out


def _input_degrees(D: Dga, classes: Sequence[Mapping]) -> list:
    q = []
    for n, u in enumerate(classes, 1):
        if not u:
            raise ValueError(f"class {n} has a zero representative; give its degree explicitly")
        if D.d(u):
            raise ValueError(f"class {n} is not closed")
        q.append(D.degree_of(u))
    return q


def defining_system(D: Dga, classes: Sequence[Mapping], rng: random.Random | None = None) -> DefiningSystem:
    """Build ``a[i..j]`` for all ``(i, j) != (1, d)`` by increasing length.

    With ``rng`` each new primitive is shifted by a random integral cocycle.
    Raises ``MasseyObstruction`` at the first interval with no primitive.
    """
    q = _input_degrees(D, classes)
    d = len(q)
    if d < 2:
        raise ValueError("need at least two classes")
    sys = DefiningSystem(d)
    for i in range(1, d + 1):
        sys.a[(i, i)] = dict(classes[i - 1])
        sys.degrees[(i, i)] = q[i - 1]
    for length in range(1, d - 1):
        for i in range(1, d - length + 1):
            j = i + length
            deg = sum(q[i - 1:j]) - length
            rhs = _sum_products(D, sys, i, j)
            if D.d(rhs):
                raise ArithmeticError(f"right-hand side for ({i},{j}) is not closed")
            a = solve_primitive(D, rhs, deg)
            if a is None:
                raise MasseyObstruction(i, j, rhs, deg + 1)
            if rng is not None:
                for z in cocycles(D, deg):
                    a = vadd(a, z, rng.randint(-3, 3))
            sys.a[(i, j)] = a
            sys.degrees[(i, j)] = deg
    return sys


def system_residuals(D: Dga, sys: DefiningSystem) -> dict:
    """``d a[i..j] - sum abar a`` for every intermediate interval; all zero for a valid system."""
    return {(i, j): vadd(D.d(a), _sum_products(D, sys, i, j), -1)
            for (i, j), a in sys.a.items() if j > i}


@dataclass
class MasseyOutcome:
    status: str
    degree: int
    representative: dict | None = None
    nonzero: bool | None = None
    obstruction: MasseyObstruction | None = None
    perturbations: int = 0
    uniqueness_evidence: int = 0
    perturbation_failures: int = 0
    seed: int = 0
    system: DefiningSystem | None = None

    def to_json(self, D: Dga) -> dict:
        out = {"status": self.status, "degree": self.degree}
        if self.status == "class":
            out.update(representative=D.format(self.representative), nonzero=self.nonzero)
        else:
            ob = self.obstruction
            out["obstruction"] = {"interval": [ob.i, ob.j], "degree": ob.degree,
                                  "cochain": D.format(ob.cochain)}
        out.update(perturbations=self.perturbations,
                   uniqueness_evidence=self.uniqueness_evidence,
                   perturbation_failures=self.perturbation_failures, seed=self.seed)
        return out


def massey_product(D: Dga, classes: Sequence[Mapping], perturbations: int = 100,
                   seed: int = 0) -> MasseyOutcome:
    q = _input_degrees(D, classes)
    deg = massey_degree(q)
    try:
        sys = defining_system(D, classes)
    except MasseyObstruction as ob:
        return MasseyOutcome("obstructed", deg, obstruction=ob, seed=seed)
    rep = _sum_products(D, sys, 1, len(q))
    if D.d(rep):
        raise ArithmeticError("Massey representative is not closed")
    rng = random.Random(seed)
    same = failed = 0
    for _ in range(perturbations):
        try:
            alt = defining_system(D, classes, rng)
        except MasseyObstruction:
            failed += 1
            continue
        if same_class(D, rep, _sum_products(D, alt, 1, len(q)), deg):
            same += 1
    return MasseyOutcome("class", deg, rep, not is_exact(D, rep, deg), None,
                         perturbations, same, failed, seed, sys)


def coefficient_extract(outcome: MasseyOutcome, dual: Mapping, D: Dga) -> Fraction:
    """Evaluate ``dual`` on the product class; ``dual`` must vanish on exact cochains."""
    if outcome.status != "class":
        raise ValueError("outcome is obstructed; there is no class to evaluate")
    k = outcome.degree
    for b in coboundaries(D, k):
        if sum((Fraction(dual.get(i, 0)) * c for i, c in b.items()), Fraction(0)) != 0:
            raise ValueError("functional does not annihilate exact cochains")
    return sum((Fraction(dual.get(i, 0)) * c for i, c in outcome.representative.items()),
               Fraction(0))
