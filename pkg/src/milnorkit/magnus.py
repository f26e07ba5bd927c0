"""Truncated Magnus expansions and Milnor invariants of word systems.

The Magnus expansion sends ``e_i`` to ``1 + X_i`` in the ring of
noncommutative power series over the integers.  Everything is truncated at
a fixed degree and stored sparsely as ``{monomial: coefficient}`` where a
monomial is a tuple of generator indices.

In squarefree mode every monomial with a repeated index is identically zero;
the quotient ring is the Magnus image of the free Milnor group.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .freegroup import Word, concat


def _squarefree(m: tuple) -> bool:
    return len(set(m)) == len(m)


def binomial(a: int, k: int) -> int:
    """Generalized binomial coefficient ``a choose k`` for any integer ``a``."""
    if k < 0:
        return 0
    num = 1
    den = 1
    for j in range(k):
        num *= a - j
        den *= j + 1
    return num // den


class NcSeries:
    """Truncated noncommutative power series with integer coefficients."""

    __slots__ = ("rank", "maxdeg", "terms", "squarefree")

    def __init__(self, rank: int, maxdeg: int, terms=None, squarefree: bool = False):
        if maxdeg < 0:
            raise ValueError("maxdeg must be nonnegative")
        self.rank = rank
        self.maxdeg = maxdeg
        self.squarefree = squarefree
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) > maxdeg:
                continue
            if any(not 1 <= i <= rank for i in m):
                raise ValueError(f"monomial {m} uses an index outside 1..{rank}")
            if squarefree and not _squarefree(m):
                continue
            if c:
                clean[m] = clean.get(m, 0) + c
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def one(cls, rank: int, maxdeg: int, squarefree: bool = False) -> "NcSeries":
        return cls(rank, maxdeg, {(): 1}, squarefree)

    def _compatible(self, other: "NcSeries") -> None:
        if (self.rank, self.maxdeg, self.squarefree) != (other.rank, other.maxdeg, other.squarefree):
            raise ValueError("series live in different truncated rings")

    def coefficient(self, monomial: Sequence[int]) -> int:
        m = tuple(monomial)
        if len(m) > self.maxdeg:
            raise ValueError(f"monomial of length {len(m)} exceeds truncation degree {self.maxdeg}")
        return self.terms.get(m, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NcSeries):
            return NotImplemented
        return (
            self.rank == other.rank
            and self.maxdeg == other.maxdeg
            and self.squarefree == other.squarefree
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        body = " + ".join(
            f"{c}*X{''.join(map(str, m))}" if m else str(c)
            for m, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))
        )
        return f"NcSeries(rank={self.rank}, maxdeg={self.maxdeg}: {body or '0'})"

    def __add__(self, other: "NcSeries") -> "NcSeries":
        self._compatible(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return NcSeries(self.rank, self.maxdeg, out, self.squarefree)

    def __neg__(self) -> "NcSeries":
        return NcSeries(self.rank, self.maxdeg, {m: -c for m, c in self.terms.items()}, self.squarefree)

    def __sub__(self, other: "NcSeries") -> "NcSeries":
        return self + (-other)

    def __mul__(self, other: "NcSeries") -> "NcSeries":
        self._compatible(other)
        D = self.maxdeg
        by_len = defaultdict(list)
        for m, c in other.terms.items():
            by_len[len(m)].append((m, c))
        out: dict = defaultdict(int)
        sf = self.squarefree
        for m1, c1 in self.terms.items():
            room = D - len(m1)
            for length, items in by_len.items():
                if length > room:
                    continue
                for m2, c2 in items:
                    m = m1 + m2
                    if sf and not _squarefree(m):
                        continue
                    out[m] += c1 * c2
        res = NcSeries.__new__(NcSeries)
        res.rank, res.maxdeg, res.squarefree = self.rank, D, sf
        res.terms = {m: c for m, c in out.items() if c}
        return res

    def __pow__(self, k: int) -> "NcSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = NcSeries.one(self.rank, self.maxdeg, self.squarefree)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "NcSeries":
        """Inverse of a series with constant term 1, via the finite geometric series."""
        if self.terms.get((), 0) != 1:
            raise ValueError("only series with constant term 1 are inverted")
        one = NcSeries.one(self.rank, self.maxdeg, self.squarefree)
        tail = self - one
        acc = one
        term = one
        for _ in range(self.maxdeg):
            term = term * (-tail)
            acc = acc + term
        return acc

    def homogeneous(self, degree: int) -> dict:
        return {m: c for m, c in self.terms.items() if len(m) == degree}

    def lowest_nonconstant(self) -> tuple:
        """``(degree, terms)`` of the first nonvanishing homogeneous part above degree 0."""
        for k in range(1, self.maxdeg + 1):
            part = self.homogeneous(k)
            if part:
                return k, part
        return None, {}


def _generator_power(rank: int, index: int, exponent: int, maxdeg: int, squarefree: bool) -> NcSeries:
    # (1 + X)^a = sum_k C(a, k) X^k, valid for negative a as a formal series
    top = 1 if squarefree else maxdeg
    terms = {(index,) * k: binomial(exponent, k) for k in range(0, min(top, maxdeg) + 1)}
    return NcSeries(rank, maxdeg, terms, squarefree)


def expand(w: Word, maxdeg: int, squarefree: bool = False) -> NcSeries:
    """Magnus expansion of ``w`` truncated above ``maxdeg``."""
    if maxdeg < 1:
        raise ValueError("maxdeg must be at least 1")
    acc = NcSeries.one(w.rank, maxdeg, squarefree)
    for index, exponent in w.runs():
        acc = acc * _generator_power(w.rank, index, exponent, maxdeg, squarefree)
    return acc


def reduced_expand(w: Word, maxdeg: int) -> NcSeries:
    """Magnus image of ``w`` in the free Milnor group: squarefree monomials only."""
    return expand(w, maxdeg, squarefree=True)


def coefficient(s: NcSeries, monomial: Sequence[int]) -> int:
    return s.coefficient(monomial)


# -- shuffle identities ---------------------------------------------------


@lru_cache(maxsize=None)
def infiltration(u: tuple, v: tuple) -> tuple:
    """Infiltration product of two words as a sorted tuple of ``(word, multiplicity)``.

    This is the shuffle product plus the terms where an equal pair of letters
    is merged into one.  Magnus coefficients multiply by this rule.
    """
    return tuple(sorted(_infiltration(u, v, merge=True).items()))


@lru_cache(maxsize=None)
def shuffle_product(u: tuple, v: tuple) -> tuple:
    """Shuffle product of two words as a sorted tuple of ``(word, multiplicity)``."""
    return tuple(sorted(_infiltration(u, v, merge=False).items()))


@lru_cache(maxsize=None)
def _infiltration(u: tuple, v: tuple, merge: bool) -> dict:
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out: dict = defaultdict(int)
    a, b = u[-1], v[-1]
    for w, c in _infiltration(u[:-1], v, merge).items():
        out[w + (a,)] += c
    for w, c in _infiltration(u, v[:-1], merge).items():
        out[w + (b,)] += c
    if merge and a == b:
        for w, c in _infiltration(u[:-1], v[:-1], merge).items():
            out[w + (a,)] += c
    return dict(out)


def shuffle_residual(s: NcSeries, I: Sequence[int], J: Sequence[int], merge: bool = True) -> int:
    """``c(I) c(J) - sum_K (I * J)(K) c(K)`` for the product rule of Magnus coefficients.

    With ``merge=True`` the product is the infiltration product, which
    vanishes identically on Magnus expansions of group elements.  With
    ``merge=False`` it is the plain shuffle product; that version vanishes
    on expansions whenever ``I`` and ``J`` share no letter.
    """
    I, J = tuple(I), tuple(J)
    if len(I) + len(J) > s.maxdeg:
        raise ValueError(
            f"len(I)+len(J) = {len(I) + len(J)} exceeds truncation degree {s.maxdeg}"
        )
    product = infiltration(I, J) if merge else shuffle_product(I, J)
    total = sum(mult * s.terms.get(K, 0) for K, mult in product)
    return s.coefficient(I) * s.coefficient(J) - total


@dataclass(frozen=True)
class AdditivityCheck:
    holds: bool
    vacuous: bool
    lhs: int
    rhs: int


def _proper_subsequences(I: tuple):
    for k in range(1, len(I)):
        yield from combinations(I, k)


def concat_additivity_check(u: Word, v: Word, I: Sequence[int]) -> AdditivityCheck:
    """Check ``c(uv, I) = c(u, I) + c(v, I)`` when all lower coefficients of u and v vanish.

    If some proper-subsequence coefficient of ``u`` or ``v`` is nonzero the
    hypothesis fails; the check is then reported as vacuous (``holds`` is
    True by convention).
    """
    I = tuple(I)
    D = len(I)
    su, sv, suv = expand(u, D), expand(v, D), expand(concat(u, v), D)
    lhs = suv.coefficient(I)
    rhs = su.coefficient(I) + sv.coefficient(I)
    vacuous = any(su.coefficient(J) or sv.coefficient(J) for J in _proper_subsequences(I))
    return AdditivityCheck(holds=vacuous or lhs == rhs, vacuous=vacuous, lhs=lhs, rhs=rhs)


# -- link systems and mu-bar ---------------------------------------------


@dataclass(frozen=True)
class LinkSystem:
    """Longitudes of an ``r``-component link written in the meridians ``e_1..e_r``."""

    r: int
    longitudes: tuple
    m: int = 3

    def __post_init__(self):
        object.__setattr__(self, "longitudes", tuple(self.longitudes))
        if len(self.longitudes) != self.r:
            raise ValueError(f"expected {self.r} longitudes, got {len(self.longitudes)}")
        for i, w in enumerate(self.longitudes, 1):
            if w.rank != self.r:
                raise ValueError(f"longitude {i} has rank {w.rank}, expected {self.r}")

    def to_json(self) -> dict:
        return {"r": self.r, "m": self.m, "longitudes": [w.to_json() for w in self.longitudes]}

    @classmethod
    def from_json(cls, obj) -> "LinkSystem":
        try:
            r, longs = obj["r"], obj["longitudes"]
        except (KeyError, TypeError) as exc:
            raise ValueError("link system needs fields 'r' and 'longitudes'") from exc
        m = obj.get("m", 3)
        return cls(r=r, m=m, longitudes=tuple(Word.from_json(w) for w in longs))


@dataclass(frozen=True)
class MuResult:
    value: int
    defined: bool
    obstructions: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "defined": self.defined,
            "obstructions": [{"indices": list(J), "value": v} for J, v in self.obstructions],
        }


def _lower_sequences(I: tuple) -> list:
    """Index sequences whose invariants must vanish for ``mu(I)`` to be an integer."""
    d = len(I)
    seen = []
    if len(set(I)) == d:
        for k in range(2, d):
            for J in combinations(I, k):
                if J not in seen:
                    seen.append(J)
        return seen
    # repeated indices: consecutive pieces of every cyclic rotation
    for shift in range(d):
        rot = I[shift:] + I[:shift]
        for k in range(2, d):
            for start in range(0, d - k + 1):
                J = rot[start : start + k]
                # sequences starting and ending on one component are not invariants
                if J[0] != J[-1] and J not in seen:
                    seen.append(J)
    return seen


def mu_bar(L: LinkSystem, I: Sequence[int], maxdeg: int | None = None) -> MuResult:
    """Milnor invariant ``mu(i_1..i_d)``: coefficient of ``X_i1..X_i(d-1)`` in longitude ``i_d``."""
    I = tuple(I)
    d = len(I)
    if d < 2:
        raise ValueError("Milnor invariants need at least two indices")
    if any(not 1 <= i <= L.r for i in I):
        raise ValueError(f"indices must lie in 1..{L.r}")
    if len(set(I)) < d and I[0] == I[-1]:
        raise ValueError("with repeated indices the first and last index must differ")
    if maxdeg is None:
        maxdeg = d + 1
    if maxdeg < d - 1:
        raise ValueError("truncation degree too small for this invariant")
    cache: dict = {}

    def inv(J: tuple) -> int:
        comp = J[-1]
        if comp not in cache:
            cache[comp] = expand(L.longitudes[comp - 1], max(maxdeg, 1))
        return cache[comp].coefficient(J[:-1])

    value = inv(I)
    obstructions = tuple((J, v) for J in _lower_sequences(I) if (v := inv(J)) != 0)
    return MuResult(value=value, defined=not obstructions, obstructions=obstructions)


def cyclic_sign(m: int, degrees: Sequence[int]) -> int:
    """Sign relating ``mu(l_1..l_d)`` to its rotation by ``k = len(degrees)`` places.

    ``degrees`` are the q-values of the first ``k`` indices.
    """
    return -1 if (m * (sum(degrees) + len(degrees))) % 2 else 1
