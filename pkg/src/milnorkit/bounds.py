"""Thickness bounds for Milnor invariants: regimes, example families, Freedman--Krushkal words.

Magnitudes like ``2^(n^m)`` never go through floats.  Power-law bounds are
exact rationals; exponential bounds are stored by their natural-log exponent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .freegroup import Word, commutator
from .magnus import expand

LINKING = "Linking"
POLY_DISTINCT = "PolynomialDistinct"
POLY_REPEATED = "PolynomialRepeated"
EXPONENTIAL = "Exponential"
BILIPSCHITZ = "BilipschitzPolynomial"
REGIMES = (LINKING, POLY_DISTINCT, POLY_REPEATED, EXPONENTIAL, BILIPSCHITZ)

# rational brackets for ln 2, tight enough for every comparison made here
LN2_LO = Fraction(6931471805599453, 10**16)
LN2_HI = Fraction(6931471805599454, 10**16)


@dataclass(frozen=True)
class Constants:
    """Unspecified constants in the bounds; all default to 1."""

    C_md: Fraction = Fraction(1)
    C_m: Fraction = Fraction(1)
    c: Fraction = Fraction(1)
    C_q: Fraction = Fraction(1)
    slack: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("C_md", "C_m", "c", "C_q", "slack"):
            v = Fraction(getattr(self, name))
            if v <= 0:
                raise ValueError(f"constant {name} must be positive")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class LinkDimensions:
    m: int
    p: tuple
    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "indices", tuple(self.indices))
        if not self.p:
            raise ValueError("need at least one component")
        for i, pi in enumerate(self.p, 1):
            if not 1 <= pi <= self.m - 2:
                raise ValueError(f"p_{i} = {pi} outside 1..{self.m - 2}")
        if len(self.indices) < 2:
            raise ValueError("an invariant needs at least two indices")
        for l in self.indices:
            if not 1 <= l <= len(self.p):
                raise ValueError(f"index {l} outside 1..{len(self.p)}")

    @property
    def d(self) -> int:
        return len(self.indices)

    @property
    def q(self) -> tuple:
        return tuple(self.m - pi - 1 for pi in self.p)

    def used_p(self) -> list:
        return [self.p[l - 1] for l in self.indices]

    def used_q(self) -> list:
        return [self.q[l - 1] for l in self.indices]

    @property
    def distinct(self) -> bool:
        return len(set(self.indices)) == self.d


@dataclass(frozen=True)
class DimensionCheck:
    holds: bool
    p_form: bool
    q_form: bool


def check_dimension(L: LinkDimensions) -> DimensionCheck:
    d = L.d
    p_form = sum(L.used_p()) == (L.m - 2) * (d - 1) + 1
    q_form = sum(L.used_q()) - (d - 2) == L.m - 1
    if p_form != q_form:
        raise ArithmeticError("the two forms of the dimension condition disagree")
    return DimensionCheck(p_form and q_form, p_form, q_form)


@dataclass(frozen=True)
class Regime:
    name: str
    m: int
    d: int
    tau_exponent: int
    L_exponent: int = 0

    def to_json(self) -> dict:
        return {"name": self.name, "m": self.m, "d": self.d,
                "tau_exponent": self.tau_exponent, "L_exponent": self.L_exponent}


def classify_regime(L: LinkDimensions, bilipschitz: bool = False) -> Regime:
    """Which bound applies to ``mu(l_1..l_d)``.

    For the exponential regime ``tau_exponent`` is the inner exponent ``m`` in
    ``exp(C tau^-m)``.  ``bilipschitz`` selects the bound for maps with
    controlled bilipschitz constant (distinct indices only).
    """
    if not check_dimension(L).holds:
        raise ValueError(
            f"dimension condition fails: sum p = {sum(L.used_p())}, "
            f"need {(L.m - 2) * (L.d - 1) + 1}"
        )
    m, d = L.m, L.d
    if d == 2:
        return Regime(LINKING, m, d, m + 1)
    if bilipschitz:
        if not L.distinct:
            raise ValueError("the bilipschitz bound needs distinct indices")
        tau_exp = sum(q + 1 for q in L.used_q())
        assert tau_exp == m + 2 * d - 3
        return Regime(BILIPSCHITZ, m, d, tau_exp, (2 * m - 5) * (d - 2))
    if 1 in L.used_p():
        if L.distinct:
            return Regime(POLY_DISTINCT, m, d, (m + 1) * (d - 1))
        return Regime(POLY_REPEATED, m, d, 2 * (m + 1) * (d - 1))
    return Regime(EXPONENTIAL, m, d, m)


@dataclass(frozen=True)
class BoundValue:
    """A bound either as an exact value (``kind="power"``) or as ``exp(ln_exponent)``."""

    kind: str
    value: Fraction | None = None
    ln_exponent: Fraction | None = None
    constants: Constants = field(default_factory=Constants)

    def log2(self) -> float:
        if self.kind == "power":
            return _log2_fraction(self.value)
        return float(self.ln_exponent) / math.log(2)

    def exceeds_int(self, n: int) -> bool:
        """Whether this bound is at least ``n`` (exact)."""
        if n <= 0:
            return True
        if self.kind == "power":
            return self.value >= n
        # exp(E) >= n  <=>  E >= ln n; decided through ln n = log2(n) * ln 2
        return _exp_at_least(self.ln_exponent, n)

    def to_json(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "value": _frac_str(self.value), "log2": f"{self.log2():.6f}"}
        return {"kind": "exp", "ln_exponent": _frac_str(self.ln_exponent),
                "log2": f"{self.log2():.6f}"}


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


def _exp_at_least(E: Fraction, n: int) -> bool:
    # exp(E) >= n  <=>  E / ln2 >= log2 n ; bracket both sides exactly
    if n == 1:
        return E >= 0
    k = n.bit_length() - 1  # 2^k <= n < 2^(k+1)
    if E >= (k + 1) * LN2_HI:
        return True
    if E < k * LN2_LO:
        return False
    # borderline: refine with floats on the mantissa, fine for the sizes used here
    return float(E) >= math.log(n)


def upper_bound(R: Regime, tau, L_bilip=None, constants: Constants | None = None) -> BoundValue:
    tau = Fraction(tau)
    const = constants or Constants()
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1]")
    if R.name == BILIPSCHITZ:
        if L_bilip is None:
            raise ValueError("the bilipschitz regime needs the bilipschitz constant L")
        L = Fraction(L_bilip)
        if L <= 0:
            raise ValueError("L must be positive")
        return BoundValue("power", const.C_md * tau ** (-R.tau_exponent) * L ** R.L_exponent,
                          constants=const)
    if R.name == EXPONENTIAL:
        return BoundValue("exp", ln_exponent=const.C_md * tau ** (-R.tau_exponent), constants=const)
    C = const.C_m if R.name == LINKING else const.C_md
    return BoundValue("power", C * tau ** (-R.tau_exponent), constants=const)


# -- example families ------------------------------------------------------


def poly_family_dimensions(m: int, d: int) -> LinkDimensions:
    return LinkDimensions(m, (m - 2,) * (d - 1) + (1,), tuple(range(1, d + 1)))


def exp_family_valid(m: int, d: int) -> bool:
    """Some dimension-valid pattern has two components of codimension at least 3."""
    return d >= 3 and m >= 5


def example_family_value(kind: str, m: int, d: int, n: int) -> int:
    if n < 1:
        raise ValueError("n must be at least 1")
    if kind == "poly":
        if m < 3 or d < 2:
            raise ValueError("the polynomial family needs m >= 3 and d >= 2")
        return n ** ((m + 1) * (d - 1))
    if kind == "exp":
        if not exp_family_valid(m, d):
            raise ValueError(
                "the exponential family needs two components of codimension >= 3, "
                "which forces m >= 5 and d >= 3"
            )
        return 1 << (n ** m)
    raise ValueError(f"unknown family {kind!r}")


def format_big(n: int, threshold_digits: int = 30) -> str:
    """Decimal string, or ``2^k*m`` once the decimal form would exceed the threshold."""
    if n == 0 or n.bit_length() * 0.30103 < threshold_digits:
        return str(n)
    sign = "-" if n < 0 else ""
    a = abs(n)
    k = (a & -a).bit_length() - 1
    odd = a >> k
    if odd == 1:
        return f"{sign}2^{k}"
    if odd.bit_length() * 0.30103 < threshold_digits:
        return f"{sign}2^{k}*{odd}"
    return sign + str(a)


def parse_big(s: str) -> int:
    s = s.strip()
    sign = -1 if s.startswith("-") else 1
    s = s.lstrip("-")
    if s.startswith("2^"):
        head, _, tail = s[2:].partition("*")
        return sign * (1 << int(head)) * (int(tail) if tail else 1)
    return sign * int(s)


def _exp_beats_poly(n: int, m: int, K: int, C: Fraction) -> bool:
    """``2^(n^m) > C n^K``, exactly."""
    return (C.denominator << (n ** m)) > C.numerator * n ** K


def crossover(m: int, d: int, constants: Constants | None = None, search_limit: int = 4096) -> int:
    """Least ``n0`` with ``2^(n^m) > C n^((m+1)(d-1))`` for every ``n >= n0``.

    Beyond the scan, ``n^m ln 2 - K ln n - ln C`` is increasing once
    ``m n^m ln 2 > K``, which certifies the tail.
    """
    C = (constants or Constants()).C_md
    K = (m + 1) * (d - 1)
    last_fail = 0
    n = 1
    while True:
        if not _exp_beats_poly(n, m, K, C):
            last_fail = n
        # derivative of the log-gap in n is positive from here on
        if n > last_fail and m * n ** m * LN2_LO > K:
            return last_fail + 1
        n += 1
        if n > search_limit:
            raise ArithmeticError("no crossover found within the search limit")


@dataclass
class DichotomyTable:
    m: int
    d: int
    rows: list
    crossover: int | None

    def to_json(self) -> dict:
        return {"m": self.m, "d": self.d, "crossover": self.crossover, "rows": self.rows}

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = list(self.rows[0].keys()) if self.rows else []
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def dichotomy_table(m: int, d: int, n_range: Sequence[int], constants: Constants | None = None) -> DichotomyTable:
    """Example-family values against the matching bounds at ``tau = 1/n``."""
    const = constants or Constants()
    poly_ok = m >= 3 and d >= 2
    exp_ok = exp_family_valid(m, d)
    K = (m + 1) * (d - 1)
    poly_regime = Regime(LINKING if d == 2 else POLY_DISTINCT, m, d, K)
    exp_regime = Regime(EXPONENTIAL, m, d, m)
    rows = []
    for n in n_range:
        tau = Fraction(1, n)
        row = {"n": n, "tau": _frac_str(tau)}
        if poly_ok:
            v = example_family_value("poly", m, d, n)
            b = upper_bound(poly_regime, tau, constants=const)
            row.update(poly_value=format_big(v), poly_bound=_frac_str(b.value),
                       poly_consistent=v <= const.slack * b.value)
        if exp_ok:
            e = example_family_value("exp", m, d, n)
            eb = upper_bound(exp_regime, tau, constants=const)
            # exp_value <= slack * exp(E)  <=>  n^m ln2 <= E + ln slack
            row.update(exp_value=format_big(e), exp_log2=str(n ** m),
                       exp_bound_ln=_frac_str(eb.ln_exponent),
                       exp_consistent=_exp_le(n ** m, eb.ln_exponent, const.slack),
                       exp_log2_exceeds_poly_bound=_exp_beats_poly(n, m, K, const.C_md))
        rows.append(row)
    xo = crossover(m, d, const) if exp_ok and poly_ok else None
    return DichotomyTable(m, d, rows, xo)


def _exp_le(N: int, E: Fraction, slack: Fraction) -> bool:
    """``2^N <= slack * exp(E)``."""
    if slack == 1:
        if N * LN2_HI <= E:
            return True
        if N * LN2_LO > E:
            return False
    return N * math.log(2) <= float(E) + math.log(float(slack))


# -- Freedman--Krushkal words ----------------------------------------------


def fk_word(q: int, variant: str = "single") -> Word:
    """``[x,[x,...[x,y]]]`` (``single``, rank 2) or ``[x_1,[x_2,...[x_q,x_(q+1)]]]`` (``multi``)."""
    if q < 1:
        raise ValueError("q must be at least 1")
    if variant == "single":
        x, w = Word.generator(2, 1), Word.generator(2, 2)
        for _ in range(q):
            w = commutator(x, w)
        return w
    if variant == "multi":
        r = q + 1
        w = Word.generator(r, r)
        for i in range(q, 0, -1):
            w = commutator(Word.generator(r, i), w)
        return w
    raise ValueError(f"unknown variant {variant!r}")


def fk_literal_length(q: int) -> int:
    """Letter count of the commutator expression before free reduction."""
    if q < 1:
        raise ValueError("q must be at least 1")
    n = 1
    for _ in range(q):
        n = 2 + 2 * n
    return n


def fk_monomial(q: int, variant: str) -> tuple:
    return (1,) * q + (2,) if variant == "single" else tuple(range(1, q + 2))


def fk_telescope_coefficient(q: int, l: int, variant: str = "multi") -> int:
    """Leading Magnus coefficient of ``fk_word(q)^(2^l)``.

    Multi: coefficient of ``X_1...X_(q+1)``.  Single: coefficient of
    ``X_1^q X_2`` in the full (not squarefree) expansion.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    w = fk_word(q, variant)
    s = expand(w, q + 1, squarefree=(variant == "multi"))
    return (s ** (1 << l)).coefficient(fk_monomial(q, variant))


def fk_telescope_naive(q: int, l: int, variant: str = "multi") -> int:
    """Same coefficient from the literal power word; only for small ``l``."""
    w = fk_word(q, variant) ** (1 << l)
    return expand(w, q + 1, squarefree=(variant == "multi")).coefficient(fk_monomial(q, variant))


def _exact_log2(x: Fraction):
    """``log2 x`` as a Fraction when ``x`` is a power of two, else ``None``."""
    a, b = x.numerator, x.denominator
    if a & (a - 1) == 0 and b & (b - 1) == 0:
        return Fraction(a.bit_length() - b.bit_length())
    return None


def fk_thickness_bound(q: int, l: int, constants: Constants | None = None):
    """Upper bound on ``log2 tau`` from ``c 2^l <= C(q) tau^(-10(q+1))``.

    Exact (a Fraction) when ``C(q)/c`` is a power of two, a float otherwise.
    """
    const = constants or Constants()
    if q < 1 or l < 0:
        raise ValueError("need q >= 1 and l >= 0")
    ratio = const.C_q / const.c
    lg = _exact_log2(ratio)
    if lg is None:
        return (_log2_fraction(ratio) - l) / (10 * (q + 1))
    return (lg - l) / (10 * (q + 1))
