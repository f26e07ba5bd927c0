"""Words in finitely generated free groups.

A letter is a nonzero integer: ``+i`` stands for the generator ``e_i`` and
``-i`` for its inverse.  Words are kept freely reduced at all times.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class Word:
    """A freely reduced word in the free group of the given rank.

    ``Word(rank, letters)`` reduces ``letters`` eagerly.  Letters may be
    signed integers or ``(index, sign)`` pairs.
    """

    __slots__ = ("rank", "letters", "_hash")

    def __init__(self, rank: int, letters: Iterable = ()):
        if rank < 0:
            raise ValueError(f"rank must be nonnegative, got {rank}")
        self.rank = rank
        self.letters = _reduce_letters(_normalize(letters, rank))
        self._hash = None

    @classmethod
    def _trusted(cls, rank: int, letters: tuple) -> "Word":
        w = cls.__new__(cls)
        w.rank = rank
        w.letters = letters
        w._hash = None
        return w

    @classmethod
    def generator(cls, rank: int, index: int) -> "Word":
        return cls(rank, [index])

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls._trusted(rank, ())

    def pairs(self) -> list:
        """Letters as ``(index, sign)`` pairs."""
        return [(abs(a), 1 if a > 0 else -1) for a in self.letters]

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.rank == other.rank and self.letters == other.letters

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, self.letters))
        return self._hash

    def __repr__(self) -> str:
        return f"Word({self.rank}, {list(self.letters)})"

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"e{a}" if a > 0 else f"e{-a}^-1" for a in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def exponent_sum(self, index: int) -> int:
        return sum(1 if a > 0 else -1 for a in self.letters if abs(a) == index)

    def runs(self) -> list:
        """Maximal runs as ``(index, exponent)`` pairs, e.g. e1 e1 e2^-1 -> [(1, 2), (2, -1)]."""
        out = []
        for a in self.letters:
            i, s = abs(a), (1 if a > 0 else -1)
            if out and out[-1][0] == i:
                out[-1][1] += s
            else:
                out.append([i, s])
        return [(i, e) for i, e in out]

    def to_json(self) -> dict:
        return {"rank": self.rank, "letters": [list(p) for p in self.pairs()]}

    @classmethod
    def from_json(cls, obj) -> "Word":
        try:
            rank = obj["rank"]
            letters = obj["letters"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"word literal needs 'rank' and 'letters': {obj!r}") from exc
        if not isinstance(rank, int) or isinstance(rank, bool):
            raise ValueError(f"word rank must be an integer, got {rank!r}")
        pairs = []
        for entry in letters:
            if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
                raise ValueError(f"letter must be a pair [index, sign], got {entry!r}")
            i, s = entry
            if s not in (1, -1):
                raise ValueError(f"letter sign must be 1 or -1, got {s!r}")
            pairs.append((i, s))
        return cls(rank, pairs)


def _normalize(letters: Iterable, rank: int) -> list:
    out = []
    for a in letters:
        if isinstance(a, tuple) or isinstance(a, list):
            i, s = a
            if s not in (1, -1):
                raise ValueError(f"letter sign must be +1 or -1, got {s!r}")
            a = i * s
        if not isinstance(a, int) or a == 0:
            raise ValueError(f"invalid letter {a!r}")
        if abs(a) > rank:
            raise ValueError(f"generator index {abs(a)} out of range 1..{rank}")
        out.append(a)
    return out


def _reduce_letters(letters: Sequence[int]) -> tuple:
    stack: list = []
    for a in letters:
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


def reduce(letters: Iterable, rank: int) -> Word:
    """Freely reduce a raw letter sequence."""
    return Word(rank, letters)


def _check_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} vs {v.rank}")


def invert(w: Word) -> Word:
    return Word._trusted(w.rank, tuple(-a for a in reversed(w.letters)))


def concat(u: Word, v: Word) -> Word:
    _check_rank(u, v)
    a, b = u.letters, v.letters
    # only the junction can cancel
    k = 0
    n = min(len(a), len(b))
    while k < n and a[len(a) - 1 - k] == -b[k]:
        k += 1
    return Word._trusted(u.rank, a[: len(a) - k] + b[k:])


def power(w: Word, k: int) -> Word:
    if k < 0:
        return power(invert(w), -k)
    result = Word.identity(w.rank)
    base = w
    while k:
        if k & 1:
            result = concat(result, base)
        k >>= 1
        if k:
            base = concat(base, base)
    return result


def commutator(u: Word, v: Word) -> Word:
    """The reduced commutator ``u v u^-1 v^-1``."""
    _check_rank(u, v)
    return concat(concat(u, v), concat(invert(u), invert(v)))


def conjugate(w: Word, h: Word) -> Word:
    """``h w h^-1``."""
    return concat(concat(h, w), invert(h))


def left_normed(exponents: Sequence, rank: int | None = None) -> Word:
    """Build ``[e_i1^a1, [e_i2^a2, ... [e_i(k-1)^a(k-1), e_ik^ak]...]]``.

    ``exponents`` is a sequence of ``(generator, exponent)`` pairs.  The rank
    defaults to the largest generator index used.
    """
    if len(exponents) < 2:
        raise ValueError("left_normed needs at least two entries")
    if rank is None:
        rank = max(i for i, _ in exponents)
    factors = [power(Word.generator(rank, i), a) for i, a in exponents]
    acc = factors[-1]
    for f in reversed(factors[:-1]):
        acc = commutator(f, acc)
    return acc


def word_length(w: Word) -> int:
    return len(w.letters)
