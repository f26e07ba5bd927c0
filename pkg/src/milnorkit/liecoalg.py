"""Lie coalgebra functionals on wedges of spheres and their pairing with Whitehead products.

The wedge ``S^q1 v ... v S^qs`` is described by its degree vector.  A
functional ``x_I`` is indexed by a sequence ``I`` of wedge summands and has
degree ``sum q_i - (len(I) - 1)``.  Its coproduct splits ``I`` into a prefix
and a suffix, and iterating the Andrews--Arkowitz rule against a bracket
tree gives an integer pairing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import NamedTuple, Sequence, Union


class UnsupportedTreeShape(ValueError):
    """Raised for bracket shapes outside the proven range of the mixed-degree pairing."""


@dataclass(frozen=True)
class GradedGenerators:
    degrees: tuple

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        if not self.degrees:
            raise ValueError("need at least one sphere")
        if any(q < 1 for q in self.degrees):
            raise ValueError(f"sphere dimensions must be positive: {self.degrees}")

    @property
    def s(self) -> int:
        return len(self.degrees)

    def q(self, i: int) -> int:
        return self.degrees[i - 1]

    @property
    def mixed(self) -> bool:
        """True when circles and higher spheres both occur."""
        return 1 in self.degrees and any(q > 1 for q in self.degrees)


@dataclass(frozen=True)
class Functional:
    I: tuple
    context: GradedGenerators

    def __post_init__(self):
        object.__setattr__(self, "I", tuple(self.I))
        if not self.I:
            raise ValueError("functional needs a nonempty index sequence")
        for i in self.I:
            if not 1 <= i <= self.context.s:
                raise ValueError(f"index {i} outside 1..{self.context.s}")

    @property
    def degree(self) -> int:
        return functional_degree(self.I, self.context.degrees)


def functional_degree(I: Sequence[int], degrees: Sequence[int]) -> int:
    return sum(degrees[i - 1] for i in I) - (len(I) - 1)


# -- bracket trees ---------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Node:
    left: "Tree"
    right: "Tree"

    def __post_init__(self):
        # trees are cache keys; hashing recursively on every lookup is slow
        object.__setattr__(self, "_hash", hash((self.left, self.right)))

    def __hash__(self):
        return self._hash


Tree = Union[Leaf, Node]


def tree_degree(t: Tree, degrees: Sequence[int]) -> int:
    if isinstance(t, Leaf):
        return degrees[t.index - 1]
    return tree_degree(t.left, degrees) + tree_degree(t.right, degrees) - 1


def leaves(t: Tree) -> list:
    return list(_leaf_tuple(t))


@lru_cache(maxsize=4096)
def _leaf_tuple(t: Tree) -> tuple:
    if isinstance(t, Leaf):
        return (t.index,)
    return _leaf_tuple(t.left) + _leaf_tuple(t.right)


def left_normed_tree(indices: Sequence[int]) -> Tree:
    """``[i_1, [i_2, ... [i_(k-1), i_k]...]]``."""
    if not indices:
        raise ValueError("need at least one leaf")
    t: Tree = Leaf(indices[-1])
    for i in reversed(indices[:-1]):
        t = Node(Leaf(i), t)
    return t


def is_left_normed(t: Tree) -> bool:
    while isinstance(t, Node):
        if not isinstance(t.left, Leaf):
            return False
        t = t.right
    return True


def tree_from_json(obj) -> Tree:
    """Nested pairs with integer leaves, e.g. ``[1, [2, 3]]``."""
    if isinstance(obj, bool):
        raise ValueError("leaves must be integers")
    if isinstance(obj, int):
        return Leaf(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return Node(tree_from_json(obj[0]), tree_from_json(obj[1]))
    raise ValueError(f"bracket tree must be an integer or a pair, got {obj!r}")


def tree_to_json(t: Tree):
    if isinstance(t, Leaf):
        return t.index
    return [tree_to_json(t.left), tree_to_json(t.right)]


# -- coproduct and signs ---------------------------------------------------


def coproduct(x: Functional) -> list:
    """Terms ``(prefix, suffix, sign)`` of ``d x_I``, with ``sign = (-1)^deg(prefix)``."""
    I, degrees = x.I, x.context.degrees
    out = []
    for k in range(1, len(I)):
        prefix = Functional(I[:k], x.context)
        suffix = Functional(I[k:], x.context)
        sign = -1 if functional_degree(I[:k], degrees) % 2 else 1
        out.append((prefix, suffix, sign))
    return out


def shuffles(n: int, m: int):
    """All shuffles of lengths ``n`` and ``m`` as 0/1 masks (1 marks a slot taken from J)."""
    for slots in combinations(range(n + m), m):
        mask = [0] * (n + m)
        for s in slots:
            mask[s] = 1
        yield tuple(mask)


def apply_shuffle(I: Sequence[int], J: Sequence[int], mask: Sequence[int]) -> tuple:
    it_i, it_j = iter(I), iter(J)
    return tuple(next(it_j) if b else next(it_i) for b in mask)


def _check_shuffle(I, J, mask) -> None:
    if len(mask) != len(I) + len(J) or sum(mask) != len(J) or any(b not in (0, 1) for b in mask):
        raise ValueError(f"{mask!r} is not a shuffle of lengths {len(I)} and {len(J)}")


def koszul_sign(I: Sequence[int], J: Sequence[int], mask: Sequence[int],
                degrees: Sequence[int], grading: str = "period") -> int:
    """Koszul sign of a shuffle.

    ``grading="period"`` weighs each inverted pair by ``(q_i - 1)(q_j - 1)``;
    ``grading="invariant"`` by ``(q_i + 1)(q_j + 1)``.
    """
    _check_shuffle(I, J, mask)
    if grading == "period":
        shift = -1
    elif grading == "invariant":
        shift = 1
    else:
        raise ValueError(f"unknown grading {grading!r}")
    kappa = 0
    seen_j = []
    ii = jj = 0
    for b in mask:
        if b:
            seen_j.append(J[jj])
            jj += 1
        else:
            qi = degrees[I[ii] - 1] + shift
            kappa += sum(qi * (degrees[j - 1] + shift) for j in seen_j)
            ii += 1
    return -1 if kappa % 2 else 1


# -- pairing ---------------------------------------------------------------


def _check_shape(t: Tree, context: GradedGenerators) -> None:
    for i in leaves(t):
        if not 1 <= i <= context.s:
            raise ValueError(f"leaf {i} outside 1..{context.s}")
    if context.mixed:
        idx = leaves(t)
        if not is_left_normed(t) or len(set(idx)) != len(idx):
            raise UnsupportedTreeShape(
                "with both circles and higher spheres only left-normed brackets "
                "with distinct leaves are supported"
            )


@lru_cache(maxsize=None)
def _pair(I: tuple, t: Tree, degrees: tuple) -> int:
    if isinstance(t, Leaf):
        return 1 if I == (t.index,) else 0
    if len(I) < 2:
        return 0
    # pairing vanishes unless the leaf multisets agree
    if sorted(I) != sorted(_leaf_tuple(t)):
        return 0
    a, b = t.left, t.right
    ka, kb = tree_degree(a, degrees), tree_degree(b, degrees)
    swap = -1 if (ka * kb) % 2 else 1
    na = len(_leaf_tuple(a))
    nb = len(I) - na
    total = 0
    # only splits matching a subtree's leaf count can contribute
    for k in {na, nb}:
        P, S = I[:k], I[k:]
        c = -1 if functional_degree(P, degrees) % 2 else 1
        if k == na:
            total += c * swap * _pair(P, a, degrees) * _pair(S, b, degrees)
        if k == nb:
            total += c * _pair(P, b, degrees) * _pair(S, a, degrees)
    return total


def pair(x: Functional, t: Tree) -> int:
    """Value of the functional ``x_I`` on the iterated Whitehead product ``t``."""
    ctx = x.context
    _check_shape(t, ctx)
    if x.degree != tree_degree(t, ctx.degrees):
        raise ValueError(
            f"degree mismatch: functional has degree {x.degree}, "
            f"bracket has degree {tree_degree(t, ctx.degrees)}"
        )
    # only parities enter the signs, so normalize to share cache entries
    return _pair(x.I, t, tuple(2 - q % 2 for q in ctx.degrees))


def fixing_last(s: int) -> list:
    """Permutations of ``1..s`` fixing ``s``, in lexicographic order."""
    return [p + (s,) for p in permutations(range(1, s))]


def dual_basis_matrix(degrees: Sequence[int], s: int | None = None) -> list:
    """Matrix ``M[a][b] = x_{sigma_a}(iota_{sigma_b})`` over permutations fixing ``s``."""
    ctx = GradedGenerators(tuple(degrees))
    if s is None:
        s = ctx.s
    if s < 2 or s > ctx.s:
        raise ValueError(f"s must lie in 2..{ctx.s}")
    perms = fixing_last(s)
    return [[pair(Functional(p, ctx), left_normed_tree(r)) for r in perms] for p in perms]


def is_signed_identity(M: list) -> bool:
    return all(
        (abs(v) == 1) if i == j else (v == 0)
        for i, row in enumerate(M) for j, v in enumerate(row)
    )


class ShuffleResidual(NamedTuple):
    value: int
    degree_mismatch: bool


def shuffle_functional_residual(I: Sequence[int], J: Sequence[int], t: Tree,
                                degrees: Sequence[int], grading: str = "period") -> ShuffleResidual:
    """``sum_sigma (-1)^kappa(sigma) x_{sigma(I,J)}(t)``; vanishes by the shuffle relations."""
    ctx = GradedGenerators(tuple(degrees))
    I, J = tuple(I), tuple(J)
    _check_shape(t, ctx)
    if functional_degree(I + J, ctx.degrees) != tree_degree(t, ctx.degrees):
        return ShuffleResidual(0, True)
    total = 0
    for mask in shuffles(len(I), len(J)):
        total += koszul_sign(I, J, mask, ctx.degrees, grading) * _pair(
            apply_shuffle(I, J, mask), t, ctx.degrees
        )
    return ShuffleResidual(total, False)
