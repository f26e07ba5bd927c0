import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from milnorkit.freegroup import Word, commutator
from milnorkit.liecoalg import (
    Functional,
    GradedGenerators,
    Leaf,
    Node,
    UnsupportedTreeShape,
    apply_shuffle,
    coproduct,
    dual_basis_matrix,
    functional_degree,
    is_signed_identity,
    koszul_sign,
    left_normed_tree,
    leaves,
    pair,
    shuffle_functional_residual,
    shuffles,
    tree_degree,
    tree_from_json,
    tree_to_json,
)
from milnorkit.magnus import expand
from oracles import all_trees, tensor_expand


def pair_or_none(I, t, degrees):
    ctx = GradedGenerators(degrees)
    try:
        return pair(Functional(I, ctx), t)
    except UnsupportedTreeShape:
        return None


def ctx(*q):
    return GradedGenerators(q)


# -- examples --------------------------------------------------------------


def test_coproduct_examples():
    c = ctx(1, 2, 3)
    assert coproduct(Functional((1,), c)) == []
    [(pre, suf, sign)] = coproduct(Functional((1, 2), c))
    assert (pre.I, suf.I, sign) == ((1,), (2,), -1)
    terms = coproduct(Functional((1, 2, 3), c))
    assert [(p.I, s.I) for p, s, _ in terms] == [((1,), (2, 3)), ((1, 2), (3,))]
    # deg x_(1,2) = 1 + 2 - 1 = 2
    assert [sign for _, _, sign in terms] == [-1, 1]


def test_functional_degree():
    assert Functional((1, 2, 3), ctx(2, 2, 3)).degree == 5
    assert functional_degree((1, 1), (1,)) == 1


def test_koszul_sign_examples():
    assert koszul_sign((1,), (2,), (0, 1), (2, 2)) == 1
    # (q-1)(q-1) = 1 for q = 2, 2: one inversion
    assert koszul_sign((1,), (2,), (1, 0), (2, 2), "invariant") == -1
    assert koszul_sign((1,), (2,), (1, 0), (2, 2), "period") == -1
    for mask in shuffles(2, 2):
        assert koszul_sign((1, 2), (3, 4), mask, (1, 1, 1, 1), "period") == 1
        assert koszul_sign((1, 2), (3, 4), mask, (1, 1, 1, 1), "invariant") == 1
    with pytest.raises(ValueError):
        koszul_sign((1,), (2,), (1, 1), (1, 1))
    with pytest.raises(ValueError):
        koszul_sign((1,), (2,), (0, 1), (1, 1), "other")


def test_two_gradings_agree_in_parity():
    for q in itertools.product(range(1, 5), repeat=3):
        for mask in shuffles(2, 1):
            assert koszul_sign((1, 2), (3,), mask, q, "period") == koszul_sign(
                (1, 2), (3,), mask, q, "invariant"
            )


def test_pair_examples():
    c = ctx(1, 1, 1)
    assert pair(Functional((1,), c), Leaf(1)) == 1
    assert pair(Functional((1,), c), Leaf(2)) == 0
    assert abs(pair(Functional((1, 2, 3), c), left_normed_tree((1, 2, 3)))) == 1
    assert pair(Functional((1, 2, 3), c), tree_from_json([2, [1, 3]])) == 0


def test_pair_frozen_values():
    # frozen from the recursion; sign normalization pair(x_i, i) = +1
    assert pair(Functional((1, 2), ctx(1, 1)), Node(Leaf(1), Leaf(2))) == 1
    assert pair(Functional((2, 1), ctx(1, 1)), Node(Leaf(1), Leaf(2))) == -1
    assert pair(Functional((1, 2), ctx(2, 2)), Node(Leaf(1), Leaf(2))) == 1
    assert pair(Functional((1, 2, 3), ctx(2, 2, 3)), left_normed_tree((1, 2, 3))) == 1


def test_pair_errors():
    c = ctx(2, 2, 3)
    with pytest.raises(ValueError):
        pair(Functional((1, 2), c), Leaf(1))
    with pytest.raises(ValueError):
        pair(Functional((1,), c), Leaf(4))
    with pytest.raises(ValueError):
        Functional((), c)
    with pytest.raises(ValueError):
        GradedGenerators((0, 1))


def test_mixed_context_restricts_tree_shapes():
    c = ctx(1, 2, 2)
    assert pair(Functional((2, 3, 1), c), left_normed_tree((2, 3, 1))) in (1, -1)
    with pytest.raises(UnsupportedTreeShape):
        pair(Functional((1, 2, 3), c), Node(Node(Leaf(1), Leaf(2)), Leaf(3)))
    with pytest.raises(UnsupportedTreeShape):
        pair(Functional((1, 1, 2), ctx(1, 2)), left_normed_tree((1, 1, 2)))


def test_dual_basis_examples():
    assert len(dual_basis_matrix((2, 3))) == 1
    M = dual_basis_matrix((1, 1, 1))
    assert len(M) == 2 and is_signed_identity(M)
    M = dual_basis_matrix((2, 2, 3, 4))
    assert len(M) == 6 and is_signed_identity(M)
    with pytest.raises(ValueError):
        dual_basis_matrix((1,))


def test_shuffle_residual_examples():
    t = Node(Leaf(1), Leaf(2))
    for g in ("period", "invariant"):
        assert shuffle_functional_residual((1,), (2,), t, (1, 1), g) == (0, False)
    flagged = shuffle_functional_residual((1,), (2,), Leaf(1), (2, 2))
    assert flagged.degree_mismatch and flagged.value == 0
    for perm in itertools.permutations((1, 2, 3)):
        r = shuffle_functional_residual((1, 2), (3,), left_normed_tree(perm), (1, 1, 1))
        assert r == (0, False)


def test_tree_json_round_trip():
    obj = [1, [[2, 3], 4]]
    assert tree_to_json(tree_from_json(obj)) == obj
    for bad in ([1, 2, 3], "x", True):
        with pytest.raises(ValueError):
            tree_from_json(bad)


def test_apply_shuffle():
    assert apply_shuffle((1, 2), (3,), (0, 1, 0)) == (1, 3, 2)
    assert len(list(shuffles(2, 3))) == 10


# -- brute-force oracle ----------------------------------------------------


@pytest.mark.parametrize("degrees", list(itertools.product((1, 2, 3), repeat=3)) + [(2, 3, 2, 4), (1, 1, 1, 1), (4, 2, 2, 3)])
def test_pairing_matches_tensor_expansion(degrees):
    """pair(x_I, T) = eps(T) * coefficient of I in the commutator polynomial of T."""
    r = len(degrees)
    for perm in itertools.permutations(range(1, r + 1)):
        for t in all_trees(list(perm)):
            values = {I: pair_or_none(I, t, degrees) for I in itertools.permutations(range(1, r + 1))}
            if None in values.values():
                continue
            poly = tensor_expand(t, degrees)
            ratios = set()
            for I, v in values.items():
                c = poly.get(I, 0)
                assert (v == 0) == (c == 0), (degrees, t, I)
                if c:
                    ratios.add(v // c if v % c == 0 else None)
            assert len(ratios) <= 1 and None not in ratios


def test_pairing_matches_tensor_expansion_with_repeats():
    for degrees in [(2, 2), (2, 3), (3, 3)]:
        for leaves_ in [(1, 1, 2), (1, 2, 1), (2, 1, 1), (1, 1, 2, 2), (1, 2, 1, 2)]:
            for t in all_trees(list(leaves_)):
                poly = tensor_expand(t, degrees)
                vals = {I: pair(Functional(I, GradedGenerators(degrees)), t)
                        for I in set(itertools.permutations(leaves_))}
                ratios = {v // poly[I] for I, v in vals.items() if I in poly}
                assert len(ratios) <= 1
                assert all((v == 0) == (I not in poly) for I, v in vals.items())


def test_all_circles_pairing_matches_magnus():
    # classical case: x_I on a left-normed bracket equals the Magnus
    # coefficient of X_I in the group commutator
    for r in (2, 3, 4):
        c = GradedGenerators((1,) * r)
        for perm in itertools.permutations(range(1, r + 1)):
            w = Word.generator(r, perm[-1])
            for i in reversed(perm[:-1]):
                w = commutator(Word.generator(r, i), w)
            s = expand(w, r)
            t = left_normed_tree(perm)
            for I in itertools.permutations(range(1, r + 1)):
                assert pair(Functional(I, c), t) == s.coefficient(I)


# -- properties ------------------------------------------------------------


def test_coboundary_squares_to_zero():
    """The two three-part splittings of x_I cancel, i.e. d(d x_I) = 0."""
    for q in itertools.product((1, 2, 3), repeat=4):
        c = GradedGenerators(q)
        I = (1, 2, 3, 4)
        total = {}
        for pre, suf, s1 in coproduct(Functional(I, c)):
            # d(y (x) z) = dy (x) z + (-1)^deg y y (x) dz, bar sign absorbed in s1
            for a, b, s2 in coproduct(pre) if len(pre.I) > 1 else []:
                key = (a.I, b.I, suf.I)
                total[key] = total.get(key, 0) + s1 * s2
            if len(suf.I) > 1:
                for a, b, s2 in coproduct(suf):
                    e = -1 if pre.degree % 2 else 1
                    key = (pre.I, a.I, b.I)
                    total[key] = total.get(key, 0) + s1 * s2 * e
        assert all(v == 0 for v in total.values()), q


@given(st.lists(st.integers(2, 4), min_size=2, max_size=4))
@settings(max_examples=40, deadline=None)
def test_whitehead_antisymmetry(degrees):
    """x([b, a]) = (-1)^(kl) x([a, b]) for a of degree k and b of degree l."""
    degrees = tuple(degrees)
    c = GradedGenerators(degrees)
    r = len(degrees)
    idx = list(range(1, r + 1))
    for k in range(1, r):
        a, b = left_normed_tree(idx[:k]), left_normed_tree(idx[k:])
        da, db = tree_degree(a, degrees), tree_degree(b, degrees)
        sign = (-1) ** (da * db)
        for I in itertools.permutations(idx):
            x = Functional(I, c)
            assert pair(x, Node(a, b)) == sign * pair(x, Node(b, a))


@pytest.mark.parametrize("degrees", [(1, 1, 1, 1, 1), (2, 3, 2, 4, 1), (2, 2, 3, 3, 4), (3, 4, 2, 1, 1)])
def test_shuffle_relations_up_to_five(degrees):
    for r in range(2, 6):
        idx = list(range(1, r + 1))
        for perm in itertools.permutations(idx):
            t = left_normed_tree(perm)
            for k in range(1, r):
                for S in itertools.combinations(idx, k):
                    J = tuple(i for i in idx if i not in S)
                    assert shuffle_functional_residual(S, J, t, degrees).value == 0


@given(st.lists(st.integers(1, 4), min_size=2, max_size=5))
@settings(max_examples=30, deadline=None)
def test_dual_basis_signed_identity(degrees):
    assert is_signed_identity(dual_basis_matrix(tuple(degrees)))


def test_leaves_and_degree():
    t = tree_from_json([1, [2, 3]])
    assert leaves(t) == [1, 2, 3]
    assert tree_degree(t, (2, 2, 3)) == 5
