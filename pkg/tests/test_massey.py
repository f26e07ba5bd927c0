import pytest
import sympy

from milnorkit.massey import (
    Dga,
    MasseyObstruction,
    borromean_dual,
    borromean_fixture,
    coboundaries,
    cohomology,
    coefficient_extract,
    defining_system,
    exterior_algebra,
    free_cdga,
    is_exact,
    massey_degree,
    massey_product,
    same_class,
    system_residuals,
    validate_dga,
    vadd,
)


@pytest.fixture(scope="module")
def B():
    return borromean_fixture()


def xs(D, *names):
    return [D.basis_vector(n) for n in names]


def test_exterior_algebra_is_valid():
    E = exterior_algebra(1)
    assert validate_dga(E) == []
    assert len(cohomology(E, 1)) == 1
    assert cohomology(E, 5) == []


def test_planted_d_squared_violation():
    basis = [("a", 0), ("b", 1), ("c", 2)]
    D = Dga(basis, {0: {1: 1}, 1: {2: 1}}, {}, graded_commutative=False)
    v = [x for x in validate_dga(D) if x.kind == "d^2"]
    assert len(v) == 1 and v[0].elements == ("a",)


def test_planted_leibniz_violation():
    # unit with nonzero differential breaks Leibniz on 1*1
    basis = [("1", 0), ("t", 1)]
    D = Dga(basis, {0: {1: 1}}, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}})
    assert any(v.kind == "leibniz" for v in validate_dga(D))


def test_wrong_degree_rejected():
    with pytest.raises(ValueError):
        Dga([("a", 0), ("b", 2)], {0: {1: 1}}, {})


def test_borromean_fixture_valid(B):
    assert validate_dga(B) == []
    assert B.truncation == 3
    assert len(B) == 42


def test_borromean_h1(B):
    H = cohomology(B, 1)
    assert [B.format(c.representative) for c in H] == [[["x1", "1"]], [["x2", "1"]], [["x3", "1"]]]


def test_h1_dimension_matches_sympy_rank(B):
    d0 = sympy.Matrix(B.differential_matrix(0))
    d1 = sympy.Matrix(B.differential_matrix(1))
    n1 = len(B.in_degree(1))
    assert len(cohomology(B, 1)) == n1 - d1.rank() - d0.rank()
    n2 = len(B.in_degree(2))
    d2 = sympy.Matrix(B.differential_matrix(2))
    assert len(cohomology(B, 2)) == n2 - d2.rank() - d1.rank()


def test_cup_products_are_exact(B):
    x1, x2, x3 = xs(B, "x1", "x2", "x3")
    for u, v in [(x1, x2), (x2, x3), (x1, x3)]:
        assert is_exact(B, B.mul(u, v), 2)


@pytest.mark.parametrize("q,expected", [((1, 1), 2), ((1, 1, 1), 2), ((2, 2, 3), 6)])
def test_massey_degree(q, expected):
    assert massey_degree(q) == expected


def test_massey_degree_error():
    with pytest.raises(ValueError):
        massey_degree((1,))


def test_borromean_defining_system(B):
    sys = defining_system(B, xs(B, "x1", "x2", "x3"))
    assert B.format(sys.a[(1, 2)]) == [["y3", "-1"]]
    assert B.format(sys.a[(2, 3)]) == [["y1", "-1"]]
    assert all(not r for r in system_residuals(B, sys).values())


def test_borromean_triple_product(B):
    out = massey_product(B, xs(B, "x1", "x2", "x3"))
    assert out.status == "class" and out.nonzero
    assert out.degree == 2
    assert B.format(out.representative) == [["x1*y1", "1"], ["x3*y3", "-1"]]
    assert not B.d(out.representative)
    assert coefficient_extract(out, borromean_dual(B), B) == 1
    assert out.uniqueness_evidence == out.perturbations == 100


def test_perturbation_seed_is_recorded(B):
    a = massey_product(B, xs(B, "x1", "x2", "x3"), perturbations=5, seed=11)
    b = massey_product(B, xs(B, "x1", "x2", "x3"), perturbations=5, seed=11)
    assert a.seed == 11 and a.to_json(B) == b.to_json(B)


def test_cup_product_case(B):
    E = exterior_algebra(2)
    x1, x2 = xs(E, "x1", "x2")
    out = massey_product(E, [x1, x2], perturbations=3)
    # bar convention: <u, v> is represented by (-1)^|u| u v
    assert out.representative == E.mul({k: -c for k, c in x1.items()}, x2)
    assert out.nonzero


def test_obstructed_by_cup_product():
    E = exterior_algebra(3)
    out = massey_product(E, xs(E, "x1", "x2", "x3"))
    assert out.status == "obstructed"
    assert (out.obstruction.i, out.obstruction.j) == (1, 2)
    assert not is_exact(E, out.obstruction.cochain)
    with pytest.raises(MasseyObstruction):
        defining_system(E, xs(E, "x1", "x2", "x3"))
    with pytest.raises(ValueError):
        coefficient_extract(out, {}, E)


def test_non_closed_class_rejected(B):
    with pytest.raises(ValueError):
        massey_product(B, xs(B, "x1", "y1"))


def test_repeated_classes_allowed(B):
    out = massey_product(B, xs(B, "x1", "x1", "x2"), perturbations=10)
    assert out.status == "class"
    assert out.degree == massey_degree((1, 1, 1))
    assert not B.d(out.representative)


def test_zero_class_extracts_zero():
    E = exterior_algebra(2)
    x1 = E.basis_vector("x1")
    out = massey_product(E, [x1, x1], perturbations=0, seed=0)
    assert out.representative == {} and not out.nonzero
    assert coefficient_extract(out, E.basis_vector("x1*x2"), E) == 0


def test_other_triple_products_on_borromean(B):
    out = massey_product(B, xs(B, "x1", "x2", "x1"), perturbations=5)
    assert B.format(out.representative) == [["x1*y3", "-2"]]
    assert coefficient_extract(out, borromean_dual(B), B) == 0


def test_coefficient_extract_rejects_bad_functional(B):
    out = massey_product(B, xs(B, "x1", "x2", "x3"), perturbations=0)
    with pytest.raises(ValueError):
        coefficient_extract(out, B.basis_vector("x1*x2"), B)


def test_class_invariance_under_exact_shift(B):
    out = massey_product(B, xs(B, "x1", "x2", "x3"), perturbations=0)
    b = coboundaries(B, 2)[0]
    assert same_class(B, out.representative, vadd(out.representative, b), 2)


def test_json_round_trip(B):
    again = Dga.from_json(B.to_json())
    assert again.to_json() == B.to_json()
    with pytest.raises(ValueError):
        Dga.from_json({"basis": [{"name": "a"}]})


def test_free_cdga_polynomial_generator_needs_truncation():
    with pytest.raises(ValueError):
        free_cdga([("z", 2)], {})
    D = free_cdga([("z", 2), ("t", 1)], {}, truncation=4)
    assert validate_dga(D) == []
    assert "z*z" in D.names


def four_fold_model():
    gens = [(f"u{i}", 1) for i in range(1, 5)] + [
        (n, 1) for n in ("a12", "a23", "a34", "a13", "a24")
    ]
    diffs = {
        "a12": [(-1, ["u1", "u2"])],
        "a23": [(-1, ["u2", "u3"])],
        "a34": [(-1, ["u3", "u4"])],
        "a13": [(-1, ["a12", "u3"]), (-1, ["u1", "a23"])],
        "a24": [(-1, ["a23", "u4"]), (-1, ["u2", "a34"])],
    }
    return free_cdga(gens, diffs, truncation=3)


def test_four_fold_product():
    D = four_fold_model()
    assert validate_dga(D) == []
    out = massey_product(D, xs(D, "u1", "u2", "u3", "u4"), perturbations=10)
    assert out.status == "class" and out.nonzero
    assert out.degree == massey_degree((1, 1, 1, 1))
    assert D.format(out.representative) == [["u1*a24", "-1"], ["u4*a13", "1"], ["a12*a34", "-1"]]
    assert all(not r for r in system_residuals(D, out.system).values())
    # random shifts of the low primitives generally obstruct the next stage
    assert out.uniqueness_evidence + out.perturbation_failures == 10


def test_triple_product_obstruction_in_four_fold_model():
    D = four_fold_model()
    E = free_cdga([(f"u{i}", 1) for i in range(1, 4)] + [("a12", 1), ("a23", 1)],
                  {"a12": [(-1, ["u1", "u2"])], "a23": [(-1, ["u2", "u3"])]}, truncation=3)
    out = massey_product(E, xs(E, "u1", "u2", "u3"), perturbations=0)
    assert out.status == "class" and out.nonzero
    assert massey_product(D, xs(D, "u1", "u2", "u3"), perturbations=0).nonzero is False
