import numpy as np
import pytest

from conmat import CellComplex
from conmat.oracle import dense_homology

from conftest import (
    dense_boundary_by_dim,
    make_circle,
    make_interval_x,
    make_strip_and_hole,
    make_torus,
    random_simplicial,
)


def test_boundary_of_edge():
    X = make_interval_x()
    assert X.cell_boundary("e0") == {"v0": 1, "v1": 1}
    assert X.boundary({}) == {}
    assert X.boundary({"e0": 1, "e1": 1}) == {"v0": 1, "v2": 1}  # v1 cancels mod 2


def test_boundary_squared_zero_on_strip():
    _, K, _ = make_strip_and_hole()
    for cell in K.ids():
        assert K.boundary(K.cell_boundary(cell)) == {}


def test_boundary_unknown_cell():
    X = make_interval_x()
    with pytest.raises(KeyError, match="unknown cell"):
        X.boundary({"nope": 1})


def test_validate_examples():
    assert make_interval_x().validate().ok
    # condition 2: nonzero kappa between equal dimensions
    bad = CellComplex.build([("a", 0), ("b", 0)], {"a": [("b", 1)]})
    report = bad.validate()
    assert not report.ok
    assert "condition 2" in report.violations[0]
    assert "'a'" in report.violations[0] and "'b'" in report.violations[0]


def test_validate_dd_violation_gf3():
    # valid triangle over GF(3), then flip one sign so del o del != 0
    def triangle(sign):
        return CellComplex.build(
            [("a", 0), ("b", 0), ("c", 0), ("ab", 1), ("bc", 1), ("ac", 1), ("t", 2)],
            {
                "ab": [("a", 2), ("b", 1)],
                "bc": [("b", 2), ("c", 1)],
                "ac": [("a", 2), ("c", 1)],
                "t": [("bc", 1), ("ac", sign), ("ab", 1)],
            },
            p=3,
        )

    good = triangle(2)
    assert good.validate().ok
    bad = triangle(1)
    report = bad.validate()
    assert not report.ok and "condition 3" in report.violations[0]
    # dense matrix product oracle agrees
    for X, expect_zero in ((good, True), (bad, False)):
        D, _ = dense_boundary_by_dim(X)
        assert bool(((D @ D) % 3 == 0).all()) == expect_zero


def test_validation_report_truncates():
    # 250 condition-2 violations: every "face" has the same dimension
    cells = [("v%d" % i, 1) for i in range(250)] + [("w%d" % i, 1) for i in range(250)]
    boundary = {"w%d" % i: [("v%d" % i, 1)] for i in range(250)}
    report = CellComplex.build(cells, boundary).validate()
    assert len(report.violations) == 100
    assert report.truncated


def test_f_polynomial():
    X, K, _ = make_strip_and_hole()
    assert str(K.f_polynomial()) == "9 + 14t^1 + 4t^2"
    assert str(X.f_polynomial()) == "9 + 15t^1 + 6t^2"
    assert str(make_interval_x().f_polynomial()) == "3 + 2t^1"
    empty = CellComplex.build([], {})
    assert str(empty.f_polynomial()) == "0"


def test_poincare_polynomial():
    _, K, _ = make_strip_and_hole()
    assert str(K.poincare_polynomial()) == "t^1"
    point = CellComplex.build([("v", 0)], {})
    assert str(point.poincare_polynomial()) == "1"
    circle = make_circle()
    assert dense_homology(circle) == {0: 1, 1: 1}
    assert str(circle.poincare_polynomial()) == "1 + t^1"


def test_poincare_requires_valid_complex():
    bad = CellComplex.build([("a", 0), ("b", 0)], {"a": [("b", 1)]})
    with pytest.raises(ValueError, match="invalid complex"):
        bad.poincare_polynomial()


def test_euler_characteristic_matches_homology():
    for X in (make_interval_x(), make_circle(), make_torus(), make_strip_and_hole()[1]):
        betti = dense_homology(X)
        euler_h = sum(((-1) ** j) * b for j, b in betti.items())
        assert X.f_polynomial()(-1) == euler_h
        assert X.euler_characteristic() == X.poincare_polynomial()(-1)


def test_restrict_fiber_of_interval():
    X = make_interval_x()
    sub = X.restrict({"e0", "v1", "e1"})
    assert sorted(map(str, sub.ids())) == ["e0", "e1", "v1"]
    assert sub.cell_boundary("e0") == {"v1": 1}  # restricted kappa, not ambient del
    assert sub.validate().ok


def test_restrict_full_is_identity():
    X = make_interval_x()
    sub = X.restrict(set(X.ids()))
    assert sub.ids() == X.ids()
    assert all(sub.cell_boundary(c) == X.cell_boundary(c) for c in X.ids())


def test_restrict_non_convex_raises():
    _, K, _ = make_strip_and_hole()
    square = next(c for c in K.ids() if K.dim_of(c) == 2)
    vertex = sorted(K.closure(square), key=K.dim_of)[0]
    with pytest.raises(ValueError, match="not convex"):
        K.restrict({square, vertex})


@pytest.mark.parametrize("seed", range(6))
def test_convexity_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    _, K, _ = make_strip_and_hole()
    ids = K.ids()
    subset = {c for c in ids if rng.random() < 0.4}

    def brute_convex(S):
        for x in S:
            for y in S:
                between = K.star(x) & K.closure(y)
                if not between <= S:
                    return False
        return True

    assert K.is_convex(subset) == brute_convex(subset)


def test_restrict_down_set_is_chain_subcomplex():
    # ambient boundary of chains supported on a down-closed set stays inside it
    X, K, star = make_strip_and_hole()
    keep = set(X.ids()) - star  # complement of an up-set
    for c in keep:
        assert set(X.cell_boundary(c)) <= keep


def test_star_closure_top_cells():
    X = make_interval_x()
    assert X.star("v1") == {"v1", "e0", "e1"}
    assert X.closure("v0") == {"v0"}
    assert X.closure("e0") == {"v0", "v1", "e0"}
    assert X.top_cells() == {"e0", "e1"}
    with pytest.raises(KeyError):
        X.star("nope")


def test_top_cells_of_strips():
    X, K, _ = make_strip_and_hole()
    # the full strip's maximal cells are its six squares
    tops_x = X.top_cells()
    assert len(tops_x) == 6 and all(X.dim_of(c) == 2 for c in tops_x)
    # K keeps two edges that belonged only to the removed squares, so they
    # are maximal too: four squares plus two edges
    tops_k = K.top_cells()
    dims = sorted(K.dim_of(c) for c in tops_k)
    assert dims == [1, 1, 2, 2, 2, 2]


def test_explicit_face_relations_enter_the_order():
    X = CellComplex.build(
        [("a", 0), ("b", 1)],
        {},
        faces=[("a", "b")],  # face relation without incidence
    )
    assert X.star("a") == {"a", "b"}
    assert X.validate().ok
    bad = CellComplex.build([("a", 1), ("b", 0)], {}, faces=[("a", "b")])
    assert not bad.validate().ok  # dim not order-preserving on the pair


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        CellComplex.build([("a", 0), ("a", 0)], {})


def test_unknown_face_rejected():
    with pytest.raises(KeyError, match="unknown face"):
        CellComplex.build([("a", 1)], {"a": [("zzz", 1)]})


@pytest.mark.parametrize("seed,p", [(0, 2), (1, 3), (2, 5)])
def test_random_simplicial_valid(seed, p):
    X = random_simplicial(np.random.default_rng(seed), p=p)
    assert X.validate().ok
    # betti via oracle consistent with euler characteristic
    betti = dense_homology(X)
    assert X.f_polynomial()(-1) == sum(((-1) ** j) * b for j, b in betti.items())


def test_kappa_lookup():
    X = make_interval_x()
    assert X.kappa("e0", "v0") == 1
    assert X.kappa("e0", "v2") == 0
    assert X.kappa("e1", "v1") == 1
