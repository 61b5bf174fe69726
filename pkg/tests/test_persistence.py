import math

import numpy as np
import pytest

from conmat import CellComplex, GradedComplex
from conmat.conley import connection_matrix
from conmat.oracle import dense_homology, dense_persistent_betti, induced_homology_map, oracle_rank
from conmat.order import chain_poset
from conmat.persistence import diagram_total_order, persistent_betti, verify_theorem_ph

from conftest import make_interval_graded, make_reduced_interval, random_graded

INF = math.inf


def make_filtered_interval():
    """The interval regraded along the chain 0 < 1 < 2 (a plain filtration)."""
    g = make_interval_graded()
    rho = {"p": 0, "r": 1, "q": 2}
    mu = {c: rho[v] for c, v in g.nu_map().items()}
    return GradedComplex(g.complex, chain_poset([0, 1, 2]), mu)


def down(k):
    return frozenset(range(k + 1))


def test_persistent_betti_filtration_values():
    g = make_filtered_interval()
    assert persistent_betti(g, down(0), down(1), 0) == 1
    assert persistent_betti(g, down(1), down(2), 0) == 1  # two components merge
    assert persistent_betti(g, down(0), down(2), 0) == 1
    assert persistent_betti(g, down(1), down(1), 0) == 2
    for j in (1, 2):
        for a in range(3):
            for b in range(a, 3):
                assert persistent_betti(g, down(a), down(b), j) == 0


def test_persistent_betti_equal_pair_is_homology():
    g = make_filtered_interval()
    for k in range(3):
        piece = g.filtered_piece(down(k))
        betti = dense_homology(piece)
        for j in range(2):
            assert persistent_betti(g, down(k), down(k), j) == betti.get(j, 0)


def test_persistent_betti_matches_oracle():
    g = make_filtered_interval()
    for a in range(3):
        for b in range(a, 3):
            for j in range(2):
                assert persistent_betti(g, down(a), down(b), j) == dense_persistent_betti(
                    g, down(a), down(b), j
                )


def test_persistent_betti_errors():
    g = make_filtered_interval()
    with pytest.raises(ValueError, match="contained"):
        persistent_betti(g, down(1), down(0), 0)
    with pytest.raises(ValueError, match="not a down-set"):
        persistent_betti(g, frozenset({1}), down(1), 0)


def test_persistent_betti_rank_bounds():
    g = make_filtered_interval()
    for a in range(3):
        for b in range(a, 3):
            for j in range(2):
                beta = persistent_betti(g, down(a), down(b), j)
                assert beta <= persistent_betti(g, down(a), down(a), j)
                assert beta <= persistent_betti(g, down(b), down(b), j)


def test_compositional_rank_identity():
    # beta^{a,c} equals the rank of the composite induced map through b
    instances = [make_filtered_interval()]
    for seed in range(4):
        instances.append(random_graded(np.random.default_rng(700 + seed), n_verts=6))
    for g in instances:
        lattice = g.poset.down_set_lattice()
        chains = [
            (a, b, c)
            for a in lattice
            for b in lattice
            for c in lattice
            if a <= b and b <= c
        ]
        rng = np.random.default_rng(1)
        for a, b, c in [chains[i] for i in rng.choice(len(chains), size=min(10, len(chains)), replace=False)]:
            for j in range(2):
                m_ab, _, _ = induced_homology_map(g, a, b, j)
                m_bc, _, _ = induced_homology_map(g, b, c, j)
                composite = (m_bc @ m_ab) % g.complex.p
                assert persistent_betti(g, a, c, j) == oracle_rank(composite, g.complex.p)


def test_diagram_interval_bars():
    g = make_filtered_interval()
    diagram = diagram_total_order(g, [0, 1, 2])
    # the complex is a contractible interval: one essential component, one
    # short-lived component, and no 1-dimensional classes at all
    assert diagram.bars() == [(0, 0, INF), (0, 1, 2)]
    assert diagram.bars(1) == []


def test_diagram_empty_and_point():
    empty = CellComplex.build([], {})
    g = GradedComplex(empty, chain_poset([0]), {})
    assert diagram_total_order(g, [0]).bars() == []
    point = CellComplex.build([("v", 0)], {})
    g = GradedComplex(point, chain_poset([0]), {"v": 0})
    assert diagram_total_order(g, [0]).bars() == [(0, 0, INF)]


def test_diagram_invalid_extension():
    g = make_filtered_interval()
    with pytest.raises(ValueError, match="linear extension"):
        diagram_total_order(g, [2, 1, 0])
    with pytest.raises(ValueError, match="linear extension"):
        diagram_total_order(g, [0, 1])


@pytest.mark.parametrize("seed", range(6))
def test_diagram_betti_consistency(seed):
    rng = np.random.default_rng(800 + seed)
    g = random_graded(rng, n_verts=6, p=[2, 3, 5][seed % 3])
    # pick a random linear extension: sort elements by down-set size with jitter
    elems = sorted(g.poset.elements, key=lambda e: (len(g.poset.principal_down_set(e)), rng.random()))
    assert g.poset.linear_extensions_ok(elems)
    diagram = diagram_total_order(g, elems)
    for s in range(len(elems)):
        for t in range(s, len(elems)):
            a, b = diagram.filtration[s], diagram.filtration[t]
            for j in range(3):
                assert diagram.betti(s, t, j) == persistent_betti(g, a, b, j)


def test_diagram_births_precede_deaths():
    for seed in range(4):
        g = random_graded(np.random.default_rng(900 + seed), n_verts=6)
        elems = sorted(g.poset.elements, key=lambda e: len(g.poset.principal_down_set(e)))
        for d, birth, death in diagram_total_order(g, elems).bars():
            assert birth < death


def test_verify_theorem_interval():
    report = verify_theorem_ph(make_filtered_interval())
    assert report.ok
    assert report.checked > 0


def test_verify_theorem_strict_input():
    report = verify_theorem_ph(make_reduced_interval())
    assert report.ok


def test_verify_theorem_vee_order():
    report = verify_theorem_ph(make_interval_graded())
    assert report.ok


@pytest.mark.parametrize("seed", range(10))
def test_verify_theorem_randomized(seed):
    rng = np.random.default_rng(2000 + seed)
    g = random_graded(rng, n_verts=6, p=[2, 3, 5][seed % 3])
    report = verify_theorem_ph(g)
    assert report.ok, report.mismatches


def test_verify_theorem_routes_through_conley_pieces():
    # the comparison really computes on the reduced complex's pieces
    g = make_filtered_interval()
    result = connection_matrix(g)
    assert result.complex.n < g.complex.n
    report = verify_theorem_ph(g, result=result)
    assert report.ok


def test_verify_theorem_with_supplied_pairs():
    g = make_filtered_interval()
    pairs = [(down(0), down(2))]
    report = verify_theorem_ph(g, pairs=pairs)
    assert report.ok
    assert report.checked == 2  # dims 0 and 1 for the one pair
