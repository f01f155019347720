"""Tests for MRF energies, tree min-sum, decompositions and dual decomposition."""

import itertools

import numpy as np
import pytest

from primaldual.errors import (
    DimensionError,
    InvalidLabelingError,
    InvalidParameterError,
    ModelTooLargeError,
    NotATreeError,
    StrategyError,
)
from primaldual.mrf import (
    DDSchedule,
    LocalAssignment,
    MrfModel,
    brute_force_opt,
    check_forest,
    check_labeling,
    check_local_polytope,
    decompose,
    denoising_model,
    energy,
    graphcut_solve,
    grid_model,
    is_submodular_binary,
    non_submodular_edges,
    parse_strategy,
    potts,
    solve_dual_decomposition,
    tree_minsum,
)


def random_tree(rng, n, k):
    edges = [(int(rng.integers(i)), i) for i in range(1, n)]
    return MrfModel(n, k, rng.uniform(-1, 1, (n, k)), edges, rng.uniform(-1, 1, (len(edges), k, k)))


def triangle(k=2):
    edges = [(0, 1), (1, 2), (0, 2)]
    return MrfModel(3, k, np.arange(3 * k, dtype=float).reshape(3, k), edges, np.zeros((3, k, k)))


# ============================================
# MODEL
# ============================================

def test_energy_examples(rng):
    single = MrfModel(1, 2, [[0.0, 5.0]], np.zeros((0, 2)), np.zeros((0, 2, 2)))
    assert energy(single, [0]) == 0.0
    assert energy(single, [1]) == 5.0

    zero = MrfModel(2, 2, np.zeros((2, 2)), [(0, 1)], np.zeros((1, 2, 2)))
    for z in itertools.product(range(2), repeat=2):
        assert energy(zero, list(z)) == 0.0

    chain = MrfModel(3, 3, rng.standard_normal((3, 3)), [(0, 1), (1, 2)], rng.standard_normal((2, 3, 3)))
    z = [2, 0, 1]
    by_hand = (chain.pairwise[1, 0, 1] + chain.pairwise[0, 2, 0]
               + chain.unary[2, 1] + chain.unary[1, 0] + chain.unary[0, 2])
    assert energy(chain, z) == pytest.approx(by_hand, abs=1e-12)


def test_model_validation():
    with pytest.raises(DimensionError):
        MrfModel(2, 2, np.zeros((2, 2)), [(0, 0)], np.zeros((1, 2, 2)))
    with pytest.raises(DimensionError):
        MrfModel(2, 2, np.zeros((2, 2)), [(0, 2)], np.zeros((1, 2, 2)))
    with pytest.raises(DimensionError):
        MrfModel(4, 2, np.zeros((4, 2)), np.zeros((0, 2)), np.zeros((0, 2, 2)), grid=(3, 2))
    with pytest.raises(InvalidParameterError):
        MrfModel(0, 2, np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2, 2)))


def test_check_labeling_errors():
    model = triangle()
    with pytest.raises(InvalidLabelingError):
        check_labeling(model, [0, 1])
    with pytest.raises(InvalidLabelingError):
        check_labeling(model, [0, 1, 2])
    with pytest.raises(InvalidLabelingError):
        check_labeling(model, [0.5, 0.0, 1.0])
    assert check_labeling(model, [1.0, 0.0, 1.0]).tolist() == [1, 0, 1]


def test_grid_model_layout():
    model = grid_model(3, 3, np.zeros((9, 2)), potts(2, 1.0))
    assert model.n_edges == 12
    assert model.grid == (3, 3)
    assert model.pairwise.shape == (12, 2, 2)
    assert potts(3, 2.0).tolist() == [[0, 2, 2], [2, 0, 2], [2, 2, 0]]


def test_brute_force_examples(rng):
    single = MrfModel(1, 3, [[2.0, -1.0, 0.5]], np.zeros((0, 2)), np.zeros((0, 3, 3)))
    assert brute_force_opt(single)[0].tolist() == [1]

    model = MrfModel(2, 2, [[0.0, 1.0], [1.0, 0.0]], [(0, 1)], [potts(2, 10.0)])
    labeling, value = brute_force_opt(model)
    assert labeling.tolist() == [0, 0]
    assert value == 1.0

    chain = random_tree(rng, 5, 3)
    _, best = brute_force_opt(chain)
    for _ in range(20):
        assert best <= energy(chain, rng.integers(0, 3, 5)) + 1e-12


def test_brute_force_limit():
    model = MrfModel(21, 2, np.zeros((21, 2)), np.zeros((0, 2)), np.zeros((0, 2, 2)))
    with pytest.raises(ModelTooLargeError):
        brute_force_opt(model)


def test_submodularity():
    attractive = MrfModel(2, 2, np.zeros((2, 2)), [(0, 1)], [potts(2, 3.0)])
    assert is_submodular_binary(attractive)
    repulsive = MrfModel(2, 2, np.zeros((2, 2)), [(0, 1)], [3.0 * np.eye(2)])
    assert not is_submodular_binary(repulsive)
    assert non_submodular_edges(repulsive) == [0]
    assert is_submodular_binary(MrfModel(2, 2, np.zeros((2, 2)), [(0, 1)], np.zeros((1, 2, 2))))
    with pytest.raises(InvalidParameterError):
        is_submodular_binary(triangle(k=3))


def test_local_polytope():
    model = triangle(k=3)
    exact = LocalAssignment.from_labeling(model, [0, 2, 1])
    assert check_local_polytope(exact) == []

    uniform = LocalAssignment(model, np.full((3, 3), 1 / 3), np.full((3, 3, 3), 1 / 9))
    assert check_local_polytope(uniform) == []

    exact.vertex[0, 0] += 0.1
    families = {family for family, _, _ in check_local_polytope(exact)}
    assert 'vertex_sum' in families and 'edge_tail' in families

    negative = LocalAssignment.from_labeling(model, [0, 0, 0])
    negative.edge[0, 1, 1] = -0.5
    negative.edge[0, 0, 0] = 1.5
    families = {family for family, _, _ in check_local_polytope(negative)}
    assert families == {'nonneg', 'edge_tail', 'edge_head'}


# ============================================
# TREE MIN-SUM
# ============================================

def test_tree_minsum_single_edge():
    model = MrfModel(2, 2, [[0.0, 2.0], [1.0, 0.0]], [(0, 1)], [[[3.0, 0.0], [0.0, 0.0]]])
    labeling, value = tree_minsum(model)
    assert labeling.tolist() == [0, 1]
    assert value == 0.0


def test_tree_minsum_decoupled_chain(rng):
    unary = rng.standard_normal((6, 4))
    chain = MrfModel(6, 4, unary, [(i, i + 1) for i in range(5)], np.zeros((5, 4, 4)))
    labeling, value = tree_minsum(chain)
    assert labeling.tolist() == np.argmin(unary, axis=1).tolist()
    assert value == pytest.approx(unary.min(axis=1).sum())


def test_tree_minsum_matches_brute_force(rng):
    for _ in range(200):
        model = random_tree(rng, int(rng.integers(1, 9)), int(rng.integers(1, 4)))
        labeling, value = tree_minsum(model)
        _, best = brute_force_opt(model)
        assert value == pytest.approx(best, abs=1e-10)
        assert energy(model, labeling) == pytest.approx(value, abs=1e-10)


def test_tree_minsum_handles_forests(rng):
    model = MrfModel(5, 2, rng.standard_normal((5, 2)), [(0, 1), (3, 4)], rng.standard_normal((2, 2, 2)))
    assert tree_minsum(model)[1] == pytest.approx(brute_force_opt(model)[1])


def test_cycle_is_rejected():
    with pytest.raises(NotATreeError):
        tree_minsum(triangle())
    with pytest.raises(NotATreeError):
        check_forest(triangle())


# ============================================
# DECOMPOSITION
# ============================================

def test_parse_strategy():
    assert parse_strategy('spanning_trees(3)') == ('spanning_trees', 3)
    assert parse_strategy('rows_cols') == ('rows_cols', None)
    with pytest.raises(StrategyError):
        parse_strategy('bogus')


def test_rows_cols_on_grid(rng):
    model = grid_model(3, 3, rng.standard_normal((9, 2)), potts(2, 1.0))
    decomposition = decompose(model, 'rows_cols')
    assert len(decomposition.slaves) == 6
    assert decomposition.edge_counts.tolist() == [1] * 12
    assert decomposition.vertex_counts.tolist() == [2] * 9
    assert decomposition.reconstruction_error() <= 1e-12
    for slave in decomposition.slaves:
        assert len(slave.vertices) == 3 and len(slave.edges) == 2


def test_rows_cols_needs_grid():
    with pytest.raises(StrategyError):
        decompose(triangle(), 'rows_cols')


def test_per_edge_on_triangle():
    model = triangle()
    decomposition = decompose(model, 'per_edge')
    assert len(decomposition.slaves) == 3
    assert decomposition.vertex_counts.tolist() == [2, 2, 2]
    first = decomposition.slaves[0]
    assert first.vertices.tolist() == [0, 1]
    assert np.allclose(first.unary, model.unary[[0, 1]] / 2)
    assert decomposition.reconstruction_error() <= 1e-12


def test_spanning_trees_cover_every_edge(rng):
    model = grid_model(3, 3, rng.standard_normal((9, 3)), potts(3, 0.5))
    decomposition = decompose(model, 'spanning_trees(2)')
    assert decomposition.strategy == 'spanning_trees(2)'
    assert len(decomposition.slaves) == 2
    assert decomposition.edge_counts.min() >= 1
    assert decomposition.reconstruction_error() <= 1e-12
    for slave in decomposition.slaves:
        check_forest(slave.model(model.n_labels))
    with pytest.raises(StrategyError):
        decompose(model, 'spanning_trees', k=0)


# ============================================
# DUAL DECOMPOSITION
# ============================================

def test_schedule_validation():
    with pytest.raises(ValueError):
        DDSchedule(gamma0=-1.0)
    with pytest.raises(ValueError):
        DDSchedule(decay=0.0)
    with pytest.raises(ValueError):
        DDSchedule(kind='constant')
    schedule = DDSchedule(kind='summable', decay=1.0)
    assert schedule.step(2.0, 1) == pytest.approx(0.5)
    assert DDSchedule(decay=1.0).step(2.0, 1) == pytest.approx(1.0)


def test_single_slave_on_tree_is_exact(rng):
    model = random_tree(rng, 7, 3)
    result = solve_dual_decomposition(model, decompose(model, 'single'))
    assert result.agreement
    assert result.iterations == 1
    assert result.best_dual == pytest.approx(brute_force_opt(model)[1])
    assert result.best_primal == pytest.approx(result.best_dual)


def test_dual_bound_below_optimum_every_iteration(rng):
    model = grid_model(2, 2, rng.uniform(0, 2, (4, 3)), rng.uniform(0, 1, (4, 3, 3)))
    _, optimum = brute_force_opt(model)
    result = solve_dual_decomposition(model, decompose(model, 'rows_cols'), max_iters=300)
    assert np.all(result.dual_values <= optimum + 1e-9)
    assert result.best_primal >= optimum - 1e-12
    assert list(result.to_frame().columns) == ['iter', 'dual', 'best_primal', 'disagreements']


def test_denoising_reaches_graphcut_optimum():
    noisy = np.zeros((3, 3), dtype=int)
    noisy[1, 1] = 1
    model = denoising_model(noisy, smoothness=0.3)
    _, optimum = graphcut_solve(model)
    assert optimum == pytest.approx(1.0)
    result = solve_dual_decomposition(model, decompose(model, 'rows_cols'), max_iters=2000)
    assert result.best_dual <= optimum + 1e-9
    assert result.best_dual >= optimum - 1e-4 * abs(optimum)
    assert result.labeling.tolist() == [0] * 9


def test_submodular_grid_bounds(rng):
    unary = rng.uniform(-1, 1, (9, 2))
    model = grid_model(3, 3, unary, potts(2, 0.6))
    _, optimum = graphcut_solve(model)
    for schedule in (DDSchedule(), DDSchedule(kind='summable')):
        result = solve_dual_decomposition(model, decompose(model, 'rows_cols'), schedule, max_iters=2000)
        assert result.best_dual <= optimum + 1e-9
        assert result.best_primal >= optimum - 1e-12
        if result.agreement:
            assert result.best_primal == pytest.approx(optimum)

    # the diminishing rule closes the gap on a submodular grid
    result = solve_dual_decomposition(model, decompose(model, 'rows_cols'), DDSchedule(), max_iters=2000)
    assert result.best_primal - result.best_dual <= 1e-4 * max(abs(result.best_primal), 1.0)


def test_bounds_meet_without_agreement():
    # star: two edges pull the center to label 1, the third edge is indifferent
    pull = np.array([[1.0, 1.0], [0.0, 0.0]])
    model = MrfModel(4, 2, np.zeros((4, 2)), [(0, 1), (0, 2), (0, 3)], [pull, pull, np.zeros((2, 2))])
    result = solve_dual_decomposition(model, decompose(model, 'per_edge'), max_iters=1)
    assert not result.agreement
    assert result.bounds_met and result.converged
    assert result.iterations == 1
    assert result.best_primal == result.best_dual == 0.0
    assert result.labeling.tolist() == [1, 0, 0, 0]


def test_threaded_slaves_match_serial(rng):
    model = grid_model(3, 3, rng.uniform(0, 1, (9, 3)), potts(3, 0.4))
    serial = solve_dual_decomposition(model, decompose(model, 'rows_cols'), max_iters=50, workers=1)
    threaded = solve_dual_decomposition(model, decompose(model, 'rows_cols'), max_iters=50, workers=4)
    assert np.array_equal(serial.dual_values, threaded.dual_values)
    assert np.array_equal(serial.labeling, threaded.labeling)


def test_decomposition_for_other_model_is_rejected(rng):
    model = random_tree(rng, 4, 2)
    other = random_tree(rng, 4, 2)
    with pytest.raises(StrategyError):
        solve_dual_decomposition(model, decompose(other, 'single'))
