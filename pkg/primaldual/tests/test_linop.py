"""Tests for linear operators, power iteration and graph incidence."""

import numpy as np
import pytest

from primaldual.errors import DimensionError, InvalidParameterError, NonFiniteError
from primaldual.linalg.linop import (
    DenseOp,
    GraphIncidence,
    IdentityOp,
    SparseOp,
    StackedOp,
    ZeroOp,
    as_vec,
    chain_graph,
    grid_graph,
    incidence_operator,
    power_iteration,
    start_vector,
)
from primaldual.tests.oracles import jacobi_largest_singular_value


def test_power_iteration_matches_jacobi_oracle(rng):
    for _ in range(5):
        A = rng.standard_normal((6, 4))
        est = power_iteration(DenseOp(A), tol=1e-10)
        true = jacobi_largest_singular_value(A)
        assert est.converged
        assert est.sigma == pytest.approx(true, rel=1e-6)
        assert est.norm_bound >= true * (1 - 1e-12)
        assert true == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-10)


def test_power_iteration_is_deterministic(rng):
    op = DenseOp(rng.standard_normal((5, 7)))
    assert power_iteration(op, seed=3) == power_iteration(op, seed=3)


def test_seed_changes_start_not_estimate(rng):
    A = rng.standard_normal((6, 4))
    true = np.linalg.svd(A, compute_uv=False)[0]
    assert not np.allclose(start_vector(4, 0), start_vector(4, 123))
    assert np.linalg.norm(start_vector(4, 123)) == pytest.approx(1.0)

    op = DenseOp(A)
    first, second = op.estimate_norm(0), op.estimate_norm(123)
    assert first.sigma == pytest.approx(true, rel=1e-5)
    assert second.sigma == pytest.approx(true, rel=1e-5)
    assert op.estimate_norm(123) is second


def test_exact_norms():
    assert IdentityOp(5).norm_bound == 1.0
    assert ZeroOp((3, 4)).norm_bound == 0.0


def test_adjoint_identity(rng):
    ops = [
        DenseOp(rng.standard_normal((3, 4))),
        incidence_operator(chain_graph(4)),
        StackedOp([IdentityOp(4), DenseOp(rng.standard_normal((2, 4)))]),
    ]
    for op in ops:
        x = rng.standard_normal(op.cols)
        y = rng.standard_normal(op.rows)
        assert np.dot(op.apply(x), y) == pytest.approx(np.dot(x, op.adjoint(y)), abs=1e-12)
        assert np.allclose(op.to_dense() @ x, op.apply(x))


def test_apply_rejects_wrong_length():
    with pytest.raises(DimensionError):
        DenseOp(np.ones((2, 3))).apply(np.ones(2))
    with pytest.raises(DimensionError):
        DenseOp(np.ones((2, 3))).adjoint(np.ones(3))


def test_as_vec_validation():
    assert as_vec(2.0).tolist() == [2.0]
    with pytest.raises(NonFiniteError):
        as_vec([1.0, np.nan])
    with pytest.raises(DimensionError):
        as_vec([1.0, 2.0], size=3)


def test_stacked_split():
    op = StackedOp([IdentityOp(2), ZeroOp((3, 2))])
    assert op.shape == (5, 2)
    parts = op.split(np.arange(5.0))
    assert [p.tolist() for p in parts] == [[0.0, 1.0], [2.0, 3.0, 4.0]]


def test_incidence_rows():
    op = incidence_operator(GraphIncidence.from_edges(3, [(0, 1, 4.0), (1, 2, 1.0)]))
    expected = np.array([[2.0, -2.0, 0.0], [0.0, 1.0, -1.0]])
    assert isinstance(op, SparseOp)
    assert np.allclose(op.to_dense(), expected)
    assert np.allclose(op.apply(np.ones(3)), 0.0)


def test_incidence_errors():
    with pytest.raises(InvalidParameterError):
        incidence_operator(GraphIncidence.from_edges(2, [(1, 1, 1.0)]))
    with pytest.raises(InvalidParameterError):
        incidence_operator(GraphIncidence.from_edges(2, [(0, 1, -1.0)]))
    with pytest.raises(DimensionError):
        incidence_operator(GraphIncidence.from_edges(2, [(0, 2, 1.0)]))


def test_grid_graph_layout():
    graph = grid_graph(3, 3)
    assert graph.n_vertices == 9
    assert len(graph.edges) == 12
    assert graph.edges[0][:2] == (0, 1)
    assert graph.edges[6][:2] == (0, 3)


def test_incidence_norm_of_chain():
    # largest singular value of the path incidence is 2 cos(pi / (2n))
    op = incidence_operator(chain_graph(4))
    assert op.norm_estimate.sigma == pytest.approx(2 * np.cos(np.pi / 8), rel=1e-6)
