"""Shared fixtures: the regression problems used across solver tests."""

import numpy as np
import pytest

from primaldual.linalg.linop import DenseOp, IdentityOp, chain_graph, incidence_operator
from primaldual.prox.functions import IND_NONNEG, L1Norm, LeastSquares, SquaredDistance, ZeroFn, ZeroSmooth
from primaldual.solvers.problem import CompositeProblem, Term

LASSO_LAMBDA = 0.5
TV_LAMBDA = 0.4
TV_Y = np.array([1.0, 1.2, -0.5, 0.3])
NNQ_Y = np.array([1.5, -0.7, 0.2, -2.0])


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope='session')
def lasso_data():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((5, 8))
    b = rng.standard_normal(5)
    return A, b


@pytest.fixture
def lasso_problem(lasso_data):
    A, b = lasso_data
    return CompositeProblem(8, ZeroFn(), LeastSquares(A, b), [Term(L1Norm(LASSO_LAMBDA), IdentityOp(8))])


@pytest.fixture
def lasso_split_problem(lasso_data):
    """The same LASSO with the data fit moved into a term, so its dual is closed-form."""
    A, b = lasso_data
    terms = [Term(SquaredDistance(1.0, b), DenseOp(A)), Term(L1Norm(LASSO_LAMBDA), IdentityOp(8))]
    return CompositeProblem(8, ZeroFn(), ZeroSmooth(), terms)


@pytest.fixture
def tv_problem():
    op = incidence_operator(chain_graph(4))
    return CompositeProblem(4, ZeroFn(), SquaredDistance(1.0, TV_Y), [Term(L1Norm(TV_LAMBDA), op)])


@pytest.fixture
def nnq_problem():
    return CompositeProblem(4, ZeroFn(), SquaredDistance(1.0, NNQ_Y), [Term(IND_NONNEG(), IdentityOp(4))])
