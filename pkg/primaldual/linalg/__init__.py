"""Vectors, linear operators and spectral-norm estimation"""
from .linop import (
    DenseOp, GraphIncidence, IdentityOp, LinOp, NormEstimate, SparseOp, StackedOp,
    ZeroOp, as_vec, chain_graph, grid_graph, incidence_operator, power_iteration,
    start_vector,
)
