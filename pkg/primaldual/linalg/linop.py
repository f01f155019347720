"""
Linear Operators
================

Finite-dimensional vectors and linear maps with adjoints, the substrate for
every solver.

Realizations:
- DenseOp: explicit numpy matrix
- SparseOp: scipy.sparse CSR matrix (incidence matrices are always sparse)
- IdentityOp / ZeroOp: exact norms, no storage
- StackedOp: vertical stacking [L_1; ...; L_M] for product-space problems

Every operator carries ``norm_bound``, a certified upper bound on the spectral
norm used by the step-size guards.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..config import DEFAULT_SEED, POWER_ITERATION_MAX_ITER, POWER_ITERATION_TOL
from ..errors import DimensionError, InvalidParameterError, NonFiniteError

logger = logging.getLogger(__name__)


def as_vec(x, size: Optional[int] = None, name: str = 'vector') -> np.ndarray:
    """
    Convert input to a finite float64 vector.

    Args:
        x: Scalar, sequence or array
        size: Expected length (checked when given)
        name: Used in error messages

    Returns:
        1-D float64 array
    """
    vec = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    if not np.all(np.isfinite(vec)):
        raise NonFiniteError(f"{name} has non-finite entries")
    if size is not None and vec.size != size:
        raise DimensionError(f"{name} has length {vec.size}, expected {size}")
    return vec


@dataclass(frozen=True)
class NormEstimate:
    """Outcome of power iteration."""
    sigma: float            # lower estimate of the largest singular value
    norm_bound: float       # sigma inflated by (1 + 10 tol)
    iterations: int
    converged: bool


# ============================================
# OPERATOR BASE
# ============================================

class LinOp:
    """A linear map R^N -> R^K with its adjoint."""

    def __init__(self, shape: Tuple[int, int]):
        self.shape = (int(shape[0]), int(shape[1]))

    @property
    def rows(self) -> int:
        return self.shape[0]

    @property
    def cols(self) -> int:
        return self.shape[1]

    def _apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _adjoint(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.cols,):
            raise DimensionError(f"apply expects length {self.cols}, got {x.shape}")
        return self._apply(x)

    def adjoint(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.rows,):
            raise DimensionError(f"adjoint expects length {self.rows}, got {y.shape}")
        return self._adjoint(y)

    def to_dense(self) -> np.ndarray:
        """Materialize column by column (desk-scale operators only)."""
        out = np.zeros(self.shape)
        for j in range(self.cols):
            e = np.zeros(self.cols)
            e[j] = 1.0
            out[:, j] = self._apply(e)
        return out

    def estimate_norm(self, seed: int = DEFAULT_SEED) -> NormEstimate:
        """Spectral norm estimate started from ``seed``; cached per seed."""
        cache = self.__dict__.setdefault('_norm_estimates', {})
        if seed not in cache:
            estimate = self._estimate_norm(seed)
            if not estimate.converged:
                logger.warning(f"Power iteration did not converge for {self!r}; "
                               f"norm bound {estimate.norm_bound:.6g} is degraded")
            cache[seed] = estimate
        return cache[seed]

    def _estimate_norm(self, seed: int) -> NormEstimate:
        return power_iteration(self, seed=seed)

    @property
    def norm_estimate(self) -> NormEstimate:
        return self.estimate_norm()

    @property
    def norm_bound(self) -> float:
        return self.norm_estimate.norm_bound

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.rows}x{self.cols})"


class DenseOp(LinOp):
    def __init__(self, matrix):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteError("matrix has non-finite entries")
        super().__init__(matrix.shape)
        self.matrix = matrix

    def _apply(self, x):
        return self.matrix @ x

    def _adjoint(self, y):
        return self.matrix.T @ y

    def to_dense(self):
        return self.matrix.copy()


class SparseOp(LinOp):
    def __init__(self, matrix):
        matrix = sp.csr_matrix(matrix, dtype=np.float64)
        if not np.all(np.isfinite(matrix.data)):
            raise NonFiniteError("sparse matrix has non-finite entries")
        super().__init__(matrix.shape)
        self.matrix = matrix
        self._transpose = matrix.T.tocsr()

    def _apply(self, x):
        return self.matrix @ x

    def _adjoint(self, y):
        return self._transpose @ y

    def to_dense(self):
        return self.matrix.toarray()


class IdentityOp(LinOp):
    def __init__(self, n: int):
        super().__init__((n, n))

    def _apply(self, x):
        return x.copy()

    def _adjoint(self, y):
        return y.copy()

    def to_dense(self):
        return np.eye(self.rows)

    def _estimate_norm(self, seed: int) -> NormEstimate:
        return NormEstimate(1.0, 1.0, 0, True)


class ZeroOp(LinOp):
    def _apply(self, x):
        return np.zeros(self.rows)

    def _adjoint(self, y):
        return np.zeros(self.cols)

    def to_dense(self):
        return np.zeros(self.shape)

    def _estimate_norm(self, seed: int) -> NormEstimate:
        return NormEstimate(0.0, 0.0, 0, True)


class StackedOp(LinOp):
    """Vertical stack [L_1; ...; L_M] sharing one domain."""

    def __init__(self, blocks: Sequence[LinOp]):
        blocks = list(blocks)
        if not blocks:
            raise DimensionError("StackedOp needs at least one block")
        cols = {b.cols for b in blocks}
        if len(cols) != 1:
            raise DimensionError(f"stacked blocks disagree on domain size: {sorted(cols)}")
        self.blocks = blocks
        self.offsets = np.cumsum([0] + [b.rows for b in blocks])
        super().__init__((int(self.offsets[-1]), blocks[0].cols))

    def split(self, y: np.ndarray) -> List[np.ndarray]:
        return [y[self.offsets[m]:self.offsets[m + 1]] for m in range(len(self.blocks))]

    def _apply(self, x):
        return np.concatenate([b.apply(x) for b in self.blocks])

    def _adjoint(self, y):
        out = np.zeros(self.cols)
        for block, part in zip(self.blocks, self.split(y)):
            out += block.adjoint(part)
        return out

    def to_dense(self):
        return np.vstack([b.to_dense() for b in self.blocks])


# ============================================
# SPECTRAL NORM
# ============================================

def start_vector(n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Unit vector: all-ones plus a seeded Gaussian perturbation."""
    rng = np.random.default_rng(seed)
    v = np.ones(n) + 0.1 * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def power_iteration(
    op: LinOp,
    tol: float = POWER_ITERATION_TOL,
    max_iter: int = POWER_ITERATION_MAX_ITER,
    seed: int = DEFAULT_SEED
) -> NormEstimate:
    """
    Estimate the spectral norm of ``op`` by power iteration on L^T L.

    Starts from the all-ones vector perturbed by a seeded Gaussian vector, so
    the result is reproducible. Each iterate ||L v|| with ||v|| = 1 is a lower
    bound on the largest singular value; the reported ``norm_bound`` is that
    value times (1 + 10 tol).

    Args:
        op: Operator to measure
        tol: Relative accuracy target
        max_iter: Iteration cap; hitting it marks the estimate as degraded
        seed: Seed of the start perturbation

    Returns:
        NormEstimate
    """
    if tol <= 0:
        raise InvalidParameterError("power iteration tolerance must be positive")
    if op.cols == 0 or op.rows == 0:
        return NormEstimate(0.0, 0.0, 0, True)

    v = start_vector(op.cols, seed)

    sigma = 0.0
    best = 0.0
    for iteration in range(1, max_iter + 1):
        w = op.apply(v)
        sigma_new = float(np.linalg.norm(w))
        best = max(best, sigma_new)
        u = op.adjoint(w)
        u_norm = np.linalg.norm(u)
        if u_norm == 0.0:
            # v landed in the null space; with a generic start only the zero map does this
            return NormEstimate(best, best * (1 + 10 * tol), iteration, True)
        v = u / u_norm
        if iteration > 1 and abs(sigma_new - sigma) <= 0.01 * tol * sigma_new:
            return NormEstimate(best, best * (1 + 10 * tol), iteration, True)
        sigma = sigma_new

    return NormEstimate(best, best * (1 + 10 * tol), max_iter, False)


# ============================================
# GRAPH INCIDENCE
# ============================================

@dataclass(frozen=True)
class GraphIncidence:
    """Weighted graph; edge e = (p, q, w) yields the row sqrt(w) (x_p - x_q)."""
    n_vertices: int
    edges: Tuple[Tuple[int, int, float], ...]

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable) -> 'GraphIncidence':
        return cls(int(n_vertices), tuple((int(p), int(q), float(w)) for p, q, w in edges))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=np.float64)


def incidence_operator(graph: GraphIncidence) -> SparseOp:
    """
    Build Diag(sqrt(w)) A for the graph incidence matrix A.

    Args:
        graph: Vertex count and weighted edge list

    Returns:
        Sparse operator of shape (|E|, |V|)
    """
    rows, cols, vals = [], [], []
    for e, (p, q, w) in enumerate(graph.edges):
        if not (0 <= p < graph.n_vertices and 0 <= q < graph.n_vertices):
            raise DimensionError(f"edge {e} = ({p}, {q}) outside vertex range {graph.n_vertices}")
        if p == q:
            raise InvalidParameterError(f"edge {e} is a self-loop at vertex {p}")
        if not np.isfinite(w) or w < 0:
            raise InvalidParameterError(f"edge {e} has invalid weight {w}")
        root = np.sqrt(w)
        rows += [e, e]
        cols += [p, q]
        vals += [root, -root]
    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(len(graph.edges), graph.n_vertices))
    return SparseOp(matrix.tocsr())


def chain_graph(n: int, weights=1.0) -> GraphIncidence:
    weights = np.broadcast_to(np.asarray(weights, dtype=np.float64), (max(n - 1, 0),))
    return GraphIncidence.from_edges(n, [(i, i + 1, weights[i]) for i in range(n - 1)])


def grid_graph(rows: int, cols: int, weight: float = 1.0) -> GraphIncidence:
    """4-connected grid, vertex id r * cols + c, horizontal edges first."""
    edges = []
    for r in range(rows):
        for c in range(cols - 1):
            edges.append((r * cols + c, r * cols + c + 1, weight))
    for r in range(rows - 1):
        for c in range(cols):
            edges.append((r * cols + c, (r + 1) * cols + c, weight))
    return GraphIncidence.from_edges(rows * cols, edges)
