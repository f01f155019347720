"""
Pairwise MRF Models
===================

Energy E(z) = sum_p phi_p(z_p) + sum_{e=(p,q)} theta_e(z_p, z_q) with
unary tables phi (V x k) and pairwise tables theta (E x k x k), where
theta[e, a, b] is the cost of z_p = a, z_q = b for edge e = (p, q).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from ..config import BRUTE_FORCE_LIMIT, FEASIBILITY_TOL
from ..errors import (
    DimensionError,
    InvalidLabelingError,
    InvalidParameterError,
    ModelTooLargeError,
    NonFiniteError,
)
from ..linalg.linop import grid_graph

logger = logging.getLogger(__name__)


@dataclass
class MrfModel:
    n_vertices: int
    n_labels: int
    unary: np.ndarray                  # (V, k)
    edges: np.ndarray                  # (E, 2) int
    pairwise: np.ndarray               # (E, k, k)
    grid: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        self.n_vertices = int(self.n_vertices)
        self.n_labels = int(self.n_labels)
        if self.n_vertices < 1 or self.n_labels < 1:
            raise InvalidParameterError("an MRF needs at least one vertex and one label")
        self.unary = np.asarray(self.unary, dtype=np.float64).reshape(self.n_vertices, self.n_labels)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.pairwise = np.asarray(self.pairwise, dtype=np.float64).reshape(
            len(self.edges), self.n_labels, self.n_labels)
        if not (np.all(np.isfinite(self.unary)) and np.all(np.isfinite(self.pairwise))):
            raise NonFiniteError("MRF potentials must be finite")
        if self.edges.size and (self.edges.min() < 0 or self.edges.max() >= self.n_vertices):
            raise DimensionError(f"edge endpoint outside vertex range {self.n_vertices}")
        loops = np.nonzero(self.edges[:, 0] == self.edges[:, 1])[0]
        if loops.size:
            raise DimensionError(f"edges {loops.tolist()} are self-loops")
        if self.grid is not None:
            rows, cols = self.grid
            if rows * cols != self.n_vertices:
                raise DimensionError(f"grid {rows}x{cols} does not match {self.n_vertices} vertices")
            self.grid = (int(rows), int(cols))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def with_unary(self, unary: np.ndarray) -> 'MrfModel':
        return MrfModel(self.n_vertices, self.n_labels, unary, self.edges, self.pairwise, self.grid)


def check_labeling(model: MrfModel, labeling) -> np.ndarray:
    z = np.asarray(labeling)
    if z.shape != (model.n_vertices,):
        raise InvalidLabelingError(f"labeling has shape {z.shape}, expected ({model.n_vertices},)")
    if not np.issubdtype(z.dtype, np.integer):
        if not np.all(z == np.round(z)):
            raise InvalidLabelingError("labels must be integers")
        z = z.astype(np.int64)
    if z.size and (z.min() < 0 or z.max() >= model.n_labels):
        raise InvalidLabelingError(f"labels must lie in [0, {model.n_labels})")
    return z


def energy(model: MrfModel, labeling) -> float:
    z = check_labeling(model, labeling)
    value = float(model.unary[np.arange(model.n_vertices), z].sum())
    if model.n_edges:
        p, q = model.edges[:, 0], model.edges[:, 1]
        value += float(model.pairwise[np.arange(model.n_edges), z[p], z[q]].sum())
    return value


def brute_force_opt(model: MrfModel, limit: int = BRUTE_FORCE_LIMIT) -> Tuple[np.ndarray, float]:
    """
    Exhaustive minimizer; ties go to the lexicographically smallest labeling.

    Raises:
        ModelTooLargeError: when |L|^|V| exceeds ``limit``
    """
    k, n = model.n_labels, model.n_vertices
    total = k ** n
    if total > limit:
        raise ModelTooLargeError(f"{k}^{n} = {total} labelings exceeds the limit {limit}")

    index = np.arange(total)
    # vertex 0 is the most significant digit, so index order is lexicographic order
    labels = np.empty((n, total), dtype=np.int64)
    for p in range(n):
        labels[p] = (index // k ** (n - 1 - p)) % k
    values = np.zeros(total)
    for p in range(n):
        values += model.unary[p, labels[p]]
    for e, (p, q) in enumerate(model.edges):
        values += model.pairwise[e, labels[p], labels[q]]
    best = int(np.argmin(values))
    return labels[:, best].copy(), float(values[best])


def is_submodular_binary(model: MrfModel) -> bool:
    return not non_submodular_edges(model)


def non_submodular_edges(model: MrfModel) -> List[int]:
    """Edges violating theta(0,0) + theta(1,1) <= theta(0,1) + theta(1,0)."""
    if model.n_labels != 2:
        raise InvalidParameterError(f"submodularity is defined here for 2 labels, got {model.n_labels}")
    t = model.pairwise
    excess = t[:, 0, 0] + t[:, 1, 1] - t[:, 0, 1] - t[:, 1, 0]
    return [int(e) for e in np.nonzero(excess > 1e-12)[0]]


# ============================================
# LOCAL POLYTOPE
# ============================================

@dataclass
class LocalAssignment:
    """Vertex marginals x_p(.) and edge marginals x_e(., .) of the MRF ILP."""
    model: MrfModel
    vertex: np.ndarray                 # (V, k)
    edge: np.ndarray                   # (E, k, k)
    slave_labelings: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def from_labeling(cls, model: MrfModel, labeling) -> 'LocalAssignment':
        z = check_labeling(model, labeling)
        vertex = np.zeros((model.n_vertices, model.n_labels))
        vertex[np.arange(model.n_vertices), z] = 1.0
        edge = np.zeros((model.n_edges, model.n_labels, model.n_labels))
        if model.n_edges:
            edge[np.arange(model.n_edges), z[model.edges[:, 0]], z[model.edges[:, 1]]] = 1.0
        return cls(model, vertex, edge)


def check_local_polytope(assignment: LocalAssignment) -> List[Tuple[str, int, float]]:
    """
    Violations of the local-polytope constraints, as (family, index, amount).

    Families: 'vertex_sum' (sum_l x_p(l) = 1), 'edge_tail' (sum_b x_e(a, b) =
    x_p(a)), 'edge_head' (sum_a x_e(a, b) = x_q(b)) and 'nonneg'.
    """
    model = assignment.model
    vertex = np.asarray(assignment.vertex, dtype=np.float64)
    edge = np.asarray(assignment.edge, dtype=np.float64)
    if vertex.shape != (model.n_vertices, model.n_labels):
        raise DimensionError(f"vertex marginals have shape {vertex.shape}")
    if edge.shape != (model.n_edges, model.n_labels, model.n_labels):
        raise DimensionError(f"edge marginals have shape {edge.shape}")

    violations = []
    sums = vertex.sum(axis=1)
    for p in np.nonzero(np.abs(sums - 1.0) > FEASIBILITY_TOL)[0]:
        violations.append(('vertex_sum', int(p), float(sums[p] - 1.0)))
    for e, (p, q) in enumerate(model.edges):
        tail = np.max(np.abs(edge[e].sum(axis=1) - vertex[p]))
        if tail > FEASIBILITY_TOL:
            violations.append(('edge_tail', e, float(tail)))
        head = np.max(np.abs(edge[e].sum(axis=0) - vertex[q]))
        if head > FEASIBILITY_TOL:
            violations.append(('edge_head', e, float(head)))
    if np.any(vertex < -FEASIBILITY_TOL) or np.any(edge < -FEASIBILITY_TOL):
        violations.append(('nonneg', -1, float(min(vertex.min(), edge.min(initial=0.0)))))
    return violations


# ============================================
# BUILDERS
# ============================================

def grid_model(rows: int, cols: int, unary, pairwise) -> MrfModel:
    """
    Grid MRF on the 4-connected grid (vertex r * cols + c).

    ``pairwise`` is one k x k table shared by all edges or an (E, k, k) array.
    """
    unary = np.asarray(unary, dtype=np.float64).reshape(rows * cols, -1)
    k = unary.shape[1]
    graph = grid_graph(rows, cols)
    edges = np.array([(p, q) for p, q, _ in graph.edges], dtype=np.int64).reshape(-1, 2)
    pairwise = np.asarray(pairwise, dtype=np.float64)
    if pairwise.shape == (k, k):
        pairwise = np.broadcast_to(pairwise, (len(edges), k, k)).copy()
    return MrfModel(rows * cols, k, unary, edges, pairwise, grid=(rows, cols))


def potts(n_labels: int, weight: float) -> np.ndarray:
    return weight * (1.0 - np.eye(n_labels))


def denoising_model(noisy, smoothness: float = 1.0, data_weight: float = 1.0) -> MrfModel:
    """
    Binary denoising: cost data_weight for disagreeing with the noisy pixel,
    Potts smoothness between 4-neighbours.
    """
    noisy = np.asarray(noisy).astype(np.int64)
    if noisy.ndim != 2 or not np.all((noisy == 0) | (noisy == 1)):
        raise InvalidParameterError("noisy image must be a 2-D 0/1 array")
    rows, cols = noisy.shape
    flat = noisy.ravel()
    unary = np.stack([data_weight * (flat != 0), data_weight * (flat != 1)], axis=1).astype(np.float64)
    return grid_model(rows, cols, unary, potts(2, smoothness))
