"""
MRF decompositions into slave subproblems.

Strategies:
- single: the whole model as one slave (model must be a forest)
- per_edge: one slave per edge, plus a singleton slave per isolated vertex
- rows_cols: one slave per grid row and per grid column (needs grid metadata)
- spanning_trees(k): k spanning forests, each built by Kruskal's rule
  preferring edges not yet covered

Potentials are split in equal fractions: a vertex (edge) appearing in c
slaves gives each of them phi_p / c (theta_e / c).
"""

import logging
import re
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import StrategyError
from .model import MrfModel

logger = logging.getLogger(__name__)

STRATEGIES = ('single', 'per_edge', 'rows_cols', 'spanning_trees')


@dataclass
class Slave:
    vertices: np.ndarray          # global vertex ids, ascending
    edges: np.ndarray             # global edge ids, ascending
    unary: np.ndarray             # (|V_m|, k)
    pairwise: np.ndarray          # (|E_m|, k, k)
    local_edges: np.ndarray       # (|E_m|, 2) endpoints in local vertex ids

    def model(self, n_labels: int, unary: Optional[np.ndarray] = None,
              pairwise: Optional[np.ndarray] = None) -> MrfModel:
        return MrfModel(len(self.vertices), n_labels,
                        self.unary if unary is None else unary,
                        self.local_edges,
                        self.pairwise if pairwise is None else pairwise)


@dataclass
class Decomposition:
    model: MrfModel
    strategy: str
    slaves: List[Slave]

    @property
    def vertex_counts(self) -> np.ndarray:
        counts = np.zeros(self.model.n_vertices, dtype=np.int64)
        for slave in self.slaves:
            counts[slave.vertices] += 1
        return counts

    @property
    def edge_counts(self) -> np.ndarray:
        counts = np.zeros(self.model.n_edges, dtype=np.int64)
        for slave in self.slaves:
            counts[slave.edges] += 1
        return counts

    def reconstruction_error(self, unaries=None, pairwises=None) -> float:
        """Max deviation of the summed slave potentials from the model's."""
        unaries = unaries or [s.unary for s in self.slaves]
        pairwises = pairwises or [s.pairwise for s in self.slaves]
        phi = np.zeros_like(self.model.unary)
        theta = np.zeros_like(self.model.pairwise)
        for slave, u, t in zip(self.slaves, unaries, pairwises):
            phi[slave.vertices] += u
            theta[slave.edges] += t
        err = np.max(np.abs(phi - self.model.unary), initial=0.0)
        return float(max(err, np.max(np.abs(theta - self.model.pairwise), initial=0.0)))


def _build(model: MrfModel, strategy: str, groups: List[tuple]) -> Decomposition:
    vertex_counts = np.zeros(model.n_vertices, dtype=np.int64)
    edge_counts = np.zeros(model.n_edges, dtype=np.int64)
    for vertices, edges in groups:
        vertex_counts[vertices] += 1
        edge_counts[edges] += 1
    if np.any(vertex_counts == 0) or np.any(edge_counts == 0):
        raise StrategyError(f"{strategy}: decomposition misses vertices or edges")

    slaves = []
    for vertices, edges in groups:
        vertices = np.array(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        edges = np.array(sorted(int(e) for e in edges), dtype=np.int64)
        local = {int(v): i for i, v in enumerate(vertices)}
        local_edges = np.array([[local[int(p)], local[int(q)]] for p, q in model.edges[edges]],
                               dtype=np.int64).reshape(-1, 2)
        unary = model.unary[vertices] / vertex_counts[vertices][:, None]
        pairwise = model.pairwise[edges] / edge_counts[edges][:, None, None]
        slaves.append(Slave(vertices, edges, unary, pairwise, local_edges))
    logger.debug(f"{strategy}: {len(slaves)} slaves")
    return Decomposition(model, strategy, slaves)


def _per_edge(model: MrfModel) -> List[tuple]:
    groups = [([int(p), int(q)], [e]) for e, (p, q) in enumerate(model.edges)]
    touched = set(model.edges.ravel().tolist())
    groups += [([v], []) for v in range(model.n_vertices) if v not in touched]
    return groups


def _rows_cols(model: MrfModel) -> List[tuple]:
    if model.grid is None:
        raise StrategyError("rows_cols needs grid metadata (GRID rows cols)")
    rows, cols = model.grid
    row_edges = [[] for _ in range(rows)]
    col_edges = [[] for _ in range(cols)]
    for e, (p, q) in enumerate(model.edges):
        (rp, cp), (rq, cq) = divmod(int(p), cols), divmod(int(q), cols)
        if rp == rq and abs(cp - cq) == 1:
            row_edges[rp].append(e)
        elif cp == cq and abs(rp - rq) == 1:
            col_edges[cp].append(e)
        else:
            raise StrategyError(f"rows_cols: edge {e} = ({p}, {q}) is not a grid edge")
    groups = [([r * cols + c for c in range(cols)], row_edges[r]) for r in range(rows)]
    groups += [([r * cols + c for r in range(rows)], col_edges[c]) for c in range(cols)]
    return groups


def _spanning_trees(model: MrfModel, k: int) -> List[tuple]:
    if k < 1:
        raise StrategyError("spanning_trees needs k >= 1")
    covered = np.zeros(model.n_edges, dtype=bool)
    groups = []
    while len(groups) < k or not covered.all():
        if len(groups) >= k:
            logger.warning(f"spanning_trees({k}) leaves edges uncovered; adding tree {len(groups) + 1}")
        order = [e for e in range(model.n_edges) if not covered[e]]
        order += [e for e in range(model.n_edges) if covered[e]]
        parent = list(range(model.n_vertices))

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        chosen = []
        for e in order:
            rp, rq = find(int(model.edges[e, 0])), find(int(model.edges[e, 1]))
            if rp != rq:
                parent[max(rp, rq)] = min(rp, rq)
                chosen.append(e)
        if not chosen and groups:
            break
        covered[chosen] = True
        groups.append((list(range(model.n_vertices)), chosen))
    return groups


def parse_strategy(strategy: str):
    """'spanning_trees(3)' -> ('spanning_trees', 3); others -> (name, None)."""
    match = re.fullmatch(r'\s*(\w+)\s*(?:\(\s*(\d+)\s*\))?\s*', strategy)
    if not match or match.group(1) not in STRATEGIES:
        raise StrategyError(f"unknown decomposition strategy {strategy!r}; expected one of {STRATEGIES}")
    k = int(match.group(2)) if match.group(2) else None
    return match.group(1), k


def decompose(model: MrfModel, strategy: str = 'rows_cols', k: Optional[int] = None) -> Decomposition:
    """
    Split ``model`` into slaves whose potentials sum back to the original.

    Args:
        model: MRF to decompose
        strategy: 'single', 'per_edge', 'rows_cols' or 'spanning_trees' (also 'spanning_trees(k)')
        k: Number of spanning trees (default 2)

    Returns:
        Decomposition
    """
    name, parsed_k = parse_strategy(strategy)
    k = k if k is not None else (parsed_k if parsed_k is not None else 2)
    if name == 'single':
        groups = [(list(range(model.n_vertices)), list(range(model.n_edges)))]
    elif name == 'per_edge':
        groups = _per_edge(model)
    elif name == 'rows_cols':
        groups = _rows_cols(model)
    else:
        groups = _spanning_trees(model, k)
    label = f"{name}({k})" if name == 'spanning_trees' else name
    return _build(model, label, groups)
