"""Exact min-sum on trees and forests (two-pass message passing)."""

import logging
from typing import List, Tuple

import numpy as np

from ..errors import NotATreeError
from .model import MrfModel, energy

logger = logging.getLogger(__name__)


def _find(parent: List[int], u: int) -> int:
    while parent[u] != u:
        parent[u] = parent[parent[u]]
        u = parent[u]
    return u


def check_forest(model: MrfModel) -> None:
    parent = list(range(model.n_vertices))
    for e, (p, q) in enumerate(model.edges):
        rp, rq = _find(parent, int(p)), _find(parent, int(q))
        if rp == rq:
            raise NotATreeError(f"edge {e} = ({p}, {q}) closes a cycle")
        parent[max(rp, rq)] = min(rp, rq)


def tree_minsum(model: MrfModel) -> Tuple[np.ndarray, float]:
    """
    Exact minimizer of a tree-structured (or forest) MRF.

    Each component is rooted at its lowest vertex. Messages flow leaves to
    root, then labels are read back root to leaves; every argmin takes the
    lowest label among ties.

    Returns:
        (labeling, energy)

    Raises:
        NotATreeError: if the edge set contains a cycle
    """
    check_forest(model)
    n = model.n_vertices
    adjacency = [[] for _ in range(n)]
    for e, (p, q) in enumerate(model.edges):
        adjacency[p].append((int(q), e))
        adjacency[q].append((int(p), e))
    for neighbours in adjacency:
        neighbours.sort()

    visited = np.zeros(n, dtype=bool)
    parent = np.full(n, -1)
    parent_edge = np.full(n, -1)
    order = []
    for root in range(n):
        if visited[root]:
            continue
        visited[root] = True
        queue = [root]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            order.append(u)
            for w, e in adjacency[u]:
                if not visited[w]:
                    visited[w] = True
                    parent[w] = u
                    parent_edge[w] = e
                    queue.append(w)

    belief = model.unary.copy()
    choice = {}
    for u in reversed(order):
        if parent[u] < 0:
            continue
        e = parent_edge[u]
        # table[a_u, a_parent]
        table = model.pairwise[e] if model.edges[e, 0] == u else model.pairwise[e].T
        cost = belief[u][:, None] + table
        choice[u] = np.argmin(cost, axis=0)
        belief[parent[u]] += cost.min(axis=0)

    labeling = np.zeros(n, dtype=np.int64)
    for u in order:
        if parent[u] < 0:
            labeling[u] = int(np.argmin(belief[u]))
        else:
            labeling[u] = int(choice[u][labeling[parent[u]]])
    return labeling, energy(model, labeling)
