"""
Product-space stacking: reduce f + sum_m g_m(L_m x) + h to a single term
g(L x) with L = [L_1; ...; L_M] and g the separable sum of the g_m.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List

import numpy as np

from ..config import BLOCK_WORKERS
from ..linalg.linop import StackedOp, ZeroOp
from ..prox.calculus import Separable
from ..prox.functions import ZeroFn
from .problem import CompositeProblem, Term

logger = logging.getLogger(__name__)


def _block_map(workers: int):
    if workers <= 1:
        return map

    def threaded_map(fn, items):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # pool.map yields in submission order, so block order is preserved
            return list(pool.map(fn, items))

    return threaded_map


def stack_terms(problem: CompositeProblem, workers: int = BLOCK_WORKERS) -> CompositeProblem:
    """
    Rewrite a multi-term problem as an equivalent single-term one.

    Args:
        problem: Problem with M >= 0 terms
        workers: Threads for block prox evaluation (1 = sequential)

    Returns:
        Single-term CompositeProblem with the same objective
    """
    m = len(problem.terms)
    if m == 1:
        return problem
    if m == 0:
        term = Term(ZeroFn(), ZeroOp((1, problem.n)))
        return CompositeProblem(problem.n, problem.f, problem.h, [term])

    op = StackedOp([t.op for t in problem.terms])
    g = Separable([t.g for t in problem.terms], [t.op.rows for t in problem.terms],
                  map_fn=_block_map(workers))
    logger.debug(f"Stacked {m} terms into a {op.rows}x{op.cols} operator")
    return CompositeProblem(problem.n, problem.f, problem.h, [Term(g, op)])


def split_dual(problem: CompositeProblem, v: np.ndarray) -> List[np.ndarray]:
    """Per-term dual blocks of a stacked dual vector, in term order."""
    sizes = [t.op.rows for t in problem.terms]
    if len(sizes) <= 1:
        return [np.asarray(v)]
    return list(np.split(np.asarray(v), np.cumsum(sizes)[:-1]))
