"""
Dual Decomposition
==================

Projected subgradient ascent on the sum of slave minima. Each iteration:
1. Solve every slave exactly with tree min-sum
2. Dual value = sum of slave minima (a lower bound on the optimal energy)
3. Move each slave's potentials toward agreement:
   phi^m_p += gamma_n (onehot(z^m_p) - mean over slaves containing p)
   (edges likewise); the moves sum to zero, so the splitting is preserved
4. Extract a primal labeling by per-vertex majority vote and keep the best
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator

from ..config import BLOCK_WORKERS, DD_DEFAULTS
from ..errors import DivergenceError, StrategyError
from .decomposition import Decomposition
from .model import MrfModel, energy
from .tree import tree_minsum

logger = logging.getLogger(__name__)

DD_TRACE_COLUMNS = ['iter', 'dual', 'best_primal', 'disagreements']


class DDSchedule(BaseModel):
    """gamma_n = gamma0 / (1 + n/n0) ('diminishing') or gamma0 / (1 + n/n0)^2 ('summable')."""

    model_config = ConfigDict(extra='forbid')

    kind: Literal['diminishing', 'summable'] = DD_DEFAULTS['schedule']
    gamma0: Optional[float] = None      # None: initial gap / (disagreements + 1)
    decay: float = DD_DEFAULTS['decay']

    @field_validator('gamma0', 'decay')
    @classmethod
    def positive(cls, value):
        if value is not None and not value > 0:
            raise ValueError("schedule parameters must be positive")
        return value

    def step(self, gamma0: float, n: int) -> float:
        ratio = 1.0 + n / self.decay
        return gamma0 / ratio if self.kind == 'diminishing' else gamma0 / ratio ** 2


@dataclass
class DDResult:
    labeling: np.ndarray
    best_primal: float
    best_dual: float
    agreement: bool
    iterations: int
    trace: List[dict] = field(default_factory=list)
    bounds_met: bool = False

    @property
    def converged(self) -> bool:
        return self.agreement or self.bounds_met

    @property
    def dual_values(self) -> np.ndarray:
        return np.array([r['dual'] for r in self.trace])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.trace, columns=DD_TRACE_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format='%.17g')


def _majority(model: MrfModel, decomposition: Decomposition, labelings) -> np.ndarray:
    votes = np.zeros((model.n_vertices, model.n_labels), dtype=np.int64)
    for slave, z in zip(decomposition.slaves, labelings):
        votes[slave.vertices, z] += 1
    return np.argmax(votes, axis=1)      # lowest label wins ties


def solve_dual_decomposition(
    model: MrfModel,
    decomposition: Decomposition,
    schedule: Optional[DDSchedule] = None,
    max_iters: int = DD_DEFAULTS['max_iters'],
    tol: float = 1e-9,
    workers: int = BLOCK_WORKERS
) -> DDResult:
    """
    Maximize the decomposition dual by projected subgradient.

    Args:
        model: MRF being minimized
        decomposition: Slaves with tree structure
        schedule: Step-size rule
        max_iters: Iteration cap
        tol: Stop when best primal - best dual <= tol (1 + |best primal|)
        workers: Threads for slave solves (results reduced in slave order)

    Returns:
        DDResult with the best labeling, both bounds and the trace

    Raises:
        NotATreeError: if a slave has a cycle
    """
    if decomposition.model is not model:
        raise StrategyError("decomposition was built for a different model")
    schedule = schedule or DDSchedule()
    slaves = decomposition.slaves
    k = model.n_labels
    unaries = [s.unary.copy() for s in slaves]
    pairwises = [s.pairwise.copy() for s in slaves]
    vertex_counts = decomposition.vertex_counts.astype(np.float64)
    edge_counts = decomposition.edge_counts.astype(np.float64)

    def solve_slave(m):
        return tree_minsum(slaves[m].model(k, unaries[m], pairwises[m]))

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    best_labeling, best_primal = None, np.inf
    best_dual = -np.inf
    gamma0 = schedule.gamma0
    trace = []
    agreement = bounds_met = False
    iteration = 0
    try:
        for iteration in range(max_iters):
            mapper = pool.map if pool is not None else map
            results = list(mapper(solve_slave, range(len(slaves))))
            labelings = [z for z, _ in results]
            dual = float(sum(value for _, value in results))
            best_dual = max(best_dual, dual)

            # indicator averages over the slaves sharing each vertex / edge
            vertex_mean = np.zeros((model.n_vertices, k))
            edge_mean = np.zeros((model.n_edges, k, k))
            onehots = []
            for slave, z in zip(slaves, labelings):
                x_v = np.zeros((len(slave.vertices), k))
                x_v[np.arange(len(z)), z] = 1.0
                x_e = np.zeros((len(slave.edges), k, k))
                if len(slave.edges):
                    le = slave.local_edges
                    x_e[np.arange(len(slave.edges)), z[le[:, 0]], z[le[:, 1]]] = 1.0
                vertex_mean[slave.vertices] += x_v
                edge_mean[slave.edges] += x_e
                onehots.append((x_v, x_e))
            vertex_mean /= vertex_counts[:, None]
            if model.n_edges:
                edge_mean /= edge_counts[:, None, None]

            disagreements = int(np.sum(np.max(vertex_mean, axis=1) < 1.0 - 1e-12))
            candidate = _majority(model, decomposition, labelings)
            value = energy(model, candidate)
            if value < best_primal:
                best_primal, best_labeling = value, candidate

            trace.append({'iter': iteration, 'dual': dual, 'best_primal': best_primal,
                          'disagreements': disagreements})

            if disagreements == 0:
                agreement = True
                logger.info(f"Dual decomposition: slaves agree at iteration {iteration}")
                break
            if best_primal - best_dual <= tol * (1.0 + abs(best_primal)):
                bounds_met = True
                logger.info(f"Dual decomposition: bounds meet at iteration {iteration}")
                break

            if gamma0 is None:
                gamma0 = (best_primal - dual) / (disagreements + 1)
            gamma = schedule.step(gamma0, iteration)

            for m, (slave, (x_v, x_e)) in enumerate(zip(slaves, onehots)):
                unaries[m] = unaries[m] + gamma * (x_v - vertex_mean[slave.vertices])
                if len(slave.edges):
                    pairwises[m] = pairwises[m] + gamma * (x_e - edge_mean[slave.edges])

            drift = decomposition.reconstruction_error(unaries, pairwises)
            if drift > DD_DEFAULTS['splitting_tol']:
                raise DivergenceError(f"splitting constraint drifted by {drift:.3e} at iteration {iteration}")
            if iteration % 100 == 0:
                logger.debug(f"DD iter {iteration}: dual {dual:.6g}, best primal {best_primal:.6g}, "
                             f"{disagreements} disagreements, step {gamma:.3g}")
    finally:
        if pool is not None:
            pool.shutdown()

    logger.info(f"Dual decomposition: best primal {best_primal:.6g}, best dual {best_dual:.6g}, "
                f"{iteration + 1} iterations")
    return DDResult(best_labeling, float(best_primal), float(best_dual), agreement, iteration + 1, trace,
                    bounds_met)
