"""
Shared iteration loop for the primal-dual solvers.
"""

import logging
from typing import Optional

import numpy as np

from ..errors import DivergenceError
from ..linalg.linop import as_vec
from .diagnostics import kkt_residual, primal_dual_objectives
from .guards import validate_config
from .problem import CompositeProblem, SolveResult, SolverConfig, SolveTrace
from .stacking import stack_terms

logger = logging.getLogger(__name__)


class PrimalDualSolver:
    """
    Base class: one subclass per algorithm implements ``step``.

    The original problem is stacked into a single term g(L x); ``self.v`` is
    the stacked dual variable. Subclasses update ``self.x`` and ``self.v`` in
    ``step`` and may set ``self.exact`` for finite termination.
    """

    method = ''

    def __init__(self, problem: CompositeProblem, config: Optional[SolverConfig] = None,
                 x0=None, v0=None):
        if config is None:
            config = SolverConfig(method=self.method)
        elif config.method != self.method:
            config = config.model_copy(update={'method': self.method})
        self.problem = problem
        self.stacked = stack_terms(problem)
        self.term = self.stacked.single_term()
        self.g = self.term.g
        self.op = self.term.op
        self.f = self.stacked.f
        self.h = self.stacked.h
        self.guard = validate_config(problem, config)
        self.config = self.guard.config

        n, k = self.stacked.n, self.op.rows
        self.x = np.zeros(n) if x0 is None else as_vec(x0, n, 'x0').copy()
        self.v = np.zeros(k) if v0 is None else as_vec(v0, k, 'v0').copy()
        self.exact = False
        self.degraded_steps = 0
        self.extras = {}

    def step(self) -> None:
        raise NotImplementedError

    def dual_estimate(self) -> np.ndarray:
        return self.v

    def _check_finite(self, iteration: int) -> None:
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.dual_estimate()))):
            raise DivergenceError(
                f"{self.method}: non-finite iterate at iteration {iteration} "
                f"(||L|| <= {self.guard.norm_bound:.6g}, beta = {self.guard.beta:.6g}, "
                f"steps {self.config.model_dump(include={'tau', 'sigma', 'gamma', 'mu', 'relaxation'})})")

    def _record(self, trace: SolveTrace, iteration: int, r_primal: float, r_dual: float,
                change: float) -> None:
        report = primal_dual_objectives(self.stacked, self.x, self.dual_estimate())
        trace.append(iteration, report.primal, report.dual, report.gap, r_primal, r_dual, change)

    def solve(self) -> SolveResult:
        cfg = self.config
        trace = SolveTrace()
        logger.info(f"{self.method}: N = {self.stacked.n}, K = {self.op.rows}, "
                    f"max_iters = {cfg.max_iters}, kkt_tol = {cfg.kkt_tol:g}")

        status = 'max_iters'
        iteration = 0
        r_primal = r_dual = float('nan')
        for iteration in range(1, cfg.max_iters + 1):
            x_prev, v_prev = self.x.copy(), self.dual_estimate().copy()
            self.step()
            self._check_finite(iteration)
            v = self.dual_estimate()
            change = float(np.sqrt(np.sum((self.x - x_prev) ** 2) + np.sum((v - v_prev) ** 2)))
            r_primal, r_dual = kkt_residual(self.stacked, self.x, v)
            scale = 1.0 + np.linalg.norm(self.x) + np.linalg.norm(v)

            if self.exact:
                status = 'exact'
            elif max(r_primal, r_dual) / scale <= cfg.kkt_tol:
                status = 'converged'
            finished = status != 'max_iters' or iteration == cfg.max_iters
            if finished or iteration % cfg.trace_stride == 0:
                self._record(trace, iteration, r_primal, r_dual, change)
            if iteration % 1000 == 0:
                logger.debug(f"{self.method}: iter {iteration}, r_primal = {r_primal:.3e}, "
                             f"r_dual = {r_dual:.3e}")
            if status != 'max_iters':
                break

        if status == 'max_iters':
            logger.warning(f"{self.method}: stopped at max_iters = {cfg.max_iters} "
                           f"(r_primal = {r_primal:.3e}, r_dual = {r_dual:.3e})")
        else:
            logger.info(f"{self.method}: {status} after {iteration} iterations "
                        f"(r_primal = {r_primal:.3e}, r_dual = {r_dual:.3e})")

        return SolveResult(
            x=self.x.copy(),
            v=self.dual_estimate().copy(),
            trace=trace,
            status=status,
            iterations=iteration,
            r_primal=r_primal,
            r_dual=r_dual,
            guard=self.guard,
            degraded_steps=self.degraded_steps,
            extras=self.extras,
        )
