"""
ADMM for f(x) + h(x) + g(L x) with f + h quadratic.

    x_n     = argmin_x f(x) + h(x) + (gamma/2) ||L x - y_n + z_n||^2
    s_n     = L x_n
    y_{n+1} = prox_{g/gamma}(z_n + s_n)
    z_{n+1} = z_n + s_n - y_{n+1}

gamma z_n estimates the dual variable.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.sparse.linalg import LinearOperator, cg

from ..config import ADMM_CG_TOL, ADMM_DENSE_LIMIT
from ..errors import SingularSubproblemError, UnsupportedStructureError
from .base import PrimalDualSolver
from .problem import CompositeProblem, SolveResult, SolverConfig

logger = logging.getLogger(__name__)


def quadratic_part(problem: CompositeProblem) -> Tuple[np.ndarray, np.ndarray]:
    """(Q, q) with f(x) + h(x) = x'Qx/2 - q'x + const."""
    n = problem.n
    f_form = problem.f.quadratic_form(n)
    h_form = problem.h.quadratic_form(n)
    if f_form is None or h_form is None:
        raise UnsupportedStructureError(
            f"ADMM x-update needs f + h quadratic; got f = {problem.f.name}, h = {problem.h.name}")
    return f_form[0] + h_form[0], f_form[1] + h_form[1]


class AdmmSolver(PrimalDualSolver):
    method = 'admm'

    def __init__(self, problem, config=None, x0=None, v0=None):
        super().__init__(problem, config, x0, v0)
        gamma = self.config.gamma
        self.quad, self.lin = quadratic_part(self.stacked)
        self.y = self.op.apply(self.x)
        self.z = self.v / gamma
        n = self.stacked.n

        if n <= ADMM_DENSE_LIMIT:
            dense = self.op.to_dense()
            system = gamma * dense.T @ dense + self.quad
            try:
                self.factor = cho_factor(system)
            except LinAlgError as exc:
                raise SingularSubproblemError(
                    f"ADMM x-update system (gamma L'L + Q) is singular: {exc}") from exc
            self.system = None
        else:
            self.factor = None
            self.system = LinearOperator(
                (n, n), matvec=lambda u: gamma * self.op.adjoint(self.op.apply(u)) + self.quad @ u)
            logger.info(f"admm: N = {n} > {ADMM_DENSE_LIMIT}, using conjugate gradients "
                        f"({self.config.inner_iters} inner iterations)")

    def dual_estimate(self):
        return self.config.gamma * self.z

    def _x_update(self) -> np.ndarray:
        gamma = self.config.gamma
        rhs = gamma * self.op.adjoint(self.y - self.z) + self.lin
        if self.factor is not None:
            return cho_solve(self.factor, rhs)
        x, info = cg(self.system, rhs, x0=self.x, rtol=ADMM_CG_TOL, maxiter=self.config.inner_iters)
        if info != 0:
            self.degraded_steps += 1
            logger.warning(f"admm: inner CG stopped without reaching {ADMM_CG_TOL:g} (info = {info})")
        return x

    def step(self):
        gamma = self.config.gamma
        self.x = self._x_update()
        s = self.op.apply(self.x)
        self.y = self.g.prox(self.z + s, 1.0 / gamma)
        self.z = self.z + s - self.y


def solve_admm(problem: CompositeProblem, config: Optional[SolverConfig] = None,
               x0=None, v0=None) -> SolveResult:
    return AdmmSolver(problem, config, x0, v0).solve()
