"""Forward-backward-forward primal-dual algorithm."""

from typing import Optional

from ..prox.calculus import prox_of_conjugate
from .base import PrimalDualSolver
from .problem import CompositeProblem, SolveResult, SolverConfig


class ForwardBackwardForwardSolver(PrimalDualSolver):
    """
    One iteration with constant step gamma:

        y1 = x - gamma (grad h(x) + L^T v)      y2 = v + gamma L x
        p1 = prox_{gamma f}(y1)                 p2 = prox_{gamma g*}(y2)
        q1 = p1 - gamma (grad h(p1) + L^T p2)   q2 = p2 + gamma L p1
        x <- x - y1 + q1                        v <- v - y2 + q2

    Four applications of L or L^T per iteration.
    """

    method = 'fbf'

    def step(self):
        gamma = self.config.gamma
        x, v = self.x, self.v
        y1 = x - gamma * (self.h.grad(x) + self.op.adjoint(v))
        y2 = v + gamma * self.op.apply(x)
        p1 = self.f.prox(y1, gamma)
        p2 = prox_of_conjugate(self.g, y2, gamma)
        q1 = p1 - gamma * (self.h.grad(p1) + self.op.adjoint(p2))
        q2 = p2 + gamma * self.op.apply(p1)
        self.x = x - y1 + q1
        self.v = v - y2 + q2


def solve_fbf(problem: CompositeProblem, config: Optional[SolverConfig] = None,
              x0=None, v0=None) -> SolveResult:
    return ForwardBackwardForwardSolver(problem, config, x0, v0).solve()
