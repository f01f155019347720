"""
Projection-based primal-dual algorithm (iterative projections onto
half-spaces containing the Kuhn-Tucker set).

Needs the prox of f + h in closed form:
- h = 0: prox of f
- h = (w/2)||x - y||^2: folded into the prox of f
- f = 0 and h quadratic: one linear solve
"""

import logging
from typing import Callable, Optional

import numpy as np

from ..errors import UnsupportedStructureError
from ..prox.functions import SquaredDistance, ZeroFn, ZeroSmooth
from .base import PrimalDualSolver
from .problem import CompositeProblem, SolveResult, SolverConfig

logger = logging.getLogger(__name__)


def joint_prox(problem: CompositeProblem) -> Callable[[np.ndarray, float], np.ndarray]:
    """
    Return (z, gamma) -> prox_{gamma (f + h)}(z) when it has a closed form.

    Raises:
        UnsupportedStructureError: for any other (f, h) pair
    """
    f, h = problem.f, problem.h
    if isinstance(h, ZeroSmooth):
        return f.prox
    if isinstance(h, SquaredDistance):
        w = h.w

        def folded(z, gamma):
            y = np.broadcast_to(h.y, z.shape)
            return f.prox((z + gamma * w * y) / (1.0 + gamma * w), gamma / (1.0 + gamma * w))

        return folded
    form = h.quadratic_form(problem.n)
    if isinstance(f, ZeroFn) and form is not None:
        quad, lin = form
        eye = np.eye(problem.n)

        def linear(z, gamma):
            return np.linalg.solve(eye + gamma * quad, z + gamma * lin)

        return linear
    raise UnsupportedStructureError(
        f"projection method needs a closed-form prox of f + h; got f = {f.name}, h = {h.name}")


class ProjectionSolver(PrimalDualSolver):
    """
    a = prox_{gamma (f+h)}(x - gamma L^T v)      l = L x
    b = prox_{mu g}(l + mu v)
    s = (x - a)/gamma + L^T (l - b)/mu           t = b - L a
    tau = ||s||^2 + ||t||^2; tau = 0 means (a, v + (l - b)/mu) is a Kuhn-Tucker point
    theta = lambda (||x - a||^2/gamma + ||l - b||^2/mu) / tau
    (x, v) <- (x, v) - theta (s, t)
    """

    method = 'projection'

    def __init__(self, problem, config=None, x0=None, v0=None):
        super().__init__(problem, config, x0, v0)
        self.prox_fh = joint_prox(self.stacked)
        self.extras['theta'] = []

    def step(self):
        gamma, mu, lam = self.config.gamma, self.config.mu, self.config.relaxation
        x, v = self.x, self.v
        a = self.prox_fh(x - gamma * self.op.adjoint(v), gamma)
        l = self.op.apply(x)
        b = self.g.prox(l + mu * v, mu)
        s = (x - a) / gamma + self.op.adjoint(l - b) / mu
        t = b - self.op.apply(a)
        tau = float(s @ s + t @ t)
        if tau == 0.0:
            self.x = a
            self.v = v + (l - b) / mu
            self.exact = True
            logger.info("projection: exact Kuhn-Tucker point reached")
            return
        theta = lam * (float((x - a) @ (x - a)) / gamma + float((l - b) @ (l - b)) / mu) / tau
        self.extras['theta'].append(theta)
        self.x = x - theta * s
        self.v = v - theta * t


def solve_projection_pd(problem: CompositeProblem, config: Optional[SolverConfig] = None,
                        x0=None, v0=None) -> SolveResult:
    return ProjectionSolver(problem, config, x0, v0).solve()
