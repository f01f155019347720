"""
Forward-backward primal-dual algorithms: the basic form, its rescaled and
symmetric variants, and the second form restricted to f = 0.
"""

import logging
from typing import Optional

import numpy as np

from ..prox.calculus import prox_of_conjugate
from .base import PrimalDualSolver
from .problem import CompositeProblem, SolveResult, SolverConfig

logger = logging.getLogger(__name__)


class ForwardBackwardSolver(PrimalDualSolver):
    """
    p = prox_{tau f}(x - tau (grad h(x) + L^T v))
    q = prox_{sigma g*}(v + sigma L (2p - x))
    (x, v) <- (x, v) + lambda ((p, q) - (x, v))
    """

    method = 'fb'

    def step(self):
        tau, sigma, lam = self.config.tau, self.config.sigma, self.config.relaxation
        x, v = self.x, self.v
        p = self.f.prox(x - tau * (self.h.grad(x) + self.op.adjoint(v)), tau)
        q = prox_of_conjugate(self.g, v + sigma * self.op.apply(2.0 * p - x), sigma)
        self.x = x + lam * (p - x)
        self.v = v + lam * (q - v)


class RescaledForwardBackwardSolver(PrimalDualSolver):
    """Basic form in the variable v' = v / sigma; only prox_g is needed."""

    method = 'fb_rescaled'

    def __init__(self, problem, config=None, x0=None, v0=None):
        super().__init__(problem, config, x0, v0)
        self.v_scaled = self.v / self.config.sigma

    def dual_estimate(self):
        return self.config.sigma * self.v_scaled

    def step(self):
        tau, sigma, lam = self.config.tau, self.config.sigma, self.config.relaxation
        x, w = self.x, self.v_scaled
        p = self.f.prox(x - tau * (self.h.grad(x) + sigma * self.op.adjoint(w)), tau)
        shifted = w + self.op.apply(2.0 * p - x)
        q = shifted - self.g.prox(shifted, 1.0 / sigma)
        self.x = x + lam * (p - x)
        self.v_scaled = w + lam * (q - w)
        self.extras['v_rescaled'] = self.v_scaled


class SymmetricForwardBackwardSolver(PrimalDualSolver):
    """Dual step first: q = prox_{sigma g*}(v + sigma L x), then the primal step at 2q - v."""

    method = 'fb_symmetric'

    def step(self):
        tau, sigma, lam = self.config.tau, self.config.sigma, self.config.relaxation
        x, v = self.x, self.v
        q = prox_of_conjugate(self.g, v + sigma * self.op.apply(x), sigma)
        p = self.f.prox(x - tau * (self.h.grad(x) + self.op.adjoint(2.0 * q - v)), tau)
        self.x = x + lam * (p - x)
        self.v = v + lam * (q - v)


class SecondForwardBackwardSolver(PrimalDualSolver):
    """
    Second forward-backward form, f = 0:

    q = prox_{sigma g*}(v + sigma L (x - tau (grad h(x) + L^T v)))
    p = x - tau (grad h(x) + L^T q)
    """

    method = 'fb2'

    def step(self):
        tau, sigma, lam = self.config.tau, self.config.sigma, self.config.relaxation
        x, v = self.x, self.v
        grad = self.h.grad(x)
        q = prox_of_conjugate(self.g, v + sigma * self.op.apply(x - tau * (grad + self.op.adjoint(v))), sigma)
        p = x - tau * (grad + self.op.adjoint(q))
        self.x = x + lam * (p - x)
        self.v = v + lam * (q - v)


def solve_fb(problem: CompositeProblem, config: Optional[SolverConfig] = None,
             x0=None, v0=None) -> SolveResult:
    return ForwardBackwardSolver(problem, config, x0, v0).solve()


def solve_fb_rescaled(problem: CompositeProblem, config: Optional[SolverConfig] = None,
                      x0=None, v0=None) -> SolveResult:
    """Result dual is v = sigma v'; v' itself is in ``result.extras['v_rescaled']``."""
    return RescaledForwardBackwardSolver(problem, config, x0, v0).solve()


def solve_fb_symmetric(problem: CompositeProblem, config: Optional[SolverConfig] = None,
                       x0=None, v0=None) -> SolveResult:
    return SymmetricForwardBackwardSolver(problem, config, x0, v0).solve()


def solve_fb2(problem: CompositeProblem, config: Optional[SolverConfig] = None,
              x0=None, v0=None) -> SolveResult:
    return SecondForwardBackwardSolver(problem, config, x0, v0).solve()
