"""
Kuhn-Tucker residuals and primal/dual objective values.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import UnsupportedFunctionError
from ..prox.calculus import prox_of_conjugate
from ..prox.extended import PLUS_INF, ExtReal, ext_add
from ..prox.functions import SquaredDistance, ZeroSmooth
from .problem import CompositeProblem
from .stacking import stack_terms

logger = logging.getLogger(__name__)


def kkt_residual(problem: CompositeProblem, x, v) -> Tuple[float, float]:
    """
    Distances of (x, v) from the Kuhn-Tucker inclusions, via prox maps.

    r_primal = ||x - prox_f(x - (grad h(x) + L^T v))||
    r_dual   = ||v - prox_{g*}(v + L x)||

    Both vanish exactly at a Kuhn-Tucker point. ``v`` is the stacked dual
    vector when the problem has several terms.
    """
    stacked = stack_terms(problem)
    term = stacked.single_term()
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    lx = term.op.apply(x)
    forward = x - (stacked.h.grad(x) + term.op.adjoint(v))
    r_primal = float(np.linalg.norm(x - stacked.f.prox(forward, 1.0)))
    r_dual = float(np.linalg.norm(v - prox_of_conjugate(term.g, v + lx, 1.0)))
    return r_primal, r_dual


@dataclass(frozen=True)
class DualityReport:
    primal: ExtReal
    dual: Optional[ExtReal]       # None when not evaluable in closed form
    gap: Optional[ExtReal]

    @property
    def dual_available(self) -> bool:
        return self.dual is not None


def _envelope_value(problem: CompositeProblem, u: np.ndarray) -> Optional[ExtReal]:
    """(f* inf-conv h*)(u) for h zero or a squared distance, else None."""
    try:
        f_conj = problem.f.conjugate()
    except UnsupportedFunctionError:
        return None
    h = problem.h
    if isinstance(h, ZeroSmooth):
        return f_conj.eval(u)
    if isinstance(h, SquaredDistance):
        # min_z f*(z) + ||u + w y - z||^2 / (2w) - w ||y||^2 / 2, at z = prox_{w f*}(u + w y)
        w = h.w
        y = np.broadcast_to(h.y, u.shape)
        shifted = u + w * y
        z = f_conj.prox(shifted, w)
        return ext_add(f_conj.eval(z),
                       float(np.sum((shifted - z) ** 2)) / (2.0 * w),
                       -0.5 * w * float(np.sum(y ** 2)))
    return None


def primal_dual_objectives(problem: CompositeProblem, x, v) -> DualityReport:
    """
    Primal value, dual value and gap at (x, v).

    The dual value is -[(f* inf-conv h*)(-L^T v) + g*(v)], so weak duality reads
    gap = primal - dual >= 0. It is evaluated only when h is zero or a squared
    distance and every function has a catalog conjugate; otherwise the dual and
    the gap are reported as unavailable.
    """
    stacked = stack_terms(problem)
    term = stacked.single_term()
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    primal = problem.objective(x)

    envelope = _envelope_value(stacked, -term.op.adjoint(v))
    if envelope is None:
        return DualityReport(primal, None, None)
    try:
        g_conj = term.g.conjugate()
    except UnsupportedFunctionError:
        return DualityReport(primal, None, None)

    dual_cost = ext_add(envelope, g_conj.eval(v))
    if dual_cost is PLUS_INF:
        # v outside the dual domain: the dual value is -inf and the gap +inf
        return DualityReport(primal, float('-inf'), PLUS_INF)
    gap = ext_add(primal, dual_cost)
    return DualityReport(primal, -dual_cost, gap)
