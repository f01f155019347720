"""
LP Duality Certificates
=======================

Primal:  minimize c'x  s.t.  L x >= b, x >= 0
Dual:    maximize b'y  s.t.  L'y <= c, y >= 0

Every LpProblem stores its data in the primal layout; the dual of (L, b, c)
is kept as (-L', -c, -b) with the sense flipped, so dualizing twice returns
the original data exactly.

No LP is solved here: the module checks feasibility, relaxed complementary
slackness and the approximation inequality c'x <= nu b'y for given pairs.
"""

import logging
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from ..config import FEASIBILITY_TOL
from ..errors import DimensionError, InfeasiblePairError, InvalidParameterError, NonFiniteError

logger = logging.getLogger(__name__)


class Violation(NamedTuple):
    kind: str        # 'constraint', 'nonneg', 'primal_slackness', 'dual_slackness'
    index: int
    amount: float


@dataclass(frozen=True)
class LpProblem:
    L: np.ndarray
    b: np.ndarray
    c: np.ndarray
    sense: str = 'primal'      # 'primal' = min c'z, 'dual' = max (-c)'z

    def __post_init__(self):
        L = np.atleast_2d(np.asarray(self.L, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).ravel()
        c = np.asarray(self.c, dtype=np.float64).ravel()
        if not (np.all(np.isfinite(L)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise NonFiniteError("LP data must be finite")
        if L.shape != (b.size, c.size):
            raise DimensionError(f"L is {L.shape}, expected ({b.size}, {c.size})")
        if self.sense not in ('primal', 'dual'):
            raise InvalidParameterError(f"unknown LP sense {self.sense!r}")
        object.__setattr__(self, 'L', L)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'c', c)

    @property
    def shape(self):
        return self.L.shape

    def objective(self, z) -> float:
        """c'z for the primal sense, b'y (stored as -c'z) for the dual sense."""
        value = float(self.c @ np.asarray(z, dtype=np.float64))
        return value if self.sense == 'primal' else -value


def dualize_lp(p: LpProblem) -> LpProblem:
    sense = 'dual' if p.sense == 'primal' else 'primal'
    return LpProblem(-p.L.T, -p.c, -p.b, sense)


def check_feasible(p: LpProblem, z) -> List[Violation]:
    """
    Constraints of ``p`` violated by ``z`` beyond the absolute tolerance.

    To check a dual vector y against a primal LP, pass ``dualize_lp(p)``.
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    if z.size != p.L.shape[1]:
        raise DimensionError(f"point has length {z.size}, LP has {p.L.shape[1]} variables")
    violations = []
    shortfall = p.b - p.L @ z
    for i in np.nonzero(shortfall > FEASIBILITY_TOL)[0]:
        violations.append(Violation('constraint', int(i), float(shortfall[i])))
    for j in np.nonzero(z < -FEASIBILITY_TOL)[0]:
        violations.append(Violation('nonneg', int(j), float(-z[j])))
    return violations


@dataclass
class Certificate:
    x: np.ndarray
    y: np.ndarray
    nu_primal: float
    nu_dual: float
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def nu(self) -> float:
        """Approximation factor implied by the relaxed conditions."""
        return self.nu_dual / self.nu_primal


def _primal_form(p: LpProblem) -> LpProblem:
    return p if p.sense == 'primal' else dualize_lp(p)


def check_slackness(p: LpProblem, x, y, nu_primal: float = 1.0, nu_dual: float = 1.0) -> Certificate:
    """
    Relaxed complementary slackness for a feasible primal/dual pair.

    For every j with x_j > 0:  nu_primal c_j <= (L'y)_j <= c_j
    For every i with y_i > 0:  b_i <= (L x)_i <= nu_dual b_i

    Args:
        p: LP (either sense; conditions refer to its primal form)
        x: Primal point
        y: Dual point
        nu_primal: Relaxation factor in ]0, 1]
        nu_dual: Relaxation factor >= 1

    Returns:
        Certificate listing the violated conditions

    Raises:
        InfeasiblePairError: if x or y is infeasible
    """
    if not (0 < nu_primal <= 1):
        raise InvalidParameterError(f"nu_primal must lie in ]0, 1], got {nu_primal}")
    if not nu_dual >= 1:
        raise InvalidParameterError(f"nu_dual must be >= 1, got {nu_dual}")
    p = _primal_form(p)
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()

    infeasible = check_feasible(p, x) + check_feasible(dualize_lp(p), y)
    if infeasible:
        raise InfeasiblePairError(infeasible)

    violations = []
    reduced = p.L.T @ y
    for j in np.nonzero(x > FEASIBILITY_TOL)[0]:
        shortfall = nu_primal * p.c[j] - reduced[j]
        if shortfall > FEASIBILITY_TOL:
            violations.append(Violation('primal_slackness', int(j), float(shortfall)))
    activity = p.L @ x
    for i in np.nonzero(y > FEASIBILITY_TOL)[0]:
        excess = activity[i] - nu_dual * p.b[i]
        if excess > FEASIBILITY_TOL:
            violations.append(Violation('dual_slackness', int(i), float(excess)))

    if violations:
        logger.debug(f"Slackness failed on {len(violations)} condition(s)")
    return Certificate(x, y, float(nu_primal), float(nu_dual), violations)


@dataclass(frozen=True)
class ApproximationCertificate:
    passed: bool
    primal_value: float      # c'x
    dual_value: float        # b'y
    nu: float

    @property
    def ratio(self) -> float:
        return self.primal_value / self.dual_value if self.dual_value != 0 else float('inf')


def approximation_certificate(p: LpProblem, x, y, nu: float) -> ApproximationCertificate:
    """Pass iff c'x <= nu b'y + tol, which bounds c'x by nu times the LP optimum."""
    p = _primal_form(p)
    primal_value = float(p.c @ np.asarray(x, dtype=np.float64).ravel())
    dual_value = float(p.b @ np.asarray(y, dtype=np.float64).ravel())
    passed = primal_value <= nu * dual_value + FEASIBILITY_TOL
    return ApproximationCertificate(passed, primal_value, dual_value, float(nu))
