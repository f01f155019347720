"""
Set Cover by the Primal-Dual Schema
===================================

Dual ascent: pick the lowest uncovered element, raise its dual variable until
some set containing it becomes packed (its element duals sum to its cost), and
add every newly packed set to the cover. The output cost is at most F_max
times the dual value, hence at most F_max times the optimum.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import InvalidInstanceError
from .lp_duality import (
    ApproximationCertificate,
    Certificate,
    LpProblem,
    approximation_certificate,
    check_slackness,
)

logger = logging.getLogger(__name__)

PACKED_TOL = 1e-12


@dataclass(frozen=True)
class SetCoverInstance:
    n_elements: int
    members: Tuple[Tuple[int, ...], ...]
    costs: Tuple[float, ...]

    @classmethod
    def from_sets(cls, n_elements: int, sets: Sequence[Tuple[Sequence[int], float]]) -> 'SetCoverInstance':
        members = tuple(tuple(sorted(set(int(i) for i in m))) for m, _ in sets)
        costs = tuple(float(c) for _, c in sets)
        return cls(int(n_elements), members, costs)

    @property
    def n_sets(self) -> int:
        return len(self.members)

    def incidence(self) -> np.ndarray:
        """K x N matrix with a 1 where element i belongs to set j."""
        matrix = np.zeros((self.n_elements, self.n_sets))
        for j, members in enumerate(self.members):
            matrix[list(members), j] = 1.0
        return matrix

    def validate(self) -> None:
        for j, (members, cost) in enumerate(zip(self.members, self.costs)):
            if not np.isfinite(cost) or cost < 0:
                raise InvalidInstanceError(f"set {j} has invalid cost {cost}")
            bad = [i for i in members if not 0 <= i < self.n_elements]
            if bad:
                raise InvalidInstanceError(f"set {j} references unknown elements {bad}")
        covered = set().union(*self.members) if self.members else set()
        uncovered = sorted(set(range(self.n_elements)) - covered)
        if uncovered:
            raise InvalidInstanceError(f"elements {uncovered} belong to no set", uncovered)


def cover_lp(inst: SetCoverInstance) -> LpProblem:
    """min sum_j c_j x_j  s.t.  sum_{j : i in S_j} x_j >= 1,  x >= 0."""
    return LpProblem(inst.incidence(), np.ones(inst.n_elements), np.array(inst.costs))


def f_max(inst: SetCoverInstance) -> int:
    """Largest number of sets sharing one element."""
    inst.validate()
    return int(inst.incidence().sum(axis=1).max()) if inst.n_elements else 0


def verify_cover(inst: SetCoverInstance, x) -> Tuple[bool, List[int]]:
    chosen = np.asarray(x).ravel() > 0.5
    coverage = inst.incidence() @ chosen.astype(np.float64)
    uncovered = [int(i) for i in np.nonzero(coverage < 1)[0]]
    return not uncovered, uncovered


@dataclass
class SetCoverResult:
    x: np.ndarray                 # 0/1 per set
    y: np.ndarray                 # dual value per element
    cost: float
    dual_value: float
    f_max: int
    certificate: Certificate
    approximation: ApproximationCertificate

    @property
    def cover(self) -> List[int]:
        return [int(j) for j in np.nonzero(self.x)[0]]

    @property
    def ratio(self) -> float:
        return self.cost / self.dual_value if self.dual_value > 0 else 1.0


def solve_setcover(inst: SetCoverInstance) -> SetCoverResult:
    """
    Run the dual-ascent cover algorithm.

    Args:
        inst: Set-cover instance (validated here)

    Returns:
        SetCoverResult with the cover, the dual vector and both certificates
    """
    frequency = f_max(inst)
    incidence = inst.incidence()
    costs = np.array(inst.costs)
    y = np.zeros(inst.n_elements)
    slack = costs.copy()
    x = np.zeros(inst.n_sets, dtype=int)
    covered = np.zeros(inst.n_elements, dtype=bool)

    def take(j: int) -> None:
        x[j] = 1
        covered[list(inst.members[j])] = True

    # zero-cost sets are packed at y = 0
    for j in np.nonzero(costs <= PACKED_TOL)[0]:
        take(int(j))

    raises = 0
    while not covered.all():
        i = int(np.argmin(covered))          # lowest uncovered element
        containing = np.nonzero(incidence[i] > 0)[0]
        delta = float(slack[containing].min())
        y[i] += delta
        slack[containing] = np.maximum(slack[containing] - delta, 0.0)
        raises += 1
        for j in containing:
            if x[j] == 0 and slack[j] <= PACKED_TOL:
                take(int(j))

    cost = float(costs @ x)
    dual_value = float(y.sum())
    lp = cover_lp(inst)
    certificate = check_slackness(lp, x, y, 1.0, float(max(frequency, 1)))
    approximation = approximation_certificate(lp, x, y, float(max(frequency, 1)))
    logger.info(f"Set cover: {int(x.sum())} of {inst.n_sets} sets, cost {cost:.6g}, "
                f"dual {dual_value:.6g}, F_max {frequency}, {raises} raises")
    return SetCoverResult(x, y, cost, dual_value, frequency, certificate, approximation)
