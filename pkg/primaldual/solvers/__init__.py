"""Primal-dual splitting solvers, guards and diagnostics"""
from typing import Dict, List, Optional

from ..errors import PrimalDualError
from .admm import AdmmSolver, solve_admm
from .base import PrimalDualSolver
from .diagnostics import DualityReport, kkt_residual, primal_dual_objectives
from .fb import (
    ForwardBackwardSolver, RescaledForwardBackwardSolver, SecondForwardBackwardSolver,
    SymmetricForwardBackwardSolver, solve_fb, solve_fb2, solve_fb_rescaled, solve_fb_symmetric,
)
from .fbf import ForwardBackwardForwardSolver, solve_fbf
from .guards import validate_config
from .problem import (
    METHODS, CompositeProblem, GuardReport, SolveResult, SolverConfig, SolveTrace, Term,
)
from .projection import ProjectionSolver, solve_projection_pd
from .stacking import split_dual, stack_terms

SOLVERS = {
    'fb': ForwardBackwardSolver,
    'fb_rescaled': RescaledForwardBackwardSolver,
    'fb_symmetric': SymmetricForwardBackwardSolver,
    'fb2': SecondForwardBackwardSolver,
    'fbf': ForwardBackwardForwardSolver,
    'projection': ProjectionSolver,
    'admm': AdmmSolver,
}


def solve(problem: CompositeProblem, config: SolverConfig, x0=None, v0=None) -> SolveResult:
    """Dispatch on ``config.method``."""
    return SOLVERS[config.method](problem, config, x0, v0).solve()


def applicable_methods(problem: CompositeProblem, config: Optional[SolverConfig] = None) -> List[str]:
    """Methods whose structure requirements and guards accept the problem."""
    base = config or SolverConfig()
    methods = []
    for method in METHODS:
        try:
            validate_config(problem, base.model_copy(update={'method': method}))
        except PrimalDualError:
            continue
        methods.append(method)
    return methods
