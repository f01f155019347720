"""
Convergence-condition guards and default step sizes per method.
"""

import logging

import numpy as np

from ..config import (
    ADMM_DEFAULTS,
    ADMM_RANK_CHECK_LIMIT,
    FB_DEFAULTS,
    FBF_DEFAULTS,
    PROJECTION_DEFAULTS,
)
from ..errors import StepSizeGuardError, UnsupportedStructureError
from ..prox.functions import ZeroFn
from .problem import CompositeProblem, GuardReport, SolverConfig
from .stacking import stack_terms

logger = logging.getLogger(__name__)

# Relative slack on inequality checks, so exact boundary cases (tau sigma = 1
# with an identity operator) are not lost to rounding.
ROUNDING_SLACK = 1e-12


def _le(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + ROUNDING_SLACK * max(1.0, abs(lhs), abs(rhs))


def _lt(lhs: float, rhs: float) -> bool:
    return lhs < rhs


def _fb_family(problem, config, norm, beta, report):
    sigma = config.sigma
    if sigma is None:
        sigma = FB_DEFAULTS['step_scale'] / norm if norm > 0 else 1.0
    tau = config.tau
    if tau is None:
        denom = beta / 2.0 + sigma * norm ** 2
        tau = FB_DEFAULTS['tau_safety'] / denom if denom > 0 else 1.0

    slack = 1.0 / tau - sigma * norm ** 2
    inequality = "1/tau - sigma ||L||^2 >= beta/2"
    if not _le(beta / 2.0, slack):
        raise StepSizeGuardError(config.method, inequality,
                                 f"1/tau - sigma ||L||^2 = {slack:.6g}, beta/2 = {beta / 2.0:.6g}")
    report.checks.append(inequality)

    delta = 2.0 if beta == 0 else 2.0 - beta / (2.0 * slack)
    relaxation = config.relaxation
    if relaxation is None:
        relaxation = FB_DEFAULTS['relaxation']
        if delta < 1.01:
            relaxation = 0.99 * delta
    if not (0 < relaxation < delta):
        raise StepSizeGuardError(config.method, "0 < lambda < delta",
                                 f"lambda = {relaxation:.6g}, delta = {delta:.6g}")
    report.checks.append("0 < lambda < delta")
    report.delta = delta
    return config.model_copy(update={'tau': tau, 'sigma': sigma, 'relaxation': relaxation})


def _fb2(problem, config, norm, beta, report):
    if not isinstance(problem.f, ZeroFn):
        raise UnsupportedStructureError("fb2 handles only f = 0")
    sigma = config.sigma
    if sigma is None:
        sigma = FB_DEFAULTS['step_scale'] / norm if norm > 0 else 1.0
    tau = config.tau
    if tau is None:
        candidates = []
        if norm > 0:
            candidates.append(FB_DEFAULTS['tau_safety'] / (sigma * norm ** 2))
        if beta > 0:
            candidates.append(1.0 / beta)
        tau = min(candidates) if candidates else 1.0

    if not _lt(tau * sigma * norm ** 2, 1.0):
        raise StepSizeGuardError(config.method, "tau sigma ||L||^2 < 1",
                                 f"tau sigma ||L||^2 = {tau * sigma * norm ** 2:.6g}")
    report.checks.append("tau sigma ||L||^2 < 1")
    if beta > 0 and not _lt(tau, 2.0 / beta):
        raise StepSizeGuardError(config.method, "tau < 2/beta",
                                 f"tau = {tau:.6g}, 2/beta = {2.0 / beta:.6g}")
    report.checks.append("tau < 2/beta")

    relaxation = config.relaxation if config.relaxation is not None else 1.0
    if not (0 < relaxation <= 1.0):
        raise StepSizeGuardError(config.method, "0 < lambda <= 1", f"lambda = {relaxation:.6g}")
    report.checks.append("0 < lambda <= 1")
    return config.model_copy(update={'tau': tau, 'sigma': sigma, 'relaxation': relaxation})


def _fbf(problem, config, norm, beta, report):
    mu = beta + norm
    epsilon = config.epsilon
    if epsilon is None:
        epsilon = min(FBF_DEFAULTS['epsilon'], 0.5 / (1.0 + mu))
    upper = (1.0 - epsilon) / mu if mu > 0 else np.inf
    gamma = config.gamma
    if gamma is None:
        gamma = FBF_DEFAULTS['gamma_fraction'] * upper if mu > 0 else 1.0

    if not _lt(epsilon, 1.0 / (1.0 + mu)):
        raise StepSizeGuardError(config.method, "epsilon < 1/(1+mu)",
                                 f"epsilon = {epsilon:.6g}, mu = {mu:.6g}")
    report.checks.append("epsilon < 1/(1+mu)")
    inequality = "epsilon <= gamma <= (1-epsilon)/mu, mu = beta + ||L||"
    if not (_le(epsilon, gamma) and _le(gamma, upper)):
        raise StepSizeGuardError(config.method, inequality,
                                 f"gamma = {gamma:.6g}, interval [{epsilon:.6g}, {upper:.6g}]")
    report.checks.append(inequality)
    return config.model_copy(update={'gamma': gamma, 'epsilon': epsilon})


def _projection(problem, config, norm, beta, report):
    from .projection import joint_prox
    joint_prox(problem)
    gamma = config.gamma if config.gamma is not None else PROJECTION_DEFAULTS['gamma']
    mu = config.mu if config.mu is not None else PROJECTION_DEFAULTS['mu']
    relaxation = config.relaxation if config.relaxation is not None else PROJECTION_DEFAULTS['relaxation']
    if not (0 < relaxation < 2):
        raise StepSizeGuardError(config.method, "0 < lambda < 2", f"lambda = {relaxation:.6g}")
    report.checks.append("gamma > 0, mu > 0, 0 < lambda < 2")
    return config.model_copy(update={'gamma': gamma, 'mu': mu, 'relaxation': relaxation})


def _admm(problem, config, norm, beta, report):
    from .admm import quadratic_part
    quad, _ = quadratic_part(problem)
    op = problem.single_term().op
    n = problem.n
    if n <= ADMM_RANK_CHECK_LIMIT:
        rank = int(np.linalg.matrix_rank(op.to_dense()))
        if rank == n:
            report.checks.append("rank(L) = N")
        elif np.linalg.eigvalsh(quad).min() > 0:
            # x-update still uniquely solvable through the quadratic part
            report.checks.append("rank(L) < N, f + h strongly convex")
        else:
            raise StepSizeGuardError(config.method, "rank(L) = N", f"rank(L) = {rank}, N = {n}")
    else:
        message = f"rank(L) = N not verified for N = {n} > {ADMM_RANK_CHECK_LIMIT}"
        logger.warning(message)
        report.warnings.append(message)
    gamma = config.gamma if config.gamma is not None else ADMM_DEFAULTS['gamma']
    return config.model_copy(update={'gamma': gamma})


_GUARDS = {
    'fb': _fb_family,
    'fb_rescaled': _fb_family,
    'fb_symmetric': _fb_family,
    'fb2': _fb2,
    'fbf': _fbf,
    'projection': _projection,
    'admm': _admm,
}


def validate_config(problem: CompositeProblem, config: SolverConfig) -> GuardReport:
    """
    Check a method's convergence inequalities and fill missing step sizes.

    Args:
        problem: Composite problem (stacked internally if it has several terms)
        config: Solver configuration; unset steps take the method defaults

    Returns:
        GuardReport holding the completed config

    Raises:
        StepSizeGuardError: naming the violated inequality
        UnsupportedStructureError: when the method cannot handle the problem
    """
    stacked = stack_terms(problem)
    norm = stacked.single_term().op.estimate_norm(config.seed).norm_bound
    beta = stacked.beta
    report = GuardReport(config.method, config, norm, beta)
    report.config = _GUARDS[config.method](stacked, config, norm, beta, report)
    logger.info(f"{config.method}: guards passed (||L|| <= {norm:.6g}, beta = {beta:.6g}): "
                f"{'; '.join(report.checks)}")
    return report
