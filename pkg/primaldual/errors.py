"""Exception types shared across the toolkit.

Every error is a ``ValueError`` so callers that only know about bad inputs keep
working; the CLI maps ``ParseError`` to exit 64 and everything else to 65.
"""

from typing import List, Sequence


class PrimalDualError(ValueError):
    """Base class for toolkit errors."""


# ============================================
# VECTORS, OPERATORS, FUNCTIONS
# ============================================

class NonFiniteError(PrimalDualError):
    pass


class DimensionError(PrimalDualError):
    pass


class InvalidStepError(PrimalDualError):
    pass


class InvalidParameterError(PrimalDualError):
    pass


class InvalidSetError(PrimalDualError):
    pass


class UnsupportedFunctionError(PrimalDualError):
    pass


# ============================================
# SOLVERS
# ============================================

class StepSizeGuardError(PrimalDualError):
    """A convergence-condition inequality does not hold."""

    def __init__(self, method: str, inequality: str, detail: str = ''):
        self.method = method
        self.inequality = inequality
        message = f"{method}: step-size guard violated: {inequality}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class UnsupportedStructureError(PrimalDualError):
    pass


class SingularSubproblemError(PrimalDualError):
    pass


class DivergenceError(PrimalDualError):
    pass


# ============================================
# DISCRETE PROBLEMS
# ============================================

class InfeasiblePairError(PrimalDualError):
    def __init__(self, violations: Sequence):
        self.violations = list(violations)
        super().__init__(f"Infeasible input: {len(self.violations)} violated constraint(s): "
                         f"{self.violations[:5]}")


class InvalidInstanceError(PrimalDualError):
    def __init__(self, message: str, uncovered: Sequence[int] = ()):
        self.uncovered = list(uncovered)
        super().__init__(message)


class InvalidLabelingError(PrimalDualError):
    pass


class ModelTooLargeError(PrimalDualError):
    pass


class NotATreeError(PrimalDualError):
    pass


class StrategyError(PrimalDualError):
    pass


class NonSubmodularError(PrimalDualError):
    def __init__(self, edges: List[int]):
        self.edges = list(edges)
        super().__init__(f"Pairwise term is not submodular on edge(s) {self.edges}")


class ParseError(PrimalDualError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)
