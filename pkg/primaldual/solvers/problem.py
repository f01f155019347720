"""
Problem, configuration and result types shared by the primal-dual solvers.

The model is  minimize_x  f(x) + sum_m g_m(L_m x) + h(x).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator

from ..config import (
    ADMM_CG_ITERS,
    DEFAULT_KKT_TOL,
    DEFAULT_MAX_ITERS,
    DEFAULT_SEED,
    DEFAULT_TRACE_STRIDE,
)
from ..errors import DimensionError
from ..linalg.linop import LinOp
from ..prox.extended import ExtReal, ext_add, to_float
from ..prox.functions import ProxFn, SmoothFn, ZeroFn, ZeroSmooth

logger = logging.getLogger(__name__)

METHODS = ('fb', 'fb_rescaled', 'fb_symmetric', 'fb2', 'fbf', 'projection', 'admm')

TRACE_COLUMNS = ['iter', 'primal', 'dual', 'gap', 'r_primal', 'r_dual', 'step_change']


@dataclass(frozen=True)
class Term:
    """One composite term g(L x)."""
    g: ProxFn
    op: LinOp


@dataclass
class CompositeProblem:
    n: int
    f: ProxFn = field(default_factory=ZeroFn)
    h: SmoothFn = field(default_factory=ZeroSmooth)
    terms: List[Term] = field(default_factory=list)

    def __post_init__(self):
        self.n = int(self.n)
        if self.n < 1:
            raise DimensionError("problem dimension must be positive")
        for m, term in enumerate(self.terms):
            if term.op.cols != self.n:
                raise DimensionError(
                    f"term {m}: operator has {term.op.cols} columns, problem has N = {self.n}")
        if self.h.beta < 0:
            raise DimensionError("Lipschitz constant beta must be nonnegative")

    @property
    def beta(self) -> float:
        return float(self.h.beta)

    def objective(self, x) -> ExtReal:
        x = np.asarray(x, dtype=np.float64)
        values = [self.f.eval(x), self.h.eval(x)]
        values += [term.g.eval(term.op.apply(x)) for term in self.terms]
        return ext_add(*values)

    def single_term(self) -> Term:
        if len(self.terms) != 1:
            raise DimensionError(f"expected one term after stacking, found {len(self.terms)}")
        return self.terms[0]


class SolverConfig(BaseModel):
    """Step sizes and stopping parameters; unset steps are filled by the guards."""

    model_config = ConfigDict(extra='forbid')

    method: Literal['fb', 'fb_rescaled', 'fb_symmetric', 'fb2', 'fbf', 'projection', 'admm'] = 'fb'
    tau: Optional[float] = None
    sigma: Optional[float] = None
    gamma: Optional[float] = None
    mu: Optional[float] = None
    epsilon: Optional[float] = None
    relaxation: Optional[float] = None
    max_iters: int = DEFAULT_MAX_ITERS
    kkt_tol: float = DEFAULT_KKT_TOL
    seed: int = DEFAULT_SEED
    trace_stride: int = DEFAULT_TRACE_STRIDE
    inner_iters: int = ADMM_CG_ITERS

    @field_validator('tau', 'sigma', 'gamma', 'mu', 'epsilon', 'relaxation')
    @classmethod
    def positive_step(cls, value):
        if value is not None and not (np.isfinite(value) and value > 0):
            raise ValueError(f"step parameters must be positive and finite, got {value}")
        return value

    @field_validator('max_iters', 'trace_stride', 'inner_iters')
    @classmethod
    def positive_count(cls, value):
        if value < 1:
            raise ValueError("iteration counts must be at least 1")
        return value

    @field_validator('kkt_tol')
    @classmethod
    def positive_tol(cls, value):
        if not value > 0:
            raise ValueError("kkt_tol must be positive")
        return value


@dataclass
class GuardReport:
    """Accepted configuration with defaults filled in and the inequalities checked."""
    method: str
    config: SolverConfig
    norm_bound: float
    beta: float
    checks: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    delta: Optional[float] = None


class SolveTrace:
    """Per-iteration diagnostics; exported as CSV through pandas."""

    def __init__(self):
        self.records: List[Dict[str, float]] = []

    def append(self, iteration: int, primal, dual, gap, r_primal: float, r_dual: float,
               step_change: float):
        self.records.append({
            'iter': iteration,
            'primal': to_float(primal),
            'dual': np.nan if dual is None else to_float(dual),
            'gap': np.nan if gap is None else to_float(gap),
            'r_primal': float(r_primal),
            'r_dual': float(r_dual),
            'step_change': float(step_change),
        })

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records], dtype=np.float64)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.records, columns=TRACE_COLUMNS)

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False, float_format='%.17g', na_rep='')


@dataclass
class SolveResult:
    """
    Solver output; unpacks as (x, v, trace).

    status is 'converged', 'max_iters' or 'exact' (finite termination of the
    projection method).
    """
    x: np.ndarray
    v: np.ndarray
    trace: SolveTrace
    status: str
    iterations: int
    r_primal: float
    r_dual: float
    guard: GuardReport
    degraded_steps: int = 0
    extras: Dict[str, object] = field(default_factory=dict)

    def __iter__(self):
        return iter((self.x, self.v, self.trace))

    @property
    def converged(self) -> bool:
        return self.status in ('converged', 'exact')


def as_terms(pairs: Sequence) -> List[Term]:
    return [t if isinstance(t, Term) else Term(*t) for t in pairs]
