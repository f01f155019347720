"""
Prox Catalog
============

Proper convex lower-semicontinuous functions with closed-form proximity
operators, and the smooth functions the solvers differentiate.

Each ProxFn exposes:
- eval(x): value on the extended real line (PLUS_INF outside the domain)
- prox(x, gamma): argmin_y f(y) + ||y - x||^2 / (2 gamma)
- conjugate(): the Fenchel conjugate as another ProxFn with its own prox
- conjugate_tag: short name of the conjugate
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..config import FEASIBILITY_TOL, NEWTON_MAX_ITER, NEWTON_TOL
from ..errors import (
    DimensionError,
    InvalidParameterError,
    InvalidSetError,
    InvalidStepError,
    NonFiniteError,
    UnsupportedFunctionError,
)
from ..linalg.linop import DenseOp, as_vec
from .extended import PLUS_INF, ExtReal

logger = logging.getLogger(__name__)


def check_step(gamma: float) -> float:
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma <= 0:
        raise InvalidStepError(f"step must be positive and finite, got {gamma}")
    return gamma


def _param(value, name: str, allow_inf: bool = False) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim > 1:
        raise DimensionError(f"{name} must be a scalar or a vector")
    if np.any(np.isnan(arr)) or (not allow_inf and not np.all(np.isfinite(arr))):
        raise NonFiniteError(f"{name} has non-finite entries")
    return arr


def _fit(param: np.ndarray, x: np.ndarray, name: str) -> np.ndarray:
    if param.ndim == 1 and param.shape != x.shape:
        raise DimensionError(f"{name} has length {param.size}, argument has length {x.size}")
    return np.broadcast_to(param, x.shape)


# ============================================
# SCALAR PROX MAPS
# ============================================

def prox_l1(x, gamma: float) -> np.ndarray:
    """Soft thresholding: sign(x) max(|x| - gamma, 0)."""
    gamma = check_step(gamma)
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - gamma, 0.0)


def prox_power(x, gamma: float, p: float) -> np.ndarray:
    """
    Prox of |.|^p with step gamma, componentwise.

    For p > 1 (other than 2) the magnitude t solves
    gamma p t^(p-1) + t - |x| = 0 on [0, |x|]; the left side is increasing, so a
    Newton step is kept while it stays inside the bracket and bisection is used
    otherwise.

    Args:
        x: Input vector
        gamma: Positive step
        p: Exponent, at least 1

    Returns:
        Vector of minimizers
    """
    gamma = check_step(gamma)
    p = float(p)
    if not p >= 1.0:
        raise UnsupportedFunctionError(f"|x|^p with p = {p} < 1 is not convex")
    x = np.asarray(x, dtype=np.float64)
    if p == 1.0:
        return prox_l1(x, gamma)
    if p == 2.0:
        return x / (1.0 + 2.0 * gamma)

    a = np.abs(x)
    lo = np.zeros_like(a)
    hi = a.copy()
    t = a.copy()
    for _ in range(NEWTON_MAX_ITER):
        f_val = gamma * p * t ** (p - 1.0) + t - a
        lo = np.where(f_val <= 0, t, lo)
        hi = np.where(f_val >= 0, t, hi)
        with np.errstate(divide='ignore', invalid='ignore'):
            slope = gamma * p * (p - 1.0) * t ** (p - 2.0) + 1.0
            newton = t - f_val / slope
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        t_new = np.where(inside, newton, 0.5 * (lo + hi))
        step = np.max(np.abs(t_new - t)) if t.size else 0.0
        t = t_new
        if step <= NEWTON_TOL * (1.0 + np.max(a, initial=0.0)):
            break
    else:
        logger.warning(f"prox_power did not reach {NEWTON_TOL} in {NEWTON_MAX_ITER} steps")
    return np.sign(x) * t


def project_box(x, lo, hi) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if np.any(lo > hi):
        raise InvalidSetError("box is empty: lo > hi in some coordinate")
    return np.clip(x, lo, hi)


# ============================================
# PROX FUNCTION BASE
# ============================================

class ProxFn:
    """Proper convex lsc function with a computable proximity operator."""

    name = 'fn'

    def eval(self, x) -> ExtReal:
        raise NotImplementedError

    def _prox(self, x: np.ndarray, gamma: float) -> np.ndarray:
        raise NotImplementedError

    def prox(self, x, gamma: float = 1.0) -> np.ndarray:
        gamma = check_step(gamma)
        return self._prox(np.asarray(x, dtype=np.float64), gamma)

    def conjugate(self) -> 'ProxFn':
        raise UnsupportedFunctionError(f"{self.name} has no analytic conjugate in the catalog")

    @property
    def conjugate_tag(self) -> Optional[str]:
        try:
            return self.conjugate().name
        except UnsupportedFunctionError:
            return None

    def quadratic_form(self, n: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """(Q, q) with f(x) = x'Qx/2 - q'x + const, when f is quadratic."""
        return None

    def __repr__(self):
        return self.name


class ZeroFn(ProxFn):
    name = 'zero'

    def eval(self, x):
        return 0.0

    def _prox(self, x, gamma):
        return x.copy()

    def conjugate(self):
        return IndicatorZero()

    def quadratic_form(self, n):
        return np.zeros((n, n)), np.zeros(n)


class IndicatorZero(ProxFn):
    """Indicator of {0}, the identity element of inf-convolution."""

    name = 'indicator{0}'

    def eval(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.0 if np.all(np.abs(x) <= FEASIBILITY_TOL) else PLUS_INF

    def _prox(self, x, gamma):
        return np.zeros_like(x)

    def conjugate(self):
        return ZeroFn()


class BoxIndicator(ProxFn):
    """Indicator of the box [lo, hi]; bounds may be infinite."""

    def __init__(self, lo, hi):
        self.lo = _param(lo, 'lo', allow_inf=True)
        self.hi = _param(hi, 'hi', allow_inf=True)
        if np.any(self.lo > self.hi):
            raise InvalidSetError("box is empty: lo > hi in some coordinate")
        self.name = f"indicator[{_fmt(self.lo)},{_fmt(self.hi)}]"

    def eval(self, x):
        x = np.asarray(x, dtype=np.float64)
        lo, hi = _fit(self.lo, x, 'lo'), _fit(self.hi, x, 'hi')
        inside = np.all(x >= lo - FEASIBILITY_TOL) and np.all(x <= hi + FEASIBILITY_TOL)
        return 0.0 if inside else PLUS_INF

    def _prox(self, x, gamma):
        return project_box(x, _fit(self.lo, x, 'lo'), _fit(self.hi, x, 'hi'))

    def conjugate(self):
        return BoxSupport(self.lo, self.hi)


class BoxSupport(ProxFn):
    """Support function sigma_C(u) = sup_{x in C} <u, x> of the box C = [lo, hi]."""

    def __init__(self, lo, hi):
        self.lo = _param(lo, 'lo', allow_inf=True)
        self.hi = _param(hi, 'hi', allow_inf=True)
        if np.any(self.lo > self.hi):
            raise InvalidSetError("box is empty: lo > hi in some coordinate")
        self.name = f"support[{_fmt(self.lo)},{_fmt(self.hi)}]"

    def eval(self, u):
        u = np.asarray(u, dtype=np.float64)
        lo, hi = _fit(self.lo, u, 'lo'), _fit(self.hi, u, 'hi')
        pos, neg = u > 0, u < 0
        if np.any(pos & np.isinf(hi)) or np.any(neg & np.isinf(lo)):
            return PLUS_INF
        return float(np.sum(u[pos] * hi[pos]) + np.sum(u[neg] * lo[neg]))

    def _prox(self, x, gamma):
        # Moreau: prox_{gamma sigma_C}(x) = x - P_{gamma C}(x)
        lo, hi = _fit(self.lo, x, 'lo'), _fit(self.hi, x, 'hi')
        return x - np.clip(x, gamma * lo, gamma * hi)

    def conjugate(self):
        return BoxIndicator(self.lo, self.hi)


class L1Norm(ProxFn):
    """lam * ||x||_1, lam a scalar or a vector of nonnegative weights."""

    def __init__(self, lam=1.0):
        self.lam = _param(lam, 'lambda')
        if np.any(self.lam < 0):
            raise InvalidParameterError("l1 weight must be nonnegative")
        self.name = f"l1({_fmt(self.lam)})"

    def eval(self, x):
        x = np.asarray(x, dtype=np.float64)
        return float(np.sum(_fit(self.lam, x, 'lambda') * np.abs(x)))

    def _prox(self, x, gamma):
        thresh = gamma * _fit(self.lam, x, 'lambda')
        return np.sign(x) * np.maximum(np.abs(x) - thresh, 0.0)

    def conjugate(self):
        return BoxIndicator(-self.lam, self.lam)


class PowerFn(ProxFn):
    """lam * sum_j |x_j|^p for p >= 1."""

    def __init__(self, p: float, lam: float = 1.0):
        if not float(p) >= 1.0:
            raise UnsupportedFunctionError(f"|x|^p with p = {p} < 1 is not convex")
        if not float(lam) > 0:
            raise InvalidParameterError("power weight must be positive")
        self.p = float(p)
        self.lam = float(lam)
        self.name = f"pow({self.p:g},{self.lam:g})"

    def eval(self, x):
        return self.lam * float(np.sum(np.abs(np.asarray(x, dtype=np.float64)) ** self.p))

    def _prox(self, x, gamma):
        return prox_power(x, gamma * self.lam, self.p)

    def conjugate(self):
        if self.p == 1.0:
            return BoxIndicator(-self.lam, self.lam)
        q = self.p / (self.p - 1.0)
        kappa = (self.p - 1.0) * self.lam * (self.lam * self.p) ** (-q)
        return PowerFn(q, kappa)


class ConsensusIndicator(ProxFn):
    """Indicator of {(x_1, ..., x_M) : x_1 = ... = x_M}, each block of size n."""

    def __init__(self, n_blocks: int, block_size: int):
        if n_blocks < 1 or block_size < 1:
            raise InvalidParameterError("consensus needs at least one block of positive size")
        self.n_blocks = int(n_blocks)
        self.block_size = int(block_size)
        self.name = f"consensus({self.n_blocks}x{self.block_size})"

    def _blocks(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.size != self.n_blocks * self.block_size:
            raise DimensionError(f"expected length {self.n_blocks * self.block_size}, got {x.size}")
        return x.reshape(self.n_blocks, self.block_size)

    def eval(self, x):
        blocks = self._blocks(x)
        spread = np.max(np.abs(blocks - blocks.mean(axis=0)))
        return 0.0 if spread <= FEASIBILITY_TOL else PLUS_INF

    def _prox(self, x, gamma):
        blocks = self._blocks(x)
        return np.tile(blocks.mean(axis=0), self.n_blocks)

    def conjugate(self):
        return SumZeroIndicator(self.n_blocks, self.block_size)


class SumZeroIndicator(ConsensusIndicator):
    """Indicator of {(v_1, ..., v_M) : v_1 + ... + v_M = 0}."""

    def __init__(self, n_blocks: int, block_size: int):
        super().__init__(n_blocks, block_size)
        self.name = f"sumzero({self.n_blocks}x{self.block_size})"

    def eval(self, x):
        total = self._blocks(x).sum(axis=0)
        return 0.0 if np.max(np.abs(total)) <= FEASIBILITY_TOL else PLUS_INF

    def _prox(self, x, gamma):
        blocks = self._blocks(x)
        return (blocks - blocks.mean(axis=0)).ravel()

    def conjugate(self):
        return ConsensusIndicator(self.n_blocks, self.block_size)


def IND_NONNEG() -> BoxIndicator:
    return BoxIndicator(0.0, np.inf)


# ============================================
# SMOOTH FUNCTIONS
# ============================================

class SmoothFn:
    """Differentiable convex function with beta-Lipschitz gradient."""

    name = 'smooth'
    beta = 0.0

    def eval(self, x) -> float:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def quadratic_form(self, n: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        return None

    def __repr__(self):
        return self.name


class ZeroSmooth(SmoothFn):
    name = 'zero'

    def eval(self, x):
        return 0.0

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=np.float64))

    def quadratic_form(self, n):
        return np.zeros((n, n)), np.zeros(n)


class SquaredDistance(ProxFn, SmoothFn):
    """(w/2) ||x - y||^2; smooth with beta = w and prox-able."""

    def __init__(self, w: float = 1.0, y=0.0):
        if not float(w) > 0:
            raise InvalidParameterError("squared-distance weight must be positive")
        self.w = float(w)
        self.y = _param(y, 'y')
        self.beta = self.w
        self.name = f"sq({self.w:g})"

    def eval(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * self.w * float(np.sum((x - _fit(self.y, x, 'y')) ** 2))

    def grad(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.w * (x - _fit(self.y, x, 'y'))

    def _prox(self, x, gamma):
        return (x + gamma * self.w * _fit(self.y, x, 'y')) / (1.0 + gamma * self.w)

    def conjugate(self):
        from .calculus import Tilt
        # ||u||^2 / (2w) + <u, y>
        return Tilt(SquaredDistance(1.0 / self.w, 0.0), self.y)

    def quadratic_form(self, n):
        y = np.broadcast_to(self.y, (n,)) if self.y.ndim == 0 else self.y
        return self.w * np.eye(n), self.w * np.asarray(y, dtype=np.float64)


class LeastSquares(SmoothFn):
    """(w/2) ||A x - b||^2 with beta = w ||A||^2 from the certified norm bound."""

    def __init__(self, A, b, w: float = 1.0):
        self.op = DenseOp(A)
        self.A = self.op.matrix
        self.b = as_vec(b, self.A.shape[0], 'b')
        if not float(w) > 0:
            raise InvalidParameterError("least-squares weight must be positive")
        self.w = float(w)
        self.beta = self.w * self.op.norm_bound ** 2
        self.name = f"lsq({self.A.shape[0]}x{self.A.shape[1]})"

    def eval(self, x):
        r = self.A @ np.asarray(x, dtype=np.float64) - self.b
        return 0.5 * self.w * float(r @ r)

    def grad(self, x):
        return self.w * (self.A.T @ (self.A @ np.asarray(x, dtype=np.float64) - self.b))

    def quadratic_form(self, n):
        if n != self.A.shape[1]:
            raise DimensionError(f"least-squares term acts on R^{self.A.shape[1]}, not R^{n}")
        return self.w * (self.A.T @ self.A), self.w * (self.A.T @ self.b)


def _fmt(arr: np.ndarray) -> str:
    if arr.ndim == 0:
        return f"{float(arr):g}"
    return 'vec'
