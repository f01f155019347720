"""
Conjugate Calculus
==================

Combinators that transform a ProxFn together with its prox map and its
conjugate, plus Moreau's decomposition and a grid oracle for conjugates.

Each combinator pairs a transformation of f with the matching
transformation of f*:

    f(x - c)          <->  f*(u) + <u, c>
    f(x) + <x, c>     <->  f*(u - c)
    alpha f(x)        <->  alpha f*(u / alpha)
    f(x / alpha)      <->  f*(alpha u)
    f(-x)             <->  f*(-u)
    sum_j f_j(x_j)    <->  sum_j f_j*(u_j)
    f(x) + alpha      <->  f*(u) - alpha
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import DimensionError, InvalidParameterError, InvalidSetError
from .extended import PLUS_INF, ext_add, ext_scale
from .functions import BoxIndicator, BoxSupport, ProxFn, _param, check_step

logger = logging.getLogger(__name__)


class Translate(ProxFn):
    def __init__(self, f: ProxFn, c):
        self.f = f
        self.c = _param(c, 'shift')
        self.name = f"translate({f.name})"

    def eval(self, x):
        return self.f.eval(np.asarray(x, dtype=np.float64) - self.c)

    def _prox(self, x, gamma):
        return self.c + self.f.prox(x - self.c, gamma)

    def conjugate(self):
        return Tilt(self.f.conjugate(), self.c)


class Tilt(ProxFn):
    """f(x) + <x, c>."""

    def __init__(self, f: ProxFn, c):
        self.f = f
        self.c = _param(c, 'tilt')
        self.name = f"tilt({f.name})"

    def eval(self, x):
        x = np.asarray(x, dtype=np.float64)
        return ext_add(self.f.eval(x), float(np.sum(x * self.c)))

    def _prox(self, x, gamma):
        return self.f.prox(x - gamma * self.c, gamma)

    def conjugate(self):
        return Translate(self.f.conjugate(), self.c)


class ScaleFn(ProxFn):
    """alpha f(x), alpha > 0."""

    def __init__(self, f: ProxFn, alpha: float):
        alpha = float(alpha)
        if not (np.isfinite(alpha) and alpha > 0):
            raise InvalidParameterError(f"function scale must be in ]0, inf[, got {alpha}")
        self.f = f
        self.alpha = alpha
        self.name = f"scale_fn({f.name},{alpha:g})"

    def eval(self, x):
        return ext_scale(self.alpha, self.f.eval(x))

    def _prox(self, x, gamma):
        return self.f.prox(x, gamma * self.alpha)

    def conjugate(self):
        return ScaleFn(ScaleArg(self.f.conjugate(), self.alpha), self.alpha)

    def quadratic_form(self, n):
        form = self.f.quadratic_form(n)
        return None if form is None else (self.alpha * form[0], self.alpha * form[1])


class ScaleArg(ProxFn):
    """f(x / alpha), alpha != 0."""

    def __init__(self, f: ProxFn, alpha: float):
        alpha = float(alpha)
        if not np.isfinite(alpha) or alpha == 0:
            raise InvalidParameterError(f"argument scale must be nonzero and finite, got {alpha}")
        self.f = f
        self.alpha = alpha
        self.name = f"scale_arg({f.name},{alpha:g})"

    def eval(self, x):
        return self.f.eval(np.asarray(x, dtype=np.float64) / self.alpha)

    def _prox(self, x, gamma):
        return self.alpha * self.f.prox(x / self.alpha, gamma / self.alpha ** 2)

    def conjugate(self):
        return ScaleArg(self.f.conjugate(), 1.0 / self.alpha)


class Reflect(ProxFn):
    def __init__(self, f: ProxFn):
        self.f = f
        self.name = f"reflect({f.name})"

    def eval(self, x):
        return self.f.eval(-np.asarray(x, dtype=np.float64))

    def _prox(self, x, gamma):
        return -self.f.prox(-x, gamma)

    def conjugate(self):
        return Reflect(self.f.conjugate())


class Offset(ProxFn):
    """f(x) + alpha; the prox is unchanged."""

    def __init__(self, f: ProxFn, alpha: float):
        self.f = f
        self.alpha = float(alpha)
        self.name = f"offset({f.name},{self.alpha:g})"

    def eval(self, x):
        return ext_add(self.f.eval(x), self.alpha)

    def _prox(self, x, gamma):
        return self.f.prox(x, gamma)

    def conjugate(self):
        return Offset(self.f.conjugate(), -self.alpha)

    def quadratic_form(self, n):
        return self.f.quadratic_form(n)


class Separable(ProxFn):
    """
    sum_m f_m(x_m) over consecutive blocks x = (x_1, ..., x_M).

    Block prox calls are independent; ``map_fn`` may be a thread-pool map, and
    results are always concatenated in ascending block order.
    """

    def __init__(self, fns: Sequence[ProxFn], sizes: Sequence[int] = None, map_fn=map):
        self.fns = list(fns)
        if not self.fns:
            raise InvalidParameterError("separable sum needs at least one component")
        self.sizes = [1] * len(self.fns) if sizes is None else [int(s) for s in sizes]
        if len(self.sizes) != len(self.fns) or any(s < 1 for s in self.sizes):
            raise DimensionError("one positive block size per component is required")
        self.offsets = np.cumsum([0] + self.sizes)
        self.map_fn = map_fn
        self.name = f"separable({','.join(f.name for f in self.fns)})"

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def split(self, x) -> List[np.ndarray]:
        x = np.asarray(x, dtype=np.float64)
        if x.size != self.size:
            raise DimensionError(f"separable function acts on R^{self.size}, got length {x.size}")
        return [x[self.offsets[m]:self.offsets[m + 1]] for m in range(len(self.fns))]

    def eval(self, x):
        return ext_add(*[f.eval(part) for f, part in zip(self.fns, self.split(x))])

    def _prox(self, x, gamma):
        parts = self.split(x)
        results = list(self.map_fn(lambda m: self.fns[m].prox(parts[m], gamma), range(len(self.fns))))
        return np.concatenate(results)

    def conjugate(self):
        return Separable([f.conjugate() for f in self.fns], self.sizes, self.map_fn)


# ============================================
# CALCULUS ENTRY POINTS
# ============================================

def calculus_translate(f: ProxFn, c) -> ProxFn:
    return Translate(f, c)


def calculus_linear_tilt(f: ProxFn, c) -> ProxFn:
    return Tilt(f, c)


def calculus_scale_fn(f: ProxFn, alpha: float) -> ProxFn:
    return ScaleFn(f, alpha)


def calculus_scale_arg(f: ProxFn, alpha: float) -> ProxFn:
    return ScaleArg(f, alpha)


def calculus_reflect(f: ProxFn) -> ProxFn:
    return Reflect(f)


def calculus_separable(fns: Sequence[ProxFn]) -> ProxFn:
    """Separable sum of scalar functions, one per coordinate."""
    return Separable(fns)


def calculus_offset(f: ProxFn, alpha: float) -> ProxFn:
    return Offset(f, alpha)


def sum_conjugate_tag(f: ProxFn, g: ProxFn) -> str:
    """
    Name the conjugate of f + g as an inf-convolution of conjugates.

    Only a label: the inf-convolution is never evaluated, and the identity
    holds under dom f ∩ int(dom g) ≠ ∅, which is not checked.
    """
    return f"infconv({f.conjugate_tag or f.name + '*'},{g.conjugate_tag or g.name + '*'})"


def support_indicator_pair(lo, hi) -> Tuple[BoxSupport, BoxIndicator]:
    """
    Support function of the box C = [lo, hi] and the indicator of C.

    The pair is conjugate: (sigma_C)* = iota_C. With C = [-lam, lam]^N the
    support function is lam ||.||_1.

    Args:
        lo: Lower corner (scalar or vector)
        hi: Upper corner (scalar or vector)

    Returns:
        (sigma_C, iota_C)
    """
    lo_arr = np.asarray(lo, dtype=np.float64)
    hi_arr = np.asarray(hi, dtype=np.float64)
    if np.any(lo_arr > hi_arr):
        raise InvalidSetError("box is empty: lo > hi in some coordinate")
    return BoxSupport(lo_arr, hi_arr), BoxIndicator(lo_arr, hi_arr)


# ============================================
# MOREAU DECOMPOSITION
# ============================================

def prox_conjugate(f: ProxFn, x, gamma: float) -> np.ndarray:
    """
    Moreau complement x - prox_{gamma f}(x).

    Equals gamma * prox_{f*/gamma}(x / gamma); divide by gamma to get the prox
    of f* with step 1/gamma.
    """
    gamma = check_step(gamma)
    x = np.asarray(x, dtype=np.float64)
    return x - f.prox(x, gamma)


def prox_of_conjugate(f: ProxFn, u, step: float) -> np.ndarray:
    """prox_{step f*}(u) = u - step prox_{f/step}(u / step)."""
    step = check_step(step)
    u = np.asarray(u, dtype=np.float64)
    return u - step * f.prox(u / step, 1.0 / step)


def conjugate_value_1d(f: ProxFn, u: float, grid) -> Tuple[float, bool]:
    """
    Grid estimate of f*(u) = sup_x u x - f(x) for a scalar function.

    Test oracle only. The second value is False when the maximizer sits on a
    grid endpoint where f is finite, meaning the sup looks unbounded.

    Args:
        f: Scalar ProxFn
        u: Dual point
        grid: Array of abscissae, or (start, stop, count)

    Returns:
        (estimate, bounded)
    """
    if isinstance(grid, tuple):
        grid = np.linspace(*grid)
    grid = np.asarray(grid, dtype=np.float64)
    values = np.full(grid.size, -np.inf)
    for i, x in enumerate(grid):
        fx = f.eval(np.array([x]))
        if fx is not PLUS_INF:
            values[i] = u * x - fx
    if not np.any(np.isfinite(values)):
        raise InvalidSetError("function is +inf on the whole grid")
    best = int(np.argmax(values))
    bounded = best not in (0, grid.size - 1)
    return float(values[best]), bounded
