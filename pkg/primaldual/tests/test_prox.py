"""Tests for the prox catalog, Moreau's decomposition and the extended line."""

import numpy as np
import pytest

from primaldual.errors import InvalidSetError, InvalidStepError, UnsupportedFunctionError
from primaldual.prox import (
    IND_NONNEG,
    PLUS_INF,
    BoxIndicator,
    BoxSupport,
    ConsensusIndicator,
    IndicatorZero,
    L1Norm,
    LeastSquares,
    PowerFn,
    SquaredDistance,
    SumZeroIndicator,
    ZeroFn,
    conjugate_value_1d,
    ext_add,
    project_box,
    prox_conjugate,
    prox_l1,
    prox_power,
)
from primaldual.prox.extended import ext_scale, to_float

GAMMAS = (0.1, 1.0, 10.0)


def catalog():
    y = np.array([0.5, -1.0, 2.0, 0.0, 1.5, -0.25])
    return [
        ZeroFn(),
        IndicatorZero(),
        L1Norm(0.7),
        BoxIndicator(-1.0, 2.0),
        BoxSupport(-1.0, 2.0),
        IND_NONNEG(),
        SquaredDistance(2.0, y),
        PowerFn(3.0, 0.5),
        PowerFn(1.5, 2.0),
        PowerFn(1.0, 0.3),
        ConsensusIndicator(2, 3),
        SumZeroIndicator(3, 2),
    ]


# ============================================
# SCALAR PROX MAPS
# ============================================

def test_prox_l1_examples():
    assert prox_l1([3.0, -0.5, 0.0], 1.0).tolist() == [2.0, 0.0, 0.0]
    assert prox_l1([0.0], 5.0).tolist() == [0.0]
    assert prox_l1([-2.0], 3.0).tolist() == [0.0]


@pytest.mark.parametrize('gamma', [0.0, -1.0, np.inf, np.nan])
def test_invalid_step(gamma):
    with pytest.raises(InvalidStepError):
        prox_l1([1.0], gamma)
    with pytest.raises(InvalidStepError):
        L1Norm().prox([1.0], gamma)


def test_prox_power_closed_forms():
    assert prox_power([3.0], 0.5, 2.0)[0] == pytest.approx(1.5)
    assert prox_power([3.0], 1.0, 1.0)[0] == pytest.approx(2.0)


def test_prox_power_p4_against_grid():
    grid = np.linspace(0.0, 1.0, 1_000_001)
    target = grid[np.argmin(grid ** 4 + (grid - 1.0) ** 2 / 2)]
    assert prox_power([1.0], 1.0, 4.0)[0] == pytest.approx(target, abs=1e-5)
    assert prox_power([-1.0], 1.0, 4.0)[0] == pytest.approx(-target, abs=1e-5)


def test_prox_power_rejects_nonconvex():
    with pytest.raises(UnsupportedFunctionError):
        prox_power([1.0], 1.0, 0.5)
    with pytest.raises(UnsupportedFunctionError):
        PowerFn(0.9)


def test_project_box():
    assert project_box([2.0, -0.3], -1.0, 1.0).tolist() == [1.0, -0.3]
    assert project_box([0.2, 0.4], -1.0, 1.0).tolist() == [0.2, 0.4]
    with pytest.raises(InvalidSetError):
        project_box([0.0], 1.0, -1.0)
    with pytest.raises(InvalidSetError):
        BoxIndicator(2.0, 1.0)


def test_l1_conjugate_prox_is_box_projection(rng):
    x = 3 * rng.standard_normal(6)
    assert np.allclose(L1Norm(1.0).conjugate().prox(x, 0.7), project_box(x, -1.0, 1.0))


# ============================================
# CATALOG INVARIANTS
# ============================================

@pytest.mark.parametrize('fn', catalog(), ids=lambda f: f.name)
def test_moreau_identity(fn, rng):
    conj = fn.conjugate()
    for gamma in GAMMAS:
        for _ in range(100):
            x = 3 * rng.standard_normal(6)
            p = fn.prox(x, gamma)
            assert np.allclose(p + (x - p), x, rtol=0, atol=1e-12)
            two_sided = p + gamma * conj.prox(x / gamma, 1.0 / gamma) - x
            assert np.linalg.norm(two_sided) <= 1e-9 * (1 + np.linalg.norm(x))


@pytest.mark.parametrize('fn', catalog(), ids=lambda f: f.name)
def test_prox_optimality_condition(fn, rng):
    for gamma in GAMMAS:
        x = 3 * rng.standard_normal(6)
        p = fn.prox(x, gamma)
        lhs = ext_add(fn.eval(p), float(np.sum((p - x) ** 2)) / (2 * gamma))
        assert lhs is not PLUS_INF
        for _ in range(100):
            y = p + rng.standard_normal(6) * rng.choice([1e-3, 0.1, 1.0])
            rhs = ext_add(fn.eval(y), float(np.sum((y - x) ** 2)) / (2 * gamma), 1e-8)
            assert rhs is PLUS_INF or lhs <= rhs


@pytest.mark.parametrize('fn', catalog(), ids=lambda f: f.name)
def test_prox_is_nonexpansive(fn, rng):
    for _ in range(50):
        x, y = 3 * rng.standard_normal(6), 3 * rng.standard_normal(6)
        gap = np.linalg.norm(fn.prox(x, 1.0) - fn.prox(y, 1.0))
        assert gap <= np.linalg.norm(x - y) + 1e-12


def test_conjugate_tags():
    assert L1Norm(1.0).conjugate_tag.startswith('indicator')
    assert ConsensusIndicator(2, 2).conjugate_tag.startswith('sumzero')
    assert ZeroFn().conjugate_tag == 'indicator{0}'


# ============================================
# SMOOTH FUNCTIONS
# ============================================

def _central_diff(fn, x, h=1e-6):
    grad = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (fn.eval(x + e) - fn.eval(x - e)) / (2 * h)
    return grad


def test_smooth_gradients(rng):
    A = rng.standard_normal((4, 3))
    b = rng.standard_normal(4)
    for fn in (SquaredDistance(2.0, [1.0, 0.0, -1.0]), LeastSquares(A, b, 0.5)):
        x = rng.standard_normal(3)
        assert np.allclose(fn.grad(x), _central_diff(fn, x), rtol=1e-5, atol=1e-6)
        y = rng.standard_normal(3)
        lip = np.linalg.norm(fn.grad(x) - fn.grad(y)) / np.linalg.norm(x - y)
        assert lip <= fn.beta * (1 + 1e-9)


def test_least_squares_fermat_rule(rng):
    A = rng.standard_normal((6, 3))
    b = rng.standard_normal(6)
    fn = LeastSquares(A, b)
    x_star = np.linalg.lstsq(A, b, rcond=None)[0]
    assert np.linalg.norm(fn.grad(x_star)) < 1e-10


# ============================================
# MOREAU DECOMPOSITION
# ============================================

def test_prox_conjugate_examples(rng):
    x = rng.standard_normal(5)
    half_sq = SquaredDistance(1.0, 0.0)
    assert np.allclose(half_sq.conjugate().prox(x, 1.0), half_sq.prox(x, 1.0))
    assert np.allclose(prox_conjugate(IndicatorZero(), x, 2.0), x)
    for gamma in GAMMAS:
        residual = prox_conjugate(L1Norm(1.0), [2.0, -0.3], gamma)
        assert np.allclose(residual, np.clip([2.0, -0.3], -gamma, gamma))


def test_conjugate_value_1d_examples():
    value, bounded = conjugate_value_1d(SquaredDistance(1.0, 0.0), 3.0, (-10.0, 10.0, 20001))
    assert bounded and value == pytest.approx(4.5, abs=1e-6)

    value, bounded = conjugate_value_1d(L1Norm(1.0), 0.5, (-10.0, 10.0, 2001))
    assert bounded and value == pytest.approx(0.0, abs=1e-12)
    _, bounded = conjugate_value_1d(L1Norm(1.0), 2.0, (-10.0, 10.0, 2001))
    assert not bounded

    value, bounded = conjugate_value_1d(SquaredDistance(2.0, 1.0), 0.0, (-10.0, 10.0, 2001))
    assert bounded and value == pytest.approx(0.0, abs=1e-12)


# ============================================
# EXTENDED LINE
# ============================================

def test_plus_inf_arithmetic():
    assert ext_add(1.0, PLUS_INF) is PLUS_INF
    assert ext_add(1.0, 2.0) == 3.0
    assert ext_scale(3.0, PLUS_INF) is PLUS_INF
    assert PLUS_INF + 5 is PLUS_INF
    assert 2.0 < PLUS_INF and not PLUS_INF < 2.0
    assert to_float(PLUS_INF) == float('inf')
    with pytest.raises(ValueError):
        PLUS_INF * -1.0


def test_indicators_evaluate_to_plus_inf():
    assert IND_NONNEG().eval([1.0, -1.0]) is PLUS_INF
    assert IND_NONNEG().eval([1.0, 0.0]) == 0.0
    assert BoxSupport(-1.0, np.inf).eval([1.0]) is PLUS_INF
    assert BoxSupport(-1.0, np.inf).eval([-2.0]) == pytest.approx(2.0)
