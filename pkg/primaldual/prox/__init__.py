"""Proximity operators, conjugate calculus and smooth functions"""
from .calculus import (
    Offset, Reflect, ScaleArg, ScaleFn, Separable, Tilt, Translate,
    calculus_linear_tilt, calculus_offset, calculus_reflect, calculus_scale_arg,
    calculus_scale_fn, calculus_separable, calculus_translate, conjugate_value_1d,
    prox_conjugate, prox_of_conjugate, sum_conjugate_tag, support_indicator_pair,
)
from .extended import PLUS_INF, PlusInfinity, ext_add, is_inf, to_float
from .functions import (
    IND_NONNEG, BoxIndicator, BoxSupport, ConsensusIndicator, IndicatorZero, L1Norm,
    LeastSquares, PowerFn, ProxFn, SmoothFn, SquaredDistance, SumZeroIndicator,
    ZeroFn, ZeroSmooth, check_step, project_box, prox_l1, prox_power,
)
