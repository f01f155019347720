"""Extended real line: an explicit +inf that never enters float arithmetic."""

from typing import Union


class PlusInfinity:
    """Absorbing +inf value returned by indicator-type functions."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        if isinstance(other, (int, float, PlusInfinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, float)) and other > 0:
            return self
        raise ValueError(f"+inf times {other} is undefined on the extended line used here")

    __rmul__ = __mul__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash('PLUS_INF')

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __float__(self):
        return float('inf')

    def __repr__(self):
        return '+inf'


PLUS_INF = PlusInfinity()

ExtReal = Union[float, PlusInfinity]


def is_inf(value) -> bool:
    return value is PLUS_INF


def ext_add(*values) -> ExtReal:
    total = 0.0
    for value in values:
        if value is PLUS_INF:
            return PLUS_INF
        total += float(value)
    return total


def ext_scale(alpha: float, value) -> ExtReal:
    """alpha * value for alpha > 0."""
    return PLUS_INF if value is PLUS_INF else alpha * float(value)


def to_float(value) -> float:
    """Leave the extended line; only for output files and summaries."""
    return float('inf') if value is PLUS_INF else float(value)
