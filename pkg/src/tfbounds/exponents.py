"""Lebesgue exponents in ``[1, inf]`` with exact reciprocal arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

from .errors import ExponentOutOfRange

__all__ = ["ExtReal", "INF"]

_INF_WORDS = {"inf", "infinity", "oo", "∞", "+inf"}


@total_ordering
@dataclass(frozen=True)
class ExtReal:
    """An exponent in ``[1, inf]``; ``value is None`` encodes infinity.

    Ordering and arithmetic go through the reciprocal, with ``1/inf = 0``.
    """

    value: Optional[Fraction]

    def __post_init__(self):
        if self.value is not None:
            v = Fraction(self.value)
            if v < 1:
                raise ExponentOutOfRange(f"exponent {v} is below 1")
            object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, x: Union["ExtReal", int, float, str, Fraction]) -> "ExtReal":
        if isinstance(x, ExtReal):
            return x
        if isinstance(x, str):
            s = x.strip().lower()
            if s in _INF_WORDS:
                return cls(None)
            try:
                value = Fraction(s)
            except (ValueError, ZeroDivisionError) as exc:
                raise ExponentOutOfRange(f"cannot parse exponent {x!r}") from exc
            return cls(value)
        if isinstance(x, float):
            if math.isinf(x) and x > 0:
                return cls(None)
            if not math.isfinite(x):
                raise ExponentOutOfRange(f"invalid exponent {x!r}")
            return cls(Fraction(x).limit_denominator(10**6))
        if isinstance(x, (int, Fraction)):
            return cls(Fraction(x))
        raise ExponentOutOfRange(f"cannot interpret {x!r} as an exponent")

    @property
    def is_inf(self) -> bool:
        return self.value is None

    @property
    def reciprocal(self) -> Fraction:
        return Fraction(0) if self.value is None else 1 / self.value

    def __float__(self) -> float:
        return math.inf if self.value is None else float(self.value)

    def __lt__(self, other) -> bool:
        return self.reciprocal > ExtReal.parse(other).reciprocal

    def __eq__(self, other) -> bool:
        try:
            return self.reciprocal == ExtReal.parse(other).reciprocal
        except ExponentOutOfRange:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.reciprocal)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return f"ExtReal({self})"


INF = ExtReal(None)
