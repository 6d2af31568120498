"""Arithmetic on the extended nonnegative reals [0, inf].

Every modular takes values here.  Infinity is a distinct state of the
value rather than a large float, so ``INF + x`` and ``c * INF`` are exact.
"""

from __future__ import annotations

import math
from functools import total_ordering
from numbers import Real
from typing import Union

__all__ = ["ExtNonNegReal", "INF", "ZERO", "ext", "add", "scale", "leq", "to_json", "from_json"]


@total_ordering
class ExtNonNegReal:
    """A value in [0, inf]; immutable and hashable."""

    __slots__ = ("_value", "_inf")

    def __init__(self, value: float = 0.0, *, infinite: bool = False):
        if infinite:
            object.__setattr__(self, "_inf", True)
            object.__setattr__(self, "_value", 0.0)
            return
        v = float(value)
        if math.isnan(v):
            raise ValueError("extended real cannot be NaN")
        if v < 0:
            raise ValueError(f"extended real must be nonnegative, got {v!r}")
        if math.isinf(v):
            object.__setattr__(self, "_inf", True)
            object.__setattr__(self, "_value", 0.0)
            return
        object.__setattr__(self, "_inf", False)
        # normalise -0.0
        object.__setattr__(self, "_value", v + 0.0)

    def __setattr__(self, name, value):
        raise AttributeError("ExtNonNegReal is immutable")

    @property
    def is_inf(self) -> bool:
        return self._inf

    @property
    def is_finite(self) -> bool:
        return not self._inf

    @property
    def value(self) -> float:
        """Finite payload; raises for infinity."""
        if self._inf:
            raise ValueError("infinite value has no finite payload")
        return self._value

    def __float__(self) -> float:
        return math.inf if self._inf else self._value

    def __repr__(self) -> str:
        return "ExtNonNegReal(inf)" if self._inf else f"ExtNonNegReal({self._value!r})"

    def __str__(self) -> str:
        return "inf" if self._inf else repr(self._value)

    def __hash__(self) -> int:
        return hash(math.inf) if self._inf else hash(self._value)

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._inf or other._inf:
            return self._inf and other._inf
        return self._value == other._value

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._inf:
            return False
        if other._inf:
            return True
        return self._value < other._value

    def __add__(self, other) -> ExtNonNegReal:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, c) -> ExtNonNegReal:
        if isinstance(c, ExtNonNegReal) or not isinstance(c, Real):
            return NotImplemented
        return scale(c, self)

    __rmul__ = __mul__

    def __truediv__(self, c) -> ExtNonNegReal:
        """Division by a strictly positive finite scalar."""
        if isinstance(c, ExtNonNegReal) or not isinstance(c, Real):
            return NotImplemented
        c = _check_scalar(c)
        if self._inf:
            return INF
        return ExtNonNegReal(self._value / c)


ExtLike = Union[ExtNonNegReal, float, int]

INF = ExtNonNegReal(infinite=True)
ZERO = ExtNonNegReal(0.0)


def _coerce(x):
    if isinstance(x, ExtNonNegReal):
        return x
    if isinstance(x, Real):
        try:
            return ExtNonNegReal(x)
        except ValueError:
            return NotImplemented
    return NotImplemented


def _check_scalar(c) -> float:
    c = float(c)
    if not math.isfinite(c) or c <= 0:
        raise ValueError(f"scalar must be strictly positive and finite, got {c!r}")
    return c


def ext(x: ExtLike) -> ExtNonNegReal:
    """Coerce a float, int or ``ExtNonNegReal`` (``float('inf')`` maps to INF)."""
    if isinstance(x, ExtNonNegReal):
        return x
    return ExtNonNegReal(x)


def add(a: ExtLike, b: ExtLike) -> ExtNonNegReal:
    a, b = ext(a), ext(b)
    if a.is_inf or b.is_inf:
        return INF
    return ExtNonNegReal(a.value + b.value)


def scale(c: float, a: ExtLike) -> ExtNonNegReal:
    """``c * a`` for ``0 < c < inf``; ``0 * inf`` is left undefined on purpose."""
    c = _check_scalar(c)
    a = ext(a)
    if a.is_inf:
        return INF
    return ExtNonNegReal(c * a.value)


def leq(a: ExtLike, b: ExtLike) -> bool:
    return ext(a) <= ext(b)


def to_json(a: ExtLike):
    """Finite values become a JSON float (17 significant digits round trip), infinity the string ``"inf"``."""
    a = ext(a)
    return "inf" if a.is_inf else a.value


def from_json(v) -> ExtNonNegReal:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        return ExtNonNegReal(float(v))
    return ExtNonNegReal(v)
