"""Positive reals stored as ``mantissa * exp(log_scale)``.

Capacities and admittances carry factors like ``exp(-F/eps)`` that leave
double range long before the prefactor does, so the two are kept apart.
"""
from __future__ import annotations

import math
from typing import NamedTuple


class LogReal(NamedTuple):
    mantissa: float
    log_scale: float = 0.0

    @classmethod
    def from_log(cls, log_value: float) -> "LogReal":
        if log_value == -math.inf:
            return cls(0.0, 0.0)
        return cls(1.0, float(log_value))

    @classmethod
    def from_value(cls, value: float) -> "LogReal":
        return cls(float(value), 0.0)

    @property
    def log(self) -> float:
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(self.mantissa) + self.log_scale

    @property
    def value(self) -> float:
        """Plain float; may under/overflow."""
        if self.mantissa == 0.0:
            return 0.0
        try:
            return self.mantissa * math.exp(self.log_scale)
        except OverflowError:
            return math.inf

    def normalized(self) -> "LogReal":
        """Equivalent pair with ``log_scale`` absorbing everything but the mantissa's sign-free digits."""
        if self.mantissa == 0.0:
            return LogReal(0.0, 0.0)
        m, e = math.frexp(self.mantissa)
        return LogReal(m, self.log_scale + e * math.log(2.0))

    def __mul__(self, other):  # type: ignore[override]
        if isinstance(other, LogReal):
            return LogReal(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
        return LogReal(self.mantissa * float(other), self.log_scale)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LogReal):
            return LogReal(self.mantissa / other.mantissa, self.log_scale - other.log_scale)
        return LogReal(self.mantissa / float(other), self.log_scale)

    def rescale(self, log_scale: float) -> "LogReal":
        """Same value expressed with the given ``log_scale``."""
        if self.mantissa == 0.0:
            return LogReal(0.0, log_scale)
        return LogReal(self.mantissa * math.exp(self.log_scale - log_scale), log_scale)
