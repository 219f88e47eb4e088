"""Unit conventions and the occupation/temperature dictionary.

Everything in the toolkit is expressed in two user-supplied scales:
``theta0``, the oscillator quantum in temperature units, and ``gamma``,
the weak-coupling decay constant (inverse time).  No physical constants
are hard-coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalScales:
    """Unit system: oscillator quantum ``theta0`` and decay constant ``gamma``.

    theta0 is the temperature equivalent of one oscillator quantum; gamma
    is the inverse-time relaxation scale.  Both must be positive and finite.
    """

    theta0: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.theta0) and self.theta0 > 0):
            raise ValueError(f"theta0 must be positive and finite, got {self.theta0}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")


def occupation_from_temperature(temperature: float, scales: PhysicalScales) -> float:
    """Mean thermal occupation 1/(exp(theta0/T) - 1) at absolute temperature T.

    Strictly increasing in T.  Raises ValueError for T <= 0 or non-finite T.
    """
    if not (math.isfinite(temperature) and temperature > 0):
        raise ValueError(f"temperature must be positive and finite, got {temperature}")
    return 1.0 / math.expm1(scales.theta0 / temperature)


def temperature_from_occupation(n_bar: float, scales: PhysicalScales) -> float:
    """Exact inverse of :func:`occupation_from_temperature`.

    Returns theta0 / ln(1 + 1/n_bar).  n_bar = 0 maps to T = 0, which is not
    representable; raises ValueError for n_bar <= 0 or non-finite n_bar.
    """
    if not (math.isfinite(n_bar) and n_bar > 0):
        raise ValueError(f"n_bar must be positive and finite, got {n_bar}")
    return scales.theta0 / math.log1p(1.0 / n_bar)


def high_temp_occupation(temperature: float, scales: PhysicalScales) -> float:
    """Classical-limit occupation T/theta0 (leading term for T >> theta0)."""
    if not (math.isfinite(temperature) and temperature > 0):
        raise ValueError(f"temperature must be positive and finite, got {temperature}")
    return temperature / scales.theta0
