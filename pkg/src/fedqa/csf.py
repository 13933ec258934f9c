"""Contrast sensitivity model and foveation-based error sensitivity.

The contrast threshold grows exponentially with spatial frequency and
eccentricity; its reciprocal is the contrast sensitivity. Error sensitivity is
the sensitivity at eccentricity ``e`` relative to the fovea, cut off at the
frequency where either nothing is detectable at full contrast (critical
frequency) or the display cannot represent the frequency (Nyquist).

All functions broadcast over numpy arrays; frequencies are in cycles/degree
and eccentricities in degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CsfParams",
    "contrast_threshold",
    "contrast_sensitivity",
    "critical_frequency",
    "cutoff_frequency",
    "error_sensitivity",
]


@dataclass(frozen=True)
class CsfParams:
    """Contrast sensitivity model constants.

    Parameters
    ----------
    ct0 : float
        Minimal contrast threshold at the fovea, in ``(0, 1)``.
    alpha : float
        Spatial frequency decay constant.
    e2 : float
        Half-resolution eccentricity in degrees.
    rounded_decay : bool
        Use the rounded decay constant 0.0461 in the error sensitivity
        exponent instead of the exact ``alpha / e2``. The exact form keeps
        the sensitivity identical to the contrast-sensitivity ratio
        ``CS(f, e) / CS(f, 0)``; the rounded one deviates by ~1e-4.
    """

    ct0: float = 1.0 / 64.0
    alpha: float = 0.106
    e2: float = 2.3
    rounded_decay: bool = False

    def __post_init__(self):
        if not 0.0 < self.ct0 < 1.0:
            raise ValueError(f"ct0 must be in (0, 1), got {self.ct0}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.e2 <= 0:
            raise ValueError(f"e2 must be > 0, got {self.e2}")

    @property
    def decay_constant(self) -> float:
        """Exponential decay rate of error sensitivity with ``f * e``."""
        return 0.0461 if self.rounded_decay else self.alpha / self.e2


def contrast_threshold(f, e, params: CsfParams = CsfParams()):
    """Minimum detectable contrast at frequency ``f`` and eccentricity ``e``.

    ``CT = ct0 * exp(alpha * f * (e + e2) / e2)``; always >= ``ct0``.
    """
    f = np.asarray(f, dtype=float)
    e = np.asarray(e, dtype=float)
    return params.ct0 * np.exp(params.alpha * f * (e + params.e2) / params.e2)


def contrast_sensitivity(f, e, params: CsfParams = CsfParams()):
    """Reciprocal of the contrast threshold."""
    return 1.0 / contrast_threshold(f, e, params)


def critical_frequency(e, params: CsfParams = CsfParams()):
    """Highest detectable frequency at eccentricity ``e`` (cycles/degree).

    Obtained by solving ``CT(f, e) = 1`` (maximum possible contrast):
    ``f_c = e2 * ln(1 / ct0) / ((e + e2) * alpha)``. Strictly decreasing
    in ``e``.
    """
    e = np.asarray(e, dtype=float)
    return params.e2 * math.log(1.0 / params.ct0) / ((e + params.e2) * params.alpha)


def cutoff_frequency(e, nyquist_freq, params: CsfParams = CsfParams()):
    """Combined cutoff: min of critical frequency and display Nyquist."""
    return np.minimum(critical_frequency(e, params), nyquist_freq)


def error_sensitivity(f, e, nyquist_freq, params: CsfParams = CsfParams()):
    """Foveation-based error sensitivity in ``[0, 1]``.

    Equals ``CS(f, e) / CS(f, 0) = exp(-decay * f * e)`` within the passband
    ``f <= f_m(e)`` and 0 above the cutoff. The cutoff is inclusive: at
    exactly ``f = f_m(e)`` the sensitivity is nonzero.
    """
    f = np.asarray(f, dtype=float)
    e = np.asarray(e, dtype=float)
    fm = cutoff_frequency(e, nyquist_freq, params)
    s = np.exp(-params.decay_constant * f * e)
    return np.where(f <= fm, s, 0.0)
