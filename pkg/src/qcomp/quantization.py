"""1-bit complex quantization with optional uniform dithering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class Dither:
    """Stored dither vector ``xi`` with components uniform on ``[-delta/2, delta/2]``."""

    xi: np.ndarray
    delta: float

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=complex)
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        h = self.delta / 2.0
        if np.any(np.abs(xi.real) > h) or np.any(np.abs(xi.imag) > h):
            raise ValueError("dither components must lie in [-delta/2, delta/2]")


@dataclass(frozen=True)
class MeasurementChannel:
    """How the receiver digitizes the signal.

    ``delta is None`` means full resolution (identity). Otherwise the channel
    is the 1-bit quantizer of resolution ``delta``, applied after adding the
    stored ``dither`` when one is present.
    """

    delta: Optional[float] = None
    dither: Optional[Dither] = None

    def __post_init__(self):
        if self.delta is None:
            if self.dither is not None:
                raise ValueError("a full-resolution channel takes no dither")
        elif not self.delta > 0:
            raise ValueError("delta must be positive")

    @classmethod
    def full_resolution(cls) -> "MeasurementChannel":
        return cls()

    @classmethod
    def one_bit(cls, delta: float, dither: Optional[Dither] = None) -> "MeasurementChannel":
        return cls(delta=float(delta), dither=dither)

    @property
    def is_quantized(self) -> bool:
        return self.delta is not None

    @property
    def kind(self) -> str:
        if self.delta is None:
            return "full"
        return "onebit" if self.dither is None else "onebit_dither"

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return apply_channel(self, y)


def _sign(x: np.ndarray) -> np.ndarray:
    # sign(0) := +1
    return np.where(x >= 0, 1.0, -1.0)


def quantize(delta: float, y: np.ndarray) -> np.ndarray:
    """Keep the signs of the I and Q components, scaled to ``+-delta/2``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    y = np.asarray(y, dtype=complex)
    h = delta / 2.0
    return h * _sign(y.real) + 1j * h * _sign(y.imag)


def choose_delta(y: np.ndarray) -> float:
    """Smallest admissible resolution, twice the peak modulus of ``y``."""
    peak = float(np.max(np.abs(y)))
    if peak == 0.0:
        raise ValueError("cannot choose delta for an all-zero signal")
    return 2.0 * peak


def draw_dither(delta: float, m: int, rng: np.random.Generator) -> Dither:
    """Draw a complex dither of length ``m``, I and Q i.i.d. uniform on ``[-delta/2, delta/2)``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    h = delta / 2.0
    re = rng.uniform(-h, h, size=m)
    im = rng.uniform(-h, h, size=m)
    return Dither(re + 1j * im, float(delta))


def apply_channel(ch: MeasurementChannel, y: np.ndarray) -> np.ndarray:
    """Measure ``y`` through ``ch``; the stored dither is reused on every call."""
    y = np.asarray(y, dtype=complex)
    if ch.delta is None:
        return y.copy()
    if ch.dither is None:
        return quantize(ch.delta, y)
    if ch.dither.xi.shape != y.shape:
        raise ValueError(f"dither length {ch.dither.xi.shape} does not match signal {y.shape}")
    return quantize(ch.delta, y + ch.dither.xi)
