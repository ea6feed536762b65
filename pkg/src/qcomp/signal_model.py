"""Continuous-wave Doppler radar signal model.

Velocities are handled in physical units at the API boundary and converted to
normalized frequencies ``f = v / P`` in ``[-1/2, 1/2)`` for the inner loops,
where ``P = c / (2 f0 Ts)`` is the unambiguous velocity span.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class RadarConfig:
    """Carrier, sampling period and number of slow-time samples.

    Attributes:
        f0: carrier frequency in Hz.
        ts: sampling period in seconds.
        m_samples: number of samples M.
        c: propagation speed in m/s.
    """

    f0: float
    ts: float
    m_samples: int
    c: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not (self.f0 > 0 and self.ts > 0 and self.c > 0):
            raise ValueError("f0, ts and c must be positive")
        if int(self.m_samples) != self.m_samples or self.m_samples < 1:
            raise ValueError("m_samples must be a positive integer")
        object.__setattr__(self, "m_samples", int(self.m_samples))

    @classmethod
    def normalized(cls, m_samples: int = 256) -> "RadarConfig":
        """Unit-span configuration (P = 1), velocities in span units."""
        return cls(f0=0.5, ts=1.0, m_samples=m_samples, c=1.0)

    @property
    def span(self) -> float:
        """Unambiguous velocity span P."""
        return self.c / (2.0 * self.f0 * self.ts)

    @property
    def resolution(self) -> float:
        """Main-lobe width R = P / M."""
        return self.span / self.m_samples

    @property
    def velocity_domain(self) -> tuple[float, float]:
        """Half-open interval ``[-P/2, P/2)``."""
        p = self.span
        return -p / 2.0, p / 2.0

    def wrap(self, v):
        """Wrap velocities into ``[-P/2, P/2)``."""
        p = self.span
        return (np.asarray(v, dtype=float) + p / 2.0) % p - p / 2.0

    def to_frequency(self, v):
        """Normalized frequency ``v / P`` wrapped into ``[-1/2, 1/2)``."""
        return (np.asarray(v, dtype=float) / self.span + 0.5) % 1.0 - 0.5


@dataclass(frozen=True)
class Target:
    alpha: complex
    v: float


@dataclass(frozen=True)
class Scene:
    targets: tuple[Target, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(self.targets) < 1:
            raise ValueError("a scene needs at least one target")

    @property
    def k(self) -> int:
        return len(self.targets)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([t.alpha for t in self.targets], dtype=complex)

    @property
    def velocities(self) -> np.ndarray:
        return np.array([t.v for t in self.targets], dtype=float)

    @classmethod
    def from_arrays(cls, cfg: RadarConfig, alphas: Sequence[complex], velocities: Sequence[float]) -> "Scene":
        """Build a scene, wrapping each velocity into the radar's domain."""
        vs = np.atleast_1d(cfg.wrap(velocities))
        alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
        if alphas.shape != vs.shape:
            raise ValueError("alphas and velocities must have the same length")
        return cls(tuple(Target(complex(a), float(v)) for a, v in zip(alphas, vs)))


def _phase_ramp(freqs: np.ndarray, m_samples: int) -> np.ndarray:
    m = np.arange(m_samples)
    return np.exp(-2j * np.pi * np.multiply.outer(freqs, m))


def steering_atom(cfg: RadarConfig, v: float) -> np.ndarray:
    """Sampled echo of a unit-gain target at velocity ``v``.

    Sample ``m`` (``m = 0 .. M-1``) is ``exp(-2i pi (v/P) m)``.
    """
    if not np.isfinite(v):
        raise ValueError("velocity must be finite")
    return _phase_ramp(cfg.to_frequency(v), cfg.m_samples)


def steering_matrix(cfg: RadarConfig, velocities) -> np.ndarray:
    """Atoms for several velocities stacked as columns (M x len(velocities))."""
    f = np.atleast_1d(cfg.to_frequency(velocities))
    return _phase_ramp(f, cfg.m_samples).T


def synthesize(cfg: RadarConfig, scene: Scene) -> np.ndarray:
    """Noiseless received signal: gain-weighted sum of the targets' atoms."""
    return steering_matrix(cfg, scene.velocities) @ scene.alphas


def sample_scene(cfg: RadarConfig, k: int, rng: np.random.Generator,
                 min_separation: float = 0.0) -> Scene:
    """Draw ``k`` targets with CN(0, 1) gains and velocities uniform on the domain.

    ``min_separation`` (velocity units, torus distance) rejects and redraws
    velocity sets whose closest pair is nearer than the floor. Zero disables it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    alphas = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2.0)
    lo, hi = cfg.velocity_domain
    p = cfg.span
    if min_separation > 0 and k * min_separation >= p:
        raise ValueError("min_separation too large for k targets")
    while True:
        vs = rng.uniform(lo, hi, size=k)
        if min_separation <= 0 or k == 1:
            break
        d = np.abs(vs[:, None] - vs[None, :]) % p
        d = np.minimum(d, p - d)
        if d[np.triu_indices(k, 1)].min() >= min_separation:
            break
    return Scene.from_arrays(cfg, alphas, vs)
