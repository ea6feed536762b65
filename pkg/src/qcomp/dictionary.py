"""Velocity grid and Taylor interpolant dictionaries.

Each grid bin ``n`` carries a block ``D_n`` of ``I`` columns: the atom at the
bin velocity followed by its first ``I - 1`` derivatives with respect to
velocity. An off-grid atom at deviation ``t`` from the bin is approximated by
``D_n @ mapping(scheme, t)`` with the Taylor coefficients ``t**i / i!``.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .signal_model import RadarConfig, steering_matrix


class InterpolationScheme(str, enum.Enum):
    NONE = "none"
    TAYLOR1 = "taylor1"
    TAYLOR2 = "taylor2"

    @property
    def order(self) -> int:
        """Number of interpolant atoms per bin (I)."""
        return {"none": 1, "taylor1": 2, "taylor2": 3}[self.value]

    @classmethod
    def parse(cls, value) -> "InterpolationScheme":
        return value if isinstance(value, cls) else cls(str(value).lower())


@dataclass(frozen=True)
class Grid:
    """Uniform grid anchored at the left edge of the velocity domain."""

    span: float
    n_bins: int
    m_samples: int

    @property
    def step(self) -> float:
        return self.span / self.n_bins

    @property
    def bins(self) -> np.ndarray:
        return -self.span / 2.0 + np.arange(self.n_bins) * self.step

    @property
    def density(self) -> float:
        """Grid density N / M."""
        return self.n_bins / self.m_samples

    def nearest(self, v: float) -> int:
        """Index of the torus-nearest bin to ``v`` (ties go to the lower index)."""
        k = (v + self.span / 2.0) / self.step
        lo = int(math.floor(k)) % self.n_bins
        frac = k - math.floor(k)
        return lo if frac <= 0.5 else (lo + 1) % self.n_bins


@dataclass(frozen=True, eq=False)
class InterpolatedDictionary:
    """Grid plus per-bin interpolant blocks.

    Attributes:
        cfg: radar configuration the atoms were sampled for.
        grid: the velocity grid.
        scheme: interpolation scheme.
        blocks: complex array of shape ``(N, M, I)``; ``blocks[n]`` is ``D_n``.
    """

    cfg: RadarConfig
    grid: Grid
    scheme: InterpolationScheme
    blocks: np.ndarray

    @property
    def order(self) -> int:
        return self.scheme.order

    @functools.cached_property
    def atoms(self) -> np.ndarray:
        """On-grid atoms as an ``M x N`` matrix (first column of each block)."""
        a = np.ascontiguousarray(self.blocks[:, :, 0].T)
        a.setflags(write=False)
        return a

    @functools.cached_property
    def atoms_h(self) -> np.ndarray:
        """Conjugate transpose of :attr:`atoms`, cached for correlation scans."""
        a = np.ascontiguousarray(self.atoms.conj().T)
        a.setflags(write=False)
        return a

    def correlate(self, r: np.ndarray) -> np.ndarray:
        """Inner products ``<a(bin_n), r>`` for every bin, via one inverse FFT.

        With bins at ``-1/2 + n/N`` in normalized frequency the correlation is
        ``sum_m r_m (-1)^m exp(2i pi n m / N)``; samples are folded modulo N
        first so that coarse grids (N < M) work too.
        """
        n_bins, m = self.grid.n_bins, self.cfg.m_samples
        x = np.asarray(r, dtype=complex) * np.where(np.arange(m) % 2, -1.0, 1.0)
        if n_bins < m:
            pad = (-m) % n_bins
            x = np.concatenate([x, np.zeros(pad, dtype=complex)]).reshape(-1, n_bins).sum(axis=0)
        return n_bins * np.fft.ifft(x, n=n_bins)

    def block(self, n: int) -> np.ndarray:
        return self.blocks[n]

    def stacked(self, bins) -> np.ndarray:
        """Concatenate ``D_n`` for the given bins into an ``M x (k I)`` matrix."""
        return np.concatenate([self.blocks[n] for n in bins], axis=1)


def mapping(scheme, t: float) -> np.ndarray:
    """Taylor coefficients ``(1, t, t**2/2, ...)`` of length I for deviation ``t``."""
    scheme = InterpolationScheme.parse(scheme)
    return np.array([t**i / math.factorial(i) for i in range(scheme.order)], dtype=float)


def mapping_matrix(scheme, ts: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mapping`: returns ``(len(ts), I)``."""
    scheme = InterpolationScheme.parse(scheme)
    ts = np.asarray(ts, dtype=float)
    return np.stack([ts**i / math.factorial(i) for i in range(scheme.order)], axis=-1)


@functools.lru_cache(maxsize=32)
def _build(cfg: RadarConfig, n_bins: int, scheme: InterpolationScheme) -> InterpolatedDictionary:
    grid = Grid(cfg.span, n_bins, cfg.m_samples)
    a = steering_matrix(cfg, grid.bins).T  # (N, M)
    # d/dv exp(-2i pi v m / P) = (-2i pi m / P) exp(...)
    w = -2j * np.pi * np.arange(cfg.m_samples) / cfg.span
    blocks = np.empty((n_bins, cfg.m_samples, scheme.order), dtype=complex)
    for i in range(scheme.order):
        blocks[:, :, i] = a * w**i
    blocks.setflags(write=False)
    return InterpolatedDictionary(cfg, grid, scheme, blocks)


def build_dictionary(cfg: RadarConfig, n_bins: int, scheme) -> InterpolatedDictionary:
    """Build (or fetch from cache) the interpolated dictionary for ``n_bins`` bins."""
    if int(n_bins) != n_bins or n_bins < 1:
        raise ValueError("n_bins must be a positive integer")
    return _build(cfg, int(n_bins), InterpolationScheme.parse(scheme))


def interpolate_atom(dictionary: InterpolatedDictionary, n: int, t: float) -> np.ndarray:
    """Approximate the atom at ``bin_n + t`` from the interpolants of bin ``n``."""
    return dictionary.blocks[n] @ mapping(dictionary.scheme, t)
