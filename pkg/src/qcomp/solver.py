"""Quantized continuous orthogonal matching pursuit (QCOMP).

Each of the K greedy iterations

1. picks the grid bin whose on-grid atom correlates best with the residue,
2. appends that bin's interpolant block to the active matrix,
3. fits all active coefficients jointly by least squares against ``z``,
4. recomputes the residue as ``z - A(D beta)``, with ``A`` the same channel
   (and the same stored dither) that produced ``z``.

A final per-target projection converts each coefficient block into a gain and
an off-grid velocity.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .dictionary import InterpolatedDictionary, InterpolationScheme
from .quantization import MeasurementChannel, apply_channel

SCAN_POINTS = 1024
ZOOM_POINTS = 33
ZOOM_ROUNDS = 4


@dataclass(frozen=True, eq=False)
class SolverProblem:
    z: np.ndarray
    channel: MeasurementChannel
    dictionary: InterpolatedDictionary
    k_targets: int

    def __post_init__(self):
        if self.k_targets < 1:
            raise ValueError("k_targets must be >= 1")
        z = np.asarray(self.z, dtype=complex)
        if z.shape != (self.dictionary.cfg.m_samples,):
            raise ValueError(f"z has shape {z.shape}, expected ({self.dictionary.cfg.m_samples},)")
        if self.k_targets > self.dictionary.grid.n_bins:
            raise ValueError("more targets than grid bins")
        object.__setattr__(self, "z", z)


@dataclass(frozen=True)
class Estimate:
    alpha_hat: complex
    v_hat: float
    degenerate: bool = False


@dataclass
class SolverTrace:
    """Intermediate quantities of one QCOMP run.

    ``residue_norms[0]`` is ``||z||``; entry ``k`` is the residue norm after
    iteration ``k``.
    """

    selected_bins: list = field(default_factory=list)
    beta_hat: np.ndarray | None = None
    residue_norms: list = field(default_factory=list)
    final_reconstruction: np.ndarray | None = None
    rank_deficient: bool = False


def select_bin(dictionary: InterpolatedDictionary, r: np.ndarray, excluded=()) -> int:
    """Bin maximizing ``|<a(bin), r>|`` among the non-excluded bins (lowest index on ties)."""
    corr = np.abs(dictionary.correlate(r))
    excluded = list(excluded)
    if len(excluded) >= corr.size:
        raise ValueError("no candidate bins left")
    corr[excluded] = -np.inf
    return int(np.argmax(corr))


def _lstsq(D: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, bool]:
    # equilibrate columns: derivative atoms are orders of magnitude larger than the atom itself
    scale = np.linalg.norm(D, axis=0)
    scale[scale == 0] = 1.0
    beta, _, rank, _ = np.linalg.lstsq(D / scale, z, rcond=None)
    return beta / scale, rank < D.shape[1]


def least_squares(D: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Minimum-norm minimizer of ``||D beta - z||_2``."""
    return _lstsq(np.asarray(D, dtype=complex), np.asarray(z, dtype=complex))[0]


def update_residue(problem: SolverProblem, D: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """``z - A(D beta)`` using the problem's own channel."""
    return problem.z - apply_channel(problem.channel, D @ beta)


_FACTORIALS = np.array([1.0, 1.0, 2.0, 6.0, 24.0])


def _mapping_rows(order: int, ts: np.ndarray) -> np.ndarray:
    return ts[:, None] ** np.arange(order) / _FACTORIALS[:order]


def _fit(C: np.ndarray, beta: np.ndarray, den=None):
    """Optimal gain and projection residual ``||beta - alpha C||^2`` per row of ``C``."""
    if den is None:
        den = np.einsum("ij,ij->i", C, C)
    alpha = (C @ beta) / den
    e = beta[None, :] - alpha[:, None] * C
    # the residual is evaluated directly: ||beta||^2 - |C.beta|^2/||C||^2 cancels catastrophically
    return alpha, np.einsum("ij,ij->i", e.real, e.real) + np.einsum("ij,ij->i", e.imag, e.imag)


@functools.lru_cache(maxsize=64)
def _coarse_scan(order: int, step: float):
    ts = np.linspace(-step / 2.0, step / 2.0, SCAN_POINTS)
    C = _mapping_rows(order, ts)
    return ts, C, np.einsum("ij,ij->i", C, C)


def correct(scheme, beta_k, bin_v: float, step: float, *, span: float | None = None,
            m_samples: int = 1) -> Estimate:
    """Project a coefficient block onto ``{alpha * mapping(t)}`` with ``|t| <= step/2``.

    For a fixed deviation the optimal gain is ``<C(t), beta>/||C(t)||^2``; the
    remaining 1-D problem in ``t`` is solved by a dense scan, a few zoomed rescans
    around the best point, and a final parabolic step through the last three
    samples.
    """
    scheme = InterpolationScheme.parse(scheme)
    beta_k = np.atleast_1d(np.asarray(beta_k, dtype=complex))
    order = scheme.order
    if beta_k.size != order:
        raise ValueError(f"expected {order} coefficients, got {beta_k.size}")

    def wrap(v):
        if span is None:
            return float(v)
        return float((v + span / 2.0) % span - span / 2.0)

    if np.linalg.norm(beta_k) < 1e-12 * np.sqrt(m_samples):
        return Estimate(0j, wrap(bin_v), degenerate=True)
    if order == 1:
        return Estimate(complex(beta_k[0]), wrap(bin_v))

    ts, C, den = _coarse_scan(order, float(step))
    _, obj = _fit(C, beta_k, den)
    best_t, best_obj = 0.0, np.inf
    for round_ in range(1 + ZOOM_ROUNDS):
        if round_:
            _, obj = _fit(_mapping_rows(order, ts), beta_k)
        j = int(np.argmin(obj))
        if obj[j] < best_obj:
            best_t, best_obj = ts[j], obj[j]
        lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, ts.size - 1)]
        if hi - lo <= 1e-13 * step:
            break
        ts = np.linspace(lo, hi, ZOOM_POINTS)

    # parabolic vertex through the final bracket
    j = int(np.argmin(obj))
    if 0 < j < ts.size - 1:
        t0, t1, t2 = ts[j - 1:j + 2]
        f0, f1, f2 = obj[j - 1:j + 2]
        denom = (t1 - t0) * (f1 - f2) - (t1 - t2) * (f1 - f0)
        if denom != 0:
            tv = t1 - 0.5 * ((t1 - t0) ** 2 * (f1 - f2) - (t1 - t2) ** 2 * (f1 - f0)) / denom
            if t0 <= tv <= t2:
                fv = _fit(_mapping_rows(order, np.array([tv])), beta_k)[1][0]
                if fv < best_obj:
                    best_t, best_obj = tv, fv
    alpha, _ = _fit(_mapping_rows(order, np.array([best_t])), beta_k)
    return Estimate(complex(alpha[0]), wrap(bin_v + best_t))


def qcomp(problem: SolverProblem):
    """Run QCOMP for ``problem.k_targets`` iterations.

    Returns:
        (estimates, trace): one :class:`Estimate` per selected bin, in selection
        order, and the :class:`SolverTrace`.
    """
    dic = problem.dictionary
    order = dic.order
    trace = SolverTrace()
    r = problem.z
    trace.residue_norms.append(float(np.linalg.norm(r)))
    D = np.empty((problem.z.size, 0), dtype=complex)
    beta = np.empty(0, dtype=complex)
    for _ in range(problem.k_targets):
        n = select_bin(dic, r, trace.selected_bins)
        trace.selected_bins.append(n)
        D = np.concatenate([D, dic.blocks[n]], axis=1)
        beta, deficient = _lstsq(D, problem.z)
        trace.rank_deficient |= deficient
        r = update_residue(problem, D, beta)
        trace.residue_norms.append(float(np.linalg.norm(r)))
    trace.beta_hat = beta
    trace.final_reconstruction = D @ beta

    bins = dic.grid.bins
    estimates = [
        correct(dic.scheme, beta[i * order:(i + 1) * order], bins[n], dic.grid.step,
                span=dic.cfg.span, m_samples=dic.cfg.m_samples)
        for i, n in enumerate(trace.selected_bins)
    ]
    return estimates, trace
