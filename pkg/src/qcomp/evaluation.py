"""Error metrics: torus distance, estimate pairing and Monte-Carlo summaries."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .quantization import MeasurementChannel, apply_channel
from .signal_model import RadarConfig

MAX_EXHAUSTIVE_K = 8


@dataclass(frozen=True)
class TrialOutcome:
    """Per-trial errors after pairing.

    ``assignment[j]`` is the index of the estimate paired with true target ``j``.
    """

    errors: tuple
    assignment: tuple
    residue: float

    @property
    def misses(self) -> tuple:
        return tuple(e >= 1.0 for e in self.errors)

    @property
    def k(self) -> int:
        return len(self.errors)


@dataclass(frozen=True)
class MetricsSummary:
    avg_error: float
    miss_rate: float
    avg_hit_error: Optional[float]
    avg_residue: float
    trial_count: int
    config: dict = field(default_factory=dict)


def torus_distance(a, b, period: float):
    """Wrapped distance ``min_w |a - b + w * period|``."""
    if not period > 0:
        raise ValueError("period must be positive")
    d = np.mod(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), period)
    out = np.minimum(d, period - d)
    return float(out) if out.ndim == 0 else out


def normalized_error(v_hat, v_true, cfg: RadarConfig):
    """Torus distance in units of the resolution ``R = P / M``."""
    return torus_distance(v_hat, v_true, cfg.span) / cfg.resolution


def pair_estimates(estimates: Sequence[float], truths: Sequence[float], cfg: RadarConfig):
    """Pair estimated and true velocities with the fewest misses, then the smallest total error.

    Returns ``(assignment, errors)`` where ``assignment[j]`` indexes the
    estimate matched to ``truths[j]`` and ``errors[j]`` is its normalized error.
    """
    est = np.asarray(estimates, dtype=float)
    tru = np.asarray(truths, dtype=float)
    if est.shape != tru.shape:
        raise ValueError("estimate and truth counts differ")
    k = tru.size
    E = normalized_error(tru[:, None], est[None, :], cfg)  # E[j, i]: truth j vs estimate i
    E = np.atleast_2d(E)
    if k <= MAX_EXHAUSTIVE_K:
        best, best_key = None, None
        rows = np.arange(k)
        for perm in itertools.permutations(range(k)):
            e = E[rows, perm]
            key = (int(np.count_nonzero(e >= 1.0)), float(e.sum()))
            if best_key is None or key < best_key:
                best, best_key = perm, key
        assignment = tuple(int(i) for i in best)
    else:
        # errors never exceed M/2, so this weight makes misses dominate lexicographically
        cost = E + (E >= 1.0) * (k * cfg.m_samples + 1.0)
        _, cols = linear_sum_assignment(cost)
        assignment = tuple(int(i) for i in cols)
    errors = tuple(float(E[j, i]) for j, i in enumerate(assignment))
    return assignment, errors


def residue_metric(y: np.ndarray, z: np.ndarray, channel: MeasurementChannel,
                   reconstruction: np.ndarray) -> float:
    """Relative reconstruction residue.

    Full resolution: ``||y - D beta|| / ||y||``. Quantized:
    ``||z - A(D beta)|| / ||z||``.
    """
    if channel.is_quantized:
        ref = np.asarray(z)
        diff = ref - apply_channel(channel, reconstruction)
    else:
        ref = np.asarray(y)
        diff = ref - reconstruction
    norm = np.linalg.norm(ref)
    if norm == 0:
        raise ValueError("input signal has zero norm")
    return float(np.linalg.norm(diff) / norm)


def aggregate(outcomes: Sequence[TrialOutcome], config: Optional[dict] = None) -> MetricsSummary:
    """Average the per-trial outcomes into the four summary metrics.

    The hit error pools every unmissed estimate over all trials.
    """
    if not outcomes:
        raise ValueError("no outcomes to aggregate")
    # fsum keeps the result independent of outcome order
    avg_error = math.fsum(math.fsum(o.errors) / o.k for o in outcomes) / len(outcomes)
    all_errors = [e for o in outcomes for e in o.errors]
    hits = [e for e in all_errors if e < 1.0]
    n_miss = len(all_errors) - len(hits)
    return MetricsSummary(
        avg_error=avg_error,
        miss_rate=n_miss / len(all_errors),
        avg_hit_error=math.fsum(hits) / len(hits) if hits else None,
        avg_residue=math.fsum(o.residue for o in outcomes) / len(outcomes),
        trial_count=len(outcomes),
        config=dict(config or {}),
    )
