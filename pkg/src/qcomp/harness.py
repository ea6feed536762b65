"""Seeded Monte-Carlo sweeps over grid density, interpolation scheme and channel.

Every trial owns its random stream, derived from ``(master_seed, k, m, trial)``
by :class:`numpy.random.SeedSequence`. Results therefore do not depend on how
trials are split between worker processes, and all cells of a sweep see the
same scenes (common random numbers), which keeps channel and scheme
comparisons paired.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .dictionary import InterpolationScheme, build_dictionary
from .evaluation import TrialOutcome, aggregate, pair_estimates, residue_metric
from .quantization import MeasurementChannel, apply_channel, choose_delta, draw_dither
from .signal_model import RadarConfig, Scene, sample_scene, synthesize
from .solver import SolverProblem, qcomp

log = logging.getLogger(__name__)

CHANNELS = ("full", "onebit", "onebit_dither")
SCHEMES = tuple(s.value for s in InterpolationScheme)
DEFAULT_DENSITIES = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0)
FIELDS = ("scheme", "channel", "k", "m", "n", "rho", "trials", "seed",
          "avg_error", "miss_rate", "avg_hit_error", "avg_residue", "wall_time_ms")


class TrialError(RuntimeError):
    """A single trial failed; carries the cell and trial index."""


class SweepError(RuntimeError):
    """Some cells of a sweep failed. ``rows`` holds the cells that completed."""

    def __init__(self, failures, rows):
        self.failures = failures
        self.rows = rows
        lines = "; ".join(f"{cell}: {msg}" for cell, msg in failures)
        super().__init__(f"{len(failures)} cell(s) failed: {lines}")


@dataclass(frozen=True)
class ExperimentConfig:
    radar: RadarConfig = field(default_factory=RadarConfig.normalized)
    k_targets: int = 1
    trials: int = 2000
    schemes: tuple = ("none", "taylor1")
    channels: tuple = CHANNELS
    densities: tuple = DEFAULT_DENSITIES
    master_seed: int = 0
    output: Optional[str] = None
    format: str = "csv"
    workers: int = 1
    record_timing: bool = False
    min_separation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(InterpolationScheme.parse(s).value for s in self.schemes))
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "densities", tuple(float(d) for d in self.densities))
        if self.k_targets < 1:
            raise ValueError("k_targets must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        bad = [c for c in self.channels if c not in CHANNELS]
        if bad:
            raise ValueError(f"unknown channel(s) {bad}; expected a subset of {CHANNELS}")
        if not self.schemes or not self.channels or not self.densities:
            raise ValueError("schemes, channels and densities must be non-empty")
        for rho in self.densities:
            if not rho > 0:
                raise ValueError("densities must be positive")
            n = self.n_bins(rho)
            if n < self.k_targets:
                raise ValueError(f"density {rho} gives {n} bins, fewer than k_targets")

    def n_bins(self, rho: float) -> int:
        return max(1, int(round(rho * self.radar.m_samples)))

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ValueError(f"unknown config field(s): {sorted(unknown)}")
        if isinstance(d.get("radar"), dict):
            d["radar"] = RadarConfig(**d["radar"])
        return cls(**d)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("schemes", "channels", "densities"):
            d[key] = list(d[key])
        return d


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    channel: str
    k: int
    m: int
    n: int
    rho: float
    trials: int
    seed: int
    avg_error: float
    miss_rate: float
    avg_hit_error: Optional[float]
    avg_residue: float
    wall_time_ms: float


def _stream_key(k: int, m: int) -> int:
    return zlib.crc32(f"k={k};m={m}".encode())


def trial_rng(cfg: ExperimentConfig, trial: int) -> np.random.Generator:
    """Random stream of one trial, a pure function of seed, K, M and trial index."""
    ss = np.random.SeedSequence([cfg.master_seed, _stream_key(cfg.k_targets, cfg.radar.m_samples), trial])
    return np.random.Generator(np.random.PCG64(ss))


def make_channel(kind: str, delta: float, m: int, rng: np.random.Generator) -> MeasurementChannel:
    if kind == "full":
        return MeasurementChannel.full_resolution()
    if kind == "onebit":
        return MeasurementChannel.one_bit(delta)
    if kind == "onebit_dither":
        return MeasurementChannel.one_bit(delta, draw_dither(delta, m, rng))
    raise ValueError(f"unknown channel {kind!r}")


def run_trial(cfg: ExperimentConfig, scheme, channel: str, n_bins: int, trial: int,
              *, scene: Optional[Scene] = None) -> TrialOutcome:
    """Simulate, measure, solve and score one realization.

    ``scene`` overrides the random draw (the dither is still drawn from the
    trial's stream).
    """
    radar = cfg.radar
    rng = trial_rng(cfg, trial)
    drawn = sample_scene(radar, cfg.k_targets, rng, cfg.min_separation)
    if scene is None:
        scene = drawn
    try:
        y = synthesize(radar, scene)
        delta = choose_delta(y)
        ch = make_channel(channel, delta, radar.m_samples, rng)
        z = apply_channel(ch, y)
        problem = SolverProblem(z, ch, build_dictionary(radar, n_bins, scheme), scene.k)
        estimates, trace = qcomp(problem)
        assignment, errors = pair_estimates([e.v_hat for e in estimates], scene.velocities, radar)
        residue = residue_metric(y, z, ch, trace.final_reconstruction)
    except Exception as exc:
        raise TrialError(f"trial {trial} (scheme={scheme}, channel={channel}, N={n_bins}) failed: {exc}") from exc
    return TrialOutcome(errors, assignment, residue)


def _run_chunk(cfg, scheme, channel, n_bins, start, stop):
    t0 = time.perf_counter()
    outcomes = [run_trial(cfg, scheme, channel, n_bins, t) for t in range(start, stop)]
    return outcomes, time.perf_counter() - t0


def _cells(cfg: ExperimentConfig):
    for scheme in cfg.schemes:
        for channel in cfg.channels:
            for rho in cfg.densities:
                yield scheme, channel, rho


def _chunks(trials: int, workers: int):
    n = min(trials, max(1, workers))
    edges = np.linspace(0, trials, n + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_sweep(cfg: ExperimentConfig) -> list:
    """Run every (scheme, channel, density) cell; rows come back in canonical order.

    Raises :class:`SweepError` after the sweep if any cell failed.
    """
    cells = list(_cells(cfg))
    chunks = _chunks(cfg.trials, cfg.workers)
    results = {}
    failures = []
    if cfg.workers == 1:
        for cell in cells:
            scheme, channel, rho = cell
            try:
                results[cell] = [_run_chunk(cfg, scheme, channel, cfg.n_bins(rho), 0, cfg.trials)]
            except TrialError as exc:
                failures.append((cell, str(exc)))
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {
                cell: [pool.submit(_run_chunk, cfg, cell[0], cell[1], cfg.n_bins(cell[2]), a, b) for a, b in chunks]
                for cell in cells
            }
            for cell, futs in futures.items():
                try:
                    results[cell] = [f.result() for f in futs]
                except TrialError as exc:
                    failures.append((cell, str(exc)))

    rows = []
    for cell in cells:
        if cell not in results:
            continue
        scheme, channel, rho = cell
        outcomes = [o for part, _ in results[cell] for o in part]
        elapsed = sum(dt for _, dt in results[cell])
        s = aggregate(outcomes)
        rows.append(ResultRow(
            scheme=scheme, channel=channel, k=cfg.k_targets, m=cfg.radar.m_samples,
            n=cfg.n_bins(rho), rho=rho, trials=cfg.trials, seed=cfg.master_seed,
            avg_error=s.avg_error, miss_rate=s.miss_rate, avg_hit_error=s.avg_hit_error,
            avg_residue=s.avg_residue,
            wall_time_ms=elapsed * 1e3 if cfg.record_timing else 0.0,
        ))
        log.info("%s/%s rho=%g: avg_error=%.4g miss_rate=%.4g", scheme, channel, rho, s.avg_error, s.miss_rate)
    if failures:
        raise SweepError(failures, rows)
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float(f"{value:.9g}")
    return value


def format_rows(rows: Sequence[ResultRow], format: str = "csv") -> str:
    """Serialize rows as CSV (9 significant digits) or as a JSON array."""
    if not rows:
        raise ValueError("no rows to emit")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, f)) for f in FIELDS])
        return buf.getvalue()
    if format == "json":
        payload = [{f: _json_value(getattr(row, f)) for f in FIELDS} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown format {format!r}")


def emit(rows: Sequence[ResultRow], path, format: str = "csv") -> Path:
    """Write rows to ``path``; see :func:`format_rows`."""
    text = format_rows(rows, format)
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


_INT_FIELDS = {"k", "m", "n", "trials", "seed"}
_STR_FIELDS = {"scheme", "channel"}


def _parse(name, value):
    if name in _STR_FIELDS:
        return value
    if value is None or value == "":
        return None
    if name in _INT_FIELDS:
        return int(value)
    return float(value)


def load_rows(path) -> list:
    """Read rows written by :func:`emit` (format inferred from the suffix or content)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        records = json.loads(text)
    else:
        records = list(csv.DictReader(io.StringIO(text)))
    return [ResultRow(**{f: _parse(f, rec[f]) for f in FIELDS}) for rec in records]
