"""Off-the-grid velocity estimation from 1-bit dithered Doppler radar samples.

The package is organised as a small stack of numpy modules:

- :mod:`qcomp.signal_model` -- steering atoms, random scenes, noiseless signals.
- :mod:`qcomp.quantization` -- 1-bit quantizer, uniform dither, measurement channels.
- :mod:`qcomp.dictionary` -- velocity grid and Taylor interpolant blocks.
- :mod:`qcomp.solver` -- the quantized continuous OMP solver.
- :mod:`qcomp.evaluation` -- torus errors, pairing and summary metrics.
- :mod:`qcomp.harness` -- seeded Monte-Carlo sweeps and CSV/JSON output.
"""
from .signal_model import RadarConfig, Target, Scene, steering_atom, synthesize, sample_scene
from .quantization import (
    Dither,
    MeasurementChannel,
    quantize,
    choose_delta,
    draw_dither,
    apply_channel,
)
from .dictionary import (
    Grid,
    InterpolationScheme,
    InterpolatedDictionary,
    build_dictionary,
    mapping,
    interpolate_atom,
)
from .solver import (
    SolverProblem,
    Estimate,
    SolverTrace,
    select_bin,
    least_squares,
    update_residue,
    correct,
    qcomp,
)
from .evaluation import (
    TrialOutcome,
    MetricsSummary,
    torus_distance,
    normalized_error,
    pair_estimates,
    residue_metric,
    aggregate,
)
from .harness import ExperimentConfig, ResultRow, run_trial, run_sweep, emit, format_rows, load_rows

__version__ = "0.1.0"
