import numpy as np
import pytest

from qcomp.dictionary import build_dictionary, mapping
from qcomp.evaluation import torus_distance
from qcomp.quantization import MeasurementChannel, choose_delta, draw_dither, quantize
from qcomp.signal_model import RadarConfig, Scene, sample_scene, steering_atom, synthesize
from qcomp.solver import (
    SolverProblem,
    correct,
    least_squares,
    qcomp,
    select_bin,
    update_residue,
)

from oracles import brute_force_projection, grid_atoms, normal_equations, reference_omp

SMALL = RadarConfig.normalized(64)


def _cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def test_select_bin_on_grid_atom(cfg):
    for scheme in ("none", "taylor1", "taylor2"):
        d = build_dictionary(cfg, 512, scheme)
        assert select_bin(d, d.blocks[7][:, 0]) == 7


def test_select_bin_off_grid_within_one_step(cfg, rng):
    d = build_dictionary(cfg, 640, "none")
    atoms = grid_atoms(cfg, 640)
    for v in rng.uniform(-0.5, 0.5, 20):
        r = steering_atom(cfg, v)
        n = select_bin(d, r)
        assert n == int(np.argmax(np.abs(atoms.conj().T @ r)))
        assert torus_distance(d.grid.bins[n], v, 1.0) <= d.grid.step


def test_select_bin_respects_exclusion(cfg):
    d = build_dictionary(cfg, 256, "none")
    r = d.blocks[3][:, 0] + 0.1 * d.blocks[9][:, 0]
    assert select_bin(d, r) == 3
    assert select_bin(d, r, {3}) == 9


def test_select_bin_ties_lowest_index_and_empty(cfg):
    d = build_dictionary(cfg, 4, "none")
    assert select_bin(d, np.zeros(256, dtype=complex), [0]) == 1
    with pytest.raises(ValueError):
        select_bin(d, np.ones(256), [0, 1, 2, 3])


def test_least_squares_orthogonal_columns(cfg):
    d = build_dictionary(cfg, 256, "none")
    D = d.stacked([2, 50, 100])
    z = np.arange(256) * (1 + 0.5j)
    beta = least_squares(D, z)
    expected = [np.vdot(D[:, i], z) / np.vdot(D[:, i], D[:, i]) for i in range(3)]
    np.testing.assert_allclose(beta, expected, atol=1e-9)


def test_least_squares_consistent_system(cfg, rng):
    d = build_dictionary(cfg, 1280, "taylor1")
    D = d.stacked([10, 400, 900])
    beta0 = _cn(rng, 6) * np.array([1, 1e-3, 1, 1e-3, 1, 1e-3])
    np.testing.assert_allclose(least_squares(D, D @ beta0), beta0, rtol=0, atol=1e-9)


def test_least_squares_matches_normal_equations():
    rng = np.random.default_rng(8)
    for _ in range(20):
        D = _cn(rng, 64, 6)
        z = _cn(rng, 64)
        beta = least_squares(D, z)
        ref = normal_equations(D, z)
        assert np.max(np.abs(beta - ref)) <= 1e-8 * max(1.0, np.max(np.abs(ref)))
        resid = D.conj().T @ (D @ beta - z)
        assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(z) * 8


def test_least_squares_rank_deficient_is_min_norm():
    rng = np.random.default_rng(3)
    a = _cn(rng, 16)
    D = np.stack([a, a], axis=1)
    beta = least_squares(D, 2 * a)
    np.testing.assert_allclose(beta, [1, 1], atol=1e-10)


def test_update_residue_full_resolution_orthogonal(cfg, rng):
    y = synthesize(cfg, sample_scene(cfg, 2, rng))
    d = build_dictionary(cfg, 512, "taylor1")
    prob = SolverProblem(y, MeasurementChannel(), d, 2)
    D = d.stacked([5, 77])
    r = update_residue(prob, D, least_squares(D, y))
    assert np.linalg.norm(D.conj().T @ r) < 1e-8 * np.linalg.norm(y) * np.linalg.norm(D)


def test_update_residue_one_bit_exact(cfg, rng):
    d = build_dictionary(cfg, 256, "none")
    y = 0.7j * d.blocks[31][:, 0]
    delta = choose_delta(y)
    ch = MeasurementChannel.one_bit(delta, draw_dither(delta, 256, rng))
    prob = SolverProblem(ch(y), ch, d, 1)
    np.testing.assert_array_equal(update_residue(prob, d.stacked([31]), np.array([0.7j])), 0)


def test_update_residue_on_quantization_lattice(cfg):
    d = build_dictionary(cfg, 256, "none")
    y = (1 - 2j) * d.blocks[40][:, 0]
    delta = choose_delta(y)
    ch = MeasurementChannel.one_bit(delta)
    z = ch(y)
    est, trace = qcomp(SolverProblem(z, ch, d, 1))
    r = update_residue(SolverProblem(z, ch, d, 1), d.stacked(trace.selected_bins), trace.beta_hat)
    for part in (r.real, r.imag):
        assert set(np.round(np.unique(part) / delta, 12)) <= {-1.0, 0.0, 1.0}


def test_correct_exact_projection():
    step = 1 / 1280
    for t0 in (-0.49 * step, -0.1 * step, 0.0, 0.23 * step, 0.5 * step):
        alpha0 = 0.8 - 1.1j
        est = correct("taylor1", alpha0 * mapping("taylor1", t0), 0.25, step)
        assert abs(est.v_hat - (0.25 + t0)) <= 1e-6 * step
        assert abs(est.alpha_hat - alpha0) < 1e-9


def test_correct_zero_deviation():
    est = correct("taylor1", np.array([2 + 1j, 0]), 0.1, 0.01)
    assert est.v_hat == pytest.approx(0.1, abs=1e-12)
    assert est.alpha_hat == pytest.approx(2 + 1j)


def test_correct_none_and_degenerate():
    est = correct("none", np.array([3 - 1j]), 0.2, 0.01)
    assert (est.alpha_hat, est.v_hat, est.degenerate) == (3 - 1j, 0.2, False)
    est = correct("taylor1", np.zeros(2), 0.2, 0.01, m_samples=256)
    assert est.degenerate and est.alpha_hat == 0 and est.v_hat == 0.2
    with pytest.raises(ValueError):
        correct("taylor2", np.ones(2), 0.0, 0.01)


def test_correct_wraps_into_domain():
    step = 0.01
    est = correct("taylor1", mapping("taylor1", -0.004), -0.5, step, span=1.0)
    assert est.v_hat == pytest.approx(0.496)


@pytest.mark.parametrize("scheme", ["taylor1", "taylor2"])
def test_correct_beats_brute_force_scan(scheme):
    rng = np.random.default_rng(12)
    step = 1 / 1280
    order = 2 if scheme == "taylor1" else 3
    scale = np.array([1, step, step**2][:order])
    for _ in range(100):
        beta = _cn(rng, order) * scale * rng.uniform(0.2, 3, order)
        est = correct(scheme, beta, 0.0, step)
        obj = np.linalg.norm(beta - est.alpha_hat * mapping(scheme, est.v_hat)) ** 2
        assert obj <= brute_force_projection(scheme, beta, step) + 1e-9


def _problem(cfg, scene, n_bins, scheme, channel="full", rng=None):
    y = synthesize(cfg, scene)
    if channel == "full":
        ch = MeasurementChannel()
    else:
        delta = choose_delta(y)
        dither = draw_dither(delta, cfg.m_samples, rng) if channel == "onebit_dither" else None
        ch = MeasurementChannel.one_bit(delta, dither)
    return y, SolverProblem(ch(y), ch, build_dictionary(cfg, n_bins, scheme), scene.k)


@pytest.mark.parametrize("scheme", ["none", "taylor1", "taylor2"])
def test_qcomp_exact_on_grid(cfg, scheme):
    d = build_dictionary(cfg, 640, scheme)
    v = d.grid.bins[123]
    _, prob = _problem(cfg, Scene.from_arrays(cfg, [0.4 + 0.9j], [v]), 640, scheme)
    (est,), trace = qcomp(prob)
    assert trace.selected_bins == [123]
    assert abs(est.v_hat - v) <= 1e-9 * cfg.resolution
    assert abs(est.alpha_hat - (0.4 + 0.9j)) <= 1e-9


def test_qcomp_none_picks_nearest_bin(cfg, rng):
    for rho in (1, 2, 5):
        n_bins = 256 * rho
        grid = build_dictionary(cfg, n_bins, "none").grid
        atoms = grid_atoms(cfg, n_bins)
        for v in rng.uniform(-0.5, 0.5, 10):
            y, prob = _problem(cfg, Scene.from_arrays(cfg, [1.0], [v]), n_bins, "none")
            (est,), _ = qcomp(prob)
            scan = int(np.argmax(np.abs(atoms.conj().T @ y)))
            assert est.v_hat == grid.bins[scan]
            assert est.v_hat == grid.bins[grid.nearest(v)]


def test_qcomp_matches_reference_omp():
    rng = np.random.default_rng(100)
    for trial in range(100):
        k = 1 + trial % 3
        n_bins = [64, 128, 320][trial % 3]
        scene = sample_scene(SMALL, k, rng)
        y, prob = _problem(SMALL, scene, n_bins, "none")
        est, trace = qcomp(prob)
        support, coef = reference_omp(grid_atoms(SMALL, n_bins), y, k)
        assert trace.selected_bins == support
        np.testing.assert_allclose([e.alpha_hat for e in est], coef, rtol=0, atol=1e-9)


def test_qcomp_trace_and_invariants(cfg):
    rng = np.random.default_rng(77)
    for _ in range(20):
        scene = sample_scene(cfg, 3, rng)
        _, prob = _problem(cfg, scene, 640, "taylor1")
        est, trace = qcomp(prob)
        assert len(est) == 3 and len(set(trace.selected_bins)) == 3
        assert trace.beta_hat.shape == (6,)
        assert len(trace.residue_norms) == 4
        assert all(a >= b - 1e-9 for a, b in zip(trace.residue_norms, trace.residue_norms[1:]))
        step = prob.dictionary.grid.step
        for e, n in zip(est, trace.selected_bins):
            assert torus_distance(e.v_hat, prob.dictionary.grid.bins[n], 1.0) <= step / 2 + 1e-15
            assert -0.5 <= e.v_hat < 0.5


@pytest.mark.parametrize("channel", ["onebit", "onebit_dither"])
def test_qcomp_quantized_distinct_bins(cfg, channel):
    rng = np.random.default_rng(5)
    for _ in range(20):
        _, prob = _problem(cfg, sample_scene(cfg, 2, rng), 1280, "taylor1", channel, rng)
        est, trace = qcomp(prob)
        assert len(set(trace.selected_bins)) == 2
        step = prob.dictionary.grid.step
        for e, n in zip(est, trace.selected_bins):
            assert torus_distance(e.v_hat, prob.dictionary.grid.bins[n], 1.0) <= step / 2 + 1e-15


def test_global_phase_equivariance(cfg):
    rng = np.random.default_rng(21)
    for _ in range(10):
        scene = sample_scene(cfg, 2, rng)
        phase = np.exp(2j * np.pi * rng.uniform())
        rotated = Scene.from_arrays(cfg, scene.alphas * phase, scene.velocities)
        for scheme in ("none", "taylor1"):
            e1, _ = qcomp(_problem(cfg, scene, 640, scheme)[1])
            e2, _ = qcomp(_problem(cfg, rotated, 640, scheme)[1])
            for a, b in zip(e1, e2):
                assert abs(a.v_hat - b.v_hat) <= 1e-9
                assert abs(a.alpha_hat * phase - b.alpha_hat) <= 1e-9


def test_problem_validation(cfg):
    d = build_dictionary(cfg, 4, "none")
    with pytest.raises(ValueError):
        SolverProblem(np.ones(10), MeasurementChannel(), d, 1)
    with pytest.raises(ValueError):
        SolverProblem(np.ones(256), MeasurementChannel(), d, 0)
    with pytest.raises(ValueError):
        SolverProblem(np.ones(256), MeasurementChannel(), d, 5)


@pytest.mark.slow
def test_two_targets_dithered_average_error():
    # 1000 seeded K=2 trials, interpolated dictionary at rho=5, dithered 1-bit channel
    from qcomp.harness import ExperimentConfig, run_sweep

    cfg = ExperimentConfig(k_targets=2, trials=1000, schemes=("taylor1",), channels=("onebit_dither",),
                           densities=(5.0,))
    (row,) = run_sweep(cfg)
    assert row.avg_error == pytest.approx(0.203, rel=0.5)
