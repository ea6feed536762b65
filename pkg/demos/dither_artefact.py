"""Why dithering helps when a weak target hides behind a strong one.

Without a dither the 1-bit quadrant pattern of a strong single target barely
changes when a much weaker second target is added, so the decoder sees almost
nothing of the weak one.  A uniform dither breaks that symmetry: its 1-bit
average tracks the true signal.
"""
import numpy as np

from qcomp import RadarConfig, Scene, choose_delta, quantize, synthesize

cfg = RadarConfig.normalized(256)
strong = Scene.from_arrays(cfg, [1.0], [0.1])
pair = Scene.from_arrays(cfg, [1.0, 0.05], [0.1, -0.23])
y1, y2 = synthesize(cfg, strong), synthesize(cfg, pair)
delta = choose_delta(y2)

same = np.mean(quantize(delta, y1) == quantize(delta, y2))
print(f"fraction of identical 1-bit samples without dither: {same:.3f}")

rng = np.random.default_rng(0)
for trials in (1, 10, 100, 1000):
    xi = rng.uniform(-delta / 2, delta / 2, (trials, 256, 2)) @ np.array([1, 1j])
    mean = quantize(delta, y2 + xi).mean(axis=0)
    print(f"{trials:5d} dithers: relative error of the average {np.linalg.norm(mean - y2) / np.linalg.norm(y2):.3f}")
