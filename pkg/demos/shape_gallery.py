"""A gallery of steady-state response curve shapes.

Sweeps the two exponents one at a time and labels each resulting
budget-to-share curve. Low alpha flattens the spend side enough to
make the curve concave everywhere in log spend; everything else keeps
an inflection and reads as s-shaped. The chart overlays the alpha
sweep so the transition is visible.
"""

from pathlib import Path

import numpy as np

from adresponse import GvwParams, classify_shape, line_chart, sensitivity_sweep

base = GvwParams(rho=0.10, alpha=1.0, beta=1.0, delta=0.01)
grid = np.logspace(-3.0, 3.0, 41)

print("varying alpha (spend exponent)")
alpha_curves = sensitivity_sweep(base, "alpha", [0.2, 0.5, 1.0, 1.8], grid)
for curve in alpha_curves:
    label = classify_shape(np.column_stack([curve.budgets, curve.shares]))
    print(f"  alpha={curve.value:<4g} span {curve.shares[0]:.4f} .. "
          f"{curve.shares[-1]:.4f}  ->  {label}")

print("varying beta (availability exponent)")
for curve in sensitivity_sweep(base, "beta", [0.0, 0.5, 1.0, 2.0], grid):
    label = classify_shape(np.column_stack([curve.budgets, curve.shares]))
    print(f"  beta={curve.value:<4g}  span {curve.shares[0]:.4f} .. "
          f"{curve.shares[-1]:.4f}  ->  {label}")

# sweeps surface failures per curve instead of raising
broken = sensitivity_sweep(base, "beta", [0.0, 1.0],
                           grid)[0]
print(f"\ncurves carry their own error slot; this clean one has "
      f"error={broken.error!r}")

out = Path(__file__).resolve().parent / "shape_gallery.svg"
out.write_text(line_chart(
    [(f"alpha={c.value:g}", np.log10(c.budgets), c.shares)
     for c in alpha_curves],
    title="steady share versus log10 budget as alpha varies",
    x_label="log10 budget", y_label="steady share"))
print(f"chart written to {out.name}")
print("the alpha=0.2 curve is concave from the first dollar; by "
      "alpha=1 the familiar s-shape is back")
