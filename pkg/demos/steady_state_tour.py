"""Tour of the steady-state layer.

Shows the share a constant budget sustains, the budget a target share
requires (the two are inverses), the elasticity threshold where the
curvature of spend productivity flips, and the directional effect of
each exponent.
"""

from dataclasses import replace
from pathlib import Path

import numpy as np

from adresponse import (GvwParams, elasticity_threshold, line_chart,
                        steady_budget, steady_share, steady_state)

params = GvwParams(rho=0.10, alpha=1.2, beta=0.9, delta=0.05)
print("parameters:", params)

# 1. the sustained share rises monotonically with the budget
grid = np.logspace(-2.0, 2.0, 25)
shares = np.array([steady_share(params, b) for b in grid])
for b in (0.1, 1.0, 10.0):
    print(f"steady share at b = {b:>5}: {steady_share(params, b):.6f}")

# 2. inverse direction: budget needed to hold a target share
for target in (0.2, 0.5, 0.8):
    b_need = steady_budget(params, target)
    back = steady_share(params, b_need)
    print(f"holding x = {target}: budget {b_need:.6f} "
          f"(round trip returns {back:.9f})")

# 3. the full bundle for one operating point
point = steady_state(params, 1.0)
print(f"\nbundle at unit spend: share {point.x_bar:.6f}, "
      f"budget {point.b_bar}")

# 4. elasticity threshold: below it more elasticity hurts, above helps
x_tilde = elasticity_threshold(params)
h = 1e-5
for x_bar, side in ((x_tilde - 0.05, "below"), (x_tilde + 0.05, "above")):
    b_bar = steady_budget(params, x_bar)
    hi = steady_share(replace(params, alpha=params.alpha + h), b_bar, tol=1e-13)
    lo = steady_share(replace(params, alpha=params.alpha - h), b_bar, tol=1e-13)
    slope = (hi - lo) / (2.0 * h)
    print(f"{side} threshold (x = {x_bar:.4f}): d share / d alpha "
          f"= {slope:+.6f}")
print(f"threshold share x_tilde = {x_tilde:.6f}")

# 5. word of mouth always saturates: beta pushes the curve down
hi = steady_share(replace(params, beta=params.beta + h), 2.0, tol=1e-13)
lo = steady_share(replace(params, beta=params.beta - h), 2.0, tol=1e-13)
print(f"d share / d beta at b = 2: {(hi - lo) / (2.0 * h):+.6f}")

out = Path(__file__).resolve().parent / "steady_state_tour.svg"
out.write_text(line_chart([("steady share", grid, shares)],
                          title="sustained share vs constant budget",
                          x_label="budget", y_label="share"))
print(f"chart written to {out.name}")
