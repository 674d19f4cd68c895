"""Parameter recovery from a clean synthetic campaign.

Generates a pulse-train campaign from known parameters, then recovers
them with both estimation routes: finite differences of the sampled
shares, and analytic rates read off a trained surrogate network. Both
land on the same rate-matching objective; the table at the end shows
how close each gets.
"""

import time

from adresponse import (EstimationProblem, GvwParams, PulseTrain,
                        SyntheticSpec, fit_gvw, fit_gvw_fd,
                        generate_synthetic)

true = GvwParams(rho=0.1, alpha=0.7, beta=0.8, delta=0.01)
spec = SyntheticSpec(true_params=true,
                     budget_pattern=PulseTrain((0.6, 3.0), on=30.0, off=20.0),
                     n_samples=200, noise_sigma=0.0, seed=0,
                     x0=0.02, t_end=100.0)
data = generate_synthetic(spec)
print(f"campaign: {len(data)} samples over {data.t[-1]:g} time units, "
      f"two alternating spend levels")
print(f"true parameters: {true}\n")

problem = EstimationProblem(data)
fits = {}
for label, fitter in (("fd", fit_gvw_fd), ("dnn", fit_gvw)):
    start = time.perf_counter()
    fits[label] = fitter(problem)
    print(f"{label} route finished in {time.perf_counter() - start:.1f}s, "
          f"rate residual mse {fits[label].residual_mse:.3g}")

print(f"\n{'param':<8}{'true':>10}{'fd':>12}{'dnn':>12}"
      f"{'fd err %':>10}{'dnn err %':>11}")
for name in ("rho", "alpha", "beta", "delta"):
    t = getattr(true, name)
    f = getattr(fits["fd"].params, name)
    d = getattr(fits["dnn"].params, name)
    print(f"{name:<8}{t:>10.4f}{f:>12.5f}{d:>12.5f}"
          f"{100 * abs(f - t) / abs(t):>10.2f}{100 * abs(d - t) / abs(t):>11.2f}")

ok = [o for o in fits["dnn"].outcomes if o.status == "ok"]
print(f"\nmultistart audit (dnn route): {len(fits['dnn'].outcomes)} starts, "
      f"{len(ok)} converged in the interior")
print("the fd route differences the observed shares directly; the dnn "
      "route differentiates a trained network, which smooths the same "
      "information and lands within a few percent of it")
