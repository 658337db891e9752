"""Mixing two noisy CNOT realizations.

The direct CNOT and the Hadamard-conjugated one (control and target swapped)
implement the same gate, but under asymmetric qubit noise they fail in
different ways. Running the direct one with probability w1 and the other one
otherwise lowers the worst-case error below either pure strategy.

Pass ``--plot`` to draw the curves with matplotlib (not a package dependency).
"""

import sys
import time

import numpy as np

from pqc import AscentConfig, NoiseSpec, cnot_mixture, ideal_cnot, minmax_gda, sweep
from pqc.optimize import GdaConfig, refine_minimum

spec = NoiseSpec.asymmetric()
for i, q in enumerate(spec.qubits):
    print(f"qubit {i}: depolarizing p={q.depolarizing}, amplitude damping gamma={q.amplitude_damping}")

family = cnot_mixture(spec)
target = ideal_cnot()
cfg = AscentConfig(seed=1234)

# %% Coarse sweep over w1
t0 = time.perf_counter()
curve = sweep(family, target, m=1, grid_points=21, cfg=cfg, mean_samples=1000, seed=1234)
print(f"\nsweep took {time.perf_counter() - t0:.1f}s")
print("   w1   worst    mean")
for w, wc, mc in zip(curve.grid, curve.worst_cost, curve.mean_cost):
    print(f" {w:4.2f}  {wc:.4f}  {mc:.4f}")

i = curve.argmin
print(f"\ngrid minimum: w1={curve.grid[i]:.2f}, worst-case cost {curve.worst_cost[i]:.4f}")
print(f"pure strategies: w1=0 -> {curve.worst_cost[0]:.4f}, w1=1 -> {curve.worst_cost[-1]:.4f}")

# %% The worst-case cost is convex in w1, so a bracketed line search pins it down
lo, hi = curve.grid[max(i - 1, 0)], curve.grid[min(i + 1, len(curve.grid) - 1)]
w_star, c_star = refine_minimum(family, target, 1, cfg, 1234, (lo, hi), tol=1e-4)
print(f"refined: w1*={w_star:.4f}, cost {c_star:.6f}")

# %% Gradient descent-ascent reaches the same point without a grid
res = minmax_gda(family, target, 1, GdaConfig(theta0=(0.0,), ascent=AscentConfig(restarts=8, seed=1234)))
print(f"GDA: w1={res.theta[0]:.4f}, certified cost {res.cost.value:.6f} after {res.iterations} steps")

if "--plot" in sys.argv:
    import matplotlib.pyplot as plt

    plt.plot(curve.grid, curve.worst_cost, label="worst case")
    plt.plot(curve.grid, curve.mean_cost, label="Haar mean")
    plt.scatter([w_star], [c_star], color="k", zorder=3)
    plt.xlabel("w1 (probability of the direct CNOT)")
    plt.ylabel("trace-distance cost")
    plt.legend()
    plt.show()
