"""Why the final stage must live on the staggered cell.

Sweeps the amplification factor of the cell-centered implicit
predictor/corrector pair for linear advection (stable only up to Courant
number 1/2) against the staggered realization (bounded by one for every
Courant number), and bisects the instability threshold.

Usage: python demos/stability_analysis.py
"""

from allmach.stability import (max_amp_naive, max_amp_staggered,
                               naive_threshold)

print(f"{'c':>8} {'naive max|rho|':>16} {'staggered max|rho|':>20}")
for c in (0.1, 0.25, 0.4, 0.49, 0.5, 0.51, 0.6, 1.0, 3.0, 10.0, 100.0):
    print(f"{c:>8.2f} {max_amp_naive(c):>16.6f} {max_amp_staggered(c):>20.6f}")

c_star = naive_threshold()
print(f"\nbisected instability threshold of the cell-centered pair: "
      f"c* = {c_star:.4f}")
