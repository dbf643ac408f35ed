"""Sod shock tube at eps = 1: the scheme as a plain compressible solver.

Runs the second-order staggered scheme on the classical tube, writes the
profile CSV, and prints the shock/contact/rarefaction positions next to
the analytic values.

Usage: python demos/sod_shock_tube.py [OUTDIR]
"""

import sys
from pathlib import Path

from allmach.harness import run_case

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/sod")
report = run_case("sod", out_dir=out)
state = report.final_state
x = state.grid.centers()

print(f"steps: {report.steps}, conservation drift {report.conservation_drift:.2e}")
print(f"density range [{state.rho.min():.4f}, {state.rho.max():.4f}]")

# analytic wave positions at T = 0.18 (star pressure 0.30313)
T = report.t_final
for name, speed in (("rarefaction head", -1.18322), ("rarefaction foot", -0.07027),
                    ("contact", 0.92745), ("shock", 1.75216)):
    print(f"{name:>18}: x = {0.5 + speed * T:.4f}")
print(f"fields in {out}")
