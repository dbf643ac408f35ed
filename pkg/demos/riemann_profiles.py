"""Riemann battery walkthrough: run the 1D isentropic step data at three
Mach parameters and write profile CSVs next to a fine reference run.

The same configuration drives Figure-style comparisons: at eps = 0.8 shocks
and contacts develop; at eps = 0.05 the acoustic steps are damped and the
solution rides the material wave while the classical Courant number sits
near 3.

Usage: python demos/riemann_profiles.py [OUTDIR]
"""

import sys
from pathlib import Path

from allmach.harness import run_case

out_root = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/riemann")

for eps in (0.8, 0.3, 0.05):
    report = run_case("riemann", eps=eps, out_dir=out_root / f"eps{eps:g}")
    print(f"eps={eps:<5g} steps={report.steps:4d} "
          f"max classical CFL={report.max_classical_cfl:6.4f} "
          f"drift={report.conservation_drift:.2e}")
    # fine reference with the catalog's pinned reference recipe
    ref = run_case("riemann", eps=eps, n=500, t_final=0.05,
                   out_dir=out_root / f"eps{eps:g}_ref")
    print(f"          reference n=500 steps={ref.steps}")

print(f"profiles in {out_root}")
