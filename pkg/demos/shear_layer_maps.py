"""Double shear layer: compressible run at low Mach vs the spectral
incompressible reference, rendered as 2D maps.

Writes the compressible snapshot CSV and the reference vorticity CSV, then
(if plotkit is installed) renders vorticity/divergence maps from both.
Defaults stay small so the demo runs in about a minute; pass --full for the
N=160, T=6 roll-up study.

Usage: python demos/shear_layer_maps.py [OUTDIR] [--full]
"""

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from allmach import incompressible
from allmach.harness import run_case

parser = argparse.ArgumentParser()
parser.add_argument("outdir", nargs="?", default="demo_out/shear")
parser.add_argument("--full", action="store_true")
args = parser.parse_args()
out = Path(args.outdir)

n = 160 if args.full else 64
t_end = 6.0 if args.full else 1.0

report = run_case("shear-euler", n=n, t_final=t_end, out_dir=out / "compressible")
print(f"compressible run: {report.steps} steps to t = {report.t_final:g}, "
      f"drift {report.conservation_drift:.2e}")

ref = incompressible.shear_flow_init(n=max(n, 160))
ref = incompressible.advance(ref, t_end)
incompressible.write_omega_csv(ref, out / "reference" / "fields_omega.csv")
print(f"spectral reference written at t = {ref.t:g}")

if shutil.which("plotkit"):
    for var in ("omega", "div", "rho-dev"):
        subprocess.run(["plotkit", "field2d", "--in", str(out / "compressible"),
                        "--out", str(out / "fig"), "--var", var], check=True)
    subprocess.run(["plotkit", "field2d", "--in", str(out / "reference"),
                    "--out", str(out / "fig_ref"), "--var", "omega"], check=True)
    print(f"maps in {out}/fig and {out}/fig_ref")
else:
    print("plotkit not installed; CSVs are ready for rendering")
