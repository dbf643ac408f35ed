"""Low-Mach limit demonstration.

Two experiments on one page:

1. the per-step limit diagnostics (density/energy constancy to O(eps^2),
   discrete divergence residual, Mach-independent time step) on
   well-prepared 2D data;

2. the double shear layer against the spectral incompressible reference:
   the L1 velocity error falls with resolution until the compressible-
   incompressible model gap takes over, and the plateau drops with eps.

Usage: python demos/low_mach_limit.py [--quick]
"""

import argparse

from allmach.apsuite import run_ap_suite
from allmach.harness import run_case, shear_error_vs_reference

parser = argparse.ArgumentParser()
parser.add_argument("--quick", action="store_true",
                    help="smaller sweeps (about one minute)")
args = parser.parse_args()

print("low-Mach diagnostics (well-prepared data):")
for row in run_ap_suite(eps_values=(1e-4, 1e-6), n=40):
    status = "ok" if row["ok"] else "VIOLATED"
    print(f"  {row['label']:<36} eps={row['eps']:<8.0e} "
          f"{row['value']:.3e} <= {row['bound']:.0e}  [{status}]")

print("\nshear layer vs spectral reference (T = 1):")
n_ref = 256 if args.quick else 512
sweep = (16, 32, 64) if args.quick else (16, 32, 64, 128)
for eps in (1e-1, 1e-3):
    errs = []
    for n in sweep:
        rep = run_case("shear-euler", eps=eps, n=n, t_final=1.0,
                       snapshots=False)
        errs.append(shear_error_vs_reference(rep, n_ref=n_ref))
    print(f"  eps={eps:<6g}: " + "  ".join(
        f"N={n}:{e:.3e}" for n, e in zip(sweep, errs)))
