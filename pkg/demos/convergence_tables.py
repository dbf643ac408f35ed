"""Reproduce the grid-convergence tables for the smooth acoustic wave.

Prints the isentropic table at eps in {0.8, 0.3, 0.05} (watch the
pre-asymptotic negative orders at eps = 0.05 before second order kicks in)
and the full-Euler table at eps in {0.8, 0.1}.  Levels are kept moderate so
the demo finishes in under a minute; raise --levels for the full tables.

Usage: python demos/convergence_tables.py [--levels K]
"""

import argparse

from allmach.harness import compute_eoc

parser = argparse.ArgumentParser()
parser.add_argument("--levels", type=int, default=5)
args = parser.parse_args()

n_list = [10 * 2 ** k for k in range(args.levels)]


def show(case, eps, n_list):
    rows = compute_eoc(case, eps=eps, n_list=n_list)
    print(f"\n{case}, eps = {eps}")
    print(f"{'N':>6} {'L1 err rho':>14} {'EOC':>8}")
    for r in rows:
        print(f"{r['n']:>6d} {r['err_rho']:>14.4e} {r['eoc_rho']:>8.4f}")


for eps in (0.8, 0.3, 0.05):
    show("isen-smooth", eps, n_list)

for eps in (0.8, 0.1):
    show("euler-smooth", eps, [max(20, n) for n in n_list])
