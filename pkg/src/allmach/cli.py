"""Command-line entry point.

Subcommands: run, convergence, stability, ap-test, list-cases.  Flags can
also be supplied through an INI-style config file (same keys as the flags,
one per line); explicit command-line values win.  Exit codes: 0 success,
1 bad arguments, 2 solver failure.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from .cases import CATALOG
from .errors import SolverError
from .harness import compute_eoc, run_case, write_eoc_csv
from .stability import naive_threshold, stability_map


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _add_common(p: _Parser):
    p.add_argument("--case", help="catalog case id (see list-cases)")
    p.add_argument("--eps", type=float, help="Mach parameter override")
    p.add_argument("--n", type=int, help="cells per axis override")
    p.add_argument("--order", type=int, choices=(1, 2), help="time order")
    p.add_argument("--cfl", type=float, help="CFL_imp override")
    p.add_argument("--theta", type=float, help="limiter parameter override")
    p.add_argument("--tfinal", type=float, help="final time override")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--config", help="INI config file (same keys as flags)")


def _apply_config(args: argparse.Namespace, argv_flags: set[str]):
    """Fill argument values from the config file where the CLI left them unset."""
    if not args.config:
        return
    text = Path(args.config).read_text()
    if not text.lstrip().startswith("["):
        text = "[allmach]\n" + text
    parser = configparser.ConfigParser()
    parser.read_string(text)
    section = parser[parser.sections()[0]]
    casts = {"eps": float, "n": int, "order": int, "cfl": float,
             "theta": float, "tfinal": float, "case": str, "out": str,
             "levels": int}
    for key, value in section.items():
        if key not in casts:
            raise _ArgumentError(f"unknown config key {key!r}")
        if f"--{key}" in argv_flags:
            continue        # CLI wins
        setattr(args, key, casts[key](value))


def _require_case(args) -> str:
    if not args.case:
        raise _ArgumentError("--case is required (see list-cases)")
    if args.case not in CATALOG:
        raise _ArgumentError(f"unknown case {args.case!r}; "
                             f"known: {', '.join(sorted(CATALOG))}")
    return args.case


def cmd_list_cases(args) -> int:
    width = max(len(c) for c in CATALOG)
    for cid, case in sorted(CATALOG.items()):
        print(f"{cid:<{width}}  dim={case.dim}  {case.system:<10}  "
              f"eps={case.eps:<8g} n={case.n:<5d} T={case.t_final:<6g} "
              f"{case.description}")
    return 0


def cmd_run(args) -> int:
    cid = _require_case(args)
    report = run_case(cid, eps=args.eps, n=args.n, order=args.order,
                      cfl=args.cfl, theta=args.theta, t_final=args.tfinal,
                      out_dir=args.out)
    print(f"{cid}: {report.steps} steps to t = {report.t_final:.6g}, "
          f"max classical CFL {report.max_classical_cfl:.4f}, "
          f"conservation drift {report.conservation_drift:.3e}")
    print(f"outputs in {report.out_dir}")
    return 0


def cmd_convergence(args) -> int:
    cid = _require_case(args)
    case = CATALOG[cid]
    n0 = args.n or case.n // 8 or 10
    n_list = [n0 * 2 ** k for k in range(args.levels)]
    variables = ("rho", "m1", "E") if case.system == "full_euler" else ("rho", "m1")
    rows = compute_eoc(case, eps=args.eps, n_list=n_list, order=args.order,
                       variables=variables, t_final=args.tfinal)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_eoc_csv(out / "eoc.csv", rows)
    header = ["n"] + [k for k in rows[0] if k != "n"]
    print("  ".join(f"{h:>12}" for h in header))
    for row in rows:
        print("  ".join(f"{row[h]:>12.4e}" if h.startswith("err") else
                        f"{row[h]:>12.4f}" if h.startswith("eoc") else
                        f"{row[h]:>12d}" for h in header))
    print(f"eoc table written to {out / 'eoc.csv'}")
    return 0


def cmd_stability(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    c_values = np.linspace(0.05, 100.0, 400)
    rows = stability_map(c_values)
    lines = ["c,max_amp_naive,max_amp_staggered"]
    for c, naive, stag in rows:
        lines.append(f"{c:.17g},{naive:.17g},{stag:.17g}")
    (out / "stability.csv").write_text("\n".join(lines) + "\n")
    c_star = naive_threshold()
    print(f"cell-centered predictor/corrector stability threshold: "
          f"c* = {c_star:.4f}")
    print(f"staggered final stage: max amplification over sweep = "
          f"{max(r[2] for r in rows):.6f}")
    print(f"map written to {out / 'stability.csv'}")
    return 0


def cmd_ap_test(args) -> int:
    from .apsuite import run_ap_suite
    eps_values = (args.eps,) if args.eps else (1e-4, 1e-6)
    results = run_ap_suite(eps_values, n=args.n or 40)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    ok = True
    for row in results:
        status = "pass" if row["ok"] else "FAIL"
        ok &= row["ok"]
        line = (f"{row['label']:<34} eps={row['eps']:<8.1e} "
                f"value={row['value']:.3e} bound={row['bound']:.3e} [{status}]")
        print(line)
        lines.append(line)
    (out / "ap_report.txt").write_text("\n".join(lines) + "\n")
    return 0 if ok else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="allmach",
                     description="all-Mach staggered semi-implicit Euler solvers")
    sub = parser.add_subparsers(dest="command")
    for name, fn in (("run", cmd_run), ("convergence", cmd_convergence),
                     ("stability", cmd_stability), ("ap-test", cmd_ap_test),
                     ("list-cases", cmd_list_cases)):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "convergence":
            p.add_argument("--levels", type=int, default=4,
                           help="number of doubling levels")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return 1
        _apply_config(args, {a.split("=")[0] for a in argv if a.startswith("--")})
        return args.fn(args)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
