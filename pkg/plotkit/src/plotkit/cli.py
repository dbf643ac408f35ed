"""plotkit command line: profiles | eoc | field2d, each with --in DIR
(a completed harness output directory) and --out DIR."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import PlotkitError, plot_eoc, plot_field2d, plot_profiles


def _fields_files(in_dir: Path) -> list[Path]:
    files = sorted(in_dir.glob("fields_*.csv"))
    if not files:
        raise PlotkitError(f"no fields_*.csv in {in_dir}")
    return files


def cmd_profiles(args) -> int:
    in_dir = Path(args.in_dir)
    out_dir = Path(args.out)
    final = in_dir / "fields_final.csv"
    if not final.exists():
        final = _fields_files(in_dir)[-1]
    initial = in_dir / "fields_initial.csv"
    ref = Path(args.ref) / "fields_final.csv" if args.ref else None
    variables = tuple(args.vars.split(","))
    out = plot_profiles(final, out_dir / "profiles.png", variables,
                        reference_csv=ref if ref and ref.exists() else None,
                        initial_csv=initial if initial.exists() else None)
    print(out)
    return 0


def cmd_eoc(args) -> int:
    out = plot_eoc(Path(args.in_dir) / "eoc.csv",
                   Path(args.out) / "eoc.png")
    print(out)
    return 0


def cmd_field2d(args) -> int:
    in_dir = Path(args.in_dir)
    final = in_dir / "fields_final.csv"
    if not final.exists():
        final = _fields_files(in_dir)[-1]
    out = plot_field2d(final, Path(args.out) / f"field_{args.var}.png",
                       args.var)
    print(out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit",
                                     description="figures from harness CSV output")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("profiles", cmd_profiles), ("eoc", cmd_eoc),
                     ("field2d", cmd_field2d)):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="in_dir", required=True,
                       help="harness output directory")
        p.add_argument("--out", required=True, help="image output directory")
        if name == "profiles":
            p.add_argument("--vars", default="rho,u",
                           help="comma-separated variables, one panel each")
            p.add_argument("--ref", help="reference run directory to overlay")
        if name == "field2d":
            p.add_argument("--var", default="rho",
                           help="column or derived field (rho-dev, div, omega)")
        p.set_defaults(fn=fn)
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except PlotkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
