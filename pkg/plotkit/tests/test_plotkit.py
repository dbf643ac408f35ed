import subprocess
import sys
from pathlib import Path

import pytest

from plotkit import cli
from plotkit.plots import PlotkitError, plot_eoc, plot_field2d, plot_profiles


@pytest.fixture(scope="module")
def constant_run(tmp_path_factory):
    """A completed harness output directory for the trivial constant case,
    produced through the solver CLI (the only coupling surface)."""
    out = tmp_path_factory.mktemp("run") / "constant"
    proc = subprocess.run(
        [sys.executable, "-m", "allmach.cli", "run", "--case", "constant-1d",
         "--out", str(out)],
        capture_output=True, text=True)
    if proc.returncode != 0:
        pytest.skip(f"allmach CLI unavailable: {proc.stderr.strip()}")
    return out


@pytest.fixture(scope="module")
def constant_run_2d(tmp_path_factory):
    out = tmp_path_factory.mktemp("run2d") / "constant2d"
    proc = subprocess.run(
        [sys.executable, "-m", "allmach.cli", "run", "--case", "constant-2d",
         "--out", str(out)],
        capture_output=True, text=True)
    if proc.returncode != 0:
        pytest.skip(f"allmach CLI unavailable: {proc.stderr.strip()}")
    return out


def write_eoc_csv(path: Path):
    lines = ["n,err_rho,eoc_rho"]
    for n, e, o in ((40, 1e-2, 0.0), (80, 2.5e-3, 2.0), (160, 6.25e-4, 2.0)):
        lines.append(f"{n},{e},{o}")
    path.write_text("\n".join(lines) + "\n")


def test_profiles_golden_smoke(constant_run, tmp_path):
    out1 = plot_profiles(constant_run / "fields_final.csv",
                         tmp_path / "a" / "profiles.png")
    out2 = plot_profiles(constant_run / "fields_final.csv",
                         tmp_path / "b" / "profiles.png")
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert len(b1) > 1000
    assert b1 == b2                     # idempotent, timestamp free
    # inputs never mutated
    before = (constant_run / "fields_final.csv").read_bytes()
    plot_profiles(constant_run / "fields_final.csv",
                  tmp_path / "c" / "profiles.png")
    assert (constant_run / "fields_final.csv").read_bytes() == before


def test_profiles_missing_column(constant_run, tmp_path):
    with pytest.raises(PlotkitError, match="column"):
        plot_profiles(constant_run / "fields_final.csv",
                      tmp_path / "x.png", variables=("nope",))


def test_profiles_single_variable(constant_run, tmp_path):
    out = plot_profiles(constant_run / "fields_final.csv",
                        tmp_path / "single.png", variables=("rho",))
    assert out.exists()


def test_eoc_plot_and_empty_error(tmp_path):
    csv = tmp_path / "eoc.csv"
    write_eoc_csv(csv)
    out = plot_eoc(csv, tmp_path / "eoc.png")
    assert out.exists()
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(PlotkitError, match="empty"):
        plot_eoc(empty, tmp_path / "nope.png")


def test_field2d_constant_and_derived(constant_run_2d, tmp_path):
    src = constant_run_2d / "fields_final.csv"
    out = plot_field2d(src, tmp_path / "rho.png", "rho")
    assert out.exists()
    out = plot_field2d(src, tmp_path / "div.png", "div")
    assert out.exists()
    with pytest.raises(PlotkitError, match="unknown derived"):
        plot_field2d(src, tmp_path / "zzz.png", "zzz")


def test_field2d_rejects_1d(constant_run, tmp_path):
    with pytest.raises(PlotkitError, match="2D"):
        plot_field2d(constant_run / "fields_final.csv", tmp_path / "x.png")


def test_cli_round_trip(constant_run, constant_run_2d, tmp_path):
    rc = cli.main(["profiles", "--in", str(constant_run),
                   "--out", str(tmp_path / "fig")])
    assert rc == 0
    assert (tmp_path / "fig" / "profiles.png").exists()
    rc = cli.main(["field2d", "--in", str(constant_run_2d),
                   "--out", str(tmp_path / "fig"), "--var", "rho-dev"])
    assert rc == 0
    csv = tmp_path / "tab"
    csv.mkdir()
    write_eoc_csv(csv / "eoc.csv")
    rc = cli.main(["eoc", "--in", str(csv), "--out", str(tmp_path / "fig")])
    assert rc == 0


def test_cli_reports_errors(tmp_path):
    rc = cli.main(["profiles", "--in", str(tmp_path), "--out", str(tmp_path)])
    assert rc == 1
