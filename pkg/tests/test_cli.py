import numpy as np

from allmach import cli
from allmach.errors import NonPositiveDensity


def test_list_cases_exit_zero(capsys):
    assert cli.main(["list-cases"]) == 0
    out = capsys.readouterr().out
    assert "sod" in out and "riemann" in out


def test_unknown_case_is_bad_argument(capsys):
    assert cli.main(["run", "--case", "nope"]) == 1
    assert "unknown case" in capsys.readouterr().err


def test_missing_case_is_bad_argument():
    assert cli.main(["run"]) == 1


def test_bad_flag_is_bad_argument():
    assert cli.main(["run", "--case", "constant-1d", "--frobnicate"]) == 1


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    assert cli.main(["run", "--case", "constant-1d", "--out", str(out)]) == 0
    for name in ("fields_initial.csv", "fields_final.csv", "monitors.csv",
                 "report.txt"):
        assert (out / name).exists()


def test_config_file_and_cli_override(tmp_path):
    cfgfile = tmp_path / "run.ini"
    cfgfile.write_text("case = constant-1d\nn = 16\ntfinal = 0.01\n")
    out = tmp_path / "o"
    rc = cli.main(["run", "--config", str(cfgfile), "--out", str(out),
                   "--n", "8"])
    assert rc == 0
    report = (out / "report.txt").read_text()
    assert "n: 8" in report             # CLI wins over the file
    assert "t_final: 0.01" in report


def test_unknown_config_key(tmp_path, capsys):
    cfgfile = tmp_path / "run.ini"
    cfgfile.write_text("case = constant-1d\nbogus = 2\n")
    assert cli.main(["run", "--config", str(cfgfile)]) == 1


def test_solver_error_maps_to_exit_two(monkeypatch, capsys):
    def boom(*a, **k):
        raise NonPositiveDensity("synthetic failure")
    monkeypatch.setattr(cli, "run_case", boom)
    assert cli.main(["run", "--case", "constant-1d"]) == 2
    assert "solver error" in capsys.readouterr().err


def test_convergence_writes_eoc_csv(tmp_path):
    out = tmp_path / "c"
    rc = cli.main(["convergence", "--case", "isen-smooth", "--eps", "0.8",
                   "--n", "20", "--levels", "2", "--tfinal", "0.05",
                   "--out", str(out)])
    assert rc == 0
    text = (out / "eoc.csv").read_text().splitlines()
    assert text[0].startswith("n,err_rho,eoc_rho")
    assert len(text) == 3


def test_stability_subcommand(tmp_path, capsys):
    out = tmp_path / "s"
    assert cli.main(["stability", "--out", str(out)]) == 0
    lines = (out / "stability.csv").read_text().splitlines()
    assert lines[0] == "c,max_amp_naive,max_amp_staggered"
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    assert np.all(data[:, 2] <= 1.0 + 1e-12)
    printed = capsys.readouterr().out
    assert "c* = 0.5000" in printed
