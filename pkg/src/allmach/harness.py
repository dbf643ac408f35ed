"""Run driver: time loop with monitors, snapshot/CSV emission, grid
convergence (EOC) machinery and L1 comparisons.

CSV schema: comma separated, header row, 17-significant-digit floats;
fields files carry columns x[,y],rho,m1[,m2][,E],p,u[,v].  report.txt is
"key: value" lines.  Output is deterministic for a given case and build.
"""

from __future__ import annotations

import math
import subprocess
import time as _time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, incompressible
from .cases import CATALOG, CaseSpec, make_setup
from .core import (ConservedState, GasModel, RunConfig, StepMonitor,
                   classical_courant, pressure, sound_speed, time_step)
from .errors import SolverError
from .euler import step_full
from .isen1d import step as isen1d_step
from .isen2d import step_2d as isen2d_step


@dataclass
class RunReport:
    """Everything one run produced: snapshots, per-step monitors, timings."""

    case_id: str
    eps: float
    n: int
    order: int
    snapshots: list[tuple[float, ConservedState]] = field(default_factory=list)
    steps: int = 0
    t_final: float = 0.0
    monitor_rows: list[dict] = field(default_factory=list)
    conservation_drift: float = 0.0
    max_classical_cfl: float = 0.0
    wall_time: float = 0.0
    out_dir: str = ""

    @property
    def final_state(self) -> ConservedState:
        return self.snapshots[-1][1]


def select_stepper(state: ConservedState, gas: GasModel):
    if gas.is_full:
        return step_full
    return isen1d_step if state.grid.dim == 1 else isen2d_step


def classical_dt_rule(state: ConservedState, gas: GasModel, cfg: RunConfig) -> float:
    """Acoustic-resolving step: cfl / sum_k max(|u_k| + c_s/eps)/dx_k."""
    u = state.velocity()
    cs = sound_speed(state, gas)
    rate = sum(np.max(np.abs(uk) + cs / gas.eps) / state.grid.dx[k]
               for k, uk in enumerate(u))
    return cfg.cfl_imp / float(rate)


def advance(state: ConservedState, gas: GasModel, cfg: RunConfig, t_end: float,
            report: RunReport | None = None, classical: bool = False,
            force_even: bool = True, collect=None) -> ConservedState:
    """March to t_end, keeping the total step count even so the state lands
    on the original lattice parity (staggered runs stay comparable).

    Near t_end the remainder is split into the smallest admissible number
    of equal steps with the right parity.  collect(t, state) is called
    after every step when given (snapshot hooks).
    """
    monitor = StepMonitor()
    steps = 0
    while state.t < t_end - 1e-13:
        if cfg.fixed_dt > 0.0:
            dt_cfl = cfg.fixed_dt
        elif classical:
            dt_cfl = classical_dt_rule(state, gas, cfg)
        else:
            dt_cfl, _ = time_step(state, gas, cfg)
        remaining = t_end - state.t
        r = max(1, math.ceil(remaining / dt_cfl - 1e-12))
        if force_even and (steps + r) % 2 == 1:
            r += 1
        dt = remaining / r
        cfl_now = classical_courant(state, gas, dt)
        totals_before = state.totals()
        monitor.reset()
        stepper = select_stepper(state, gas)
        try:
            state = stepper(state, gas, cfg, dt=dt, monitor=monitor)
        except SolverError as exc:
            step_no = (report.steps if report is not None else steps) + 1
            raise type(exc)(f"step {step_no} (t = {state.t:.6g}): {exc}") from exc
        steps += 1
        if report is not None:
            report.steps += 1
            report.max_classical_cfl = max(report.max_classical_cfl, cfl_now)
            totals_after = state.totals()
            drift = max(abs(totals_after[k] - totals_before[k])
                        / (abs(totals_before[k]) + 1.0) for k in totals_before)
            report.conservation_drift = max(report.conservation_drift, drift)
            report.monitor_rows.append({
                "step": report.steps, "t": state.t, "dt": dt,
                "classical_cfl": cfl_now, "drift": drift,
                "newton_iters": monitor.newton_iters,
                "cg_iters": monitor.cg_iters,
                "div_monitor": monitor.div_inf,
            })
        if collect is not None:
            collect(state)
    return state


def run_case(case: CaseSpec | str, eps: float | None = None,
             n: int | None = None, order: int | None = None,
             cfl: float | None = None, theta: float | None = None,
             t_final: float | None = None, out_dir: str | Path | None = None,
             snapshots: bool = True) -> RunReport:
    """Execute one catalog case and (optionally) write its output files."""
    if isinstance(case, str):
        case = CATALOG[case]
    state, gas, cfg = make_setup(case, eps, n, order, cfl, theta, t_final)
    report = RunReport(case_id=case.case_id, eps=gas.eps, n=state.grid.n[0],
                       order=cfg.order)
    wall_start = _time.perf_counter()
    report.snapshots.append((state.t, state.copy()))

    times = [t for t in cfg.snapshot_times if t < cfg.t_final - 1e-13] \
        if snapshots else []
    times.append(cfg.t_final)
    for t_target in times:
        state = advance(state, gas, cfg, t_target, report,
                        classical=case.classical_dt)
        report.snapshots.append((state.t, state.copy()))
    report.t_final = state.t
    report.wall_time = _time.perf_counter() - wall_start

    if out_dir is not None:
        write_outputs(report, case, gas, cfg, Path(out_dir))
    return report


# ---------------------------------------------------------------------------
# comparisons and EOC
# ---------------------------------------------------------------------------

def restrict(fine: np.ndarray, n_coarse: int) -> np.ndarray:
    """Conservative restriction of a (1D or 2D) field to n_coarse cells."""
    if fine.ndim == 1:
        ratio = fine.shape[0] // n_coarse
        if ratio * n_coarse != fine.shape[0]:
            raise ValueError("restriction requires an integer refinement ratio")
        return fine.reshape(n_coarse, ratio).mean(axis=1)
    ratio = fine.shape[0] // n_coarse
    if ratio * n_coarse != fine.shape[0]:
        raise ValueError("restriction requires an integer refinement ratio")
    return fine.reshape(n_coarse, ratio, n_coarse, ratio).mean(axis=(1, 3))


def compare_l1(run_field: np.ndarray, reference: np.ndarray) -> float:
    """Relative L1 distance after conservative restriction of the finer field."""
    a, b = run_field, reference
    if a.shape != b.shape:
        if a.shape[0] > b.shape[0]:
            a = restrict(a, b.shape[0])
        else:
            b = restrict(b, a.shape[0])
    return float(np.sum(np.abs(a - b)) / np.sum(np.abs(b)))


def state_variable(state: ConservedState, var: str) -> np.ndarray:
    if var == "rho":
        return state.rho
    if var in ("m", "m1"):
        return state.m[0]
    if var == "m2":
        return state.m[1]
    if var == "E":
        return state.E
    raise ValueError(f"unknown variable {var!r}")


def eoc_from_errors(errors) -> list[float]:
    """log2 ratios of successive errors (first entry has no predecessor)."""
    out = [0.0]
    for a, b in zip(errors, errors[1:]):
        out.append(math.log2(a / b))
    return out


def compute_eoc(case: CaseSpec | str, eps: float | None = None,
                n_list=(40, 80, 160, 320), order: int | None = None,
                variables: tuple[str, ...] = ("rho",),
                t_final: float | None = None) -> list[dict]:
    """Self-convergence table: row N compares the N- and 2N-cell runs.

    n_list must be strictly doubling; one extra run at 2*max(n_list) closes
    the last row.  EOC printed at row N is log2(e_{N/2} / e_N).
    """
    if isinstance(case, str):
        case = CATALOG[case]
    n_list = list(n_list)
    for a, b in zip(n_list, n_list[1:]):
        if b != 2 * a:
            raise ValueError("n_list must double at every level")
    runs: dict[int, ConservedState] = {}
    for n in n_list + [2 * n_list[-1]]:
        runs[n] = run_case(case, eps=eps, n=n, order=order, t_final=t_final,
                           snapshots=False).final_state
    rows = []
    prev: dict[str, float] = {}
    for n in n_list:
        row = {"n": n}
        for var in variables:
            coarse = state_variable(runs[n], var)
            fine = restrict(state_variable(runs[2 * n], var), n)
            err = float(np.sum(np.abs(coarse - fine)) / np.sum(np.abs(fine)))
            row[f"err_{var}"] = err
            row[f"eoc_{var}"] = math.log2(prev[var] / err) if var in prev else 0.0
            prev[var] = err
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# output files
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_fields_csv(path: Path, state: ConservedState, gas: GasModel):
    """Snapshot CSV: x[,y],rho,m1[,m2][,E],p,u[,v]."""
    grid = state.grid
    p = pressure(state, gas)
    u = state.velocity()
    cols: list[tuple[str, np.ndarray]] = []
    if grid.dim == 1:
        cols.append(("x", grid.centers()))
    else:
        xs = grid.centers(0)
        ys = grid.centers(1)
        cols.append(("x", np.repeat(xs, grid.n[1])))
        cols.append(("y", np.tile(ys, grid.n[0])))
    cols.append(("rho", state.rho))
    cols.append(("m1", state.m[0]))
    if grid.dim == 2:
        cols.append(("m2", state.m[1]))
    if state.E is not None:
        cols.append(("E", state.E))
    cols.append(("p", p))
    cols.append(("u", u[0]))
    if grid.dim == 2:
        cols.append(("v", u[1]))
    header = ",".join(name for name, _ in cols)
    flat = [arr.ravel() for _, arr in cols]
    lines = [header]
    for i in range(flat[0].shape[0]):
        lines.append(",".join(_fmt(col[i]) for col in flat))
    path.write_text("\n".join(lines) + "\n")


def write_monitors_csv(path: Path, report: RunReport):
    header = "step,t,dt,classical_cfl,drift,newton_iters,cg_iters,div_monitor"
    lines = [header]
    for row in report.monitor_rows:
        lines.append(",".join([str(row["step"]), _fmt(row["t"]), _fmt(row["dt"]),
                               _fmt(row["classical_cfl"]), _fmt(row["drift"]),
                               str(row["newton_iters"]), str(row["cg_iters"]),
                               _fmt(row["div_monitor"])]))
    path.write_text("\n".join(lines) + "\n")


def write_eoc_csv(path: Path, rows: list[dict]):
    if not rows:
        path.write_text("n\n")
        return
    keys = list(rows[0].keys())
    lines = [",".join(keys)]
    for row in rows:
        lines.append(",".join(str(row[k]) if k == "n" else _fmt(row[k])
                              for k in keys))
    path.write_text("\n".join(lines) + "\n")


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=Path(__file__).parent)
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return "unknown"


def write_report_txt(path: Path, report: RunReport, case: CaseSpec,
                     gas: GasModel, cfg: RunConfig):
    lines = [
        f"case: {case.case_id}",
        f"description: {case.description}",
        f"version: {__version__}",
        f"git: {_git_describe()}",
        f"system: {case.system}",
        f"gamma: {gas.gamma}",
        f"eps: {gas.eps}",
        f"n: {report.n}",
        f"order: {cfg.order}",
        f"cfl_imp: {cfg.cfl_imp}",
        f"theta: {cfg.theta}",
        f"t_final: {report.t_final}",
        f"steps: {report.steps}",
        f"max_classical_cfl: {report.max_classical_cfl}",
        f"conservation_drift: {report.conservation_drift}",
        f"wall_time_s: {report.wall_time:.3f}",
    ]
    path.write_text("\n".join(lines) + "\n")


def write_outputs(report: RunReport, case: CaseSpec, gas: GasModel,
                  cfg: RunConfig, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    for idx, (t, snap) in enumerate(report.snapshots):
        tag = "initial" if idx == 0 else (
            "final" if idx == len(report.snapshots) - 1 else f"t{idx}")
        write_fields_csv(out_dir / f"fields_{tag}.csv", snap, gas)
    write_monitors_csv(out_dir / "monitors.csv", report)
    write_report_txt(out_dir / "report.txt", report, case, gas, cfg)
    report.out_dir = str(out_dir)


# ---------------------------------------------------------------------------
# AP comparison against the spectral reference
# ---------------------------------------------------------------------------

_SHEAR_REF_CACHE: dict[tuple[float, int], np.ndarray] = {}


def shear_reference_omega(t_end: float, n_ref: int) -> np.ndarray:
    """Vorticity of the spectral shear-layer reference at t_end (cached:
    the reference is eps- and grid-independent, only sampling varies)."""
    key = (round(t_end, 12), n_ref)
    if key not in _SHEAR_REF_CACHE:
        ref = incompressible.shear_flow_init(n=n_ref)
        ref = incompressible.advance(ref, t_end)
        _SHEAR_REF_CACHE[key] = ref.omega
    return _SHEAR_REF_CACHE[key]


def shear_reference_velocity(t_end: float, n_ref: int, n_out: int,
                             parity: int = 0):
    """Velocities of the spectral shear-layer reference at time t_end,
    sampled at the centers of an n_out staggered grid."""
    omega = shear_reference_omega(t_end, n_ref)
    return incompressible.sample_velocity_at_centers(omega, n_out, parity)


def shear_error_vs_reference(report: RunReport, n_ref: int = 512) -> float:
    """Relative L1 velocity error of a shear-flow run against the spectral
    reference at the same final time."""
    state = report.final_state
    u, v = state.velocity()
    u_ref, v_ref = shear_reference_velocity(report.t_final, n_ref,
                                            state.grid.n[0], state.grid.parity)
    num = np.sum(np.abs(u - u_ref)) + np.sum(np.abs(v - v_ref))
    den = np.sum(np.abs(u_ref)) + np.sum(np.abs(v_ref))
    return float(num / den)
