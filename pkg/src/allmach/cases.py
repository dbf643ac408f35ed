"""Experiment catalog: initial data and run parameters for every test case.

Each entry resolves to (state, gas, config) through make_setup; the harness
owns time stepping and output.  eps and n given on the command line override
the catalog defaults.

Time-step conventions per case: the material-wave rule caps the acoustic
speed (the all-Mach advantage); the smooth full-Euler convergence studies
instead resolve the acoustic time scale (classical rule), which is the
regime their reference error tables were produced in; the 1D Riemann case
pins dt = T/100 so its classical Courant monitors are comparable across eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (FULL_EULER, ISENTROPIC, PERIODIC, ZERO_GRADIENT,
                   ConservedState, FieldGrid, GasModel, RunConfig)
from . import incompressible


@dataclass(frozen=True)
class CaseSpec:
    """Catalog entry: what to run and how."""

    case_id: str
    description: str
    dim: int
    system: str                     # isentropic | full_euler
    ic: str                         # initial-condition builder key
    gamma: float
    eps: float                      # default Mach parameter
    n: int                          # default cells per axis
    t_final: float
    cfl_imp: float = 0.45
    theta: float = 1.5
    order: int = 2
    C: float = 1.0
    x_min: float = 0.0
    x_max: float = 1.0
    boundary: str = PERIODIC
    fixed_dt: float = 0.0           # > 0 pins dt (reference recipes)
    classical_dt: bool = False      # resolve acoustics in time
    snapshot_times: tuple[float, ...] = ()
    reference_n: int = 0            # 0 = no companion reference run
    reference_dt: float = 0.0
    notes: str = ""

    def domain(self, eps: float) -> tuple[float, float]:
        if self.ic == "pulses-euler":
            half = 2.0 / eps
            return -half, half
        return self.x_min, self.x_max


def _riemann_ic(grid: FieldGrid, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise data of the 1D Riemann battery; the printed perturbation
    amplitude eps^2 flips to eps^-2 for eps > 1 (positivity)."""
    x = grid.centers()
    amp = eps ** 2 if eps <= 1.0 else eps ** -2
    rho = np.ones_like(x)
    m = np.ones_like(x)
    m[(x <= 0.2) | (x > 0.8)] = 1.0 - amp / 2.0
    rho[(x > 0.2) & (x <= 0.3)] = 1.0 + amp
    m[(x > 0.3) & (x <= 0.7)] = 1.0 + amp / 2.0
    rho[(x > 0.7) & (x <= 0.8)] = 1.0 - amp
    return rho, m


def _simple_wave_ic(grid: FieldGrid, gas: GasModel):
    """Smooth acoustic simple wave used by both convergence studies."""
    x = grid.centers()
    L = grid.x_max[0] - grid.x_min[0]
    u0 = np.sin(2.0 * np.pi * x / L)
    c = math.sqrt(gas.gamma) / gas.eps
    rho = (1.0 + (gas.gamma - 1.0) * u0 / (2.0 * c)) ** (2.0 / (gas.gamma - 1.0))
    return rho, u0


def _pulses_isen_ic(grid: FieldGrid, eps: float, gamma: float):
    x = grid.centers()
    rho = 0.955 + 0.5 * eps * (1.0 - np.cos(2.0 * np.pi * x))
    u = -np.sign(x) * math.sqrt(gamma) * (1.0 - np.cos(2.0 * np.pi * x))
    return rho, rho * u


def _pulses_euler_ic(grid: FieldGrid, eps: float, gamma: float):
    x = grid.centers()
    L = grid.x_max[0]
    phase = 1.0 - np.cos(2.0 * np.pi * x / L)
    rho = 0.955 + 0.5 * eps * 2.0 * phase
    u = 0.5 * (2.0 * math.sqrt(gamma)) * np.sign(x) * phase
    p = 1.0 + 0.5 * eps * 2.0 * gamma * phase
    return rho, u, p


def _isen2d_ic(grid: FieldGrid, eps: float):
    x = grid.centers(0).reshape(-1, 1)
    y = grid.centers(1).reshape(1, -1)
    one = np.ones(grid.n)
    rho = 1.0 + eps ** 2 * np.sin(2.0 * np.pi * (x + y)) ** 2 * one
    m1 = (np.sin(2.0 * np.pi * (x - y)) + eps ** 2 * np.sin(2.0 * np.pi * (x + y))) * one
    m2 = (np.sin(2.0 * np.pi * (x - y)) + eps ** 2 * np.cos(2.0 * np.pi * (x + y))) * one
    return rho, m1, m2


def _sod_ic(grid: FieldGrid):
    x = grid.centers()
    rho = np.where(x < 0.5, 1.0, 0.125)
    p = np.where(x < 0.5, 1.0, 0.1)
    return rho, np.zeros_like(x), p


def _shear_velocity(grid: FieldGrid):
    """Well-prepared velocity embedding of the double shear layer: the
    spectral solver's initial velocity sampled at the grid centers."""
    field = incompressible.shear_flow_init(n=max(grid.n[0], 160))
    return incompressible.sample_velocity_at_centers(field.omega, grid.n[0],
                                                     grid.parity)


def make_setup(case: CaseSpec, eps: float | None = None, n: int | None = None,
               order: int | None = None, cfl: float | None = None,
               theta: float | None = None,
               t_final: float | None = None) -> tuple[ConservedState, GasModel, RunConfig]:
    """Resolve a catalog entry (with overrides) into run-ready objects."""
    eps = case.eps if eps is None else eps
    n = case.n if n is None else n
    order = case.order if order is None else order
    cfl = case.cfl_imp if cfl is None else cfl
    theta = case.theta if theta is None else theta
    t_end = case.t_final if t_final is None else t_final
    if case.case_id == "euler-smooth" and eps < 1e-3 and t_final is None:
        t_end = 0.01

    lo, hi = case.domain(eps)
    gas = GasModel(gamma=case.gamma, eps=eps, mode=case.system, C=case.C)
    if case.dim == 1:
        grid = FieldGrid.line(n, lo, hi, boundary=case.boundary)
    else:
        grid = FieldGrid.square(n, lo, hi)

    if case.ic == "riemann-steps":
        rho, m = _riemann_ic(grid, eps)
        state = ConservedState(grid=grid, rho=rho, m=(m,))
    elif case.ic == "simple-wave":
        rho, u = _simple_wave_ic(grid, gas)
        if case.system == FULL_EULER:
            p = gas.pressure_of_rho(rho)
            state = ConservedState(grid=grid, rho=rho, m=(rho * u,),
                                   E=gas.energy(rho, u * u, p))
        else:
            state = ConservedState(grid=grid, rho=rho, m=(rho * u,))
    elif case.ic == "pulses-isen":
        rho, m = _pulses_isen_ic(grid, eps, case.gamma)
        state = ConservedState(grid=grid, rho=rho, m=(m,))
    elif case.ic == "pulses-euler":
        rho, u, p = _pulses_euler_ic(grid, eps, case.gamma)
        state = ConservedState(grid=grid, rho=rho, m=(rho * u,),
                               E=gas.energy(rho, u * u, p))
    elif case.ic == "isen2d-vortex":
        rho, m1, m2 = _isen2d_ic(grid, eps)
        state = ConservedState(grid=grid, rho=rho, m=(m1, m2))
    elif case.ic == "sod":
        rho, u, p = _sod_ic(grid)
        state = ConservedState(grid=grid, rho=rho, m=(rho * u,),
                               E=gas.energy(rho, u * u, p))
    elif case.ic == "shear":
        u, v = _shear_velocity(grid)
        rho = np.ones(grid.n)
        if case.system == FULL_EULER:
            p = np.ones(grid.n)
            state = ConservedState(grid=grid, rho=rho, m=(rho * u, rho * v),
                                   E=gas.energy(rho, u ** 2 + v ** 2, p))
        else:
            state = ConservedState(grid=grid, rho=rho, m=(rho * u, rho * v))
    elif case.ic == "constant":
        rho = np.full(grid.n, 1.2)
        if case.dim == 1:
            m = (np.full(grid.n, 0.5),)
        else:
            m = (np.full(grid.n, 0.5), np.full(grid.n, -0.25))
        if case.system == FULL_EULER:
            u_sq = sum((mk / rho) ** 2 for mk in m)
            state = ConservedState(grid=grid, rho=rho, m=m,
                                   E=gas.energy(rho, u_sq, np.full(grid.n, 2.0)))
        else:
            state = ConservedState(grid=grid, rho=rho, m=m)
    else:
        raise ValueError(f"unknown initial condition {case.ic!r}")

    cfg = RunConfig(cfl_imp=cfl, theta=theta, order=order, t_final=t_end,
                    snapshot_times=case.snapshot_times, fixed_dt=case.fixed_dt)
    return state, gas, cfg


CATALOG: dict[str, CaseSpec] = {c.case_id: c for c in [
    CaseSpec("riemann", "1D isentropic Riemann battery (four steps of size eps^2)",
             1, ISENTROPIC, "riemann-steps", gamma=2.0, eps=0.05, n=200,
             t_final=0.05, cfl_imp=0.5, fixed_dt=5e-4,
             reference_n=500, reference_dt=5e-5,
             notes="fixed dt = T/100 reproduces the classical Courant monitors"),
    CaseSpec("isen-smooth", "1D isentropic smooth wave for grid convergence",
             1, ISENTROPIC, "simple-wave", gamma=2.0, eps=0.8, n=320,
             t_final=0.3, x_min=-2.5, x_max=2.5),
    CaseSpec("pulses-isen", "two colliding acoustic waves (isentropic, gamma 1.4)",
             1, ISENTROPIC, "pulses-isen", gamma=1.4, eps=0.1, n=100,
             t_final=0.08, cfl_imp=0.5, x_min=-1.0, x_max=1.0,
             snapshot_times=(0.01, 0.02, 0.04, 0.06, 0.08),
             reference_n=1000, reference_dt=1e-4),
    CaseSpec("isen-2d", "2D isentropic vortex-like flow at low Mach",
             2, ISENTROPIC, "isen2d-vortex", gamma=2.0, eps=0.05, n=40,
             t_final=1.0, cfl_imp=0.5),
    CaseSpec("sod", "Sod shock tube (full Euler, eps = 1)",
             1, FULL_EULER, "sod", gamma=1.4, eps=1.0, n=200,
             t_final=0.18, cfl_imp=0.5, boundary=ZERO_GRADIENT,
             reference_n=1000),
    CaseSpec("euler-smooth", "1D full-Euler smooth wave for grid convergence",
             1, FULL_EULER, "simple-wave", gamma=1.4, eps=0.8, n=320,
             t_final=0.3, x_min=-2.5, x_max=2.5, classical_dt=True,
             notes="T drops to 0.01 for eps < 1e-3; acoustic-resolving dt"),
    CaseSpec("pulses-euler", "two colliding acoustic pulses (full Euler, long domain)",
             1, FULL_EULER, "pulses-euler", gamma=1.4, eps=1.0 / 11.0, n=440,
             t_final=1.63, cfl_imp=0.5, snapshot_times=(0.815, 1.63),
             reference_n=1500),
    CaseSpec("shear-isen", "double shear layer, isentropic low-Mach run",
             2, ISENTROPIC, "shear", gamma=2.0, eps=1e-4, n=160,
             t_final=6.0, cfl_imp=0.5, x_min=0.0, x_max=2.0 * math.pi),
    CaseSpec("shear-euler", "double shear layer, full-Euler low-Mach run",
             2, FULL_EULER, "shear", gamma=1.4, eps=1e-4, n=160,
             t_final=6.0, cfl_imp=0.5, x_min=0.0, x_max=2.0 * math.pi),
    CaseSpec("constant-1d", "spatially constant state (fixed-point smoke case)",
             1, FULL_EULER, "constant", gamma=1.4, eps=1e-2, n=32,
             t_final=0.1),
    CaseSpec("constant-2d", "spatially constant 2D state (fixed-point smoke case)",
             2, ISENTROPIC, "constant", gamma=2.0, eps=1e-2, n=16,
             t_final=0.05),
]}
