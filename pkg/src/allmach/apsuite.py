"""Low-Mach limit diagnostics: well-prepared data runs with per-step
monitors of density/energy constancy and the discrete divergence residual.
Used by the ap-test CLI subcommand and the acceptance suite.
"""

from __future__ import annotations

import numpy as np

from .cases import CATALOG, make_setup
from .core import (FULL_EULER, ConservedState, FieldGrid, GasModel, RunConfig,
                   StepMonitor, time_step)
from .euler import step_second_order_full
from .isen1d import step_second_order
from .isen2d import step_second_order_2d


def well_prepared_1d(eps: float, n: int = 64) -> tuple[ConservedState, GasModel]:
    """rho = 1 + eps^2 sin(2 pi x), uniform unit velocity."""
    grid = FieldGrid.line(n)
    x = grid.centers()
    rho = 1.0 + eps ** 2 * np.sin(2.0 * np.pi * x)
    gas = GasModel(gamma=2.0, eps=eps)
    return ConservedState(grid=grid, rho=rho, m=(rho,)), gas


def euler_2d_well_prepared(eps: float, n: int = 40) -> tuple[ConservedState, GasModel]:
    """Full-Euler embedding of the low-Mach 2D data: unit density/pressure
    plus eps^2 perturbations, divergence-free leading-order velocity."""
    gas = GasModel(gamma=1.4, eps=eps, mode=FULL_EULER)
    grid = FieldGrid.square(n)
    x = grid.centers(0).reshape(-1, 1)
    y = grid.centers(1).reshape(1, -1)
    one = np.ones(grid.n)
    rho = 1.0 + eps ** 2 * np.sin(2.0 * np.pi * (x + y)) ** 2 * one
    u = np.sin(2.0 * np.pi * (x - y)) * one
    v = np.sin(2.0 * np.pi * (x - y)) * one
    p = 1.0 + eps ** 2 * np.cos(2.0 * np.pi * (x + y)) * one
    E = gas.energy(rho, u ** 2 + v ** 2, p)
    return ConservedState(grid=grid, rho=rho, m=(rho * u, rho * v), E=E), gas


def _march(state, gas, cfg, stepper, steps):
    monitor = StepMonitor()
    worst_dev = 0.0
    worst_div = 0.0
    first_dt = None
    for _ in range(steps):
        dt, _ = time_step(state, gas, cfg)
        if first_dt is None:
            first_dt = dt
        monitor.reset()
        state = stepper(state, gas, cfg, dt=dt, monitor=monitor)
        fieldv = state.E if gas.is_full else state.rho
        worst_dev = max(worst_dev, float(np.max(np.abs(fieldv - fieldv.mean()))))
        worst_div = max(worst_div, monitor.div_inf)
    return worst_dev, worst_div, first_dt


def run_ap_suite(eps_values=(1e-4, 1e-6), n: int = 40, steps: int = 10) -> list[dict]:
    """Run the low-Mach diagnostics; each row carries value, bound, ok."""
    cfg = RunConfig(cfl_imp=0.45, theta=1.5)
    rows = []
    dt_by_eps = {}
    for eps in eps_values:
        state, gas = well_prepared_1d(eps, max(n, 64))
        dev = 0.0
        for _ in range(20):
            dt, _ = time_step(state, gas, cfg)
            state = step_second_order(state, gas, cfg, dt=dt)
            dev = max(dev, float(np.max(np.abs(state.rho - state.rho.mean()))))
        rows.append({"label": "1d isentropic density constancy",
                     "eps": eps, "value": dev, "bound": 10.0 * eps ** 2,
                     "ok": dev <= 10.0 * eps ** 2})

        state, gas, _ = make_setup(CATALOG["isen-2d"], eps=eps, n=n)
        dev, div, dt0 = _march(state, gas, cfg, step_second_order_2d, steps)
        div_bound = max(10.0 * eps, 1e-10)
        rows.append({"label": "2d isentropic density constancy",
                     "eps": eps, "value": dev, "bound": 10.0 * eps ** 2,
                     "ok": dev <= 10.0 * eps ** 2})
        rows.append({"label": "2d isentropic divergence residual",
                     "eps": eps, "value": div, "bound": div_bound,
                     "ok": div <= div_bound})
        dt_by_eps[eps] = dt0

        state, gas = euler_2d_well_prepared(eps, n)
        dev, div, _ = _march(state, gas, cfg, step_second_order_full, steps)
        rows.append({"label": "2d full-Euler energy constancy",
                     "eps": eps, "value": dev, "bound": 10.0 * eps ** 2,
                     "ok": dev <= 10.0 * eps ** 2})
        rows.append({"label": "2d full-Euler divergence residual",
                     "eps": eps, "value": div, "bound": div_bound,
                     "ok": div <= div_bound})

    # dt must not depend on eps (material-wave CFL)
    state_a, gas_a, _ = make_setup(CATALOG["isen-2d"], eps=1e-2, n=n)
    state_b, gas_b, _ = make_setup(CATALOG["isen-2d"], eps=1e-6, n=n)
    dt_a, _ = time_step(state_a, gas_a, cfg)
    dt_b, _ = time_step(state_b, gas_b, cfg)
    ratio = abs(dt_a / dt_b - 1.0)
    rows.append({"label": "dt ratio eps 1e-2 vs 1e-6", "eps": 1e-6,
                 "value": ratio, "bound": 0.01, "ok": ratio <= 0.01})
    return rows
