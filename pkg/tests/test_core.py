import math

import numpy as np
import pytest

from allmach.core import (FULL_EULER, ConservedState, FieldGrid, GasModel,
                          RunConfig, classical_courant, pressure, sound_speed,
                          time_step)
from allmach.errors import NonPositiveDensity, NonPositivePressure


def make_state(rho, m, E=None, n=None, boundary="periodic"):
    n = len(rho) if n is None else n
    grid = FieldGrid.line(n, boundary=boundary)
    return ConservedState(grid=grid, rho=np.asarray(rho, float),
                          m=(np.asarray(m, float),),
                          E=None if E is None else np.asarray(E, float))


def test_grid_spacing_exact():
    g = FieldGrid.line(7, -2.5, 2.5)
    assert g.dx[0] == 5.0 / 7.0
    g2 = FieldGrid.square(40)
    assert g2.dx == (1.0 / 40.0, 1.0 / 40.0)


def test_grid_parity_flip_and_centers():
    g = FieldGrid.line(4)
    assert np.allclose(g.centers(), [0.125, 0.375, 0.625, 0.875])
    gf = g.flipped()
    assert gf.parity == 1
    assert np.allclose(gf.centers(), g.centers() + 0.125)
    assert gf.flipped().parity == 0


def test_zero_gradient_only_1d():
    with pytest.raises(ValueError):
        FieldGrid(n=(8, 8), x_min=(0, 0), x_max=(1, 1), boundary="zero_gradient")


def test_pressure_isentropic_identity():
    gas = GasModel(gamma=2.0, eps=1.0, C=1.0)
    st = make_state([1.0, 1.0], [0.0, 0.0])
    assert np.all(pressure(st, gas) == 1.0)


def test_pressure_sod_left_state():
    gas = GasModel(gamma=1.4, eps=1.0, mode=FULL_EULER)
    st = make_state([1.0, 1.0], [0.0, 0.0], E=[2.5, 2.5])
    assert np.allclose(pressure(st, gas), 1.0)


def test_pressure_full_euler_hand_value():
    # p = (gamma-1) (E - eps^2 |m|^2 / (2 rho)) = 0.4 (3 - 0.25*4/4) = 1.1
    gas = GasModel(gamma=1.4, eps=0.5, mode=FULL_EULER)
    st = make_state([2.0, 2.0], [2.0, 2.0], E=[3.0, 3.0])
    assert np.allclose(pressure(st, gas), 1.1)


def test_pressure_errors():
    gas = GasModel(gamma=1.4, eps=1.0, mode=FULL_EULER)
    st = make_state([1.0, -1.0], [0.0, 0.0], E=[2.5, 2.5])
    with pytest.raises(NonPositiveDensity):
        pressure(st, gas)
    st = make_state([1.0, 1.0], [3.0, 3.0], E=[1.0, 1.0])
    with pytest.raises(NonPositivePressure):
        pressure(st, gas)


def test_eos_round_trip():
    gas = GasModel(gamma=1.4, eps=0.3, mode=FULL_EULER)
    rng = np.random.default_rng(3)
    rho = 1.0 + 0.5 * rng.random(16)
    u = rng.standard_normal(16)
    p = 0.5 + rng.random(16)
    E = gas.energy(rho, u * u, p)
    st = make_state(rho, rho * u, E=E)
    assert np.max(np.abs(pressure(st, gas) - p) / p) < 1e-14


@pytest.mark.parametrize("gamma,p,rho,expected", [
    (2.0, 1.0, 1.0, math.sqrt(2.0)),
    (1.4, 1.0, 1.0, 1.1832159566199232),
    (2.0, 4.0, 1.0, 2.0 * math.sqrt(2.0)),
])
def test_sound_speed_values(gamma, p, rho, expected):
    gas = GasModel(gamma=gamma, eps=1.0, C=p / rho ** gamma)
    st = make_state([rho] * 4, [0.0] * 4)
    assert np.allclose(sound_speed(st, gas), expected, rtol=1e-12)


def test_time_step_hand_value():
    # u = 1, c_s = sqrt(2), eps = 2, dx = 0.01, cfl 0.5:
    # dt = 0.005 / (1 + sqrt(2)/2) ~ 0.0029289
    gas = GasModel(gamma=2.0, eps=2.0)
    grid = FieldGrid.line(100)
    rho = np.ones(100)
    st = ConservedState(grid=grid, rho=rho, m=(rho,))
    cfg = RunConfig(cfl_imp=0.5)
    dt, _ = time_step(st, gas, cfg)
    assert abs(dt - 0.005 / (1.0 + math.sqrt(2.0) / 2.0)) < 1e-15


def test_time_step_classical_for_large_eps():
    # for eps >= 1 the capped rule equals the classical CFL condition
    gas = GasModel(gamma=2.0, eps=2.0)
    rho = np.ones(50)
    st = ConservedState(grid=FieldGrid.line(50), rho=rho, m=(0.7 * rho,))
    cfg = RunConfig(cfl_imp=0.4)
    dt, mon = time_step(st, gas, cfg)
    assert abs(mon - cfg.cfl_imp) < 1e-13
    assert abs(classical_courant(st, gas, dt) - mon) < 1e-13


def test_time_step_eps_independent_below_one():
    rho = np.ones(50)
    st = ConservedState(grid=FieldGrid.line(50), rho=rho, m=(rho,))
    cfg = RunConfig(cfl_imp=0.45)
    dts = [time_step(st, GasModel(gamma=2.0, eps=e), cfg)[0]
           for e in (1.0, 1e-2, 1e-6)]
    assert max(dts) - min(dts) < 1e-15


def test_time_step_homogeneous_in_dx():
    gas = GasModel(gamma=1.4, eps=0.5, mode=FULL_EULER)
    cfg = RunConfig(cfl_imp=0.45)
    dts = []
    for n in (40, 80):
        grid = FieldGrid.line(n)
        rho = np.ones(n)
        E = gas.energy(rho, np.ones(n), np.ones(n))
        st = ConservedState(grid=grid, rho=rho, m=(rho,), E=E)
        dts.append(time_step(st, gas, cfg)[0])
    assert abs(dts[0] / dts[1] - 2.0) < 1e-12


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(theta=2.5)
    with pytest.raises(ValueError):
        RunConfig(cfl_imp=1.5)
    with pytest.raises(ValueError):
        RunConfig(imex_c=0.8)
    RunConfig(imex_c=1.0 - 1.0 / math.sqrt(2.0))   # the DIRK(2,2,2) point


def test_gas_model_validation():
    with pytest.raises(ValueError):
        GasModel(gamma=1.0, eps=0.1)
    with pytest.raises(ValueError):
        GasModel(gamma=1.4, eps=0.0)
    with pytest.raises(ValueError):
        GasModel(gamma=1.4, eps=0.1, C=-1.0)
