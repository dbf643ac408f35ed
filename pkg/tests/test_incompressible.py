import numpy as np
import pytest

from allmach.errors import NonZeroMeanVorticity
from allmach.incompressible import (VorticityField, advance, default_dt,
                                    enstrophy, grid_points, kinetic_energy,
                                    poisson_solve_spectral, rk4_step,
                                    sample_velocity_at_centers,
                                    shear_flow_init, velocity_from_omega)


def mesh(n):
    x = grid_points(n).reshape(-1, 1)
    y = grid_points(n).reshape(1, -1)
    return x, y


def test_poisson_single_mode():
    x, y = mesh(48)
    omega = np.sin(x) + 0.0 * y
    psi = poisson_solve_spectral(omega)
    assert np.max(np.abs(psi - omega)) < 1e-13


def test_poisson_two_mode():
    x, y = mesh(48)
    omega = 2.0 * np.cos(x) * np.cos(y)
    psi = poisson_solve_spectral(omega)
    assert np.max(np.abs(psi - np.cos(x) * np.cos(y))) < 1e-13


def test_poisson_zero_and_mean_guard():
    z = np.zeros((16, 16))
    assert np.array_equal(poisson_solve_spectral(z), z)
    with pytest.raises(NonZeroMeanVorticity):
        poisson_solve_spectral(np.ones((16, 16)))


def test_velocity_is_divergence_free_spectrally():
    rng = np.random.default_rng(0)
    n = 32
    omega = rng.standard_normal((n, n))
    omega -= omega.mean()
    u, v = velocity_from_omega(omega)
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0                    # real-field first-derivative convention
    div_hat = 1j * k.reshape(-1, 1) * np.fft.fft2(u) \
        + 1j * k.reshape(1, -1) * np.fft.fft2(v)
    assert np.max(np.abs(np.fft.ifft2(div_hat))) < 1e-12


def test_taylor_green_steady():
    n = 64
    x, y = mesh(n)
    omega0 = -2.0 * np.cos(x) * np.cos(y)
    field = advance(VorticityField(omega=omega0.copy()), 1.0)
    assert np.max(np.abs(field.omega - omega0)) <= 1e-10


def test_zero_field_stays_zero():
    omega = np.zeros((32, 32))
    assert np.array_equal(rk4_step(omega, 0.01), omega)


def test_shear_flow_init_properties():
    field = shear_flow_init(n=160)
    assert abs(field.omega.mean()) < 1e-14
    u, v = velocity_from_omega(field.omega)
    umax = np.max(np.abs(u))
    assert 0.5 < umax < 2.0            # O(1) velocities from the layers
    # delta = 0 removes the x-dependence entirely
    flat = shear_flow_init(delta=0.0, n=64)
    assert np.max(np.abs(flat.omega - flat.omega.mean(axis=0))) < 1e-13


def test_inviscid_invariants_over_t6():
    field = shear_flow_init(n=160)
    E0 = kinetic_energy(field.omega)
    Z0 = enstrophy(field.omega)
    out = advance(field, 6.0)
    assert abs(kinetic_energy(out.omega) - E0) / E0 <= 1e-6
    assert abs(enstrophy(out.omega) - Z0) / Z0 <= 1e-5


def test_sampling_matches_analytic_mode():
    n = 96
    x, y = mesh(n)
    omega = np.sin(2 * x) * np.cos(3 * y) + 0.0 * y
    for parity in (0, 1):
        nc = 24
        uc, vc = sample_velocity_at_centers(omega, nc, parity)
        X = ((np.arange(nc) + 0.5 + 0.5 * parity) * 2 * np.pi / nc).reshape(-1, 1)
        Y = ((np.arange(nc) + 0.5 + 0.5 * parity) * 2 * np.pi / nc).reshape(1, -1)
        u_ex = -3.0 / 13.0 * np.sin(2 * X) * np.sin(3 * Y) + 0.0 * Y
        v_ex = -2.0 / 13.0 * np.cos(2 * X) * np.cos(3 * Y) + 0.0 * Y
        assert np.max(np.abs(uc - u_ex)) < 1e-13
        assert np.max(np.abs(vc - v_ex)) < 1e-13


def test_default_dt_scale():
    field = shear_flow_init(n=64)
    dt = default_dt(field.omega)
    u, v = velocity_from_omega(field.omega)
    umax = np.max(np.sqrt(u ** 2 + v ** 2))
    assert abs(dt - 0.2 * (2 * np.pi / 64) / umax) < 1e-15
