"""Reference incompressible Euler solver in vorticity-streamfunction form.

Fourier-spectral derivatives on [0, 2pi]^2 with 2/3-rule dealiasing of the
advection term and classical RK4 in time.  Supplies the ground truth for
the low-Mach comparison runs; velocities can be sampled spectrally at the
cell centers of any coarser staggered grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonZeroMeanVorticity

TWO_PI = 2.0 * np.pi


@dataclass
class VorticityField:
    """Vorticity on an n x n grid over [0, 2pi]^2 (corner-aligned points)."""

    omega: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        n = self.omega.shape[0]
        if self.omega.shape != (n, n):
            raise ValueError("vorticity grid must be square")

    @property
    def n(self) -> int:
        return self.omega.shape[0]


def _wavenumbers(n: int):
    k = np.fft.fftfreq(n, d=1.0 / n)
    return k.reshape(-1, 1), k.reshape(1, -1)


def _diff_wavenumbers(n: int):
    """Wavenumbers for first derivatives: the Nyquist mode is zeroed so
    that derivatives of real fields stay real (and the discrete curl is
    exactly divergence free)."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return k.reshape(-1, 1), k.reshape(1, -1)


def _dealias_mask(n: int) -> np.ndarray:
    kx, ky = _wavenumbers(n)
    cut = n / 3.0
    return (np.abs(kx) <= cut) & (np.abs(ky) <= cut)


def poisson_solve_spectral(omega: np.ndarray) -> np.ndarray:
    """Streamfunction psi with -Lap psi = omega and zero mean."""
    mean = float(np.mean(omega))
    if abs(mean) > 1e-12 * (1.0 + float(np.max(np.abs(omega)))):
        raise NonZeroMeanVorticity(f"mean vorticity = {mean:.3e}")
    n = omega.shape[0]
    kx, ky = _wavenumbers(n)
    k2 = kx ** 2 + ky ** 2
    k2[0, 0] = 1.0
    psi_hat = np.fft.fft2(omega) / k2
    psi_hat[0, 0] = 0.0
    return np.real(np.fft.ifft2(psi_hat))


def velocity_from_omega(omega: np.ndarray):
    """(u, v) = (psi_y, -psi_x) by spectral differentiation."""
    n = omega.shape[0]
    kx, ky = _wavenumbers(n)
    k2 = kx ** 2 + ky ** 2
    k2[0, 0] = 1.0
    psi_hat = np.fft.fft2(omega) / k2
    psi_hat[0, 0] = 0.0
    dx_k, dy_k = _diff_wavenumbers(n)
    u = np.real(np.fft.ifft2(1j * dy_k * psi_hat))
    v = np.real(np.fft.ifft2(-1j * dx_k * psi_hat))
    return u, v


def _advection_rhs(omega: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """-u . grad(omega) with 2/3-rule dealiasing."""
    n = omega.shape[0]
    kx, ky = _wavenumbers(n)
    k2 = kx ** 2 + ky ** 2
    k2[0, 0] = 1.0
    w_hat = np.fft.fft2(omega) * mask
    psi_hat = w_hat / k2
    psi_hat[0, 0] = 0.0
    dx_k, dy_k = _diff_wavenumbers(n)
    u = np.real(np.fft.ifft2(1j * dy_k * psi_hat))
    v = np.real(np.fft.ifft2(-1j * dx_k * psi_hat))
    wx = np.real(np.fft.ifft2(1j * dx_k * w_hat))
    wy = np.real(np.fft.ifft2(1j * dy_k * w_hat))
    rhs_hat = np.fft.fft2(-(u * wx + v * wy)) * mask
    return np.real(np.fft.ifft2(rhs_hat))


def rk4_step(omega: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step of omega_t = -u . grad(omega)."""
    mask = _dealias_mask(omega.shape[0])
    k1 = _advection_rhs(omega, mask)
    k2 = _advection_rhs(omega + 0.5 * dt * k1, mask)
    k3 = _advection_rhs(omega + 0.5 * dt * k2, mask)
    k4 = _advection_rhs(omega + dt * k3, mask)
    return omega + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def grid_points(n: int) -> np.ndarray:
    return TWO_PI * np.arange(n) / n


def shear_flow_init(delta: float = 0.05, rho_hat: float = np.pi / 15.0,
                    n: int = 160) -> VorticityField:
    """Double shear layer vorticity; the discrete mean is subtracted so the
    Poisson solve is well posed (it perturbs the data at the 1e-3 level)."""
    x = grid_points(n).reshape(-1, 1)
    y = grid_points(n).reshape(1, -1)
    lower = delta * np.cos(x) - np.cosh((y - np.pi / 2.0) / rho_hat) ** -2 / rho_hat
    upper = delta * np.cos(x) + np.cosh((3.0 * np.pi / 2.0 - y) / rho_hat) ** -2 / rho_hat
    omega = np.where(y <= np.pi, lower, upper) + 0.0 * x
    omega -= float(np.mean(omega))
    return VorticityField(omega=omega)


def default_dt(omega: np.ndarray) -> float:
    u, v = velocity_from_omega(omega)
    umax = float(np.max(np.sqrt(u ** 2 + v ** 2)))
    n = omega.shape[0]
    return 0.2 * (TWO_PI / n) / max(umax, 1e-12)


def advance(field: VorticityField, t_end: float, dt: float | None = None) -> VorticityField:
    """March the vorticity to t_end with RK4 (fixed dt, last step shortened)."""
    omega = field.omega.copy()
    t = field.t
    if dt is None:
        dt = default_dt(omega)
    while t < t_end - 1e-13:
        step = min(dt, t_end - t)
        omega = rk4_step(omega, step)
        t += step
    return VorticityField(omega=omega, t=t)


def kinetic_energy(omega: np.ndarray) -> float:
    u, v = velocity_from_omega(omega)
    return 0.5 * float(np.mean(u ** 2 + v ** 2))


def enstrophy(omega: np.ndarray) -> float:
    return float(np.mean(omega ** 2))


def sample_velocity_at_centers(omega: np.ndarray, n_coarse: int,
                               parity: int = 0):
    """Velocities trigonometrically interpolated at the cell centers of an
    n_coarse staggered grid over [0, 2pi]^2.

    The reference grid is corner-aligned (points at j*h); the finite-volume
    centers sit at (j + 1/2 + parity/2) * H.  Spectral truncation to the
    coarse band plus a phase shift evaluates the interpolant exactly.
    """
    n = omega.shape[0]
    if n_coarse > n:
        raise ValueError("can only sample at coarser or equal resolution")
    u, v = velocity_from_omega(omega)
    shift = (0.5 + 0.5 * parity) * TWO_PI / n_coarse
    return (_spectral_resample(u, n_coarse, shift),
            _spectral_resample(v, n_coarse, shift))


def write_omega_csv(field: VorticityField, path) -> None:
    """Snapshot CSV (columns x,y,omega) consumable by the figure tooling."""
    from pathlib import Path
    path = Path(path)
    n = field.n
    pts = grid_points(n)
    lines = ["x,y,omega"]
    for i in range(n):
        for j in range(n):
            lines.append(f"{pts[i]:.17g},{pts[j]:.17g},{field.omega[i, j]:.17g}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def _spectral_resample(f: np.ndarray, n_c: int, shift: float) -> np.ndarray:
    """Truncate to the n_c band and evaluate at the shifted coarse points."""
    n = f.shape[0]
    f_hat = np.fft.fft2(f) / n ** 2
    keep = np.fft.fftfreq(n_c, d=1.0 / n_c).astype(int)
    idx = np.ix_(keep, keep)
    sub = f_hat[idx].copy()
    k = keep.reshape(-1, 1)
    phase = np.exp(1j * k * shift)
    sub *= phase                      # x shift
    sub *= phase.reshape(1, -1)       # y shift
    if n_c % 2 == 0:
        # split Nyquist weight symmetrically for a real interpolant
        sub[n_c // 2, :] = np.real(sub[n_c // 2, :])
        sub[:, n_c // 2] = np.real(sub[:, n_c // 2])
    return np.real(np.fft.ifft2(sub)) * n_c ** 2
