"""Grids, conserved-state containers, gas model and run configuration.

Staggering convention used everywhere: a grid carries a parity flag.
Parity 0 places cell centers at x_min + (j + 1/2) dx ("integer" cells),
parity 1 at x_min + (j + 1) dx (shifted right by dx/2).  A time step flips
the parity; two consecutive steps return to the original lattice.  In 2D
both axes flip together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NonPositiveDensity, NonPositivePressure, ZeroWaveSpeed

PERIODIC = "periodic"
ZERO_GRADIENT = "zero_gradient"

ISENTROPIC = "isentropic"
FULL_EULER = "full_euler"


@dataclass(frozen=True)
class FieldGrid:
    """Uniform 1D/2D grid with staggering parity.

    n, x_min, x_max are per-axis tuples; dx is derived as extent/n exactly.
    """

    n: tuple[int, ...]
    x_min: tuple[float, ...]
    x_max: tuple[float, ...]
    parity: int = 0
    boundary: str = PERIODIC

    def __post_init__(self):
        if len(self.n) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        if any(nk <= 0 for nk in self.n):
            raise ValueError("cell counts must be positive")
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if self.boundary not in (PERIODIC, ZERO_GRADIENT):
            raise ValueError(f"unknown boundary treatment {self.boundary!r}")
        if self.boundary == ZERO_GRADIENT and self.dim != 1:
            raise ValueError("zero-gradient ghosts are only supported in 1D")

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def dx(self) -> tuple[float, ...]:
        return tuple((hi - lo) / nk for nk, lo, hi in zip(self.n, self.x_min, self.x_max))

    def centers(self, axis: int = 0) -> np.ndarray:
        """Physical cell-center coordinates along an axis at the current parity."""
        nk = self.n[axis]
        dxk = self.dx[axis]
        shift = 0.5 + 0.5 * self.parity
        return self.x_min[axis] + (np.arange(nk) + shift) * dxk

    def flipped(self) -> "FieldGrid":
        return replace(self, parity=1 - self.parity)

    @staticmethod
    def line(n: int, x_min: float = 0.0, x_max: float = 1.0,
             boundary: str = PERIODIC) -> "FieldGrid":
        return FieldGrid(n=(n,), x_min=(x_min,), x_max=(x_max,), boundary=boundary)

    @staticmethod
    def square(n: int, x_min: float = 0.0, x_max: float = 1.0) -> "FieldGrid":
        return FieldGrid(n=(n, n), x_min=(x_min, x_min), x_max=(x_max, x_max))


@dataclass
class ConservedState:
    """Cell-averaged conserved fields on a FieldGrid.

    m is a tuple of momentum components (one per dimension); E is present
    only for the full Euler system.
    """

    grid: FieldGrid
    rho: np.ndarray
    m: tuple[np.ndarray, ...]
    E: np.ndarray | None = None
    t: float = 0.0

    def __post_init__(self):
        shape = tuple(self.grid.n)
        if self.rho.shape != shape:
            raise ValueError(f"rho shape {self.rho.shape} != grid {shape}")
        if len(self.m) != self.grid.dim:
            raise ValueError("one momentum component per dimension required")
        for mk in self.m:
            if mk.shape != shape:
                raise ValueError("momentum shape mismatch")
        if self.E is not None and self.E.shape != shape:
            raise ValueError("energy shape mismatch")

    def require_positive_density(self):
        if not np.all(self.rho > 0.0):
            raise NonPositiveDensity(f"min rho = {self.rho.min():.3e} at t = {self.t:.6g}")

    def velocity(self) -> tuple[np.ndarray, ...]:
        self.require_positive_density()
        return tuple(mk / self.rho for mk in self.m)

    def momentum_sq(self) -> np.ndarray:
        """|m|^2 summed over components."""
        out = self.m[0] ** 2
        for mk in self.m[1:]:
            out = out + mk ** 2
        return out

    def totals(self) -> dict[str, float]:
        """Discrete conserved totals (plain sums; cell volume is uniform)."""
        out = {"rho": float(self.rho.sum())}
        for k, mk in enumerate(self.m):
            out[f"m{k + 1}"] = float(mk.sum())
        if self.E is not None:
            out["E"] = float(self.E.sum())
        return out

    def copy(self) -> "ConservedState":
        return ConservedState(
            grid=self.grid,
            rho=self.rho.copy(),
            m=tuple(mk.copy() for mk in self.m),
            E=None if self.E is None else self.E.copy(),
            t=self.t,
        )


@dataclass(frozen=True)
class GasModel:
    """Polytropic gas: gamma, global Mach parameter eps, and the closure mode.

    Isentropic mode closes with p = C rho^gamma; full Euler mode uses the
    scaled EOS p = (gamma-1) (E - eps^2 |m|^2 / (2 rho)).
    """

    gamma: float
    eps: float
    mode: str = ISENTROPIC
    C: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if not self.eps > 0.0:
            raise ValueError("eps must be positive")
        if not self.C > 0.0:
            raise ValueError("pressure-law constant must be positive")
        if self.mode not in (ISENTROPIC, FULL_EULER):
            raise ValueError(f"unknown gas mode {self.mode!r}")

    @property
    def is_full(self) -> bool:
        return self.mode == FULL_EULER

    def pressure_of_rho(self, rho: np.ndarray) -> np.ndarray:
        return self.C * rho ** self.gamma

    def rho_of_pressure(self, p: np.ndarray) -> np.ndarray:
        return (p / self.C) ** (1.0 / self.gamma)

    def pressure_deviation(self, rho: np.ndarray) -> tuple[float, np.ndarray]:
        """(p_ref, p(rho) - p_ref) with the deviation computed at full
        relative precision (the low-Mach pressure varies at O(eps^2), far
        below the ulp of its absolute value)."""
        rho_ref = float(np.mean(rho))
        p_ref = self.C * rho_ref ** self.gamma
        Drel = np.expm1(self.gamma * np.log1p((rho - rho_ref) / rho_ref))
        return p_ref, p_ref * Drel

    def energy(self, rho, u_sq, p):
        """Total energy density from (rho, |u|^2, p) via the scaled EOS."""
        return p / (self.gamma - 1.0) + 0.5 * self.eps ** 2 * rho * u_sq


def pressure(state: ConservedState, gas: GasModel) -> np.ndarray:
    """Pointwise pressure field of a state.

    Isentropic: p = C rho^gamma.  Full Euler: p = (gamma-1)(E - eps^2 |m|^2/(2 rho)).
    """
    state.require_positive_density()
    if gas.is_full:
        if state.E is None:
            raise ValueError("full Euler state requires an energy field")
        p = (gas.gamma - 1.0) * (state.E - 0.5 * gas.eps ** 2 * state.momentum_sq() / state.rho)
        if not np.all(p > 0.0):
            raise NonPositivePressure(f"min p = {p.min():.3e} at t = {state.t:.6g}")
        return p
    return gas.pressure_of_rho(state.rho)


def sound_speed(state: ConservedState, gas: GasModel) -> np.ndarray:
    """c_s = sqrt(gamma p / rho)."""
    p = pressure(state, gas)
    return np.sqrt(gas.gamma * p / state.rho)


@dataclass(frozen=True)
class RunConfig:
    """Time-step rule, reconstruction and solver tolerances for one run."""

    cfl_imp: float = 0.45
    theta: float = 1.5
    order: int = 2
    imex_c: float = 2.25
    t_final: float = 0.0
    snapshot_times: tuple[float, ...] = ()
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    cg_tol: float = 1e-11
    cg_max_iter: int = 0          # 0 = 10x unknown count
    linearized_acoustics: bool = False
    fixed_dt: float = 0.0         # > 0 overrides the CFL rule (reference recipes)

    def __post_init__(self):
        if not (0.0 < self.cfl_imp < 1.0):
            raise ValueError("cfl_imp must lie in (0, 1)")
        if not (1.0 <= self.theta <= 2.0):
            raise ValueError("theta must lie in [1, 2]")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        ars = 1.0 - 1.0 / math.sqrt(2.0)
        if not (self.imex_c > 1.0 or abs(self.imex_c - ars) < 1e-12):
            raise ValueError("imex_c must exceed 1 (or equal 1 - 1/sqrt(2))")


@dataclass
class StepMonitor:
    """Mutable per-step bookkeeping that step functions may fill in.

    div_inf is the stage-weighted staggered divergence of the predictor
    velocities entering the density update (the discrete incompressibility
    residual in the low-Mach limit).
    """

    newton_iters: int = 0
    cg_iters: int = 0
    div_inf: float = 0.0

    def reset(self):
        self.newton_iters = 0
        self.cg_iters = 0
        self.div_inf = 0.0


def time_step(state: ConservedState, gas: GasModel, cfg: RunConfig) -> tuple[float, float]:
    """Material-wave CFL time step and the classical Courant monitor.

    The implicit rule caps the acoustic speed: c~ = c_s * min(1, 1/eps), so
    for eps <= 1 the step depends only on |u| + c_s.  Returns (dt, cfl_classical)
    where the monitor is dt * max(|u| + c_s/eps) / dx (per-axis sum in 2D).
    """
    u = state.velocity()
    cs = sound_speed(state, gas)
    c_cap = cs * min(1.0, 1.0 / gas.eps)
    c_classical = cs / gas.eps
    dx = state.grid.dx
    if state.grid.dim == 1:
        wave = float(np.max(np.abs(u[0]) + c_cap))
        if wave <= 0.0:
            raise ZeroWaveSpeed("all wave speeds vanish")
        dt = cfg.cfl_imp * dx[0] / wave
        lam = float(np.max(np.abs(u[0]) + c_classical))
        return dt, dt * lam / dx[0]
    rate = sum(float(np.max(np.abs(uk) + c_cap)) / dx[k] for k, uk in enumerate(u))
    if rate <= 0.0:
        raise ZeroWaveSpeed("all wave speeds vanish")
    dt = cfg.cfl_imp / rate
    lam_rate = sum(float(np.max(np.abs(uk) + c_classical)) / dx[k] for k, uk in enumerate(u))
    return dt, dt * lam_rate


def classical_courant(state: ConservedState, gas: GasModel, dt: float) -> float:
    """Classical Courant number dt * max(|u| + c_s/eps)/dx for a given dt."""
    u = state.velocity()
    cs = sound_speed(state, gas)
    c_classical = cs / gas.eps
    return dt * sum(float(np.max(np.abs(uk) + c_classical)) / state.grid.dx[k]
                    for k, uk in enumerate(u))
