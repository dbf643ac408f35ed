"""1D isentropic solver: semi-implicit first-order step and the staggered
second-order IMEX step.

Layout of one step (parity offset o from the grid):
  * staggered averages of (rho, m) move the state to the opposite lattice;
  * explicit convective update at cell centers (limited slopes);
  * implicit pressure from a nonlinear Helmholtz solve on the new lattice,
    rho(p) - kappa D2 p = rho*, with the nonlinearity on the diagonal;
  * momentum closed with the pressure gradient (compact at centers, wide
    central on the staggered lattice).

The second-order step computes predictor stages at the unstaggered centers
(wide central differences for the implicit terms) and realizes the final
stage conservatively on the staggered cell; explicit flux parts carry the
explicit weights, stiff parts the implicit weights.
"""

from __future__ import annotations

import numpy as np

from .core import (PERIODIC, ConservedState, GasModel, RunConfig, StepMonitor,
                   time_step)
from .elliptic import solve_cyclic_tridiag, solve_tridiag
from .errors import NewtonDivergence, NonPositiveDensity, NonPositiveIterate
from .imex import ImexTableau, tableau_for, validate_gsa, validate_order2
from .operators import (central_diff1d, d2x, parity_offset, shift1d,
                        slope1d, stag_diff1d, staggered_average_1d)


def _check_positive(arr: np.ndarray, what: str, t: float | None = None):
    if not np.all(arr > 0.0):
        where = "" if t is None else f" at t = {t:.6g}"
        raise NonPositiveDensity(f"{what} reached {arr.min():.3e}{where}")


def newton_helmholtz_deviation(rhs, gas: GasModel, apply_lin, solve_jac,
                               lin_norm: float, tol: float, max_iter: int,
                               monitor: StepMonitor | None = None):
    """Solve rho(p_ref + q) - Lin(q) = rhs for the pressure deviation q.

    Working in the deviation q = p - p_ref (p_ref from the mean of rhs)
    keeps every term at the scale of the actual variation: in the low-Mach
    regime p is constant to O(eps^2), far below the ulp of p itself, and a
    direct solve for p would drown in kappa-amplified roundoff.  apply_lin
    is the scaled elliptic term acting on q; solve_jac(diag, b) inverts
    (diag + LinMatrix).  On severely under-resolved grids rhs may dip
    negative pointwise while the equation still has a positive solution,
    so only its mean is required to be positive.

    Returns (p_ref, q).  The convergence target is the requested tolerance
    or the double-precision evaluation floor of the residual, whichever is
    larger (for kappa >> 1 the absolute residual cannot be driven below
    ~eps_mach * kappa * |L| * |q|).
    """
    mean_rhs = float(np.mean(rhs))
    if mean_rhs <= 0.0:
        raise NonPositiveDensity(f"mean rho* = {mean_rhs:.3e}")
    rho_ref = mean_rhs
    p_ref = float(gas.pressure_of_rho(rho_ref))
    rhs_dev = rhs - rho_ref
    inv_gamma = 1.0 / gas.gamma
    q = p_ref * np.expm1(gas.gamma * np.log1p(
        (np.maximum(rhs, 1e-3 * rho_ref) - rho_ref) / rho_ref))
    base_target = tol * (1.0 + float(np.max(np.abs(rhs))))
    eps_mach = np.finfo(float).eps
    for it in range(max_iter + 1):
        rho_dev = rho_ref * np.expm1(inv_gamma * np.log1p(q / p_ref))
        residual = rho_dev - apply_lin(q) - rhs_dev
        floor = 8.0 * eps_mach * (1.0 + lin_norm) * float(np.max(np.abs(q)))
        if float(np.max(np.abs(residual))) <= max(base_target, floor):
            if monitor is not None:
                monitor.newton_iters += it
            return p_ref, q
        if it == max_iter:
            break
        drho = (rho_ref + rho_dev) / (gas.gamma * (p_ref + q))
        delta = solve_jac(drho, -residual)
        step = 1.0
        q_new = q + delta
        while np.any(p_ref + q_new <= 0.0):
            step *= 0.5
            if step < 2.0 ** -60:
                raise NonPositiveIterate("Newton damping floor reached")
            q_new = q + step * delta
        q = q_new
    raise NewtonDivergence(f"pressure Newton stalled after {max_iter} iterations")


def _pressure_solve_dev(rho_star: np.ndarray, gas: GasModel, kappa: float,
                        bc: str = PERIODIC, newton_tol: float = 1e-12,
                        max_iter: int = 50, monitor: StepMonitor | None = None):
    """Deviation form of the compact pressure solve; returns (p_ref, q)."""
    n = rho_star.shape[0]

    def apply_lin(q):
        return kappa * d2x(q - q.mean(), bc)

    if bc == PERIODIC:
        def solve_jac(diag_nl, b):
            diag = diag_nl + 2.0 * kappa
            off = np.full(n, -kappa)
            return solve_cyclic_tridiag(diag, off, b)
    else:
        def solve_jac(diag_nl, b):
            diag = diag_nl + 2.0 * kappa
            diag[0] -= kappa        # ghost copy of the edge cell
            diag[-1] -= kappa
            off = np.full(n - 1, -kappa)
            return solve_tridiag(diag, off, b)

    return newton_helmholtz_deviation(rho_star, gas, apply_lin, solve_jac,
                                      4.0 * kappa, newton_tol, max_iter, monitor)


def pressure_solve(rho_star: np.ndarray, gas: GasModel, kappa: float,
                   bc: str = PERIODIC, newton_tol: float = 1e-12,
                   max_iter: int = 50, monitor: StepMonitor | None = None) -> np.ndarray:
    """Compact-stencil pressure solve: rho(p) - kappa (p_{j+1} - 2p_j + p_{j-1}) = rho*."""
    p_ref, q = _pressure_solve_dev(rho_star, gas, kappa, bc,
                                   newton_tol, max_iter, monitor)
    return p_ref + q


def momentum_star(state: ConservedState, gas: GasModel, cfg: RunConfig,
                  dt: float) -> np.ndarray:
    """Explicit convective momentum update at cell centers."""
    state.require_positive_density()
    bc = state.grid.boundary
    flux = state.m[0] ** 2 / state.rho
    nu = dt / state.grid.dx[0]
    return state.m[0] - nu * slope1d(flux, cfg.theta, bc)


def _linearized_density_solve(rho_star, rho_coef, gas: GasModel, kappa, bc):
    """Cross-validation path: (I - kappa D (p'(rho^n) D .)) rho = rho*."""
    n = rho_star.shape[0]
    dpdr = gas.C * gas.gamma * rho_coef ** (gas.gamma - 1.0)
    face = 0.5 * (dpdr + shift1d(dpdr, 1, bc))
    if bc == PERIODIC:
        diag = 1.0 + kappa * (face + shift1d(face, -1, bc))
        return solve_cyclic_tridiag(diag, -kappa * face, rho_star)
    diag = 1.0 + kappa * (face + shift1d(face, -1, bc))
    diag[0] = 1.0 + kappa * face[0]
    diag[-1] = 1.0 + kappa * face[-2]
    return solve_tridiag(diag, -kappa * face[:-1], rho_star)


def step_first_order(state: ConservedState, gas: GasModel, cfg: RunConfig,
                     dt: float | None = None,
                     monitor: StepMonitor | None = None) -> ConservedState:
    """One semi-implicit Euler step onto the opposite staggering parity."""
    if dt is None:
        dt, _ = time_step(state, gas, cfg)
    grid = state.grid
    bc = grid.boundary
    o = parity_offset(grid)
    dx = grid.dx[0]
    nu = dt / dx
    rho, m = state.rho, state.m[0]
    state.require_positive_density()

    s_rho = slope1d(rho, cfg.theta, bc)
    s_m = slope1d(m, cfg.theta, bc)
    rho_bar = staggered_average_1d(rho, s_rho, o, bc)
    m_bar = staggered_average_1d(m, s_m, o, bc)

    flux = m ** 2 / rho
    m_star = m - nu * slope1d(flux, cfg.theta, bc)
    rho_star = rho_bar - nu * stag_diff1d(m_star, o, bc)

    kappa = dt ** 2 / (gas.eps ** 2 * dx ** 2)
    if cfg.linearized_acoustics:
        rho_new = _linearized_density_solve(rho_star, rho_bar, gas, kappa, bc)
        _, q_new = gas.pressure_deviation(rho_new)
    else:
        _, q_new = _pressure_solve_dev(rho_star, gas, kappa, bc,
                                       cfg.newton_tol, cfg.newton_max_iter, monitor)
        rho_new = rho_star + kappa * d2x(q_new, bc)

    m_new = m_bar - nu * stag_diff1d(flux, o, bc) \
        - dt / (gas.eps ** 2 * dx) * central_diff1d(q_new, bc)

    out = ConservedState(grid=grid.flipped(), rho=rho_new, m=(m_new,),
                         t=state.t + dt)
    out.require_positive_density()
    return out


def step_second_order(state: ConservedState, gas: GasModel, cfg: RunConfig,
                      tableau: ImexTableau | None = None, dt: float | None = None,
                      monitor: StepMonitor | None = None) -> ConservedState:
    """One staggered semi-implicit IMEX step (predictor stages + corrector)."""
    if tableau is None:
        tableau = tableau_for(2, cfg.imex_c)
    if not validate_gsa(tableau):
        raise ValueError("tableau must be globally stiffly accurate")
    if tableau.stages > 2 and not validate_order2(tableau):
        raise ValueError("multi-stage tableau must satisfy the order-2 conditions")
    if dt is None:
        dt, _ = time_step(state, gas, cfg)
    grid = state.grid
    bc = grid.boundary
    o = parity_offset(grid)
    dx = grid.dx[0]
    nu = dt / dx
    eps2 = gas.eps ** 2
    rho, m = state.rho, state.m[0]
    state.require_positive_density()

    Ae, Ai = tableau.A_exp, tableau.A_imp
    be, bi = tableau.b_exp, tableau.b_imp
    s = tableau.stages

    # stage records (cell centers, current parity)
    flux0 = m ** 2 / rho
    _, q0 = gas.pressure_deviation(rho)
    K1 = [central_diff1d(m, bc)]
    K2 = [slope1d(flux0, cfg.theta, bc) + central_diff1d(q0, bc) / eps2]
    sg_st = [slope1d(flux0, cfg.theta, bc)]
    g_st = [flux0]
    m_st = [m]
    q_st = [q0]          # stage pressure deviations (constants drop in all differences)

    for k in range(1, s - 1):
        rho_ek = rho - nu * sum(Ae[k, l] * K1[l] for l in range(k))
        m_ek = m - nu * sum(Ae[k, l] * K2[l] for l in range(k))
        _check_positive(rho_ek, "predictor density", state.t)
        g_k = m_ek ** 2 / rho_ek
        sg_k = slope1d(g_k, cfg.theta, bc)
        d = Ai[k, k]
        m_eff = m - nu * (sum(Ai[k, l] * K2[l] for l in range(k)) + d * sg_k)
        rho_rhs = rho - nu * sum(Ai[k, l] * K1[l] for l in range(k))
        rho_tilde = rho_rhs - nu * d * central_diff1d(m_eff, bc)
        # same elliptic substitution as the first-order step, kappa scaled by
        # (a_kk dt)^2; the compact stencil stands in for the wide central
        # composition (consistent, and not blind to odd-even modes)
        kap_k = (d * dt) ** 2 / (eps2 * dx ** 2)
        _, q_k = _pressure_solve_dev(rho_tilde, gas, kap_k, bc,
                                     cfg.newton_tol, cfg.newton_max_iter, monitor)
        m_k = m_eff - d * dt / (eps2 * dx) * central_diff1d(q_k, bc)
        K1.append(central_diff1d(m_k, bc))
        K2.append(sg_k + central_diff1d(q_k, bc) / eps2)
        sg_st.append(sg_k)
        g_st.append(g_k)
        m_st.append(m_k)
        q_st.append(q_k)

    # final explicit stage (only its convective flux is needed)
    rho_eF = rho - nu * sum(Ae[s - 1, l] * K1[l] for l in range(s - 1))
    m_eF = m - nu * sum(Ae[s - 1, l] * K2[l] for l in range(s - 1))
    _check_positive(rho_eF, "predictor density", state.t)
    g_F = m_eF ** 2 / rho_eF
    g_st.append(g_F)
    sg_st.append(slope1d(g_F, cfg.theta, bc))

    # staggered corrector
    s_rho = slope1d(rho, cfg.theta, bc)
    s_m = slope1d(m, cfg.theta, bc)
    rho_bar = staggered_average_1d(rho, s_rho, o, bc)
    m_bar = staggered_average_1d(m, s_m, o, bc)

    g_combo = sum(be[l] * g_st[l] for l in range(s))
    m_known = sum(bi[l] * m_st[l] for l in range(s - 1))
    q_known = sum(bi[l] * q_st[l] for l in range(s - 1))
    d = bi[s - 1]

    m_star_final = m - nu * (sum(be[l] * sg_st[l] for l in range(s))
                             + central_diff1d(q_known, bc) / eps2)
    rho_star_final = rho_bar - nu * (stag_diff1d(m_known, o, bc)
                                     + d * stag_diff1d(m_star_final, o, bc))
    kappa = (d * dt) ** 2 / (eps2 * dx ** 2)
    _, q_F = _pressure_solve_dev(rho_star_final, gas, kappa, bc,
                                 cfg.newton_tol, cfg.newton_max_iter, monitor)
    rho_new = rho_star_final + kappa * d2x(q_F, bc)
    m_new = m_bar - nu * (stag_diff1d(g_combo, o, bc)
                          + (stag_diff1d(q_known, o, bc)
                             + d * central_diff1d(q_F, bc)) / eps2)

    out = ConservedState(grid=grid.flipped(), rho=rho_new, m=(m_new,),
                         t=state.t + dt)
    out.require_positive_density()
    return out


def step(state: ConservedState, gas: GasModel, cfg: RunConfig,
         dt: float | None = None, monitor: StepMonitor | None = None,
         tableau: ImexTableau | None = None) -> ConservedState:
    """Order-dispatching step."""
    if cfg.order == 1:
        return step_first_order(state, gas, cfg, dt, monitor)
    return step_second_order(state, gas, cfg, tableau, dt, monitor)
