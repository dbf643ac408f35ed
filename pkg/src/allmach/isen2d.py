"""2D isentropic solver on the staggered lattice pair.

Same step skeleton as the 1D solver: staggered averages, explicit starred
momenta (at centers for the density predictor, four-corner divergence for
the staggered momenta), one nonlinear Helmholtz solve for the pressure on
the new lattice, then the momentum closure with the wide central gradient.
The elliptic solve runs Newton over a CG inner solve preconditioned by the
exact periodic constant-coefficient inverse.
"""

from __future__ import annotations

import numpy as np

from .core import (ConservedState, GasModel, RunConfig, StepMonitor, time_step)
from .elliptic import fft_symbol_preconditioner, solve_cg
from .errors import NewtonDivergence, NonPositiveDensity, NonPositiveIterate
from .imex import ImexTableau, tableau_for, validate_gsa, validate_order2
from .operators import (central_diff2d, corner_div, corner_grad,
                        corner_laplacian, corner_laplacian_symbol,
                        kernel_project, laplacian_2d, laplacian_symbol,
                        parity_offset, slope2d, staggered_average_2d)


def _limdiv(f1: np.ndarray, f2: np.ndarray, theta: float, dx: float, dy: float):
    """Slope-limited divergence of a flux pair at cell centers (divided)."""
    return slope2d(f1, theta, 0) / dx + slope2d(f2, theta, 1) / dy


def _elliptic_solve_2d_dev(rho_star: np.ndarray, gas: GasModel, kappa: float,
                           dx: float, dy: float, cfg: RunConfig,
                           offset: int = 0, stencil: str = "corner",
                           monitor: StepMonitor | None = None):
    """Deviation form of the 2D pressure solve; returns (p_ref, q).

    Newton on the diagonal nonlinearity; the SPD Jacobian diag - kappa L is
    inverted by CG preconditioned with the exact constant-coefficient
    periodic inverse.  Working in q = p - p_ref keeps the kappa-amplified
    terms at the scale of the actual pressure variation (O(eps^2) in the
    low-Mach regime, far below the ulp of p itself).

    stencil "corner" is the exact divergence-gradient composition of the
    staggered step (used on the new lattice, where it closes the discrete
    incompressibility chain); "compact" is the five-point Laplacian (used
    for the cell-centered predictor stages, where it suppresses the odd-even
    modes the same-parity composition cannot see).
    """
    mean_rhs = float(np.mean(rho_star))
    if mean_rhs <= 0.0:
        raise NonPositiveDensity(f"mean rho* = {mean_rhs:.3e}")
    rho_ref = mean_rhs
    p_ref = float(gas.pressure_of_rho(rho_ref))
    rhs_dev = rho_star - rho_ref
    inv_gamma = 1.0 / gas.gamma
    q = p_ref * np.expm1(gas.gamma * np.log1p(
        (np.maximum(rho_star, 1e-3 * rho_ref) - rho_ref) / rho_ref))
    base_target = cfg.newton_tol * (1.0 + float(np.max(np.abs(rho_star))))
    lin_norm = kappa * (4.0 / dx ** 2 + 4.0 / dy ** 2)
    eps_mach = np.finfo(float).eps
    if stencil == "corner":
        def apply_lap(v):
            return corner_laplacian(kernel_project(v, True), dx, dy, offset)
        symbol_fn = corner_laplacian_symbol
    else:
        def apply_lap(v):
            return laplacian_2d(kernel_project(v), dx, dy)
        symbol_fn = laplacian_symbol

    for it in range(cfg.newton_max_iter + 1):
        rho_dev = rho_ref * np.expm1(inv_gamma * np.log1p(q / p_ref))
        residual = rho_dev - kappa * apply_lap(q) - rhs_dev
        q_active = kernel_project(q, stencil == "corner")
        floor = 8.0 * eps_mach * (1.0 + lin_norm) * float(np.max(np.abs(q_active)))
        if float(np.max(np.abs(residual))) <= max(base_target, floor):
            if monitor is not None:
                monitor.newton_iters += it
            return p_ref, q
        if it == cfg.newton_max_iter:
            break
        drho = (rho_ref + rho_dev) / (gas.gamma * (p_ref + q))

        def apply_jac(v, drho=drho):
            return drho * v - kappa * apply_lap(v)

        precond = fft_symbol_preconditioner(
            q.shape, float(np.mean(drho)) + kappa * symbol_fn(q.shape, dx, dy))
        delta, iters = solve_cg(apply_jac, -residual, precond,
                                tol=cfg.cg_tol, max_iter=cfg.cg_max_iter)
        if monitor is not None:
            monitor.cg_iters += iters
        step = 1.0
        q_new = q + delta
        while np.any(p_ref + q_new <= 0.0):
            step *= 0.5
            if step < 2.0 ** -60:
                raise NonPositiveIterate("Newton damping floor reached")
            q_new = q + step * delta
        q = q_new
    raise NewtonDivergence(f"pressure Newton stalled after {cfg.newton_max_iter} iterations")


def elliptic_solve_2d(rho_star: np.ndarray, gas: GasModel, kappa: float,
                      dx: float, dy: float, cfg: RunConfig, offset: int = 0,
                      monitor: StepMonitor | None = None) -> np.ndarray:
    """Solve rho(p) - kappa L p = rho* (periodic) for p > 0, with L the
    staggered divergence-gradient composition."""
    p_ref, q = _elliptic_solve_2d_dev(rho_star, gas, kappa, dx, dy, cfg,
                                      offset, "corner", monitor)
    return p_ref + q


def momentum_star_2d(state: ConservedState, gas: GasModel, cfg: RunConfig,
                     dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Staggered starred momenta: averages minus dt * corner divergence of
    the convective tensor (one row per momentum component)."""
    state.require_positive_density()
    grid = state.grid
    o = parity_offset(grid)
    dx, dy = grid.dx
    rho, (m1, m2) = state.rho, state.m
    out = []
    for mk in (m1, m2):
        sx = slope2d(mk, cfg.theta, 0)
        sy = slope2d(mk, cfg.theta, 1)
        bar = staggered_average_2d(mk, sx, sy, o)
        out.append(bar - dt * corner_div(mk * m1 / rho, mk * m2 / rho, dx, dy, o))
    return tuple(out)


def rho_star_2d(state: ConservedState, m_star: tuple[np.ndarray, np.ndarray],
                dt: float, cfg: RunConfig) -> np.ndarray:
    """Staggered explicit density: average minus dt * corner divergence of
    the (cell-centered) starred momenta."""
    grid = state.grid
    o = parity_offset(grid)
    dx, dy = grid.dx
    sx = slope2d(state.rho, cfg.theta, 0)
    sy = slope2d(state.rho, cfg.theta, 1)
    rho_bar = staggered_average_2d(state.rho, sx, sy, o)
    return rho_bar - dt * corner_div(m_star[0], m_star[1], dx, dy, o)


def step_first_order_2d(state: ConservedState, gas: GasModel, cfg: RunConfig,
                        dt: float | None = None,
                        monitor: StepMonitor | None = None) -> ConservedState:
    if dt is None:
        dt, _ = time_step(state, gas, cfg)
    grid = state.grid
    o = parity_offset(grid)
    dx, dy = grid.dx
    rho, (m1, m2) = state.rho, state.m
    state.require_positive_density()

    flux = {(k, l): mk * ml / rho
            for k, mk in enumerate((m1, m2)) for l, ml in enumerate((m1, m2))}
    m_star_c = tuple(
        mk - dt * _limdiv(flux[(k, 0)], flux[(k, 1)], cfg.theta, dx, dy)
        for k, mk in enumerate((m1, m2)))
    m_star_s = momentum_star_2d(state, gas, cfg, dt)
    rho_star = rho_star_2d(state, m_star_c, dt, cfg)

    kappa = dt ** 2 / gas.eps ** 2
    _, q = _elliptic_solve_2d_dev(rho_star, gas, kappa, dx, dy, cfg, o, "corner",
                                  monitor)
    rho_new = rho_star + kappa * corner_laplacian(kernel_project(q, True), dx, dy, o)
    m_new = tuple(
        m_star_s[k] - dt / gas.eps ** 2 * central_diff2d(q, k) / (dx, dy)[k]
        for k in range(2))

    if monitor is not None:
        bo = -1 - o
        m_hat = [m_star_c[k] - dt / gas.eps ** 2
                 * corner_grad(q, k, (dx, dy)[k], bo) for k in range(2)]
        div = corner_div(m_hat[0], m_hat[1], dx, dy, o)
        monitor.div_inf = float(np.max(np.abs(div))) / float(np.mean(rho_new))

    out = ConservedState(grid=grid.flipped(), rho=rho_new, m=m_new, t=state.t + dt)
    out.require_positive_density()
    return out


def step_second_order_2d(state: ConservedState, gas: GasModel, cfg: RunConfig,
                         tableau: ImexTableau | None = None,
                         dt: float | None = None,
                         monitor: StepMonitor | None = None) -> ConservedState:
    """Staggered semi-implicit IMEX step in 2D (predictor stages + corrector)."""
    if tableau is None:
        tableau = tableau_for(2, cfg.imex_c)
    if not validate_gsa(tableau):
        raise ValueError("tableau must be globally stiffly accurate")
    if tableau.stages > 2 and not validate_order2(tableau):
        raise ValueError("multi-stage tableau must satisfy the order-2 conditions")
    if dt is None:
        dt, _ = time_step(state, gas, cfg)
    grid = state.grid
    o = parity_offset(grid)
    dx, dy = grid.dx
    eps2 = gas.eps ** 2
    rho, (m1, m2) = state.rho, state.m
    state.require_positive_density()

    Ae, Ai = tableau.A_exp, tableau.A_imp
    be, bi = tableau.b_exp, tableau.b_imp
    s = tableau.stages

    def tensor(r, mm1, mm2):
        return {(k, l): mk * ml / r
                for k, mk in enumerate((mm1, mm2)) for l, ml in enumerate((mm1, mm2))}

    def div_c(v1, v2):
        return central_diff2d(v1, 0) / dx + central_diff2d(v2, 1) / dy

    g0 = tensor(rho, m1, m2)
    _, q0 = gas.pressure_deviation(rho)
    K1 = [div_c(m1, m2)]
    ld0 = [_limdiv(g0[(k, 0)], g0[(k, 1)], cfg.theta, dx, dy) for k in range(2)]
    K2 = [[ld0[k] + central_diff2d(q0, k) / (dx, dy)[k] / eps2 for k in range(2)]]
    ld_st = [ld0]
    g_st = [g0]
    m_st = [(m1, m2)]
    q_st = [q0]          # stage pressure deviations

    for k in range(1, s - 1):
        rho_e = rho - dt * sum(Ae[k, l] * K1[l] for l in range(k))
        m_e = [state.m[c] - dt * sum(Ae[k, l] * K2[l][c] for l in range(k))
               for c in range(2)]
        if not np.all(rho_e > 0.0):
            raise NonPositiveDensity("predictor density lost positivity")
        g_k = tensor(rho_e, m_e[0], m_e[1])
        ld_k = [_limdiv(g_k[(c, 0)], g_k[(c, 1)], cfg.theta, dx, dy) for c in range(2)]
        d = Ai[k, k]
        m_eff = [state.m[c] - dt * (sum(Ai[k, l] * K2[l][c] for l in range(k))
                                    + d * ld_k[c]) for c in range(2)]
        rho_rhs = rho - dt * sum(Ai[k, l] * K1[l] for l in range(k))
        rho_tilde = rho_rhs - dt * d * div_c(m_eff[0], m_eff[1])
        # compact substitution, kappa scaled by the stage diagonal
        _, q_k = _elliptic_solve_2d_dev(rho_tilde, gas, (d * dt) ** 2 / eps2,
                                        dx, dy, cfg, 0, "compact", monitor)
        m_k = [m_eff[c] - d * dt / eps2 * central_diff2d(q_k, c) / (dx, dy)[c]
               for c in range(2)]
        K1.append(div_c(m_k[0], m_k[1]))
        K2.append([ld_k[c] + central_diff2d(q_k, c) / (dx, dy)[c] / eps2
                   for c in range(2)])
        ld_st.append(ld_k)
        g_st.append(g_k)
        m_st.append(tuple(m_k))
        q_st.append(q_k)

    rho_eF = rho - dt * sum(Ae[s - 1, l] * K1[l] for l in range(s - 1))
    m_eF = [state.m[c] - dt * sum(Ae[s - 1, l] * K2[l][c] for l in range(s - 1))
            for c in range(2)]
    if not np.all(rho_eF > 0.0):
        raise NonPositiveDensity("predictor density lost positivity")
    g_F = tensor(rho_eF, m_eF[0], m_eF[1])
    g_st.append(g_F)
    ld_st.append([_limdiv(g_F[(c, 0)], g_F[(c, 1)], cfg.theta, dx, dy)
                  for c in range(2)])

    # staggered corrector
    def jt(f):
        return staggered_average_2d(f, slope2d(f, cfg.theta, 0),
                                    slope2d(f, cfg.theta, 1), o)

    rho_bar = jt(rho)
    m_bar = (jt(m1), jt(m2))
    g_combo = {(k, l): sum(be[c] * g_st[c][(k, l)] for c in range(s))
               for k in range(2) for l in range(2)}
    m_known = [sum(bi[l] * m_st[l][c] for l in range(s - 1)) for c in range(2)]
    q_known = sum(bi[l] * q_st[l] for l in range(s - 1))
    d = bi[s - 1]

    m_star_final = [
        state.m[c] - dt * (sum(be[l] * ld_st[l][c] for l in range(s))
                           + central_diff2d(q_known, c) / (dx, dy)[c] / eps2)
        for c in range(2)]
    rho_star_final = rho_bar - dt * (corner_div(m_known[0], m_known[1], dx, dy, o)
                                     + d * corner_div(m_star_final[0], m_star_final[1],
                                                      dx, dy, o))
    kappa = (d * dt) ** 2 / eps2
    _, q_F = _elliptic_solve_2d_dev(rho_star_final, gas, kappa, dx, dy, cfg,
                                    o, "corner", monitor)
    rho_new = rho_star_final \
        + kappa * corner_laplacian(kernel_project(q_F, True), dx, dy, o)
    m_new = tuple(
        m_bar[c] - dt * (corner_div(g_combo[(c, 0)], g_combo[(c, 1)], dx, dy, o)
                         + (corner_grad(q_known, c, (dx, dy)[c], o)
                            + d * central_diff2d(q_F, c) / (dx, dy)[c]) / eps2)
        for c in range(2))

    if monitor is not None:
        bo = -1 - o
        m_hat = [m_star_final[c] - d * dt / eps2
                 * corner_grad(q_F, c, (dx, dy)[c], bo) for c in range(2)]
        div = corner_div(m_known[0] + d * m_hat[0], m_known[1] + d * m_hat[1],
                         dx, dy, o)
        monitor.div_inf = float(np.max(np.abs(div))) / float(np.mean(rho_new))

    out = ConservedState(grid=grid.flipped(), rho=rho_new, m=m_new, t=state.t + dt)
    out.require_positive_density()
    return out


def divergence_monitor(state: ConservedState) -> float:
    """max |D1 u + D2 v| with wide central differences on the current lattice."""
    u, v = state.velocity()
    dx, dy = state.grid.dx
    div = central_diff2d(u, 0) / dx + central_diff2d(v, 1) / dy
    return float(np.max(np.abs(div)))


def step_2d(state: ConservedState, gas: GasModel, cfg: RunConfig,
            dt: float | None = None, monitor: StepMonitor | None = None,
            tableau: ImexTableau | None = None) -> ConservedState:
    if cfg.order == 1:
        return step_first_order_2d(state, gas, cfg, dt, monitor)
    return step_second_order_2d(state, gas, cfg, tableau, dt, monitor)
