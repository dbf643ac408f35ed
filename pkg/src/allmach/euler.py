"""Full Euler solver (energy formulation) in 1D and 2D.

The system is advanced in the reformulated variables where the stiff terms
are the density flux m, the momentum forcing (gamma-1)/eps^2 grad E, and
the energy transport gamma div((E*/rho*) m); the convective tensor minus
the (gamma-1)/2 kinetic gradient and the eps^2-scaled kinetic transport are
explicit.  One linear variable-coefficient Helmholtz solve per implicit
stage delivers the new energy; no Newton iteration is needed.

Like the isentropic solvers, the energy solves work on the deviation
e = E - mean(E): at low Mach the energy is constant to O(eps^2), far below
the ulp of E, and all downstream differencing uses the deviation array.
The elliptic operator on the staggered lattice is the exact composition of
the corner divergence with the coefficient-weighted corner gradient, so the
discrete low-Mach limit chain closes to solver precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (PERIODIC, ConservedState, GasModel, RunConfig, StepMonitor,
                   pressure, time_step)
from .elliptic import (fft_symbol_preconditioner, solve_cg,
                       solve_cyclic_tridiag, solve_tridiag)
from .errors import NonPositiveCoefficient, NonPositiveDensity
from .imex import ImexTableau, tableau_for, validate_gsa, validate_order2
from .operators import (central_diff1d, central_diff2d, corner_diff,
                        corner_div, corner_grad, corner_laplacian_symbol,
                        kernel_project, laplacian_faces_1d, laplacian_faces_2d,
                        parity_offset, shift1d, slope1d, slope2d,
                        stag_diff1d, staggered_average_1d,
                        staggered_average_2d)


@dataclass
class EnergyEllipticSystem:
    """(I - kappa L_a) E = rhs with coefficient field a > 0 (same lattice).

    kappa carries the dt^2 gamma (gamma-1) / eps^2 scaling; L_a is the
    flux-form variable-coefficient Laplacian with arithmetic face means.
    """

    a: np.ndarray
    kappa: float
    rhs: np.ndarray
    dx: float
    dy: float = 1.0
    bc: str = PERIODIC

    def __post_init__(self):
        if not np.all(self.a > 0.0):
            raise NonPositiveCoefficient(f"min E/rho coefficient = {np.min(self.a):.3e}")


def energy_elliptic_solve(sys: EnergyEllipticSystem, cg_tol: float = 1e-11,
                          max_iter: int = 0,
                          monitor: StepMonitor | None = None) -> np.ndarray:
    """Solve the energy Helmholtz system by preconditioned CG (deviation form)."""
    from .operators import face_coefficients
    rhs = sys.rhs
    mean = float(np.mean(rhs))
    rhs_dev = rhs - mean
    if rhs.ndim == 1:
        af = face_coefficients(sys.a, 0, sys.bc)

        def apply_op(v):
            return v - sys.kappa * laplacian_faces_1d(v, af, sys.dx, sys.bc)

        precond = None
    else:
        afx = face_coefficients(sys.a, 0, sys.bc)
        afy = face_coefficients(sys.a, 1, sys.bc)

        def apply_op(v):
            return v - sys.kappa * laplacian_faces_2d(v, afx, afy, sys.dx,
                                                      sys.dy, sys.bc)

        from .operators import laplacian_symbol
        symbol = 1.0 + sys.kappa * float(np.mean(sys.a)) \
            * laplacian_symbol(rhs.shape, sys.dx, sys.dy)
        precond = fft_symbol_preconditioner(rhs.shape, symbol)
    e, iters = solve_cg(apply_op, rhs_dev, precond, tol=cg_tol, max_iter=max_iter)
    if monitor is not None:
        monitor.cg_iters += iters
    return mean + e


# ---------------------------------------------------------------------------
# 1D scheme
# ---------------------------------------------------------------------------

def _fluxes_1d(rho, m, E, gas: GasModel):
    """Explicit 1D flux fields: momentum g = (3-gamma)/2 m^2/rho and the
    eps^2-scaled kinetic transport h = (gamma-1)/2 eps^2 m^3/rho^2 (the
    energy flux carries -h)."""
    g = 0.5 * (3.0 - gas.gamma) * m ** 2 / rho
    h = 0.5 * (gas.gamma - 1.0) * gas.eps ** 2 * m ** 3 / rho ** 2
    return g, h


def _energy_solve_1d(rhs_dev, a_face, kappa, dx, bc, monitor=None):
    """Direct tridiagonal solve of (I - kappa (a e_x)_x) e = rhs_dev.

    a_face[j] is the coefficient on the face between cells j and j+1 of the
    solve lattice; for zero-gradient ghosts the boundary faces carry no flux.
    """
    n = rhs_dev.shape[0]
    k = kappa / dx ** 2
    if bc == PERIODIC:
        diag = 1.0 + k * (a_face + shift1d(a_face, -1, bc))
        return solve_cyclic_tridiag(diag, -k * a_face, rhs_dev)
    diag = 1.0 + k * (a_face + shift1d(a_face, -1, bc))
    diag[0] = 1.0 + k * a_face[0]
    diag[-1] = 1.0 + k * a_face[-2]
    return solve_tridiag(diag, -k * a_face[:-1], rhs_dev)


def m_star_full(state: ConservedState, gas: GasModel, cfg: RunConfig,
                dt: float) -> tuple[np.ndarray, ...]:
    """Staggered explicit momenta including the kinetic-gradient correction."""
    state.require_positive_density()
    grid = state.grid
    o = parity_offset(grid)
    bc = grid.boundary
    if grid.dim == 1:
        g, _ = _fluxes_1d(state.rho, state.m[0], state.E, gas)
        s_m = slope1d(state.m[0], cfg.theta, bc)
        m_bar = staggered_average_1d(state.m[0], s_m, o, bc)
        return (m_bar - dt / grid.dx[0] * stag_diff1d(g, o, bc),)
    dx, dy = grid.dx
    tensor = _tensor_full(state.rho, state.m, gas)
    out = []
    for k in range(2):
        sx = slope2d(state.m[k], cfg.theta, 0)
        sy = slope2d(state.m[k], cfg.theta, 1)
        bar = staggered_average_2d(state.m[k], sx, sy, o)
        out.append(bar - dt * corner_div(tensor[(k, 0)], tensor[(k, 1)],
                                         dx, dy, o))
    return tuple(out)


def e_star(state: ConservedState, gas: GasModel, cfg: RunConfig,
           dt: float) -> np.ndarray:
    """Staggered explicit energy: average plus the eps^2 kinetic transport."""
    grid = state.grid
    o = parity_offset(grid)
    bc = grid.boundary
    if grid.dim == 1:
        _, h = _fluxes_1d(state.rho, state.m[0], state.E, gas)
        s_E = slope1d(state.E, cfg.theta, bc)
        E_bar = staggered_average_1d(state.E, s_E, o, bc)
        return E_bar + dt / grid.dx[0] * stag_diff1d(h, o, bc)
    dx, dy = grid.dx
    h1, h2 = _kinetic_flux_2d(state.rho, state.m, gas)
    sx = slope2d(state.E, cfg.theta, 0)
    sy = slope2d(state.E, cfg.theta, 1)
    E_bar = staggered_average_2d(state.E, sx, sy, o)
    return E_bar + dt * corner_div(h1, h2, dx, dy, o)


def e_star_star(state: ConservedState, m_star_c, E_star_s, gas: GasModel,
                dt: float) -> np.ndarray:
    """Subtract the transport of the old E/rho by the starred center momenta."""
    grid = state.grid
    o = parity_offset(grid)
    bc = grid.boundary
    a = state.E / state.rho
    if grid.dim == 1:
        return E_star_s - dt * gas.gamma / grid.dx[0] \
            * stag_diff1d(a * m_star_c[0], o, bc)
    dx, dy = grid.dx
    return E_star_s - dt * gas.gamma * corner_div(a * m_star_c[0],
                                                  a * m_star_c[1], dx, dy, o)


def step_first_order_full(state: ConservedState, gas: GasModel, cfg: RunConfig,
                          dt: float | None = None,
                          monitor: StepMonitor | None = None) -> ConservedState:
    if state.grid.dim == 1:
        return _step_full_1d(state, gas, cfg, tableau_for(1), dt, monitor)
    return _step_full_2d(state, gas, cfg, tableau_for(1), dt, monitor)


def step_second_order_full(state: ConservedState, gas: GasModel, cfg: RunConfig,
                           tableau: ImexTableau | None = None,
                           dt: float | None = None,
                           monitor: StepMonitor | None = None) -> ConservedState:
    if tableau is None:
        tableau = tableau_for(2, cfg.imex_c)
    if state.grid.dim == 1:
        return _step_full_1d(state, gas, cfg, tableau, dt, monitor)
    return _step_full_2d(state, gas, cfg, tableau, dt, monitor)


def step_full(state: ConservedState, gas: GasModel, cfg: RunConfig,
              dt: float | None = None, monitor: StepMonitor | None = None,
              tableau: ImexTableau | None = None) -> ConservedState:
    if cfg.order == 1:
        return step_first_order_full(state, gas, cfg, dt, monitor)
    return step_second_order_full(state, gas, cfg, tableau, dt, monitor)


def _validate(tableau: ImexTableau):
    if not validate_gsa(tableau):
        raise ValueError("tableau must be globally stiffly accurate")
    if tableau.stages > 2 and not validate_order2(tableau):
        raise ValueError("multi-stage tableau must satisfy the order-2 conditions")


def _step_full_1d(state: ConservedState, gas: GasModel, cfg: RunConfig,
                  tableau: ImexTableau, dt: float | None,
                  monitor: StepMonitor | None) -> ConservedState:
    _validate(tableau)
    if dt is None:
        dt, _ = time_step(state, gas, cfg)
    grid = state.grid
    bc = grid.boundary
    o = parity_offset(grid)
    dx = grid.dx[0]
    nu = dt / dx
    gamma = gas.gamma
    eps2 = gas.eps ** 2
    rho, m, E = state.rho, state.m[0], state.E
    state.require_positive_density()

    Ae, Ai = tableau.A_exp, tableau.A_imp
    be, bi = tableau.b_exp, tableau.b_imp
    s = tableau.stages
    theta = cfg.theta

    g0, h0 = _fluxes_1d(rho, m, E, gas)
    a0 = E / rho
    e0 = E - float(np.mean(E))
    K1 = [central_diff1d(m, bc)]
    K2 = [slope1d(g0, theta, bc) + (gamma - 1.0) / eps2 * central_diff1d(e0, bc)]
    K3 = [-slope1d(h0, theta, bc) + gamma * central_diff1d(a0 * m, bc)]
    g_st, h_st = [g0], [h0]
    sg_st, sh_st = [slope1d(g0, theta, bc)], [slope1d(h0, theta, bc)]
    m_st, e_st = [m], [e0]
    psi_st = [gamma * a0 * m]
    a_st = [a0]

    for k in range(1, s - 1):
        rho_e = rho - nu * sum(Ae[k, l] * K1[l] for l in range(k))
        m_e = m - nu * sum(Ae[k, l] * K2[l] for l in range(k))
        E_e = E - nu * sum(Ae[k, l] * K3[l] for l in range(k))
        if not (np.all(rho_e > 0.0) and np.all(E_e > 0.0)):
            raise NonPositiveDensity("predictor state lost positivity")
        g_k, h_k = _fluxes_1d(rho_e, m_e, E_e, gas)
        a_k = E_e / rho_e
        sg_k = slope1d(g_k, theta, bc)
        sh_k = slope1d(h_k, theta, bc)
        d = Ai[k, k]
        m_eff = m - nu * (sum(Ai[k, l] * K2[l] for l in range(k)) + d * sg_k)
        E_eff = E - nu * (sum(Ai[k, l] * K3[l] for l in range(k)) - d * sh_k)
        rhs = E_eff - d * nu * gamma * central_diff1d(a_k * m_eff, bc)
        rhs_dev = rhs - float(np.mean(rhs))
        # compact substitution of the wide central composition (see isen1d)
        af = 0.5 * (a_k + shift1d(a_k, 1, bc))
        kap = (d * dt) ** 2 * gamma * (gamma - 1.0) / eps2
        e_k = _energy_solve_1d(rhs_dev, af, kap, dx, bc)
        m_k = m_eff - d * dt * (gamma - 1.0) / (eps2 * dx) * central_diff1d(e_k, bc)
        K1.append(central_diff1d(m_k, bc))
        K2.append(sg_k + (gamma - 1.0) / eps2 * central_diff1d(e_k, bc))
        K3.append(-sh_k + gamma * central_diff1d(a_k * m_k, bc))
        g_st.append(g_k)
        h_st.append(h_k)
        sg_st.append(sg_k)
        sh_st.append(sh_k)
        m_st.append(m_k)
        e_st.append(e_k)
        psi_st.append(gamma * a_k * m_k)
        a_st.append(a_k)

    rho_eF = rho - nu * sum(Ae[s - 1, l] * K1[l] for l in range(s - 1))
    m_eF = m - nu * sum(Ae[s - 1, l] * K2[l] for l in range(s - 1))
    E_eF = E - nu * sum(Ae[s - 1, l] * K3[l] for l in range(s - 1))
    if not (np.all(rho_eF > 0.0) and np.all(E_eF > 0.0)):
        raise NonPositiveDensity("predictor state lost positivity")
    g_F, h_F = _fluxes_1d(rho_eF, m_eF, E_eF, gas)
    # the final-stage transport coefficient comes from the last explicit
    # stage; the two-stage pair reduces to the plain semi-implicit step,
    # whose coefficient is the old-state E/rho
    a_F = a_st[0] if s == 2 else E_eF / rho_eF
    g_st.append(g_F)
    h_st.append(h_F)
    sg_st.append(slope1d(g_F, theta, bc))
    sh_st.append(slope1d(h_F, theta, bc))

    # staggered corrector
    def nt(f):
        return staggered_average_1d(f, slope1d(f, theta, bc), o, bc)

    rho_bar, m_bar, E_bar = nt(rho), nt(m), nt(E)
    g_combo = sum(be[l] * g_st[l] for l in range(s))
    h_combo = sum(be[l] * h_st[l] for l in range(s))
    m_known = sum(bi[l] * m_st[l] for l in range(s - 1))
    e_known = sum(bi[l] * e_st[l] for l in range(s - 1))
    psi_known = sum(bi[l] * psi_st[l] for l in range(s - 1))
    d = bi[s - 1]

    m_star_final = m - nu * (sum(be[l] * sg_st[l] for l in range(s))
                             + (gamma - 1.0) / eps2 * central_diff1d(e_known, bc))
    E_rhs = E_bar - nu * (-stag_diff1d(h_combo, o, bc)
                          + stag_diff1d(psi_known, o, bc)
                          + d * gamma * stag_diff1d(a_F * m_star_final, o, bc))
    mean_E = float(np.mean(E_rhs))
    # exact-closure face coefficients: the old centers are the faces of the
    # staggered cells, so a_F needs no averaging in 1D
    a_face = shift1d(a_F, o + 1, bc)
    kap = (d * dt) ** 2 * gamma * (gamma - 1.0) / eps2
    e_F = _energy_solve_1d(E_rhs - mean_E, a_face, kap, dx, bc)
    E_new = E_rhs + kap * laplacian_faces_1d(e_F, a_face, dx, bc)

    bo = -1 - o
    m_hat = m_star_final - d * dt * (gamma - 1.0) / (eps2 * dx) \
        * stag_diff1d(e_F, bo, bc)
    rho_new = rho_bar - nu * (stag_diff1d(m_known, o, bc)
                              + d * stag_diff1d(m_hat, o, bc))
    m_new = m_bar - nu * (stag_diff1d(g_combo, o, bc)
                          + (gamma - 1.0) / eps2
                          * (stag_diff1d(e_known, o, bc)
                             + d * central_diff1d(e_F, bc)))
    if monitor is not None:
        # in the full-Euler low-Mach limit the incompressibility constraint
        # comes from the energy equation, so the controlled divergence is
        # the stage-weighted energy flux, normalized back to a velocity
        div = stag_diff1d(psi_known + d * gamma * a_F * m_hat, o, bc) / dx
        scale = gamma * float(np.mean(a_F)) * float(np.mean(rho_new))
        monitor.div_inf = float(np.max(np.abs(div))) / scale

    out = ConservedState(grid=grid.flipped(), rho=rho_new, m=(m_new,),
                         E=E_new, t=state.t + dt)
    out.require_positive_density()
    pressure(out, gas)      # raises if the new pressure is not positive
    return out


# ---------------------------------------------------------------------------
# 2D scheme
# ---------------------------------------------------------------------------

def _tensor_full(rho, m, gas: GasModel):
    """Convective tensor with the (gamma-1)/2 kinetic gradient folded into
    the diagonal: G[k][l] = m_k m_l / rho - delta_kl (gamma-1)/2 |m|^2/rho."""
    m1, m2 = m
    q = (m1 ** 2 + m2 ** 2) / rho
    half = 0.5 * (gas.gamma - 1.0)
    return {(0, 0): m1 * m1 / rho - half * q,
            (0, 1): m1 * m2 / rho,
            (1, 0): m2 * m1 / rho,
            (1, 1): m2 * m2 / rho - half * q}


def _kinetic_flux_2d(rho, m, gas: GasModel):
    """h_k = (gamma-1)/2 eps^2 |m|^2 m_k / rho^2 (energy flux carries -h)."""
    m1, m2 = m
    q = (m1 ** 2 + m2 ** 2) / rho ** 2
    pref = 0.5 * (gas.gamma - 1.0) * gas.eps ** 2
    return pref * q * m1, pref * q * m2


def _energy_solve_2d_corner(rhs_dev, a_int, kappa, dx, dy, o, cfg,
                            monitor=None):
    """CG solve of (I - kappa D(a G .)) e = rhs_dev on the staggered lattice.

    a_int lives at the old centers (the face positions of the new lattice);
    the operator is the exact divergence-gradient composition, so the energy
    update built on it telescopes and the low-Mach chain closes discretely.
    """
    bo = -1 - o

    def apply_op(v):
        w = kernel_project(v, True)
        gx = a_int * (corner_diff(w, 0, bo) / dx)
        gy = a_int * (corner_diff(w, 1, bo) / dy)
        return v - kappa * (corner_diff(gx, 0, o) / dx
                            + corner_diff(gy, 1, o) / dy)

    symbol = 1.0 + kappa * float(np.mean(a_int)) \
        * corner_laplacian_symbol(rhs_dev.shape, dx, dy)
    precond = fft_symbol_preconditioner(rhs_dev.shape, symbol)
    e, iters = solve_cg(apply_op, rhs_dev, precond, tol=cfg.cg_tol,
                        max_iter=cfg.cg_max_iter)
    if monitor is not None:
        monitor.cg_iters += iters
    return e


def _energy_solve_2d_compact(rhs_dev, a_c, kappa, dx, dy, cfg, monitor=None):
    """CG solve of the cell-centered stage system with face-averaged a."""
    from .operators import face_coefficients, laplacian_symbol
    afx = face_coefficients(a_c, 0)
    afy = face_coefficients(a_c, 1)

    def apply_op(v):
        return v - kappa * laplacian_faces_2d(v, afx, afy, dx, dy)

    symbol = 1.0 + kappa * float(np.mean(a_c)) \
        * laplacian_symbol(rhs_dev.shape, dx, dy)
    precond = fft_symbol_preconditioner(rhs_dev.shape, symbol)
    e, iters = solve_cg(apply_op, rhs_dev, precond, tol=cfg.cg_tol,
                        max_iter=cfg.cg_max_iter)
    if monitor is not None:
        monitor.cg_iters += iters
    return e


def _step_full_2d(state: ConservedState, gas: GasModel, cfg: RunConfig,
                  tableau: ImexTableau, dt: float | None,
                  monitor: StepMonitor | None) -> ConservedState:
    _validate(tableau)
    if dt is None:
        dt, _ = time_step(state, gas, cfg)
    grid = state.grid
    o = parity_offset(grid)
    dx, dy = grid.dx
    gamma = gas.gamma
    eps2 = gas.eps ** 2
    rho, (m1, m2), E = state.rho, state.m, state.E
    state.require_positive_density()

    Ae, Ai = tableau.A_exp, tableau.A_imp
    be, bi = tableau.b_exp, tableau.b_imp
    s = tableau.stages
    theta = cfg.theta
    steps = (dx, dy)

    def limdiv(f1, f2):
        return slope2d(f1, theta, 0) / dx + slope2d(f2, theta, 1) / dy

    def div_c(v1, v2):
        return central_diff2d(v1, 0) / dx + central_diff2d(v2, 1) / dy

    G0 = _tensor_full(rho, (m1, m2), gas)
    h0 = _kinetic_flux_2d(rho, (m1, m2), gas)
    a0 = E / rho
    e0 = E - float(np.mean(E))
    K1 = [div_c(m1, m2)]
    ld0 = [limdiv(G0[(k, 0)], G0[(k, 1)]) for k in range(2)]
    K2 = [[ld0[k] + (gamma - 1.0) / eps2 * central_diff2d(e0, k) / steps[k]
           for k in range(2)]]
    K3 = [-limdiv(h0[0], h0[1]) + gamma * div_c(a0 * m1, a0 * m2)]
    G_st, h_st = [G0], [h0]
    ld_st = [ld0]
    lh_st = [limdiv(h0[0], h0[1])]
    m_st, e_st = [(m1, m2)], [e0]
    psi_st = [(gamma * a0 * m1, gamma * a0 * m2)]
    a_st = [a0]

    for k in range(1, s - 1):
        rho_e = rho - dt * sum(Ae[k, l] * K1[l] for l in range(k))
        m_e = [state.m[c] - dt * sum(Ae[k, l] * K2[l][c] for l in range(k))
               for c in range(2)]
        E_e = E - dt * sum(Ae[k, l] * K3[l] for l in range(k))
        if not (np.all(rho_e > 0.0) and np.all(E_e > 0.0)):
            raise NonPositiveDensity("predictor state lost positivity")
        G_k = _tensor_full(rho_e, m_e, gas)
        h_k = _kinetic_flux_2d(rho_e, m_e, gas)
        a_k = E_e / rho_e
        ld_k = [limdiv(G_k[(c, 0)], G_k[(c, 1)]) for c in range(2)]
        lh_k = limdiv(h_k[0], h_k[1])
        d = Ai[k, k]
        m_eff = [state.m[c] - dt * (sum(Ai[k, l] * K2[l][c] for l in range(k))
                                    + d * ld_k[c]) for c in range(2)]
        E_eff = E - dt * (sum(Ai[k, l] * K3[l] for l in range(k)) - d * lh_k)
        rhs = E_eff - d * dt * gamma * div_c(a_k * m_eff[0], a_k * m_eff[1])
        rhs_dev = rhs - float(np.mean(rhs))
        kap = (d * dt) ** 2 * gamma * (gamma - 1.0) / eps2
        e_k = _energy_solve_2d_compact(rhs_dev, a_k, kap, dx, dy, cfg, monitor)
        m_k = [m_eff[c] - d * dt * (gamma - 1.0) / eps2
               * central_diff2d(e_k, c) / steps[c] for c in range(2)]
        K1.append(div_c(m_k[0], m_k[1]))
        K2.append([ld_k[c] + (gamma - 1.0) / eps2
                   * central_diff2d(e_k, c) / steps[c] for c in range(2)])
        K3.append(-lh_k + gamma * div_c(a_k * m_k[0], a_k * m_k[1]))
        G_st.append(G_k)
        h_st.append(h_k)
        ld_st.append(ld_k)
        lh_st.append(lh_k)
        m_st.append(tuple(m_k))
        e_st.append(e_k)
        psi_st.append((gamma * a_k * m_k[0], gamma * a_k * m_k[1]))
        a_st.append(a_k)

    rho_eF = rho - dt * sum(Ae[s - 1, l] * K1[l] for l in range(s - 1))
    m_eF = [state.m[c] - dt * sum(Ae[s - 1, l] * K2[l][c] for l in range(s - 1))
            for c in range(2)]
    E_eF = E - dt * sum(Ae[s - 1, l] * K3[l] for l in range(s - 1))
    if not (np.all(rho_eF > 0.0) and np.all(E_eF > 0.0)):
        raise NonPositiveDensity("predictor state lost positivity")
    G_F = _tensor_full(rho_eF, m_eF, gas)
    h_F = _kinetic_flux_2d(rho_eF, m_eF, gas)
    a_F = a_st[0] if s == 2 else E_eF / rho_eF
    G_st.append(G_F)
    h_st.append(h_F)
    ld_st.append([limdiv(G_F[(c, 0)], G_F[(c, 1)]) for c in range(2)])
    lh_st.append(limdiv(h_F[0], h_F[1]))

    # staggered corrector
    def jt(f):
        return staggered_average_2d(f, slope2d(f, theta, 0),
                                    slope2d(f, theta, 1), o)

    rho_bar = jt(rho)
    m_bar = (jt(m1), jt(m2))
    E_bar = jt(E)
    G_combo = {(k, l): sum(be[c] * G_st[c][(k, l)] for c in range(s))
               for k in range(2) for l in range(2)}
    h_combo = tuple(sum(be[c] * h_st[c][k] for c in range(s)) for k in range(2))
    m_known = [sum(bi[l] * m_st[l][c] for l in range(s - 1)) for c in range(2)]
    e_known = sum(bi[l] * e_st[l] for l in range(s - 1))
    psi_known = tuple(sum(bi[l] * psi_st[l][c] for l in range(s - 1))
                      for c in range(2))
    d = bi[s - 1]

    m_star_final = [
        state.m[c] - dt * (sum(be[l] * ld_st[l][c] for l in range(s))
                           + (gamma - 1.0) / eps2
                           * central_diff2d(e_known, c) / steps[c])
        for c in range(2)]
    E_rhs = E_bar - dt * (-corner_div(h_combo[0], h_combo[1], dx, dy, o)
                          + corner_div(psi_known[0], psi_known[1], dx, dy, o)
                          + d * gamma * corner_div(a_F * m_star_final[0],
                                                   a_F * m_star_final[1],
                                                   dx, dy, o))
    mean_E = float(np.mean(E_rhs))
    kap = (d * dt) ** 2 * gamma * (gamma - 1.0) / eps2
    e_F = _energy_solve_2d_corner(E_rhs - mean_E, a_F, kap, dx, dy, o, cfg,
                                  monitor)
    bo = -1 - o
    e_active = kernel_project(e_F, True)
    gx = a_F * (corner_diff(e_active, 0, bo) / dx)
    gy = a_F * (corner_diff(e_active, 1, bo) / dy)
    E_new = E_rhs + kap * (corner_diff(gx, 0, o) / dx + corner_diff(gy, 1, o) / dy)

    m_hat = [m_star_final[c] - d * dt * (gamma - 1.0) / eps2
             * corner_grad(e_F, c, steps[c], bo) for c in range(2)]
    rho_new = rho_bar - dt * corner_div(m_known[0] + d * m_hat[0],
                                        m_known[1] + d * m_hat[1], dx, dy, o)
    m_new = tuple(
        m_bar[c] - dt * (corner_div(G_combo[(c, 0)], G_combo[(c, 1)], dx, dy, o)
                         + (gamma - 1.0) / eps2
                         * (corner_grad(e_known, c, steps[c], o)
                            + d * central_diff2d(e_F, c) / steps[c]))
        for c in range(2))

    if monitor is not None:
        # energy-side divergence: the quantity the elliptic solve constrains
        # (the raw momentum divergence only transports the density)
        div = corner_div(psi_known[0] + d * gamma * a_F * m_hat[0],
                         psi_known[1] + d * gamma * a_F * m_hat[1], dx, dy, o)
        scale = gamma * float(np.mean(a_F)) * float(np.mean(rho_new))
        monitor.div_inf = float(np.max(np.abs(div))) / scale

    out = ConservedState(grid=grid.flipped(), rho=rho_new, m=m_new, E=E_new,
                         t=state.t + dt)
    out.require_positive_density()
    pressure(out, gas)      # raises if the new pressure is not positive
    return out
