"""IMEX Runge-Kutta Butcher pairs with GSA and order-condition validators.

A pair is globally stiffly accurate (GSA) when the solution weights equal
the last row of both tableaux and the final abscissa is 1; the staggered
correction step of the PDE solvers relies on exactly this property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTableau

_TOL = 1e-13


@dataclass(frozen=True)
class ImexTableau:
    """Explicit/implicit Butcher pair (A_exp strictly lower, A_imp lower/DIRK)."""

    A_exp: np.ndarray
    b_exp: np.ndarray
    c_exp: np.ndarray
    A_imp: np.ndarray
    b_imp: np.ndarray
    c_imp: np.ndarray

    @property
    def stages(self) -> int:
        return self.b_exp.shape[0]

    def __post_init__(self):
        s = self.stages
        for mat in (self.A_exp, self.A_imp):
            if mat.shape != (s, s):
                raise ValueError("tableau shape mismatch")
        if np.any(np.abs(np.triu(self.A_exp)) > 0):
            raise ValueError("explicit tableau must be strictly lower triangular")
        if np.any(np.abs(np.triu(self.A_imp, 1)) > 0):
            raise ValueError("implicit tableau must be lower triangular (DIRK)")


def validate_gsa(t: ImexTableau) -> bool:
    """Row-sum consistency plus the GSA identities b^T = e_s^T A, c_s = 1."""
    ok = (np.allclose(t.c_exp, t.A_exp.sum(axis=1), atol=_TOL, rtol=0.0)
          and np.allclose(t.c_imp, t.A_imp.sum(axis=1), atol=_TOL, rtol=0.0)
          and np.allclose(t.b_exp, t.A_exp[-1], atol=_TOL, rtol=0.0)
          and np.allclose(t.b_imp, t.A_imp[-1], atol=_TOL, rtol=0.0)
          and abs(t.c_exp[-1] - 1.0) < _TOL
          and abs(t.c_imp[-1] - 1.0) < _TOL)
    return bool(ok)


def validate_order2(t: ImexTableau) -> bool:
    """Second-order conditions including the explicit/implicit coupling ones."""
    checks = [
        t.b_exp.sum() - 1.0,
        t.b_imp.sum() - 1.0,
        float(t.b_exp @ t.c_exp) - 0.5,
        float(t.b_imp @ t.c_imp) - 0.5,
        float(t.b_exp @ t.c_imp) - 0.5,
        float(t.b_imp @ t.c_exp) - 0.5,
    ]
    return bool(max(abs(v) for v in checks) < _TOL)


def make_first_order() -> ImexTableau:
    """Implicit-explicit Euler written as a two-stage GSA pair."""
    A_exp = np.array([[0.0, 0.0], [1.0, 0.0]])
    A_imp = np.array([[0.0, 0.0], [0.0, 1.0]])
    return ImexTableau(
        A_exp=A_exp, b_exp=A_exp[-1].copy(), c_exp=A_exp.sum(axis=1),
        A_imp=A_imp, b_imp=A_imp[-1].copy(), c_imp=A_imp.sum(axis=1),
    )


def make_second_order(c: float = 2.25) -> ImexTableau:
    """Three-stage second-order GSA pair with nodes (0, c, 1).

    gamma = (c - 1/2)/(c - 1).  c > 1 keeps the explicit weights nonnegative
    and the implicit part L-stable; c = 1 - 1/sqrt(2) recovers the classical
    two-implicit-stage DIRK(2,2,2) pair.  The entries are pinned jointly by
    GSA, row-sum consistency with the nodes, and the order-2 plus coupling
    conditions (see validate_order2), which determine them uniquely.
    """
    if abs(c - 1.0) < 1e-12 or abs(c - 0.5) < 1e-12:
        raise DegenerateTableau(f"tableau parameter c = {c} is degenerate")
    gamma = (c - 0.5) / (c - 1.0)
    A_exp = np.array([
        [0.0, 0.0, 0.0],
        [c, 0.0, 0.0],
        [1.0 - 1.0 / (2.0 * c), 1.0 / (2.0 * c), 0.0],
    ])
    A_imp = np.array([
        [0.0, 0.0, 0.0],
        [c - gamma, gamma, 0.0],
        [0.0, 1.0 - gamma, gamma],
    ])
    tab = ImexTableau(
        A_exp=A_exp, b_exp=A_exp[-1].copy(), c_exp=A_exp.sum(axis=1),
        A_imp=A_imp, b_imp=A_imp[-1].copy(), c_imp=A_imp.sum(axis=1),
    )
    if not (validate_gsa(tab) and validate_order2(tab)):
        raise DegenerateTableau(f"constructed pair fails validation for c = {c}")
    return tab


def ars_c() -> float:
    """The c value collapsing the pair onto the classical DIRK(2,2,2)."""
    return 1.0 - 1.0 / math.sqrt(2.0)


def implicit_stability_function(t: ImexTableau, z: complex) -> complex:
    """R(z) = det(I - z A + z e b^T) / det(I - z A) of the implicit part."""
    s = t.stages
    eye = np.eye(s)
    A = t.A_imp
    num = np.linalg.det(eye - z * A + z * np.outer(np.ones(s), t.b_imp))
    den = np.linalg.det(eye - z * A)
    return num / den


def tableau_for(order: int, imex_c: float = 2.25) -> ImexTableau:
    if order == 1:
        return make_first_order()
    return make_second_order(imex_c)
