"""Von Neumann analysis of the predictor/corrector discretizations of
linear advection: amplification factors and stability maps.

The cell-centered (naive) predictor-corrector pair is stable only up to
Courant number 1/2; realizing the final stage on the staggered cell removes
the restriction entirely.  Both closed forms are evaluated here and swept to
produce the threshold and map data.
"""

from __future__ import annotations

import numpy as np

XI_SAMPLES = 4096     # uniform points on [-pi, pi]; fixed for reproducibility


def xi_grid(n: int = XI_SAMPLES) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, n)


def amp_naive(c: float, xi) -> np.ndarray:
    """Amplification factor of the cell-centered implicit predictor pair."""
    xi = np.asarray(xi, dtype=float)
    return np.cos(xi / 2.0) - 2j * c * np.sin(xi / 2.0) / (1.0 + 1j * c * np.sin(xi))


def naive_margin(c: float, xi) -> np.ndarray:
    """F(xi) = sin^2(xi/2) (1 - 4 c^2 (sin^4(xi/2) - cos^2(xi/2))).

    Nonnegative for all xi exactly when |amp_naive| <= 1 everywhere.
    """
    xi = np.asarray(xi, dtype=float)
    s2 = np.sin(xi / 2.0) ** 2
    return s2 * (1.0 - 4.0 * c ** 2 * (s2 ** 2 - np.cos(xi / 2.0) ** 2))


def amp_staggered(c: float, xi) -> np.ndarray:
    """|rho|^2 = cos^2(xi/2) / (1 + c^2 sin^2 xi) of the staggered final stage."""
    xi = np.asarray(xi, dtype=float)
    return np.cos(xi / 2.0) ** 2 / (1.0 + c ** 2 * np.sin(xi) ** 2)


def max_amp_naive(c: float, n: int = XI_SAMPLES) -> float:
    return float(np.max(np.abs(amp_naive(c, xi_grid(n)))))


def max_amp_staggered(c: float, n: int = XI_SAMPLES) -> float:
    return float(np.sqrt(np.max(amp_staggered(c, xi_grid(n)))))


def stability_map(c_values, n_xi: int = XI_SAMPLES) -> list[tuple[float, float, float]]:
    """Rows (c, max |rho| naive, max |rho| staggered) over the xi grid."""
    xi = xi_grid(n_xi)
    rows = []
    for c in np.asarray(c_values, dtype=float).ravel():
        rows.append((float(c),
                     float(np.max(np.abs(amp_naive(c, xi)))),
                     float(np.sqrt(np.max(amp_staggered(c, xi))))))
    return rows


def naive_threshold(lo: float = 0.4, hi: float = 0.6, tol: float = 1e-4,
                    n_xi: int = XI_SAMPLES) -> float:
    """Bisect the Courant number where the naive pair first amplifies."""
    xi = xi_grid(n_xi)

    def excess(c):
        return np.max(np.abs(amp_naive(c, xi)) ** 2 - 1.0)

    f_lo, f_hi = excess(lo), excess(hi)
    if not (f_lo <= 0.0 < f_hi):
        raise ValueError("bracket does not straddle the stability threshold")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
