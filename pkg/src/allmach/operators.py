"""Slope limiters, staggered cell-average reconstruction and difference stencils.

Scaling conventions (fixed here once, to keep divisions out of call sites):

* slopes and all ``*_diff`` helpers are UNDIVIDED (plain differences of
  neighbor values); callers multiply by dt/dx groupings themselves;
* ``corner_div``, ``laplacian_2d`` and ``laplacian_varcoef`` are DIVIDED
  (true derivative approximations).

Staggered stencils take an offset ``o``: ``o = 0`` when stepping from parity
0 (new cell j sits over old cells j, j+1), ``o = -1`` from parity 1 (over
old cells j-1, j).  ``shift(a, k)`` denotes the array of values at old index
j + k, filled across the boundary according to the grid's BC.
"""

from __future__ import annotations

import numpy as np

from .core import PERIODIC
from .errors import NonPositiveCoefficient


def shift1d(a: np.ndarray, k: int, bc: str = PERIODIC) -> np.ndarray:
    """Values at index j + k with wrap-around (periodic) or edge-copy fill."""
    if k == 0:
        return a
    if bc == PERIODIC:
        return np.roll(a, -k)
    w = abs(k)
    padded = np.pad(a, w, mode="edge")
    return padded[w + k: w + k + a.shape[0]]


def shift2d(a: np.ndarray, kx: int, ky: int, bc: str = PERIODIC) -> np.ndarray:
    if bc != PERIODIC:
        raise ValueError("2D grids are periodic only")
    out = a
    if kx:
        out = np.roll(out, -kx, axis=0)
    if ky:
        out = np.roll(out, -ky, axis=1)
    return out


def minmod3(a, b, c):
    """Minmod of three arguments: value of least modulus when all share a sign, else 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    pos = (a > 0) & (b > 0) & (c > 0)
    neg = (a < 0) & (b < 0) & (c < 0)
    mag = np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c)))
    return np.where(pos, mag, 0.0) - np.where(neg, mag, 0.0)


def slope1d(f: np.ndarray, theta: float, bc: str = PERIODIC) -> np.ndarray:
    """Limited undivided slope MM(theta*d-, (d- + d+)/2, theta*d+) per cell."""
    fm = shift1d(f, -1, bc)
    fp = shift1d(f, +1, bc)
    return minmod3(theta * (f - fm), 0.5 * (fp - fm), theta * (fp - f))


def slope2d(f: np.ndarray, theta: float, axis: int, bc: str = PERIODIC) -> np.ndarray:
    """Per-axis limited undivided slope of a 2D field."""
    step = (1, 0) if axis == 0 else (0, 1)
    fm = shift2d(f, -step[0], -step[1], bc)
    fp = shift2d(f, +step[0], +step[1], bc)
    return minmod3(theta * (f - fm), 0.5 * (fp - fm), theta * (fp - f))


def central_diff1d(f: np.ndarray, bc: str = PERIODIC) -> np.ndarray:
    """Undivided wide central difference (f_{j+1} - f_{j-1})/2 on one parity."""
    return 0.5 * (shift1d(f, +1, bc) - shift1d(f, -1, bc))


def central_diff2d(f: np.ndarray, axis: int, bc: str = PERIODIC) -> np.ndarray:
    step = (1, 0) if axis == 0 else (0, 1)
    return 0.5 * (shift2d(f, *step, bc) - shift2d(f, -step[0], -step[1], bc))


def d2x(f: np.ndarray, bc: str = PERIODIC) -> np.ndarray:
    """Undivided three-point second difference f_{j+1} - 2 f_j + f_{j-1}."""
    return shift1d(f, +1, bc) - 2.0 * f + shift1d(f, -1, bc)


def stag_diff1d(f: np.ndarray, o: int, bc: str = PERIODIC) -> np.ndarray:
    """Compact staggered difference f_R - f_L across the new cell (undivided)."""
    return shift1d(f, o + 1, bc) - shift1d(f, o, bc)


def stag_mean1d(f: np.ndarray, o: int, bc: str = PERIODIC) -> np.ndarray:
    return 0.5 * (shift1d(f, o, bc) + shift1d(f, o + 1, bc))


def staggered_average_1d(f: np.ndarray, slopes: np.ndarray, o: int = 0,
                         bc: str = PERIODIC) -> np.ndarray:
    """Second-order staggered cell average (f_L + f_R)/2 + (s_L - s_R)/8.

    Conserves the discrete total sum exactly under periodic BC.
    """
    fL = shift1d(f, o, bc)
    fR = shift1d(f, o + 1, bc)
    sL = shift1d(slopes, o, bc)
    sR = shift1d(slopes, o + 1, bc)
    return 0.5 * (fL + fR) + 0.125 * (sL - sR)


def _corners(f: np.ndarray, o: int, bc: str = PERIODIC):
    """The four old-lattice values under a staggered 2D cell: LL, RL, LR, RR."""
    return (shift2d(f, o, o, bc), shift2d(f, o + 1, o, bc),
            shift2d(f, o, o + 1, bc), shift2d(f, o + 1, o + 1, bc))


def staggered_average_2d(f: np.ndarray, sx: np.ndarray, sy: np.ndarray,
                         o: int = 0, bc: str = PERIODIC) -> np.ndarray:
    """Staggered 2D cell average: corner mean plus 1/16 slope corrections.

    x-slopes enter the first correction group, y-slopes the second; the
    combination reproduces bilinear data exactly and conserves the sum.
    """
    fLL, fRL, fLR, fRR = _corners(f, o, bc)
    xLL, xRL, xLR, xRR = _corners(sx, o, bc)
    yLL, yRL, yLR, yRR = _corners(sy, o, bc)
    return (0.25 * (fLL + fRL + fLR + fRR)
            + 0.0625 * (xLL - xRL + xLR - xRR)
            + 0.0625 * (yLL - yLR + yRL - yRR))


def corner_diff(f: np.ndarray, axis: int, o: int, bc: str = PERIODIC) -> np.ndarray:
    """Averaged corner difference along one axis (undivided).

    Along x: ((f_RL - f_LL) + (f_RR - f_LR))/2; the transverse pair is
    averaged.  Maps between the two staggering parities in both directions.
    """
    fLL, fRL, fLR, fRR = _corners(f, o, bc)
    if axis == 0:
        return 0.5 * ((fRL - fLL) + (fRR - fLR))
    return 0.5 * ((fLR - fLL) + (fRR - fRL))


def corner_div(f1: np.ndarray, f2: np.ndarray, dx: float, dy: float,
               o: int, bc: str = PERIODIC) -> np.ndarray:
    """Staggered divergence of a vector field on the opposite parity (divided)."""
    return corner_diff(f1, 0, o, bc) / dx + corner_diff(f2, 1, o, bc) / dy


def corner_grad(f: np.ndarray, axis: int, dx: float, o: int,
                bc: str = PERIODIC) -> np.ndarray:
    """Component of the staggered gradient on the opposite parity (divided)."""
    return corner_diff(f, axis, o, bc) / dx


def staggered_div_2d(m1: np.ndarray, m2: np.ndarray, grid) -> np.ndarray:
    """Grid-aware wrapper around corner_div using the grid's parity offset."""
    o = 0 if grid.parity == 0 else -1
    dx, dy = grid.dx
    return corner_div(m1, m2, dx, dy, o, grid.boundary)


def corner_laplacian(q: np.ndarray, dx: float, dy: float, o: int,
                     a: np.ndarray | None = None, bc: str = PERIODIC) -> np.ndarray:
    """Composition of the staggered divergence with the staggered gradient.

    This is the exact Schur-complement operator of one staggered step: the
    gradient lands on the opposite parity (offset -1-o), an optional
    coefficient field a living there scales the flux, and the divergence
    returns to the parity of q (offset o).  Parity preserving, symmetric
    negative semidefinite, and it telescopes exactly, so density/energy
    updates built on it conserve to machine precision.
    """
    bo = -1 - o
    gx = corner_diff(q, 0, bo, bc) / dx
    gy = corner_diff(q, 1, bo, bc) / dy
    if a is not None:
        gx = a * gx
        gy = a * gy
    return corner_diff(gx, 0, o, bc) / dx + corner_diff(gy, 1, o, bc) / dy


def corner_laplacian_symbol(shape: tuple[int, int], dx: float, dy: float) -> np.ndarray:
    """-Fourier symbol of corner_laplacian (rfft2 layout, nonnegative)."""
    nx, ny = shape
    sx = np.sin(np.pi * np.arange(nx) / nx).reshape(-1, 1) ** 2
    sy = np.sin(np.pi * np.arange(ny // 2 + 1) / ny).reshape(1, -1) ** 2
    return 4.0 * (sx * (1.0 - sy) / dx ** 2 + (1.0 - sx) * sy / dy ** 2)


def laplacian_symbol(shape: tuple[int, int], dx: float, dy: float) -> np.ndarray:
    """-Fourier symbol of the compact five-point Laplacian (rfft2 layout)."""
    nx, ny = shape
    sx = np.sin(np.pi * np.arange(nx) / nx).reshape(-1, 1) ** 2
    sy = np.sin(np.pi * np.arange(ny // 2 + 1) / ny).reshape(1, -1) ** 2
    return 4.0 * (sx / dx ** 2 + sy / dy ** 2)


def laplacian_2d(p: np.ndarray, dx: float, dy: float, bc: str = PERIODIC) -> np.ndarray:
    """Compact five-point Laplacian (divided), parity preserving."""
    return ((shift2d(p, 1, 0, bc) - 2.0 * p + shift2d(p, -1, 0, bc)) / dx ** 2
            + (shift2d(p, 0, 1, bc) - 2.0 * p + shift2d(p, 0, -1, bc)) / dy ** 2)


def face_coefficients(a: np.ndarray, axis: int, bc: str = PERIODIC) -> np.ndarray:
    """Arithmetic-mean coefficient on the right face of each cell along an axis."""
    if a.ndim == 1:
        return 0.5 * (a + shift1d(a, +1, bc))
    step = (1, 0) if axis == 0 else (0, 1)
    return 0.5 * (a + shift2d(a, *step, bc))


def laplacian_faces_1d(E: np.ndarray, a_face: np.ndarray, dx: float,
                       bc: str = PERIODIC) -> np.ndarray:
    """Flux-form (a E_x)_x with a_face[j] on the face between cells j and j+1."""
    flux = a_face * (shift1d(E, +1, bc) - E)    # through right faces
    return (flux - shift1d(flux, -1, bc)) / dx ** 2


def laplacian_faces_2d(E: np.ndarray, ax_face: np.ndarray, ay_face: np.ndarray,
                       dx: float, dy: float, bc: str = PERIODIC) -> np.ndarray:
    fx = ax_face * (shift2d(E, 1, 0, bc) - E)
    fy = ay_face * (shift2d(E, 0, 1, bc) - E)
    return ((fx - shift2d(fx, -1, 0, bc)) / dx ** 2
            + (fy - shift2d(fy, 0, -1, bc)) / dy ** 2)


def laplacian_varcoef(E: np.ndarray, a: np.ndarray, dx: float, dy: float = 1.0,
                      bc: str = PERIODIC) -> np.ndarray:
    """Variable-coefficient Laplacian div(a grad E) with arithmetic face means.

    a lives on the same lattice as E and must be strictly positive.
    Reduces exactly to the compact Laplacian for a == 1.
    """
    if not np.all(a > 0.0):
        raise NonPositiveCoefficient(f"min coefficient = {np.min(a):.3e}")
    if E.ndim == 1:
        return laplacian_faces_1d(E, face_coefficients(a, 0, bc), dx, bc)
    return laplacian_faces_2d(E, face_coefficients(a, 0, bc),
                              face_coefficients(a, 1, bc), dx, dy, bc)


def parity_offset(grid) -> int:
    """Staggering slice offset for stepping off the grid's current parity."""
    return 0 if grid.parity == 0 else -1


def kernel_project(v: np.ndarray, checkerboard: bool = False) -> np.ndarray:
    """Remove the discrete kernel components the stiff elliptic operators
    annihilate (the mean; plus the odd-even mode for the corner composition
    on even grids).

    The operators kill these modes exactly even in floating point, but a
    kernel-heavy iterate sets the array's ulp and would poison the
    kappa-amplified operator evaluation; projecting first keeps the
    evaluation noise proportional to the physically active part.
    """
    out = v - v.mean()
    if checkerboard and v.ndim == 2 and v.shape[0] % 2 == 0 and v.shape[1] % 2 == 0:
        i = np.arange(v.shape[0]).reshape(-1, 1)
        j = np.arange(v.shape[1]).reshape(1, -1)
        cb = 1.0 - 2.0 * ((i + j) % 2)
        out = out - cb * np.sum(out * cb) / v.size
    return out
