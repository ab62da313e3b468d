"""Hot loops: Neumann Laplacian, semi-discrete right-hand side, RK4 step.

Two implementations with identical arithmetic order are kept side by side.
``SIRRD_BACKEND=numpy`` forces the pure-numpy path; otherwise numba is used
when it imports. Both are exported under explicit names for benchmarking.
"""
from __future__ import annotations

import os

import numpy as np

# ---------------------------------------------------------------------------
# numpy path


def laplacian_np(f: np.ndarray, h: float) -> np.ndarray:
    # edge padding == mirror ghost for a cell-centred grid
    p = np.pad(f, 1, mode="edge")
    h2 = h * h
    return (p[1:-1, 2:] + p[1:-1, :-2] + p[2:, 1:-1] + p[:-2, 1:-1] - 4.0 * p[1:-1, 1:-1]) / h2


def rhs_np(s, i, r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h):
    inc = beta * s * i
    ds = chi_s * laplacian_np(s, h) + (b - inc - nu * s)
    di = chi_i * laplacian_np(i, h) + (inc - (gamma + nu) * i)
    dr = chi_r * laplacian_np(r, h) + (gamma * i - nu * r)
    return ds, di, dr


def rk4_step_np(s, i, r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h, dt):
    args = (chi_s, chi_i, chi_r, b, beta, nu, gamma, h)
    hdt = 0.5 * dt
    k1s, k1i, k1r = rhs_np(s, i, r, *args)
    k2s, k2i, k2r = rhs_np(s + hdt * k1s, i + hdt * k1i, r + hdt * k1r, *args)
    k3s, k3i, k3r = rhs_np(s + hdt * k2s, i + hdt * k2i, r + hdt * k2r, *args)
    k4s, k4i, k4r = rhs_np(s + dt * k3s, i + dt * k3i, r + dt * k3r, *args)
    w = dt / 6.0
    return (
        s + w * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
        i + w * (k1i + 2.0 * k2i + 2.0 * k3i + k4i),
        r + w * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
    )


# ---------------------------------------------------------------------------
# numba path

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


if njit is not None:

    @njit(cache=True)
    def laplacian_nb(f, h):
        n0, n1 = f.shape
        out = np.empty_like(f)
        h2 = h * h
        for iy in range(n0):
            ym = iy - 1 if iy > 0 else 0
            yp = iy + 1 if iy < n0 - 1 else n0 - 1
            for ix in range(n1):
                xm = ix - 1 if ix > 0 else 0
                xp = ix + 1 if ix < n1 - 1 else n1 - 1
                out[iy, ix] = (
                    f[iy, xp] + f[iy, xm] + f[yp, ix] + f[ym, ix] - 4.0 * f[iy, ix]
                ) / h2
        return out

    @njit(cache=True)
    def _rhs_into(s, i, r, ds, di, dr, chi_s, chi_i, chi_r, b, beta, nu, gamma, h):
        n0, n1 = s.shape
        h2 = h * h
        gn = gamma + nu
        for iy in range(n0):
            ym = iy - 1 if iy > 0 else 0
            yp = iy + 1 if iy < n0 - 1 else n0 - 1
            for ix in range(n1):
                xm = ix - 1 if ix > 0 else 0
                xp = ix + 1 if ix < n1 - 1 else n1 - 1
                sc = s[iy, ix]
                ic = i[iy, ix]
                rc = r[iy, ix]
                ls = (s[iy, xp] + s[iy, xm] + s[yp, ix] + s[ym, ix] - 4.0 * sc) / h2
                li = (i[iy, xp] + i[iy, xm] + i[yp, ix] + i[ym, ix] - 4.0 * ic) / h2
                lr = (r[iy, xp] + r[iy, xm] + r[yp, ix] + r[ym, ix] - 4.0 * rc) / h2
                inc = beta * sc * ic
                ds[iy, ix] = chi_s * ls + (b - inc - nu * sc)
                di[iy, ix] = chi_i * li + (inc - gn * ic)
                dr[iy, ix] = chi_r * lr + (gamma * ic - nu * rc)

    @njit(cache=True)
    def rhs_nb(s, i, r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h):
        ds = np.empty_like(s)
        di = np.empty_like(i)
        dr = np.empty_like(r)
        _rhs_into(s, i, r, ds, di, dr, chi_s, chi_i, chi_r, b, beta, nu, gamma, h)
        return ds, di, dr

    @njit(cache=True)
    def rk4_step_nb(s, i, r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h, dt):
        k1s, k1i, k1r = rhs_nb(s, i, r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h)
        hdt = 0.5 * dt
        k2s, k2i, k2r = rhs_nb(
            s + hdt * k1s, i + hdt * k1i, r + hdt * k1r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h
        )
        k3s, k3i, k3r = rhs_nb(
            s + hdt * k2s, i + hdt * k2i, r + hdt * k2r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h
        )
        k4s, k4i, k4r = rhs_nb(
            s + dt * k3s, i + dt * k3i, r + dt * k3r, chi_s, chi_i, chi_r, b, beta, nu, gamma, h
        )
        w = dt / 6.0
        return (
            s + w * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
            i + w * (k1i + 2.0 * k2i + 2.0 * k3i + k4i),
            r + w * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        )

    HAVE_NUMBA = True
else:  # pragma: no cover
    laplacian_nb = rhs_nb = rk4_step_nb = None
    HAVE_NUMBA = False


def _select_backend() -> str:
    want = os.environ.get("SIRRD_BACKEND", "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"SIRRD_BACKEND must be 'numba' or 'numpy', got {want!r}")
    if want == "numba" and not HAVE_NUMBA:
        return "numpy"
    return want


BACKEND = _select_backend()

if BACKEND == "numba":
    laplacian, rhs, rk4_step = laplacian_nb, rhs_nb, rk4_step_nb
else:
    laplacian, rhs, rk4_step = laplacian_np, rhs_np, rk4_step_np
