"""Closed-form solution of the infection-free (beta = 0) system on (0, L)^2.

After removing the exponential factors, each species is a heat equation with
zero-flux walls, so it diagonalises in products cos(n pi x/L) cos(m pi y/L).
The R equation is forced by I; its forced part decays like I times
exp(-gamma t), except at resonance where a secular t*exp(...) term appears.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, Grid
from .kinetics import Params, SirPoint


@dataclass(frozen=True)
class CosineCoeffs:
    L: float
    table: np.ndarray  # (nmax+1, nmax+1), indexed (n, m): n along x, m along y

    @property
    def nmax(self) -> int:
        return self.table.shape[0] - 1


def _weights(nmax: int) -> np.ndarray:
    eps = np.full(nmax + 1, 2.0)
    eps[0] = 1.0
    return eps


def _cos_matrix(coords: np.ndarray, nmax: int, L: float) -> np.ndarray:
    """cos(n pi x / L), shape (nmax+1, len(coords))."""
    n = np.arange(nmax + 1)[:, None]
    return np.cos(n * np.pi * np.asarray(coords, dtype=float)[None, :] / L)


def cosine_coefficients(f: Field, nmax: int | None = None) -> CosineCoeffs:
    """Midpoint-rule cosine transform; exact inverse of evaluation at cell centres."""
    g = f.grid
    if nmax is None:
        nmax = g.nx - 1
    if not 0 <= nmax <= g.nx - 1:
        raise ValueError(f"nmax must lie in [0, {g.nx - 1}] for nx={g.nx}, got {nmax}")
    C = _cos_matrix(g.centers, nmax, g.L)
    eps = _weights(nmax)
    # values are indexed (iy, ix); table[n, m] pairs n with x and m with y
    raw = C @ f.values.T @ C.T
    table = raw * (g.h * g.h / (g.L * g.L)) * np.outer(eps, eps)
    return CosineCoeffs(g.L, table)


def evaluate_series(coeffs: np.ndarray, L: float, x, y) -> np.ndarray:
    """Sum coeffs[n, m] cos(n pi x/L) cos(m pi y/L) at broadcastable points."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    nmax = coeffs.shape[0] - 1
    cx = _cos_matrix(x.ravel(), nmax, L)
    cy = _cos_matrix(y.ravel(), nmax, L)
    out = np.einsum("nm,np,mp->p", coeffs, cx, cy)
    return out.reshape(x.shape)


def evaluate_on_grid(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Series values at cell centres, indexed (iy, ix)."""
    C = _cos_matrix(grid.centers, coeffs.shape[0] - 1, grid.L)
    return (C.T @ coeffs @ C).T


def _k2_table(nmax: int, L: float) -> np.ndarray:
    n = np.arange(nmax + 1)
    return np.pi**2 * (n[:, None] ** 2 + n[None, :] ** 2) / (L * L)


@dataclass(frozen=True)
class InfectionFreeSolution:
    params: Params
    L: float
    c: CosineCoeffs
    d: CosineCoeffs
    e: CosineCoeffs
    f: CosineCoeffs
    resonant: np.ndarray  # bool mask (n, m)

    @property
    def nmax(self) -> int:
        return self.c.nmax

    @property
    def resonance_flags(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in zip(*np.nonzero(self.resonant))}

    @property
    def k2(self) -> np.ndarray:
        return _k2_table(self.nmax, self.L)

    def mode_amplitudes(self, t: float):
        """Per-mode amplitudes (S, I, R) at time t, including the exp(-nu t) factors."""
        p = self.params
        k2 = self.k2
        t = float(t)
        a_s = self.c.table * np.exp(-p.chi_s * k2 * t)
        a_i = self.d.table * np.exp(-p.chi_i * k2 * t)
        decay_r = np.exp(-p.chi_r * k2 * t)
        a_r = self.e.table * np.exp(-(p.chi_i * k2 + p.gamma) * t) + self.f.table * decay_r
        if self.resonant.any():
            a_r = np.where(self.resonant, (self.f.table + p.gamma * self.d.table * t) * decay_r, a_r)
        return (
            np.exp(-p.nu * t) * a_s,
            np.exp(-(p.gamma + p.nu) * t) * a_i,
            np.exp(-p.nu * t) * a_r,
        )


def build_infection_free(
    s0: Field, i0: Field, r0: Field, p: Params, nmax: int | None = None, mode: str = "corrected"
) -> InfectionFreeSolution:
    """Coefficient tables of the beta = 0 solution from initial fields.

    ``mode="paper"`` keeps the printed forced-mode coefficient
    gamma*d/(gamma + (chi_I - chi_R) k^2), which has the wrong sign: it still
    reproduces the data at t=0 but does not solve the R equation. The default
    ``corrected`` mode negates it.
    """
    if not (s0.grid == i0.grid == r0.grid):
        raise ValueError("initial fields must share one grid")
    if mode not in ("corrected", "paper"):
        raise ValueError(f"mode must be 'corrected' or 'paper', got {mode!r}")
    g = s0.grid
    c = cosine_coefficients(s0 - p.b / p.nu, nmax)
    d = cosine_coefficients(i0, nmax)
    rr = cosine_coefficients(r0, nmax)
    k2 = _k2_table(c.nmax, g.L)
    denom = p.gamma + (p.chi_i - p.chi_r) * k2
    resonant = np.abs(denom) <= 1e-10 * p.gamma
    safe = np.where(resonant, 1.0, denom)
    e = p.gamma * d.table / safe
    if mode == "corrected":
        e = -e
    e = np.where(resonant, 0.0, e)
    f = rr.table - e
    return InfectionFreeSolution(
        p, g.L, c, d, CosineCoeffs(g.L, e), CosineCoeffs(g.L, f), resonant
    )


def eval_infection_free(sol: InfectionFreeSolution, x, y, t: float):
    """(S, I, R) arrays at points (x, y) and time t."""
    a_s, a_i, a_r = sol.mode_amplitudes(t)
    base = sol.params.b / sol.params.nu
    return (
        base + evaluate_series(a_s, sol.L, x, y),
        evaluate_series(a_i, sol.L, x, y),
        evaluate_series(a_r, sol.L, x, y),
    )


def eval_point(sol: InfectionFreeSolution, x: float, y: float, t: float) -> SirPoint:
    s, i, r = eval_infection_free(sol, x, y, t)
    return SirPoint(float(s), float(i), float(r))


def eval_on_grid(sol: InfectionFreeSolution, grid: Grid, t: float) -> tuple[Field, Field, Field]:
    """Solution fields at the cell centres of ``grid`` (any grid on the same L)."""
    if abs(grid.L - sol.L) > 1e-12 * sol.L:
        raise ValueError("grid side length differs from the solution's domain")
    a_s, a_i, a_r = sol.mode_amplitudes(t)
    base = sol.params.b / sol.params.nu
    return (
        Field(grid, base + evaluate_on_grid(a_s, grid)),
        Field(grid, evaluate_on_grid(a_i, grid)),
        Field(grid, evaluate_on_grid(a_r, grid)),
    )


def parseval_l2(coeffs: CosineCoeffs) -> float:
    """Discrete L2 norm implied by a full coefficient table."""
    eps = _weights(coeffs.nmax)
    w = np.outer(eps, eps)
    return coeffs.L * float(np.sqrt(np.sum(coeffs.table**2 / w)))
