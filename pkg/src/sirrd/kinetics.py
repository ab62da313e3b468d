"""Pointwise SIR kinetics with demography: reaction terms, Jacobian, equilibria.

All functions here are pure and operate on scalars (or broadcastable arrays
for :func:`reaction_rates`).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
import math

import numpy as np


@dataclass(frozen=True)
class Params:
    """Model constants: three diffusivities and four kinetic rates."""

    chi_s: float
    chi_i: float
    chi_r: float
    b: float
    beta: float
    nu: float
    gamma: float

    def __post_init__(self):
        for name in ("chi_s", "chi_i", "chi_r", "b", "nu", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be non-negative, got {self.beta!r}")

    @property
    def margin(self) -> float:
        """Existence margin b*beta - nu*gamma - nu**2 of the endemic state."""
        return self.b * self.beta - self.nu * self.gamma - self.nu**2

    @property
    def diffusivities(self) -> np.ndarray:
        return np.array([self.chi_s, self.chi_i, self.chi_r])

    def scale(self) -> float:
        return max(self.chi_s, self.chi_i, self.chi_r, self.b, self.beta, self.nu, self.gamma)

    def with_beta(self, beta: float) -> "Params":
        return replace(self, beta=beta)


#: Parameter set of the worked Gaussian example (domain side 5).
PAPER_PARAMS = Params(chi_s=0.3, chi_i=0.4, chi_r=0.5, b=0.5, beta=0.01, nu=0.5, gamma=0.5)
PAPER_L = 5.0


@dataclass(frozen=True)
class SirPoint:
    s: float
    i: float
    r: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.s, self.i, self.r)):
            raise ValueError(f"non-finite SirPoint {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.i, self.r], dtype=float)

    @classmethod
    def from_array(cls, a) -> "SirPoint":
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class EquilibriumSet:
    a1: SirPoint
    a2: SirPoint | None
    margin: float

    @property
    def coincident(self) -> bool:
        return self.a2 is not None and self.a2 == self.a1


@dataclass(frozen=True)
class InvariantRegionBounds:
    c1: float
    c2: float
    c3: float

    def contains(self, s, i, r, slack: float = 0.0) -> bool:
        s, i, r = (np.asarray(v) for v in (s, i, r))
        lo = -slack
        return bool(
            np.all((s >= lo) & (s <= self.c1 + slack))
            and np.all((i >= lo) & (i <= self.c2 + slack))
            and np.all((r >= lo) & (r <= self.c3 + slack))
        )


def reaction_rates(p: Params, u: SirPoint) -> SirPoint:
    """Return (dS, dI, dR) of the diffusion-free kinetics at ``u``."""
    s, i, r = u.s, u.i, u.r
    inc = p.beta * s * i
    return SirPoint(p.b - inc - p.nu * s, inc - (p.gamma + p.nu) * i, p.gamma * i - p.nu * r)


def jacobian(p: Params, u: SirPoint) -> np.ndarray:
    s, i = u.s, u.i
    return np.array(
        [
            [-p.beta * i - p.nu, -p.beta * s, 0.0],
            [p.beta * i, p.beta * s - p.gamma - p.nu, 0.0],
            [0.0, p.gamma, -p.nu],
        ]
    )


def equilibria(p: Params) -> EquilibriumSet:
    """Disease-free state and, when the margin is non-negative, the endemic state.

    At ``margin == 0`` the endemic state is returned and coincides with the
    disease-free one.
    """
    a1 = SirPoint(p.b / p.nu, 0.0, 0.0)
    margin = p.margin
    if p.beta == 0 or margin < 0:
        return EquilibriumSet(a1, None, margin)
    gn = p.gamma + p.nu
    i2 = margin / (p.beta * gn)
    s2 = gn / p.beta
    if margin == 0:
        # (gamma+nu)/beta == b/nu exactly in real arithmetic; avoid a rounding split
        s2 = a1.s
    a2 = SirPoint(s2, i2, p.gamma * i2 / p.nu)
    return EquilibriumSet(a1, a2, margin)


def invariant_region(p: Params) -> InvariantRegionBounds:
    """Box [0,c1]x[0,c2]x[0,c3] that the flow cannot leave, for 0 < beta < 1.

    Uses c3 = (gamma/nu) c2 + 1, the choice that satisfies c3 > gamma c2 / nu
    for every birth rate.
    """
    if not 0 < p.beta < 1:
        raise ValueError(f"invariant region needs 0 < beta < 1, got beta={p.beta}")
    cbrt = p.beta ** (1.0 / 3.0)
    gn = p.gamma + p.nu
    c1 = gn / cbrt
    c2 = p.b / (cbrt * gn)
    c3 = p.gamma / p.nu * c2 + 1.0
    return InvariantRegionBounds(c1, c2, c3)
