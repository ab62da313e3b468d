"""Linear stability of the constant equilibria under Helmholtz-mode perturbations.

Classification always goes through the numeric eigenvalues of J - k^2 D.
The printed closed forms are available under ``mode="paper"`` so their
disagreement with the numerics can be reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .kinetics import Params, SirPoint, equilibria, jacobian


@dataclass(frozen=True)
class DispersionPoint:
    k2: float
    eigs: tuple[complex, complex, complex]

    @property
    def max_re(self) -> float:
        return self.eigs[0].real


@dataclass
class StabilityReport:
    equilibrium: str
    ode_stable: bool
    unstable_intervals: list[tuple[float, float]]
    critical_k2: list[float]
    turing_unstable: bool
    unstable_box_modes: list[tuple[int, int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.equilibrium,
            "ode_stable": self.ode_stable,
            "unstable_intervals": [list(iv) for iv in self.unstable_intervals],
            "critical_k2": list(self.critical_k2),
            "turing_unstable": self.turing_unstable,
            "unstable_box_modes": [
                {"n": n, "m": m, "k2": k2} for n, m, k2 in self.unstable_box_modes
            ],
        }


def dispersion_matrix(p: Params, eq: SirPoint, k2: float) -> np.ndarray:
    if k2 < 0:
        raise ValueError("k2 must be non-negative")
    return jacobian(p, eq) - k2 * np.diag(p.diffusivities)


def sort_eigs(values) -> tuple[complex, ...]:
    """Descending real part, ties broken by descending imaginary part."""
    vals = [complex(v) for v in values]
    return tuple(sorted(vals, key=lambda z: (-z.real, -z.imag)))


def eigenvalues3(m: np.ndarray) -> tuple[complex, complex, complex]:
    """Eigenvalues of a real 3x3 matrix, sorted by :func:`sort_eigs`."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise ValueError("expected a finite 3x3 matrix")
    vals = np.linalg.eigvals(m)
    # snap conjugate-pair noise on real roots
    vals = [complex(v.real, 0.0) if abs(v.imag) <= 1e-14 * (1 + abs(v.real)) else complex(v) for v in vals]
    return sort_eigs(vals)


def charpoly_residual(m: np.ndarray, lam: complex) -> float:
    """|det(lam I - M)|."""
    return float(abs(np.linalg.det(lam * np.eye(3) - np.asarray(m, dtype=complex))))


def closed_form_a1(p: Params, k2: float, mode: str = "corrected") -> tuple[float, float, float]:
    """Eigenvalues at the disease-free state in the order (lambda1, lambda2, lambda3)."""
    if k2 < 0:
        raise ValueError("k2 must be non-negative")
    lam1 = -p.nu - p.chi_r * k2
    if mode == "corrected":
        lam2 = -p.nu - p.chi_s * k2
    elif mode == "paper":
        lam2 = -p.chi_s * k2 - p.beta * p.b / p.nu - p.nu
    else:
        raise ValueError(f"unknown mode {mode!r}")
    lam3 = p.beta * p.b / p.nu - p.gamma - p.nu - p.chi_i * k2
    return lam1, lam2, lam3


def a2_coefficients(p: Params, k2: float) -> tuple[float, float, float, float]:
    """(a, b, c, d) such that the (S, I) block of J - k^2 D is [[-a, -b], [c, -d]]."""
    gn = p.gamma + p.nu
    a = p.chi_s * k2 + p.b * p.beta / gn
    bb = gn
    c = p.beta * (p.b / gn - p.nu / p.beta)
    d = p.chi_i * k2
    return a, bb, c, d


def closed_form_a2(p: Params, k2: float, mode: str = "corrected") -> tuple[complex, complex, complex]:
    """Eigenvalues at the endemic state: (-nu - chi_R k^2, lambda+, lambda-)."""
    if p.beta == 0 or p.margin < 0:
        raise ValueError("endemic equilibrium does not exist (margin < 0)")
    if k2 < 0:
        raise ValueError("k2 must be non-negative")
    a, bb, c, d = a2_coefficients(p, k2)
    if mode == "corrected":
        disc = (a - d) ** 2 - 4 * bb * c
    elif mode == "paper":
        disc = (a - d) ** 2 + 4 * bb * c
    else:
        raise ValueError(f"unknown mode {mode!r}")
    root = np.sqrt(complex(disc))
    if disc >= 0:
        root = complex(math.sqrt(disc), 0.0)
    lam1 = complex(-p.nu - p.chi_r * k2, 0.0)
    return lam1, (-(a + d) + root) / 2, (-(a + d) - root) / 2


def critical_k2_a1(p: Params) -> float | None:
    """k^2 where the I-eigenvalue at the disease-free state crosses zero, if positive."""
    num = p.beta * p.b / p.nu - p.gamma - p.nu
    if num <= 0:
        return None
    return num / p.chi_i


def critical_k2_paper_a2(p: Params) -> float:
    """The printed Turing threshold for the endemic state, evaluated verbatim.

    Kept for errata reporting only; numeric scans do not change sign here.
    """
    if p.beta == 0 or p.margin < 0:
        raise ValueError("endemic equilibrium does not exist (margin < 0)")
    bbx = p.b * p.beta * p.chi_i
    gn = p.gamma + p.nu
    disc = bbx**2 + 4 * p.chi_s * p.chi_i * (p.b * p.beta + p.nu * p.gamma + p.nu**2) * gn**2
    return (-bbx + math.sqrt(disc)) / (2 * p.chi_s * p.chi_i * gn)


def max_re(p: Params, eq: SirPoint, k2: float) -> float:
    return eigenvalues3(dispersion_matrix(p, eq, k2))[0].real


def _bisect(fun, lo: float, hi: float, rel: float = 1e-13) -> float:
    flo = fun(lo) > 0
    while hi - lo > rel * max(abs(lo), abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (fun(mid) > 0) == flo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def admissible_box_modes(L: float, k2_max: float) -> list[tuple[int, int, float]]:
    """Neumann modes (n, m) of the box (0, L)^2 with k^2 = pi^2 (n^2 + m^2)/L^2 <= k2_max."""
    out = []
    nlim = int(math.floor(L * math.sqrt(k2_max) / math.pi)) if k2_max > 0 else 0
    for n in range(nlim + 1):
        for m in range(nlim + 1):
            k2 = math.pi**2 * (n * n + m * m) / (L * L)
            if k2 <= k2_max:
                out.append((n, m, k2))
    return sorted(out, key=lambda t: (t[2], t[0], t[1]))


def scan_dispersion(
    p: Params,
    eq: SirPoint,
    k2_max: float,
    steps: int,
    label: str = "",
    L: float | None = None,
) -> tuple[list[DispersionPoint], StabilityReport]:
    """Eigenvalues of J - k^2 D on a uniform k^2 grid and the derived classification.

    Sign changes of the leading real part are refined by bisection. When ``L``
    is given, box modes lying inside unstable intervals are listed.
    """
    if not k2_max > 0:
        raise ValueError("k2_max must be positive")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    ks = np.linspace(0.0, k2_max, steps)
    points = [DispersionPoint(float(k), eigenvalues3(dispersion_matrix(p, eq, float(k)))) for k in ks]
    unstable = [pt.max_re > 0 for pt in points]

    def f(k):
        return max_re(p, eq, k)

    intervals: list[tuple[float, float]] = []
    crit: list[float] = []
    start = 0.0 if unstable[0] else None
    for j in range(1, len(points)):
        if unstable[j] != unstable[j - 1]:
            kc = _bisect(f, points[j - 1].k2, points[j].k2)
            crit.append(kc)
            if unstable[j]:
                start = kc
            else:
                intervals.append((start, kc))
                start = None
    if start is not None:
        intervals.append((start, float(k2_max)))

    ode_stable = points[0].max_re < 0
    turing = ode_stable and any(hi > 0 for _, hi in intervals)
    box = []
    if L is not None:
        box = [
            mode for mode in admissible_box_modes(L, k2_max)
            if any(lo <= mode[2] < hi or (hi == k2_max and mode[2] == hi) for lo, hi in intervals)
        ]
    report = StabilityReport(label, ode_stable, intervals, crit, turing, box)
    return points, report


def equilibrium_point(p: Params, which: str) -> SirPoint:
    """Look up 'a1' or 'a2'; raises LookupError when the endemic state is absent."""
    eqs = equilibria(p)
    if which == "a1":
        return eqs.a1
    if which == "a2":
        if eqs.a2 is None:
            raise LookupError(f"endemic equilibrium absent (margin={eqs.margin:.6g} < 0)")
        return eqs.a2
    raise ValueError(f"equilibrium must be 'a1' or 'a2', got {which!r}")
