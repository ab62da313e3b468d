"""Method-of-lines RK4 integration of the SIR reaction-diffusion system."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import _kernels
from .grid import Field, Grid
from .kinetics import Params

SERIES_COLUMNS = (
    "t", "N", "mass_s", "mass_i", "mass_r",
    "linf_s", "linf_i", "linf_r", "l2_i", "min_value",
)

DIVERGENCE_LIMIT = 1e12


class DivergenceError(RuntimeError):
    """Raised when the explicit scheme produces huge or non-finite values."""

    def __init__(self, t: float, message: str = ""):
        self.t = t
        super().__init__(message or f"integration diverged at t={t:.6g}")


@dataclass(frozen=True)
class State:
    s: Field
    i: Field
    r: Field
    t: float

    def __post_init__(self):
        if not (self.s.grid == self.i.grid == self.r.grid):
            raise ValueError("S, I, R must share one grid")

    @property
    def grid(self) -> Grid:
        return self.s.grid

    def arrays(self):
        return self.s.values, self.i.values, self.r.values

    @classmethod
    def from_arrays(cls, grid: Grid, s, i, r, t: float) -> "State":
        return cls(Field(grid, s), Field(grid, i), Field(grid, r), float(t))

    def min_value(self) -> float:
        return float(min(v.min() for v in self.arrays()))


@dataclass(frozen=True)
class SimConfig:
    params: Params
    grid: Grid
    t_end: float
    dt: float | None = None
    snapshot_stride: int = 1
    init: dict = field(default_factory=lambda: {"type": "paper_gaussian"})

    def __post_init__(self):
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be an integer >= 1, got {self.snapshot_stride!r}")


@dataclass
class Trajectory:
    snapshots: list[State]
    series: np.ndarray  # rows of SERIES_COLUMNS

    def column(self, name: str) -> np.ndarray:
        return self.series[:, SERIES_COLUMNS.index(name)]

    @property
    def final(self) -> State:
        return self.snapshots[-1]


def stable_dt(p: Params, g: Grid) -> float:
    """Explicit step: 0.9 x min(diffusion limit h^2/(4 chi_max), 0.1/kinetic rate)."""
    chi_max = max(p.chi_s, p.chi_i, p.chi_r)
    rho = p.gamma + 2.0 * p.nu + p.beta * (p.b / p.nu + 1.0)
    return 0.9 * min(g.h * g.h / (4.0 * chi_max), 0.1 / rho)


def initial_state(grid: Grid, spec: dict) -> State:
    """Build t=0 fields from an initial-condition spec.

    Supported ``type`` values: ``constant``, ``paper_gaussian``,
    ``random_uniform`` and ``cosine_mode`` (constant S, R and
    ``i + amplitude*cos(n pi x/L) cos(m pi y/L)`` for I).
    """
    kind = spec.get("type")
    nx = grid.nx
    if kind == "constant":
        s, i, r = (np.full((nx, nx), float(spec[k])) for k in ("s", "i", "r"))
    elif kind == "paper_gaussian":
        X, Y = grid.mesh()
        c = grid.L / 2
        g = np.exp(-((X - c) ** 2) - (Y - c) ** 2)
        s, i, r = 1.0 - g, g / 2.0, g / 2.0
    elif kind == "random_uniform":
        lo, hi = float(spec["lo"]), float(spec["hi"])
        if not hi >= lo:
            raise ValueError("random_uniform needs hi >= lo")
        rng = np.random.default_rng(int(spec["seed"]))
        s, i, r = rng.uniform(lo, hi, size=(3, nx, nx))
    elif kind == "cosine_mode":
        X, Y = grid.mesh()
        n, m = int(spec["n"]), int(spec["m"])
        mode = np.cos(n * np.pi * X / grid.L) * np.cos(m * np.pi * Y / grid.L)
        s = np.full((nx, nx), float(spec["s"]))
        r = np.full((nx, nx), float(spec["r"]))
        i = float(spec["i"]) + float(spec["amplitude"]) * mode
    else:
        raise ValueError(f"unknown initial-condition type {kind!r}")
    return State.from_arrays(grid, s, i, r, 0.0)


def _step_arrays(s, i, r, p: Params, h: float, dt: float):
    return _kernels.rk4_step(
        s, i, r, p.chi_s, p.chi_i, p.chi_r, p.b, p.beta, p.nu, p.gamma, h, dt
    )


def _rhs_arrays(s, i, r, p: Params, h: float):
    return _kernels.rhs(s, i, r, p.chi_s, p.chi_i, p.chi_r, p.b, p.beta, p.nu, p.gamma, h)


def _check_finite(arrays, t: float):
    for a in arrays:
        m = np.max(np.abs(a))
        if not m <= DIVERGENCE_LIMIT:  # also catches NaN
            raise DivergenceError(t)


def step(state: State, p: Params, dt: float) -> State:
    """One classical RK4 step of the semi-discrete system."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    out = _step_arrays(*state.arrays(), p, state.grid.h, dt)
    t = state.t + dt
    _check_finite(out, t)
    return State.from_arrays(state.grid, *out, t)


def time_derivative(state: State, p: Params) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Semi-discrete right-hand side (dS/dt, dI/dt, dR/dt) at ``state``."""
    return _rhs_arrays(*state.arrays(), p, state.grid.h)


def _series_row(t, s, i, r, h) -> list[float]:
    h2 = h * h
    ms = h2 * float(np.sum(s.ravel()))
    mi = h2 * float(np.sum(i.ravel()))
    mr = h2 * float(np.sum(r.ravel()))
    return [
        t, ms + mi + mr, ms, mi, mr,
        float(np.max(np.abs(s))), float(np.max(np.abs(i))), float(np.max(np.abs(r))),
        float(np.sqrt(h2 * np.sum((i * i).ravel()))),
        float(min(s.min(), i.min(), r.min())),
    ]


def _step_schedule(t_end: float, dt: float) -> tuple[int, float]:
    """Number of full steps and the length of a trailing short step (0 if none)."""
    n_full = int(math.floor(t_end / dt))
    rem = t_end - n_full * dt
    if rem <= 1e-12 * max(t_end, 1.0):
        rem = 0.0
    return n_full, rem


def simulate(cfg: SimConfig, initial: State | None = None) -> Trajectory:
    """Integrate from t=0 to ``cfg.t_end``.

    The series is recorded after every step (plus the initial row); snapshots
    every ``snapshot_stride`` steps plus the final state. The last step is
    shortened so the final time equals ``t_end`` exactly.
    """
    p, g = cfg.params, cfg.grid
    dt = cfg.dt if cfg.dt is not None else stable_dt(p, g)
    limit = stable_dt(p, g)
    if dt > limit * (1 + 1e-12):
        warnings.warn(f"dt={dt:.6g} exceeds the stable step {limit:.6g}", RuntimeWarning, stacklevel=2)
    state = initial if initial is not None else initial_state(g, cfg.init)
    if state.grid != g:
        raise ValueError("initial state grid does not match config grid")
    h = g.h
    s, i, r = (np.array(a) for a in state.arrays())
    rows = [_series_row(0.0, s, i, r, h)]
    snaps = [State.from_arrays(g, s, i, r, 0.0)]

    n_full, rem = _step_schedule(cfg.t_end, dt)
    n_total = n_full + (1 if rem > 0 else 0)
    for k in range(1, n_total + 1):
        last = k == n_total
        this_dt = rem if (rem > 0 and last) else dt
        s, i, r = _step_arrays(s, i, r, p, h, this_dt)
        t = cfg.t_end if last else k * dt
        row = _series_row(t, s, i, r, h)
        if not max(row[5:8]) <= DIVERGENCE_LIMIT:
            raise DivergenceError(t)
        rows.append(row)
        if k % cfg.snapshot_stride == 0 or last:
            snaps.append(State.from_arrays(g, s, i, r, t))
    return Trajectory(snaps, np.array(rows, dtype=float))


def run_to_steady_state(
    cfg: SimConfig,
    tol: float,
    t_max: float,
    initial: State | None = None,
    check_every: int = 10,
) -> tuple[State, bool]:
    """Integrate until max |du/dt| <= tol or t >= t_max; ``cfg.t_end`` is ignored."""
    if not tol >= 0:
        raise ValueError("tol must be non-negative")
    p, g = cfg.params, cfg.grid
    dt = cfg.dt if cfg.dt is not None else stable_dt(p, g)
    state = initial if initial is not None else initial_state(g, cfg.init)
    h = g.h
    s, i, r = (np.array(a) for a in state.arrays())

    def residual():
        return max(float(np.max(np.abs(d))) for d in _rhs_arrays(s, i, r, p, h))

    k = 0
    t = 0.0
    while True:
        if k % check_every == 0 and residual() <= tol:
            return State.from_arrays(g, s, i, r, t), True
        if t >= t_max:
            return State.from_arrays(g, s, i, r, t), False
        this_dt = min(dt, t_max - t)
        s, i, r = _step_arrays(s, i, r, p, h, this_dt)
        k += 1
        t = min(k * dt, t_max)
        _check_finite((s, i, r), t)
