"""Strict parsing of the JSON run configuration."""
from __future__ import annotations

from dataclasses import dataclass
import math

from .grid import Grid
from .integrator import SimConfig
from .kinetics import Params


class ConfigError(ValueError):
    pass


SUITES = ("mass", "beta", "decay", "steady", "region", "all")

# section -> (required keys, optional keys)
SCHEMA = {
    "params": (("chi_s", "chi_i", "chi_r", "b", "beta", "nu", "gamma"), ()),
    "grid": (("L", "nx"), ()),
    "time": (("t_end", "snapshot_stride"), ("dt",)),
    "init": (("type",), None),  # keys depend on type
    "spectral": ((), ("nmax",)),
    "dispersion": (("k2_max", "steps"), ()),
    "verify": (("suite", "betas", "trials", "seed", "fit_window"), ()),
    "output": (("dir",), ()),
}

INIT_KEYS = {
    "constant": ("s", "i", "r"),
    "paper_gaussian": (),
    "random_uniform": ("lo", "hi", "seed"),
    "cosine_mode": ("n", "m", "amplitude", "s", "i", "r"),
}


@dataclass(frozen=True)
class RunConfig:
    params: Params
    grid: Grid
    t_end: float
    dt: float | None
    snapshot_stride: int
    init: dict
    nmax: int | None
    k2_max: float
    steps: int
    suite: str
    betas: tuple[float, ...]
    trials: int
    seed: int
    fit_window: tuple[float, float]
    output_dir: str
    raw: dict

    def sim_config(self) -> SimConfig:
        return SimConfig(self.params, self.grid, self.t_end, self.dt, self.snapshot_stride, dict(self.init))


def _check_keys(where: str, obj, required, optional):
    if not isinstance(obj, dict):
        raise ConfigError(f"'{where}' must be an object")
    for k in required:
        if k not in obj:
            raise ConfigError(f"missing key '{where}.{k}'")
    allowed = set(required) | set(optional)
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"unknown key '{where}.{extra[0]}'")


def _num(where: str, v, positive=False, nonneg=False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"'{where}' must be a finite number")
    if positive and not v > 0:
        raise ConfigError(f"'{where}' must be positive")
    if nonneg and not v >= 0:
        raise ConfigError(f"'{where}' must be non-negative")
    return float(v)


def _int(where: str, v, minimum=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"'{where}' must be an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"'{where}' must be >= {minimum}")
    return v


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded config dict; raises :class:`ConfigError` naming the offending key."""
    _check_keys("<root>", data, tuple(SCHEMA), ())
    for sec, (req, opt) in SCHEMA.items():
        if opt is not None:
            _check_keys(sec, data[sec], req, opt)

    pr = data["params"]
    vals = {}
    for k in SCHEMA["params"][0]:
        vals[k] = _num(f"params.{k}", pr[k], positive=(k != "beta"), nonneg=True)
    params = Params(**vals)

    g = data["grid"]
    grid = Grid(_num("grid.L", g["L"], positive=True), _int("grid.nx", g["nx"], minimum=4))

    tm = data["time"]
    t_end = _num("time.t_end", tm["t_end"], nonneg=True)
    dt = _num("time.dt", tm["dt"], positive=True) if tm.get("dt") is not None else None
    stride = _int("time.snapshot_stride", tm["snapshot_stride"], minimum=1)

    init = data["init"]
    if not isinstance(init, dict) or "type" not in init:
        raise ConfigError("missing key 'init.type'")
    kind = init["type"]
    if kind not in INIT_KEYS:
        raise ConfigError(f"unknown init type '{kind}'")
    _check_keys("init", init, ("type",) + INIT_KEYS[kind], ())
    for k in INIT_KEYS[kind]:
        if k in ("seed", "n", "m"):
            _int(f"init.{k}", init[k], minimum=0)
        else:
            _num(f"init.{k}", init[k])
    if kind == "random_uniform" and not init["hi"] >= init["lo"]:
        raise ConfigError("'init.hi' must be >= 'init.lo'")

    sp = data["spectral"]
    nmax = sp.get("nmax")
    if nmax is not None:
        nmax = _int("spectral.nmax", nmax, minimum=0)

    dsp = data["dispersion"]
    k2_max = _num("dispersion.k2_max", dsp["k2_max"], positive=True)
    steps = _int("dispersion.steps", dsp["steps"], minimum=2)

    vf = data["verify"]
    suite = vf["suite"]
    if suite not in SUITES:
        raise ConfigError(f"'verify.suite' must be one of {', '.join(SUITES)}")
    if not isinstance(vf["betas"], list) or not vf["betas"]:
        raise ConfigError("'verify.betas' must be a non-empty list")
    betas = tuple(_num("verify.betas", b, nonneg=True) for b in vf["betas"])
    trials = _int("verify.trials", vf["trials"], minimum=1)
    seed = _int("verify.seed", vf["seed"], minimum=0)
    fw = vf["fit_window"]
    if not isinstance(fw, list) or len(fw) != 2:
        raise ConfigError("'verify.fit_window' must be [t0, t1]")
    fit_window = (_num("verify.fit_window", fw[0], nonneg=True), _num("verify.fit_window", fw[1], nonneg=True))

    out = data["output"]
    if not isinstance(out["dir"], str) or not out["dir"]:
        raise ConfigError("'output.dir' must be a non-empty string")

    return RunConfig(
        params, grid, t_end, dt, stride, dict(init), nmax, k2_max, steps,
        suite, betas, trials, seed, fit_window, out["dir"], data,
    )
