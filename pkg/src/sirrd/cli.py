"""Command-line entry point: ``sirrd {equilibria,simulate,analytic,dispersion,verify} CONFIG``.

Exit codes: 0 ok, 1 verification failed, 2 config/precondition error,
3 divergence, 4 requested equilibrium absent.
"""
from __future__ import annotations

import argparse
from dataclasses import replace
from datetime import datetime, timezone
import json
import os
from pathlib import Path
import sys
import tempfile

import numpy as np

from . import __version__, _kernels
from . import experiments as ex
from .config import ConfigError, RunConfig, parse_config
from .integrator import DivergenceError, Trajectory, SERIES_COLUMNS, simulate, initial_state
from .kinetics import equilibria, invariant_region
from .spectral import build_infection_free, eval_on_grid
from .stability import (
    critical_k2_a1,
    critical_k2_paper_a2,
    equilibrium_point,
    scan_dispersion,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_DIVERGED, EXIT_NO_EQ = 0, 1, 2, 3, 4

LOCK_NAME = ".sirrd.lock"


def fmt(v: float) -> str:
    return f"{v:.17g}"


def fmt_time(t: float) -> str:
    return f"{t:.10g}"


class Output:
    """Output directory with a lock, atomic file writes and a closing manifest."""

    def __init__(self, directory: str, command: str, cfg: RunConfig):
        self.dir = Path(directory)
        self.command = command
        self.cfg = cfg
        self.files: list[str] = []
        self.start = datetime.now(timezone.utc).isoformat()
        self._lock = None

    def __enter__(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        lock = self.dir / LOCK_NAME
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ConfigError(f"output dir {self.dir} is locked by another run ({lock})") from None
        os.close(fd)
        self._lock = lock
        return self

    def __exit__(self, *exc):
        if self._lock is not None:
            self._lock.unlink(missing_ok=True)
        return False

    def write_text(self, name: str, text: str):
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, self.dir / name)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        if name not in self.files:
            self.files.append(name)

    def write_manifest(self):
        manifest = {
            "tool": "sirrd",
            "version": __version__,
            "backend": _kernels.BACKEND,
            "command": self.command,
            "config": self.cfg.raw,
            "start": self.start,
            "end": datetime.now(timezone.utc).isoformat(),
            "files": list(self.files),
        }
        self.write_text("manifest.json", json.dumps(manifest, indent=2) + "\n")


# ---------------------------------------------------------------------------
# table formatting


def field_csv(x: np.ndarray, y: np.ndarray, s, i, r) -> str:
    lines = ["x,y,S,I,R"]
    for row in zip(x.ravel(), y.ravel(), s.ravel(), i.ravel(), r.ravel()):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def state_csv(state) -> str:
    X, Y = state.grid.mesh()
    return field_csv(X, Y, *state.arrays())


def series_csv(traj: Trajectory) -> str:
    lines = [",".join(SERIES_COLUMNS)]
    lines += [",".join(fmt(v) for v in row) for row in traj.series]
    return "\n".join(lines) + "\n"


def coeffs_csv(sol) -> str:
    lines = ["n,m,c,d,e,f,resonant"]
    N = sol.nmax + 1
    for n in range(N):
        for m in range(N):
            lines.append(
                f"{n},{m},{fmt(sol.c.table[n, m])},{fmt(sol.d.table[n, m])},"
                f"{fmt(sol.e.table[n, m])},{fmt(sol.f.table[n, m])},{int(sol.resonant[n, m])}"
            )
    return "\n".join(lines) + "\n"


def dispersion_csv(points) -> str:
    lines = ["k2,re1,im1,re2,im2,re3,im3,max_re"]
    for pt in points:
        vals = [pt.k2]
        for z in pt.eigs:
            vals += [z.real, z.imag]
        vals.append(pt.max_re)
        lines.append(",".join(fmt(v) for v in vals))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _vec(pt):
    return None if pt is None else [pt.s, pt.i, pt.r]


def cmd_equilibria(cfg: RunConfig, args) -> int:
    p = cfg.params
    eqs = equilibria(p)
    try:
        box = invariant_region(p)
        region = {"c1": box.c1, "c2": box.c2, "c3": box.c3}
    except ValueError:
        region = None
    paper_a2 = None
    if eqs.a2 is not None:
        paper_a2 = {
            "value": critical_k2_paper_a2(p),
            "errata": "printed threshold; numeric dispersion scans show no sign change of max Re(lambda) there",
        }
    out = {
        "a1": _vec(eqs.a1),
        "a2": _vec(eqs.a2),
        "margin": eqs.margin,
        "coincident": eqs.coincident,
        "invariant_region": region,
        "critical_k2_a1": critical_k2_a1(p),
        "critical_k2_paper_a2": paper_a2,
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    traj = simulate(cfg.sim_config())
    with Output(cfg.output_dir, "simulate", cfg) as out:
        out.write_text("timeseries.csv", series_csv(traj))
        for st in traj.snapshots:
            out.write_text(f"snap_t{fmt_time(st.t)}.csv", state_csv(st))
        out.write_manifest()
    return EXIT_OK


def cmd_analytic(cfg: RunConfig, args) -> int:
    p = cfg.params
    if p.beta != 0:
        print(f"warning: beta={p.beta} ignored; evaluating the infection-free solution", file=sys.stderr)
    nmax = cfg.nmax if cfg.nmax is not None else cfg.grid.nx - 1
    if nmax > cfg.grid.nx - 1:
        raise ConfigError(f"'spectral.nmax'={nmax} exceeds nx-1={cfg.grid.nx - 1}")
    if any(t < 0 for t in args.t):
        raise ConfigError("analytic times must be non-negative")
    st = initial_state(cfg.grid, cfg.init)
    sol = build_infection_free(st.s, st.i, st.r, p.with_beta(0.0), nmax)
    X, Y = cfg.grid.mesh()
    with Output(cfg.output_dir, "analytic", cfg) as out:
        out.write_text("coeffs.csv", coeffs_csv(sol))
        for t in args.t:
            fs = eval_on_grid(sol, cfg.grid, t)
            out.write_text(f"analytic_t{fmt_time(t)}.csv", field_csv(X, Y, *(f.values for f in fs)))
        out.write_manifest()
    return EXIT_OK


def cmd_dispersion(cfg: RunConfig, args) -> int:
    p = cfg.params
    eq = equilibrium_point(p, args.eq)
    points, report = scan_dispersion(p, eq, cfg.k2_max, cfg.steps, label=args.eq, L=cfg.grid.L)
    with Output(cfg.output_dir, "dispersion", cfg) as out:
        out.write_text(f"dispersion_{args.eq}.csv", dispersion_csv(points))
        out.write_manifest()
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def run_suite(cfg: RunConfig, suite: str) -> list[ex.ExperimentResult]:
    sim = cfg.sim_config()
    names = ["mass", "beta", "decay", "steady", "region"] if suite == "all" else [suite]
    results = []
    for name in names:
        if name == "mass":
            results.append(ex.mass_balance_run(sim, 1e-4))
        elif name == "beta":
            results.append(ex.beta_convergence(sim, cfg.betas, cfg.t_end))
        elif name == "decay":
            dcfg = sim
            if suite == "all":
                # the decay law concerns the infection-free system
                dcfg = replace(sim, params=sim.params.with_beta(0.0))
            results.append(ex.i_decay(dcfg, cfg.fit_window))
        elif name == "steady":
            results.append(ex.steady_state_uniqueness(sim, cfg.trials, cfg.seed))
        elif name == "region":
            results.append(ex.invariant_region_check(sim))
    return results


def cmd_verify(cfg: RunConfig, args) -> int:
    suite = args.suite or cfg.suite
    results = run_suite(cfg, suite)
    report = {"suite": suite, "results": [r.to_dict() for r in results]}
    with Output(cfg.output_dir, "verify", cfg) as out:
        out.write_text("verify.json", json.dumps(report, indent=2) + "\n")
        out.write_manifest()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


COMMANDS = {
    "equilibria": cmd_equilibria,
    "simulate": cmd_simulate,
    "analytic": cmd_analytic,
    "dispersion": cmd_dispersion,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sirrd", description="SIR reaction-diffusion laboratory")
    parser.add_argument("--version", action="version", version=f"sirrd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="path to the JSON run configuration")
        sp.add_argument("-o", "--output", help="override output.dir")
        if name == "analytic":
            sp.add_argument("--t", type=float, nargs="+", default=[0.0, 1.0, 10.0], help="evaluation times")
        elif name == "dispersion":
            sp.add_argument("--eq", choices=("a1", "a2"), default="a1")
        elif name == "verify":
            sp.add_argument("--suite", choices=("mass", "beta", "decay", "steady", "region", "all"))
    return parser


def load_config(path: str, output: str | None = None) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if output is not None and isinstance(data, dict) and isinstance(data.get("output"), dict):
        data["output"]["dir"] = output
    return parse_config(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.output)
        return COMMANDS[args.command](cfg, args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except LookupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_EQ
    except ValueError as exc:  # ConfigError and module preconditions
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
