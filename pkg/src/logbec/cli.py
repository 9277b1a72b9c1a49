"""Command-line front end.

Exit codes: 0 success, 2 config error, 3 physics/runtime error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis, variational
from .config import ExperimentConfig, load_config
from .errors import ConfigurationError, DomainError, SimulationError
from .model import BECParams, WidthTrajectory
from .pde import RadialGrid
from .scenario import compare_solvers, expansion_start, run_variational
from .units import ELECTRON_VOLT

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_VALIDATION = 0, 2, 3, 4
OUTPUT_DIR_ENV = "LOGBEC_OUTPUT_DIR"


def fmt(x: float) -> str:
    return f"{x:.8e}"


def _output_path(args, config_path: str, suffix: str) -> Path:
    if args.out:
        return Path(args.out)
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / f"{Path(config_path).stem}_{suffix}.csv"


def _provenance(cfg: ExperimentConfig) -> list[str]:
    p = cfg.params()
    return [
        "config: " + json.dumps(cfg.raw, sort_keys=True, ensure_ascii=True),
        "units: " + json.dumps(cfg.units.describe(), sort_keys=True),
        "internal: " + json.dumps({"atom_number": p.atom_number,
                                   "scatter_length": p.scatter_length,
                                   "log_strength": p.log_strength}, sort_keys=True),
    ]


def trajectory_csv(traj: WidthTrajectory, cfg: ExperimentConfig, fh,
                   extra: Optional[dict] = None) -> None:
    u = cfg.units
    for line in _provenance(cfg):
        fh.write(f"# {line}\n")
    t = u.from_internal(traj.t, "time")
    sig = u.from_internal(traj.sigma, "length")
    rate = u.from_internal(traj.sigma_dot, "velocity")
    energy = u.from_internal(traj.energy, "energy")
    if traj.is_spherical:
        cols = ["t_s", "sigma_m", "sigma_dot_m_per_s", "energy_J"]
        rows = [t, sig[:, 0], rate[:, 0], energy]
    else:
        cols = (["t_s"] + [f"sigma_{a}_m" for a in "xyz"]
                + [f"sigma_dot_{a}_m_per_s" for a in "xyz"] + ["energy_J"])
        rows = [t, *sig.T, *rate.T, energy]
    for name, col in (extra or {}).items():
        cols.append(name)
        rows.append(col)
    fh.write(",".join(cols) + "\n")
    for vals in zip(*rows):
        fh.write(",".join(fmt(v) for v in vals) + "\n")


def _open(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="ascii", newline="\n")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    sc = cfg.scenario()
    u = cfg.units
    um = lambda x: u.from_internal(x, "length") * 1e6  # noqa: E731
    traj = run_variational(sc)
    extra = None
    lines = [f"final width: {um(traj.width[-1]):.6g} um",
             f"max width along trajectory: {um(traj.width.max()):.6g} um"]
    p = sc.params
    if p.log_strength != 0:
        lines.append(f"chi: {variational.chi(sc.state0, p):.6g}")
    if p.log_strength > 0:
        lines.append(f"sigma_max bound: {um(variational.sigma_max(sc.state0, p)):.6g} um")
        lines.append(f"gausson width: {um(variational.gausson_width(p)):.6g} um")
    if "kick_omega" in traj.metadata:
        w = u.from_internal(traj.metadata["kick_omega"], "frequency")
        lines.append(f"kick angular frequency: {w:.6g} rad/s")
        post = traj.metadata["post_kick_state"]
        if p.log_strength > 0:
            lines.append(f"post-kick chi: {variational.chi(post, p):.6g}")
            lines.append(f"post-kick sigma_max bound: {um(variational.sigma_max(post, p)):.6g} um")
    if cfg.compare_linear:
        lin = run_variational(sc.with_log_strength(0.0), t_eval=traj.t)
        diff = lin.width[np.searchsorted(lin.t, traj.t)] - traj.width
        lines.append(f"width difference vs b = 0 at t_end: {um(diff[-1]):.6g} um")
        extra = {"sigma_linear_minus_sigma_m": u.from_internal(diff, "length")}
    if cfg.solver in ("pde", "both"):
        cmp = compare_solvers(sc, n_samples=cfg.pde.get("samples", 50), grid=_grid(cfg),
                              dt=_dt(cfg))
        lines.append(f"pde final width: {um(cmp.pde[-1]):.6g} um "
                     f"(max relative discrepancy {cmp.max_relative_discrepancy:.3g})")
    out = _output_path(args, args.config, "trajectory")
    with _open(out) as fh:
        trajectory_csv(traj, cfg, fh, extra)
    lines.append(f"trajectory written to {out}")
    print("\n".join(lines))
    return EXIT_OK


def _grid(cfg: ExperimentConfig) -> Optional[RadialGrid]:
    if "r_max" not in cfg.pde:
        return None
    return RadialGrid(cfg.units.to_internal(cfg.pde["r_max"], "length"), cfg.pde.get("n", 4096))


def _dt(cfg: ExperimentConfig) -> Optional[float]:
    return cfg.units.to_internal(cfg.pde["dt"], "time") if "dt" in cfg.pde else None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse number list {text!r}") from None


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    u = cfg.units
    t_end_s = args.t_end if args.t_end is not None else cfg.t_end_s
    if not t_end_s > 0:
        raise ConfigurationError("--t-end must be positive")
    sc = cfg.scenario(t_end_s)
    values = _float_list(args.values)
    if not values:
        raise ConfigurationError("--values needs at least one number")
    if args.axis == "b":
        internal = [u.to_internal(v * ELECTRON_VOLT, "energy") for v in values]
    else:
        internal = values
    step = args.t_step if args.t_step is not None else t_end_s / 100
    t_grid_s = np.linspace(0.0, t_end_s, int(round(t_end_s / step)) + 1)
    t_grid = u.to_internal(t_grid_s, "time")
    if sc.kick is not None:
        k = sc.kick
        t_grid = t_grid[(t_grid <= k.t_kick) | (t_grid >= k.t_after)]
    dmap = analysis.difference_map(sc, args.axis, internal, t_grid)
    out = _output_path(args, args.config, f"sweep_{args.axis}")
    with _open(out) as fh:
        dmap.to_csv(fh, u, _provenance(cfg) + [f"axis: {args.axis}"])
    last = u.from_internal(dmap.diffs[-1], "length") * 1e6
    print(f"sweep over {args.axis} ({len(values)} values, {len(t_grid)} times) written to {out}")
    print("difference at t_end [um]: " + ", ".join(f"{v:.6g}" for v in last))
    return EXIT_OK


def _parse_errors(text: str) -> analysis.RelativeErrors:
    keys = ("n", "a", "sigma0", "sigma_dot0")
    if "=" in text:
        vals = {}
        for item in text.split(","):
            k, _, v = item.partition("=")
            k = k.strip().lower()
            if k not in keys:
                raise ConfigurationError(f"unknown error key {k!r}; use {', '.join(keys)}")
            vals[k] = float(v)
        return analysis.RelativeErrors(**vals)
    nums = _float_list(text)
    if len(nums) != 4:
        raise ConfigurationError("--errors needs 4 values: N, a, sigma0, sigma_dot0")
    return analysis.RelativeErrors(*nums)


def error_budget_report(cfg: ExperimentConfig, errs: analysis.RelativeErrors) -> list[str]:
    sc = cfg.scenario()
    u = cfg.units
    ums = lambda x: u.from_internal(x, "velocity") * 1e6  # noqa: E731
    start = expansion_start(sc)
    rates = analysis.farfield_rate(start, sc.params)
    rel, absolute = analysis.rate_error(start, sc.params, errs)
    origin = "post-kick state" if sc.kick is not None else "initial state"
    lines = [
        f"reference: {origin}, sigma = {u.from_internal(start.sigma[0], 'length') * 1e6:.6g} um",
        f"sigma_dot_R  = {ums(rates.residual):.6g} um/s",
        f"sigma_dot_HU = {ums(rates.heisenberg):.6g} um/s",
        f"sigma_dot_GP = {ums(rates.interaction):.6g} um/s",
        f"far-field rate = {ums(rates.total):.6g} um/s",
        f"relative rate error = {rel:.6g}",
        f"absolute rate error = {ums(absolute):.6g} um/s",
    ]
    if sc.params.log_strength > 0:
        w = u.from_internal(analysis.magnetic_threshold(sc.params), "frequency")
        lines.append(f"magnetic threshold b/hbar = {w:.6g} rad/s")
    return lines


def cmd_error_budget(args) -> int:
    cfg = load_config(args.config)
    errs = _parse_errors(args.errors)
    lines = error_budget_report(cfg, errs)
    if args.out:
        with _open(Path(args.out)) as fh:
            fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    if cfg.solver != "both":
        raise ConfigurationError("validate needs \"solver\": \"both\" in the config")
    sc = cfg.scenario()
    cmp = compare_solvers(sc, n_samples=cfg.pde.get("samples", 50), grid=_grid(cfg), dt=_dt(cfg))
    tol = args.tolerance
    worst = cmp.max_relative_discrepancy
    ok = worst < tol
    lines = [
        f"grid: r_max = {cfg.units.from_internal(cmp.grid.r_max, 'length') * 1e6:.6g} um, "
        f"n = {cmp.grid.n}, steps = {cmp.pde_result.steps}",
        f"norm drift: {float(np.max(np.abs(cmp.pde_result.norms / cmp.pde_result.norms[0] - 1))):.3g}",
        f"max relative width discrepancy: {worst:.6g} (tolerance {tol:g})",
        "PASS" if ok else "FAIL",
    ]
    if args.out:
        u = cfg.units
        with _open(Path(args.out)) as fh:
            for line in _provenance(cfg):
                fh.write(f"# {line}\n")
            fh.write("t_s,sigma_variational_m,sigma_pde_m,relative_discrepancy\n")
            for row in zip(u.from_internal(cmp.times, "time"),
                           u.from_internal(cmp.variational, "length"),
                           u.from_internal(cmp.pde, "length"), cmp.relative_discrepancy):
                fh.write(",".join(fmt(v) for v in row) + "\n")
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logbec",
        description="Free expansion of condensates with a logarithmic nonlinearity.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: $%s or cwd)" % OUTPUT_DIR_ENV)
    common.add_argument("--tolerance", type=float, default=0.05,
                        help="relative tolerance for validate (default 0.05)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="integrate one config")
    p.add_argument("config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="width-difference map")
    p.add_argument("config")
    p.add_argument("--axis", choices=analysis.AXIS_KINDS, required=True)
    p.add_argument("--values", required=True,
                   help="comma-separated chi values, or b values in eV")
    p.add_argument("--t-end", type=float, help="end time in s (default: config t_end)")
    p.add_argument("--t-step", type=float, help="time grid spacing in s (default t_end/100)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("error-budget", parents=[common], help="far-field rate error budget")
    p.add_argument("config")
    p.add_argument("--errors", required=True,
                   help="relative errors 'N,a,sigma0,sigma_dot0' or 'n=0.2,a=0.2,...'")
    p.set_defaults(func=cmd_error_budget)

    p = sub.add_parser("validate", parents=[common], help="compare width equations with PDE")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, DomainError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
