"""Command-line front end.

Five workflows: spectrum (frequency response tables), eigen-scan
(eigenfrequencies vs coupling with merge detection), optimize (two-step
parameter matching), simulate (store/retrieve time series) and sweep
(repeat simulate over one parameter).  Every command writes CSV as the
authoritative output plus a JSON run summary; --svg adds line-chart
figures.  Diagnostics go to stderr; the exit status is 0 only when all
outputs were written.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dynamics, eigen, optimize, spectral
from .model import GaussianPulse, MemoryConfig, SwitchSchedule, load_config_file


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _round12(obj):
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, float):
        return float(_fmt(obj))
    return obj


def _write_csv(path: Path, header: list[str], rows) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    tmp.replace(path)


def _write_json(path: Path, doc: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(_round12(doc), fh, indent=2)
        fh.write("\n")
    tmp.replace(path)


def write_curve_csv(curve: spectral.SpectralCurve, path) -> None:
    """omega,re,im for complex kinds; omega,value for real kinds."""
    path = Path(path)
    if curve.kind in ("tau", "efficiency", "noise_gain"):
        _write_csv(path, ["omega", "value"], zip(curve.omega_grid, curve.real_values))
    else:
        _write_csv(
            path,
            ["omega", "re", "im"],
            zip(curve.omega_grid, curve.values.real, curve.values.imag),
        )


def _load_config(args) -> tuple[MemoryConfig, GaussianPulse | None, SwitchSchedule | None]:
    if not args.config:
        raise ValueError("--config PATH is required for this command")
    return load_config_file(args.config)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_spectrum(args) -> int:
    config, _, _ = _load_config(args)
    out = _out_dir(args)
    if args.points < 2:
        raise ValueError(f"--points must be >= 2, got {args.points}")
    if not args.omega_min < args.omega_max:
        raise ValueError("need --omega-min < --omega-max")
    k = config.kappa0 if args.k is None else args.k
    grid = np.linspace(args.omega_min, args.omega_max, args.points)

    # removable singularities (grid points on lossless resonances) are
    # emitted at their limit values via the cleared rational form
    s = spectral.transfer_s_rational(grid, config, k)
    eff = np.abs(s) ** 2
    noise = spectral.noise_gain_rational(grid, config, k)
    bad = ~(np.isfinite(s) & np.isfinite(noise))
    if np.any(bad):
        raise ValueError(
            f"transfer function undefined at omega = {grid[bad][0]:.12g} "
            "(fully lossless, decoupled evaluation)"
        )
    # the closed-form delay exists for the lossless symmetric network only
    if config.is_symmetric():
        tau = spectral.phase_delay(grid, config.without_loss(), k)
        tau0 = spectral.phase_delay(0.0, config.without_loss(), k)
        tau_rel = tau / tau0
    else:
        tau = np.full_like(grid, np.nan)
        tau_rel = np.full_like(grid, np.nan)
        tau0 = None

    _write_csv(
        out / "spectrum.csv",
        ["omega", "re_s", "im_s", "efficiency", "tau", "tau_r", "noise_gain"],
        zip(grid, s.real, s.imag, eff, tau, tau_rel, noise),
    )
    summary = {
        "k": k,
        "points": int(args.points),
        "omega_min": args.omega_min,
        "omega_max": args.omega_max,
        "max_abs_efficiency_deviation": float(np.max(np.abs(eff - 1.0))),
        "tau0": tau0,
    }
    _write_json(out / "spectrum_summary.json", summary)
    if args.svg:
        from .plots import render_spectrum

        render_spectrum(out / "spectrum.svg", grid, eff, tau_rel, noise)
    return 0


def cmd_eigen_scan(args) -> int:
    config, _, _ = _load_config(args)
    out = _out_dir(args)
    scan = eigen.scan_merge(config, args.k_min, args.k_max, args.k_steps)
    n = scan.eigenvalues.shape[1]
    header = ["k", "min_distance"]
    for j in range(n):
        header += [f"re_{j}", f"im_{j}"]
    rows = []
    for i in range(len(scan.k_values)):
        row = [scan.k_values[i], scan.min_distance[i]]
        for j in range(n):
            row += [scan.eigenvalues[i, j].real, scan.eigenvalues[i, j].imag]
        rows.append(row)
    _write_csv(out / "eigen_scan.csv", header, rows)
    summary = {
        "k_min": args.k_min,
        "k_max": args.k_max,
        "steps": int(args.k_steps),
        "merge_point": scan.merge_point,
        "merged_in_range": scan.merge_point is not None,
    }
    _write_json(out / "eigen_scan_summary.json", summary)
    if scan.merge_point is None:
        print("no merge in range", file=sys.stderr)
    if args.svg:
        from .plots import render_eigen_scan

        render_eigen_scan(out / "eigen_scan.svg", scan.k_values, scan.eigenvalues, scan.merge_point)
    return 0


def cmd_optimize(args) -> int:
    out = _out_dir(args)
    weights = [float(w) for w in args.weights.split(",")]
    if args.ratio < 2:
        raise ValueError(f"--ratio must be an integer >= 2, got {args.ratio}")
    report = optimize.design(weights, args.delta, args.ratio)
    _write_json(out / "design.json", report.to_dict())
    # the optimized configuration alone, consumable by the other commands
    _write_json(out / "config.json", report.config.to_dict())
    write_curve_csv(report.plateau.curve, out / "tau_r.csv")
    if args.svg:
        from .plots import render_tau_r

        render_tau_r(
            out / "tau_r.svg",
            report.plateau.curve.omega_grid,
            report.plateau.curve.real_values,
        )
    return 0


def _simulate_once(config, pulse, schedule, args):
    if schedule is not None:
        t_end = args.t_end if args.t_end else schedule.segments[-1][0] + 40.0
        result = dynamics.integrate(config, schedule, pulse, t_end, args.dt)
        window = (result.echo_split_time, float(result.t_grid[-1]))
        echo = dynamics.echo_metrics(result, window)
        metrics = None
    else:
        result, metrics = dynamics.store_retrieve(config, pulse, args.cycles, dt=args.dt)
        echo = metrics.echo
    return result, metrics, echo


def _write_timeseries(path: Path, result: dynamics.SimulationResult) -> None:
    n = result.b.shape[1]
    header = ["t", "re_ain", "im_ain", "re_a", "im_a"]
    for j in range(n):
        header += [f"re_b{j+1}", f"im_b{j+1}"]
    header += ["re_aout", "im_aout", "k", "J"]
    J = result.relative_intensity()
    cols = [result.t_grid, result.a_in.real, result.a_in.imag, result.a.real, result.a.imag]
    for j in range(n):
        cols += [result.b[:, j].real, result.b[:, j].imag]
    cols += [result.a_out.real, result.a_out.imag, result.k_of_t, J]
    _write_csv(path, header, zip(*cols))


def cmd_simulate(args) -> int:
    config, pulse, schedule = _load_config(args)
    out = _out_dir(args)
    if args.sigma is not None or pulse is None:
        sigma = args.sigma if args.sigma is not None else 1.0
        pulse = GaussianPulse(sigma=sigma, center=8.0 * sigma)
    if args.cycles is not None:
        schedule = None  # explicit cycle count overrides a schedule from the file
    if args.cycles is None:
        args.cycles = 0

    result, metrics, echo = _simulate_once(config, pulse, schedule, args)
    _write_timeseries(out / "timeseries.csv", result)
    summary = {
        "pulse": {"sigma": pulse.sigma, "center": pulse.center},
        "dt": result.dt,
        "energy": result.energy.to_dict(),
        "efficiency": (
            metrics.efficiency if metrics else result.energy.echo / result.energy.input
        ),
        "echo": echo.to_dict(),
    }
    if metrics:
        summary.update(
            {
                "t_switch_off": metrics.t_switch_off,
                "t_switch_on": metrics.t_switch_on,
                "revival_period": metrics.revival_period,
                "cycles": metrics.cycles,
            }
        )
    _write_json(out / "simulate_summary.json", summary)
    if args.svg:
        from .plots import render_echo

        render_echo(
            out / "echo.svg",
            result.t_grid,
            result.relative_intensity(),
            result.k_of_t,
            float(np.max(np.abs(result.a_in)) ** 2),
            a_in=result.a_in,
        )
    return 0


def _parse_sweep(spec: str):
    try:
        name, rng = spec.split("=", 1)
        lo, hi, steps = rng.split(":")
        return name.strip(), float(lo), float(hi), int(steps)
    except ValueError:
        raise ValueError(f"--sweep expects NAME=lo:hi:steps, got {spec!r}") from None


def cmd_sweep(args) -> int:
    config, pulse, _ = _load_config(args)
    out = _out_dir(args)
    name, lo, hi, steps = _parse_sweep(args.sweep)
    if steps < 1:
        raise ValueError(f"sweep needs at least 1 step, got {steps}")
    if name not in ("gamma", "sigma", "cycles"):
        raise ValueError(f"unknown sweep parameter {name!r}; supported: gamma, sigma, cycles")
    values = np.linspace(lo, hi, steps)

    rows = []
    for val in values:
        cfg = config
        sigma = args.sigma if args.sigma is not None else (pulse.sigma if pulse else 1.0)
        cycles = args.cycles if args.cycles is not None else 0
        if name == "gamma":
            cfg = config.with_gamma(float(val))
        elif name == "sigma":
            sigma = float(val)
        elif name == "cycles":
            cycles = int(round(val))
        p = GaussianPulse(sigma=sigma, center=8.0 * sigma)
        _, metrics = dynamics.store_retrieve(cfg, p, cycles, dt=args.dt)
        rows.append(
            [
                val,
                metrics.efficiency,
                metrics.echo.waveform_fidelity,
                metrics.echo.J_peak,
                metrics.t_switch_off,
                metrics.revival_period,
            ]
        )
        print(f"sweep {name}={val:g}: eta={metrics.efficiency:.6f}", file=sys.stderr)
    _write_csv(out / "sweep.csv", [name, "eta", "fidelity", "J_peak", "t0", "T"], rows)
    _write_json(
        out / "sweep_summary.json",
        {"parameter": name, "lo": lo, "hi": hi, "steps": steps,
         "eta": [r[1] for r in rows]},
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrqm",
        description="Design and simulate a switchable multiresonator cavity memory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON configuration file", default=None)
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--svg", action="store_true", help="also render figures")

    p = sub.add_parser("spectrum", help="frequency response tables")
    common(p)
    p.add_argument("--omega-min", type=float, default=-4.0)
    p.add_argument("--omega-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--k", type=float, default=None, help="coupling (default: config kappa0)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eigen-scan", help="eigenfrequencies vs coupling")
    common(p)
    p.add_argument("--k-min", type=float, default=0.0)
    p.add_argument("--k-max", type=float, default=12.0)
    p.add_argument("--k-steps", type=int, default=241)
    p.set_defaults(func=cmd_eigen_scan)

    p = sub.add_parser("optimize", help="two-step parameter matching")
    common(p)
    p.add_argument("--weights", default="1,1,1", help="w1,w2,w3")
    p.add_argument("--ratio", type=int, required=True, help="target outer/inner root ratio")
    p.add_argument("--delta", type=float, default=1.0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="store/retrieve time-domain run")
    common(p)
    p.add_argument("--cycles", type=int, default=None, help="storage cycles m")
    p.add_argument("--sigma", type=float, default=None, help="pulse half-width")
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="repeat simulate over one parameter")
    common(p)
    p.add_argument("--sweep", required=True, metavar="NAME=lo:hi:steps")
    p.add_argument("--cycles", type=int, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--dt", type=float, default=2e-3)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point for the CLI
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
