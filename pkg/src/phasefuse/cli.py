# phasefuse/cli.py
"""Command-line front end.

Subcommands:
  fig1      sensor-count sweep (antenna count fixed, default M=4)
  fig2      antenna-count sweep (sensor count fixed, default N=4)
  run       single instance: print the optimization report per strategy
  oracle    compare SDP rounding against the exhaustive phase grid
  selftest  quick closed-form / identity / sandwich checks

Exit status: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import sdp
from .channel import ScenarioConfig, generate_channel, sample_scenario
from .errors import PhasefuseError
from .estimator import fisher_matrix
from .montecarlo import (
    ANTENNA_SWEEP,
    SENSOR_SWEEP,
    ExperimentConfig,
    SweepResult,
    run_sweep,
)
from .phase_opt import (
    ALL_ONES,
    CLOSED_FORM_N2,
    GRID_ORACLE,
    SDP_RELAXATION,
    PhaseStrategy,
    grid_search,
    optimize_phases,
    optimize_phases_n2,
)
from .rng import RngStream

CSV_HEADER = (
    "sweep_param,value,strategy,mean_variance,std_err,"
    "lower_bound_mean,eq11,eq12,eq17,trials,failures"
)

FIG1_SWEEP = tuple(range(2, 31, 2))
FIG2_SWEEP = (1, 2, 4, 8, 16, 32, 64, 128)


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'low,high', got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _parse_strategies(text: str) -> tuple[PhaseStrategy, ...]:
    return tuple(PhaseStrategy(kind.strip()) for kind in text.split(","))


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--fc-noise", type=float, default=0.1)
    p.add_argument("--dist-range", type=_parse_range, default=(2.0, 7.0))
    p.add_argument("--sensor-noise-range", type=_parse_range, default=(0.001, 0.01))
    p.add_argument("--strategies", type=_parse_strategies,
                   default=(PhaseStrategy(SDP_RELAXATION), PhaseStrategy(ALL_ONES)))
    p.add_argument("--resample-per-trial", type=_parse_bool, default=True)
    p.add_argument("--output", default=None, help="destination path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--emit-plot-script", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasefuse",
        description="Phase-only analog encoding simulator for multi-antenna fusion",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p1 = sub.add_parser("fig1", help="variance vs. number of sensors")
    _add_common_flags(p1)
    p1.add_argument("--antennas", type=int, default=4)
    p1.add_argument("--sensors", type=int, nargs="+", default=list(FIG1_SWEEP),
                    help="sweep values for N")

    p2 = sub.add_parser("fig2", help="variance vs. number of FC antennas")
    _add_common_flags(p2)
    p2.add_argument("--sensors", type=int, default=4)
    p2.add_argument("--antennas", type=int, nargs="+", default=list(FIG2_SWEEP),
                    help="sweep values for M")

    pr = sub.add_parser("run", help="single instance, all strategies")
    _add_common_flags(pr)
    pr.add_argument("--sensors", type=int, required=True)
    pr.add_argument("--antennas", type=int, required=True)

    po = sub.add_parser("oracle", help="SDP vs. exhaustive grid comparison")
    _add_common_flags(po)
    po.add_argument("--sensors", type=int, default=3)
    po.add_argument("--antennas", type=int, default=4)
    po.add_argument("--instances", type=int, default=20)

    sub.add_parser("selftest", help="closed-form, identity and sandwich checks")
    return parser


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def result_rows(result: SweepResult) -> list[dict]:
    """Flatten a SweepResult into one record per (point, strategy)."""
    rows = []
    for point in result.points:
        for label, stats in point.strategy_stats.items():
            rows.append(
                {
                    "sweep_param": result.sweep_param,
                    "value": point.sweep_value,
                    "strategy": label,
                    "mean_variance": stats.mean_variance,
                    "std_err": stats.std_err,
                    "lower_bound_mean": point.lower_bound_mean,
                    "eq11": point.eq11,
                    "eq12": point.eq12,
                    "eq17": point.eq17,
                    "trials": point.trials,
                    "failures": stats.failures,
                }
            )
    return rows


def render_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for r in result_rows(result):
        lines.append(
            ",".join(
                [
                    r["sweep_param"],
                    str(r["value"]),
                    r["strategy"],
                    _fmt(r["mean_variance"]),
                    _fmt(r["std_err"]),
                    _fmt(r["lower_bound_mean"]),
                    _fmt(r["eq11"]),
                    _fmt(r["eq12"]),
                    _fmt(r["eq17"]),
                    str(r["trials"]),
                    str(r["failures"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def render_json(result: SweepResult) -> str:
    return json.dumps(result_rows(result), indent=2) + "\n"


def write_csv(result: SweepResult, destination) -> None:
    """Write the sweep as CSV (LF newlines, full double precision)."""
    text = render_csv(result)
    if destination is None:
        sys.stdout.write(text)
    else:
        with open(destination, "w", newline="\n") as fh:
            fh.write(text)


PLOT_TEMPLATE = """\
#!/usr/bin/env python3
# Auto-generated plot script: variance curves on a log-y axis.
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}

series = defaultdict(list)
extras = defaultdict(list)
with open(CSV_PATH) as fh:
    for row in csv.DictReader(fh):
        x = int(row["value"])
        series[row["strategy"]].append((x, float(row["mean_variance"])))
        for col in ("lower_bound_mean", "eq11", "eq12", "eq17"):
            if row[col]:
                extras[col].append((x, float(row[col])))

fig, ax = plt.subplots(figsize=(6, 4.5))
for name, pts in sorted(series.items()):
    pts = sorted(set(pts))
    ax.semilogy([p[0] for p in pts], [p[1] for p in pts], marker="o", label=name)
for name, pts in sorted(extras.items()):
    pts = sorted(set(pts))
    ax.semilogy([p[0] for p in pts], [p[1] for p in pts], linestyle="--", label=name)

ax.set_xlabel({xlabel!r})
ax.set_ylabel("estimation variance")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig({png_path!r}, dpi=150)
print("wrote", {png_path!r})
"""


def emit_plot_script(result: SweepResult, path: str, csv_path: str | None) -> None:
    """Write a self-contained matplotlib script that renders the sibling CSV."""
    xlabel = "number of sensors N" if result.sweep_param == SENSOR_SWEEP \
        else "number of FC antennas M"
    csv_name = csv_path if csv_path is not None else "results.csv"
    # figure name derives from the CSV, so the script bytes depend only on
    # the result contents, not on where the script itself is written
    png_name = csv_name.rsplit(".", 1)[0] + ".png"
    text = PLOT_TEMPLATE.format(
        csv_path=csv_name, xlabel=xlabel, png_path=png_name
    )
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _sweep_config(args, sweep: str) -> ExperimentConfig:
    if sweep == SENSOR_SWEEP:
        values, fixed = tuple(args.sensors), args.antennas
    else:
        values, fixed = tuple(args.antennas), args.sensors
    return ExperimentConfig(
        sweep=sweep,
        sweep_values=values,
        fixed_count=fixed,
        trials=args.trials,
        master_seed=args.seed,
        strategies=args.strategies,
        path_loss_exp=args.alpha,
        fc_noise_power=args.fc_noise,
        distance_range=args.dist_range,
        sensor_noise_range=args.sensor_noise_range,
        resample_scenario_per_trial=args.resample_per_trial,
    )


def _emit(result: SweepResult, args) -> None:
    if args.format == "json":
        text = render_json(result)
        if args.output is None:
            sys.stdout.write(text)
        else:
            with open(args.output, "w", newline="\n") as fh:
                fh.write(text)
    else:
        write_csv(result, args.output)
    if args.emit_plot_script:
        emit_plot_script(result, args.emit_plot_script, args.output)


def _cmd_sweep(args, sweep: str) -> int:
    result = run_sweep(_sweep_config(args, sweep))
    _emit(result, args)
    return 0


def _cmd_run(args) -> int:
    config = ScenarioConfig(
        n_sensors=args.sensors,
        n_antennas=args.antennas,
        path_loss_exp=args.alpha,
        fc_noise_power=args.fc_noise,
        distance_range=args.dist_range,
        sensor_noise_range=args.sensor_noise_range,
    )
    stream = RngStream(args.seed, 0)
    scenario = sample_scenario(config, stream.child(0))
    channel = generate_channel(scenario, stream.child(1))
    b = fisher_matrix(channel, scenario)
    print(f"instance: N={args.sensors} M={args.antennas} seed={args.seed}")
    kinds = [s.kind for s in args.strategies]
    if CLOSED_FORM_N2 not in kinds and args.sensors == 2:
        kinds.append(CLOSED_FORM_N2)
    for k, kind in enumerate(kinds):
        report = optimize_phases(b, PhaseStrategy(kind), stream.child(10 + k))
        relax = "" if report.relaxation_value is None \
            else f"  relaxation={report.relaxation_value:.6e}"
        print(
            f"  {kind:>15}: variance={report.achieved_variance:.6e}"
            f"  lower_bound={report.lower_bound:.6e}{relax}"
        )
    return 0


def _cmd_oracle(args) -> int:
    if args.sensors > 4:
        raise PhasefuseError("grid oracle limited to N <= 4")
    print(f"SDP vs. grid oracle, N={args.sensors}, M={args.antennas}, "
          f"{args.instances} instances")
    print(f"{'instance':>8} {'sdp_var':>14} {'grid_var':>14} {'ratio':>8}")
    config = ScenarioConfig(
        n_sensors=args.sensors,
        n_antennas=args.antennas,
        path_loss_exp=args.alpha,
        fc_noise_power=args.fc_noise,
        distance_range=args.dist_range,
        sensor_noise_range=args.sensor_noise_range,
    )
    worst = 0.0
    for k in range(args.instances):
        stream = RngStream(args.seed, k)
        scenario = sample_scenario(config, stream.child(0))
        channel = generate_channel(scenario, stream.child(1))
        b = fisher_matrix(channel, scenario)
        report = optimize_phases(b, PhaseStrategy(SDP_RELAXATION), stream.child(2))
        _, grid_val = grid_search(b)
        grid_var = 1.0 / grid_val
        ratio = report.achieved_variance / grid_var
        worst = max(worst, ratio)
        print(f"{k:>8} {report.achieved_variance:>14.6e} {grid_var:>14.6e} {ratio:>8.5f}")
    print(f"worst variance ratio (sdp/grid): {worst:.5f}")
    return 0


def _cmd_selftest(_args) -> int:
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
        failures += 0 if ok else 1

    # N=2 closed form vs. SDP on the analytic pi/3 instance.
    b = np.array([[1.0, 0.5 * np.exp(1j * np.pi / 3)],
                  [0.5 * np.exp(-1j * np.pi / 3), 1.0]])
    a_cf = optimize_phases_n2(b)
    val_cf = float(np.real(np.vdot(a_cf, b @ a_cf)))
    check("closed-form N=2 value == 3", abs(val_cf - 3.0) <= 1e-12)
    report = optimize_phases(b, PhaseStrategy(SDP_RELAXATION), RngStream(0, 0))
    check("SDP matches closed form", abs(report.achieved_variance - 1.0 / 3.0) <= 1e-6)

    # Dual-formula identity on random instances.
    gen = np.random.default_rng(1)
    ok = True
    for _ in range(20):
        n, m = int(gen.integers(2, 8)), int(gen.integers(1, 8))
        h = gen.standard_normal((m, n)) + 1j * gen.standard_normal((m, n))
        sv = gen.uniform(0.001, 0.01, n)
        s = 0.1
        c = (h * sv) @ h.conj().T + s * np.eye(m)
        direct = h.conj().T @ np.linalg.solve(c, h)
        g = h.conj().T @ h
        wood = g / s - g @ np.linalg.solve(np.diag(1.0 / sv) + g / s, g) / s**2
        ok &= bool(
            np.linalg.norm(direct - wood) <= 1e-10 * max(1.0, np.linalg.norm(direct))
        )
    check("matrix-inversion-lemma identity", ok)

    # Relaxation sandwich on random PSD instances.
    ok = True
    for k in range(10):
        g = gen.standard_normal((4, 4)) + 1j * gen.standard_normal((4, 4))
        b = g @ g.conj().T
        rep = optimize_phases(b, PhaseStrategy(SDP_RELAXATION), RngStream(2, k))
        n_lam = 4 * float(np.max(np.linalg.eigvalsh(b)))
        slack = 1e-8 * max(1.0, n_lam)
        ok &= rep.relaxation_value <= n_lam + slack
        ok &= 1.0 / rep.relaxation_value <= rep.achieved_variance + slack
        ok &= rep.lower_bound <= rep.achieved_variance + 1e-12
    check("relaxation sandwich", ok)

    # Real embedding objective equivalence.
    problem = sdp.SdpProblem(objective=b)
    emb = sdp.embed_real(problem)
    a = np.exp(1j * gen.uniform(0, 2 * np.pi, 4))
    gram = np.outer(a, a.conj())
    diff = emb.objective_value(np.real(gram), np.imag(gram)) - float(
        np.real(np.vdot(a, b @ a))
    )
    check("real embedding objective", abs(diff) <= 1e-9 * max(1.0, abs(diff) + 1))

    print(f"selftest: {failures} failure(s)")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "fig1":
            return _cmd_sweep(args, SENSOR_SWEEP)
        if args.subcommand == "fig2":
            return _cmd_sweep(args, ANTENNA_SWEEP)
        if args.subcommand == "run":
            return _cmd_run(args)
        if args.subcommand == "oracle":
            return _cmd_oracle(args)
        if args.subcommand == "selftest":
            return _cmd_selftest(args)
        parser.error(f"unknown subcommand {args.subcommand!r}")
    except (PhasefuseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
