"""Command-line front door.

Subcommands:
  run       simulate one scenario under either or both engines
  validate  overlay simulated thymic-naive decay on a TREC dataset
  compare   rank-sum comparison of two saved trajectory files
  datasets  print the built-in TREC validation tables

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
When --out is absent the TCELLSIM_OUT environment variable, then ./runs,
is used.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .abm import RNG_ALGORITHM, AbmConfig, run_replicates
from .dataio import (
    DATASET_NAMES,
    dataset_by_name,
    builtin_datasets,
    format_comparison_lines,
    is_placeholder_table,
    load_active_table,
    packaged_actives_path,
    read_trajectory_csv,
    render_plot,
    to_percentage,
    write_comparison_csv,
    write_comparison_text,
    write_manifest,
    write_replicates_csv,
    write_trajectory_csv,
    write_trec_csv,
)
from .errors import DataError, NumericalError
from .model import default_initial_state, scenario_params
from .ode import IntegrationConfig, integrate
from .stats import compare_trajectories
from .trajectory import QUANTITIES, annual_samples, same_grid

OUT_ENV_VAR = "TCELLSIM_OUT"
USAGE_ERROR, DATA_ERROR, NUMERICAL_ERROR = 2, 3, 4


def _add_sim_args(sp, engines=("ode", "abm", "both")):
    sp.add_argument("--scenario", type=int, choices=(1, 2, 3, 4, 5), required=True)
    sp.add_argument("--engine", choices=engines, default="ode")
    sp.add_argument("--dt", type=float, default=0.01, help="step size, years")
    sp.add_argument("--t-end", type=float, default=100.0, help="horizon, years")
    sp.add_argument("--method", choices=("rk4", "euler"), default="rk4",
                    help="deterministic integration scheme")
    sp.add_argument("--replicates", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", type=float, default=1.0, help="agents per cell/mm^3")
    sp.add_argument("--actives", type=Path, default=None,
                    help="activated-cell lookup CSV (default: bundled placeholder)")
    sp.add_argument("--out", type=Path, default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcellsim",
        description="Simulate age-related naive T cell depletion and compare paradigms.",
    )
    parser.add_argument("--version", action="version", version=f"tcellsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario and write trajectory files")
    _add_sim_args(run_p)
    run_p.set_defaults(func=cmd_run)

    val_p = sub.add_parser("validate", help="compare a simulated run against TREC data")
    _add_sim_args(val_p, engines=("ode", "abm"))
    val_p.add_argument("--dataset", choices=DATASET_NAMES + ("both",), default="both")
    val_p.set_defaults(func=cmd_validate)

    cmp_p = sub.add_parser("compare", help="rank-sum comparison of two trajectory files")
    cmp_p.add_argument("trajectory_a", type=Path)
    cmp_p.add_argument("trajectory_b", type=Path)
    cmp_p.add_argument("--scenario", type=int, default=0, help="scenario label for the report")
    cmp_p.add_argument("--out", type=Path, default=None)
    cmp_p.set_defaults(func=cmd_compare)

    ds_p = sub.add_parser("datasets", help="print the built-in TREC tables")
    ds_p.add_argument("--out", type=Path, default=None,
                      help="also write the tables as CSV files")
    ds_p.set_defaults(func=cmd_datasets)

    return parser


def _resolve_out(arg_out: Path | None) -> Path:
    out = arg_out or Path(os.environ.get(OUT_ENV_VAR) or "runs")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_actives(arg_actives: Path | None):
    path = arg_actives if arg_actives is not None else packaged_actives_path()
    return load_active_table(path), path, is_placeholder_table(path)


def _base_manifest(command: str) -> dict:
    return {
        "command": command,
        "version": __version__,
        "timestamp_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


def _annual(traj):
    try:
        return annual_samples(traj)
    except ValueError:
        return traj


def cmd_run(args) -> int:
    scenario = scenario_params(args.scenario)
    actives, actives_path, placeholder = _load_actives(args.actives)
    out = _resolve_out(args.out)

    manifest = _base_manifest("run")
    manifest.update(
        scenario=scenario.id,
        description=scenario.description,
        engine=args.engine,
        dt=args.dt,
        t_end=args.t_end,
        method=args.method,
        replicates=args.replicates,
        base_seed=args.seed,
        scale=args.scale,
        rng=RNG_ALGORITHM,
        actives_path=actives_path,
        actives_placeholder=str(placeholder).lower(),
        out_dir=out,
    )

    ode_traj = None
    abm_set = None
    if args.engine in ("ode", "both"):
        cfg = IntegrationConfig(dt=args.dt, method=args.method, t_end=args.t_end)
        ode_traj = integrate(scenario, default_initial_state(), actives, cfg)
        path = out / f"scenario{scenario.id}_ode.csv"
        write_trajectory_csv(path, ode_traj)
        print(f"wrote {path}")
    if args.engine in ("abm", "both"):
        cfg = AbmConfig(
            dt=args.dt, t_end=args.t_end, replicates=args.replicates,
            base_seed=args.seed, scale=args.scale,
        )
        abm_set = run_replicates(scenario, actives, cfg)
        mean_path = out / f"scenario{scenario.id}_abm_mean.csv"
        write_trajectory_csv(mean_path, abm_set.mean)
        reps_path = out / f"scenario{scenario.id}_abm_replicates.csv"
        write_replicates_csv(reps_path, abm_set.trajectories)
        print(f"wrote {mean_path}")
        print(f"wrote {reps_path}")

    if args.engine == "both":
        a = _annual(ode_traj)
        b = _annual(abm_set.mean)
        if not same_grid(a, b):
            raise DataError("engine outputs have mismatched time grids")
        comparisons = [compare_trajectories(a, b, q) for q in QUANTITIES]
        csv_path = out / f"scenario{scenario.id}_comparison.csv"
        txt_path = out / f"scenario{scenario.id}_comparison.txt"
        write_comparison_csv(csv_path, scenario.id, comparisons)
        write_comparison_text(txt_path, scenario.id, comparisons)
        for line in format_comparison_lines(scenario.id, comparisons):
            print(line)
        print(f"wrote {csv_path}")
        print(f"wrote {txt_path}")
        manifest["comparison_points"] = len(a)

    write_manifest(out / "manifest.txt", manifest)
    return 0


def cmd_validate(args) -> int:
    scenario = scenario_params(args.scenario)
    actives, actives_path, placeholder = _load_actives(args.actives)
    out = _resolve_out(args.out)

    if args.engine == "ode":
        cfg = IntegrationConfig(dt=args.dt, method=args.method, t_end=args.t_end)
        traj = integrate(scenario, default_initial_state(), actives, cfg)
    else:
        cfg = AbmConfig(
            dt=args.dt, t_end=args.t_end, replicates=args.replicates,
            base_seed=args.seed, scale=args.scale,
        )
        traj = run_replicates(scenario, actives, cfg).mean

    # Thymic-naive decay as a percentage of its birth value; TREC marks
    # thymus-origin cells, so this is the comparable model quantity.
    if traj.naive[0] <= 0:
        raise DataError("thymic-naive population starts at zero; nothing to normalize")
    curve = _annual(traj)
    model_pct_curve = 100.0 * curve.naive / traj.naive[0]

    names = DATASET_NAMES if args.dataset == "both" else (args.dataset,)
    manifest = _base_manifest("validate")
    manifest.update(
        scenario=scenario.id,
        engine=args.engine,
        dt=args.dt,
        t_end=args.t_end,
        base_seed=args.seed,
        actives_path=actives_path,
        actives_placeholder=str(placeholder).lower(),
        normalization="percent-of-age-0, per dataset",
        out_dir=out,
    )

    for name in names:
        dataset = dataset_by_name(name)
        ages, data_pct = to_percentage(dataset)
        model_pct = np.interp(ages, traj.times, 100.0 * traj.naive / traj.naive[0])
        residuals = model_pct - data_pct
        rms = float(np.sqrt(np.mean(residuals**2)))

        plot_path = out / f"scenario{scenario.id}_{name}_overlay.svg"
        render_plot(
            [(curve.times, model_pct_curve), (ages, data_pct)],
            [f"simulated thymic-naive, scenario {scenario.id}", f"{name} TREC data"],
            plot_path,
            styles=["line", "points"],
            title=f"Scenario {scenario.id} vs {name} (percent of age-0 value)",
            ylabel="percent of age-0 value",
        )
        res_path = out / f"scenario{scenario.id}_{name}_residuals.csv"
        lines = ["age_years,data_pct,model_pct,residual_pct"]
        for age, d, mdl, r in zip(ages, data_pct, model_pct, residuals):
            lines.append(f"{age!r},{d!r},{mdl!r},{r!r}")
        res_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        fit_path = out / f"scenario{scenario.id}_{name}_fit.txt"
        write_manifest(
            fit_path,
            {
                "dataset": name,
                "scenario": scenario.id,
                "engine": args.engine,
                "n_points": len(ages),
                "rms_residual_pct": repr(rms),
            },
        )
        manifest[f"rms_residual_pct_{name}"] = repr(rms)
        print(f"{name}: rms residual {rms:.2f} percentage points over {len(ages)} age groups")
        print(f"wrote {plot_path}")
        print(f"wrote {res_path}")
        print(f"wrote {fit_path}")

    write_manifest(out / "manifest.txt", manifest)
    return 0


def cmd_compare(args) -> int:
    a = read_trajectory_csv(args.trajectory_a)
    b = read_trajectory_csv(args.trajectory_b)
    a, b = _annual(a), _annual(b)
    if not same_grid(a, b):
        raise DataError(
            f"{args.trajectory_a} and {args.trajectory_b} have mismatched time grids"
        )
    out = _resolve_out(args.out)
    comparisons = [compare_trajectories(a, b, q) for q in QUANTITIES]
    csv_path = out / "comparison.csv"
    txt_path = out / "comparison.txt"
    write_comparison_csv(csv_path, args.scenario, comparisons)
    write_comparison_text(txt_path, args.scenario, comparisons)
    for line in format_comparison_lines(args.scenario, comparisons):
        print(line)
    print(f"wrote {csv_path}")
    print(f"wrote {txt_path}")
    manifest = _base_manifest("compare")
    manifest.update(
        trajectory_a=args.trajectory_a,
        trajectory_b=args.trajectory_b,
        scenario=args.scenario,
        comparison_points=len(a),
        out_dir=out,
    )
    write_manifest(out / "manifest.txt", manifest)
    return 0


def cmd_datasets(args) -> int:
    for dataset in builtin_datasets():
        print(f"# dataset={dataset.name}")
        print(f"# source={dataset.source}")
        print("age_low,age_high,mean_log10_trec_per_1e6_pbmc,n_individuals")
        for row in dataset.rows:
            print(f"{row.age_low:g},{row.age_high:g},{row.mean_log10_trec},{row.n_individuals}")
        print()
        if args.out is not None:
            out = _resolve_out(args.out)
            write_trec_csv(out / f"trec_{dataset.name}.csv", dataset)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
