"""Command-line interface: cycle validation, solves and the mode comparison.

Exit codes: 0 success, 1 assertion/tolerance failure, 2 input error,
3 no feasible trajectory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dp, kernels, sim
from .config import ConfigError, ExperimentConfig
from .cycle import CycleError, compute_stats, load_cycle
from .svgplot import plot_series
from .tables import TableError

__all__ = ["main", "cmd_validate_cycle", "cmd_solve", "cmd_compare"]

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

# Published JN-1015 summary values the bundled trace must reproduce
JN1015_DISTANCE_M = 4165.27
JN1015_DURATION_S = 660.0
JN1015_MAX_SPEED = 19.44


def _p(msg: str) -> None:
    print(msg)


def cmd_validate_cycle(path: str) -> int:
    """Load a cycle, print its statistics, check JN-1015 tolerances by name."""
    try:
        cycle = load_cycle(path)
    except CycleError as exc:
        _p(f"error: {exc}")
        return EXIT_INPUT
    stats = compute_stats(cycle)
    _p(f"cycle: {cycle.name}")
    _p(f"samples: {cycle.n_samples} @ {cycle.dt!r} s")
    _p(f"duration_s: {stats.duration!r}")
    _p(f"distance_m: {stats.distance!r}")
    _p(f"max_speed_mps: {stats.max_speed!r}")
    _p(f"mean_speed_overall_mps: {stats.mean_speed_overall!r}")
    _p(f"mean_speed_moving_mps: {stats.mean_speed_moving!r}")
    _p(f"mean_accel_mps2: {stats.mean_accel!r}")

    name = cycle.name.lower().replace("-", "").replace("_", "")
    if "jn1015" in name or "1015" in name:
        failures = []
        if abs(stats.distance - JN1015_DISTANCE_M) > 0.01 * JN1015_DISTANCE_M:
            failures.append(f"distance {stats.distance:.2f} m not within 1% of {JN1015_DISTANCE_M}")
        if stats.duration != JN1015_DURATION_S:
            failures.append(f"duration {stats.duration} s != {JN1015_DURATION_S}")
        if abs(stats.max_speed - JN1015_MAX_SPEED) > 0.1:
            failures.append(f"max speed {stats.max_speed:.3f} not within 0.1 of {JN1015_MAX_SPEED}")
        if failures:
            for f in failures:
                _p(f"FAIL: {f}")
            return EXIT_TOLERANCE
        _p("JN-1015 tolerances: ok")
    return EXIT_OK


def _load_experiment(config_path: str | None):
    if config_path is None:
        cfg = ExperimentConfig.defaults()
    else:
        cfg = ExperimentConfig.from_file(config_path)
    cycle = load_cycle(cfg.cycle_path())
    return cfg, cycle, cfg.build_models(), cfg.build_solver_config()


def _parse_stage_list(raw: str):
    return [int(tok) for tok in raw.split(",") if tok.strip()] if raw.strip() else []


def _run_mode(mode: str, cycle, models, solver_cfg, dump_stages=()):
    if dump_stages:
        import dataclasses
        solver_cfg = dataclasses.replace(solver_cfg, keep_values=True)
    if mode == dp.MODE_TWO_STATE:
        solution = dp.solve(cycle, models, solver_cfg)
    else:
        solution = dp.solve_soc_only(cycle, models, solver_cfg)
    if not solution.feasible:
        return solution, None
    trace = sim.forward_simulate(solution, cycle, models)
    return solution, trace


def _summary_lines(mode: str, cfg: ExperimentConfig, solution, trace, post_theta):
    lines = [
        f"mode = {mode}",
        f"kernel_backend = {kernels.BACKEND}",
        f"j_initial_kg = {solution.j_initial!r}",
        f"fuel_kg = {trace.total_fuel!r}",
        f"fuel_l_per_100km = {sim.fuel_per_100km(trace, cfg.fuel_density)!r}",
        f"distance_m = {trace.distance!r}",
        f"final_soc = {float(trace.soc[-1])!r}",
        f"final_theta_c = {float(trace.theta[-1])!r}",
        f"max_theta_c = {float(np.max(trace.theta))!r}",
        f"min_theta_c = {float(np.min(trace.theta))!r}",
    ]
    if post_theta is not None:
        lines += [
            f"posthoc_max_theta_c = {float(np.max(post_theta))!r}",
            f"posthoc_final_theta_c = {float(post_theta[-1])!r}",
        ]
        if float(np.max(post_theta)) > cfg["theta.high"]:
            lines.append(
                f"warning = post-hoc temperature exceeds theta.high "
                f"({float(np.max(post_theta))!r} > {cfg['theta.high']!r} C)"
            )
    return lines


def _write_artifacts(out: Path, mode: str, cfg: ExperimentConfig, solution, trace, plots: bool):
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.cfg").write_text(cfg.manifest_text(), encoding="utf-8")
    sim.write_trace_csv(trace, out / "trace.csv")
    for stage in _parse_stage_list(str(cfg["dp.dump_value_stages"])):
        dp.dump_value_csv(out / f"values_stage_{stage:04d}.csv", solution, stage)
    post_theta = None
    if mode == dp.MODE_SOC_ONLY:
        models = cfg.build_models()
        post_theta = sim.post_hoc_thermal(trace, models.thermal, elec=models.electrical)
        rows = ["t_s,theta_C"]
        rows += [f"{float(t)!r},{float(th)!r}" for t, th in zip(trace.t, post_theta)]
        (out / "posthoc_theta.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    lines = _summary_lines(mode, cfg, solution, trace, post_theta)
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if plots:
        t = trace.t
        plot_series(out / "soc.svg", f"SOC trajectory ({mode})", "time [s]", "SOC",
                    t, [("soc", trace.soc)],
                    hlines=(cfg["soc.final_min"], cfg["soc.final_max"]))
        theta_series = [("theta", trace.theta)]
        if post_theta is not None:
            theta_series.append(("post-hoc replay", post_theta))
        plot_series(out / "theta.svg", f"Cell temperature ({mode})", "time [s]", "theta [C]",
                    t, theta_series, hlines=(cfg["theta.low"], cfg["theta.high"]))
        plot_series(out / "control.svg", f"Torque-split ratio ({mode})", "time [s]", "u",
                    t, [("u", trace.u)])
    return post_theta, lines


def cmd_solve(config_path: str | None, mode: str, out_dir: str, plots: bool = False) -> int:
    try:
        cfg, cycle, models, solver_cfg = _load_experiment(config_path)
    except (ConfigError, CycleError, TableError, OSError) as exc:
        _p(f"error: {exc}")
        return EXIT_INPUT
    dump_stages = _parse_stage_list(str(cfg["dp.dump_value_stages"]))
    try:
        solution, trace = _run_mode(mode, cycle, models, solver_cfg, dump_stages)
    except sim.RolloutError as exc:
        _p(f"no feasible trajectory: rollout fault at {exc}")
        return EXIT_INFEASIBLE
    if trace is None:
        _p(f"no feasible trajectory: J0(initial) hit the big value in mode {mode}")
        return EXIT_INFEASIBLE
    _, lines = _write_artifacts(Path(out_dir), mode, cfg, solution, trace, plots)
    for line in lines:
        _p(line)
    return EXIT_OK


def cmd_compare(config_path: str | None, out_dir: str, plots: bool = False) -> int:
    try:
        cfg, cycle, models, solver_cfg = _load_experiment(config_path)
    except (ConfigError, CycleError, TableError, OSError) as exc:
        _p(f"error: {exc}")
        return EXIT_INPUT
    out = Path(out_dir)
    results = {}
    for mode, sub in ((dp.MODE_SOC_ONLY, "soc_only"), (dp.MODE_TWO_STATE, "two_state")):
        try:
            solution, trace = _run_mode(mode, cycle, models, solver_cfg)
        except sim.RolloutError as exc:
            _p(f"no feasible trajectory in mode {mode}: rollout fault at {exc}")
            return EXIT_INFEASIBLE
        if trace is None:
            _p(f"no feasible trajectory in mode {mode}")
            return EXIT_INFEASIBLE
        post_theta, _ = _write_artifacts(out / sub, mode, cfg, solution, trace, plots)
        results[mode] = (solution, trace, post_theta)

    base_sol, base_trace, base_post = results[dp.MODE_SOC_ONLY]
    two_sol, two_trace, _ = results[dp.MODE_TWO_STATE]
    fuel_base = sim.fuel_per_100km(base_trace, cfg.fuel_density)
    fuel_two = sim.fuel_per_100km(two_trace, cfg.fuel_density)
    lines = [
        "metric, soc_only, two_state",
        f"fuel_l_per_100km, {fuel_base!r}, {fuel_two!r}",
        f"fuel_kg, {base_trace.total_fuel!r}, {two_trace.total_fuel!r}",
        f"j_initial_kg, {base_sol.j_initial!r}, {two_sol.j_initial!r}",
        f"final_soc, {float(base_trace.soc[-1])!r}, {float(two_trace.soc[-1])!r}",
        f"soc_min, {float(np.min(base_trace.soc))!r}, {float(np.min(two_trace.soc))!r}",
        f"soc_max, {float(np.max(base_trace.soc))!r}, {float(np.max(two_trace.soc))!r}",
        f"theta_max_c, {float(np.max(base_post))!r}, {float(np.max(two_trace.theta))!r}",
        f"theta_final_c, {float(base_post[-1])!r}, {float(two_trace.theta[-1])!r}",
        f"fuel_delta_l_per_100km, {fuel_two - fuel_base!r},",
    ]
    (out / "comparison.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines:
        _p(line)
    if fuel_two < fuel_base:
        _p("FAIL: two-state fuel is lower than the soc-only baseline")
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hevopt",
        description="Offline DP energy management for a parallel HEV "
                    "with a battery electro-thermal model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate-cycle", help="check a cycle CSV and print statistics")
    p_val.add_argument("path")

    p_solve = sub.add_parser("solve", help="solve one mode and write artifacts")
    p_solve.add_argument("--config", default=None, help="config file (defaults when omitted)")
    p_solve.add_argument("--mode", choices=[dp.MODE_SOC_ONLY, dp.MODE_TWO_STATE], required=True)
    p_solve.add_argument("--out", default="out", help="output directory")
    p_solve.add_argument("--plots", action="store_true", help="emit SVG plots")

    p_cmp = sub.add_parser("compare", help="run both modes and write a comparison report")
    p_cmp.add_argument("--config", default=None)
    p_cmp.add_argument("--out", default="out")
    p_cmp.add_argument("--plots", action="store_true")

    args = parser.parse_args(argv)
    if args.command == "validate-cycle":
        return cmd_validate_cycle(args.path)
    if args.command == "solve":
        return cmd_solve(args.config, args.mode, args.out, args.plots)
    return cmd_compare(args.config, args.out, args.plots)


if __name__ == "__main__":
    sys.exit(main())
