"""Finite-horizon dynamic programming over the discretized battery state.

The two-state problem discretizes (SOC, cell temperature) on a uniform
grid, prices infeasible transitions with a large finite value M, and runs
a backward sweep with bilinear cost-to-go interpolation.  The SOC-only
baseline is the same machinery with the thermal dimension removed and the
cell temperature held at its initial value for electrical evaluation.

The per-stage sweep is delegated to hevopt.kernels (compiled extension
when available, numpy fallback otherwise); this module owns everything
around it: grid construction, the per-stage control tables, the reference
(scalar) transition used by the brute-force oracle, and policy/value
bookkeeping.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .battery import BatteryState, InfeasiblePowerError, battery_current
from .cycle import DriveCycle
from .models import PowertrainModels
from .vehicle import (
    StageDemand,
    fuel_rate,
    motor_electrical_power,
    split_torque,
    wheel_demand,
)

__all__ = [
    "SolverConfig",
    "dump_value_csv",
    "StateGrid",
    "ControlGrid",
    "TerminalWindow",
    "DPSolution",
    "BruteForceResult",
    "TransitionResult",
    "StageTables",
    "build_grids",
    "terminal_cost",
    "build_stage_tables",
    "stage_transition",
    "backward_step",
    "solve",
    "solve_soc_only",
    "brute_force_solve",
]

MODE_TWO_STATE = "two-state"
MODE_SOC_ONLY = "soc-only"


@dataclass(frozen=True)
class SolverConfig:
    """State/control boxes, terminal windows and solver resolutions."""

    soc_low: float = 0.4
    soc_high: float = 0.7
    soc_initial: float = 0.5
    soc_final_min: float = 0.54
    soc_final_max: float = 0.55
    theta_low: float = 10.0
    theta_high: float = 30.0
    theta_initial: float = 20.0
    theta_final_min: float = 15.0
    theta_final_max: float = 25.0
    soc_points: int = 201
    theta_points: int = 101
    u_points: int = 51
    u_min: float = -3.0
    u_max: float = 1.0
    big_value: float = 1e9
    boundary_penalty: float = 0.05
    snap_transitions: bool = False
    keep_values: bool = False

    def __post_init__(self):
        if not (0.0 <= self.soc_low < self.soc_high <= 1.0):
            raise ValueError("need 0 <= soc_low < soc_high <= 1")
        if self.theta_low >= self.theta_high:
            raise ValueError("need theta_low < theta_high")
        if self.soc_points < 2 or self.theta_points < 2 or self.u_points < 2:
            raise ValueError("grid resolutions must be >= 2")
        if not (self.soc_low <= self.soc_initial <= self.soc_high):
            raise ValueError("initial SOC outside its bounds")
        if not (self.theta_low <= self.theta_initial <= self.theta_high):
            raise ValueError("initial temperature outside its bounds")
        if not (self.soc_low <= self.soc_final_min <= self.soc_final_max <= self.soc_high):
            raise ValueError("SOC terminal window must lie inside the SOC bounds")
        if not (self.theta_low <= self.theta_final_min <= self.theta_final_max <= self.theta_high):
            raise ValueError("temperature terminal window must lie inside the bounds")
        if self.big_value <= 0 or not math.isfinite(self.big_value):
            raise ValueError("big value must be positive and finite")
        if not 0 < self.boundary_penalty < self.big_value:
            raise ValueError("boundary penalty must be positive and below the big value")

    @property
    def terminal_window(self) -> "TerminalWindow":
        return TerminalWindow(
            soc_min=self.soc_final_min,
            soc_max=self.soc_final_max,
            theta_min=self.theta_final_min,
            theta_max=self.theta_final_max,
        )

    @property
    def initial_state(self) -> BatteryState:
        return BatteryState(soc=self.soc_initial, theta=self.theta_initial)


@dataclass(frozen=True)
class StateGrid:
    """Uniform state axes; theta_axis is None in SOC-only mode."""

    soc_axis: np.ndarray
    theta_axis: np.ndarray | None

    def __post_init__(self):
        self.soc_axis.setflags(write=False)
        if self.theta_axis is not None:
            self.theta_axis.setflags(write=False)

    @property
    def n_soc(self) -> int:
        return int(self.soc_axis.size)

    @property
    def n_theta(self) -> int:
        return 1 if self.theta_axis is None else int(self.theta_axis.size)

    @property
    def two_state(self) -> bool:
        return self.theta_axis is not None


@dataclass(frozen=True)
class ControlGrid:
    """Ascending torque-split ratios; must contain u = 0 and u = 1 exactly."""

    u_values: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u_values, dtype=float)
        if u.ndim != 1 or u.size < 2 or np.any(np.diff(u) <= 0):
            raise ValueError("control grid must be ascending with >= 2 points")
        if not (np.any(u == 0.0) and np.any(u == 1.0)):
            raise ValueError("control grid must contain u = 0 and u = 1 exactly")
        u.setflags(write=False)
        object.__setattr__(self, "u_values", u)

    @property
    def n_u(self) -> int:
        return int(self.u_values.size)


@dataclass(frozen=True)
class TerminalWindow:
    soc_min: float
    soc_max: float
    theta_min: float
    theta_max: float


def _uniform_axis(lo: float, hi: float, n: int) -> np.ndarray:
    axis = np.linspace(lo, hi, n)
    axis[0] = lo
    axis[-1] = hi
    return axis


def build_grids(cfg: SolverConfig, mode: str = MODE_TWO_STATE) -> tuple[StateGrid, ControlGrid]:
    """Uniform grids with exact endpoints; snaps near-0/near-1 controls exact."""
    if mode not in (MODE_TWO_STATE, MODE_SOC_ONLY):
        raise ValueError(f"unknown mode {mode!r}")
    soc_axis = _uniform_axis(cfg.soc_low, cfg.soc_high, cfg.soc_points)
    theta_axis = (
        _uniform_axis(cfg.theta_low, cfg.theta_high, cfg.theta_points)
        if mode == MODE_TWO_STATE
        else None
    )
    u = _uniform_axis(cfg.u_min, cfg.u_max, cfg.u_points)
    # linspace may miss 0/1 by up to half a step; the grid contract wants them exact
    half_step = 0.5 * (cfg.u_max - cfg.u_min) / (cfg.u_points - 1)
    for target in (0.0, 1.0):
        i = int(np.argmin(np.abs(u - target)))
        if abs(u[i] - target) <= half_step * 1.000001 and cfg.u_min <= target <= cfg.u_max:
            u[i] = target
    return StateGrid(soc_axis=soc_axis, theta_axis=theta_axis), ControlGrid(u_values=u)


def terminal_cost(grid: StateGrid, window: TerminalWindow, big_value: float) -> np.ndarray:
    """Stage-N slice: 0 inside the terminal window (all coordinates), else M."""
    soc_ok = (grid.soc_axis >= window.soc_min) & (grid.soc_axis <= window.soc_max)
    if not grid.two_state:
        return np.where(soc_ok, 0.0, big_value)
    theta_ok = (grid.theta_axis >= window.theta_min) & (grid.theta_axis <= window.theta_max)
    return np.where(soc_ok[:, None] & theta_ok[None, :], 0.0, big_value)


@dataclass(frozen=True)
class StageTables:
    """State-independent per-(stage, control) quantities.

    The split, the machine maps and therefore the stage fuel and battery
    electrical power depend only on (k, u); only the battery state response
    depends on (SOC, theta).  Shapes: (n_stages, n_u).
    """

    pm: np.ndarray
    fuel: np.ndarray
    ok: np.ndarray  # uint8
    dt: float

    @property
    def n_stages(self) -> int:
        return int(self.pm.shape[0])


def build_stage_tables(
    cycle: DriveCycle, models: PowertrainModels, controls: ControlGrid
) -> StageTables:
    n = cycle.n_stages
    nu = controls.n_u
    pm = np.zeros((n, nu))
    fuel = np.zeros((n, nu))
    ok = np.zeros((n, nu), dtype=np.uint8)
    dt = cycle.dt
    for k in range(n):
        demand = wheel_demand(models.vehicle, cycle, k)
        for iu, u in enumerate(controls.u_values):
            split = split_torque(demand, float(u), models.motor, models.engine)
            if not split.feasible:
                continue
            pm[k, iu] = motor_electrical_power(models.motor, demand.shaft_speed, split.t_m)
            fuel[k, iu] = fuel_rate(models.engine, demand.shaft_speed, split.t_e) * dt
            ok[k, iu] = 1
    return StageTables(pm=pm, fuel=fuel, ok=ok, dt=dt)


@dataclass(frozen=True)
class TransitionResult:
    next_state: BatteryState | None
    fuel: float
    feasible: bool


def _transition_from_power(
    models: PowertrainModels,
    cfg: SolverConfig,
    grid: StateGrid,
    state: BatteryState,
    p_m: float,
    dt: float,
) -> BatteryState | None:
    """Battery response to an electrical load; None when infeasible.

    Scalar reference for the kernel inner loop: expression order matches
    kernels/reference.py bit for bit.
    """
    elec = models.electrical
    try:
        i_b = battery_current(elec, state.soc, p_m)
    except InfeasiblePowerError:
        return None
    soc2 = state.soc + dt * (-i_b / elec.capacity)
    if soc2 < cfg.soc_low or soc2 > cfg.soc_high:
        return None
    if grid.two_state:
        thermal = models.thermal
        coeffs = models.cooling
        r_cell = float(elec.cell_resistance(state.soc))
        q_g = r_cell * i_b * i_b
        q_d = -coeffs.alpha2 * (state.theta - thermal.inlet_temp_1) - coeffs.alpha3 * (
            state.theta - thermal.inlet_temp_2
        )
        th2 = state.theta + dt * ((q_g - q_d) / (thermal.cell_mass * thermal.specific_heat))
        if th2 < cfg.theta_low or th2 > cfg.theta_high:
            return None
    else:
        th2 = state.theta
    if cfg.snap_transitions:
        soc2 = kernels.snap_to_axis(soc2, grid.soc_axis)
        if grid.two_state:
            th2 = kernels.snap_to_axis(th2, grid.theta_axis)
    return BatteryState(soc=soc2, theta=th2)


def stage_transition(
    state: BatteryState,
    u: float,
    demand: StageDemand,
    models: PowertrainModels,
    cfg: SolverConfig,
    grid: StateGrid,
    dt: float,
) -> TransitionResult:
    """Full stage map x_{k+1} = f_k(x_k, u): split -> machines -> battery.

    Infeasibility (torque limits, power envelope, state-box exit) is a
    flagged result, never an exception.
    """
    split = split_torque(demand, u, models.motor, models.engine)
    if not split.feasible:
        return TransitionResult(None, 0.0, False)
    p_m = motor_electrical_power(models.motor, demand.shaft_speed, split.t_m)
    fuel = fuel_rate(models.engine, demand.shaft_speed, split.t_e) * dt
    nxt = _transition_from_power(models, cfg, grid, state, p_m, dt)
    if nxt is None:
        return TransitionResult(None, fuel, False)
    return TransitionResult(nxt, fuel, True)


def _node_tables(models: PowertrainModels, soc_axis: np.ndarray):
    elec = models.electrical
    voc = elec.series_cells * elec.ocv_curve(soc_axis)
    r_cell = np.asarray(elec.cell_resistance(soc_axis), dtype=float)
    if r_cell.ndim == 0:
        r_cell = np.full(soc_axis.size, float(r_cell))
    rb = elec.series_cells * r_cell
    return (
        np.ascontiguousarray(voc, dtype=float),
        np.ascontiguousarray(rb, dtype=float),
        np.ascontiguousarray(r_cell, dtype=float),
    )


def backward_step(
    j_next: np.ndarray,
    k: int,
    tables: StageTables,
    grid: StateGrid,
    models: PowertrainModels,
    cfg: SolverConfig,
):
    """One Bellman stage k given the k+1 slice; returns (j_k, policy_k)."""
    voc, rb, r_cell = _node_tables(models, grid.soc_axis)
    thermal = models.thermal
    coeffs = models.cooling
    pm_k = np.ascontiguousarray(tables.pm[k])
    fuel_k = np.ascontiguousarray(tables.fuel[k])
    ok_k = np.ascontiguousarray(tables.ok[k])
    if grid.two_state:
        return kernels.sweep_stage_two_state(
            np.ascontiguousarray(j_next, dtype=float),
            grid.soc_axis,
            grid.theta_axis,
            voc,
            rb,
            r_cell,
            pm_k,
            fuel_k,
            ok_k,
            tables.dt,
            models.electrical.capacity,
            thermal.cell_mass * thermal.specific_heat,
            coeffs.alpha2,
            coeffs.alpha3,
            thermal.inlet_temp_1,
            thermal.inlet_temp_2,
            cfg.soc_low,
            cfg.soc_high,
            cfg.theta_low,
            cfg.theta_high,
            cfg.big_value,
            cfg.boundary_penalty,
            cfg.snap_transitions,
        )
    return kernels.sweep_stage_soc_only(
        np.ascontiguousarray(j_next, dtype=float),
        grid.soc_axis,
        voc,
        rb,
        pm_k,
        fuel_k,
        ok_k,
        tables.dt,
        models.electrical.capacity,
        cfg.soc_low,
        cfg.soc_high,
        cfg.big_value,
        cfg.boundary_penalty,
        cfg.snap_transitions,
    )


@dataclass
class DPSolution:
    """Backward-sweep output: terminal-anchored cost-to-go and grid policy."""

    mode: str
    grid: StateGrid
    controls: ControlGrid
    cfg: SolverConfig
    policy: np.ndarray          # (N, ns, nt) int16 or (N, ns); -1 = dead node
    j0_slice: np.ndarray        # stage-0 cost-to-go over the grid
    j_initial: float            # interpolated at the initial state
    feasible: bool
    values: list | None = None  # all N+1 slices when cfg.keep_values

    def value_at(self, state: BatteryState, stage: int = 0) -> float:
        if self.values is None and stage != 0:
            raise ValueError("per-stage values not retained (set keep_values)")
        j = self.j0_slice if stage == 0 else self.values[stage]
        if self.mode == MODE_TWO_STATE:
            return kernels.interp_value_2d(
                self.grid.soc_axis, self.grid.theta_axis, j,
                state.soc, state.theta, self.cfg.big_value, self.cfg.boundary_penalty,
            )
        return kernels.interp_value_1d(
            self.grid.soc_axis, j[:, 0] if j.ndim == 2 else j,
            state.soc, self.cfg.big_value, self.cfg.boundary_penalty,
        )


def _solve_common(cycle: DriveCycle, models: PowertrainModels, cfg: SolverConfig, mode: str) -> DPSolution:
    grid, controls = build_grids(cfg, mode)
    tables = build_stage_tables(cycle, models, controls)
    voc, rb, r_cell = _node_tables(models, grid.soc_axis)
    thermal = models.thermal
    coeffs = models.cooling
    n = cycle.n_stages
    dt = cycle.dt
    big = cfg.big_value

    j = np.ascontiguousarray(terminal_cost(grid, cfg.terminal_window, big), dtype=float)
    values = [None] * (n + 1) if cfg.keep_values else None
    if values is not None:
        values[n] = j.copy()

    if mode == MODE_TWO_STATE:
        policy = np.empty((n, grid.n_soc, grid.n_theta), dtype=np.int16)
    else:
        policy = np.empty((n, grid.n_soc), dtype=np.int16)

    for k in range(n - 1, -1, -1):
        pm_k = np.ascontiguousarray(tables.pm[k])
        fuel_k = np.ascontiguousarray(tables.fuel[k])
        ok_k = np.ascontiguousarray(tables.ok[k])
        if mode == MODE_TWO_STATE:
            j, pol = kernels.sweep_stage_two_state(
                j, grid.soc_axis, grid.theta_axis, voc, rb, r_cell,
                pm_k, fuel_k, ok_k,
                dt, models.electrical.capacity,
                thermal.cell_mass * thermal.specific_heat,
                coeffs.alpha2, coeffs.alpha3,
                thermal.inlet_temp_1, thermal.inlet_temp_2,
                cfg.soc_low, cfg.soc_high, cfg.theta_low, cfg.theta_high,
                big, cfg.boundary_penalty, cfg.snap_transitions,
            )
        else:
            j, pol = kernels.sweep_stage_soc_only(
                j, grid.soc_axis, voc, rb,
                pm_k, fuel_k, ok_k,
                dt, models.electrical.capacity,
                cfg.soc_low, cfg.soc_high,
                big, cfg.boundary_penalty, cfg.snap_transitions,
            )
        j = np.ascontiguousarray(j)
        policy[k] = pol
        if values is not None:
            values[k] = j.copy()

    x0 = cfg.initial_state
    if not (cfg.soc_low <= x0.soc <= cfg.soc_high):
        raise ValueError("initial SOC outside the state box")
    if mode == MODE_TWO_STATE:
        if not (cfg.theta_low <= x0.theta <= cfg.theta_high):
            raise ValueError("initial temperature outside the state box")
        j_init = kernels.interp_value_2d(
            grid.soc_axis, grid.theta_axis, j, x0.soc, x0.theta, big, cfg.boundary_penalty
        )
    else:
        j_init = kernels.interp_value_1d(grid.soc_axis, j, x0.soc, big, cfg.boundary_penalty)

    return DPSolution(
        mode=mode,
        grid=grid,
        controls=controls,
        cfg=cfg,
        policy=policy,
        j0_slice=j,
        j_initial=float(j_init),
        feasible=bool(j_init < big),
        values=values,
    )


def solve(cycle: DriveCycle, models: PowertrainModels, cfg: SolverConfig) -> DPSolution:
    """Two-state (SOC, theta) backward DP over the full horizon."""
    return _solve_common(cycle, models, cfg, MODE_TWO_STATE)


def solve_soc_only(cycle: DriveCycle, models: PowertrainModels, cfg: SolverConfig) -> DPSolution:
    """SOC-only baseline: thermal dimension removed, theta held at its initial value."""
    return _solve_common(cycle, models, cfg, MODE_SOC_ONLY)


def dump_value_csv(path, solution: DPSolution, stage: int) -> None:
    """Write one stage's cost-to-go and optimal control as `soc,theta,J,u_opt`.

    Needs per-stage value retention (solve with keep_values).  Dead nodes
    carry the big value and an empty control field.  In SOC-only mode the
    theta column holds the (constant) initial temperature.
    """
    if solution.values is None:
        raise ValueError("per-stage values not retained (set keep_values)")
    n = len(solution.values) - 1
    if not 0 <= stage <= n:
        raise ValueError(f"stage {stage} outside [0, {n}]")
    grid = solution.grid
    j = solution.values[stage]
    pol = solution.policy[stage] if stage < n else None
    u_values = solution.controls.u_values
    rows = ["soc,theta,J,u_opt"]
    theta_axis = grid.theta_axis if grid.two_state else [solution.cfg.theta_initial]
    for i in range(grid.n_soc):
        for k, theta in enumerate(theta_axis):
            jv = j[i, k] if grid.two_state else j[i]
            iu = -1
            if pol is not None:
                iu = pol[i, k] if grid.two_state else pol[i]
            u_txt = repr(float(u_values[iu])) if iu >= 0 else ""
            rows.append(f"{float(grid.soc_axis[i])!r},{float(theta)!r},{float(jv)!r},{u_txt}")
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class BruteForceResult:
    feasible: bool
    cost: float | None
    controls: np.ndarray | None  # control indices, length N


def brute_force_solve(
    cycle: DriveCycle,
    models: PowertrainModels,
    cfg: SolverConfig,
    mode: str = MODE_TWO_STATE,
    max_sequences: int = 10_000_000,
) -> BruteForceResult:
    """Exhaustive-enumeration oracle over control index sequences.

    Uses the same stage_transition (and grid snapping) as the DP sweep and
    accumulates per-stage fuel in fold-right order so float summation
    matches the Bellman recursion exactly.
    """
    grid, controls = build_grids(cfg, mode)
    n = cycle.n_stages
    nu = controls.n_u
    n_sequences = nu**n
    if n_sequences > max_sequences:
        raise ValueError(f"{n_sequences} control sequences exceed the {max_sequences} guard")

    demands = [wheel_demand(models.vehicle, cycle, k) for k in range(n)]
    window = cfg.terminal_window
    x0 = cfg.initial_state
    dt = cycle.dt

    best_cost = None
    best_seq = None
    fuels = [0.0] * n
    for seq in itertools.product(range(nu), repeat=n):
        state = x0
        ok = True
        for k in range(n):
            res = stage_transition(
                state, float(controls.u_values[seq[k]]), demands[k], models, cfg, grid, dt
            )
            if not res.feasible:
                ok = False
                break
            fuels[k] = res.fuel
            state = res.next_state
        if not ok:
            continue
        if not (window.soc_min <= state.soc <= window.soc_max):
            continue
        if mode == MODE_TWO_STATE and not (
            window.theta_min <= state.theta <= window.theta_max
        ):
            continue
        cost = 0.0
        for k in range(n - 1, -1, -1):  # fold-right: match DP's addition order
            cost = fuels[k] + cost
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_seq = np.asarray(seq, dtype=np.int16)
    if best_cost is None:
        return BruteForceResult(feasible=False, cost=None, controls=None)
    return BruteForceResult(feasible=True, cost=best_cost, controls=best_seq)
