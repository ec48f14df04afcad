"""Forward simulation of an extracted policy and post-hoc thermal replay.

The rollout integrates the continuous (non-snapped, unless the solver was
configured to snap) state under the gridded policy: at every stage the
split ratio is read by bilinear interpolation of the surrounding nodes'
stored controls, falling back to the nearest live node when a positive-
weight corner is dead.  The trace records every electrical/mechanical
quantity needed by the reports and the physics checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .battery import (
    BatteryState,
    InfeasiblePowerError,
    battery_current,
    cooling_coefficients,
    terminal_voltage,
    theta_rate,
)
from .cycle import DriveCycle
from .dp import MODE_TWO_STATE, DPSolution, _transition_from_power
from .models import PowertrainModels
from .vehicle import fuel_rate, motor_electrical_power, split_torque, wheel_demand

__all__ = [
    "Trace",
    "RolloutError",
    "forward_simulate",
    "fuel_per_100km",
    "post_hoc_thermal",
    "write_trace_csv",
    "read_trace_csv",
    "TRACE_HEADER",
]

TRACE_HEADER = "t_s,v_mps,Tw_Nm,u,Tm_Nm,Te_Nm,brake_Nm,Pm_W,Ib_A,Vo_V,soc,theta_C,mf_kgps,fuel_kg"


class RolloutError(RuntimeError):
    """Rollout left the certified tube (grid too coarse for this instance)."""

    def __init__(self, stage: int, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


@dataclass
class Trace:
    """Per-stage rollout record plus a terminal-state row (arrays of length N+1).

    Control/effort columns are zero on the terminal row; torque columns are
    shaft-referred so T_m + T_e + brake = T_w holds row-wise.
    """

    dt: float
    t: np.ndarray
    v: np.ndarray
    tw: np.ndarray
    u: np.ndarray
    tm: np.ndarray
    te: np.ndarray
    brake: np.ndarray
    pm: np.ndarray
    ib: np.ndarray
    vo: np.ndarray
    soc: np.ndarray
    theta: np.ndarray
    mf: np.ndarray
    fuel_cum: np.ndarray

    @property
    def n_stages(self) -> int:
        return int(self.t.size - 1)

    @property
    def total_fuel(self) -> float:
        return float(self.fuel_cum[-1])

    @property
    def distance(self) -> float:
        return float(np.sum(self.v[:-1]) * self.dt)


def _policy_u_two_state(solution: DPSolution, k: int, soc: float, theta: float) -> float:
    grid = solution.grid
    pol = solution.policy[k]
    u_values = solution.controls.u_values
    sa, ta = grid.soc_axis, grid.theta_axis
    i = int(np.clip(np.searchsorted(sa, soc, side="right") - 1, 0, sa.size - 2))
    j = int(np.clip(np.searchsorted(ta, theta, side="right") - 1, 0, ta.size - 2))
    tx = (soc - sa[i]) / (sa[i + 1] - sa[i])
    ty = (theta - ta[j]) / (ta[j + 1] - ta[j])
    w = (
        ((1.0 - tx) * (1.0 - ty), i, j),
        (tx * (1.0 - ty), i + 1, j),
        ((1.0 - tx) * ty, i, j + 1),
        (tx * ty, i + 1, j + 1),
    )
    if any(wt > 0.0 and pol[ci, cj] < 0 for wt, ci, cj in w):
        return _nearest_live_u_2d(pol, u_values, i, j)
    u = 0.0
    for wt, ci, cj in w:
        idx = pol[ci, cj]
        u += wt * (u_values[idx] if idx >= 0 else 0.0)
    # interpolation can overshoot the hull by an ulp
    return float(min(max(u, u_values[0]), u_values[-1]))


def _policy_u_soc_only(solution: DPSolution, k: int, soc: float) -> float:
    pol = solution.policy[k]
    u_values = solution.controls.u_values
    sa = solution.grid.soc_axis
    i = int(np.clip(np.searchsorted(sa, soc, side="right") - 1, 0, sa.size - 2))
    tx = (soc - sa[i]) / (sa[i + 1] - sa[i])
    w = ((1.0 - tx, i), (tx, i + 1))
    if any(wt > 0.0 and pol[ci] < 0 for wt, ci in w):
        live = np.flatnonzero(pol >= 0)
        if live.size == 0:
            raise LookupError("no live policy node at this stage")
        nearest = live[np.argmin(np.abs(live - i))]
        return float(u_values[pol[nearest]])
    u = 0.0
    for wt, ci in w:
        idx = pol[ci]
        u += wt * (u_values[idx] if idx >= 0 else 0.0)
    return float(min(max(u, u_values[0]), u_values[-1]))


def _nearest_live_u_2d(pol: np.ndarray, u_values: np.ndarray, i: int, j: int) -> float:
    live = np.argwhere(pol >= 0)
    if live.size == 0:
        raise LookupError("no live policy node at this stage")
    d2 = (live[:, 0] - i) ** 2 + (live[:, 1] - j) ** 2
    order = np.lexsort((live[:, 1], live[:, 0], d2))
    ci, cj = live[order[0]]
    return float(u_values[pol[ci, cj]])


def forward_simulate(
    solution: DPSolution,
    cycle: DriveCycle,
    models: PowertrainModels,
    x0: BatteryState | None = None,
) -> Trace:
    """Roll the policy forward from x0; raises RolloutError on infeasibility."""
    cfg = solution.cfg
    if x0 is None:
        x0 = cfg.initial_state
    if not (cfg.soc_low <= x0.soc <= cfg.soc_high):
        raise ValueError("initial SOC outside the state box")
    two_state = solution.mode == MODE_TWO_STATE

    n = cycle.n_stages
    if solution.policy.shape[0] != n:
        raise ValueError("policy horizon does not match the cycle")
    dt = cycle.dt
    cols = {name: np.zeros(n + 1) for name in
            ("t", "v", "tw", "u", "tm", "te", "brake", "pm", "ib", "vo",
             "soc", "theta", "mf", "fuel_cum")}

    state = x0
    fuel_total = 0.0
    for k in range(n):
        demand = wheel_demand(models.vehicle, cycle, k)
        try:
            if two_state:
                u = _policy_u_two_state(solution, k, state.soc, state.theta)
            else:
                u = _policy_u_soc_only(solution, k, state.soc)
        except LookupError as exc:
            raise RolloutError(k, str(exc)) from exc
        split = split_torque(demand, u, models.motor, models.engine)
        if not split.feasible:
            raise RolloutError(k, f"policy control u={u} infeasible for the split")
        p_m = motor_electrical_power(models.motor, demand.shaft_speed, split.t_m)
        mf = fuel_rate(models.engine, demand.shaft_speed, split.t_e)
        try:
            i_b = battery_current(models.electrical, state.soc, p_m)
        except InfeasiblePowerError as exc:
            raise RolloutError(k, str(exc)) from exc
        v_o = terminal_voltage(models.electrical, state.soc, i_b)

        nxt = _transition_from_power(models, cfg, solution.grid, state, p_m, dt)
        if nxt is None:
            raise RolloutError(k, "state left the admissible box")

        cols["t"][k] = k * dt
        cols["v"][k] = cycle.speeds[k]
        cols["tw"][k] = demand.shaft_torque
        cols["u"][k] = u
        cols["tm"][k] = split.t_m
        cols["te"][k] = split.t_e
        cols["brake"][k] = split.brake
        cols["pm"][k] = p_m
        cols["ib"][k] = i_b
        cols["vo"][k] = v_o
        cols["soc"][k] = state.soc
        cols["theta"][k] = state.theta
        cols["mf"][k] = mf
        fuel_total += mf * dt
        cols["fuel_cum"][k] = fuel_total
        state = nxt

    cols["t"][n] = n * dt
    cols["v"][n] = cycle.speeds[n]
    cols["soc"][n] = state.soc
    cols["theta"][n] = state.theta
    cols["fuel_cum"][n] = fuel_total
    return Trace(dt=dt, **cols)


def fuel_per_100km(trace: Trace, fuel_density: float = 0.745) -> float:
    """Convert accumulated fuel mass to L/100km over the trace distance."""
    dist = trace.distance
    if dist <= 0:
        raise ValueError("trace distance must be positive")
    return trace.total_fuel / fuel_density / dist * 1e5


def post_hoc_thermal(
    trace: Trace,
    thermal,
    elec=None,
    r_cell: float | None = None,
    theta0: float | None = None,
    substeps: int = 1,
) -> np.ndarray:
    """Replay the cell-temperature ODE over a recorded current profile.

    The current is held constant within each original sample (zero-order
    hold); ``substeps`` subdivides the Euler step for convergence studies.
    Per-step resistance comes from ``elec.cell_resistance(soc_k)`` when the
    electrical parameters are given, else from the constant ``r_cell``.
    Returns the temperature trajectory, length n_stages + 1.
    """
    if (elec is None) == (r_cell is None):
        raise ValueError("pass exactly one of elec or r_cell")
    coeffs = cooling_coefficients(thermal)
    n = trace.n_stages
    theta = float(trace.theta[0] if theta0 is None else theta0)
    out = np.empty(n + 1)
    out[0] = theta
    h = trace.dt / substeps
    for k in range(n):
        i_b = float(trace.ib[k])
        rc = float(elec.cell_resistance(trace.soc[k])) if elec is not None else float(r_cell)
        for _ in range(substeps):
            theta = theta + h * theta_rate(thermal, coeffs, rc, i_b, theta)
        out[k + 1] = theta
    return out


def write_trace_csv(trace: Trace, path: str | Path) -> None:
    rows = [TRACE_HEADER]
    for k in range(trace.t.size):
        rows.append(
            ",".join(
                repr(float(x))
                for x in (
                    trace.t[k], trace.v[k], trace.tw[k], trace.u[k], trace.tm[k],
                    trace.te[k], trace.brake[k], trace.pm[k], trace.ib[k],
                    trace.vo[k], trace.soc[k], trace.theta[k], trace.mf[k],
                    trace.fuel_cum[k],
                )
            )
        )
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def read_trace_csv(path: str | Path, dt: float | None = None) -> Trace:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"{path}: not a trace CSV")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    if dt is None:
        dt = float(data[1, 0] - data[0, 0]) if data.shape[0] > 1 else 1.0
    names = ("t", "v", "tw", "u", "tm", "te", "brake", "pm", "ib", "vo",
             "soc", "theta", "mf", "fuel_cum")
    return Trace(dt=dt, **{name: data[:, i] for i, name in enumerate(names)})
