"""Shared builders for desk-scale DP instances with grid-snapped transitions.

The toy family is sized so the brute-force oracle stays enumerable
(|controls|^N <= 729) while state steps are comparable to the cell size,
which makes the snapped dynamics genuinely state-dependent instead of
collapsing onto a single node.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from hevopt.battery import BatteryElectricalParams, BatteryThermalParams
from hevopt.cycle import DriveCycle
from hevopt.dp import SolverConfig, build_grids
from hevopt.models import PowertrainModels
from hevopt.tables import Curve1D
from hevopt.vehicle import ConstantEfficiency, EngineModel, MotorModel, VehicleParams


def toy_models(rng: np.random.Generator) -> PowertrainModels:
    vehicle = VehicleParams(
        mass=float(rng.uniform(600, 1200)),
        wheel_radius=0.3,
        rolling_force=float(rng.uniform(40, 120)),
        aero_coeff=0.4,
        gear_ratio=6.0,
    )
    engine = EngineModel(
        max_torque=250.0,
        max_speed=600.0,
        efficiency_map=ConstantEfficiency(0.35),
        idle_fuel_rate=0.0,
    )
    motor = MotorModel(max_torque=150.0, max_speed=700.0,
                       efficiency_map=ConstantEfficiency(0.9))
    electrical = BatteryElectricalParams(
        capacity=float(rng.uniform(500, 1200)),  # tiny pack: visible SOC steps
        series_cells=10,
        ocv_curve=Curve1D.affine(3.3, 0.9),
        cell_resistance=Curve1D.constant(float(rng.uniform(0.002, 0.006))),
    )
    thermal = BatteryThermalParams(
        cell_mass=0.025,          # tiny heat capacity: visible theta steps
        specific_heat=800.0,
        h_bar_1=float(rng.uniform(10, 30)),
        h_bar_2=25.0,
        channel_area=0.02755,
        air_flow_1=0.005,
        air_flow_2=0.005,
        inlet_temp_1=20.0,
        inlet_temp_2=20.0,
    )
    return PowertrainModels(vehicle=vehicle, engine=engine, motor=motor,
                            electrical=electrical, thermal=thermal)


def toy_config(rng: np.random.Generator, mode: str = "two-state") -> SolverConfig:
    n_soc = int(rng.integers(3, 6))
    n_theta = int(rng.integers(3, 6))
    wide = rng.random() < 0.5  # half the instances get permissive windows
    if wide:
        s_lo, s_hi = 0.3, 0.8
        t_lo, t_hi = 10.0, 40.0
    else:
        s_lo, s_hi = 0.35, 0.75
        t_lo, t_hi = 12.0, 36.0
    cfg = SolverConfig(
        soc_low=s_lo,
        soc_high=s_hi,
        soc_initial=0.5 * (s_lo + s_hi),
        soc_final_min=s_lo if wide else float(rng.uniform(s_lo, 0.55)),
        soc_final_max=s_hi if wide else float(rng.uniform(0.55, s_hi)),
        theta_low=t_lo,
        theta_high=t_hi,
        theta_initial=0.5 * (t_lo + t_hi),
        theta_final_min=t_lo if wide else float(rng.uniform(t_lo, 22.0)),
        theta_final_max=t_hi if wide else float(rng.uniform(24.0, t_hi)),
        soc_points=n_soc,
        theta_points=n_theta,
        u_points=3,
        u_min=0.0,
        u_max=1.0,
        snap_transitions=True,
    )
    # pin the initial state onto grid nodes so snapped DP and the oracle
    # evaluate identical states from stage 0
    grid, _ = build_grids(cfg, mode)
    i = int(rng.integers(1, grid.n_soc - 1))
    x0_soc = float(grid.soc_axis[i])
    if mode == "two-state":
        j = int(rng.integers(1, grid.n_theta - 1))
        x0_theta = float(grid.theta_axis[j])
    else:
        x0_theta = cfg.theta_initial
    return replace(cfg, soc_initial=x0_soc, theta_initial=x0_theta)


def toy_cycle(rng: np.random.Generator, n_stages: int | None = None) -> DriveCycle:
    if n_stages is None:
        n_stages = int(rng.integers(1, 7))
    speeds = rng.uniform(0.0, 8.0, size=n_stages + 1)
    speeds[rng.random(n_stages + 1) < 0.2] = 0.0
    return DriveCycle(dt=1.0, speeds=speeds, name=f"toy{n_stages}")


def toy_instance(seed: int, mode: str = "two-state"):
    rng = np.random.default_rng(seed)
    return toy_cycle(rng), toy_models(rng), toy_config(rng, mode)


def fold_right_sum(values) -> float:
    """Backward accumulation matching the Bellman recursion's addition order."""
    total = 0.0
    for v in reversed(list(values)):
        total = v + total
    return total
