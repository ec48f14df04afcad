"""Offline DP energy management for a parallel hybrid electric vehicle.

Solves the fuel-minimization torque-split problem by finite-horizon
dynamic programming over a discretized (SOC, battery-temperature) state,
and compares the two-state formulation against the classical SOC-only
baseline to expose uncontrolled battery-temperature excursions.

The backward sweep runs on a compiled kernel when the extension is built
(see hevopt.kernels.BACKEND) and on a bit-identical numpy fallback
otherwise.
"""

from .battery import (
    BatteryElectricalParams,
    BatteryState,
    BatteryThermalParams,
    CoolingCoefficients,
    InfeasiblePowerError,
)
from .config import ExperimentConfig
from .cycle import CycleStats, DriveCycle, bundled_cycle_path, compute_stats, load_cycle
from .dp import (
    ControlGrid,
    DPSolution,
    SolverConfig,
    StateGrid,
    brute_force_solve,
    solve,
    solve_soc_only,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .models import PowertrainModels
from .sim import Trace, forward_simulate, fuel_per_100km, post_hoc_thermal
from .vehicle import EngineModel, MotorModel, VehicleParams

__version__ = "0.1.0"

__all__ = [
    "BatteryElectricalParams",
    "BatteryState",
    "BatteryThermalParams",
    "ControlGrid",
    "CoolingCoefficients",
    "CycleStats",
    "DPSolution",
    "DriveCycle",
    "EngineModel",
    "ExperimentConfig",
    "InfeasiblePowerError",
    "KERNEL_BACKEND",
    "MotorModel",
    "PowertrainModels",
    "SolverConfig",
    "StateGrid",
    "Trace",
    "VehicleParams",
    "brute_force_solve",
    "bundled_cycle_path",
    "compute_stats",
    "forward_simulate",
    "fuel_per_100km",
    "load_cycle",
    "post_hoc_thermal",
    "solve",
    "solve_soc_only",
]
