"""Experiment configuration: flat dotted-key text format and model building.

One checked-in reference file (hevopt/data/defaults.cfg) mirrors every
default so "the shipped defaults" is a named, versioned artifact; a user
config overrides any subset of keys.  A run's manifest is the fully
resolved configuration in canonical form and is itself a valid config
file, so re-running from a manifest reproduces the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .battery import BatteryElectricalParams, BatteryThermalParams
from .cycle import bundled_cycle_path
from .dp import SolverConfig
from .models import PowertrainModels
from .tables import Curve1D
from .vehicle import (
    ConstantEfficiency,
    EngineModel,
    GriddedEfficiency,
    MotorModel,
    VehicleParams,
    WillansEfficiency,
)

__all__ = ["ConfigError", "ExperimentConfig", "DEFAULTS", "defaults_path"]


class ConfigError(ValueError):
    """Malformed configuration file or invalid value."""


# Every key with its default; shipped reference file mirrors this mapping.
DEFAULTS: dict[str, object] = {
    "cycle.path": "",  # empty -> bundled JN-1015
    "vehicle.mass": 1800.0,
    "vehicle.wheel_radius": 0.3,
    "vehicle.rolling_force": 144.0,
    "vehicle.aero_coeff": 0.48,
    "vehicle.grade_angle": 0.0,
    "vehicle.disturbance_force": 0.0,
    "vehicle.gear_ratio": 6.0,
    "vehicle.driveline_efficiency": 1.0,
    "engine.max_torque": 199.0,
    "engine.max_speed": 503.0,
    "engine.eta": 0.35,
    "engine.willans_loss_w": 20000.0,
    "engine.lhv": 44.4e6,
    "engine.idle_fuel_rate": 0.0,
    "engine.map_path": "",
    "motor.max_torque": 133.0,
    "motor.max_speed": 600.0,
    "motor.eta": 0.85,
    "motor.map_path": "",
    "battery.capacity_c": 54000.0,
    "battery.series_cells": 10,
    "battery.ocv_intercept": 3.3,
    "battery.ocv_slope": 0.9,
    "battery.ocv_path": "",
    "battery.cell_resistance": 0.0025,
    "battery.resistance_path": "",
    "battery.thermal.cell_mass": 3.84,
    "battery.thermal.specific_heat": 800.0,
    "battery.thermal.h_bar_1": 25.0,
    "battery.thermal.h_bar_2": 25.0,
    "battery.thermal.channel_area": 0.02755,
    "battery.thermal.air_density": 1.2,
    "battery.thermal.air_cp": 1005.0,
    "battery.thermal.air_flow_1": 0.005,
    "battery.thermal.air_flow_2": 0.005,
    "battery.thermal.inlet_temp_1": 20.0,
    "battery.thermal.inlet_temp_2": 20.0,
    "soc.low": 0.4,
    "soc.high": 0.7,
    "soc.initial": 0.5,
    "soc.final_min": 0.54,
    "soc.final_max": 0.55,
    "theta.low": 10.0,
    "theta.high": 30.0,
    "theta.initial": 20.0,
    "theta.final_min": 15.0,
    "theta.final_max": 25.0,
    "dp.soc_points": 201,
    "dp.theta_points": 101,
    "dp.u_points": 51,
    "dp.u_min": -3.0,
    "dp.u_max": 1.0,
    "dp.big_value": 1e9,
    "dp.boundary_penalty": 0.05,
    "dp.snap_transitions": False,
    "dp.keep_values": False,
    "dp.dump_value_stages": "",
    "sim.fuel_density": 0.745,
}


def defaults_path() -> Path:
    return Path(resources.files("hevopt").joinpath("data/defaults.cfg"))


def _format_value(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(key: str, raw: str, default: object) -> object:
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"expected a boolean, got {raw!r}")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"key {key}: {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    values: dict

    @classmethod
    def defaults(cls) -> "ExperimentConfig":
        return cls(values=dict(DEFAULTS))

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "ExperimentConfig":
        values = dict(DEFAULTS)
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{source}: line {lineno}: expected 'key = value'")
            key, raw = stripped.split("=", 1)
            key = key.strip()
            if key not in DEFAULTS:
                raise ConfigError(f"{source}: line {lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw, DEFAULTS[key])
        return cls(values=values)

    def __getitem__(self, key: str):
        return self.values[key]

    def manifest_text(self) -> str:
        lines = [f"{k} = {_format_value(self.values[k])}" for k in sorted(self.values)]
        return "\n".join(lines) + "\n"

    # ── model building ────────────────────────────────────────────────

    def cycle_path(self) -> Path:
        raw = str(self["cycle.path"])
        return Path(raw) if raw else bundled_cycle_path()

    @property
    def fuel_density(self) -> float:
        return float(self["sim.fuel_density"])

    def build_models(self) -> PowertrainModels:
        vehicle = VehicleParams(
            mass=self["vehicle.mass"],
            wheel_radius=self["vehicle.wheel_radius"],
            rolling_force=self["vehicle.rolling_force"],
            aero_coeff=self["vehicle.aero_coeff"],
            grade_angle=self["vehicle.grade_angle"],
            disturbance_force=self["vehicle.disturbance_force"],
            gear_ratio=self["vehicle.gear_ratio"],
            driveline_efficiency=self["vehicle.driveline_efficiency"],
        )
        if self["engine.map_path"]:
            engine_map = GriddedEfficiency.from_csv(self["engine.map_path"])
        elif self["engine.willans_loss_w"] > 0:
            engine_map = WillansEfficiency(self["engine.eta"], self["engine.willans_loss_w"])
        else:
            engine_map = ConstantEfficiency(self["engine.eta"])
        engine = EngineModel(
            max_torque=self["engine.max_torque"],
            max_speed=self["engine.max_speed"],
            efficiency_map=engine_map,
            fuel_lower_heating_value=self["engine.lhv"],
            idle_fuel_rate=self["engine.idle_fuel_rate"],
        )
        if self["motor.map_path"]:
            motor_map = GriddedEfficiency.from_csv(self["motor.map_path"])
        else:
            motor_map = ConstantEfficiency(self["motor.eta"])
        motor = MotorModel(
            max_torque=self["motor.max_torque"],
            max_speed=self["motor.max_speed"],
            efficiency_map=motor_map,
        )
        if self["battery.ocv_path"]:
            ocv = Curve1D.from_csv(self["battery.ocv_path"])
        else:
            ocv = Curve1D.affine(self["battery.ocv_intercept"], self["battery.ocv_slope"])
        if self["battery.resistance_path"]:
            res = Curve1D.from_csv(self["battery.resistance_path"])
        else:
            res = Curve1D.constant(self["battery.cell_resistance"])
        electrical = BatteryElectricalParams(
            capacity=self["battery.capacity_c"],
            series_cells=self["battery.series_cells"],
            ocv_curve=ocv,
            cell_resistance=res,
        )
        thermal = BatteryThermalParams(
            cell_mass=self["battery.thermal.cell_mass"],
            specific_heat=self["battery.thermal.specific_heat"],
            h_bar_1=self["battery.thermal.h_bar_1"],
            h_bar_2=self["battery.thermal.h_bar_2"],
            channel_area=self["battery.thermal.channel_area"],
            air_density=self["battery.thermal.air_density"],
            air_specific_heat=self["battery.thermal.air_cp"],
            air_flow_1=self["battery.thermal.air_flow_1"],
            air_flow_2=self["battery.thermal.air_flow_2"],
            inlet_temp_1=self["battery.thermal.inlet_temp_1"],
            inlet_temp_2=self["battery.thermal.inlet_temp_2"],
        )
        return PowertrainModels(
            vehicle=vehicle, engine=engine, motor=motor,
            electrical=electrical, thermal=thermal,
        )

    def build_solver_config(self) -> SolverConfig:
        try:
            return SolverConfig(
                soc_low=self["soc.low"],
                soc_high=self["soc.high"],
                soc_initial=self["soc.initial"],
                soc_final_min=self["soc.final_min"],
                soc_final_max=self["soc.final_max"],
                theta_low=self["theta.low"],
                theta_high=self["theta.high"],
                theta_initial=self["theta.initial"],
                theta_final_min=self["theta.final_min"],
                theta_final_max=self["theta.final_max"],
                soc_points=self["dp.soc_points"],
                theta_points=self["dp.theta_points"],
                u_points=self["dp.u_points"],
                u_min=self["dp.u_min"],
                u_max=self["dp.u_max"],
                big_value=self["dp.big_value"],
                boundary_penalty=self["dp.boundary_penalty"],
                snap_transitions=self["dp.snap_transitions"],
                keep_values=self["dp.keep_values"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
