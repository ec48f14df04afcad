"""Bundle of all powertrain parameter blocks used by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .battery import (
    BatteryElectricalParams,
    BatteryThermalParams,
    CoolingCoefficients,
    cooling_coefficients,
)
from .vehicle import EngineModel, MotorModel, VehicleParams

__all__ = ["PowertrainModels"]


@dataclass(frozen=True)
class PowertrainModels:
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    engine: EngineModel = field(default_factory=EngineModel)
    motor: MotorModel = field(default_factory=MotorModel)
    electrical: BatteryElectricalParams = field(default_factory=BatteryElectricalParams)
    thermal: BatteryThermalParams = field(default_factory=BatteryThermalParams)

    @property
    def cooling(self) -> CoolingCoefficients:
        return cooling_coefficients(self.thermal)
