"""Quasi-static powertrain: longitudinal dynamics, torque split, machine maps.

The demand chain per stage k is

    F_t = m*a_k + (F_roll + c*v^2 + m*g*sin(grade) + F_dist)
    wheel torque = F_t * r_w,  shaft torque = wheel torque / g_r,
    shaft speed  = g_r * v_k / r_w

and the split ratio u divides the shaft torque between motor (T_m = u*T)
and engine (T_e = (1-u)*T).  Negative demand is absorbed by the motor up to
its torque limit, friction brakes take the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .cycle import DriveCycle, accel_at
from .tables import GridMap2D

__all__ = [
    "GRAVITY",
    "VehicleParams",
    "ConstantEfficiency",
    "WillansEfficiency",
    "GriddedEfficiency",
    "EngineModel",
    "MotorModel",
    "StageDemand",
    "TorqueSplit",
    "resistive_force",
    "wheel_demand",
    "split_torque",
    "fuel_rate",
    "motor_electrical_power",
]

GRAVITY = 9.81  # m/s^2


@dataclass(frozen=True)
class VehicleParams:
    mass: float = 1800.0               # kg
    wheel_radius: float = 0.3          # m
    rolling_force: float = 144.0       # N, gated off at v = 0
    aero_coeff: float = 0.48           # N*s^2/m^2, lumped: F_a = c*v^2
    grade_angle: float = 0.0           # rad
    disturbance_force: float = 0.0     # N
    gear_ratio: float = 6.0            # shaft speed = g_r * wheel speed
    driveline_efficiency: float = 1.0

    def __post_init__(self):
        if self.mass <= 0 or self.wheel_radius <= 0 or self.gear_ratio <= 0:
            raise ValueError("mass, wheel radius and gear ratio must be positive")
        if not 0 < self.driveline_efficiency <= 1:
            raise ValueError("driveline efficiency must be in (0, 1]")


class ConstantEfficiency:
    """eta(speed, torque) = const."""

    def __init__(self, eta: float):
        if not 0 < eta < 1:
            raise ValueError(f"efficiency must be in (0,1), got {eta}")
        self.eta = float(eta)

    def __call__(self, speed: float, torque: float) -> float:
        return self.eta


class WillansEfficiency:
    """Affine fuel-power line expressed as an efficiency map.

    Fuel power = (P + loss_power)/eta0 for mechanical power P > 0, i.e.
    eta(P) = eta0 * P / (P + loss_power).  loss_power = 0 degenerates to a
    constant-efficiency map.
    """

    def __init__(self, eta0: float, loss_power: float = 0.0):
        if not 0 < eta0 < 1:
            raise ValueError(f"efficiency must be in (0,1), got {eta0}")
        if loss_power < 0:
            raise ValueError("loss power must be >= 0")
        self.eta0 = float(eta0)
        self.loss_power = float(loss_power)

    def __call__(self, speed: float, torque: float) -> float:
        p = torque * speed
        if p <= 0.0:
            return self.eta0
        return self.eta0 * p / (p + self.loss_power)


class GriddedEfficiency:
    """Bilinear (speed, torque) efficiency map loaded from CSV."""

    def __init__(self, grid: GridMap2D):
        self.grid = grid

    @classmethod
    def from_csv(cls, path) -> "GriddedEfficiency":
        return cls(GridMap2D.from_csv(path))

    def __call__(self, speed: float, torque: float) -> float:
        return self.grid(speed, torque)


@dataclass(frozen=True)
class EngineModel:
    max_torque: float = 199.0          # N*m
    max_speed: float = 503.0           # rad/s
    efficiency_map: object = field(default_factory=lambda: WillansEfficiency(0.35, 20000.0))
    fuel_lower_heating_value: float = 44.4e6  # J/kg
    idle_fuel_rate: float = 0.0        # kg/s at T_e = 0


@dataclass(frozen=True)
class MotorModel:
    max_torque: float = 133.0          # N*m
    max_speed: float = 600.0           # rad/s
    efficiency_map: object = field(default_factory=lambda: ConstantEfficiency(0.85))


@dataclass(frozen=True)
class StageDemand:
    """Per-stage demand. Torques in N*m, shaft speed in rad/s.

    ``wheel_torque`` is F_t*r_w at the tyre; ``shaft_torque`` is the same
    demand referred through the (single, fixed) gear to the common
    engine/motor shaft, which is the quantity the split and the machine
    limits act on.
    """

    wheel_torque: float
    shaft_torque: float
    shaft_speed: float
    k: int

    def __post_init__(self):
        if self.shaft_speed < 0:
            raise ValueError("shaft speed must be >= 0")


class TorqueSplit(NamedTuple):
    t_m: float       # motor torque at the shaft
    t_e: float       # engine torque at the shaft
    brake: float     # friction-brake torque (<= 0), shaft-referred
    feasible: bool


def resistive_force(params: VehicleParams, v: float) -> float:
    """Sum of rolling (gated off at standstill), aero, grade and disturbance forces."""
    rolling = params.rolling_force if v > 0 else 0.0
    return (
        rolling
        + params.aero_coeff * v * v
        + params.mass * GRAVITY * math.sin(params.grade_angle)
        + params.disturbance_force
    )


def wheel_demand(params: VehicleParams, cycle: DriveCycle, k: int) -> StageDemand:
    """Traction demand for stage k from the cycle kinematics."""
    v = float(cycle.speeds[k])
    a = float(accel_at(cycle, k))
    f_t = params.mass * a + resistive_force(params, v)
    wheel_torque = f_t * params.wheel_radius
    return StageDemand(
        wheel_torque=wheel_torque,
        shaft_torque=wheel_torque / params.gear_ratio,
        shaft_speed=params.gear_ratio * v / params.wheel_radius,
        k=k,
    )


def split_torque(
    demand: StageDemand, u: float, motor: MotorModel, engine: EngineModel
) -> TorqueSplit:
    """Divide shaft demand between motor and engine; never raises.

    Positive demand: T_m = u*T, T_e = (1-u)*T.  Non-positive demand: the
    motor regenerates up to its torque limit and friction brakes absorb the
    remainder; the engine never produces negative torque.  Limit violations
    are flagged, not errors — DP prices them with the big value.

    The decomposition is error-free: T_m + T_e + brake equals the demand
    torque exactly in real arithmetic (T_e carries the rounded complement
    and brake the 2Sum residual, which is 0 for representable splits).
    """
    t = demand.shaft_torque
    w = demand.shaft_speed
    if t > 0.0:
        t_m = u * t
        # 2Sum of (t, -t_m): t_e is the rounded complement, brake the exact residual
        t_e = t - t_m
        bb = t_e - t
        brake = (t - (t_e - bb)) + (-t_m - bb)
    else:
        t_m = max(t, -motor.max_torque)
        t_e = 0.0
        brake = t - t_m  # exact for |t| <= 2*max_torque (Sterbenz)
    feasible = (
        abs(t_m) <= motor.max_torque
        and 0.0 <= t_e <= engine.max_torque
        and w <= motor.max_speed
        and w <= engine.max_speed
    )
    return TorqueSplit(t_m, t_e, brake, feasible)


def fuel_rate(engine: EngineModel, speed: float, torque: float) -> float:
    """Engine fuel mass flow in kg/s; T_e = 0 means engine off (idle rate)."""
    if torque == 0.0:
        return engine.idle_fuel_rate
    if torque < 0.0 or torque > engine.max_torque:
        raise ValueError(f"engine torque {torque} outside [0, {engine.max_torque}]")
    if not 0.0 <= speed <= engine.max_speed:
        raise ValueError(f"engine speed {speed} outside [0, {engine.max_speed}]")
    eta = engine.efficiency_map(speed, torque)
    return torque * speed / eta / engine.fuel_lower_heating_value


def motor_electrical_power(motor: MotorModel, speed: float, torque: float) -> float:
    """Electrical power in W: P_mech/eta when motoring, P_mech*eta when generating."""
    if abs(torque) > motor.max_torque:
        raise ValueError(f"motor torque {torque} outside +/-{motor.max_torque}")
    if not 0.0 <= speed <= motor.max_speed:
        raise ValueError(f"motor speed {speed} outside [0, {motor.max_speed}]")
    p = torque * speed
    eta = motor.efficiency_map(speed, abs(torque))
    if p >= 0.0:
        return p / eta
    return p * eta
