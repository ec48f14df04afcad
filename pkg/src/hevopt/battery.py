"""Battery electro-thermal model.

Electrical side: series string of identical cells behind an equivalent
circuit (open-circuit voltage source + internal resistance), both SOC
dependent.  Pack power P maps to current through the smaller root of
R*I^2 - V_oc*I + P = 0.

Thermal side: one representative cell with lumped heat capacity, Joule
heating from the per-cell resistance, and a two-channel forced-air cooling
path reduced to three linear coefficients (alpha1 > 0 acting on the cell
temperature, alpha2/alpha3 < 0 acting on the channel inlet temperatures,
summing to zero).

Both state derivatives are integrated by forward Euler, one evaluation per
stage, matching the DP transition structure.  The expressions here are the
reference semantics for the compiled sweep kernel: any change must be
mirrored in kernels/_sweep.pyx and kernels/reference.py op for op.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .tables import Curve1D

__all__ = [
    "InfeasiblePowerError",
    "BatteryElectricalParams",
    "BatteryThermalParams",
    "BatteryState",
    "CoolingCoefficients",
    "pack_ocv",
    "pack_resistance",
    "feasible_power_limit",
    "battery_current",
    "terminal_voltage",
    "soc_rate",
    "heat_generation",
    "cooling_coefficients",
    "heat_removed",
    "theta_rate",
    "step_state",
]


class InfeasiblePowerError(ValueError):
    """Requested pack power exceeds V_oc^2/(4*R_b); no real current exists."""

    def __init__(self, power: float, limit: float):
        super().__init__(f"requested {power:.1f} W exceeds feasible envelope {limit:.1f} W")
        self.power = power
        self.limit = limit


@dataclass(frozen=True)
class BatteryElectricalParams:
    """Pack-level electrical parameters (n_s identical cells in series).

    Defaults: 15 A*h cell (Table-II class), affine per-cell OCV hitting
    3.75 V at SOC 0.5, and the shipped pack sizing used by the reference
    configuration.
    """

    capacity: float = 54000.0          # coulombs (15 A*h)
    series_cells: int = 10
    ocv_curve: Curve1D = field(default_factory=lambda: Curve1D.affine(3.3, 0.9))
    cell_resistance: Curve1D = field(default_factory=lambda: Curve1D.constant(0.0025))

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if self.series_cells < 1:
            raise ValueError("series cell count must be >= 1")


@dataclass(frozen=True)
class BatteryThermalParams:
    """Representative-cell thermal parameters and the two cooling channels."""

    cell_mass: float = 3.84            # kg
    specific_heat: float = 800.0       # J/(kg*K)
    h_bar_1: float = 25.0              # W/(m^2*K)
    h_bar_2: float = 25.0
    channel_area: float = 0.02755      # m^2 (0.19 m x 0.145 m cell face)
    air_density: float = 1.2           # kg/m^3
    air_specific_heat: float = 1005.0  # J/(kg*K)
    air_flow_1: float = 0.005          # m^3/s
    air_flow_2: float = 0.005
    inlet_temp_1: float = 20.0         # deg C
    inlet_temp_2: float = 20.0

    def __post_init__(self):
        for name in (
            "cell_mass", "specific_heat", "h_bar_1", "h_bar_2", "channel_area",
            "air_density", "air_specific_heat", "air_flow_1", "air_flow_2",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def heat_capacity(self) -> float:
        """m_c * C_p,c in J/K."""
        return self.cell_mass * self.specific_heat


@dataclass(frozen=True)
class BatteryState:
    """Dynamic state: SOC (dimensionless, nominally in [0,1]) and cell temp (deg C).

    Deliberately unvalidated: transition candidates may fall outside the
    admissible box, and the DP/simulation layers are the ones that enforce it.
    """

    soc: float
    theta: float


@dataclass(frozen=True)
class CoolingCoefficients:
    """Linearized cooling: Q_d = a1*theta + a2*theta_in1 + a3*theta_in2, sum = 0."""

    alpha1: float
    alpha2: float
    alpha3: float


def pack_ocv(params: BatteryElectricalParams, soc: float) -> float:
    """Pack open-circuit voltage: n_s * per-cell OCV(soc)."""
    return params.series_cells * float(params.ocv_curve(soc))


def pack_resistance(params: BatteryElectricalParams, soc: float) -> float:
    """Pack internal resistance: n_s * per-cell R(soc)."""
    return params.series_cells * float(params.cell_resistance(soc))


def feasible_power_limit(params: BatteryElectricalParams, soc: float) -> float:
    """Maximum deliverable pack power V_oc^2/(4*R_b) at this SOC."""
    voc = pack_ocv(params, soc)
    rb = pack_resistance(params, soc)
    return voc * voc / (4.0 * rb)


def battery_current(params: BatteryElectricalParams, soc: float, p_m: float) -> float:
    """Pack current for electrical power p_m (discharge positive).

    Smaller quadratic root (high-voltage branch): I <= V_oc/(2*R_b) always.
    """
    voc = pack_ocv(params, soc)
    rb = pack_resistance(params, soc)
    disc = voc * voc - 4.0 * rb * p_m
    if disc < 0.0:
        raise InfeasiblePowerError(p_m, voc * voc / (4.0 * rb))
    return (voc - math.sqrt(disc)) / (2.0 * rb)


def terminal_voltage(params: BatteryElectricalParams, soc: float, i_b: float) -> float:
    """V_o = V_oc - R_b * I_b."""
    return pack_ocv(params, soc) - pack_resistance(params, soc) * i_b


def soc_rate(params: BatteryElectricalParams, i_b: float) -> float:
    """dSOC/dt = -I_b / S_0."""
    return -i_b / params.capacity


def heat_generation(r_cell: float, i_b: float) -> float:
    """Joule heating of the representative cell, R * I^2 (per-cell resistance)."""
    return r_cell * i_b * i_b


def cooling_coefficients(params: BatteryThermalParams) -> CoolingCoefficients:
    """Reduce the two-channel convection path to the three linear coefficients.

    Per channel i: R_ku,i = 1/(h_i*A_ch) (surface convection) and
    R_u,i = 1/(rho*C_p,air*q_i) (advection), giving alpha_{i+1} =
    -1/(R_ku,i + R_u,i); alpha1 = -(alpha2 + alpha3) so the three sum to
    zero by construction (no cooling without a temperature difference).
    """
    r_ku1 = 1.0 / (params.h_bar_1 * params.channel_area)
    r_ku2 = 1.0 / (params.h_bar_2 * params.channel_area)
    r_u1 = 1.0 / (params.air_density * params.air_specific_heat * params.air_flow_1)
    r_u2 = 1.0 / (params.air_density * params.air_specific_heat * params.air_flow_2)
    alpha2 = -1.0 / (r_ku1 + r_u1)
    alpha3 = -1.0 / (r_ku2 + r_u2)
    alpha1 = -(alpha2 + alpha3)
    return CoolingCoefficients(alpha1=alpha1, alpha2=alpha2, alpha3=alpha3)


def heat_removed(
    coeffs: CoolingCoefficients, theta: float, t_in1: float, t_in2: float
) -> float:
    """Cooling power a1*theta + a2*t_in1 + a3*t_in2, evaluated in difference
    form so it is exactly zero when theta equals both inlet temperatures."""
    return -coeffs.alpha2 * (theta - t_in1) - coeffs.alpha3 * (theta - t_in2)


def theta_rate(
    thermal: BatteryThermalParams,
    coeffs: CoolingCoefficients,
    r_cell: float,
    i_b: float,
    theta: float,
) -> float:
    """d(theta)/dt = (Q_g - Q_d) / (m_c * C_p,c) in K/s."""
    q_g = heat_generation(r_cell, i_b)
    q_d = heat_removed(coeffs, theta, thermal.inlet_temp_1, thermal.inlet_temp_2)
    return (q_g - q_d) / (thermal.cell_mass * thermal.specific_heat)


def step_state(
    elec: BatteryElectricalParams,
    thermal: BatteryThermalParams,
    coeffs: CoolingCoefficients,
    state: BatteryState,
    p_m: float,
    dt: float,
) -> BatteryState:
    """One forward-Euler step; current evaluated once at the pre-step state.

    Raises InfeasiblePowerError when p_m exceeds the envelope at state.soc.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    i_b = battery_current(elec, state.soc, p_m)
    r_cell = float(elec.cell_resistance(state.soc))
    soc_next = state.soc + dt * soc_rate(elec, i_b)
    theta_next = state.theta + dt * theta_rate(thermal, coeffs, r_cell, i_b, state.theta)
    return BatteryState(soc=soc_next, theta=theta_next)
