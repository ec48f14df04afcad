import math

import numpy as np
import pytest

from hevopt.cycle import DriveCycle
from hevopt.tables import TableError
from hevopt.vehicle import (
    ConstantEfficiency,
    EngineModel,
    GriddedEfficiency,
    MotorModel,
    StageDemand,
    VehicleParams,
    WillansEfficiency,
    fuel_rate,
    motor_electrical_power,
    resistive_force,
    split_torque,
    wheel_demand,
)

TABLE_PARAMS = VehicleParams(mass=1800.0, wheel_radius=0.3, rolling_force=144.0,
                             aero_coeff=0.48, gear_ratio=6.0)
ENGINE_CONST = EngineModel(efficiency_map=ConstantEfficiency(0.35))
MOTOR_09 = MotorModel(efficiency_map=ConstantEfficiency(0.9))


def demand(shaft_torque, shaft_speed, k=0):
    return StageDemand(wheel_torque=shaft_torque * 6.0, shaft_torque=shaft_torque,
                       shaft_speed=shaft_speed, k=k)


class TestResistiveForce:
    def test_flat_at_10(self):
        assert resistive_force(TABLE_PARAMS, 10.0) == pytest.approx(144 + 0.48 * 100)

    def test_standstill_gates_rolling(self):
        assert resistive_force(TABLE_PARAMS, 0.0) == 0.0

    def test_at_top_speed(self):
        v = 19.44
        assert resistive_force(TABLE_PARAMS, v) == pytest.approx(144 + 0.48 * v * v)

    def test_monotone_in_speed(self):
        vs = np.linspace(0.01, 40, 100)
        fs = [resistive_force(TABLE_PARAMS, v) for v in vs]
        assert all(b >= a for a, b in zip(fs, fs[1:]))

    def test_grade_term(self):
        p = VehicleParams(grade_angle=0.05)
        flat = VehicleParams()
        assert resistive_force(p, 10.0) - resistive_force(flat, 10.0) == pytest.approx(
            1800 * 9.81 * math.sin(0.05)
        )


class TestWheelDemand:
    def test_acceleration_case(self):
        cyc = DriveCycle(dt=1.0, speeds=np.array([10.0, 11.0]))
        d = wheel_demand(TABLE_PARAMS, cyc, 0)
        f_t = 1800 * 1.0 + resistive_force(TABLE_PARAMS, 10.0)
        assert d.wheel_torque == pytest.approx(f_t * 0.3)          # 597.6 N*m
        assert d.wheel_torque == pytest.approx(597.6)
        assert d.shaft_torque == pytest.approx(597.6 / 6.0)
        assert d.shaft_speed == pytest.approx(200.0)

    def test_standstill(self):
        cyc = DriveCycle(dt=1.0, speeds=np.array([0.0, 0.0]))
        d = wheel_demand(TABLE_PARAMS, cyc, 0)
        assert d.wheel_torque == 0.0
        assert d.shaft_speed == 0.0

    def test_braking_demand(self):
        cyc = DriveCycle(dt=1.0, speeds=np.array([10.0, 8.0]))
        d = wheel_demand(TABLE_PARAMS, cyc, 0)
        assert d.wheel_torque == pytest.approx((-3600 + 192) * 0.3)  # -1022.4


class TestSplitTorque:
    def test_even_split(self):
        s = split_torque(demand(100.0, 200.0), 0.4, MOTOR_09, ENGINE_CONST)
        assert s.t_m == pytest.approx(40.0)
        assert s.t_e == pytest.approx(60.0)
        # brake holds only the 2Sum residual of the split (ulp scale)
        assert s.brake == pytest.approx(0.0, abs=1e-12)
        assert s.feasible

    def test_motor_limit_infeasible(self):
        s = split_torque(demand(300.0, 200.0), 1.0, MOTOR_09, ENGINE_CONST)
        assert s.t_m == pytest.approx(300.0)
        assert not s.feasible

    def test_regen_clamp_with_brakes(self):
        s = split_torque(demand(-200.0, 150.0), 0.0, MOTOR_09, ENGINE_CONST)
        assert s.t_m == -133.0
        assert s.t_e == 0.0
        assert s.brake == pytest.approx(-67.0)
        assert s.feasible

    def test_engine_negative_infeasible(self):
        s = split_torque(demand(100.0, 200.0), 1.5, MOTOR_09, ENGINE_CONST)
        assert s.t_e < 0.0
        assert not s.feasible

    def test_overspeed_infeasible(self):
        s = split_torque(demand(50.0, 650.0), 0.5, MOTOR_09, ENGINE_CONST)
        assert not s.feasible

    def test_charge_split(self):
        s = split_torque(demand(50.0, 200.0), -1.0, MOTOR_09, ENGINE_CONST)
        assert s.t_m == pytest.approx(-50.0)
        assert s.t_e == pytest.approx(100.0)
        assert s.feasible

    def test_conservation_exact(self):
        # braking draws bounded by twice the motor limit: the exactness
        # envelope of the Sterbenz-based regen decomposition
        rng = np.random.default_rng(7)
        for _ in range(2000):
            if rng.random() < 0.5:
                t = float(rng.uniform(0.0, 400.0))
            else:
                t = float(rng.uniform(-2 * MOTOR_09.max_torque, 0.0))
            u = float(rng.uniform(-3.0, 1.0))
            s = split_torque(demand(t, 100.0), u, MOTOR_09, ENGINE_CONST)
            assert math.fsum((s.t_m, s.t_e, s.brake)) == t


class TestFuelRate:
    def test_constant_map_value(self):
        # 100 N*m at 200 rad/s, eta 0.35, LHV 44.4 MJ/kg
        rate = fuel_rate(ENGINE_CONST, 200.0, 100.0)
        assert rate == pytest.approx(20000.0 / (0.35 * 44.4e6))
        assert rate == pytest.approx(1.287e-3, rel=1e-3)

    def test_engine_off(self):
        assert fuel_rate(ENGINE_CONST, 200.0, 0.0) == 0.0

    def test_idle_rate(self):
        eng = EngineModel(efficiency_map=ConstantEfficiency(0.35), idle_fuel_rate=1e-4)
        assert fuel_rate(eng, 100.0, 0.0) == 1e-4

    def test_willans_line_is_affine(self):
        eng = EngineModel(efficiency_map=WillansEfficiency(0.35, 5000.0))
        for t, w in ((20.0, 150.0), (80.0, 300.0)):
            assert fuel_rate(eng, w, t) == pytest.approx((t * w + 5000.0) / (0.35 * 44.4e6))

    def test_gridded_map_node_identity(self, tmp_path):
        path = tmp_path / "eng.csv"
        path.write_text("0,100,200\n50,0.2,0.25\n150,0.3,0.35\n", encoding="utf-8")
        eng = EngineModel(efficiency_map=GriddedEfficiency.from_csv(path))
        assert fuel_rate(eng, 200.0, 150.0) == pytest.approx(150 * 200 / 0.35 / 44.4e6)

    def test_gridded_map_outside_domain(self, tmp_path):
        path = tmp_path / "eng.csv"
        path.write_text("0,100,200\n50,0.2,0.25\n150,0.3,0.35\n", encoding="utf-8")
        eng = EngineModel(efficiency_map=GriddedEfficiency.from_csv(path))
        with pytest.raises(TableError):
            fuel_rate(eng, 300.0, 100.0)

    def test_monotone_in_torque(self):
        torques = np.linspace(0.1, 199, 50)
        rates = [fuel_rate(ENGINE_CONST, 250.0, t) for t in torques]
        assert all(b >= a for a, b in zip(rates, rates[1:]))

    def test_bounds_rejected(self):
        with pytest.raises(ValueError):
            fuel_rate(ENGINE_CONST, 200.0, 250.0)
        with pytest.raises(ValueError):
            fuel_rate(ENGINE_CONST, 600.0, 100.0)


class TestMotorPower:
    def test_motoring(self):
        assert motor_electrical_power(MOTOR_09, 200.0, 50.0) == pytest.approx(10000 / 0.9)

    def test_generating(self):
        assert motor_electrical_power(MOTOR_09, 200.0, -50.0) == pytest.approx(-9000.0)

    def test_zero(self):
        assert motor_electrical_power(MOTOR_09, 200.0, 0.0) == 0.0

    def test_efficiency_never_creates_energy(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            t = float(rng.uniform(-130, 130))
            w = float(rng.uniform(0, 590))
            p = motor_electrical_power(MOTOR_09, w, t)
            mech = t * w
            if mech >= 0:
                assert abs(p) >= abs(mech)
            else:
                assert abs(p) <= abs(mech)

    def test_limits_rejected(self):
        with pytest.raises(ValueError):
            motor_electrical_power(MOTOR_09, 200.0, 140.0)
        with pytest.raises(ValueError):
            motor_electrical_power(MOTOR_09, 700.0, 10.0)
