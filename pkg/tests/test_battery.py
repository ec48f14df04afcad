import numpy as np
import pytest

from hevopt.battery import (
    BatteryElectricalParams,
    BatteryState,
    BatteryThermalParams,
    InfeasiblePowerError,
    battery_current,
    cooling_coefficients,
    feasible_power_limit,
    heat_generation,
    heat_removed,
    pack_ocv,
    pack_resistance,
    soc_rate,
    step_state,
    terminal_voltage,
    theta_rate,
)
from hevopt.tables import Curve1D

# 80 series cells at a flat 3.75 V / 2 mOhm: the worked-example pack
# (V_oc = 300 V, R_b = 0.16 Ohm) used throughout the electrical checks
PACK80 = BatteryElectricalParams(
    capacity=54000.0,
    series_cells=80,
    ocv_curve=Curve1D.constant(3.75),
    cell_resistance=Curve1D.constant(0.002),
)

THERMAL = BatteryThermalParams()  # h=25, A=0.02755, q=0.005, rho=1.2, cp_air=1005


def random_electrical(rng):
    return BatteryElectricalParams(
        capacity=float(rng.uniform(5e3, 2e5)),
        series_cells=int(rng.integers(1, 120)),
        ocv_curve=Curve1D.affine(float(rng.uniform(2.8, 3.6)), float(rng.uniform(0.2, 1.2))),
        cell_resistance=Curve1D.constant(float(rng.uniform(5e-4, 2e-2))),
    )


class TestElectrical:
    def test_pack_ocv_affine(self):
        p = BatteryElectricalParams(series_cells=80, ocv_curve=Curve1D.affine(3.3, 0.9))
        assert pack_ocv(p, 0.5) == pytest.approx(300.0)
        assert pack_ocv(p, 0.0) == pytest.approx(264.0)

    def test_pack_ocv_single_cell_nominal(self):
        p = BatteryElectricalParams(series_cells=1, ocv_curve=Curve1D.affine(3.3, 0.9))
        assert pack_ocv(p, 0.5) == pytest.approx(3.75)

    def test_pack_resistance(self):
        assert pack_resistance(PACK80, 0.3) == pytest.approx(0.16)
        p1 = BatteryElectricalParams(series_cells=1, cell_resistance=Curve1D.constant(0.002))
        assert pack_resistance(p1, 0.5) == pytest.approx(0.002)

    def test_gridded_resistance_breakpoint_identity(self):
        curve = Curve1D(np.array([0.0, 0.5, 1.0]), np.array([0.004, 0.002, 0.003]))
        p = BatteryElectricalParams(series_cells=10, cell_resistance=curve)
        assert pack_resistance(p, 0.5) == pytest.approx(0.02)

    def test_current_discharge(self):
        i = battery_current(PACK80, 0.5, 3000.0)
        assert i == pytest.approx(10.054, abs=5e-4)
        # quadratic-root oracle: delivered power reconstructs exactly
        assert i * (300.0 - 0.16 * i) == pytest.approx(3000.0, rel=1e-9)

    def test_current_zero_power(self):
        assert battery_current(PACK80, 0.5, 0.0) == 0.0

    def test_current_regen(self):
        i = battery_current(PACK80, 0.5, -3000.0)
        assert i == pytest.approx(-9.947, abs=5e-4)
        assert i * (300.0 - 0.16 * i) == pytest.approx(-3000.0, rel=1e-9)

    def test_current_root_oracle_random(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            p = random_electrical(rng)
            soc = float(rng.uniform(0, 1))
            voc = pack_ocv(p, soc)
            rb = pack_resistance(p, soc)
            power = float(rng.uniform(-0.9, 0.9)) * voc * voc / (4 * rb)
            i = battery_current(p, soc, power)
            assert i * (voc - rb * i) == pytest.approx(power, rel=1e-9, abs=1e-9)
            assert i <= voc / (2 * rb)  # smaller root

    def test_infeasible_power(self):
        limit = feasible_power_limit(PACK80, 0.5)
        assert limit == pytest.approx(140625.0)
        with pytest.raises(InfeasiblePowerError):
            battery_current(PACK80, 0.5, limit * 1.0001)

    def test_terminal_voltage(self):
        assert terminal_voltage(PACK80, 0.5, 10.054) == pytest.approx(298.391, abs=1e-3)
        assert terminal_voltage(PACK80, 0.5, 0.0) == pytest.approx(300.0)
        assert terminal_voltage(PACK80, 0.5, -9.947) == pytest.approx(301.59, abs=1e-2)

    def test_power_balance_random(self):
        rng = np.random.default_rng(4)
        for _ in range(500):
            p = random_electrical(rng)
            soc = float(rng.uniform(0, 1))
            voc = pack_ocv(p, soc)
            rb = pack_resistance(p, soc)
            i = float(rng.uniform(-200, 200))
            vo = terminal_voltage(p, soc, i)
            assert voc * i == pytest.approx(vo * i + rb * i * i, rel=1e-9, abs=1e-9)

    def test_soc_rate(self):
        p = PACK80
        assert soc_rate(p, 15.0) == pytest.approx(-2.7778e-4, rel=1e-4)
        assert soc_rate(p, 0.0) == 0.0
        assert soc_rate(p, -15.0) == pytest.approx(2.7778e-4, rel=1e-4)

    def test_soc_rate_odd(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            i = float(rng.uniform(-300, 300))
            assert soc_rate(PACK80, i) == -soc_rate(PACK80, -i)


class TestThermal:
    def test_heat_generation(self):
        assert heat_generation(0.002, 10.0) == pytest.approx(0.2)
        assert heat_generation(0.002, 0.0) == 0.0
        assert heat_generation(0.002, -10.0) == heat_generation(0.002, 10.0)

    def test_cooling_coefficients_worked_example(self):
        c = cooling_coefficients(THERMAL)
        r_ku = 1.0 / (25.0 * 0.02755)
        r_u = 1.0 / (1.2 * 1005.0 * 0.005)
        assert r_ku == pytest.approx(1.4519, abs=1e-4)
        assert r_u == pytest.approx(0.16584, abs=1e-5)
        assert c.alpha2 == pytest.approx(-1.0 / (r_ku + r_u))
        assert c.alpha2 == pytest.approx(-0.61815, abs=1e-5)
        assert c.alpha3 == c.alpha2  # identical channels
        assert c.alpha1 == pytest.approx(1.2363, abs=1e-4)

    def test_alpha_sum_zero_exact(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            t = BatteryThermalParams(
                h_bar_1=float(rng.uniform(5, 60)),
                h_bar_2=float(rng.uniform(5, 60)),
                channel_area=float(rng.uniform(0.005, 0.1)),
                air_flow_1=float(rng.uniform(0.001, 0.02)),
                air_flow_2=float(rng.uniform(0.001, 0.02)),
            )
            c = cooling_coefficients(t)
            assert c.alpha1 > 0 and c.alpha2 < 0 and c.alpha3 < 0
            assert c.alpha1 + (c.alpha2 + c.alpha3) == 0.0

    def test_heat_removed_equilibrium_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            t = BatteryThermalParams(
                h_bar_1=float(rng.uniform(5, 60)),
                h_bar_2=float(rng.uniform(5, 60)),
                air_flow_1=float(rng.uniform(0.001, 0.02)),
                air_flow_2=float(rng.uniform(0.001, 0.02)),
            )
            c = cooling_coefficients(t)
            theta = float(rng.uniform(-10, 60))
            assert heat_removed(c, theta, theta, theta) == 0.0

    def test_heat_removed_values(self):
        c = cooling_coefficients(THERMAL)
        assert heat_removed(c, 30.0, 20.0, 20.0) == pytest.approx(c.alpha1 * 10.0)
        assert heat_removed(c, 30.0, 20.0, 20.0) == pytest.approx(12.363, abs=1e-3)
        assert heat_removed(c, 10.0, 20.0, 20.0) == pytest.approx(-12.363, abs=1e-3)

    def test_theta_rate_worked_example(self):
        c = cooling_coefficients(THERMAL)
        rate = theta_rate(THERMAL, c, 0.002, 10.0, 20.1)
        expected = (0.2 - c.alpha1 * 0.1) / 3072.0
        assert rate == pytest.approx(expected, rel=1e-9)
        assert rate == pytest.approx(2.485e-5, rel=2e-3)

    def test_theta_rate_equilibrium(self):
        c = cooling_coefficients(THERMAL)
        assert theta_rate(THERMAL, c, 0.002, 0.0, 20.0) == 0.0

    def test_equilibrium_temperature_oracle(self):
        # independent oracle: integrate Euler to steady state, compare with
        # theta_eq = theta_in + R*I^2/alpha1
        c = cooling_coefficients(THERMAL)
        r_cell, i_b = 0.01, 60.0
        theta = 20.0
        dt = 100.0  # well below stability bound m*Cp/alpha1 ~ 2485 s
        prev = None
        for _ in range(4000):
            prev = theta
            theta = theta + dt * theta_rate(THERMAL, c, r_cell, i_b, theta)
            assert theta >= prev  # monotone approach from below
        theta_eq = 20.0 + r_cell * i_b * i_b / c.alpha1
        assert theta == pytest.approx(theta_eq, rel=1e-9)


class TestStepState:
    def test_fixed_point(self):
        c = cooling_coefficients(THERMAL)
        s0 = BatteryState(soc=0.5, theta=20.0)
        s1 = step_state(PACK80, THERMAL, c, s0, 0.0, 1.0)
        assert s1.soc == s0.soc
        assert s1.theta == s0.theta

    def test_worked_chain(self):
        c = cooling_coefficients(THERMAL)
        s0 = BatteryState(soc=0.5, theta=20.0)
        s1 = step_state(PACK80, THERMAL, c, s0, 3000.0, 1.0)
        i = battery_current(PACK80, 0.5, 3000.0)
        assert s0.soc - s1.soc == pytest.approx(i / 54000.0, rel=1e-12)
        assert s0.soc - s1.soc == pytest.approx(1.862e-4, rel=1e-3)

    def test_infeasible_propagates(self):
        c = cooling_coefficients(THERMAL)
        with pytest.raises(InfeasiblePowerError):
            step_state(PACK80, THERMAL, c, BatteryState(0.5, 20.0), 150000.0, 1.0)

    def test_dt_halving_first_order(self):
        # halving dt changes the 660-step endpoint by less than 10x the
        # previous halving's change
        rng = np.random.default_rng(8)
        currents = rng.uniform(-80, 80, 660)
        c = cooling_coefficients(THERMAL)

        def integrate(substeps):
            soc, theta = 0.5, 20.0
            h = 1.0 / substeps
            for i in currents:
                for _ in range(substeps):
                    soc = soc + h * soc_rate(PACK80, i)
                    theta = theta + h * theta_rate(THERMAL, c, 0.002, i, theta)
            return soc, theta

        s1, t1 = integrate(1)
        s2, t2 = integrate(2)
        s4, t4 = integrate(4)
        d12 = abs(t1 - t2)
        d24 = abs(t2 - t4)
        assert d24 < 10 * d12
        assert abs(s2 - s4) <= 10 * max(abs(s1 - s2), 1e-18)
