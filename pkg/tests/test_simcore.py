import math

import numpy as np
import pytest

from syncnet import tcl
from syncnet.simcore import (DegenerateInputError, RngStream, TimeGrid, TimeSeries, gaussian_std,
                             integrate_rk4, sample_gaussian, settling_time, step_hybrid)


def decay(t, x):
    return -x


def test_rk4_exponential():
    ts = integrate_rk4(decay, [1.0], TimeGrid.span(1.0, 0.01))
    assert abs(ts["x0"][-1] - math.exp(-1)) < 1e-8


def test_rk4_order():
    errs = []
    dts = [0.1, 0.05, 0.025, 0.0125]
    for dt in dts:
        ts = integrate_rk4(decay, [1.0], TimeGrid.span(2.0, dt))
        errs.append(abs(ts["x0"][-1] - math.exp(-2)))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)


def test_harmonic_energy_over_one_period():
    dt = 2 * np.pi / 2000
    ts = integrate_rk4(lambda t, x: np.array([x[1], -x[0]]), [1.0, 0.0], TimeGrid(0.0, dt, 2000))
    e = ts["x0"] ** 2 + ts["x1"] ** 2
    assert abs(e[-1] - e[0]) / e[0] < 1e-6
    assert ts["x0"][-1] == pytest.approx(1.0, abs=1e-9)


def test_divergence_flagged():
    ts = integrate_rk4(lambda t, x: x ** 2, [1.0], TimeGrid.span(2.0, 0.01))
    assert ts.diverged
    assert ts.diverged_at < 1.0 + 0.05
    assert np.isnan(ts["x0"][-1])


def test_relay_switches_within_one_step():
    # ramp x' = 1 toggling at 0.5 (up) with hold otherwise
    grid = TimeGrid.span(1.0, 0.01)
    ts = step_hybrid(lambda t, x, q: np.ones(1), lambda x, q: np.where(x > 0.5, 1.0, q), [0.0], [0.0], grid)
    k = int(np.argmax(ts["q0"] > 0))
    assert ts["x0"][k] > 0.5
    assert ts["x0"][k - 1] <= 0.5


def test_tcl_temperature_confined():
    p = tcl.TclParams()
    dt = 1e-3
    ts = tcl.simulate_hybrid(p, 10.0, dt)
    first = int(np.argmax(np.diff(ts["s"]) != 0)) + 1
    slope = max(abs(tcl.hybrid_tcl_rhs(p.T_min, 1, p)), abs(tcl.hybrid_tcl_rhs(p.T_max, 0, p)))
    eps = dt * slope * 1.01
    T = ts["T"][first:]
    assert T.min() >= p.T_min - eps
    assert T.max() <= p.T_max + eps


def test_zero_deadband_trips_chattering_guard():
    p = tcl.TclParams(deadband=0.0)
    with pytest.raises(DegenerateInputError):
        tcl.simulate_hybrid(p, 2.0, 1e-3, T0=p.T_s)


def test_sample_gaussian_zero_sigma():
    assert sample_gaussian(RngStream(1), 3.25, 0.0) == 3.25


def test_sample_gaussian_clt():
    draws = sample_gaussian(RngStream(5), 0.0, 1e-4, size=10 ** 6)
    std = gaussian_std(1e-4)
    assert std == pytest.approx(1e-2)
    assert abs(draws.mean()) < 3 * std / 1e3
    assert draws.std() == pytest.approx(std, rel=5e-3)


def test_std_convention():
    draws = sample_gaussian(RngStream(5), 0.0, 1e-4, noise_is_variance=False, size=10 ** 5)
    assert draws.std() == pytest.approx(1e-4, rel=1e-2)


def test_rng_reproducible():
    a, b = RngStream(42), RngStream(42)
    np.testing.assert_array_equal(a.normal(100), b.normal(100))
    np.testing.assert_array_equal(a.uniform(7), b.uniform(7))
    assert not np.array_equal(RngStream(42).spawn(1).uniform(5), RngStream(42).spawn(2).uniform(5))


def test_uniform_in_unit_interval():
    u = RngStream(0).uniform(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0


def test_settling_constant_series():
    t = np.linspace(2.0, 5.0, 31)
    assert settling_time(t, np.zeros_like(t), 0.0, 0.1) == 2.0


def test_settling_exponential():
    t = np.linspace(0.0, 10.0, 100_001)
    tau = 0.7
    y = np.exp(-t / tau)
    assert settling_time(t, y, 0.0, math.exp(-3)) == pytest.approx(3 * tau, abs=2e-4)


def test_settling_not_settled():
    t = np.linspace(0.0, 1.0, 11)
    y = np.zeros_like(t)
    y[-1] = 1.0
    assert settling_time(t, y, 0.0, 0.5) is None


def test_settling_on_series_with_window():
    t = np.linspace(0.0, 4.0, 401)
    ts = TimeSeries(t, {"y": np.where(t < 1.0, 1.0, 0.0)})
    assert settling_time(ts, "y", 0.0, 0.1, t_start=0.5) == pytest.approx(1.0)


def test_csv_round_trip(tmp_path):
    t = np.linspace(0.0, 1.0, 5)
    ts = TimeSeries(t, {"a": np.sqrt(t) / 3.0, "b": np.exp(t)})
    ts.to_csv(tmp_path / "x.csv")
    assert (tmp_path / "x.csv").read_text().splitlines()[0] == "time,a,b"
    back = TimeSeries.from_csv(tmp_path / "x.csv")
    np.testing.assert_array_equal(back.times, t)
    np.testing.assert_array_equal(back["a"], ts["a"])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_normal_rows_matches_row_draws(n):
    a, b = RngStream(9), RngStream(9)
    rows = a.normal_rows(50, n)
    np.testing.assert_array_equal(rows, np.array([b.normal(n) for _ in range(50)]))
    assert a.counter == b.counter
