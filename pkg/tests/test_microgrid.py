import math

import numpy as np
import pytest

from syncnet import microgrid as mg
from syncnet.netgraph import NetworkGraph
from syncnet.simcore import RngStream, TimeGrid, TimeSeries, integrate_rk4


@pytest.fixture(scope="module")
def short_runs():
    """One load step (0.33 -> 0.67 pu at 20 s), 50 s long; cheap enough for unit tests."""
    load = mg.LoadSchedule([(0.0, 0.33), (20.0, 0.67)])
    out = {}
    for scheme, delta in (("radapi", 5e-4), ("radapi0", 0.0), ("dapi", 5e-4)):
        sc = mg.nominal_scenario(scheme.rstrip("0"), load=load, t_end=50.0)
        sc.control.Delta = delta
        out[scheme] = (sc, mg.simulate(sc))
    return out


def test_power_flow_flat():
    net = mg.LineNetwork.two_bus(0.3)
    P, _ = mg.power_flow([0.2, 0.2], net)
    np.testing.assert_allclose(P, 0.0, atol=1e-15)


def test_power_flow_two_bus_formula():
    P, _ = mg.power_flow([0.1, 0.0], mg.LineNetwork.two_bus(1.0))
    assert P[0] == pytest.approx(math.sin(0.1), abs=1e-15)
    assert P[1] == pytest.approx(-P[0], abs=1e-15)


def test_power_flow_antisymmetric_three_bus():
    X = np.array([[np.inf, 0.2, 0.5], [0.2, np.inf, 0.4], [0.5, 0.4, np.inf]])
    net = mg.LineNetwork(np.array([1.0, 1.05, 0.98]), X)
    d = np.array([0.05, -0.1, 0.2])
    P, _ = mg.power_flow(d, net)
    assert P.sum() == pytest.approx(0.0, abs=1e-14)
    b = net.susceptance
    flows = b * np.sin(d[:, None] - d[None, :])
    np.testing.assert_allclose(flows, -flows.T, atol=1e-15)


def _idle(scheme="droop", split=(1.0, 0.0), load=0.0, identical=False):
    invs = [mg.InverterParams(m_p=0.01 * mg.OMEGA0), mg.InverterParams(m_p=(0.01 if identical else 0.02) * mg.OMEGA0)]
    return mg.MicrogridScenario(invs, mg.LineNetwork.two_bus(0.1), NetworkGraph(2, ((0, 1, 1.0),)),
                                mg.ControlConfig(scheme=scheme), load=mg.LoadSchedule([(0.0, load)], list(split)),
                                noise_sigma=0.0)


def test_droop_equilibrium():
    sysm = mg.MicrogridSystem(_idle())
    dx = mg.droop_rhs(sysm, 0.0, sysm.initial_state())
    assert np.all(dx[sysm.lay.omega] == 0.0)


def test_droop_frequency_sags_under_load():
    sysm = mg.MicrogridSystem(_idle(load=0.5))
    dx = mg.droop_rhs(sysm, 0.0, sysm.initial_state())
    assert dx[sysm.lay.omega][0] < 0


def test_identical_inverters_identical_trajectories():
    sc = _idle(split=(0.5, 0.5), load=0.4, identical=True)
    sc.t_end = 5.0
    ts = mg.simulate(sc)
    for name in ("omega", "Pm", "delta"):
        np.testing.assert_array_equal(ts[f"{name}_0"], ts[f"{name}_1"])


def test_dapi_consensus_is_fixed_point():
    out = mg.dapi_update([mg.OMEGA0] * 3, [0.4] * 3, 0.5, 1.0, [(0, 1, 1.0), (1, 2, 1.0)])
    np.testing.assert_array_equal(out, 0.0)


def test_dapi_isolated_node_is_pure_integral():
    out = mg.dapi_update([mg.OMEGA0 + 0.2], [0.0], 0.5, 2.0, [])
    assert out[0] == pytest.approx(-0.1)


def test_radapi_gain_frozen_without_leakage():
    _, dc = mg.radapi_update([mg.OMEGA0] * 2, [1.0, 1.0], [0.7], [(0, 1, 1.0)], Delta=0.0)
    assert dc[0] == 0.0


def test_radapi_gain_decay_rate():
    Delta = 5e-4
    edges = [(0, 1, 1.0)]

    def rhs(t, x):
        return mg.radapi_update([mg.OMEGA0] * 2, [0.3, 0.3], x, edges, Delta=Delta)[1]

    ts = integrate_rk4(rhs, [2.0], TimeGrid.span(2000.0, 1.0))
    slope = np.polyfit(ts.times, np.log(ts["x0"]), 1)[0]
    assert slope == pytest.approx(-Delta, rel=1e-9)


def test_radapi_gain_clamp():
    _, dc = mg.radapi_update([mg.OMEGA0] * 2, [0.0, 0.0], [1.0], [(0, 1, 1.0)], Delta=0.5,
                             min_gain_clamp=True, clamp_value=1.0)
    assert dc[0] == 0.0


def test_fault_delay_identity_and_lag():
    y = np.arange(100, dtype=float)
    assert np.array_equal(mg.inject_fault(y, mg.FaultSpec("time_delay", delay=0.0), 0.01), y)
    lagged = mg.inject_fault(y, mg.FaultSpec("time_delay", delay=0.25), 0.01)
    np.testing.assert_array_equal(lagged[25:], y[:-25])


def test_fault_malicious_only_inside_window():
    y = np.zeros((1000, 2))
    f = mg.FaultSpec("malicious_data", sigma=1e-4, t_start=3.0, t_end=6.0)
    out = mg.inject_fault(y, f, 0.01, RngStream(3))
    t = 0.01 * np.arange(1000)
    inside = (t >= 3.0) & (t < 6.0)
    assert np.all(out[~inside] == 0.0)
    assert np.all(out[inside] != 0.0)


def test_fault_delay_below_step_rejected():
    with pytest.raises(ValueError):
        mg.inject_fault(np.zeros(10), mg.FaultSpec("time_delay", delay=0.001), 0.01)


@pytest.mark.parametrize("d, r, g", [(30, 20, 33.333), (40, 18, 55.0), (12, 12, 0.0)])
def test_net_gain(d, r, g):
    assert mg.net_gain(d, r) == pytest.approx(g, abs=1e-3)


def test_lure_blocks():
    A, B, C, phi = mg.lure_decompose(2)
    assert A.shape == (4, 4)
    ev = np.sort(np.linalg.eigvals(A).real)
    np.testing.assert_allclose(ev, [-1, -1, 0, 0], atol=1e-12)
    assert B.shape == (4, 2) and C.shape == (2, 4)
    np.testing.assert_array_equal(C, B.T)  # P B = C^T with P = I
    np.testing.assert_array_equal(B[2:], np.eye(2))
    np.testing.assert_allclose(phi(0.0, np.array([0.3, 0.3])), 0.0, atol=1e-15)


def test_sector_examples():
    x = np.linspace(-np.pi / 2, np.pi / 2, 201)
    q, r = mg.sector_bound_check(np.sin, x)
    assert q >= 0 and r <= 1
    q, r = mg.sector_bound_check(lambda v: v, x)
    assert q == pytest.approx(1.0) and r == pytest.approx(1.0)


def test_sector_on_trajectory(short_runs):
    sc, ts = short_runs["radapi"]
    theta = ts["delta_0"] - ts["delta_1"]
    X = sc.net.X[0, 1]
    q, _ = mg.sector_bound_check(lambda v: sc.inverters[0].m_p * math.sin(v) / X, theta[::25])
    assert q >= 0


def test_incremental_passivity_sample():
    y = np.linspace(-1.2, 1.2, 50)
    assert mg.incremental_passivity_margin(y, np.sin(y)) >= -1e-9


def _consensus_series(c):
    t = np.arange(len(c), dtype=float)
    n = len(t)
    ch = {"delta_0": np.full(n, 0.1), "delta_1": np.full(n, 0.1), "omega_0": np.full(n, mg.OMEGA0),
          "omega_1": np.full(n, mg.OMEGA0), "Omega_0": np.full(n, 0.2), "Omega_1": np.full(n, 0.2), "c_0_1": c}
    return TimeSeries(t, ch)


def test_storage_zero_at_consensus():
    sc = mg.nominal_scenario()
    st = mg.storage_functions(_consensus_series(np.zeros(5)), sc)
    np.testing.assert_array_equal(st["Z"], 0.0)


def test_storage_rate_is_leakage_term():
    sc = mg.nominal_scenario()
    Delta, Gamma = 0.05, sc.control.Gamma
    t = np.arange(400, dtype=float)
    c = 0.8 * np.exp(-Delta * t)
    st = mg.storage_functions(_consensus_series(c), sc)
    expected = np.array([mg.gain_decay_term([ci], Gamma, Delta) for ci in c])
    np.testing.assert_allclose(st["Zdot"][1:-1], expected[1:-1], rtol=2e-3)


def test_gain_symmetry_structural(short_runs):
    sc, ts = short_runs["radapi"]
    gains = [k for k in ts.channels if k.startswith("c_")]
    assert gains == ["c_0_1"]
    assert len(gains) == sc.coupling.edge_count


def test_gains_rise_in_transient_then_relax(short_runs):
    sc, ts = short_runs["radapi"]
    c = ts["c_0_1"]
    t = ts.times
    k = int(np.argmax(c))
    assert c.max() > sc.control.c_init
    assert 20.0 <= t[k] < 50.0
    assert c[-1] < c.max()


def test_gains_monotone_without_leakage(short_runs):
    _, ts = short_runs["radapi0"]
    assert np.all(np.diff(ts["c_0_1"]) >= 0)


def test_frequency_returns_after_step(short_runs):
    for key in ("dapi", "radapi"):
        sc, ts = short_runs[key]
        tab = mg.settling_table(ts, sc)
        assert all(v is not None for v in tab["freq"])


def test_csv_channels(short_runs, tmp_path):
    _, ts = short_runs["dapi"]
    ts.to_csv(tmp_path / "mg.csv")
    head = (tmp_path / "mg.csv").read_text().splitlines()[0].split(",")
    for name in ("time", "omega_0", "Omega_1", "P_0", "c_0_1"):
        assert name in head
