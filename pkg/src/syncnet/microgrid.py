"""Islanded microgrid: droop primary control with DAPI / RADAPI secondary
frequency control, communication faults, Lure'-form diagnostics and the
settling-time comparison metrics.

The angle states are integrated in a frame rotating at ``omega0``
(``d(delta)/dt = omega - omega0``); only angle differences enter the power
flow, so this is the same trajectory as the stationary-frame form.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .netgraph import NetworkGraph
from .simcore import NOT_SETTLED, RngStream, TimeSeries, gaussian_std, settling_time

OMEGA0 = 2 * np.pi * 50.0
SCHEMES = ("droop", "dapi", "radapi")
FAULT_KINDS = ("none", "time_delay", "malicious_data")
FREQ_BAND_REL = 1e-3
SHARE_BAND = 0.01


@dataclass
class InverterParams:
    m_p: float
    omega0: float = OMEGA0
    V0: float = 1.0
    m_q: float = 0.05
    P_star: float = 0.0
    Q_star: float = 0.0
    tau_p: float = 0.5
    tau_q: float = 0.5
    k_i: float = 1.0
    capacity: float = 1.0

    def __post_init__(self):
        if self.m_p <= 0 or self.m_q <= 0:
            raise ValueError("droop coefficients must be positive")
        if self.tau_p <= 0 or self.tau_q <= 0 or self.k_i <= 0:
            raise ValueError("time constants and k_i must be positive")


@dataclass
class LineNetwork:
    """Bus voltages ``E`` and symmetric reactances ``X`` (``inf`` = no line)."""

    E: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        self.E = np.asarray(self.E, dtype=float)
        self.X = np.asarray(self.X, dtype=float).copy()
        n = self.E.size
        if self.X.shape != (n, n):
            raise ValueError("X must be n x n")
        np.fill_diagonal(self.X, np.inf)
        if not np.array_equal(self.X, self.X.T):
            raise ValueError("X must be symmetric")
        if np.any(self.E <= 0) or np.any(self.X <= 0):
            raise ValueError("E and X must be positive")

    @classmethod
    def two_bus(cls, X: float = 0.1, E=(1.0, 1.0)) -> "LineNetwork":
        return cls(np.array(E, float), np.array([[np.inf, X], [X, np.inf]]))

    @property
    def susceptance(self) -> np.ndarray:
        """``E_i E_j / X_ij`` with zeros for absent lines."""
        return np.outer(self.E, self.E) / self.X

    @property
    def X_node(self) -> np.ndarray:
        inv = (1.0 / self.X).sum(axis=1)
        with np.errstate(divide="ignore"):
            return np.where(inv > 0, 1.0 / inv, np.inf)


def power_flow(delta, net: LineNetwork):
    """Active and reactive injections for angles ``delta``."""
    delta = np.asarray(delta, dtype=float)
    b = net.susceptance
    diff = delta[:, None] - delta[None, :]
    P = (b * np.sin(diff)).sum(axis=1)
    Q = net.E ** 2 / net.X_node - (b * np.cos(diff)).sum(axis=1)
    return P, Q


@dataclass
class ControlConfig:
    scheme: str = "radapi"
    Gamma: float = 1.0
    Delta: float = 5e-4
    c_init: float = 0.5
    min_gain_clamp: bool = False
    clamp_value: float = 1.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.Gamma <= 0 or self.Delta < 0:
            raise ValueError("Gamma must be > 0 and Delta >= 0")


@dataclass
class FaultSpec:
    """Communication fault on the values exchanged between controllers.

    ``sigma`` is the malicious-noise level, read as a variance when
    ``noise_is_variance`` is set.
    """

    kind: str = "none"
    delay: float = 0.0
    sigma: float = 1e-4
    noise_is_variance: bool = True
    t_start: float = 30.0
    t_end: float = 60.0

    def __post_init__(self):
        if self.kind not in FAULT_KINDS:
            raise ValueError(f"fault kind must be one of {FAULT_KINDS}")


@dataclass
class LoadSchedule:
    """Piecewise-constant total load (pu) split over buses."""

    steps: list = field(default_factory=lambda: [(0.0, 0.33), (60.0, 0.67), (120.0, 0.33)])
    split: list = field(default_factory=lambda: [1.0, 0.0])

    def total(self, t: float) -> float:
        v = 0.0
        for ts, val in self.steps:
            if t >= ts - 1e-12:
                v = val
        return v

    @classmethod
    def square_wave(cls, low=0.33, high=0.67, period=120.0, t_end=180.0, split=(1.0, 0.0)):
        steps, t, hi = [], 0.0, False
        while t < t_end - 1e-12:
            steps.append((t, high if hi else low))
            hi = not hi
            t += period / 2
        return cls(steps, list(split))

    @property
    def step_times(self) -> list:
        return [float(ts) for ts, _ in self.steps]


@dataclass
class MicrogridScenario:
    inverters: list
    net: LineNetwork
    coupling: NetworkGraph
    control: ControlConfig = field(default_factory=ControlConfig)
    fault: FaultSpec = field(default_factory=FaultSpec)
    load: LoadSchedule = field(default_factory=LoadSchedule)
    noise_sigma: float = 1e-4
    noise_is_variance: bool = True
    filtered_measurement: bool = False
    t_end: float = 180.0
    dt: float = 0.01
    seed: int = 1

    @property
    def n(self) -> int:
        return len(self.inverters)


def nominal_scenario(scheme: str = "radapi", **overrides) -> MicrogridScenario:
    """Two-inverter reference case: 1:2 capacity ratio, one tie line, load at
    bus 0 switching 0.33/0.67 pu every 60 s."""
    invs = [InverterParams(m_p=0.01 * OMEGA0, k_i=1.0),
            InverterParams(m_p=0.02 * OMEGA0, k_i=5.0)]
    sc = MicrogridScenario(invs, LineNetwork.two_bus(0.1), NetworkGraph(2, ((0, 1, 1.0),)),
                           ControlConfig(scheme=scheme))
    for k, v in overrides.items():
        setattr(sc, k, v)
    return sc


class _Layout:
    def __init__(self, n: int, m: int):
        self.n, self.m = n, m
        self.delta = slice(0, n)
        self.omega = slice(n, 2 * n)
        self.Omega = slice(2 * n, 3 * n)
        self.Pm = slice(3 * n, 4 * n)
        self.V = slice(4 * n, 5 * n)
        self.c = slice(5 * n, 5 * n + m)
        self.size = 5 * n + m


class MicrogridSystem:
    """Right-hand side assembly for one scenario."""

    def __init__(self, sc: MicrogridScenario):
        if sc.coupling.node_count != sc.n or sc.net.E.size != sc.n:
            raise ValueError("inverter, network and coupling sizes differ")
        self.sc = sc
        self.lay = _Layout(sc.n, sc.coupling.edge_count)
        g = sc.coupling
        self.ei = np.array([e[0] for e in g.edges], dtype=int)
        self.ej = np.array([e[1] for e in g.edges], dtype=int)
        self.ew = g.weights
        p = sc.inverters
        self.omega0 = p[0].omega0
        self.m_p = np.array([q.m_p for q in p])
        self.m_q = np.array([q.m_q for q in p])
        self.P_star = np.array([q.P_star for q in p])
        self.Q_star = np.array([q.Q_star for q in p])
        self.tau_p = np.array([q.tau_p for q in p])
        self.tau_q = np.array([q.tau_q for q in p])
        self.k_i = np.array([q.k_i for q in p])
        self.V0 = np.array([q.V0 for q in p])
        self.split = np.asarray(sc.load.split, dtype=float)
        # constants hoisted out of the right-hand side
        self._b = sc.net.susceptance
        self._Q0 = sc.net.E ** 2 / sc.net.X_node
        m = g.edge_count
        self._Ii = np.zeros((sc.n, m))
        self._Ij = np.zeros((sc.n, m))
        self._Ii[self.ei, np.arange(m)] = 1.0
        self._Ij[self.ej, np.arange(m)] = 1.0
        self._c_static = np.full(m, sc.control.c_init)

    def initial_state(self) -> np.ndarray:
        L = self.lay
        x = np.zeros(L.size)
        x[L.omega] = self.omega0
        x[L.V] = self.V0
        c0 = self.sc.control.c_init
        if self.sc.control.min_gain_clamp:
            c0 = max(c0, self.sc.control.clamp_value)
        x[L.c] = c0
        return x

    def injections(self, t: float, x: np.ndarray):
        d = x[self.lay.delta]
        diff = d[:, None] - d[None, :]
        P = (self._b * np.sin(diff)).sum(axis=1)
        Q = self._Q0 - (self._b * np.cos(diff)).sum(axis=1)
        return P + self.sc.load.total(t) * self.split, Q

    def consensus(self, c: np.ndarray, Om: np.ndarray, Om_seen: np.ndarray) -> np.ndarray:
        """sum_j c_ij (Omega_i - Omega_j) with neighbour values as received."""
        w = c * self.ew
        return self._Ii @ (w * (Om[self.ei] - Om_seen[self.ej])) + self._Ij @ (w * (Om[self.ej] - Om_seen[self.ei]))

    def rhs(self, t, x, d, seen=None):
        """Full derivative. ``seen`` is (omega, Omega) as received over the
        network, or None for ideal communication."""
        L, ctl = self.lay, self.sc.control
        om, Om, c = x[L.omega], x[L.Omega], x[L.c]
        P, Q = self.injections(t, x)
        om_s, Om_s = (om, Om) if seen is None else seen
        dx = np.empty_like(x)
        dx[L.delta] = om - self.omega0
        dx[L.Pm] = (P - x[L.Pm]) / self.tau_p
        dx[L.V] = (self.V0 - x[L.V] - self.m_q * (Q - self.Q_star)) / self.tau_q
        if ctl.scheme == "droop":
            dOm = np.zeros(L.n)
        else:
            cc = c if ctl.scheme == "radapi" else self._c_static
            dOm = (-(om_s - self.omega0) - self.consensus(cc, Om, Om_s)) / self.k_i
        dx[L.Omega] = dOm
        if self.sc.filtered_measurement:
            # omega = omega0 - m_p (P_m - P*) + Omega held exactly by differentiation
            dx[L.omega] = -self.m_p * dx[L.Pm] + dOm + d / self.tau_p
        else:
            dx[L.omega] = (self.omega0 - om - self.m_p * (P - self.P_star) + Om + d) / self.tau_p
        if ctl.scheme == "radapi":
            diff = Om[self.ei] - Om[self.ej]
            dx[L.c] = -ctl.Delta * c + ctl.Gamma * diff ** 2
        else:
            dx[L.c] = 0.0
        return dx


def droop_rhs(system: MicrogridSystem, t: float, x: np.ndarray, d=None) -> np.ndarray:
    d = np.zeros(system.lay.n) if d is None else d
    return system.rhs(t, x, d)


def dapi_update(omega, Omega, c_static, k_i, edges, omega0=OMEGA0) -> np.ndarray:
    """dOmega/dt of the static-gain averaging integral law.

    ``edges`` is a sequence of ``(i, j, c_ij)``; ``c_static`` multiplies every
    edge weight.
    """
    omega, Omega = np.asarray(omega, float), np.asarray(Omega, float)
    out = -(omega - omega0)
    for i, j, w in edges:
        out[i] -= c_static * w * (Omega[i] - Omega[j])
        out[j] -= c_static * w * (Omega[j] - Omega[i])
    return out / np.asarray(k_i, float)


def radapi_update(omega, Omega, c, edges, Gamma=1.0, Delta=5e-4, omega0=OMEGA0, k_i=1.0,
                  min_gain_clamp=False, clamp_value=1.0):
    """(dOmega/dt, dc/dt) of the adaptive-gain law; ``c`` holds one value per
    edge so symmetry is structural."""
    omega, Omega, c = np.asarray(omega, float), np.asarray(Omega, float), np.asarray(c, float)
    dOm = -(omega - omega0)
    dc = np.zeros_like(c)
    for k, (i, j, w) in enumerate(edges):
        flow = c[k] * w * (Omega[i] - Omega[j])
        dOm[i] -= flow
        dOm[j] += flow
        dc[k] = -Delta * c[k] + Gamma * (Omega[i] - Omega[j]) ** 2
        if min_gain_clamp and c[k] <= clamp_value and dc[k] < 0:
            dc[k] = 0.0
    return dOm / np.asarray(k_i, float), dc


def inject_fault(samples, fault: FaultSpec, dt: float, rng: RngStream | None = None, t0: float = 0.0):
    """Apply a communication fault to a sampled channel (rows = time)."""
    y = np.array(samples, dtype=float)
    if fault.kind == "none":
        return y
    if fault.kind == "time_delay":
        if fault.delay == 0:
            return y
        if fault.delay < dt - 1e-12:
            raise ValueError("delay shorter than the sampling step")
        D = int(round(fault.delay / dt))
        out = np.empty_like(y)
        out[D:] = y[:-D] if D > 0 else y
        out[:D] = y[0]
        return out
    if rng is None:
        raise ValueError("malicious_data needs an rng")
    t = t0 + dt * np.arange(y.shape[0])
    win = (t >= fault.t_start) & (t < fault.t_end)
    std = gaussian_std(fault.sigma, fault.noise_is_variance)
    noise = rng.normal(y.shape) * std
    y[win] += noise[win]
    return y


def simulate(sc: MicrogridScenario) -> TimeSeries:
    """Integrate one scenario with RK4 and per-step held disturbances."""
    sysm = MicrogridSystem(sc)
    L = sysm.lay
    n = L.n
    rng = RngStream(sc.seed)
    fault_rng = rng.spawn(1)
    std = gaussian_std(sc.noise_sigma, sc.noise_is_variance)
    fstd = gaussian_std(sc.fault.sigma, sc.fault.noise_is_variance)
    steps = int(round(sc.t_end / sc.dt))
    dt = sc.dt
    x = sysm.initial_state()
    X = np.empty((steps + 1, L.size))
    X[0] = x
    D = 0
    if sc.fault.kind == "time_delay" and sc.fault.delay > 0:
        if sc.fault.delay < dt - 1e-12:
            raise ValueError("delay shorter than the integration step")
        D = int(round(sc.fault.delay / dt))
    clamp = sc.control.scheme == "radapi" and sc.control.min_gain_clamp
    zeros = np.zeros(n)
    dist = rng.normal_rows(steps, n) * std if std > 0 else None
    faults = fault_rng.normal_rows(steps, 2 * n) * fstd if sc.fault.kind == "malicious_data" else None
    for k in range(steps):
        t = k * dt
        d = dist[k] if dist is not None else zeros
        seen = None
        if D > 0:
            h = X[max(k - D, 0)]
            seen = (h[L.omega].copy(), h[L.Omega].copy())
        if faults is not None:
            noise = faults[k]
            if sc.fault.t_start <= t < sc.fault.t_end:
                seen = (x[L.omega] + noise[:n], x[L.Omega] + noise[n:])
        if seen is None:
            f = lambda tt, xx: sysm.rhs(tt, xx, d)
        else:
            f = lambda tt, xx, s=seen: sysm.rhs(tt, xx, d, s)
        k1 = f(t, x)
        k2 = f(t + dt / 2, x + dt / 2 * k1)
        k3 = f(t + dt / 2, x + dt / 2 * k2)
        k4 = f(t + dt, x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if clamp:
            x[L.c] = np.maximum(x[L.c], sc.control.clamp_value)
        if not np.isfinite(x).all() or np.abs(x).max() > 1e12:
            X[k + 1:] = np.nan
            ts = _to_series(sysm, np.arange(steps + 1) * dt, X)
            ts.diverged, ts.diverged_at = True, (k + 1) * dt
            return ts
        X[k + 1] = x
    return _to_series(sysm, np.arange(steps + 1) * dt, X)


def _to_series(sysm: MicrogridSystem, t, X) -> TimeSeries:
    L = sysm.lay
    ch = {}
    for name, sl in (("delta", L.delta), ("omega", L.omega), ("Omega", L.Omega), ("Pm", L.Pm), ("V", L.V)):
        for i, col in enumerate(X[:, sl].T):
            ch[f"{name}_{i}"] = col
    d = X[:, L.delta]
    load = np.array([sysm.sc.load.total(tt) for tt in t])
    P = np.einsum("ij,kij->ki", sysm._b, np.sin(d[:, :, None] - d[:, None, :])) + load[:, None] * sysm.split
    for i in range(L.n):
        ch[f"P_{i}"] = P[:, i]
    for k, (i, j) in enumerate(zip(sysm.ei, sysm.ej)):
        ch[f"c_{i}_{j}"] = X[:, L.c][:, k] if sysm.sc.control.scheme == "radapi" else np.full(len(t), sysm.sc.control.c_init)
    ch["load"] = load
    return TimeSeries(t, ch, {"unit": "s", "scheme": sysm.sc.control.scheme, "seed": sysm.sc.seed})


def _stack(ts: TimeSeries, prefix: str, n: int) -> np.ndarray:
    return np.column_stack([ts[f"{prefix}_{i}"] for i in range(n)])


def metric_signals(ts: TimeSeries, sc: MicrogridScenario) -> dict:
    """The three per-sample error signals compared against their bands.

    freq: max_i |omega_i - omega0|; input: max pairwise |Omega_i - Omega_j|;
    share: relative spread of m_p,i * P_m,i.
    """
    n = sc.n
    om = _stack(ts, "omega", n)
    Om = _stack(ts, "Omega", n)
    mp = np.array([p.m_p for p in sc.inverters]) * _stack(ts, "Pm", n)
    w0 = sc.inverters[0].omega0
    return {
        "freq": np.max(np.abs(om - w0), axis=1),
        "input": Om.max(axis=1) - Om.min(axis=1),
        "share": (mp.max(axis=1) - mp.min(axis=1)) / np.maximum(np.abs(mp.mean(axis=1)), 1e-12),
    }


def metric_bands(sc: MicrogridScenario) -> dict:
    w0 = sc.inverters[0].omega0
    return {"freq": FREQ_BAND_REL * w0, "input": FREQ_BAND_REL * w0, "share": SHARE_BAND}


def step_windows(sc: MicrogridScenario) -> list:
    edges = [t for t in sc.load.step_times if t < sc.t_end] + [sc.t_end]
    return list(zip(edges[:-1], edges[1:]))


def settling_table(ts: TimeSeries, sc: MicrogridScenario) -> dict:
    """Settling time per metric and per load window (seconds after the step,
    ``None`` if not settled)."""
    sig, bands = metric_signals(ts, sc), metric_bands(sc)
    out = {}
    for name, y in sig.items():
        row = []
        for a, b in step_windows(sc):
            s = settling_time(ts.times, y, 0.0, bands[name], a, b)
            row.append(NOT_SETTLED if s is NOT_SETTLED else s - a)
        out[name] = row
    return out


def scenario_settling(table: dict):
    """Worst settling time over metrics and windows (None if any unsettled)."""
    vals = [v for row in table.values() for v in row]
    if any(v is None for v in vals):
        return None
    return max(vals)


def step_settling(table: dict, sc: MicrogridScenario):
    """Worst settling time over windows that open on a load change.

    The window at t = 0 is the start-up transient from the initial state and
    is left out; ``None`` if any counted window does not settle.
    """
    keep = [k for k, (a, _) in enumerate(step_windows(sc)) if a > 0]
    vals = [row[k] for row in table.values() for k in keep]
    if not vals or any(v is None for v in vals):
        return None
    return max(vals)


def net_gain(dapi_metric: float, radapi_metric: float) -> float:
    if dapi_metric == 0:
        raise ZeroDivisionError("DAPI metric is zero")
    return (dapi_metric - radapi_metric) / dapi_metric * 100.0


def lure_decompose(n: int, m_p=None, P_star=None, net: LineNetwork | None = None):
    """Block matrices of the frequency-synchronization Lure' form.

    State ``x = (delta, omega)`` (time in units of the droop constant);
    ``A = [[0, I], [0, -I]]``, ``B = [0; I]``, ``C = [0, I]``. The returned
    nonlinearity maps angles to ``m_p (P(delta) - P*)``.
    """
    z, eye = np.zeros((n, n)), np.eye(n)
    A = np.block([[z, eye], [z, -eye]])
    B = np.vstack([z, eye])
    C = np.hstack([z, eye])
    m_p = np.ones(n) if m_p is None else np.asarray(m_p, float)
    P_star = np.zeros(n) if P_star is None else np.asarray(P_star, float)
    net = LineNetwork(np.ones(n), np.where(np.eye(n) > 0, np.inf, 1.0)) if net is None else net

    def phi(t, delta):
        return m_p * (power_flow(delta, net)[0] - P_star)

    return A, B, C, phi


def sector_bound_check(func, samples):
    """Empirical sector ``(q, r)``: min/max difference quotient over all
    sample pairs with distinct arguments."""
    y = np.asarray(samples, dtype=float).ravel()
    if y.size < 2:
        raise ValueError("need at least two samples")
    f = np.asarray([func(v) for v in y], dtype=float)
    dy = y[:, None] - y[None, :]
    df = f[:, None] - f[None, :]
    mask = np.abs(dy) > 1e-12
    if not mask.any():
        raise ValueError("samples are all equal")
    qt = df[mask] / dy[mask]
    return float(qt.min()), float(qt.max())


def incremental_passivity_margin(y, phi) -> float:
    """min over pairs of (y_j - y_i)(phi_j - phi_i)."""
    y, phi = np.asarray(y, float).ravel(), np.asarray(phi, float).ravel()
    return float(((y[:, None] - y[None, :]) * (phi[:, None] - phi[None, :])).min())


def storage_functions(ts: TimeSeries, sc: MicrogridScenario, c_star: float = 0.0) -> dict:
    """V, W, U, Z and a central-difference dZ/dt along a trajectory.

    Deviations are measured from the synchronized reference: angles about
    their mean, frequencies about ``omega0``; ``P = I``.
    """
    n = sc.n
    w0 = sc.inverters[0].omega0
    de = _stack(ts, "delta", n)
    de = de - de.mean(axis=1, keepdims=True)
    om = _stack(ts, "omega", n) - w0
    Om = _stack(ts, "Omega", n)
    g = sc.coupling
    V = 0.25 * (np.sum(de ** 2, axis=1) + np.sum(om ** 2, axis=1))
    W = np.zeros_like(V)
    U = np.zeros_like(V)
    for i, j, _ in g.edges:
        ch = ts[f"c_{i}_{j}"] - c_star
        # each undirected edge appears twice in the double sums
        W += 0.5 * ch ** 2 / sc.control.Gamma
        U += 0.5 * (Om[:, i] - Om[:, j]) ** 2
    Z = V + W + U
    return {"V": V, "W": W, "U": U, "Z": Z, "Zdot": np.gradient(Z, ts.times)}


def gain_decay_term(c, Gamma: float, Delta: float) -> float:
    """dW/dt at consensus: -(1/2) sum_ij (Delta/Gamma) c_ij^2 (edge-wise)."""
    c = np.asarray(c, float)
    return float(-Delta / Gamma * np.sum(c ** 2))


def passivity_diagnostics(ts: TimeSeries, sc: MicrogridScenario, settle_window: float = 25.0,
                          tol: float = 1e-6) -> dict:
    """Storage functions plus a check that dZ/dt <= tol outside excluded
    windows (each load step and fault window, extended by ``settle_window``)."""
    st = storage_functions(ts, sc)
    t = ts.times
    excl = np.zeros(t.size, bool)
    for ts_ in sc.load.step_times:
        excl |= (t >= ts_ - 1e-9) & (t < ts_ + settle_window)
    if sc.fault.kind != "none":
        excl |= (t >= sc.fault.t_start) & (t < sc.fault.t_end + settle_window)
    excl[:1] = excl[-1:] = True
    ok = ~excl & np.isfinite(st["Zdot"])
    worst = float(st["Zdot"][ok].max()) if ok.any() else float("nan")
    st.update({"checked": ok, "max_Zdot": worst, "non_increasing": bool(ok.any() and worst <= tol)})
    return st


def gain_fit(ts: TimeSeries, sc: MicrogridScenario, t_from: float):
    """Log-slope and terminal value of every gain after ``t_from``."""
    m = ts.times >= t_from
    out = {}
    for i, j, _ in sc.coupling.edges:
        c = ts[f"c_{i}_{j}"][m]
        slope = float(np.polyfit(ts.times[m], np.log(np.maximum(c, 1e-300)), 1)[0]) if c.size > 2 else float("nan")
        out[f"c_{i}_{j}"] = {"log_slope": slope, "terminal": float(c[-1]) if c.size else float("nan")}
    return out


def compare_schemes(base: MicrogridScenario) -> dict:
    """Run DAPI and RADAPI on the same scenario and seed; summary dict."""
    res = {}
    for scheme in ("dapi", "radapi"):
        sc = _with_scheme(base, scheme)
        ts = simulate(sc)
        tab = settling_table(ts, sc)
        res[scheme] = {"series": ts, "scenario": sc, "table": tab, "settling": step_settling(tab, sc),
                       "settling_all": scenario_settling(tab)}
    for key, field_ in (("net_gain", "settling"), ("net_gain_all", "settling_all")):
        d, r = res["dapi"][field_], res["radapi"][field_]
        res[key] = None if (d is None or r is None) else net_gain(d, r)
    per_metric = {}
    for name in res["dapi"]["table"]:
        dv, rv = res["dapi"]["table"][name], res["radapi"]["table"][name]
        dd = None if None in dv else max(dv)
        rr = None if None in rv else max(rv)
        per_metric[name] = {"dapi": dd, "radapi": rr}
    res["per_metric"] = per_metric
    return res


def _with_scheme(sc: MicrogridScenario, scheme: str) -> MicrogridScenario:
    c = ControlConfig(**{**asdict(sc.control), "scheme": scheme})
    return MicrogridScenario(sc.inverters, sc.net, sc.coupling, c, sc.fault, sc.load, sc.noise_sigma,
                             sc.noise_is_variance, sc.filtered_measurement, sc.t_end, sc.dt, sc.seed)
