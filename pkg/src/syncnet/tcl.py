"""Thermostatically controlled load (TCL) fleets.

Three models share the switching-signal view of a TCL:

* hybrid hysteresis thermal model (temperature + relay),
* Boolean Kuramoto phase oscillators with delay/advance offsets,
* distributed frequency averaging with fixed phase offsets.

Time is in hours for the thermal and phase models (``R C`` in h) and in
seconds for the averaging model, whose frequencies are cyclic (Hz).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .simcore import RngStream, TimeGrid, TimeSeries, step_hybrid

TRACE_CAP = 100


@dataclass
class TclParams:
    """Thermal parameters (cooling unit, s = 1 means compressor ON).

    ``R`` in degC/kW, ``C`` in kWh/degC, so ``R*C`` is in hours.
    """

    T_a: float = 32.0
    deadband: float = 0.5
    R: float = 2.0
    C: float = 10.0
    P: float = 14.0
    eta: float = 1.0
    T_s: float = 20.0

    def __post_init__(self):
        if self.R <= 0 or self.C <= 0 or self.P <= 0:
            raise ValueError("R, C and P must be positive")
        if self.deadband < 0:
            raise ValueError("deadband must be >= 0")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")

    @property
    def T_min(self) -> float:
        return self.T_s - self.deadband / 2

    @property
    def T_max(self) -> float:
        return self.T_s + self.deadband / 2

    @property
    def RC(self) -> float:
        return self.R * self.C


TABLE_PARAMS = TclParams()


# ---------------------------------------------------------------- hybrid model

def hybrid_tcl_rhs(T, s, p: TclParams):
    """dT/dt of the hysteresis model for held switch state ``s``."""
    return -(T - p.T_a + s * p.P * p.R) / p.RC


def hybrid_switch(T, s, p: TclParams):
    """Relay rule: OFF below T_min, ON above T_max, otherwise hold."""
    T = np.asarray(T, dtype=float)
    s = np.asarray(s, dtype=float)
    return np.where(T < p.T_min, 0.0, np.where(T > p.T_max, 1.0, s))


def hybrid_cycle(p: TclParams) -> dict:
    """Closed-form ON/OFF durations of the limit cycle (hours)."""
    t_inf_on = p.T_a - p.P * p.R
    if not p.T_a > p.T_max:
        raise ValueError("ambient must exceed T_max for a cooling cycle")
    if not p.T_min - t_inf_on > 0:
        raise ValueError("cooling capacity too small to reach T_min")
    if p.deadband == 0:
        raise ValueError("zero dead band has no finite cycle")
    t_on = p.RC * np.log((p.T_max - t_inf_on) / (p.T_min - t_inf_on))
    t_off = p.RC * np.log((p.T_a - p.T_min) / (p.T_a - p.T_max))
    period = t_on + t_off
    return {"t_on": t_on, "t_off": t_off, "period": period, "duty": t_on / period}


def natural_frequency(p: TclParams) -> float:
    """Angular switching frequency 2*pi/period (rad per hour)."""
    return 2 * np.pi / hybrid_cycle(p)["period"]


def simulate_hybrid(p: TclParams, t_end: float, dt: float = 1e-3, T0: float | None = None,
                    s0: float = 1.0) -> TimeSeries:
    T0 = p.T_max if T0 is None else T0
    grid = TimeGrid.span(t_end, dt, unit="h")
    return step_hybrid(lambda t, x, q: np.atleast_1d(hybrid_tcl_rhs(x, q, p)),
                       lambda x, q: hybrid_switch(x, q, p), [T0], [s0], grid,
                       names=["T"], discrete_names=["s"])


# ------------------------------------------------------------ phase primitives

def heaviside_sin(x):
    """1 where sin(x) >= 0, else 0."""
    out = (np.sin(x) >= 0).astype(float)
    return float(out) if np.ndim(out) == 0 else out


def duty_bias(duty):
    """Bias s0 so that sin(phi) >= s0 for a fraction ``duty`` of the cycle."""
    duty = np.asarray(duty, dtype=float)
    if np.any((duty <= 0) | (duty >= 1)):
        raise ValueError("duty must lie in (0, 1)")
    out = np.sin((np.pi - 2 * np.pi * duty) / 2)
    return float(out) if out.ndim == 0 else out


def on_fraction(s0) -> float:
    return (np.pi - 2 * np.arcsin(s0)) / (2 * np.pi)


def switching_signal(phi, s0):
    return (np.sin(phi) - s0 >= 0).astype(float)


def xor_bits(a, b):
    return np.bitwise_xor(np.asarray(a, dtype=int), np.asarray(b, dtype=int))


# ------------------------------------------------------- Boolean phase model

@dataclass
class FleetConfig:
    """Fleet of identical-structure units.

    ``alpha`` may be a scalar (same offset for every pair), a length-N vector
    (per-unit offset) or an N x N matrix (pairwise). ``omega`` is rad per time
    unit for the phase model and Hz for the averaging model.
    """

    N: int
    omega: np.ndarray
    duty: np.ndarray
    P: np.ndarray
    eta: np.ndarray
    K: float = 0.267
    W_weight: float = 0.06
    alpha: object = 0.0

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError("N must be >= 1")
        if self.K < 0 or self.W_weight < 0:
            raise ValueError("K and W_weight must be >= 0")
        n = self.N
        self.omega = np.broadcast_to(np.asarray(self.omega, float), (n,)).copy()
        self.duty = np.broadcast_to(np.asarray(self.duty, float), (n,)).copy()
        self.P = np.broadcast_to(np.asarray(self.P, float), (n,)).copy()
        self.eta = np.broadcast_to(np.asarray(self.eta, float), (n,)).copy()
        a = np.asarray(self.alpha, float)
        if a.ndim not in (0, 1, 2) or (a.ndim == 1 and a.size != n) or (a.ndim == 2 and a.shape != (n, n)):
            raise ValueError("alpha must be scalar, length N or N x N")
        self.alpha = a

    @property
    def s0(self) -> np.ndarray:
        return duty_bias(self.duty) * np.ones(self.N)

    @property
    def rated(self) -> float:
        return float(np.sum(self.P * self.eta))


def splay_offsets(N: int) -> np.ndarray:
    """Per-unit offsets (i-1)*2*pi/N."""
    return 2 * np.pi * np.arange(N) / N


def heterogeneous(nominal: float, spread: float, N: int, rng: RngStream) -> np.ndarray:
    """Uniform draw on nominal*(1 +/- spread)."""
    return nominal * (1 + spread * rng.uniform(N, -1.0, 1.0))


def interaction(phis, alpha) -> np.ndarray:
    """sum_{j != i} |Theta[sin phi_j] - Theta[sin(phi_i + alpha_ij)]|.

    Scalar and per-unit offsets use an O(N) count of ON units.
    """
    phis = np.asarray(phis, dtype=float)
    n = phis.size
    alpha = np.asarray(alpha, dtype=float)
    sj = heaviside_sin(phis) * np.ones(n)
    if alpha.ndim < 2:
        b = heaviside_sin(phis + alpha) * np.ones(n)
        others_on = sj.sum() - sj
        return np.where(b > 0, (n - 1) - others_on, others_on)
    b = heaviside_sin(phis[:, None] + alpha)
    x = np.abs(sj[None, :] - b)
    np.fill_diagonal(x, 0.0)
    return x.sum(axis=1)


def phase_oscillator_rhs(phis, fleet: FleetConfig) -> np.ndarray:
    return fleet.omega + fleet.K * interaction(phis, fleet.alpha)


def omega_backsolve(target_freq: float, phis, fleet: FleetConfig) -> np.ndarray:
    """Natural frequencies that would give ``target_freq`` under the current
    interaction load (no correction factor)."""
    return target_freq - fleet.K * interaction(phis, fleet.alpha)


def ensemble_rhs(phis, T, fleet: FleetConfig, thermal: TclParams):
    """(dphi/dt, dT/dt) with the switch driven by the phase signal."""
    s = switching_signal(phis, fleet.s0)
    return phase_oscillator_rhs(phis, fleet), hybrid_tcl_rhs(T, s, thermal)


def aggregate_power(s, P, eta=1.0) -> float:
    s = np.asarray(s, dtype=float)
    if np.any((s != 0) & (s != 1)):
        raise ValueError("switch states must be binary")
    return float(np.sum(np.asarray(P, float) * np.asarray(eta, float) * s))


def simulate_phase_fleet(fleet: FleetConfig, t_end: float, dt: float, seed: int,
                         thermal: TclParams | None = None, phi0=None) -> TimeSeries:
    """RK4 on the Boolean phase model (optionally carrying temperatures).

    Initial phases are uniform on [0, 2*pi) from ``seed`` unless given.
    """
    rng = RngStream(seed)
    phi = rng.uniform(fleet.N, 0.0, 2 * np.pi) if phi0 is None else np.array(phi0, float)
    steps = int(round(t_end / dt))
    s0 = fleet.s0
    w = fleet.P * fleet.eta
    traced = min(fleet.N, TRACE_CAP)
    P_agg = np.empty(steps + 1)
    phis = np.empty((steps + 1, traced))
    temps = np.empty((steps + 1, traced)) if thermal is not None else None
    T = np.full(fleet.N, thermal.T_s) if thermal is not None else None

    def f(x):
        return fleet.omega + fleet.K * interaction(x, fleet.alpha)

    def record(k, phi, T):
        s = switching_signal(phi, s0)
        P_agg[k] = float(w @ s)
        phis[k] = phi[:traced]
        if T is not None:
            temps[k] = T[:traced]
        return s

    s = record(0, phi, T)
    for k in range(steps):
        k1 = f(phi)
        k2 = f(phi + 0.5 * dt * k1)
        k3 = f(phi + 0.5 * dt * k2)
        k4 = f(phi + dt * k3)
        if T is not None:
            # thermal state driven by the switch held over the step (exact ZOH)
            T_inf = thermal.T_a - s * thermal.P * thermal.R
            T = T_inf + (T - T_inf) * np.exp(-dt / thermal.RC)
        phi = phi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s = record(k + 1, phi, T)
    ch = {"P_agg": P_agg}
    for i in range(traced):
        ch[f"phi_{i}"] = phis[:, i]
        if temps is not None:
            ch[f"T_{i}"] = temps[:, i]
    return TimeSeries(dt * np.arange(steps + 1), ch, {"unit": "h", "seed": seed, "model": "phase_oscillator"})


# ------------------------------------------------------------ averaging model

def averaging_weight_matrix(N: int, w: float) -> np.ndarray:
    if N < 1 or w < 0:
        raise ValueError("need N >= 1 and w >= 0")
    return w * (np.ones((N, N)) - np.eye(N))


def dist_averaging_rhs(f, w: float, W: np.ndarray | None = None) -> np.ndarray:
    """df_i/dt = sum_j W_ij (f_j - f_i); all-to-all weight ``w`` unless a
    matrix is supplied."""
    f = np.asarray(f, dtype=float)
    if W is None:
        return w * (f.sum() - f.size * f)
    return W @ f - W.sum(axis=1) * f


def averaging_signal(f, t, alpha, s0):
    return (np.sin(2 * np.pi * f * t + alpha) - s0 >= 0).astype(float)


@dataclass
class AveragingRun:
    series: TimeSeries
    f0: np.ndarray
    f_end: np.ndarray
    f_sum: np.ndarray


def simulate_averaging_fleet(fleet: FleetConfig, t_end: float, dt: float, offsets,
                             W: np.ndarray | None = None, thermal: TclParams | None = None,
                             alpha_schedule=None) -> AveragingRun:
    """RK4 on the frequency consensus with switch signals
    Theta[sin(2 pi f_i t + alpha_i) - s0_i].

    ``offsets`` are the per-unit phase offsets; ``alpha_schedule`` optionally
    maps (step index, time, P_agg history) to new offsets each step.
    """
    f = fleet.omega.copy()
    f0 = f.copy()
    steps = int(round(t_end / dt))
    s0 = fleet.s0
    w = fleet.P * fleet.eta
    alpha = np.array(offsets, dtype=float) * np.ones(fleet.N)
    traced = min(fleet.N, TRACE_CAP)
    P_agg = np.empty(steps + 1)
    fsum = np.empty(steps + 1)
    ftr = np.empty((steps + 1, traced))
    temps = np.empty((steps + 1, traced)) if thermal is not None else None
    T = np.full(fleet.N, thermal.T_s) if thermal is not None else None
    g = (lambda x: dist_averaging_rhs(x, fleet.W_weight, W))
    s = averaging_signal(f, 0.0, alpha, s0)
    P_agg[0], fsum[0], ftr[0] = w @ s, f.sum(), f[:traced]
    if T is not None:
        temps[0] = T[:traced]
    for k in range(steps):
        if alpha_schedule is not None:
            alpha = alpha_schedule(k, k * dt, P_agg[: k + 1], alpha)
        if T is not None:
            T_inf = thermal.T_a - s * thermal.P * thermal.R
            T = T_inf + (T - T_inf) * np.exp(-dt / 3600.0 / thermal.RC)
            temps[k + 1] = T[:traced]
        k1 = g(f)
        k2 = g(f + 0.5 * dt * k1)
        k3 = g(f + 0.5 * dt * k2)
        k4 = g(f + dt * k3)
        f = f + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (k + 1) * dt
        s = averaging_signal(f, t, alpha, s0)
        P_agg[k + 1], fsum[k + 1], ftr[k + 1] = w @ s, f.sum(), f[:traced]
    ch = {"P_agg": P_agg, "f_sum": fsum}
    for i in range(traced):
        ch[f"f_{i}"] = ftr[:, i]
        if temps is not None:
            ch[f"T_{i}"] = temps[:, i]
    ts = TimeSeries(dt * np.arange(steps + 1), ch, {"unit": "s", "model": "dist_averaging"})
    return AveragingRun(ts, f0, f, fsum)


# -------------------------------------------------------------------- metrics

def ripple_pct(P, reference: float | None = None) -> float:
    """Peak-to-peak spread as a percentage of the mean (or ``reference``)."""
    P = np.asarray(P, dtype=float)
    ref = P.mean() if reference is None else reference
    return float((P.max() - P.min()) / ref * 100)


def band_pct(P) -> float:
    """Half peak-to-peak about the mean, in percent (the +/- band)."""
    P = np.asarray(P, dtype=float)
    return float((P.max() - P.min()) / 2 / P.mean() * 100)


def edge_mask(phis, s0, guard: float) -> np.ndarray:
    """True for samples whose every unit is more than ``guard`` rad of phase
    away from its switching thresholds.

    ``phis`` is samples x units.
    """
    phis = np.asarray(phis, dtype=float)
    a = np.arcsin(np.clip(s0, -1, 1))
    on_edge = np.mod(phis - a, 2 * np.pi)
    off_edge = np.mod(phis - (np.pi - a), 2 * np.pi)
    d_on = np.minimum(on_edge, 2 * np.pi - on_edge)
    d_off = np.minimum(off_edge, 2 * np.pi - off_edge)
    return np.all(np.minimum(d_on, d_off) > guard, axis=1)


def metric_p_norm(P_rms_agg: float, P_rms_alpha: float) -> float:
    return (P_rms_agg - P_rms_alpha) / P_rms_agg * 100


def metric_p_red(P_random_ripple: float, P_desync_ripple: float) -> float:
    return (P_random_ripple - P_desync_ripple) / P_random_ripple * 100


def metric_rmse(P_ref, P_agg, P_base: float, times=None) -> float:
    """sqrt(mean((P_ref - P_agg)^2) / P_base^2) * 100 by trapezoidal rule."""
    P_ref = np.broadcast_to(np.asarray(P_ref, float), np.shape(P_agg))
    e2 = (P_ref - np.asarray(P_agg, float)) ** 2
    if times is None:
        times = np.arange(e2.size, dtype=float)
    span = times[-1] - times[0]
    mean = np.trapezoid(e2, times) / span if span > 0 else float(e2[0])
    return float(np.sqrt(mean / P_base ** 2) * 100)


def metric_relative_error(P_ref, P_agg) -> np.ndarray:
    P_ref = np.broadcast_to(np.asarray(P_ref, float), np.shape(P_agg))
    return (P_ref - np.asarray(P_agg, float)) / P_ref * 100


def steady_relative_error(P_ref, P_agg, tail: float = 0.1) -> float:
    """max |relative error| over the final ``tail`` fraction of samples."""
    r = metric_relative_error(P_ref, P_agg)
    k = max(1, int(round(len(r) * tail)))
    return float(np.max(np.abs(r[-k:])))


# -------------------------------------------------------------- DelayC / AS

def spread_offsets(alpha: float, N: int) -> np.ndarray:
    """Per-unit offsets for fleet delay ``alpha`` in [0, pi].

    Unit i is shifted by i*alpha*2/N, so two units differ by alpha and
    alpha = pi spreads N units evenly round the circle.
    """
    if N == 1:
        return np.zeros(1)
    return np.arange(N) * alpha * 2.0 / N


def steady_rms(fleet: FleetConfig, offsets, freq: float, settle_cycles: int = 10,
               rms_cycles: int = 3, samples_per_cycle: int = 400) -> float:
    """rms aggregate power over ``rms_cycles`` after ``settle_cycles`` for a
    fleet already at the common frequency ``freq``."""
    t = (settle_cycles + np.arange(rms_cycles * samples_per_cycle) / samples_per_cycle) / freq
    s = averaging_signal(freq, t[:, None], np.asarray(offsets)[None, :], fleet.s0[None, :])
    P = s @ (fleet.P * fleet.eta)
    return float(np.sqrt(np.mean(P ** 2)))


@dataclass
class DelayCMap:
    alphas: np.ndarray
    rms_pct: np.ndarray
    monotone: bool

    @property
    def min_pct(self) -> float:
        return float(self.rms_pct.min())

    @property
    def max_pct(self) -> float:
        return float(self.rms_pct.max())

    def lookup(self, demand_pct: float) -> tuple:
        """(alpha, clamped) for a demand in percent of rated power.

        Uses the monotone part of the map from alpha = 0 to its minimum;
        demands outside the achievable range clamp to the nearest end.
        """
        k = int(np.argmin(self.rms_pct))
        a, r = self.alphas[: k + 1], self.rms_pct[: k + 1]
        # enforce monotone decreasing branch for interpolation
        r = np.minimum.accumulate(r)
        if demand_pct >= r[0]:
            return float(a[0]), demand_pct > r[0] + 1e-9
        if demand_pct <= r[-1]:
            return float(a[-1]), demand_pct < r[-1] - 1e-9
        return float(np.interp(demand_pct, r[::-1], a[::-1])), False


def delayc_build(fleet: FleetConfig, freq: float, alpha_step: float = 0.01, alpha_max: float = np.pi,
                 offsets_fn=spread_offsets) -> DelayCMap:
    """Sweep the fleet delay and record steady rms power as % of rated."""
    if fleet.N < 2:
        raise ValueError("DelayC needs at least two units")
    alphas = np.arange(0.0, alpha_max + 1e-12, alpha_step)
    rms = np.array([steady_rms(fleet, offsets_fn(a, fleet.N), freq) for a in alphas])
    pct = rms / fleet.rated * 100
    k = int(np.argmin(pct))
    mono = bool(np.all(np.diff(pct[: k + 1]) <= 1e-9))
    return DelayCMap(alphas, pct, mono)


@dataclass
class UtilitySignal:
    """Piecewise-constant demand in percent of maximum aggregate power;
    ``None`` values mean the signal is lost."""

    steps: list = field(default_factory=lambda: [(0.0, 100.0)])

    def __post_init__(self):
        for _, v in self.steps:
            if v is not None and not 0 <= v <= 100:
                raise ValueError("utility demand must lie in [0, 100]")

    def at(self, t: float):
        v = self.steps[0][1]
        for ts, val in self.steps:
            if t >= ts - 1e-12:
                v = val
        return v


@dataclass
class LoadFollower:
    """Closed loop: measured rms over the last cycle versus the utility
    reference, integral correction on the DelayC demand."""

    dmap: DelayCMap
    N: int
    ki: float = 0.5
    integ: float = 0.0
    clamped: bool = False

    def step(self, reference, measured_pct: float) -> float:
        if reference is None:
            self.clamped = False
            return np.pi  # lost signal: spread evenly, minimum loading
        err = reference - measured_pct
        demand = reference + self.integ + self.ki * err
        alpha, self.clamped = self.dmap.lookup(demand)
        if not self.clamped:
            self.integ += self.ki * err
        return alpha


def load_following_step(follower: LoadFollower, reference, measured_pct: float) -> np.ndarray:
    """New per-unit offsets; set points are never touched."""
    return spread_offsets(follower.step(reference, measured_pct), follower.N)
