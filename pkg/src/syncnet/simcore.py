"""Fixed-step integration, hybrid stepping, portable RNG and trajectory
containers."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DIVERGENCE_LIMIT = 1e12
MAX_CONSECUTIVE_FLIPS = 3
NOT_SETTLED = None  # sentinel returned by settling_time
_TWO53 = 2.0 ** -53


class DegenerateInputError(RuntimeError):
    """Raised when a discrete variable chatters (dt too large or zero band)."""


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    dt: float
    steps: int
    unit: str = "s"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if int(self.steps) < 1:
            raise ValueError("steps must be >= 1")

    @classmethod
    def span(cls, t_end: float, dt: float, t0: float = 0.0, unit: str = "s") -> "TimeGrid":
        return cls(t0, dt, int(round((t_end - t0) / dt)), unit)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * self.steps


@dataclass
class TimeSeries:
    """Uniformly sampled channels sharing one time vector."""

    times: np.ndarray
    channels: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    diverged: bool = False
    diverged_at: float | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for k, v in list(self.channels.items()):
            v = np.asarray(v, dtype=float)
            if v.shape[0] != self.times.shape[0]:
                raise ValueError(f"channel {k!r} length {v.shape[0]} != {self.times.shape[0]}")
            self.channels[k] = v

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def add(self, name: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape[0] != self.times.shape[0]:
            raise ValueError(f"channel {name!r} has wrong length")
        self.channels[name] = values

    def to_csv(self, path, names=None) -> None:
        names = list(self.channels) if names is None else list(names)
        cols = [self.times] + [self.channels[n] for n in names]
        data = np.column_stack(cols)
        with open(path, "w", newline="") as fh:
            fh.write(",".join(["time"] + names) + "\n")
            np.savetxt(fh, data, fmt="%.17g", delimiter=",")

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        with open(path, newline="") as fh:
            header = next(csv.reader(fh))
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], {n: data[:, k + 1] for k, n in enumerate(header[1:])})


class RngStream:
    """Seeded PCG64 stream with Box-Muller normals.

    PCG64 is a fixed algorithm, so a seed yields the same raw 64-bit words on
    every platform; uniforms take the top 53 bits.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._bg = np.random.PCG64(self.seed)
        self.counter = 0

    def _raw(self, n: int) -> np.ndarray:
        self.counter += n
        return self._bg.random_raw(n)

    def uniform(self, size=None, low=0.0, high=1.0):
        n = 1 if size is None else int(np.prod(size))
        u = (self._raw(n) >> np.uint64(11)).astype(float) * _TWO53
        u = low + (high - low) * u
        return float(u[0]) if size is None else u.reshape(size)

    def normal(self, size=None, mean=0.0, std=1.0):
        n = 1 if size is None else int(np.prod(size))
        m = (n + 1) // 2
        u1 = 1.0 - self.uniform(m)  # (0, 1]
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:n]
        z = mean + std * z
        return float(z[0]) if size is None else z.reshape(size)

    def normal_rows(self, rows: int, n: int) -> np.ndarray:
        """``rows`` consecutive ``normal(n)`` draws in one call, bit-identical
        to drawing them one row at a time."""
        m = (n + 1) // 2
        raw = self._raw(rows * 2 * m).reshape(rows, 2, m)
        u = (raw >> np.uint64(11)).astype(float) * _TWO53
        r = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))
        ang = 2 * np.pi * u[:, 1]
        return np.concatenate([r * np.cos(ang), r * np.sin(ang)], axis=1)[:, :n]

    def spawn(self, key: int) -> "RngStream":
        """Independent child stream derived from (seed, key)."""
        ss = np.random.SeedSequence([self.seed, int(key)])
        return RngStream(int(ss.generate_state(1, np.uint64)[0]))


def gaussian_std(sigma: float, noise_is_variance: bool = True) -> float:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    return math.sqrt(sigma) if noise_is_variance else float(sigma)


def sample_gaussian(rng: RngStream, mean: float, sigma: float, noise_is_variance: bool = True, size=None):
    """Draw from N(mean, sigma); ``sigma`` is read as a variance by default."""
    std = gaussian_std(sigma, noise_is_variance)
    if std == 0.0:
        return float(mean) if size is None else np.full(size, float(mean))
    return rng.normal(size, mean, std)


def rk4_step(rhs: Callable, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, x)
    k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2)
    k4 = rhs(t + dt, x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _names(names, n):
    return list(names) if names is not None else [f"x{i}" for i in range(n)]


def integrate_rk4(rhs: Callable, state0, grid: TimeGrid, names=None) -> TimeSeries:
    """Classical RK4 on ``grid``; ``rhs(t, x)`` returns dx/dt.

    The trajectory stops and is flagged when any component exceeds
    ``DIVERGENCE_LIMIT`` in magnitude; remaining samples are NaN.
    """
    x = np.array(state0, dtype=float)
    out = np.full((grid.steps + 1, x.size), np.nan)
    out[0] = x
    times = grid.times
    diverged_at = None
    for k in range(grid.steps):
        x = rk4_step(rhs, times[k], x, grid.dt)
        if not np.all(np.abs(x) < DIVERGENCE_LIMIT):
            diverged_at = float(times[k + 1])
            break
        out[k + 1] = x
    cols = _names(names, x.size)
    ts = TimeSeries(times, {c: out[:, i] for i, c in enumerate(cols)}, {"unit": grid.unit})
    ts.diverged = diverged_at is not None
    ts.diverged_at = diverged_at
    return ts


def step_hybrid(continuous_rhs: Callable, discrete_update: Callable, state0, discrete0,
                grid: TimeGrid, names=None, discrete_names=None) -> TimeSeries:
    """RK4 with discrete variables frozen inside each step.

    ``continuous_rhs(t, x, q)`` gives dx/dt for the held discrete vector
    ``q``; ``discrete_update(x, q)`` returns the next ``q`` from the post-step
    state. More than ``MAX_CONSECUTIVE_FLIPS`` consecutive steps that change
    ``q`` raise :class:`DegenerateInputError`.
    """
    x = np.array(state0, dtype=float)
    q = np.array(discrete0, dtype=float)
    xs = np.full((grid.steps + 1, x.size), np.nan)
    qs = np.full((grid.steps + 1, q.size), np.nan)
    xs[0], qs[0] = x, q
    times = grid.times
    flips = 0
    diverged_at = None
    for k in range(grid.steps):
        x = rk4_step(lambda t, y: continuous_rhs(t, y, q), times[k], x, grid.dt)
        if not np.all(np.abs(x) < DIVERGENCE_LIMIT):
            diverged_at = float(times[k + 1])
            break
        q_new = np.asarray(discrete_update(x, q), dtype=float)
        if np.any(q_new != q):
            flips += 1
            if flips > MAX_CONSECUTIVE_FLIPS:
                raise DegenerateInputError(
                    f"discrete state flipped on {flips} consecutive steps at t={times[k + 1]:g}")
        else:
            flips = 0
        q = q_new
        xs[k + 1], qs[k + 1] = x, q
    ch = {c: xs[:, i] for i, c in enumerate(_names(names, x.size))}
    qn = list(discrete_names) if discrete_names is not None else [f"q{i}" for i in range(q.size)]
    ch.update({c: qs[:, i] for i, c in enumerate(qn)})
    ts = TimeSeries(times, ch, {"unit": grid.unit})
    ts.diverged = diverged_at is not None
    ts.diverged_at = diverged_at
    return ts


def settling_time(series, channel, target: float, band: float, t_start: float | None = None,
                  t_end: float | None = None):
    """First time after which ``channel`` stays within ``target +/- band``.

    ``series`` is a :class:`TimeSeries` (``channel`` a name) or a time vector
    (``channel`` the value array). The optional window restricts the search.
    The result is an absolute time. Returns ``NOT_SETTLED``
    when the last sample in the window is outside the band.
    """
    if band <= 0:
        raise ValueError("band must be positive")
    if isinstance(series, TimeSeries):
        t, y = series.times, series[channel]
    else:
        t, y = np.asarray(series, dtype=float), np.asarray(channel, dtype=float)
    lo = t[0] if t_start is None else t_start
    hi = t[-1] if t_end is None else t_end
    m = (t >= lo - 1e-12) & (t <= hi + 1e-12)
    t, y = t[m], y[m]
    if t.size == 0:
        return NOT_SETTLED
    outside = np.abs(y - target) > band
    if outside[-1]:
        return NOT_SETTLED
    if not outside.any():
        return float(t[0])
    last = np.nonzero(outside)[0][-1]
    return float(t[last + 1])
