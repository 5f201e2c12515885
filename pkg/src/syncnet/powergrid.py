"""Swing-equation networks in second-order Kuramoto form and the
conformist-contrarian (CC) two-area model.

Sign convention: phase differences are ``Phi_ij = delta_j - delta_i``; the
inter-group gap reported by :func:`group_order_parameters` is
``arg(R_2) - arg(R_1)`` in the same sense.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .simcore import RngStream, TimeSeries, rk4_step

J_DEFAULT = 0.4
ALPHA_DEFAULT = 0.125
OMEGA_GRID = 1.0

K_CASE1 = np.array([
    [0.0, 1.9689, 0.1766, 0.1782],
    [1.9689, 0.0, 0.1782, 0.1801],
    [0.1766, 0.1782, 0.0, 1.9363],
    [0.1782, 0.1801, 1.9363, 0.0],
])
K_CASE2 = np.array([
    [0.0, 2.5960, 0.2130, 0.2151],
    [2.5960, 0.0, 0.2151, 0.2171],
    [0.2130, 0.2151, 0.0, 1.7214],
    [0.2151, 0.2171, 1.7214, 0.0],
])
OMEGA_CASE1 = np.array([17.5290, 17.7923, 17.5640, 17.8285])
OMEGA_CASE2 = np.array([16.8882, 17.1532, 17.7931, 18.0629])
TWO_AREAS = np.array([0, 0, 1, 1])


@dataclass
class GeneratorParams:
    J: float = J_DEFAULT
    K_D: float = 0.025
    P_m: float = 0.0
    E: float = 1.0
    area: int = 0

    def __post_init__(self):
        if self.J <= 0:
            raise ValueError("inertia J must be positive")
        if self.K_D < 0:
            raise ValueError("K_D must be >= 0")

    @property
    def alpha(self) -> float:
        return 2 * self.K_D / self.J


def swing_to_kuramoto(gens, Y, Omega: float = OMEGA_GRID):
    """Map generator data and a Kron-reduced admittance to
    (omega_nat, alpha, k)."""
    if Omega <= 0:
        raise ValueError("grid frequency must be positive")
    Y = np.asarray(Y, dtype=complex)
    n = len(gens)
    J = np.array([g.J for g in gens], float)
    E = np.array([g.E for g in gens], float)
    Pm = np.array([g.P_m for g in gens], float)
    if np.any(J <= 0):
        raise ValueError("inertia J must be positive")
    k = np.outer(E, E) * np.abs(Y) / (J[:, None] * Omega)
    np.fill_diagonal(k, 0.0)
    omega = (Pm - E ** 2 * Y.real.diagonal()) / (J * Omega)
    alpha = np.array([g.alpha for g in gens])
    return omega, alpha, k


def critical_coupling(omega) -> float:
    omega = np.asarray(omega, float)
    n = omega.size
    return (omega.max() - omega.min()) * n / (2 * (n - 1))


def above_critical_coupling(k, omega) -> bool:
    """True when every connected pair couples at least at the critical value."""
    k = np.asarray(k, float)
    off = k[~np.eye(k.shape[0], dtype=bool)]
    off = off[off > 0]
    return bool(off.size and off.min() >= critical_coupling(omega))


@dataclass
class SignedCoupling:
    """Magnitudes ``k`` with +1 inside an area and -1 across areas."""

    k: np.ndarray
    areas: np.ndarray

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        self.areas = np.asarray(self.areas, dtype=int)
        n = self.areas.size
        if self.k.shape != (n, n):
            raise ValueError("k must be n x n")
        if not np.allclose(self.k, self.k.T) or np.any(self.k < 0) or np.any(np.diag(self.k) != 0):
            raise ValueError("k must be symmetric, nonnegative with zero diagonal")

    @property
    def sign(self) -> np.ndarray:
        return np.where(self.areas[:, None] == self.areas[None, :], 1.0, -1.0)

    @property
    def signed(self) -> np.ndarray:
        return self.k * self.sign


@dataclass
class CcKuramotoSystem:
    omega: np.ndarray
    coupling: SignedCoupling
    alpha: np.ndarray | float = ALPHA_DEFAULT
    J: float = J_DEFAULT
    Omega: float = OMEGA_GRID
    label: str = ""

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.alpha = np.broadcast_to(np.asarray(self.alpha, float), self.omega.shape).copy()
        self._ks = self.coupling.signed

    @property
    def n(self) -> int:
        return self.omega.size

    @property
    def areas(self) -> np.ndarray:
        return self.coupling.areas

    def coupling_term(self, delta) -> np.ndarray:
        """sum_j s_ij k_ij sin(delta_j - delta_i)."""
        return np.sum(self._ks * np.sin(delta[None, :] - delta[:, None]), axis=1)

    def coupling_jacobian(self, delta) -> np.ndarray:
        c = self._ks * np.cos(delta[None, :] - delta[:, None])
        return c - np.diag(c.sum(axis=1))

    def rhs(self, t, x) -> np.ndarray:
        n = self.n
        d, v = x[:n], x[n:]
        return np.concatenate([v, self.omega - self.alpha * v + self.coupling_term(d)])

    def jacobian(self, x) -> np.ndarray:
        n = self.n
        z, eye = np.zeros((n, n)), np.eye(n)
        return np.block([[z, eye], [self.coupling_jacobian(x[:n]), -np.diag(self.alpha)]])


def cc_kuramoto_rhs(state, system: CcKuramotoSystem) -> np.ndarray:
    return system.rhs(0.0, np.asarray(state, dtype=float))


def two_area_scenario(case: int) -> CcKuramotoSystem:
    if case == 1:
        k, w = K_CASE1, OMEGA_CASE1
    elif case == 2:
        k, w = K_CASE2, OMEGA_CASE2
    else:
        raise ValueError("case must be 1 or 2")
    return CcKuramotoSystem(w.copy(), SignedCoupling(k.copy(), TWO_AREAS.copy()), ALPHA_DEFAULT,
                            J_DEFAULT, OMEGA_GRID, f"case{case}")


def initial_state(n: int, seed: int, spread: float = 0.1) -> np.ndarray:
    rng = RngStream(seed)
    return np.concatenate([rng.uniform(n, -spread, spread), np.zeros(n)])


def simulate(system: CcKuramotoSystem, t_end: float, dt: float = 0.01, seed: int = 0,
             x0=None, stride: int = 1) -> TimeSeries:
    """RK4 trajectory; angles stay unwrapped. ``stride`` thins the output."""
    n = system.n
    x = initial_state(n, seed) if x0 is None else np.array(x0, float)
    steps = int(round(t_end / dt))
    keep = steps // stride + 1
    X = np.empty((keep, 2 * n))
    X[0] = x
    j = 1
    for k in range(1, steps + 1):
        x = rk4_step(system.rhs, (k - 1) * dt, x, dt)
        if k % stride == 0:
            X[j] = x
            j += 1
    t = dt * stride * np.arange(keep)
    ch = {}
    for i in range(n):
        ch[f"delta_{i}"] = X[:, i]
    for i in range(n):
        ch[f"ddelta_{i}"] = X[:, n + i]
    R = order_parameter(X[:, :n])
    ch["R_abs"] = np.abs(R)
    for a in np.unique(system.areas):
        ch[f"R_area{a}"] = np.abs(order_parameter(X[:, :n][:, system.areas == a]))
    return TimeSeries(t, ch, {"unit": "s", "seed": seed, "system": system.label})


def angles(ts: TimeSeries, n: int) -> np.ndarray:
    return np.column_stack([ts[f"delta_{i}"] for i in range(n)])


def velocities(ts: TimeSeries, n: int) -> np.ndarray:
    return np.column_stack([ts[f"ddelta_{i}"] for i in range(n)])


def wrap(x):
    """Wrap to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


def order_parameter(deltas):
    """Complex (1/N) sum exp(i delta) over the last axis."""
    d = np.asarray(deltas, dtype=float)
    if d.shape[-1] < 1:
        raise ValueError("need at least one phase")
    return np.exp(1j * d).mean(axis=-1)


def group_order_parameters(deltas, areas) -> dict:
    """Per-area order parameters and the gap arg(R_2) - arg(R_1).

    With a single area the global parameter is returned and the gap is 0.
    """
    d = np.asarray(deltas, dtype=float)
    areas = np.asarray(areas)
    labels = list(np.unique(areas))
    R = {}
    for a in labels:
        sel = d[..., areas == a]
        if sel.shape[-1] == 0:
            raise ValueError(f"area {a} is empty")
        R[a] = order_parameter(sel)
    out = {"R": R}
    if len(labels) >= 2:
        out["gap"] = wrap(np.angle(R[labels[1]] * np.conj(R[labels[0]])))
    else:
        out["gap"] = 0.0 * np.abs(R[labels[0]])
    return out


def steady_gaps(ts: TimeSeries, system: CcKuramotoSystem, tail: float = 0.2) -> dict:
    """Time-averaged inter-area gap and intra-area gaps (second minus first
    generator of each area) over the final ``tail`` of the run."""
    d = angles(ts, system.n)
    m = slice(int(len(ts.times) * (1 - tail)), None)
    g = group_order_parameters(d[m], system.areas)
    inter = np.angle(np.mean(np.exp(1j * g["gap"])))
    intra = {}
    for a in np.unique(system.areas):
        idx = np.nonzero(system.areas == a)[0]
        if idx.size >= 2:
            intra[int(a)] = float(np.angle(np.mean(np.exp(1j * (d[m, idx[1]] - d[m, idx[0]])))))
    drift = np.ptp(np.unwrap(g["gap"])) if np.ndim(g["gap"]) else 0.0
    return {"inter": float(inter), "intra": intra, "gap_drift": float(drift)}


# --------------------------------------------------------------- equilibria

@dataclass
class FixedPoint:
    delta: np.ndarray
    drift: float
    residual: float
    label: str = ""
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def state(self) -> np.ndarray:
        return np.concatenate([self.delta, np.full(self.delta.size, self.drift)])


def _balance(system: CcKuramotoSystem, delta, y):
    return system.omega - system.alpha * y + system.coupling_term(delta)


def equilibrium_solve(system: CcKuramotoSystem, guesses, tol: float = 1e-10, max_iter: int = 100):
    """Newton on 0 = omega - alpha*y + coupling(delta) with delta_0 = 0 and a
    common drift y as unknowns.

    Returns (roots, failures): distinct roots modulo 2*pi, and the indices of
    guesses that did not converge.
    """
    n = system.n
    roots, failures = [], []
    for gi, g in enumerate(guesses):
        g = np.asarray(g, dtype=float)
        z = np.concatenate([(g[1:] - g[0]) if g.size == n else g[: n - 1],
                            [np.sum(system.omega) / np.sum(system.alpha)]])
        ok = False
        for _ in range(max_iter):
            delta = np.concatenate([[0.0], z[: n - 1]])
            F = _balance(system, delta, z[-1])
            Jc = system.coupling_jacobian(delta)
            Jm = np.column_stack([Jc[:, 1:], -system.alpha])
            try:
                step = np.linalg.solve(Jm, -F)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(Jm, -F, rcond=None)[0]
            z = z + step
            res = np.max(np.abs(_balance(system, np.concatenate([[0.0], z[: n - 1]]), z[-1])))
            if res < tol:
                ok = True
                break
        if not ok:
            failures.append(gi)
            continue
        delta = wrap(np.concatenate([[0.0], z[: n - 1]]))
        res = float(np.max(np.abs(_balance(system, delta, z[-1]))))
        if not any(np.max(np.abs(wrap(delta - r.delta))) < 1e-6 for r in roots):
            roots.append(FixedPoint(delta, float(z[-1]), res))
    return roots, failures


def numerical_jacobian(f, x, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.column_stack(cols)


def classify_fixed_point(system: CcKuramotoSystem, fp: FixedPoint, threshold: float = 1e-6) -> FixedPoint:
    """Label from the max real eigenvalue, dropping the rotation zero mode."""
    ev = np.linalg.eigvals(system.jacobian(fp.state))
    drop = int(np.argmin(np.abs(ev)))
    rest = np.delete(ev, drop)
    top = rest.real.max() if rest.size else 0.0
    label = "stable" if top < -threshold else ("unstable" if top > threshold else "marginal")
    return FixedPoint(fp.delta, fp.drift, fp.residual, label, ev)


def coupling_eigenvalue(Phi: float, k: float, sign: float) -> float:
    """Stiffness eigenvalue of the two-oscillator difference dynamics
    Phi'' = dw - a Phi' - 2 s k sin(Phi): positive means unstable."""
    return float(-2.0 * sign * k * np.cos(Phi))


def two_oscillator_gap(k: float, sign: float, dw: float = 0.0) -> list:
    """Roots of H(Phi) = dw - 2 s k sin(Phi) on (-pi, pi] with stability."""
    H = lambda p: dw - 2 * sign * k * np.sin(p)
    h = 2 * np.pi / 720
    grid = -np.pi + h * (np.arange(722) + 0.5)  # offset so +-pi is never a grid node
    vals = H(grid)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0:
            r = a
        elif fa * fb < 0:
            r = brentq(H, a, b, xtol=1e-14)
        else:
            continue
        r = wrap(r)
        if not any(abs(wrap(r - q)) < 1e-8 for q, _ in roots):
            roots.append((r, "stable" if coupling_eigenvalue(r, k, sign) < 0 else "unstable"))
    return roots


# ----------------------------------------------------------- regime labels

@dataclass
class RegimeThresholds:
    tol_f: float = 1e-2
    locked_R: float = 0.95
    chimera_hi: float = 0.9
    chimera_lo: float = 0.5
    coherence: str = "area"  # "area": every area coherent; "global": |R| overall


def chimera_detect(ts: TimeSeries, system: CcKuramotoSystem, thr: RegimeThresholds | None = None,
                   tail: float = 0.2) -> dict:
    """Label the final ``tail`` of a run: phase-locked, chimera or incoherent."""
    thr = thr or RegimeThresholds()
    n = system.n
    m = slice(int(len(ts.times) * (1 - tail)), None)
    d = angles(ts, n)[m]
    t = ts.times[m]
    span = t[-1] - t[0]
    mean_f = (d[-1] - d[0]) / span if span > 0 else velocities(ts, n)[m].mean(axis=0)
    spread = float(mean_f.max() - mean_f.min())
    R = float(np.mean(np.abs(order_parameter(d))))
    Ra = {int(a): float(np.mean(np.abs(order_parameter(d[:, system.areas == a]))))
          for a in np.unique(system.areas)}
    coherent = min(Ra.values()) > thr.locked_R if thr.coherence == "area" else R > thr.locked_R
    if spread < thr.tol_f and coherent:
        label = "phase-locked"
    elif max(Ra.values()) > thr.chimera_hi and min(Ra.values()) < thr.chimera_lo:
        label = "chimera"
    else:
        label = "incoherent"
    return {"label": label, "R": R, "R_area": Ra, "freq_spread": spread}


def with_interarea(system: CcKuramotoSystem, r1: float) -> CcKuramotoSystem:
    """Replace every cross-area magnitude by ``r1`` (sign -1 still applied)."""
    k = system.coupling.k.copy()
    cross = system.areas[:, None] != system.areas[None, :]
    k[cross] = r1
    sc = SignedCoupling.__new__(SignedCoupling)
    sc.k, sc.areas = k, system.areas.copy()  # r1 may be negative: skip checks
    return CcKuramotoSystem(system.omega.copy(), sc, system.alpha.copy(), system.J, system.Omega,
                            f"{system.label}:r1={r1:g}")


def with_omega(system: CcKuramotoSystem, index: int, value: float) -> CcKuramotoSystem:
    w = system.omega.copy()
    w[index] = value
    return CcKuramotoSystem(w, system.coupling, system.alpha.copy(), system.J, system.Omega,
                            f"{system.label}:w{index}={value:g}")


def sweep_template(base_omega: float | None = None, case: int = 1) -> CcKuramotoSystem:
    """Case coupling with homogeneous natural frequencies ``base_omega``."""
    s = two_area_scenario(case)
    if base_omega is not None:
        s = CcKuramotoSystem(np.full(s.n, float(base_omega)), s.coupling, s.alpha, s.J, s.Omega,
                             f"{s.label}:w={base_omega:g}")
    return s


def bifurcation_sweep(template: CcKuramotoSystem, parameter: str, values, t_end: float = 300.0,
                      dt: float = 0.01, seed: int = 0, thr: RegimeThresholds | None = None,
                      omega_index: int = 3) -> list:
    """Per-value record: regime, steady |R|, per-area |R| and equilibrium count."""
    recs = []
    rng = RngStream(seed)
    guesses = [rng.uniform(template.n, -np.pi, np.pi) for _ in range(12)]
    guesses += [np.zeros(template.n), np.where(template.areas == template.areas[0], 0.0, np.pi)]
    for v in values:
        v = float(v)
        if parameter == "r1":
            s = with_interarea(template, v)
        elif parameter == "r2":
            s = with_omega(template, omega_index, v)
        else:
            raise ValueError("parameter must be r1 or r2")
        ts = simulate(s, t_end, dt, seed, stride=10)
        lab = chimera_detect(ts, s, thr)
        roots, _ = equilibrium_solve(s, guesses)
        stable = sum(classify_fixed_point(s, r).label == "stable" for r in roots)
        recs.append({"param": parameter, "value": v, "regime": lab["label"], "R": lab["R"],
                     **{f"R_area{a}": r for a, r in lab["R_area"].items()},
                     "freq_spread": lab["freq_spread"], "equilibria": len(roots), "stable_equilibria": stable})
    return recs


# ------------------------------------------------------ equal-area helpers

def accel_power(delta, system: CcKuramotoSystem, ddelta=None) -> np.ndarray:
    """Accelerating drive omega_i - alpha*ddelta_i + coupling (zero at balance)."""
    delta = np.asarray(delta, dtype=float)
    v = np.zeros_like(delta) if ddelta is None else np.asarray(ddelta, float)
    return system.omega - system.alpha * v + system.coupling_term(delta)


def classify_roots(drive, lo: float, hi: float, samples: int = 2001) -> list:
    """Roots of a scalar drive on [lo, hi]; sink where it crosses downward."""
    grid = np.linspace(lo, hi, samples)
    vals = np.array([drive(g) for g in grid])
    out = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa * fb < 0:
            r = brentq(drive, a, b, xtol=1e-14)
            out.append((r, "sink" if fa > 0 else "source"))
    return out


def smib_roots(P_m: float, P_max: float) -> list:
    """Single machine against an infinite bus: drive P_m - P_max sin(delta)."""
    return classify_roots(lambda d: P_m - P_max * np.sin(d), -np.pi / 2 + 1e-9, 3 * np.pi / 2 - 1e-9)


def compass_vectors(ts: TimeSeries, system: CcKuramotoSystem, tail: float = 0.2) -> np.ndarray:
    """Per-generator (magnitude, angle): rms of wrapped differences to the
    other generators and the final angle relative to the global mean phase.
    Rows are generators."""
    n = system.n
    m = slice(int(len(ts.times) * (1 - tail)), None)
    d = angles(ts, n)[m]
    diff = wrap(d[:, None, :] - d[:, :, None])
    mag = np.sqrt(np.sum(diff ** 2, axis=(0, 2)) / (d.shape[0] * max(n - 1, 1)))
    ref = np.angle(np.exp(1j * d[-1]).sum())
    if np.abs(np.exp(1j * d[-1]).sum()) < 1e-9:
        ref = d[-1, 0]
    ang = wrap(d[-1] - ref)
    return np.column_stack([mag, ang])


def linear_modes(system: CcKuramotoSystem, fp: FixedPoint):
    """Eigenvalues and right eigenvectors (angle block) of the linearization."""
    ev, vec = np.linalg.eig(system.jacobian(fp.state))
    return ev, vec[: system.n]


# ------------------------------------------------------ full swing balance

@dataclass
class SwingMachine:
    J: float
    K_D: float
    P_source: float


def full_swing_rhs(theta, dtheta, machines, P_max) -> np.ndarray:
    """theta'' from J th'' th' + K_D th'^2 - sum P_max sin(th_j - th_i) = P_source."""
    J = np.array([m.J for m in machines])
    KD = np.array([m.K_D for m in machines])
    Ps = np.array([m.P_source for m in machines])
    trans = np.sum(P_max * np.sin(theta[None, :] - theta[:, None]), axis=1)
    return (Ps - KD * dtheta ** 2 + trans) / (J * dtheta)


def simulate_full_swing(machines, P_max, theta0, dtheta0, t_end: float, dt: float) -> TimeSeries:
    n = len(machines)
    P_max = np.asarray(P_max, float)

    def f(t, x):
        return np.concatenate([x[n:], full_swing_rhs(x[:n], x[n:], machines, P_max)])

    x = np.concatenate([theta0, dtheta0]).astype(float)
    steps = int(round(t_end / dt))
    X = np.empty((steps + 1, 2 * n))
    X[0] = x
    for k in range(steps):
        x = rk4_step(f, k * dt, x, dt)
        X[k + 1] = x
    ch = {f"theta_{i}": X[:, i] for i in range(n)}
    ch.update({f"dtheta_{i}": X[:, n + i] for i in range(n)})
    return TimeSeries(dt * np.arange(steps + 1), ch, {"unit": "s"})


def power_balance_residual(ts: TimeSeries, machines, P_max) -> np.ndarray:
    """P_acc + P_diss - (P_source - P_trans) per sample and machine, with the
    kinetic term differentiated numerically."""
    n = len(machines)
    th = np.column_stack([ts[f"theta_{i}"] for i in range(n)])
    w = np.column_stack([ts[f"dtheta_{i}"] for i in range(n)])
    J = np.array([m.J for m in machines])
    KD = np.array([m.K_D for m in machines])
    Ps = np.array([m.P_source for m in machines])
    P_acc = 0.5 * J * np.gradient(w ** 2, ts.times, axis=0)
    P_diss = KD * w ** 2
    P_trans = -np.sum(np.asarray(P_max)[None] * np.sin(th[:, None, :] - th[:, :, None]), axis=2)
    return P_acc + P_diss - (Ps - P_trans)
