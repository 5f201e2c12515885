"""Scenario execution: config dict in, CSV/JSON artifacts out."""
from __future__ import annotations

import copy
import json
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis, microgrid as mg, powergrid as pg, tcl
from .netgraph import NetworkGraph
from .simcore import RngStream, TimeSeries, settling_time

SCHEMA_VERSION = 1
MODELS = ("microgrid", "tcl", "powergrid")


class ConfigError(ValueError):
    """Schema violation; the message carries the offending field path."""


# ------------------------------------------------------------------ configs

def builtin_names() -> list:
    root = resources.files("syncnet") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> dict:
    root = resources.files("syncnet") / "scenarios"
    p = root / f"{name}.json"
    if not p.is_file():
        raise ConfigError(f"name: unknown built-in scenario {name!r}")
    return json.loads(p.read_text())


def load_config(ref: str) -> dict:
    """Built-in name, scenario file or manifest file."""
    path = Path(ref)
    if path.suffix == ".json" and path.is_file():
        data = json.loads(path.read_text())
        if "config" in data and "tool_version" in data:
            return data["config"]
        return data
    return load_builtin(ref)


def _require(cfg: dict, path: str):
    cur = cfg
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            raise ConfigError(f"{path}: missing required field")
        cur = cur[part]
    return cur


def validate(cfg: dict) -> None:
    for key in ("name", "model", "kind", "seed", "time", "params"):
        _require(cfg, key)
    if cfg["model"] not in MODELS:
        raise ConfigError(f"model: must be one of {MODELS}, got {cfg['model']!r}")
    if not isinstance(cfg["seed"], int):
        raise ConfigError("seed: must be an integer")
    for key in ("t_end", "dt", "unit"):
        _require(cfg, f"time.{key}")
    if not cfg["time"]["dt"] > 0:
        raise ConfigError("time.dt: must be positive")
    if cfg["time"]["unit"] not in ("s", "h"):
        raise ConfigError("time.unit: must be 's' or 'h'")


def set_path(cfg: dict, path: str, value) -> dict:
    out = copy.deepcopy(cfg)
    cur = out
    parts = path.split(".")
    for p in parts[:-1]:
        if p not in cur or not isinstance(cur[p], dict):
            raise ConfigError(f"{path}: no such field")
        cur = cur[p]
    if parts[-1] not in cur:
        raise ConfigError(f"{path}: no such field")
    cur[parts[-1]] = value
    return out


# ------------------------------------------------------------------- output

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


def write_table(path: Path, rows: list) -> None:
    if not rows:
        path.write_text("")
        return
    keys = list(rows[0])
    with open(path, "w") as fh:
        fh.write(",".join(keys) + "\n")
        for r in rows:
            vals = []
            for k in keys:
                v = r.get(k)
                vals.append(f"{v:.17g}" if isinstance(v, (float, np.floating)) else str(v))
            fh.write(",".join(vals) + "\n")


# -------------------------------------------------------------- microgrid

def build_microgrid(cfg: dict, scheme: str) -> mg.MicrogridScenario:
    p = cfg["params"]
    invs = []
    for k, inv in enumerate(_require(cfg, "params.inverters")):
        if "m_p_rel" not in inv:
            raise ConfigError(f"params.inverters.{k}.m_p_rel: missing required field")
        invs.append(mg.InverterParams(m_p=inv["m_p_rel"] * mg.OMEGA0, k_i=inv.get("k_i", 1.0),
                                      tau_p=p.get("tau_p", 0.5), tau_q=p.get("tau_p", 0.5)))
    n = len(invs)
    X = np.full((n, n), np.inf)
    for i, j, x in p.get("lines", [[0, 1, p.get("X", 0.1)]]):
        X[i, j] = X[j, i] = x
    net = mg.LineNetwork(np.ones(n), X)
    edges = p.get("coupling", [[i, j, 1.0] for i in range(n) for j in range(i + 1, n)])
    graph = NetworkGraph(n, tuple(tuple(e) for e in edges))
    c = p.get("control", {})
    ctl = mg.ControlConfig(scheme=scheme, Gamma=c.get("Gamma", 1.0), Delta=c.get("Delta", 5e-4),
                           c_init=c.get("c_init", 0.5), min_gain_clamp=c.get("min_gain_clamp", False),
                           clamp_value=c.get("clamp_value", 1.0))
    f = p.get("fault", {})
    fault = mg.FaultSpec(kind=f.get("kind", "none"), delay=f.get("delay", 0.0), sigma=f.get("sigma", 1e-4),
                         noise_is_variance=f.get("noise_is_variance", True), t_start=f.get("t_start", 30.0),
                         t_end=f.get("t_end", 60.0))
    ld = p.get("load", {})
    load = mg.LoadSchedule([tuple(s) for s in ld.get("steps", [[0, 0.33], [60, 0.67], [120, 0.33]])],
                           ld.get("split", [1.0] + [0.0] * (n - 1)))
    return mg.MicrogridScenario(invs, net, graph, ctl, fault, load, p.get("noise_sigma", 1e-4),
                                p.get("noise_is_variance", True), p.get("filtered_measurement", False),
                                cfg["time"]["t_end"], cfg["time"]["dt"], cfg["seed"])


def run_microgrid(cfg: dict, out: Path) -> dict:
    schemes = cfg["params"].get("schemes", ["dapi", "radapi"])
    summary = {"schemes": {}}
    for scheme in schemes:
        sc = build_microgrid(cfg, scheme)
        ts = mg.simulate(sc)
        if ts.diverged:
            raise RuntimeError(f"{scheme} run diverged at t={ts.diverged_at}")
        ts.to_csv(out / f"trajectory_{scheme}.csv")
        tab = mg.settling_table(ts, sc)
        sig = mg.metric_signals(ts, sc)
        ends = [int(np.searchsorted(ts.times, b - 1e-9)) for _, b in mg.step_windows(sc)]
        s = {"settling_by_window": tab, "settling": mg.step_settling(tab, sc),
             "settling_all_windows": mg.scenario_settling(tab),
             "per_metric": {k: (None if None in v else max(v)) for k, v in tab.items()},
             "window_end_sharing": [float(sig["share"][min(e, len(ts.times) - 1)]) for e in ends],
             "window_end_freq_error": [float(sig["freq"][min(e, len(ts.times) - 1)]) for e in ends]}
        if scheme == "radapi":
            pd = mg.passivity_diagnostics(ts, sc)
            s["passivity"] = {"non_increasing": pd["non_increasing"], "max_Zdot": pd["max_Zdot"]}
            cs = np.column_stack([ts[f"c_{i}_{j}"] for i, j, _ in sc.coupling.edges])
            s["gain_min_step"] = float(np.min(np.diff(cs, axis=0)))
            s["gain_fit"] = mg.gain_fit(ts, sc, sc.load.step_times[-1] + 25.0)
            s["gain_final"] = cs[-1].tolist()
        if sc.fault.kind == "malicious_data":
            after = [w for w in mg.step_windows(sc) if w[0] >= sc.fault.t_end - 1e-9]
            rec = {}
            for name in ("freq", "input"):
                band = mg.metric_bands(sc)[name]
                a, b = after[0] if after else (sc.fault.t_end, sc.t_end)
                v = settling_time(ts.times, sig[name], 0.0, band, max(a, sc.fault.t_end), b)
                rec[name] = None if v is None else v - sc.fault.t_end
            s["resync_after_fault"] = rec
        summary["schemes"][scheme] = s
    if "dapi" in summary["schemes"] and "radapi" in summary["schemes"]:
        for key, field_ in (("net_gain_pct", "settling"), ("net_gain_all_windows_pct", "settling_all_windows")):
            d = summary["schemes"]["dapi"][field_]
            r = summary["schemes"]["radapi"][field_]
            summary[key] = None if d is None or r is None else mg.net_gain(d, r)
    return summary


# --------------------------------------------------------------------- tcl

def _thermal(p: dict) -> tcl.TclParams:
    t = p.get("thermal", {})
    return tcl.TclParams(**t)


def run_tcl_single(cfg: dict, out: Path) -> dict:
    p = cfg["params"]
    th = _thermal(p)
    dt, t_end = cfg["time"]["dt"], cfg["time"]["t_end"]
    cyc = tcl.hybrid_cycle(th)
    hyb = tcl.simulate_hybrid(th, t_end, dt)
    w = tcl.natural_frequency(th)
    fleet = tcl.FleetConfig(1, w, cyc["duty"], th.P, th.eta, K=0.0, alpha=0.0)
    ph = tcl.simulate_phase_fleet(fleet, t_end, dt, cfg["seed"])
    s_h = hyb["s"]
    s_p = tcl.switching_signal(ph["phi_0"], fleet.s0)
    start = int(np.argmax(np.abs(np.diff(s_h)) > 0)) + 1
    fs = 1.0 / dt
    res = {}
    for name, s in (("hybrid", s_h[start:]), ("phase", s_p[start:])):
        sp = analysis.fft_spectrum(s, fs)
        res[name] = {"duty": analysis.duty_of(s), "freq_per_h": analysis.dominant_frequency(sp),
                     "harmonics": analysis.harmonic_magnitudes(sp, 1 / cyc["period"]).tolist()}
    TimeSeries(hyb.times, {"T": hyb["T"], "s_hybrid": s_h, "s_phase": s_p}).to_csv(out / "single_unit.csv")
    res["analytic"] = {"duty": cyc["duty"], "period_h": cyc["period"], "omega_rad_per_h": w}
    res["duty_diff_pp"] = abs(res["hybrid"]["duty"] - res["phase"]["duty"]) * 100
    res["freq_rel_diff"] = abs(res["hybrid"]["freq_per_h"] - res["phase"]["freq_per_h"]) / res["hybrid"]["freq_per_h"]
    return res


def _alpha(p: dict, N: int):
    mode = p.get("alpha", "uniform")
    if mode == "uniform":
        return 2 * np.pi / N
    if mode == "per_unit":
        return tcl.splay_offsets(N)
    if mode == "pairwise":
        idx = np.arange(N)
        return (idx[:, None] - idx[None, :]) * 2 * np.pi / N
    return float(mode)


def phase_fleet_from(cfg: dict) -> tcl.FleetConfig:
    p = cfg["params"]
    N = p["N"]
    rng = RngStream(cfg["seed"]).spawn(7)
    omega = tcl.heterogeneous(p["omega"], p.get("heterogeneity", 0.0), N, rng)
    return tcl.FleetConfig(N, omega, p["duty"], p["P"], p.get("eta", 1.0), K=p.get("K", 0.267), alpha=_alpha(p, N))


def run_tcl_phase(cfg: dict, out: Path) -> dict:
    p = cfg["params"]
    fleet = phase_fleet_from(cfg)
    ts = tcl.simulate_phase_fleet(fleet, cfg["time"]["t_end"], cfg["time"]["dt"], cfg["seed"])
    ts.to_csv(out / "phase_fleet.csv")
    n = len(ts.times)
    m = slice(int(n * (1 - p.get("steady_fraction", 0.2))), None)
    Pa = ts["P_agg"][m]
    target = p.get("target_kW", fleet.rated * float(np.mean(fleet.duty)))
    traced = min(fleet.N, tcl.TRACE_CAP)
    phis = np.column_stack([ts[f"phi_{i}"] for i in range(traced)])[m]
    res = {"steady_P_agg": float(Pa.mean()), "target_kW": target,
           "ripple_pct": tcl.ripple_pct(Pa, target), "rms_dev_pct": float(Pa.std() / target * 100),
           "relative_error_pct": tcl.steady_relative_error(target, ts["P_agg"]),
           "rmse_pct": tcl.metric_rmse(target, Pa, target, ts.times[m])}
    if fleet.N <= tcl.TRACE_CAP:
        guard = p.get("edge_guard_rad", np.pi / 20)
        mask = tcl.edge_mask(phis, fleet.s0, guard)
        res["edge_guard_rad"] = guard
        res["plateau_fraction"] = float(mask.mean())
        res["plateau_ripple_pct"] = tcl.ripple_pct(Pa[mask], target) if mask.any() else None
    snap = analysis.circle_snapshot(phis[-1], float(ts.times[-1]))
    write_table(out / "circle.csv", [{"unit": i, "phase": snap["phase"][i], "x": snap["x"][i], "y": snap["y"][i]}
                                     for i in range(traced)])
    return res


def averaging_fleet_from(cfg: dict, key: int = 11) -> tcl.FleetConfig:
    p = cfg["params"]
    N = p["N"]
    rng = RngStream(cfg["seed"]).spawn(key)
    if "f_range" in p:
        f = rng.uniform(N, *p["f_range"])
    else:
        f = tcl.heterogeneous(p["f"], p.get("heterogeneity", 0.0), N, rng)
    duty = rng.uniform(N, *p["duty_range"]) if "duty_range" in p else p["duty"]
    w = p.get("W", 0.06)
    if p.get("normalize_W", False):
        w = w / N
    return tcl.FleetConfig(N, f, duty, p["P"], p.get("eta", 1.0), W_weight=w)


def run_tcl_averaging(cfg: dict, out: Path) -> dict:
    p = cfg["params"]
    fleet = averaging_fleet_from(cfg)
    run = tcl.simulate_averaging_fleet(fleet, cfg["time"]["t_end"], cfg["time"]["dt"], tcl.splay_offsets(fleet.N))
    ts = run.series
    ts.to_csv(out / "averaging_fleet.csv")
    n = len(ts.times)
    m = slice(int(n * (1 - p.get("steady_fraction", 0.25))), None)
    Pa = ts["P_agg"][m]
    mean0 = run.f0.mean()
    res = {"steady_P_agg": float(Pa.mean()), "band_pct": tcl.band_pct(Pa),
           "sum_f_drift_rel": float(np.max(np.abs(run.f_sum - run.f0.sum())) / abs(run.f0.sum())),
           "f_consensus_rel": float(np.max(np.abs(run.f_end - mean0)) / mean0),
           "W_weight": fleet.W_weight}
    if "target_kW" in p:
        tgt = p["target_kW"]
        res.update({"target_kW": tgt, "relative_error_pct": tcl.steady_relative_error(tgt, ts["P_agg"]),
                    "rmse_pct": tcl.metric_rmse(tgt, ts["P_agg"], tgt, ts.times)})
    return res


def p_red_pair(cfg: dict, seed: int) -> dict:
    """Same heterogeneous fleet uncontrolled (random phases, fixed
    frequencies) and under averaging with evenly spread offsets."""
    c = copy.deepcopy(cfg)
    c["seed"] = seed
    fleet = averaging_fleet_from(c)
    dt, t_end = c["time"]["dt"], c["time"]["t_end"]
    rng = RngStream(seed).spawn(13)
    free = tcl.FleetConfig(fleet.N, fleet.omega, fleet.duty, fleet.P, fleet.eta, W_weight=0.0)
    r_rand = tcl.simulate_averaging_fleet(free, t_end, dt, rng.uniform(fleet.N, 0, 2 * np.pi))
    r_des = tcl.simulate_averaging_fleet(fleet, t_end, dt, tcl.splay_offsets(fleet.N))
    frac = c["params"].get("steady_fraction", 0.25)
    k = int(len(r_rand.series.times) * (1 - frac))
    a, b = r_rand.series["P_agg"][k:], r_des.series["P_agg"][k:]
    return {"seed": seed, "p2p_random": float(np.ptp(a)), "p2p_desync": float(np.ptp(b)),
            "P_red_pct": tcl.metric_p_red(float(np.ptp(a)), float(np.ptp(b))),
            "series": (r_rand.series, r_des.series)}


def run_tcl_pred(cfg: dict, out: Path) -> dict:
    seeds = cfg["params"].get("seeds", [cfg["seed"]])
    rows = []
    for s in seeds:
        r = p_red_pair(cfg, s)
        rr, rd = r.pop("series")
        if s == seeds[0]:
            TimeSeries(rr.times, {"P_random": rr["P_agg"], "P_desync": rd["P_agg"]}).to_csv(out / "p_red.csv")
        rows.append(r)
    write_table(out / "p_red_seeds.csv", rows)
    vals = [r["P_red_pct"] for r in rows]
    return {"per_seed": rows, "P_red_mean_pct": float(np.mean(vals)), "P_red_min_pct": float(np.min(vals)),
            "P_red_max_pct": float(np.max(vals))}


def run_tcl_delayc(cfg: dict, out: Path) -> dict:
    p = cfg["params"]
    fleet = averaging_fleet_from(cfg)
    dmap = tcl.delayc_build(fleet, p.get("freq", float(np.mean(fleet.omega))), p.get("alpha_step", 0.01))
    write_table(out / "delayc.csv", [{"alpha": a, "rms_pct": r} for a, r in zip(dmap.alphas, dmap.rms_pct)])
    return {"monotone": dmap.monotone, "rms_max_pct": dmap.max_pct, "rms_min_pct": dmap.min_pct,
            "alpha_at_min": float(dmap.alphas[int(np.argmin(dmap.rms_pct))])}


def run_tcl_loadfollow(cfg: dict, out: Path) -> dict:
    p = cfg["params"]
    fleet = averaging_fleet_from(cfg)
    th = _thermal(p)
    ts_before, db_before = th.T_s, th.deadband
    fbar = float(np.mean(fleet.omega))
    dmap = tcl.delayc_build(fleet, fbar, p.get("alpha_step", 0.01))
    util = tcl.UtilitySignal([tuple(s) for s in p["utility"]])
    dt = cfg["time"]["dt"]
    period = 1.0 / fbar
    every = max(1, int(round(p.get("control_cycles", 1) * period / dt)))
    win = max(1, int(round(period / dt)))
    follower = tcl.LoadFollower(dmap, fleet.N, ki=p.get("ki", 0.5))
    refs = []
    clamps = []

    def schedule(k, t, hist, alpha):
        if k % every != 0:
            return alpha
        ref = util.at(t)
        meas = float(np.sqrt(np.mean(hist[-win:] ** 2))) / fleet.rated * 100
        new = tcl.load_following_step(follower, ref, meas)
        clamps.append(follower.clamped)
        return new

    run = tcl.simulate_averaging_fleet(fleet, cfg["time"]["t_end"], dt, np.zeros(fleet.N), thermal=th,
                                       alpha_schedule=schedule)
    ts = run.series
    for t in ts.times:
        v = util.at(t)
        refs.append(np.nan if v is None else v * fleet.rated / 100)
    refs = np.array(refs)
    ts.add("P_ref", refs)
    ts.to_csv(out / "load_following.csv", ["P_agg", "P_ref", "f_sum"])
    last_step = util.steps[-1][0]
    m = ts.times >= last_step + p.get("settle_time", 0.0)
    res = {"reference_final_pct": util.steps[-1][1],
           "relative_error_pct": tcl.steady_relative_error(refs, ts["P_agg"]),
           "rmse_after_step_pct": tcl.metric_rmse(refs[m], ts["P_agg"][m], refs[m][-1], ts.times[m]),
           "setpoint_unchanged": th.T_s == ts_before and th.deadband == db_before,
           "delayc_min_pct": dmap.min_pct, "delayc_max_pct": dmap.max_pct,
           "any_clamp": bool(any(clamps))}
    return res


# --------------------------------------------------------------- powergrid

def run_powergrid_case(cfg: dict, out: Path) -> dict:
    p = cfg["params"]
    sysm = pg.two_area_scenario(p["case"])
    ts = pg.simulate(sysm, cfg["time"]["t_end"], cfg["time"]["dt"], cfg["seed"], stride=p.get("stride", 10))
    ts.to_csv(out / "trajectory.csv")
    gaps = pg.steady_gaps(ts, sysm)
    reg = pg.chimera_detect(ts, sysm)
    roots, fails = pg.equilibrium_solve(sysm, [pg.angles(ts, sysm.n)[-1], np.zeros(sysm.n),
                                               np.array([0, 0, np.pi, np.pi])])
    eq = [{"delta": r.delta.tolist(), "drift": r.drift, "stability": pg.classify_fixed_point(sysm, r).label}
          for r in roots]
    comp = pg.compass_vectors(ts, sysm)
    write_table(out / "compass.csv", [{"gen": i, "magnitude": comp[i, 0], "angle": comp[i, 1]} for i in range(sysm.n)])
    snap = analysis.circle_snapshot(pg.angles(ts, sysm.n)[-1], float(ts.times[-1]))
    write_table(out / "circle.csv", [{"gen": i, "phase": snap["phase"][i], "x": snap["x"][i], "y": snap["y"][i]}
                                     for i in range(sysm.n)])
    return {"interarea_gap": gaps["inter"], "intraarea_gap": gaps["intra"], "gap_drift": gaps["gap_drift"],
            "regime": reg, "equilibria": eq, "critical_coupling_ok": pg.above_critical_coupling(sysm.coupling.k, sysm.omega)}


def parse_range(spec: str) -> np.ndarray:
    """'a:b:step' inclusive grid, or a comma list."""
    if ":" in spec:
        a, b, s = (float(x) for x in spec.split(":"))
        n = int(round((b - a) / s))
        return np.round(a + s * np.arange(n + 1), 12)
    return np.array([float(x) for x in spec.split(",")])


def run_powergrid_bifurcation(cfg: dict, out: Path, values=None) -> dict:
    p = cfg["params"]
    tmpl = pg.sweep_template(p.get("base_omega"), p.get("case", 1))
    vals = parse_range(p["range"]) if values is None else values
    recs = pg.bifurcation_sweep(tmpl, p["parameter"], vals, cfg["time"]["t_end"], cfg["time"]["dt"], cfg["seed"],
                                omega_index=p.get("omega_index", 3))
    write_table(out / "sweep.csv", recs)
    return {"records": recs}


RUNNERS = {
    ("microgrid", "compare"): run_microgrid,
    ("tcl", "single"): run_tcl_single,
    ("tcl", "phase"): run_tcl_phase,
    ("tcl", "averaging"): run_tcl_averaging,
    ("tcl", "p_red"): run_tcl_pred,
    ("tcl", "delayc"): run_tcl_delayc,
    ("tcl", "loadfollow"): run_tcl_loadfollow,
    ("powergrid", "case"): run_powergrid_case,
    ("powergrid", "bifurcation"): run_powergrid_bifurcation,
}


def run_config(cfg: dict, out_dir, seed: int | None = None) -> dict:
    """Execute one scenario; writes summary.json and manifest.json."""
    cfg = copy.deepcopy(cfg)
    if seed is not None:
        cfg["seed"] = int(seed)
    validate(cfg)
    key = (cfg["model"], cfg["kind"])
    if key not in RUNNERS:
        raise ConfigError(f"kind: unsupported kind {cfg['kind']!r} for model {cfg['model']!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = RUNNERS[key](cfg, out)
    summary = {"schema_version": SCHEMA_VERSION, "scenario": cfg["name"], "model": cfg["model"],
               "seed": cfg["seed"], "time_unit": cfg["time"]["unit"], "result": result}
    write_json(out / "summary.json", summary)
    write_json(out / "manifest.json", {"tool": "syncnet", "tool_version": __version__, "seed": cfg["seed"],
                                       "config": cfg})
    summary["runtime_s"] = time.perf_counter() - t0
    return summary


def run_sweep(cfg: dict, param: str, values, out_dir) -> list:
    """Run a scenario across values of ``param`` (bifurcation parameter or a
    dotted config path); one sub-directory per point."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg["model"] == "powergrid" and cfg["kind"] == "bifurcation":
        c = copy.deepcopy(cfg)
        c["params"]["parameter"] = param
        return run_powergrid_bifurcation(c, out, np.asarray(values, float))["records"]
    rows = []
    for k, v in enumerate(values):
        c = set_path(cfg, param, float(v))
        s = run_config(c, out / f"point_{k:03d}")
        rows.append({"param": param, "value": float(v), "summary": str(out / f"point_{k:03d}" / "summary.json")})
    write_table(out / "sweep.csv", rows)
    return rows
