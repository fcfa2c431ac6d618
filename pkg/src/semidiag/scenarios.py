"""Named experiments: each returns acceptance checks and CSV artifacts.

Every scenario reads a resolved :class:`~semidiag.config.ScenarioConfig`.
The defaults in :data:`SCHEMAS` are the frozen settings calibrated on pilot
runs; pilot seeds differ from the default ``master_seed`` of each scenario.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dcdiag, flow, lattice, localtime, variation
from .config import ScenarioConfig
from .montecarlo import map_replicates, stable_mean, stable_mean_se
from .paths import SamplePath, SeedSpec, gen_brownian, gen_fbm


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: str
    tolerance: str

    def line(self) -> str:
        return f"CHECK {self.name} {'PASS' if self.passed else 'FAIL'} {self.value} {self.tolerance}"


@dataclass
class ScenarioResult:
    checks: list = field(default_factory=list)
    files: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, value, tolerance):
        self.checks.append(Check(name, bool(passed), _fmt(value), _fmt(tolerance)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v.replace(" ", "")
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}"


def _csv(header: str, rows) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(_cell(c) for c in row) + "\n")
    return buf.getvalue()


def _cell(c) -> str:
    if isinstance(c, (int, np.integer)):
        return str(int(c))
    if isinstance(c, str):
        return c
    return f"{float(c):.17g}"


# ---------------------------------------------------------------- bm-dc


def _lattice_function(rng: np.random.Generator, walk: lattice.LatticeWalk):
    lo, hi = int(walk.sites.min()) - 1, int(walk.sites.max()) + 1
    table = rng.standard_normal(hi - lo + 1)

    def F(x):
        r = np.rint((np.asarray(x) - walk.origin) / walk.delta).astype(np.int64)
        return table[r - lo]

    return F


_TEST_FUNCTIONS = {
    "x2": (lambda x: x * x, lambda a, b: 2.0 * (b - a)),
    "exp": (np.exp, lambda a, b: math.exp(b) - math.exp(a)),
    "abs": (np.abs, lambda a, b: 2.0 if a <= 0.0 <= b else 0.0),
    "const": (lambda x: np.ones_like(x), lambda a, b: 0.0),
}


def run_bm_dc(cfg: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult()

    def one(seed: SeedSpec):
        path = gen_brownian(seed, 1.0, cfg["ito_path_steps"])
        rng = seed.generator(3)
        origin = float(rng.uniform(0.0, cfg["ito_delta"]))
        walk = lattice.embed_walk(path, cfg["ito_delta"], origin)
        F = _lattice_function(rng, walk)
        n = walk.n_steps
        mart, lap = lattice.discrete_ito(F, walk, n)
        _, loc = lattice.discrete_ito_tanaka(F, walk, n)
        s = walk.sites
        resid = math.fsum([float(F(walk.site_value(s[n]))), -float(F(walk.site_value(s[0]))), -mart, -lap])
        return n, abs(resid), lap == loc

    rows = map_replicates(one, cfg["master_seed"], cfg["ito_pairs"], threads)
    worst = max(r[1] for r in rows)
    res.check("ito-identity-residual", worst <= cfg["ito_tol"], worst, cfg["ito_tol"])
    exact = sum(r[2] for r in rows)
    res.check("ito-tanaka-regrouping-exact", exact == len(rows), exact, len(rows))
    res.files["ito.csv"] = _csv("pair,steps,residual,regrouping_exact",
                                ((i, r[0], r[1], int(r[2])) for i, r in enumerate(rows)))

    func, tv = _TEST_FUNCTIONS[cfg["function"]]
    a, b = cfg["interval"]
    dmax = max(cfg["deltas"])
    dx = cfg["function_dx"]
    n = int(round((b - a + 2 * dmax) / dx)) + 1
    F = dcdiag.SampledFunction.from_callable(func, a - dmax, dx, n)
    verdict = dcdiag.dc_test(F, (a, b), cfg["deltas"])
    target = tv(a, b)
    worst = max(abs(m - target) for m in verdict.masses)
    tol = cfg["mass_rtol"] * max(abs(target), 1.0) if target == 0 else cfg["mass_rtol"] * target
    res.check(f"dc-mass-{cfg['function']}", worst <= tol, worst, tol)
    res.check(f"dc-verdict-{cfg['function']}", verdict.bounded == "bounded", verdict.bounded, "bounded")
    res.files["dc.csv"] = verdict.to_csv()
    return res


# ---------------------------------------------------------------- integrated-bm / -fbm


def _dc_window(levels, start: float, length: float) -> tuple[float, float, list]:
    """Closed window ``[start, start + length - finest]`` and its dyadic ladder.

    With ``start`` and ``length`` multiples of the coarsest spacing, the
    window holds exactly ``length / delta`` sublattice points for every
    ``delta`` of the ladder, so the site count scales exactly like ``1/delta``.
    """
    deltas = [2.0 ** -k for k in sorted(levels)]
    return start, start + length - deltas[-1], deltas


def _integrated_dc(cfg: ScenarioConfig, threads: int, hurst) -> ScenarioResult:
    res = ScenarioResult()
    coarse = 2.0 ** -min(cfg["dc_levels"])
    a, b, deltas = _dc_window(cfg["dc_levels"], 2 * coarse, 1.0 - 4 * coarse)
    lo, hi = cfg["exponent_band"]
    hs = [None] if hurst is None else list(hurst)
    for H in hs:
        def one(seed: SeedSpec, H=H):
            n = cfg["n_steps"]
            p = gen_brownian(seed, 1.0, n) if H is None else gen_fbm(seed, H, 1.0, n)
            F = dcdiag.integrate_samples(0.0, p.dt, p.values)
            return dcdiag.dc_test(F, (a, b), deltas)

        verdicts = map_replicates(one, cfg["master_seed"], cfg["seeds"], threads)
        ok = sum(v.bounded == "diverging" and lo <= v.growth_exponent <= hi for v in verdicts)
        tag = "bm" if H is None else f"fbm-H{H:g}"
        res.check(f"dc-diverging-{tag}", ok >= cfg["min_pass"], ok, f">={cfg['min_pass']}/{len(verdicts)}")
        rows = []
        for i, v in enumerate(verdicts):
            rows.append([i, v.growth_exponent, v.bounded] + list(v.masses))
        res.files[f"dc-{tag}.csv"] = _csv(
            "seed,exponent,verdict," + ",".join(f"mass_delta_{d:g}" for d in deltas), rows)
    return res


def run_integrated_bm(cfg, threads=1):
    return _integrated_dc(cfg, threads, None)


def run_integrated_fbm(cfg, threads=1):
    return _integrated_dc(cfg, threads, cfg["hurst"])


# ---------------------------------------------------------------- rogers-prep


def run_rogers_prep(cfg: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult()
    n_lv = int(round((cfg["level_hi"] - cfg["level_lo"]) / cfg["level_step"])) + 1
    lv = np.linspace(cfg["level_lo"], cfg["level_hi"], n_lv)

    def one(seed: SeedSpec):
        p = gen_brownian(seed, 1.0, cfg["n_steps"])
        Z = localtime.tanaka_profile(p, lv).values
        return float(np.sum(np.diff(Z) ** 2)), 4.0 * float(np.trapezoid(Z, lv))

    rows = map_replicates(one, cfg["master_seed"], cfg["replicates"], threads)
    emp = stable_mean([r[0] for r in rows])
    form = stable_mean([r[1] for r in rows])
    rel = abs(emp - form) / form
    res.check("profile-space-qv", rel <= cfg["qv_rtol"], rel, cfg["qv_rtol"])
    res.files["profile-qv.csv"] = _csv("replicate,empirical_qv,formula", ((i, *r) for i, r in enumerate(rows)))

    a, b, deltas = _dc_window(cfg["dc_levels"], cfg["level_lo"], cfg["level_hi"] - cfg["level_lo"])

    def dc_one(seed: SeedSpec):
        p = gen_brownian(seed, 1.0, cfg["n_steps"])
        dx = deltas[-1] / 4
        pad = 2 * deltas[0]
        xs = a - pad + np.arange(int(round((b - a + 2 * pad) / dx)) + 1) * dx
        F = dcdiag.SampledFunction(xs[0], dx, localtime.rogers_F(p, xs))
        return dcdiag.dc_test(F, (a, b), deltas)

    verdicts = map_replicates(dc_one, cfg["master_seed"], cfg["dc_seeds"], threads)
    ok = sum(v.bounded == "diverging" for v in verdicts)
    res.check("occupation-F-diverging", ok >= cfg["dc_min_pass"], ok, f">={cfg['dc_min_pass']}/{len(verdicts)}")
    res.files["occupation-F-dc.csv"] = _csv(
        "seed,exponent,verdict", ((i, v.growth_exponent, v.bounded) for i, v in enumerate(verdicts)))
    return res


# ---------------------------------------------------------------- rogers-pvar


def run_rogers_pvar(cfg: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult()
    ladder = variation.PartitionLadder.dyadic(0.0, 1.0, cfg["ladder_levels"])

    def one(seed: SeedSpec):
        X = variation.rogers_process(gen_brownian(seed, 1.0, cfg["n_steps"]))
        return {p: variation.ladder_report(X, p, ladder, cfg["grow"], 1.0) for p in cfg["p_values"]}

    reps = map_replicates(one, cfg["master_seed"], cfg["seeds"], threads)
    rows = []
    for i, rep in enumerate(reps):
        for p, r in rep.items():
            for j, (m, v) in enumerate(zip(r.meshes, r.values)):
                rows.append((i, f"{p:.6g}", j, m, v, r.verdict))
    res.files["pvar.csv"] = _csv("seed,p,rung,mesh,value,verdict", rows)
    for p, want in ((cfg["p_high"], "decreasing"), (cfg["p_low"], "increasing")):
        ok = sum(rep[p].verdict == want for rep in reps)
        res.check(f"pvar-{want}-p{p:g}", ok >= cfg["min_pass"], ok, f">={cfg['min_pass']}/{len(reps)}")
    return res


# ---------------------------------------------------------------- flow-median


def _sigma(cfg) -> flow.PiecewiseLinearSigma:
    name = cfg["sigma"]
    if name == "canonical":
        return flow.PiecewiseLinearSigma.canonical()
    if name == "zero":
        return flow.PiecewiseLinearSigma.zero()
    with open(name) as fh:
        return flow.PiecewiseLinearSigma.from_text(fh.read())


def _rel_check(res, name, emp, form, rtol):
    if form == 0.0:
        res.check(name, abs(emp) <= 1e-12, abs(emp), 1e-12)
    else:
        rel = abs(emp - form) / abs(form)
        res.check(name, rel <= rtol, rel, rtol)


def flow_tail_part(cfg: ScenarioConfig, threads: int, res: ScenarioResult):
    """Tail solutions: strong order 1/2 under ``dt -> dt/4`` on shared paths (canonical sigma only)."""
    sigma = _sigma(cfg)
    seed0 = cfg["master_seed"]
    if sigma == flow.PiecewiseLinearSigma.canonical():
        def tail(seed: SeedSpec):
            fine = gen_brownian(seed, 1.0, cfg["tail_fine_steps"])
            m = cfg["tail_coarsen"]
            coarse = SamplePath(0.0, fine.dt * m, fine.values[::m])
            out = []
            for drv in (coarse, fine):
                f = flow.simulate_flow(sigma, list(cfg["tail_points"]), drv)
                out.append([float(np.max(np.abs(f.D[:, j] - flow.tail_solution(x, drv))))
                            for j, x in enumerate(cfg["tail_points"])])
            return out

        errs = np.array(map_replicates(tail, seed0, cfg["tail_seeds"], threads))
        rows = []
        for j, x in enumerate(cfg["tail_points"]):
            ec, ef = stable_mean(errs[:, 0, j]), stable_mean(errs[:, 1, j])
            ratio = ec / ef
            want = math.sqrt(cfg["tail_coarsen"])
            ok = abs(ratio - want) <= cfg["tail_slack"] * want
            res.check(f"tail-order-x{x:g}", ok, ratio, f"{want:g}+-{cfg['tail_slack']:g}")
            rows.append((x, ec, ef, ratio))
        res.files["tail.csv"] = _csv("x,mean_err_coarse,mean_err_fine,ratio", rows)


def flow_space_qv_part(cfg: ScenarioConfig, threads: int, res: ScenarioResult):
    """Space QV of ``Z`` and ``D'`` at the final time against the swept-jump formula."""
    sigma = _sigma(cfg)
    seed0 = cfg["master_seed"]
    n = cfg["sqv_steps"]
    drv = gen_brownian(SeedSpec(seed0, 0), 1.0, n)
    a, b = cfg["sqv_interval"]
    x = np.linspace(a, b, cfg["sqv_nx"])
    fld = flow.simulate_flow(sigma, x, drv, record_every=n)
    emp, form = variation.space_qv_Z(fld, a, b)
    _rel_check(res, "space-qv-Z", emp, form, cfg["sqv_rtol"])
    Zs = variation.space_series(fld, "Z")
    ladder = variation.PartitionLadder.from_steps(Zs, cfg["sqv_strides"])
    rep = variation.space_qv_Dprime(fld, a, b, ladder, cfg["dprime_coefficient"])
    _rel_check(res, "space-qv-Dprime", rep.values[-1], rep.formula[-1], cfg["dprime_rtol"])
    rows = [(m, v, f) for m, v, f in zip(rep.meshes, rep.values, rep.formula)]
    res.files["space-qv.csv"] = _csv("mesh,dprime_qv,dprime_formula", rows) + f"# Z qv {emp:.17g} formula {form:.17g}\n"


def flow_zero_energy_part(cfg: ScenarioConfig, threads: int, res: ScenarioResult):
    """Zero energy of ``A`` and the martingale QV of the quantile process."""
    sigma = _sigma(cfg)
    seed0 = cfg["master_seed"]
    alpha = cfg["alpha"]
    steps = [cfg["ze_steps"] >> k for k in cfg["ze_ladder"]]

    def ze(seed: SeedSpec):
        d = gen_brownian(seed, 1.0, cfg["ze_steps"])
        f = flow.simulate_flow(sigma, np.linspace(0.0, 1.0, cfg["ze_nx"]), d,
                               record_every=cfg["ze_steps"], track_alphas=[alpha])
        return flow.zero_energy_residual(f, alpha, steps)

    reps = map_replicates(ze, seed0, cfg["ze_seeds"], threads)
    ok_a = ok_q = 0
    rows = []
    for i, r in enumerate(reps):
        ratios = variation.growth_ratios(r.qv_A)
        zero = np.all(r.qv_A == 0.0)
        dec = zero or (np.all(ratios <= 1.0 + cfg["ze_slack"]) and r.qv_A[-1] <= cfg["ze_ratio"] * r.qv_A[0])
        ok_a += bool(dec)
        if r.martingale_qv == 0.0:
            ok_q += bool(r.qv_q[-1] == 0.0)
        else:
            ok_q += bool(abs(r.qv_q[-1] / r.martingale_qv - 1.0) <= cfg["ze_qv_rtol"])
        for j, m in enumerate(r.meshes):
            rows.append((i, j, m, r.qv_A[j], r.qv_q[j], r.martingale_qv))
    res.files["zero-energy.csv"] = _csv("seed,rung,mesh,qv_A,qv_q,martingale_qv", rows)
    res.check("zero-energy-A", ok_a >= cfg["ze_min_pass"], ok_a, f">={cfg['ze_min_pass']}/{len(reps)}")
    res.check("quantile-qv-martingale", ok_q >= cfg["ze_min_pass"], ok_q, f">={cfg['ze_min_pass']}/{len(reps)}")


def flow_tv_part(cfg: ScenarioConfig, threads: int, res: ScenarioResult):
    """Total variation of ``x -> D'_T(x)``: growth where the image sweeps a kink, plateau elsewhere."""
    sigma = _sigma(cfg)
    seed0 = cfg["master_seed"]
    if sigma.jumps.size:
        def tv(seed: SeedSpec):
            d = gen_brownian(seed, 1.0, cfg["tv_steps"])
            out = []
            for lo, hi in (cfg["tv_sweep_interval"], cfg["tv_avoid_interval"]):
                f = flow.simulate_flow(sigma, np.linspace(lo, hi, cfg["tv_nx"]), d, record_every=cfg["tv_steps"])
                Dp = f.Dprime[-1]
                vals = [float(np.abs(np.diff(Dp[::s])).sum()) for s in cfg["tv_strides"]]
                out.append((vals, float(f.sweep.sum())))
            return out

        reps = map_replicates(tv, seed0 + 1, cfg["tv_seeds"], threads)
        rows = []
        grow_ok = flat_ok = 0
        worst_grow, worst_flat = math.inf, 0.0
        for i, ((sw, _), (av, av_sweep)) in enumerate(reps):
            g = variation.growth_ratios(sw)
            h = variation.growth_ratios(av)
            worst_grow = min(worst_grow, float(g.min()))
            worst_flat = max(worst_flat, float(h.max()))
            grow_ok += bool(np.all(g >= cfg["tv_growth"]))
            flat_ok += bool(av_sweep == 0.0 and np.all(h < cfg["tv_plateau"]))
            for j, s in enumerate(cfg["tv_strides"]):
                rows.append((i, s, sw[j], av[j], av_sweep))
        res.files["dprime-tv.csv"] = _csv("seed,stride,tv_sweep,tv_avoid,avoid_swept_mass", rows)
        n = len(reps)
        res.check("dprime-tv-growth", grow_ok == n, worst_grow, f">={cfg['tv_growth']:g}")
        res.check("dprime-tv-plateau", flat_ok == n, worst_flat, f"<{cfg['tv_plateau']:g}")


FLOW_PARTS = (flow_tail_part, flow_space_qv_part, flow_zero_energy_part, flow_tv_part)


def run_flow_median(cfg: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult()
    for part in FLOW_PARTS:
        part(cfg, threads, res)
    return res


# ---------------------------------------------------------------- lamperti-check


def run_lamperti_check(cfg: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult()
    sigma = flow.PiecewiseLinearSigma.canonical()
    p = flow.lamperti_map(sigma)
    x = np.linspace(cfg["x_lo"], cfg["x_hi"], cfg["nx"])
    n = cfg["n_steps"]

    def one(seed: SeedSpec):
        d = gen_brownian(seed, 1.0, n)
        f = flow.simulate_flow(sigma, x, d, record_every=cfg["record_every"])
        g = flow.simulate_sign_sde(cfg["beta"], p(x), d, record_every=cfg["record_every"])
        lam = float(np.max(np.abs(p(f.D) - g.D)))
        comp = flow.compose_flow_check(sigma, x, d, cfg["split_s"], record_every=cfg["record_every"])
        pts = flow.simulate_flow(sigma, list(cfg["drift_points"]), d)
        zs = []
        for j in range(pts.D.shape[1]):
            D = pts.D[:, j]
            r = np.diff(p(D)) - d.increments() + 0.5 * sigma.derivative(D[:-1]) * d.dt
            m, se = stable_mean_se(r)
            zs.append(m / se)
        return lam, comp.max_discrepancy, zs

    rows = map_replicates(one, cfg["master_seed"], cfg["seeds"], threads)
    lam = max(r[0] for r in rows)
    comp = max(r[1] for r in rows)
    zmax = max(max(abs(z) for z in r[2]) for r in rows)
    res.check("lamperti-correspondence", lam <= cfg["lamperti_budget"], lam, cfg["lamperti_budget"])
    res.check("flow-composition", comp <= cfg["compose_budget"], comp, cfg["compose_budget"])
    res.check("lamperti-drift", zmax <= cfg["drift_z"], zmax, cfg["drift_z"])
    res.files["lamperti.csv"] = _csv("seed,lamperti_max,composition_max," +
                                     ",".join(f"drift_z_x{v:g}" for v in cfg["drift_points"]),
                                     ((i, r[0], r[1], *r[2]) for i, r in enumerate(rows)))
    return res


# ---------------------------------------------------------------- crossing-lt


def run_crossing_lt(cfg: ScenarioConfig, threads: int = 1) -> ScenarioResult:
    res = ScenarioResult()
    x, delta, h = cfg["level"], cfg["delta"], cfg["bandwidth"]

    def one(seed: SeedSpec):
        b = gen_brownian(seed, 1.0, cfg["n_steps"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plain = localtime.crossing_local_time(b, x, delta)
        return (localtime.tanaka_local_time(b, x),
                float(localtime.occupation_profile(b, None, [x], h).values[0]),
                localtime.crossing_local_time(b, x, delta, bridge=True),
                plain)

    rows = map_replicates(one, cfg["master_seed"], cfg["replicates"], threads)
    target = math.sqrt(2.0 / math.pi)
    lo, hi = target * (1 - cfg["rtol"]), target * (1 + cfg["rtol"])
    names = ("tanaka", "occupation", "crossing", "crossing-plain")
    means = [stable_mean([r[k] for r in rows]) for k in range(4)]
    chosen = "crossing" if cfg["crossing_method"] == "bridge" else "crossing-plain"
    for name, m in zip(names, means):
        if name in ("tanaka", "occupation", chosen):
            res.check(f"local-time-{name}", lo <= m <= hi, m, f"[{lo:.4g},{hi:.4g}]")
    res.files["estimates.csv"] = _csv("replicate,tanaka,occupation,crossing_bridge,crossing_plain",
                                      ((i, *r) for i, r in enumerate(rows)))
    res.files["means.csv"] = _csv("estimator,mean", zip(names, means))
    return res


# ---------------------------------------------------------------- registry


SCHEMAS: dict[str, dict] = {
    "bm-dc": {
        "master_seed": 101,
        "ito_pairs": 100,
        "ito_path_steps": 4000,
        "ito_delta": 0.05,
        "ito_tol": 1e-12,
        "function": "x2",
        "function_dx": 0.01,
        "interval": (0.0, 1.0),
        "deltas": (0.04, 0.02, 0.01),
        "mass_rtol": 0.05,
    },
    "integrated-bm": {
        "master_seed": 202,
        "seeds": 10,
        "n_steps": 8192,
        "dc_levels": (5, 6, 7, 8, 9),
        "exponent_band": (0.3, 0.7),
        "min_pass": 9,
    },
    "integrated-fbm": {
        "master_seed": 303,
        "seeds": 10,
        "n_steps": 8192,
        "hurst": (0.3, 0.7),
        "dc_levels": (5, 6, 7, 8, 9),
        "exponent_band": (0.3, 0.7),
        "min_pass": 9,
    },
    "rogers-prep": {
        "master_seed": 404,
        "replicates": 1000,
        "n_steps": 100000,
        "level_lo": -0.5,
        "level_hi": 0.5,
        "level_step": 0.01,
        "qv_rtol": 0.15,
        "dc_seeds": 10,
        "dc_levels": (3, 4, 5, 6, 7),
        "dc_min_pass": 9,
    },
    "rogers-pvar": {
        "master_seed": 505,
        "seeds": 10,
        "n_steps": 262144,
        "ladder_levels": (4, 5, 6, 7, 8, 9, 10),
        "p_values": (2.0, 1.1, 4.0 / 3.0),
        "p_high": 2.0,
        "p_low": 1.1,
        "grow": 1.2,
        "min_pass": 8,
    },
    "flow-median": {
        "master_seed": 606,
        "sigma": "canonical",
        "tail_seeds": 400,
        "tail_fine_steps": 40000,
        "tail_coarsen": 4,
        "tail_points": (-1.0, 2.0),
        "tail_slack": 0.3,
        "sqv_steps": 100000,
        "sqv_interval": (0.3, 0.7),
        "sqv_nx": 4001,
        "sqv_strides": (40, 10, 4, 1),
        "sqv_rtol": 0.15,
        "dprime_rtol": 0.20,
        "dprime_coefficient": 1.0,
        "alpha": 0.5,
        "ze_seeds": 10,
        "ze_steps": 262144,
        "ze_nx": 2001,
        "ze_ladder": (5, 6, 7, 8, 9, 10, 11, 12, 13, 14),
        "ze_slack": 0.1,
        "ze_ratio": 0.1,
        "ze_qv_rtol": 0.15,
        "ze_min_pass": 8,
        "tv_seeds": 5,
        "tv_steps": 100000,
        "tv_nx": 4097,
        "tv_strides": (64, 16, 4),
        "tv_sweep_interval": (0.3, 0.7),
        "tv_avoid_interval": (0.02, 0.1),
        "tv_growth": 1.5,
        "tv_plateau": 1.1,
    },
    "lamperti-check": {
        "master_seed": 707,
        "seeds": 3,
        "n_steps": 100000,
        "x_lo": 0.1,
        "x_hi": 0.9,
        "nx": 801,
        "record_every": 1000,
        "beta": 0.5,
        "split_s": 0.5,
        "drift_points": (0.3, 0.7),
        "lamperti_budget": 0.1,
        "compose_budget": 7e-4,
        "drift_z": 3.0,
    },
    "crossing-lt": {
        "master_seed": 808,
        "replicates": 10000,
        "n_steps": 100000,
        "level": 0.0,
        "delta": 0.02,
        "bandwidth": 0.02,
        "rtol": 0.05,
        "crossing_method": "bridge",
    },
}

RUNNERS: dict[str, Callable[[ScenarioConfig, int], ScenarioResult]] = {
    "bm-dc": run_bm_dc,
    "integrated-bm": run_integrated_bm,
    "integrated-fbm": run_integrated_fbm,
    "rogers-prep": run_rogers_prep,
    "rogers-pvar": run_rogers_pvar,
    "flow-median": run_flow_median,
    "lamperti-check": run_lamperti_check,
    "crossing-lt": run_crossing_lt,
}
