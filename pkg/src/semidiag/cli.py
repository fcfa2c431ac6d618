"""Command-line entry point.

Exit codes for ``run``: 0 when every check passes, 2 when a check fails,
1 on an execution error, 64 for an unknown scenario (nothing is written).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, config, dcdiag, flow, lattice, localtime, scenarios, variation
from .errors import InvalidArgument
from .paths import SamplePath, SeedSpec, gen_brownian, gen_fbm

EXIT_OK, EXIT_ERROR, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2, 64


def emit_summary(scenario: str, cfg: config.ScenarioConfig, result: scenarios.ScenarioResult,
                 out_dir: Path) -> Path:
    """Write the CSVs and ``summary.txt`` under ``out_dir/scenario``."""
    if not result.checks:
        raise InvalidArgument("summary needs at least one check")
    target = out_dir / scenario
    target.mkdir(parents=True, exist_ok=True)
    for name in sorted(result.files):
        (target / name).write_text(result.files[name])
    lines = [
        f"# semidiag {__version__}",
        f"# scenario {scenario}",
        f"# config {cfg.digest}",
        f"# seeds master={cfg['master_seed']}",
    ]
    lines += [c.line() for c in result.checks]
    lines += [f"FILE {scenario}/{name}" for name in sorted(result.files)]
    lines.append(f"RESULT {'PASS' if result.passed else 'FAIL'}")
    summary = target / "summary.txt"
    summary.write_text("\n".join(lines) + "\n")
    (target / "config.txt").write_text(cfg.render())
    return summary


def resolve_config(scenario: str, config_path=None, seed=None) -> config.ScenarioConfig:
    entries = config.load(config_path) if config_path else {}
    cfg = config.resolve(scenario, scenarios.SCHEMAS[scenario], entries)
    if seed is not None:
        cfg = cfg.replace(master_seed=int(seed))
    return cfg


def run_scenario(scenario: str, out_dir, config_path=None, seed=None, threads: int = 1) -> int:
    if scenario not in scenarios.RUNNERS:
        print(f"unknown scenario {scenario!r}; choose from {', '.join(sorted(scenarios.RUNNERS))}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(scenario, config_path, seed)
        result = scenarios.RUNNERS[scenario](cfg, threads)
        summary = emit_summary(scenario, cfg, result, Path(out_dir))
    except Exception as exc:  # reported as an execution error
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(summary.read_text(), end="")
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def _driver(args) -> SamplePath:
    if getattr(args, "input", None):
        return SamplePath.from_csv(Path(args.input))
    return gen_brownian(SeedSpec(args.seed, args.stream), args.horizon, args.n_steps)


def _write(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _range(text: str) -> np.ndarray:
    a, b, n = text.split(":")
    return np.linspace(float(a), float(b), int(n))


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def cmd_walk(args):
    path = _driver(args)
    walk = lattice.embed_walk(path, args.delta, args.origin)
    cutoff = path.t_end + path.dt if args.cutoff is None else args.cutoff
    _write(lattice.visit_counts(walk, cutoff).to_csv(), args.out)
    return EXIT_OK


def cmd_dc_test(args):
    if args.input:
        data = np.loadtxt(args.input, delimiter=",", skiprows=1, ndmin=2)
        xs, vals = data[:, 0], data[:, 1]
        F = dcdiag.SampledFunction(xs[0], (xs[-1] - xs[0]) / (xs.size - 1), vals)
    else:
        seed = SeedSpec(args.seed, args.stream)
        if args.generator in ("ibm", "ifbm"):
            p = gen_brownian(seed, 1.0, args.n_steps) if args.generator == "ibm" else \
                gen_fbm(seed, args.hurst, 1.0, args.n_steps)
            F = dcdiag.integrate_samples(0.0, p.dt, p.values)
        else:
            func = scenarios._TEST_FUNCTIONS[args.generator][0]
            F = dcdiag.SampledFunction.from_callable(func, -1.0, 2.0 / args.n_steps, args.n_steps + 1)
    a, b = _floats(args.interval.replace(":", " "))
    verdict = dcdiag.dc_test(F, (a, b), _floats(args.deltas))
    _write(verdict.to_csv(), args.out)
    return EXIT_OK


def cmd_localtime(args):
    path = _driver(args)
    if args.method == "tanaka":
        value = localtime.tanaka_local_time(path, args.level)
    elif args.method == "occupation":
        value = localtime.occupation_profile(path, None, [args.level], args.bandwidth).values[0]
    else:
        value = localtime.crossing_local_time(path, args.level, args.delta, bridge=args.bridge)
    _write(f"level,value\n{args.level:.17g},{value:.17g}\n", args.out)
    return EXIT_OK


def _sigma(source: str) -> flow.PiecewiseLinearSigma:
    if source == "canonical":
        return flow.PiecewiseLinearSigma.canonical()
    if source == "zero":
        return flow.PiecewiseLinearSigma.zero()
    return flow.PiecewiseLinearSigma.from_text(Path(source).read_text())


def cmd_flow(args):
    sigma = _sigma(args.sigma)
    drv = _driver(args)
    x = _range(args.xgrid)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    fld = flow.simulate_flow(sigma, x, drv, record_every=drv.n_steps, track_alphas=[args.alpha])
    (out / "flow_final.csv").write_text(fld.slice_csv(drv.t_end))
    (out / "quantile.csv").write_text(flow.invert_flow(fld, args.alpha).to_csv())
    if args.split_s is not None:
        rep = flow.compose_flow_check(sigma, x, drv, args.split_s)
        (out / "composition.csv").write_text(
            f"split_s,max_discrepancy,n_points\n{rep.split_time:.17g},{rep.max_discrepancy:.17g},{rep.n_points}\n")
    return EXIT_OK


def cmd_variation(args):
    if args.kind == "space-qv":
        sigma = _sigma(args.sigma)
        drv = _driver(args)
        a, b = _floats(args.interval.replace(":", " "))
        x = np.linspace(a, b, args.nx)
        fld = flow.simulate_flow(sigma, x, drv, record_every=drv.n_steps)
        emp, form = variation.space_qv_Z(fld, a, b)
        _write(f"empirical,formula\n{emp:.17g},{form:.17g}\n", args.out)
        return EXIT_OK
    path = _driver(args)
    if args.kind == "rogers":
        path = variation.rogers_process(path)
    if args.kind == "tv":
        _write(f"resolution,value\n{path.dt:.17g},{variation.total_variation(path):.17g}\n", args.out)
        return EXIT_OK
    levels = [int(v) for v in _floats(args.levels)]
    ladder = variation.PartitionLadder.dyadic(path.t0, path.t_end, levels)
    p = 2.0 if args.kind == "qv" else args.p
    _write(variation.ladder_report(path, p, ladder).to_csv(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario config file (key = value lines)")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--stream", type=int, default=0, help="replicate stream index")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--threads", type=int, default=1)

    path_opts = argparse.ArgumentParser(add_help=False)
    path_opts.add_argument("--input", help="path CSV with header k,t,value")
    path_opts.add_argument("--horizon", type=float, default=1.0)
    path_opts.add_argument("--n-steps", type=int, default=100000)

    parser = argparse.ArgumentParser(prog="semidiag", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", parents=[common, path_opts], help="embedded random walk visit counts")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--origin", type=float, default=0.0)
    p.add_argument("--cutoff", type=float, default=None)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("dc-test", parents=[common], help="difference-of-convex diagnostic")
    p.add_argument("--input", help="CSV of x,F(x) on a uniform grid")
    p.add_argument("--generator", choices=["x2", "abs", "exp", "const", "ibm", "ifbm"], default="x2")
    p.add_argument("--hurst", type=float, default=0.5)
    p.add_argument("--n-steps", type=int, default=8192)
    p.add_argument("--interval", default="0:0.5")
    p.add_argument("--deltas", default="0.03125 0.015625 0.0078125")
    p.set_defaults(func=cmd_dc_test)

    p = sub.add_parser("localtime", parents=[common, path_opts], help="local time at one level")
    p.add_argument("--method", choices=["tanaka", "occupation", "crossing"], default="tanaka")
    p.add_argument("--level", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.02)
    p.add_argument("--bandwidth", type=float, default=0.02)
    p.add_argument("--bridge", action="store_true", help="bridge-corrected crossing counts")
    p.set_defaults(func=cmd_localtime)

    p = sub.add_parser("flow", parents=[common, path_opts], help="simulate the flow and its quantile path")
    p.add_argument("--sigma", default="canonical", help="canonical, zero, or a sigma file")
    p.add_argument("--xgrid", default="0:1:1001", help="a:b:n")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--split-s", type=float, default=None)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("variation", parents=[common, path_opts], help="variation functionals")
    p.add_argument("kind", choices=["qv", "pvar", "tv", "space-qv", "rogers"])
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--levels", default="4 5 6 7 8 9 10", help="dyadic ladder levels")
    p.add_argument("--sigma", default="canonical")
    p.add_argument("--interval", default="0.3:0.7")
    p.add_argument("--nx", type=int, default=4001)
    p.set_defaults(func=cmd_variation)

    p = sub.add_parser("run", parents=[common], help="run a named scenario")
    p.add_argument("scenario")
    p.set_defaults(func=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_scenario(args.scenario, args.out or "results", args.config, args.seed, args.threads)
    if args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (InvalidArgument, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
