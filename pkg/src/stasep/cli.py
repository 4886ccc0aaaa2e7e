"""Command-line front end: configuration, orchestration, and bit-stable CSV
and JSON emission.

Subcommands:
  simulate-lpp    raw passage-time samples at scaled points  -> samples.csv
  simulate-tasep  occupation/height profile of one trajectory -> tasep.csv
  limit-cdf       limit-law table over an s-grid              -> cdf.csv
  compare         Monte Carlo against the limit law           -> report.json
  validate        the full validation battery                 -> report.json

Exit codes: 0 all passed, 1 a validation failed, 2 configuration error,
3 numerical-accuracy failure.  Output files start with '#'-prefixed
provenance lines (config hash, seed, version); identical configs produce
byte-identical bodies.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AccuracyError, InvertibilityError, ParameterError, RefusalError
from .experiments import (
    burke_validate,
    gaussian_offchar_validate,
    limit_cdf_table,
    mc_vs_limit,
    shift_argument_validate,
    shift_coupling_max_error,
    slow_decorrelation_validate,
    ValidationReport,
)
from .limitlaw import (
    MultiPointSpec,
    QuadratureConfig,
    airy_convolution_identity,
    invertibility_guard,
    khat_dual_check,
    limit_cdf,
)
from .lpp import last_passage_batch
from .rng import SeedSpec
from .scaling import ScalingFrame, rescale_sample, scale_dpp
from .tasep import WaitingTimes, evolve, init_stationary, lpp_bridge_check, stationary_window
from .weights import ModelParams

_SCHEMAS = {
    "simulate-lpp": {
        "rho": float, "T": float, "taus": list, "n_samples": int,
        "master_seed": int, "threads": int,
    },
    "simulate-tasep": {
        "rho": float, "t_end": float, "obs_lo": int, "obs_hi": int,
        "master_seed": int,
    },
    "limit-cdf": {
        "taus": list, "s_min": float, "s_max": float, "s_step": float,
        "quad_n": int, "quad_lambda": float, "quad_h_fd": float,
    },
    "compare": {
        "rho": float, "T": float, "taus": list, "n_samples": int,
        "master_seed": int, "threads": int, "threshold": float,
        "s_min": float, "s_max": float, "s_step": float,
    },
    "validate": {
        "rho": float, "master_seed": int, "threads": int, "quick": bool,
    },
}

_DEFAULTS = {
    "simulate-lpp": {
        "rho": 0.5, "T": 500.0, "taus": [0.0], "n_samples": 2000,
        "master_seed": 1, "threads": 1,
    },
    "simulate-tasep": {
        "rho": 0.5, "t_end": 50.0, "obs_lo": -100, "obs_hi": 100,
        "master_seed": 1,
    },
    "limit-cdf": {
        "taus": [0.0], "s_min": -4.0, "s_max": 4.0, "s_step": 0.5,
        "quad_n": 64, "quad_lambda": 12.0, "quad_h_fd": 1e-3,
    },
    "compare": {
        "rho": 0.5, "T": 500.0, "taus": [0.0], "n_samples": 10000,
        "master_seed": 1, "threads": 1, "threshold": 0.05,
        "s_min": -3.0, "s_max": 3.0, "s_step": 0.5,
    },
    "validate": {
        "rho": 0.5, "master_seed": 1, "threads": 1, "quick": True,
    },
}


class ConfigError(ValueError):
    pass


def load_config(subcommand: str, path):
    cfg = dict(_DEFAULTS[subcommand])
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        schema = _SCHEMAS[subcommand]
        for key, value in user.items():
            if key not in schema:
                raise ConfigError(f"unknown config key {key!r} for {subcommand}")
            want = schema[key]
            if want is float and isinstance(value, int):
                value = float(value)
            if not isinstance(value, want):
                raise ConfigError(f"config key {key!r} must be {want.__name__}")
            cfg[key] = value
    threads_env = os.environ.get("THREADS")
    if threads_env and "threads" in cfg:
        cfg["threads"] = int(threads_env)
    return cfg


def config_hash(cfg) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def provenance_lines(subcommand, cfg):
    return [
        f"# stasep {__version__} {subcommand}",
        f"# config-hash: {config_hash(cfg)}",
        f"# config: {json.dumps(cfg, sort_keys=True)}",
    ]


def _fmt(x) -> str:
    return repr(float(x))


def write_csv(path: Path, subcommand, cfg, header, rows):
    lines = provenance_lines(subcommand, cfg)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def cmd_simulate_lpp(cfg, outdir: Path) -> int:
    frame = ScalingFrame(T=cfg["T"], rho=cfg["rho"])
    taus = [float(t) for t in cfg["taus"]]
    pts = [scale_dpp(frame, tau, 0.0)[:2] for tau in taus]
    g = last_passage_batch(
        ModelParams.two_sided(cfg["rho"]), cfg["master_seed"],
        range(cfg["n_samples"]), pts,
    )
    rows = []
    for idx in range(cfg["n_samples"]):
        for k, tau in enumerate(taus):
            rows.append(
                (idx, float(tau), float(g[idx, k]), float(rescale_sample(frame, tau, g[idx, k])))
            )
    write_csv(outdir / "samples.csv", "simulate-lpp", cfg,
              ["sample_index", "tau", "raw_G", "s_rescaled"], rows)
    return 0


def cmd_simulate_tasep(cfg, outdir: Path) -> int:
    seed = SeedSpec(cfg["master_seed"], 0)
    win = stationary_window(cfg["obs_lo"], cfg["obs_hi"], cfg["t_end"])
    state = init_stationary(cfg["rho"], win, seed)
    state, _ = evolve(state, WaitingTimes(seed), cfg["t_end"])
    occ = state.occupation(cfg["obs_lo"], cfg["obs_hi"])
    h = state.height(cfg["obs_lo"], cfg["obs_hi"])
    rows = [
        (j, int(occ[j - cfg["obs_lo"]]), int(h[j - cfg["obs_lo"]]))
        for j in range(cfg["obs_lo"], cfg["obs_hi"] + 1)
    ]
    cfg_out = dict(cfg)
    cfg_out["n_current"] = state.n_current
    write_csv(outdir / "tasep.csv", "simulate-tasep", cfg_out, ["site", "eta", "height"], rows)
    return 0


def cmd_limit_cdf(cfg, outdir: Path) -> int:
    quad = QuadratureConfig(n=cfg["quad_n"], big_lambda=cfg["quad_lambda"], h_fd=cfg["quad_h_fd"])
    taus = tuple(float(t) for t in cfg["taus"])
    m = len(taus)
    grid = np.arange(cfg["s_min"], cfg["s_max"] + 0.5 * cfg["s_step"], cfg["s_step"])
    rows = []
    for s in grid:
        res = limit_cdf(MultiPointSpec(taus, (float(s),) * m), quad)
        rows.append(
            tuple(float(s) for _ in range(m))
            + (res.f_value, res.det_value, res.g_value, res.diagnostics["fd_spread_max"])
        )
    header = [f"s_{k+1}" for k in range(m)] + ["F", "det", "g", "fd_spread"]
    write_csv(outdir / "cdf.csv", "limit-cdf", cfg, header, rows)
    return 0


def cmd_compare(cfg, outdir: Path) -> int:
    frame = ScalingFrame(T=cfg["T"], rho=cfg["rho"])
    taus = [float(t) for t in cfg["taus"]]
    grid1 = np.arange(cfg["s_min"], cfg["s_max"] + 0.5 * cfg["s_step"], cfg["s_step"])
    svecs = [[float(s)] * len(taus) for s in grid1]
    rep = mc_vs_limit(
        frame, taus, cfg["n_samples"], cfg["master_seed"], svecs,
        threshold=cfg["threshold"], threads=cfg["threads"],
    )
    _write_report(outdir, "compare", cfg, [rep])
    return 0 if rep.passed else 1


def _write_report(outdir: Path, subcommand, cfg, reports):
    payload = {
        "tool": f"stasep {__version__}",
        "subcommand": subcommand,
        "config_hash": config_hash(cfg),
        "config": cfg,
        "reports": [r.to_dict() for r in reports],
        "all_passed": all(r.passed for r in reports),
    }
    (outdir / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _validate_battery(cfg):
    rho = cfg["rho"]
    seed = cfg["master_seed"]
    quick = cfg["quick"]
    reports = []

    # pathwise bridge
    t0 = time.time()
    n_bridge = 300 if quick else 10000
    rng = np.random.default_rng(seed)
    fails = 0
    for k in range(n_bridge):
        x, y = int(rng.integers(1, 21)), int(rng.integers(1, 21))
        e_g = x / (1 - rho) + y / rho
        sd = 2.2 * (x + y) ** (1.0 / 3.0)
        rep = lpp_bridge_check(seed, k, x, y, np.linspace(0.0, e_g + 6 * sd, 50), rho=rho)
        fails += 0 if rep.ok else 1
    reports.append(ValidationReport(
        name="pathwise-bridge", statistic=float(fails), threshold=0.0,
        passed=fails == 0, runtime_s=time.time() - t0, master_seed=seed,
        config={"instances": n_bridge},
    ))

    # kernel dual representation + convolution identity
    t0 = time.time()
    worst = 0.0
    for ti, tj in ((1.0, 0.0), (2.0, -1.0), (0.5, -0.5)):
        spec = MultiPointSpec((tj, ti), (0.0, 0.0))
        for xx in (-1.0, 0.0, 1.0):
            for yy in (-1.0, 0.0, 1.0):
                worst = max(worst, khat_dual_check(spec, 2, 1, xx, yy)[2])
    worst_f = max(
        airy_convolution_identity(1.0, 0.0, 0.0, 0.0)[2],
        airy_convolution_identity(1.5, -0.5, 1.0, -1.0)[2],
    )
    reports.append(ValidationReport(
        name="kernel-dual", statistic=max(worst, worst_f), threshold=1e-8,
        passed=max(worst, worst_f) <= 1e-8, runtime_s=time.time() - t0,
        master_seed=seed, config={},
    ))

    # invertibility guard
    t0 = time.time()
    ok1, d1 = invertibility_guard(MultiPointSpec((-1.0, 1.0), (-3.0, -3.0)))
    ok2, d2 = invertibility_guard(MultiPointSpec((0.0,), (5.0,)))
    reports.append(ValidationReport(
        name="invertibility-guard", statistic=float(min(d1["det"], d2["det"])),
        threshold=0.0, passed=bool(ok1 and ok2), runtime_s=time.time() - t0,
        master_seed=seed, config={}, extras={"dets": [d1["det"], d2["det"]]},
    ))

    reports.append(burke_validate(rho, 3000 if quick else 10000, seed))

    n_shift = 10**5 if quick else 10**6
    reports.append(shift_argument_validate(
        0.25, 0.25, [(2, 2)], np.arange(2.0, 11.0, 1.0), n_shift, seed,
        threshold=0.02,
    ))

    frame = ScalingFrame(T=2000.0, rho=rho, nu=0.5)
    n_sd = 500 if quick else 2000
    reports.append(slow_decorrelation_validate(frame, 0.25, 0.25, 0.1, 0.25, n_sd, seed))
    neg = slow_decorrelation_validate(
        frame, 0.25, 0.25, 0.1, 0.10, n_sd, seed, threshold=0.9
    )
    # negative control passes when the fraction DROPS below threshold
    neg.name = "slow-decorrelation-negative-control"
    neg.passed = neg.statistic < neg.threshold
    reports.append(neg)

    threads = cfg["threads"]
    n_gauss = 1500 if quick else 5000
    reports.append(gaussian_offchar_validate(rho, 4.0, 2000, n_gauss, seed, threads=threads))
    reports.append(gaussian_offchar_validate(rho, 0.25, 2000, n_gauss, seed, threads=threads))
    ctrl = gaussian_offchar_validate(rho, 1.0 + 1e-9, 2000, n_gauss, seed, threads=threads)
    ctrl.name = "gaussian-critical-control"
    ctrl.passed = ctrl.statistic > ctrl.threshold  # must FAIL normality
    reports.append(ctrl)

    # coupling exactness (real-arithmetic identity, float-reassociation bound)
    t0 = time.time()
    err = shift_coupling_max_error(0.25, 0.25, (3, 3), 200, seed)
    reports.append(ValidationReport(
        name="shift-coupling", statistic=err, threshold=1e-12,
        passed=err <= 1e-12, runtime_s=time.time() - t0, master_seed=seed,
        config={},
    ))
    return reports


def cmd_validate(cfg, outdir: Path) -> int:
    reports = _validate_battery(cfg)
    _write_report(outdir, "validate", cfg, reports)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {rep.name}: statistic={rep.statistic:.6g} "
              f"threshold={rep.threshold:g} ({rep.runtime_s:.1f}s)")
    return 0 if all(r.passed for r in reports) else 1


_COMMANDS = {
    "simulate-lpp": cmd_simulate_lpp,
    "simulate-tasep": cmd_simulate_tasep,
    "limit-cdf": cmd_limit_cdf,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stasep",
        description="stationary TASEP / bordered LPP workbench",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON configuration file")
        p.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.subcommand, args.config)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.subcommand](cfg, outdir)
    except (AccuracyError, InvertibilityError) as exc:
        print(f"numerical-accuracy failure: {exc}", file=sys.stderr)
        return 3
    except (ParameterError, RefusalError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
