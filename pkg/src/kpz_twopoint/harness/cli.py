"""Command line interface.

    kpz-twopoint <command> --config <file> [--seed N] [--out DIR] [--workers N]

Commands: simulate, limit-dist, finite-dist, verify, scaling.  All outputs are
CSV (UTF-8, header row, 15 significant digits) except the verify report, which
is JSON; every file embeds the run manifest.  Re-running a manifest reproduces
every output byte for byte, whatever the worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from .. import airy_limit as al
from .. import finite_time as ft
from ..tasep import (
    SimConfig,
    empirical_Fw,
    estimate_S,
    run_ensemble,
    second_class_displacements,
    sum_rule_report,
    weak_pairing,
    write_run_records,
)
from .config import load_config, manifest_for
from .outputs import write_csv, write_json_report, write_manifest
from .verify import run_verify

__all__ = ["main"]


def _as_list(value, default):
    if value is None:
        return list(default)
    if isinstance(value, (int, float)):
        return [value]
    return list(value)


def _grid(params, default_lo, default_hi, default_step, prefix="s"):
    if f"{prefix}_grid" in params:
        return np.asarray(_as_list(params[f"{prefix}_grid"], ()), dtype=float)
    lo = float(params.get(f"{prefix}_min", default_lo))
    hi = float(params.get(f"{prefix}_max", default_hi))
    step = float(params.get(f"{prefix}_step", default_step))
    return np.round(np.arange(lo, hi + 1e-12, step), 12)


def _cmd_simulate(params, manifest, out_dir, workers):
    cfg = SimConfig(
        rho=float(params.get("rho", 0.5)),
        t_max=float(params.get("t_max", 50.0)),
        n_runs=int(params.get("n_runs", 1000)),
        seed=manifest.seed,
        ring_size=int(params.get("ring_size", 0)),
        w_list=tuple(_as_list(params.get("w_list"), (0.3,))),
        s_grid=tuple(_grid(params, -8.0, 8.0, 0.25)),
    )
    ens = run_ensemble(cfg, store_counts=bool(params.get("store_counts", True)),
                       workers=workers, initial=str(params.get("initial", "stationary")))
    write_run_records(out_dir / "runs.bin", ens, cfg)
    rows = []
    if ens.initial == "stationary":
        est = estimate_S(ens)
        rows = [(int(j), s, e, cfg.t_max, cfg.rho)
                for j, s, e in zip(est.j_offsets, est.S_hat, est.stderr)]
    write_csv(out_dir / "two_point.csv",
              ["j_offset", "S_hat", "stderr", "t", "rho"], rows, manifest)
    dist_rows = []
    if ens.initial == "stationary":
        for w in cfg.w_list:
            curve, _ = empirical_Fw(ens, float(w), np.asarray(cfg.s_grid)) \
                if cfg.n_runs >= 1000 else (None, None)
            if curve is None:
                break
            for s, c, q in zip(curve.s, curve.cdf, curve.pdf):
                dist_rows.append((float(w), float(s), float(c), float(q)))
    write_csv(out_dir / "distribution.csv", ["w", "s", "cdf", "pdf"],
              dist_rows, manifest)
    if ens.initial == "stationary":
        (tot, etot), (fst, efst) = sum_rule_report(ens)
        write_csv(out_dir / "sum_rules.csv",
                  ["check", "value", "stderr", "target"],
                  [("total_mass", tot, etot, cfg.chi),
                   ("first_moment", fst, efst, (1 - 2 * cfg.rho) * cfg.t_max)],
                  manifest)
    return 0


def _cmd_limit_dist(params, manifest, out_dir, workers):
    del workers
    w_list = _as_list(params.get("w_list"), (0.3,))
    n_quad = int(params.get("n_quad", 64))
    grid = _grid(params, -12.0, 9.0, 0.125)
    cdf_rows = []
    mom_rows = []
    for w in w_list:
        curve = al.limit_cdf(al.LimitLawRequest(w=float(w), s_grid=grid, n_quad=n_quad))
        for s, c, q in zip(curve.s, curve.cdf, curve.pdf):
            cdf_rows.append((float(w), float(s), float(c), float(q)))
        for order in range(5):
            mom_rows.append((float(w), order, curve.moment(order), curve.quad_error))
    write_csv(out_dir / "limit_cdf.csv", ["w", "s", "cdf", "pdf"], cdf_rows, manifest)
    write_csv(out_dir / "limit_moments.csv",
              ["w", "moment_order", "value", "est_error"], mom_rows, manifest)
    return 0


def _cmd_finite_dist(params, manifest, out_dir, workers):
    del workers
    rho = float(params.get("rho", 0.5))
    t = float(params.get("t", 100.0))
    w = float(params.get("w", 0.3))
    grid = _grid(params, -8.0, 6.0, 0.25)
    curve = ft.finite_cdf(rho, t, w, grid)
    sweep = ft._get_sweep(rho, t, w, float(grid[0]) - 0.1)
    rows = []
    for s, cdf_val in zip(curve.s, curve.cdf):
        frame = ft.make_frame(rho, t, w, float(s))
        g1v = ft.g1(frame)
        g2v = ft.g2(frame, sweep=sweep)
        g3v = ft.g3(frame, sweep=sweep)
        fv = ft.finite_F(frame, sweep=sweep)
        trv = ft.trace_diagonal(frame, sweep=sweep)
        rows.append((rho, t, w, float(s), fv, g1v, g2v, g3v,
                     g1v + g2v + g3v, float(cdf_val), trv))
    write_csv(out_dir / "finite_time.csv",
              ["rho", "t", "w", "s", "F", "g1", "g2", "g3", "G0", "Fw_cdf", "trace"],
              rows, manifest)
    return 0


def _cmd_verify(params, manifest, out_dir, workers):
    suite = params.get("suite", "")
    if not suite:
        raise SystemExit("verify needs a suite name: identities, tails, moments or crossval")
    vp = dict(params)
    vp["workers"] = workers
    vp.setdefault("seed", manifest.seed)
    report = run_verify(str(suite), vp)
    write_json_report(out_dir / f"verify_{suite}.json", report, manifest)
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{status}] {c['name']}: measured={c['measured']:.6g} "
              f"tolerance={c['tolerance']:.6g}")
    if not report["passed"]:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        print("FAILED checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def _cmd_scaling(params, manifest, out_dir, workers):
    rho = float(params.get("rho", 0.5))
    t_list = [float(v) for v in _as_list(params.get("t_list"), (100.0,))]
    n_runs = int(params.get("n_runs", 2000))
    w_grid = np.asarray(_as_list(params.get("w_grid"),
                                 np.round(np.arange(-1.5, 1.5 + 1e-9, 0.25), 6)),
                        dtype=float)
    h_step = float(params.get("gsc_h", 0.25))
    n_quad = int(params.get("n_quad", 64))

    gsc_cache: dict[float, float] = {}

    def gsc(w):
        key = round(abs(float(w)), 12)
        if key not in gsc_cache:
            gsc_cache[key] = al.g_sc(key, n_quad=n_quad)
        return gsc_cache[key]

    def gsc_dd(w):
        return al.g_sc_second_derivative(float(abs(w)) if w != 0 else 0.0,
                                         h=h_step, g_sc_fn=gsc)

    rows = []
    for t in t_list:
        cfg = SimConfig(rho=rho, t_max=t, n_runs=n_runs, seed=manifest.seed)
        ens = run_ensemble(cfg, workers=workers)
        scale = 2.0 * cfg.chi ** (1.0 / 3.0) * t ** (2.0 / 3.0)
        center = (1.0 - 2.0 * rho) * t
        j_vals = np.array([int(np.floor(center + w * scale + 0.5)) for w in w_grid])
        est = estimate_S(ens, j_vals)
        pair = weak_pairing(ens)
        for w, s_hat, s_err in zip(w_grid, est.S_hat, est.stderr):
            rows.append((rho, t, float(w), scale * s_hat, scale * s_err,
                         0.25 * cfg.chi * gsc_dd(w), pair.lhs, pair.lhs_stderr,
                         pair.rhs, pair.rhs_stderr))
    write_csv(out_dir / "scaling.csv",
              ["rho", "t", "w", "rescaled_S_empirical", "rescaled_S_stderr",
               "exact_quarter_chi_gsc_dd", "pairing_lhs", "pairing_lhs_stderr",
               "pairing_rhs", "pairing_rhs_stderr"],
              rows, manifest)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "limit-dist": _cmd_limit_dist,
    "finite-dist": _cmd_finite_dist,
    "verify": _cmd_verify,
    "scaling": _cmd_scaling,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kpz-twopoint",
        description="Stationary-interface two-point function: exact numerics and simulation")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("extra", nargs="?", default=None,
                        help="suite name shorthand for the verify command")
    parser.add_argument("--config", default=None, help="flat key=value config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    params = load_config(args.config) if args.config else {}
    if args.command == "verify" and args.extra:
        params["suite"] = args.extra
    elif args.extra:
        parser.error(f"unexpected positional argument {args.extra!r}")
    seed = args.seed if args.seed is not None else int(params.get("seed", 1))
    params["seed"] = seed
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = manifest_for(args.command, args.config, params, out_dir, seed,
                            __version__)
    write_manifest(out_dir, manifest)
    return _COMMANDS[args.command](params, manifest, out_dir, args.workers)


if __name__ == "__main__":
    sys.exit(main())
