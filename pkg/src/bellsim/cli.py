"""Command-line driver: run, tomo, sweep, calibrate.

Exit codes: 0 success, 1 invalid configuration, 2 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import coincidence, tomography, weak
from .config import ExperimentConfig, config_hash, load_config
from .errors import ConfigError, NumericError
from .polarization import chsh_s, rho_to_json


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_events_csv(path, events, s_values):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seq", "XA", "YA", "XB", "YB", "S_hat"])
        for i, (ev, s) in enumerate(zip(events, s_values)):
            writer.writerow([i, ev[0], ev[1], ev[2], ev[3], repr(float(s))])


def _write_histogram_csv(path, summary):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo", "bin_hi", "count"])
        edges = summary.hist_edges
        for lo, hi, c in zip(edges[:-1], edges[1:], summary.hist_counts):
            writer.writerow([repr(float(lo)), repr(float(hi)), int(c)])


def _write_pmf_csv(path, pmf):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["XA", "YA", "XB", "YB", "p"])
        n = pmf.shape[0]
        idx = np.arange(pmf.size)
        xa, ya, xb, yb = np.unravel_index(idx, pmf.shape)
        flat = pmf.ravel()
        for i in range(pmf.size):
            writer.writerow([xa[i], ya[i], xb[i], yb[i], repr(float(flat[i]))])


def _build_pmf(cfg, settings):
    rho_in = cfg.input_state()
    pmf = weak.joint_pixel_pmf(rho_in, settings, cfg.grid, cfg.clip_edges)
    if cfg.accidental_rate > 0:
        pmf = coincidence.inject_accidentals(pmf, cfg.accidental_rate)
    return rho_in, pmf


def cmd_run(cfg, out_dir, emit_pmf=False, threads=1):
    settings = cfg.settings()
    rho_in, pmf = _build_pmf(cfg, settings)
    events = coincidence.sample_events(pmf, cfg.n_events, cfg.seed, threads=threads)
    s_values = coincidence.pair_s_values(events, settings, cfg.grid)
    summary = coincidence.aggregate(s_values, cfg.hist_bin_width, cfg.hist_range)
    expected_s, _ = coincidence.expected_pair_s(pmf, settings, cfg.grid)

    os.makedirs(out_dir, exist_ok=True)
    chash = config_hash(cfg)
    doc = {"config_hash": chash, "expected_S": expected_s}
    doc.update(coincidence.summary_to_json(summary))
    _write_json(os.path.join(out_dir, "summary.json"), doc)
    _write_events_csv(os.path.join(out_dir, "events.csv"), events, s_values)
    _write_histogram_csv(os.path.join(out_dir, "histogram.csv"), summary)
    rho_out = weak.output_polarization_state(rho_in, settings)
    _write_json(os.path.join(out_dir, "rho_in.json"),
                {"config_hash": chash, "rho": rho_to_json(rho_in)})
    _write_json(os.path.join(out_dir, "rho_out.json"),
                {"config_hash": chash, "rho": rho_to_json(rho_out)})
    if emit_pmf:
        _write_pmf_csv(os.path.join(out_dir, "pmf.csv"), pmf)

    print("S_ave = %.6f +- %.6f  (n = %d)" % (summary.s_ave, summary.stderr, summary.n_events))
    print("deterministic E[S_hat] = %.6f" % expected_s)
    return 0


def cmd_tomo(cfg, which, out_dir):
    settings = cfg.settings()
    rho_in = cfg.input_state()
    rho_true = rho_in if which == "in" else weak.output_polarization_state(rho_in, settings)
    proj = tomography.tomography_settings()
    record = tomography.simulate_counts(rho_true, proj, cfg.tomo_shots, cfg.tomo_seed)
    result = tomography.reconstruct_mle(record, proj)
    if not result.converged:
        print("warning: MLE stopped at iteration cap without meeting the "
              "gradient tolerance", file=sys.stderr)
    report = tomography.metric_report(result.rho)

    os.makedirs(out_dir, exist_ok=True)
    chash = config_hash(cfg)
    with open(os.path.join(out_dir, "counts_%s.csv" % which), "w",
              newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setting_a", "setting_b", "counts", "shots"])
        for s, c in zip(proj, record.counts):
            writer.writerow([s.label_a, s.label_b, int(c), record.shots])
    _write_json(os.path.join(out_dir, "rho_rec_%s.json" % which), {
        "config_hash": chash,
        "which": which,
        "rho": rho_to_json(result.rho),
        "log_likelihood": result.log_likelihood,
        "iterations": result.iterations,
        "converged": result.converged,
        "metrics": report,
    })
    for key, val in sorted(report.items()):
        print("%s = %.6f" % (key, val))
    return 0


def cmd_sweep(cfg, values, out_dir):
    rho_in = cfg.input_state()
    s_strong = chsh_s(rho_in, cfg.angles)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    from .polarization import concurrence, fidelity

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["g_over_sigma", "expected_S", "bias", "pair_stddev",
                         "V_out", "F_out", "C_out"])
        for r in values:
            settings = cfg.settings(g_over_sigma=r)
            pmf = weak.joint_pixel_pmf(rho_in, settings, cfg.grid, cfg.clip_edges)
            e_s, stddev = coincidence.expected_pair_s(pmf, settings, cfg.grid)
            rho_out = weak.output_polarization_state(rho_in, settings)
            v_out = weak.visibility(rho_out)
            f_out = fidelity(rho_out, rho_in)
            c_out = concurrence(rho_out)
            writer.writerow([repr(float(r)), repr(e_s), repr(e_s - s_strong),
                             repr(stddev), repr(v_out), repr(f_out), repr(c_out)])
            print("g/sigma=%.4f  E[S]=%.4f  stddev=%.2f  V_out=%.4f  "
                  "F_out=%.4f  C_out=%.4f" % (r, e_s, stddev, v_out, f_out, c_out))
    return 0


def calibrate_g_over_sigma(cfg, target_v_out, tol=1e-4, max_iter=200):
    """Bisect g/sigma until the output visibility matches the target."""
    rho_in = cfg.input_state()
    v_in = weak.visibility(rho_in)
    if not (0.0 < target_v_out < v_in):
        raise NumericError(
            "target visibility %r not bracketable below V_in = %r" % (target_v_out, v_in)
        )

    def v_out(r):
        return weak.visibility(
            weak.output_polarization_state(rho_in, cfg.settings(g_over_sigma=r))
        )

    lo, hi = 0.0, 1.0
    while v_out(hi) > target_v_out:
        hi *= 2.0
        if hi > 64.0:
            raise NumericError("could not bracket target visibility %r" % target_v_out)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        v = v_out(mid)
        if abs(v - target_v_out) < tol:
            return mid
        if v > target_v_out:
            lo = mid
        else:
            hi = mid
    raise NumericError("calibration bisection did not converge")


def cmd_calibrate(cfg, target, out_dir):
    r = calibrate_g_over_sigma(cfg, target)
    settings = cfg.settings(g_over_sigma=r)
    rho_in = cfg.input_state()
    v = weak.visibility(weak.output_polarization_state(rho_in, settings))
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "calibration.json"), {
        "config_hash": config_hash(cfg),
        "target_V_out": target,
        "g_over_sigma": r,
        "V_out": v,
    })
    print("g_over_sigma = %.6f  (V_out = %.6f)" % (r, v))
    return 0


def _parser():
    parser = argparse.ArgumentParser(
        prog="bellsim",
        description="Single-pair CHSH weak-measurement simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config JSON (defaults used if omitted)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--threads", type=int, default=1)

    p_run = sub.add_parser("run", help="sample pairs and estimate S per pair")
    common(p_run)
    p_run.add_argument("--emit-pmf", action="store_true", help="also write the pmf CSV")

    p_tomo = sub.add_parser("tomo", help="simulate tomography and reconstruct")
    common(p_tomo)
    p_tomo.add_argument("--which", choices=("in", "out"), default="in")

    p_sweep = sub.add_parser("sweep", help="sweep g/sigma and report trade-offs")
    common(p_sweep)
    p_sweep.add_argument("--values", default="0.02,0.05,0.1,0.2,0.4",
                         help="comma-separated g/sigma values")

    p_cal = sub.add_parser("calibrate", help="pin g/sigma from a target V_out")
    common(p_cal)
    p_cal.add_argument("--target", type=float, default=0.941)
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        if args.command == "run":
            return cmd_run(cfg, args.out, emit_pmf=args.emit_pmf, threads=args.threads)
        if args.command == "tomo":
            return cmd_tomo(cfg, args.which, args.out)
        if args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
            return cmd_sweep(cfg, values, args.out)
        if args.command == "calibrate":
            return cmd_calibrate(cfg, args.target, args.out)
        raise ConfigError("unknown command %r" % args.command)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except NumericError as exc:
        print("numeric error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
