"""Command line entry point: ``channelwave simulate|channels|resolve|verify|sweep``.

Exit codes: 0 ok, 1 usage or config error, 2 detected regime (blow-up, failed
sweep cells), 3 numerical instability.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .channel_analysis import channel_scan
from .config import ExperimentConfig, load_config, load_sweep, parse_config
from .dalembert import from_characteristic
from .energetics import norms
from .errors import ChannelWaveError, InvalidArgument
from .io import (config_hash, read_profile_csv, read_trajectory, to_jsonable, write_ndjson,
                 write_trajectory)
from .nlw import EvolveConfig, evolve
from .radial_state import BLOWUP, COMPLETED, INSTABILITY, make_grid, sample_preset
from .resolution import classify, extract_radiation, fit_decomposition
from .verify import SUITES, format_checks, run_suite

EXIT_OK, EXIT_USAGE, EXIT_REGIME, EXIT_UNSTABLE = 0, 1, 2, 3
DEFAULT_ROOT = "channelwave-out"
RADIATION_FILE = "radiation.csv"


def _out_dir(args, cfg: ExperimentConfig | None, chash: str) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output.directory:
        return Path(cfg.output.directory)
    return Path(os.environ.get("CHANNELWAVE_OUT", DEFAULT_ROOT)) / chash


def _cfg_dict(cfg: ExperimentConfig) -> dict:
    return cfg.model_dump(mode="json")


def _evolve_config(cfg: ExperimentConfig) -> EvolveConfig:
    return EvolveConfig(cfg.time.t_end, cfg.time.cfl, cfg.time.mode,
                        blowup_amp_threshold=cfg.analysis.blowup_amp_threshold,
                        blowup_norm_threshold=cfg.analysis.blowup_norm_threshold,
                        snapshot_stride=cfg.time.snapshot_stride,
                        exterior_radii=tuple(cfg.analysis.exterior_radii),
                        check_support=cfg.time.check_support)


def simulate(cfg: ExperimentConfig, out: Path) -> tuple[int, dict]:
    """Run one experiment and write its artifacts; returns (exit code, summary record)."""
    chash = config_hash(_cfg_dict(cfg))
    grid = make_grid(cfg.grid.r_max, cfg.grid.n)
    s0 = sample_preset(cfg.preset, grid)
    traj = evolve(s0, _evolve_config(cfg))
    write_trajectory(out, traj, chash, {"config": _cfg_dict(cfg)})
    E = traj.series("energy")
    drift = float(abs(E[-1] - E[0]) / max(abs(E[0]), 1e-300)) if E[0] != 0 else float(abs(E[-1]))
    summary = {"config_hash": chash, "record": "summary", "termination": traj.termination,
               "t_final": traj.final.t, "steps": int(traj.meta["n_steps"]), "dt": traj.dt,
               "energy_initial": float(E[0]), "energy_final": float(E[-1]),
               "energy_drift": drift, "norm_sq_final": norms(traj.final).norm_sq,
               "blowup_time": traj.blowup_time}
    code = EXIT_OK
    if traj.termination == BLOWUP:
        summary["classification"] = classify(traj).to_dict()
        code = EXIT_REGIME
    elif traj.termination == INSTABILITY:
        code = EXIT_UNSTABLE
    write_ndjson(out / "summary.ndjson", [summary])
    return code, summary


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg, config_hash(_cfg_dict(cfg)))
    code, summary = simulate(cfg, out)
    print(f"{summary['termination']}: t = {summary['t_final']:.6g}, "
          f"energy drift {summary['energy_drift']:.3e}, output in {out}")
    return code


def cmd_channels(args) -> int:
    cfg = load_config(args.config)
    chash = config_hash(_cfg_dict(cfg))
    out = _out_dir(args, cfg, chash)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_grid(cfg.grid.r_max, cfg.grid.n)
    s0 = sample_preset(cfg.preset, grid)
    radii = cfg.analysis.channel_radii
    if not radii:
        raise InvalidArgument("analysis.channel_radii is empty")
    recs = []
    for R in radii:
        horizon = cfg.analysis.channel_horizon
        if horizon is None:
            horizon = max(grid.r_max - R - 2 * grid.dr, 0.0)
        rep = channel_scan(s0, R, horizon, cfg.time.cfl)
        recs.append({"config_hash": chash, "record": "channel", **rep.to_dict()})
        print(f"R = {R:g}: forward {rep.forward_min:.4e}, backward {rep.backward_min:.4e}"
              f" -> {rep.verdict}")
    write_ndjson(out / "channels.ndjson", recs)
    return EXIT_OK


def resolve_trajectory(path: Path, A: float | None = None,
                       residual_threshold: float = 1e-2) -> list[dict]:
    """Decomposition of the final state (global runs) and the classification.

    A ``radiation.csv`` profile next to the trajectory overrides extraction.
    """
    traj = read_trajectory(path)
    chash = _meta_hash(path)
    rad_file = path / RADIATION_FILE
    rad = read_profile_csv(rad_file) if rad_file.exists() else None
    recs = []
    if traj.termination == COMPLETED:
        if rad is None:
            rad = extract_radiation(traj, 0.5 * traj.final.t if A is None else A)
        final = traj.final
        rep = fit_decomposition(final, from_characteristic(rad, final.t, final.grid), rad)
        recs.append({"config_hash": chash, "record": "decomposition", "t": final.t,
                     **rep.to_dict()})
    cls = classify(traj, residual_threshold=residual_threshold, A=A, radiation=rad)
    recs.append({"config_hash": chash, "record": "classification", **cls.to_dict()})
    return recs


def _meta_hash(path: Path) -> str:
    try:
        with open(path / "meta.json", encoding="utf-8") as fh:
            return str(json.load(fh).get("config_hash", ""))
    except (OSError, ValueError):
        return ""


def cmd_resolve(args) -> int:
    if not args.trajectory:
        raise InvalidArgument("resolve needs --trajectory <dir>")
    A = None
    thr = 1e-2
    if args.config:
        cfg = load_config(args.config)
        A = cfg.analysis.radiation_A
        thr = cfg.analysis.residual_threshold
    path = Path(args.trajectory)
    if not (path / "meta.json").exists():
        raise InvalidArgument(f"no trajectory artifacts in {path}")
    recs = resolve_trajectory(path, A, thr)
    out = Path(args.out) if args.out else path
    out.mkdir(parents=True, exist_ok=True)
    write_ndjson(out / "resolution.ndjson", recs)
    for r in recs:
        if r["record"] == "decomposition":
            signs = "".join("+" if b["iota"] > 0 else "-" for b in r["bubbles"])
            print(f"J = {r['J']} signs {signs or '-'} residual {r['relative_residual']:.3e}")
        else:
            print(f"classification: {r['kind']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for n in names:
        if n not in SUITES:
            print(f"unknown suite {n!r}; known: {', '.join(SUITES)}, all", file=sys.stderr)
            return EXIT_USAGE
    ok = True
    for n in names:
        checks, secs = run_suite(n)
        print(f"[{n}] {secs:.2f} s")
        print(format_checks(checks))
        ok &= all(c.passed for c in checks)
    return EXIT_OK if ok else EXIT_REGIME


SUMMARY_FIELDS = ("cell", "status", "config_hash", "termination", "t_final", "energy_drift",
                  "drift_ratio", "norm_sq_final", "error")


def _run_cell(item):
    idx, params, raw, root = item
    out = Path(root) / f"cell_{idx:04d}"
    row = {"cell": idx, **{f"param:{k}": v for k, v in params.items()}}
    try:
        cfg = parse_config(raw)
        code, summary = simulate(cfg, out)
        row.update(status="ok" if code in (EXIT_OK, EXIT_REGIME) else "unstable",
                   config_hash=summary["config_hash"], termination=summary["termination"],
                   t_final=summary["t_final"], energy_drift=summary["energy_drift"],
                   norm_sq_final=summary["norm_sq_final"], error="")
    except (ChannelWaveError, ValueError) as exc:
        row.update(status="failed", error=str(exc).splitlines()[0])
    return row


def cmd_sweep(args) -> int:
    sweep = load_sweep(args.config)
    root = Path(args.out) if args.out else Path(os.environ.get("CHANNELWAVE_OUT", DEFAULT_ROOT)) \
        / ("sweep-" + config_hash(sweep.model_dump(mode="json")))
    root.mkdir(parents=True, exist_ok=True)
    items = [(i, p, raw, str(root)) for i, (p, raw) in enumerate(sweep.cells())]
    jobs = max(1, int(args.jobs or 1))
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_run_cell, items))
    else:
        rows = [_run_cell(it) for it in items]
    prev = None
    for row in rows:
        d = row.get("energy_drift")
        row["drift_ratio"] = (prev / d) if (prev is not None and d) else ""
        prev = d if row.get("status") == "ok" else None
    pcols = sorted({k for r in rows for k in r if k.startswith("param:")})
    fields = ["cell"] + pcols + list(SUMMARY_FIELDS[1:])
    with open(root / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in fields})
    failed = sum(r["status"] == "failed" for r in rows)
    print(f"{len(rows)} cells, {failed} failed; summary in {root / 'summary.csv'}")
    return EXIT_REGIME if failed else EXIT_OK


def _fmt(v):
    if isinstance(v, float):
        return "%.17g" % v if math.isfinite(v) else str(to_jsonable(v))
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="channelwave",
                                description="Radial focusing quintic wave laboratory.")
    p.add_argument("command", choices=["simulate", "channels", "resolve", "verify", "sweep"])
    p.add_argument("--config", help="experiment (or sweep) JSON config")
    p.add_argument("--out", help="output directory (default: $CHANNELWAVE_OUT/<config hash>)")
    p.add_argument("--suite", help="verification suite name, or 'all'")
    p.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")
    p.add_argument("--trajectory", help="trajectory directory for resolve")
    return p


COMMANDS = {"simulate": cmd_simulate, "channels": cmd_channels, "resolve": cmd_resolve,
            "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "verify" and not args.suite:
        print("verify needs --suite", file=sys.stderr)
        return EXIT_USAGE
    if args.command in ("simulate", "channels", "sweep") and not args.config:
        print(f"{args.command} needs --config", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except ChannelWaveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
