"""On-disk formats: profile and snapshot CSV, NDJSON records, trajectory directories.

Floats are written with 17 significant digits so that files round-trip
bit-exactly.  Line endings are LF and encoding UTF-8.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .dalembert import CharacteristicProfile
from .errors import InvalidArgument
from .radial_state import RadialGrid, State, Trajectory, make_grid

FLOAT_FMT = "%.17g"
TRAJECTORY_FORMAT = 1


def _num(x: float) -> str:
    return FLOAT_FMT % x


def to_jsonable(obj):
    """Plain-JSON view of numpy scalars, arrays, nested containers and non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def config_hash(cfg: dict) -> str:
    """sha256 of the canonical JSON form, first 16 hex digits."""
    blob = json.dumps(to_jsonable(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def dumps_record(rec: dict) -> str:
    return json.dumps(to_jsonable(rec), sort_keys=False, separators=(",", ":"))


def write_ndjson(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_record(rec) + "\n")


def read_ndjson(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise InvalidArgument(f"{path}:{lineno}: bad NDJSON record ({exc.msg})") from exc
    return out


# ---------------------------------------------------------------------------
# CSV tables

def _write_table(path, header: dict, names, columns) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for k, v in header.items():
            fh.write(f"# {k}={_num(v) if isinstance(v, float) else v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*columns):
            w.writerow([_num(x) for x in row])


def _read_table(path, names) -> tuple[dict, np.ndarray]:
    header, rows = {}, []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc}") from exc
    body = []
    for line in lines:
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            header[k.strip()] = v.strip()
        elif line.strip():
            body.append(line)
    if not body or [c.strip() for c in body[0].split(",")] != list(names):
        raise InvalidArgument(f"{path}: expected columns {','.join(names)}")
    for lineno, line in enumerate(body[1:], 2):
        parts = line.split(",")
        if len(parts) != len(names):
            raise InvalidArgument(f"{path}: row {lineno} has {len(parts)} fields")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise InvalidArgument(f"{path}: row {lineno} is not numeric") from exc
    return header, np.array(rows, dtype=float).reshape(-1, len(names))


def write_profile_csv(path, p: CharacteristicProfile) -> None:
    _write_table(path, {"t0": float(p.t0), "s_max": float(p.s_max)}, ("s", "fdot", "f"),
                 (p.s, p.fdot, p.f))


def read_profile_csv(path) -> CharacteristicProfile:
    """Read (s, fdot, f); f is kept as the explicit primitive."""
    header, data = _read_table(path, ("s", "fdot", "f"))
    if data.shape[0] < 9:
        raise InvalidArgument(f"{path}: too few samples")
    s_max = float(header.get("s_max", data[-1, 0]))
    t0 = float(header.get("t0", 0.0))
    return CharacteristicProfile(s_max, data[:, 1], t0, data[:, 2])


def write_snapshot_csv(path, s: State) -> None:
    header = {"t": float(s.t), "r_max": float(s.grid.r_max), "n": s.grid.n}
    if s.breaks:
        header["breaks"] = " ".join(_num(b) for b in s.breaks)
    _write_table(path, header, ("r", "u", "ut"), (s.grid.r, s.u, s.ut))


def read_snapshot_csv(path, grid: RadialGrid | None = None) -> State:
    header, data = _read_table(path, ("r", "u", "ut"))
    try:
        t = float(header["t"])
        if grid is None:
            grid = make_grid(float(header["r_max"]), int(header["n"]))
        breaks = tuple(float(b) for b in header.get("breaks", "").split())
    except (KeyError, ValueError) as exc:
        raise InvalidArgument(f"{path}: missing or bad header") from exc
    if data.shape[0] != grid.size:
        raise InvalidArgument(f"{path}: {data.shape[0]} rows for {grid.size} nodes")
    try:
        return State(grid, data[:, 1], data[:, 2], t, breaks)
    except ValueError as exc:
        raise InvalidArgument(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# trajectory directories

def write_trajectory(outdir, traj: Trajectory, chash: str = "", extra_meta: dict | None = None
                     ) -> Path:
    """meta.json, diagnostics.ndjson (one record per step) and snapshots/NNNNNN.csv."""
    out = Path(outdir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    names = list(traj.diagnostics)
    n = len(traj.diagnostics[names[0]]) if names else 0
    recs = []
    for i in range(n):
        rec = {"config_hash": chash, "step": i}
        rec.update({k: traj.diagnostics[k][i] for k in names})
        recs.append(rec)
    write_ndjson(out / "diagnostics.ndjson", recs)
    for k, st in enumerate(traj.states):
        write_snapshot_csv(out / "snapshots" / f"{k:06d}.csv", st)
    meta = {"format": TRAJECTORY_FORMAT, "config_hash": chash,
            "grid": {"r_max": traj.grid.r_max, "n": traj.grid.n}, "dt": traj.dt,
            "snapshot_stride": traj.snapshot_stride, "n_snapshots": len(traj.states),
            "diagnostics": names, "termination": traj.termination,
            "blowup_time": traj.blowup_time, "meta": traj.meta}
    if extra_meta:
        meta.update(extra_meta)
    with open(out / "meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(to_jsonable(meta), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def read_trajectory(outdir) -> Trajectory:
    out = Path(outdir)
    try:
        with open(out / "meta.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        grid = make_grid(float(meta["grid"]["r_max"]), int(meta["grid"]["n"]))
        count = int(meta["n_snapshots"])
        names = list(meta["diagnostics"])
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise InvalidArgument(f"{out}: unreadable trajectory metadata ({exc})") from exc
    states = [read_snapshot_csv(out / "snapshots" / f"{k:06d}.csv", grid) for k in range(count)]
    recs = read_ndjson(out / "diagnostics.ndjson")
    try:
        diags = {k: np.array([float(r[k]) for r in recs]) for k in names}
    except (KeyError, ValueError) as exc:
        raise InvalidArgument(f"{out}: diagnostics do not match metadata") from exc
    bt = meta.get("blowup_time")
    return Trajectory(grid, float(meta["dt"]), int(meta["snapshot_stride"]), states, diags,
                      meta["termination"], None if bt is None else float(bt),
                      dict(meta.get("meta", {})))


__all__ = ["config_hash", "dumps_record", "read_ndjson", "read_profile_csv", "read_snapshot_csv",
           "read_trajectory", "to_jsonable", "write_ndjson", "write_profile_csv",
           "write_snapshot_csv", "write_trajectory"]
