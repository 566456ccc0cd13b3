"""Persistence: delimited series, manifests and stored trajectories."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .evolve import Status, Trajectory
from .grid import Frame


def fmt(x):
    """Shortest round-trip decimal representation."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def series_columns(k_max):
    return (["tau"] + [f"Hk_{k}" for k in range(k_max + 1)]
            + [f"norm_{k}" for k in range(k_max + 1)]
            + ["l2", "linf", "decay_product", "support_radius"])


def report_row(report, k_max):
    return ([report.tau] + [report.Hk[k] for k in range(k_max + 1)]
            + [report.energy_norm[k] for k in range(k_max + 1)]
            + [report.l2, report.linf, report.decay_product, report.support_radius])


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Return (header, columns) with every column parsed to a float array where possible."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in body]
        try:
            cols[name] = np.array([float(v) if v != "" else np.nan for v in vals])
        except ValueError:
            cols[name] = vals
    return header, cols


def atomic_write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def save_trajectory(path, traj: Trajectory, config_dict=None):
    phi, pi = traj.stacked()
    np.savez_compressed(
        path, taus=traj.taus, phi=phi, pi=pi, dt=traj.dt,
        frame=traj.frame.value, status=traj.status.value,
        blowup_tau=np.nan if traj.blowup_tau is None else traj.blowup_tau,
        config=json.dumps(config_dict or {}, sort_keys=True, default=str),
    )
    return Path(path)


def load_trajectory(path):
    """Return ``(trajectory, config_dict)``."""
    with np.load(path, allow_pickle=False) as z:
        bt = float(z["blowup_tau"])
        traj = Trajectory.from_arrays(
            z["taus"], z["phi"], z["pi"], float(z["dt"]), Frame(str(z["frame"])),
            status=Status(str(z["status"])), blowup_tau=None if np.isnan(bt) else bt,
        )
        cfg = json.loads(str(z["config"]))
    return traj, cfg
