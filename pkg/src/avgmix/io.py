"""Serialization helpers: atomic CSV/JSON output, chain import/export,
trajectory persistence."""

import csv
import io
import json
import os
import tempfile

import numpy as np

from .chain import StochasticMatrix
from .errors import ConfigError


def atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, rows, header_lines=()):
    """rows: list of dicts sharing keys. Leading '#' lines carry metadata."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    if rows:
        fieldnames = list(rows[0].keys())
        writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, obj):
    atomic_write_text(path, json.dumps(_jsonable(obj), indent=2) + "\n")


def chain_to_json(P):
    return {"rows": P.rows.tolist()}


def chain_from_json(obj):
    try:
        return StochasticMatrix(np.array(obj["rows"], dtype=float))
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad chain file: {e}")


def load_chain_file(path):
    with open(path, encoding="utf-8") as f:
        return chain_from_json(json.load(f))


def save_trajectory(path, traj):
    """Binary u32 little-endian states plus a JSON sidecar."""
    states = traj.states.astype("<u4")
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(states.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    write_json(path + ".json", {
        "seed": traj.seed,
        "start_mode": traj.start_mode,
        "chain_id": traj.chain_id,
        "pi_residual": traj.pi_residual,
        "n": traj.n,
    })


def load_trajectory(path):
    from .estimation import Trajectory

    with open(path, "rb") as f:
        states = np.frombuffer(f.read(), dtype="<u4").astype(np.int32)
    with open(path + ".json", encoding="utf-8") as f:
        meta = json.load(f)
    return Trajectory(states, meta["seed"], meta["start_mode"],
                      meta["chain_id"], meta.get("pi_residual", 0.0))
