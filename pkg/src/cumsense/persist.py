"""Plot-ready CSV and JSON output with a provenance header.

Every CSV starts with one ``#`` comment line carrying the hash of the
configuration that produced it. Floats are written with ``%.17g`` so they
round-trip exactly, and nothing time-dependent is recorded, which keeps
repeated runs byte-identical.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = ["config_hash", "format_value", "write_csv", "read_csv", "write_json", "write_manifest"]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, columns, rows, config: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={config_hash(config)} kind={config.get('kind', '')}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(v) for v in row])
    return path


def read_csv(path):
    """``(header comment, column names, rows as lists of str)``."""
    with open(path, newline="") as fh:
        comment = fh.readline().rstrip("\n")
        rows = list(csv.reader(fh))
    return comment, rows[0], rows[1:]


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")
    return path


def write_manifest(out_dir, config: dict, files, version: str) -> Path:
    return write_json(
        Path(out_dir) / "manifest.json",
        {
            "config": config,
            "config_hash": config_hash(config),
            "seed": config.get("seed"),
            "version": version,
            "files": sorted(Path(f).name for f in files),
        },
    )
