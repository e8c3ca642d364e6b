"""JSON/CSV emission and run manifests."""

from __future__ import annotations

import csv
import datetime as _dt
import enum
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

OUTPUT_ENV = "CRITEXP_OUTPUT_DIR"
DEFAULT_OUTPUT = "critexp-out"


def jsonable(obj):
    """Recursively convert to JSON-safe values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_digest(config) -> str:
    canon = json.dumps(jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def resolve_output_dir(flag=None) -> Path:
    return Path(flag or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                             for v in row])


class RunWriter:
    """Collects the files of one run and writes manifest.json last."""

    def __init__(self, directory, command, config):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.config = config
        self.outputs = []

    def path(self, name):
        p = self.dir / name
        self.outputs.append(str(p))
        return p

    def json(self, name, obj):
        self.path(name).write_text(dumps(obj))

    def csv(self, name, header, rows):
        write_csv(self.path(name), header, rows)

    def finish(self):
        manifest = self.path("manifest.json")
        manifest.write_text(dumps({
            "command": self.command,
            "config_digest": config_digest(self.config),
            "outputs": list(self.outputs),
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }))
        return manifest
