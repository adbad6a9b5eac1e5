"""Flat key-value run configuration and the run manifest.

Config files are `key = value` lines (units spelled out in key names, e.g.
t_max, ring_size).  Values: int, float, bool, bare strings, comma lists, and
lo:hi:step range expressions (inclusive endpoints up to rounding).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["parse_value", "load_config", "RunManifest"]

COMMANDS = ("simulate", "limit-dist", "finite-dist", "verify", "scaling")


def parse_value(text: str):
    text = text.strip()
    if not text:
        return ""
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if "," in text:
        return [parse_value(tok) for tok in text.split(",") if tok.strip()]
    if ":" in text:
        parts = text.split(":")
        if len(parts) == 3:
            try:
                lo, hi, step = (float(p) for p in parts)
                n = int(round((hi - lo) / step)) + 1
                return [round(lo + k * step, 12) for k in range(n)]
            except ValueError:
                pass
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def load_config(path) -> dict:
    out: dict = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = parse_value(val)
    return out


@dataclass
class RunManifest:
    """Everything needed to reproduce one invocation byte-for-byte."""

    command: str
    parameters: dict
    output_dir: str
    seed: int
    input_sha256: str = ""
    package_version: str = ""

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}; choose from {COMMANDS}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "command": self.command,
                "parameters": _plain(self.parameters),
                "output_dir": str(self.output_dir),
                "seed": int(self.seed),
                "input_sha256": self.input_sha256,
                "package_version": self.package_version,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    return obj


def manifest_for(command: str, config_path, params: dict, out_dir, seed: int,
                 version: str) -> RunManifest:
    blob = Path(config_path).read_bytes() if config_path else b""
    return RunManifest(
        command=command,
        parameters=params,
        output_dir=str(out_dir),
        seed=int(seed),
        input_sha256=hashlib.sha256(blob).hexdigest(),
        package_version=version,
    )
