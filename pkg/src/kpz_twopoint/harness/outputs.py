"""Deterministic emission: CSV (15 significant digits) and JSON reports.

Every emitted file starts with the full manifest so any number in it can be
reproduced from the file alone.  Nothing time-dependent is ever written.
"""

from __future__ import annotations

import json
from pathlib import Path

from .config import RunManifest

__all__ = ["write_csv", "write_json_report", "write_manifest"]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        return format(x, ".15g")
    return str(x)


def write_csv(path, columns: list[str], rows, manifest: RunManifest) -> Path:
    path = Path(path)
    lines = [f"# manifest {manifest.to_json()}",
             f"# manifest_sha256 {manifest.digest}",
             ",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError("row length does not match the column header")
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json_report(path, payload: dict, manifest: RunManifest) -> Path:
    path = Path(path)
    doc = {"manifest": json.loads(manifest.to_json()),
           "manifest_sha256": manifest.digest}
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_manifest(out_dir, manifest: RunManifest) -> Path:
    path = Path(out_dir) / "manifest.json"
    path.write_text(manifest.to_json() + "\n", encoding="utf-8")
    return path
