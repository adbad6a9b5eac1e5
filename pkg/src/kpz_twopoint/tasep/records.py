"""Binary run-record format for simulation ensembles.

Layout (all integers little-endian):
  magic   b"KPZ2PT-RUNS\\x00"
  u32     header length in bytes
  bytes   UTF-8 JSON header: config echo (rho, t_max, ring_size, n_runs, seed,
          w_list, s_grid), store_counts flag, initial condition, format version
  per run r = 0..n_runs-1:
      eta0   ring_size x uint8
      etaT   ring_size x uint8
      counts ring_size x int64 LE   (only when store_counts)
      n0     int64 LE
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .sim import Ensemble, SimConfig

MAGIC = b"KPZ2PT-RUNS\x00"
VERSION = 1

__all__ = ["write_run_records", "read_run_records"]


def write_run_records(path, ensemble: Ensemble, config: SimConfig) -> None:
    store_counts = ensemble.nt is not None
    header = {
        "version": VERSION,
        "rho": config.rho,
        "t_max": config.t_max,
        "ring_size": ensemble.ring_size,
        "n_runs": ensemble.n_runs,
        "seed": ensemble.seed,
        "w_list": list(config.w_list),
        "s_grid": list(config.s_grid),
        "store_counts": store_counts,
        "initial": ensemble.initial,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for r in range(ensemble.n_runs):
            fh.write(ensemble.eta0[r].astype("u1").tobytes())
            fh.write(ensemble.etaT[r].astype("u1").tobytes())
            if store_counts:
                fh.write(ensemble.nt[r].astype("<i8").tobytes())
            fh.write(struct.pack("<q", int(ensemble.n0[r])))


def read_run_records(path) -> tuple[Ensemble, dict]:
    raw = Path(path).read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise ValueError("not a run-record file (bad magic)")
    off = len(MAGIC)
    (hlen,) = struct.unpack_from("<I", raw, off)
    off += 4
    header = json.loads(raw[off:off + hlen].decode("utf-8"))
    off += hlen
    L = header["ring_size"]
    R = header["n_runs"]
    store_counts = header["store_counts"]
    eta0 = np.empty((R, L), np.uint8)
    etaT = np.empty((R, L), np.uint8)
    nt = np.empty((R, L), np.int64) if store_counts else None
    n0 = np.empty(R, np.int64)
    for r in range(R):
        eta0[r] = np.frombuffer(raw, "u1", L, off)
        off += L
        etaT[r] = np.frombuffer(raw, "u1", L, off)
        off += L
        if store_counts:
            nt[r] = np.frombuffer(raw, "<i8", L, off)
            off += 8 * L
        (n0[r],) = struct.unpack_from("<q", raw, off)
        off += 8
    ens = Ensemble(rho=header["rho"], t=header["t_max"], ring_size=L,
                   seed=header["seed"], n_runs=R, eta0=eta0, etaT=etaT, n0=n0,
                   nt=nt, initial=header.get("initial", "stationary"))
    return ens, header
