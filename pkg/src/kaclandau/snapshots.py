"""Binary snapshot persistence.

Layout (all little-endian): magic "KLND", version u32 = 1, particle
count u64, time f64, then 3n velocity components f64 in row order.
Writing then reading reproduces the state bit-exactly.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import SystemState

__all__ = ["MAGIC", "VERSION", "write_snapshot", "read_snapshot",
           "snapshot_bytes", "state_from_bytes"]

MAGIC = b"KLND"
VERSION = 1
_HEADER = struct.Struct("<4sIQd")


def snapshot_bytes(state: SystemState) -> bytes:
    header = _HEADER.pack(MAGIC, VERSION, state.n, state.time)
    body = np.ascontiguousarray(state.velocities,
                                dtype="<f8").tobytes(order="C")
    return header + body


def state_from_bytes(blob: bytes) -> SystemState:
    if len(blob) < _HEADER.size:
        raise ValueError("unexpected end of snapshot")
    magic, version, n, time = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError("bad snapshot magic; not a snapshot file")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    need = _HEADER.size + 24 * n
    if len(blob) < need:
        raise ValueError("unexpected end of snapshot")
    v = np.frombuffer(blob, dtype="<f8", count=3 * n,
                      offset=_HEADER.size).reshape(n, 3)
    return SystemState(v.astype(np.float64, copy=True), time)


def write_snapshot(state: SystemState, path) -> None:
    Path(path).write_bytes(snapshot_bytes(state))


def read_snapshot(path) -> SystemState:
    return state_from_bytes(Path(path).read_bytes())
