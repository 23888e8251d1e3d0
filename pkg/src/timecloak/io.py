"""Artifact output: CSV traces, binary field dumps, atomic file writes.

Formats:
- CSV: a header row naming the columns, times in column 1, one row per time
  level.  Floats are printed with repr-shortest formatting, so identical runs
  produce identical bytes.
- Binary field dump: magic ``TCLK``, u32 version, u32 flags (bit 0: mask
  channel present), u32 rank, rank u32 dims, then the little-endian float64
  payload in C order, then one u8 per cell of mask if flagged.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

from .wavesolver import BoundaryTrace

MAGIC = b"TCLK"
VERSION = 1
FLAG_MASK = 1


def atomic_write_bytes(path, payload: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never observe a
    truncated artifact."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def trace_to_csv(trace: BoundaryTrace) -> str:
    """One row per time level: time, then dirichlet / normal-derivative /
    force columns for every sample point of every face."""
    header = ["time"]
    blocks = []
    for face in sorted(trace.faces):
        data = trace.faces[face]
        m = data["dirichlet"].shape[1]
        for kind in ("dirichlet", "normal_derivative", "force"):
            header.extend(f"{face}:{kind}[{i}]" for i in range(m))
            blocks.append(data[kind])
    table = np.concatenate([trace.times[:, np.newaxis]] + blocks, axis=1)
    lines = [",".join(header)]
    for row in table:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_trace_csv(path, trace: BoundaryTrace) -> None:
    atomic_write_text(path, trace_to_csv(trace))


def field_to_csv(values: np.ndarray, times: np.ndarray) -> str:
    """Row = time, then the flattened (C-order) spatial values."""
    flat = values.reshape(len(times), -1)
    header = ["time"] + [f"u[{i}]" for i in range(flat.shape[1])]
    lines = [",".join(header)]
    for t, row in zip(times, flat):
        lines.append(repr(float(t)) + "," + ",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def write_field_binary(path, values: np.ndarray, mask: np.ndarray | None = None) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    flags = FLAG_MASK if mask is not None else 0
    head = MAGIC + struct.pack("<III", VERSION, flags, values.ndim)
    head += struct.pack(f"<{values.ndim}I", *values.shape)
    payload = head + values.tobytes()
    if mask is not None:
        payload += np.ascontiguousarray(mask, dtype=np.uint8).tobytes()
    atomic_write_bytes(path, payload)


def read_field_binary(path):
    """Inverse of write_field_binary; returns (values, mask-or-None)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise ValueError("not a timecloak field dump")
    version, flags, rank = struct.unpack_from("<III", raw, 4)
    if version != VERSION:
        raise ValueError(f"unsupported dump version {version}")
    dims = struct.unpack_from(f"<{rank}I", raw, 16)
    offset = 16 + 4 * rank
    count = int(np.prod(dims))
    values = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(dims)
    mask = None
    if flags & FLAG_MASK:
        moff = offset + 8 * count
        mask = (
            np.frombuffer(raw, dtype=np.uint8, count=count, offset=moff)
            .reshape(dims)
            .astype(bool)
        )
    return values.copy(), mask
