"""Binary field snapshots and CSV tables."""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .grid import Field, GridSpec

MAGIC = b"CMDN"
VERSION = 1
_HEADER = struct.Struct("<4sIQdd")

EVOLVE_HEADER = ("t", "rhs_norm", "leak", "i1", "i2", "mass_defect")
SWEEP_HEADER = ("t", "re_z", "im_z", "eps", "re_u", "im_u", "solver_iters", "residual")
REPORT_HEADER = ("t", "i1", "i2", "mass_defect", "x2_norm", "leak", "lb_slack")
SUMMARY_HEADER = ("max_abs_err", "argmax_t", "argmax_z")


def encode_snapshot(u: Field, t: float) -> bytes:
    g = u.grid
    body = np.ascontiguousarray(u.values, dtype="<c16").tobytes()
    return _HEADER.pack(MAGIC, VERSION, g.N, g.L, float(t)) + body


def decode_snapshot(buf: bytes) -> tuple[Field, float]:
    if len(buf) < _HEADER.size:
        raise ValueError("truncated snapshot header")
    magic, version, N, L, t = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    expected = _HEADER.size + 16 * N
    if len(buf) != expected:
        raise ValueError(f"snapshot size {len(buf)} does not match N = {N}")
    values = np.frombuffer(buf, dtype="<c16", offset=_HEADER.size, count=N)
    return Field(GridSpec(L, N), values.astype(complex)), t


def write_snapshot(path, u: Field, t: float) -> None:
    Path(path).write_bytes(encode_snapshot(u, t))


def read_snapshot(path) -> tuple[Field, float]:
    return decode_snapshot(Path(path).read_bytes())


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not np.isfinite(x):
        raise FloatingPointError("non-finite value in CSV row")
    return repr(x)


def write_csv(path, header, rows) -> None:
    """Write rows with round-trippable float formatting; any NaN/inf aborts."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError("row length does not match header")
            w.writerow([_fmt(v) for v in row])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r]
    return header, np.array(rows, dtype=float).reshape(-1, len(header))
