"""Binary table containers, JSONL trajectories and CSV exports.

Table layout: 8-byte little-endian header length, a UTF-8 JSON header with
sorted keys, then the payload (row-major little-endian float64, or packed
bits for masks).
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import GameSpec
from .dual import ConjugateTable
from .primal import ValueTable
from .reach import FeasibilityMask
from .sim import TrajectoryRecord

VERSION = "osig-table-v1"


def _header(spec: GameSpec, kind: str, shape, **extra) -> dict:
    h = {"version": VERSION, "kind": kind, "name": spec.name, "K": float(spec.K),
         "tau": float(spec.tau), "horizon": float(spec.grid.horizon), "steps": int(spec.L),
         "lattice": spec.lattice.describe(), "shape": [int(s) for s in shape]}
    h.update(extra)
    return h


def write_container(path, header: dict, payload: bytes):
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(head)))
        fh.write(head)
        fh.write(payload)


def read_container(path):
    """(header dict, raw payload bytes)."""
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise ValueError(f"{path}: truncated table file")
    (n,) = struct.unpack("<Q", data[:8])
    header = json.loads(data[8:8 + n].decode("utf-8"))
    if header.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported table version {header.get('version')!r}")
    return header, data[8 + n:]


def _floats(header, payload) -> np.ndarray:
    arr = np.frombuffer(payload, dtype="<f8")
    shape = tuple(header["shape"])
    if arr.size != int(np.prod(shape)):
        raise ValueError("payload size does not match the header shape")
    return arr.reshape(shape).copy()


def _bits(header, payload) -> np.ndarray:
    shape = tuple(header["shape"])
    n = int(np.prod(shape))
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), count=n)
    return bits.astype(bool).reshape(shape)


def save_mask(path, mask: FeasibilityMask, spec: GameSpec):
    f = np.ascontiguousarray(mask.feasible, dtype=bool)
    write_container(path, _header(spec, "mask", f.shape), np.packbits(f.reshape(-1)).tobytes())


def save_values(path, table: ValueTable):
    v = np.ascontiguousarray(table.values, dtype="<f8")
    h = _header(table.spec, "value", v.shape, belief_count=table.beliefs.count)
    write_container(path, h, v.tobytes())


def save_conjugate(path, table: ConjugateTable):
    v = np.ascontiguousarray(table.values, dtype="<f8")
    h = _header(table.spec, "conjugate", v.shape, dual_lattice=table.lattice.describe())
    write_container(path, h, v.tobytes())


def load_array(path):
    """(header, array) for any table kind."""
    header, payload = read_container(path)
    arr = _bits(header, payload) if header["kind"] == "mask" else _floats(header, payload)
    return header, arr


def save_array(path, header: dict, arr: np.ndarray):
    """Inverse of load_array."""
    if header["kind"] == "mask":
        payload = np.packbits(np.asarray(arr, bool).reshape(-1)).tobytes()
    else:
        payload = np.ascontiguousarray(arr, dtype="<f8").tobytes()
    write_container(path, header, payload)


def _check_header(header: dict, spec: GameSpec, kind: str):
    if header["kind"] != kind:
        raise ValueError(f"expected a {kind} table, found {header['kind']}")
    want = _header(spec, kind, header["shape"])
    for key in ("K", "tau", "steps", "lattice"):
        if header[key] != want[key]:
            raise ValueError(f"table {key} {header[key]!r} does not match the game ({want[key]!r})")


def load_mask(path, spec: GameSpec) -> FeasibilityMask:
    header, arr = load_array(path)
    _check_header(header, spec, "mask")
    return FeasibilityMask(arr, spec.lattice)


def load_values(path, spec: GameSpec, mask: FeasibilityMask) -> ValueTable:
    header, arr = load_array(path)
    _check_header(header, spec, "value")
    if header["belief_count"] != spec.belief_count:
        raise ValueError("belief lattice of the table differs from the game")
    return ValueTable(spec, arr, mask, spec.belief_lattice())


def load_conjugate(path, spec: GameSpec, mask: FeasibilityMask) -> ConjugateTable:
    header, arr = load_array(path)
    _check_header(header, spec, "conjugate")
    lat = spec.dual_lattice()
    if header["dual_lattice"] != lat.describe():
        raise ValueError("dual lattice of the table differs from the game")
    return ConjugateTable(spec, arr, mask, lat)


# ----------------------------------------------------------------------------
# trajectories and CSV


def write_jsonl(path, records: Iterable[TrajectoryRecord]):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_jsonl(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [TrajectoryRecord.from_json(line) for line in fh if line.strip()]


def fmt(x) -> str:
    """Twelve significant digits for floats; other values as str."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError("row length does not match the header")
            w.writerow([fmt(v) for v in row])


def trajectory_rows(records: Sequence[TrajectoryRecord]):
    """Long-format rows (run, step, time, state..., u..., v..., p0, ph..., flags)."""
    rows = []
    for run, r in enumerate(records):
        for k in range(r.L + 1):
            u = r.p1_actions[k] if k < r.L else [None] * len(r.p1_actions[0])
            v = r.p2_actions[k] if k < r.L else [None] * len(r.p2_actions[0])
            ph = r.duals[k] if r.duals[k] is not None else [None, None]
            flags = "|".join(r.flags[k]) if k < r.L else ""
            rows.append([run, k, r.times[k], *r.states[k], *u, *v, r.beliefs[k][0], *ph,
                         flags, r.type, r.payoff])
    return rows


def trajectory_columns(rec: TrajectoryRecord) -> list:
    d, nu, nv = len(rec.states[0]), len(rec.p1_actions[0]), len(rec.p2_actions[0])
    return (["run", "step", "time"] + [f"x{i}" for i in range(d)] + [f"u{i}" for i in range(nu)]
            + [f"v{i}" for i in range(nv)] + ["p0", "ph0", "ph1", "flags", "type", "payoff"])
