"""File formats.

RLSF dense binary layout (little-endian): magic ``b"RLSF"``, ``u32``
version (1), ``u64`` N, ``u32`` d, then ``N^d`` pairs of ``f64`` (real,
imaginary) in row-major order.  Signal descriptions and representations are
JSON.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .signal_model import GeneratedSignalSpec, SparseRepresentation

MAGIC = b"RLSF"
VERSION = 1
_HEADER = struct.Struct("<4sIQI")


def write_rlsf(path, values) -> None:
    a = np.asarray(values, dtype=np.complex128)
    n = a.shape[0] if a.ndim else 0
    if a.ndim == 0 or len(set(a.shape)) > 1:
        raise FormatError("dense data must be an N^d cube")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, a.ndim))
        fh.write(np.ascontiguousarray(a).astype("<c16").tobytes())


def read_rlsf(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError("file shorter than the RLSF header")
    magic, version, n, d = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError("bad magic")
    if version != VERSION:
        raise FormatError(f"unsupported RLSF version {version}")
    if d < 1:
        raise FormatError("dimension must be positive")
    count = n ** d
    body = raw[_HEADER.size:]
    if len(body) != 16 * count:
        raise FormatError(f"expected {16 * count} payload bytes, found {len(body)}")
    return np.frombuffer(body, dtype="<c16").astype(np.complex128).reshape((n,) * d)


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def save_signal_spec(path, spec: GeneratedSignalSpec) -> None:
    write_json(path, spec.to_dict())


def load_signal_spec(path) -> GeneratedSignalSpec:
    obj = read_json(path)
    try:
        return GeneratedSignalSpec.from_dict(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid signal description: {exc}") from exc


def representation_from_dict(obj: dict) -> SparseRepresentation:
    try:
        n, d = int(obj["n"]), int(obj.get("d", 1))
        modes = [(tuple(int(x) for x in m["freq"]), complex(m["re"], m["im"]))
                 for m in obj["modes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid representation: {exc}") from exc
    return SparseRepresentation(n, d, modes)
