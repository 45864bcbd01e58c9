"""Binary tensor ("CCTF") and checkpoint ("CCKP") containers.

CCTF layout, little-endian throughout::

    b"CCTF" | u32 version | u32 rank | u64 dims[rank] | float64 payload (row-major)
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO, Mapping

import numpy as np
import orjson

from ..errors import FormatError

TENSOR_MAGIC = b"CCTF"
TENSOR_VERSION = 1
CHECKPOINT_MAGIC = b"CCKP"
CHECKPOINT_VERSION = 1


def write_tensor_to(fh: BinaryIO, array: np.ndarray) -> None:
    data = np.ascontiguousarray(array, dtype="<f8")
    fh.write(TENSOR_MAGIC)
    fh.write(struct.pack("<II", TENSOR_VERSION, data.ndim))
    fh.write(struct.pack(f"<{data.ndim}Q", *data.shape))
    fh.write(data.tobytes(order="C"))


def read_tensor_from(fh: BinaryIO) -> np.ndarray:
    magic = fh.read(4)
    if magic != TENSOR_MAGIC:
        raise FormatError(f"bad tensor magic {magic!r}")
    header = fh.read(8)
    if len(header) != 8:
        raise FormatError("truncated tensor header")
    version, rank = struct.unpack("<II", header)
    if version != TENSOR_VERSION:
        raise FormatError(f"unsupported tensor version {version}")
    dims_raw = fh.read(8 * rank)
    if len(dims_raw) != 8 * rank:
        raise FormatError("truncated tensor dims")
    dims = struct.unpack(f"<{rank}Q", dims_raw)
    count = int(np.prod(dims, dtype=np.int64)) if rank else 1
    payload = fh.read(8 * count)
    if len(payload) != 8 * count:
        raise FormatError(f"truncated tensor payload: expected {count} values")
    return np.frombuffer(payload, dtype="<f8").reshape(dims).astype(np.float64)


def write_tensor(path: Path, array: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        write_tensor_to(fh, array)


def read_tensor(path: Path) -> np.ndarray:
    with path.open("rb") as fh:
        return read_tensor_from(fh)


def write_checkpoint(path: Path, header: Mapping[str, object], tensors: Mapping[str, np.ndarray]) -> None:
    """Write a JSON header followed by named tensors in insertion order."""
    meta = dict(header)
    meta["tensors"] = [{"name": name, "shape": list(t.shape)} for name, t in tensors.items()]
    blob = orjson.dumps(meta, option=orjson.OPT_SORT_KEYS)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<IQ", CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        for tensor in tensors.values():
            write_tensor_to(fh, tensor)


def read_checkpoint(path: Path) -> tuple[dict[str, object], dict[str, np.ndarray]]:
    with path.open("rb") as fh:
        if fh.read(4) != CHECKPOINT_MAGIC:
            raise FormatError(f"{path} is not a checkpoint file")
        version, size = struct.unpack("<IQ", fh.read(12))
        if version != CHECKPOINT_VERSION:
            raise FormatError(f"unsupported checkpoint version {version}")
        header = orjson.loads(fh.read(size))
        tensors: dict[str, np.ndarray] = {}
        for entry in header.pop("tensors"):
            array = read_tensor_from(fh)
            if list(array.shape) != list(entry["shape"]):
                raise FormatError(f"shape mismatch for tensor {entry['name']}")
            tensors[entry["name"]] = array
    return header, tensors
