"""Deterministic binary container: magic, JSON header, zlib-compressed arrays.

``np.savez`` embeds zip timestamps, so byte-identical reruns need our own format.
"""
from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path
from typing import Mapping

import numpy as np

MAGIC = b"ASLGCNT1"


def dump_container(header: Mapping, arrays: Mapping[str, np.ndarray]) -> bytes:
    index = []
    blobs = []
    for name in sorted(arrays):
        a = np.ascontiguousarray(arrays[name])
        if a.dtype.byteorder == ">":
            a = a.astype(a.dtype.newbyteorder("<"))
        raw = zlib.compress(a.tobytes(), 6)
        index.append({"name": name, "dtype": a.dtype.str, "shape": list(a.shape), "nbytes": len(raw)})
        blobs.append(raw)
    meta = json.dumps({"header": header, "arrays": index}, sort_keys=True,
                      separators=(",", ":"), ensure_ascii=False).encode("utf-8")
    return MAGIC + struct.pack("<Q", len(meta)) + meta + b"".join(blobs)


def load_container(data: bytes) -> tuple[dict, dict[str, np.ndarray]]:
    if not data.startswith(MAGIC):
        raise ValueError("not an aslgen container")
    (n,) = struct.unpack_from("<Q", data, len(MAGIC))
    pos = len(MAGIC) + 8
    meta = json.loads(data[pos:pos + n].decode("utf-8"))
    pos += n
    arrays = {}
    for entry in meta["arrays"]:
        raw = zlib.decompress(data[pos:pos + entry["nbytes"]])
        pos += entry["nbytes"]
        arrays[entry["name"]] = np.frombuffer(raw, dtype=np.dtype(entry["dtype"])).reshape(entry["shape"]).copy()
    return meta["header"], arrays


def write_container(path: str | Path, header: Mapping, arrays: Mapping[str, np.ndarray]) -> None:
    Path(path).write_bytes(dump_container(header, arrays))


def read_container(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    return load_container(Path(path).read_bytes())
