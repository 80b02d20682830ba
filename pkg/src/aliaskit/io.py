"""Binary serialization of alias tables and weight sets.

Table files: magic ``ALT1``, row count as little-endian u64, total mass as
little-endian f64, then per row (threshold f64, 1-based alias u64).
Weight files: magic ``WTS1``, count as little-endian u64, then f64 weights.
Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .model import AliasTable, WeightSet, make_weight_set

TABLE_MAGIC = b"ALT1"
WEIGHTS_MAGIC = b"WTS1"

_ROW_DTYPE = np.dtype([("tw", "<f8"), ("alias", "<u8")])


class FormatError(ValueError):
    pass


def save_table(t: AliasTable, path) -> None:
    rows = np.empty(t.n, dtype=_ROW_DTYPE)
    rows["tw"] = t.tw
    rows["alias"] = t.alias
    with open(path, "wb") as f:
        f.write(TABLE_MAGIC)
        f.write(struct.pack("<Q", t.n))
        f.write(struct.pack("<d", t.total))
        f.write(rows.tobytes())


def load_table(path) -> AliasTable:
    data = Path(path).read_bytes()
    if len(data) < 20 or data[:4] != TABLE_MAGIC:
        raise FormatError(f"{path}: not an alias-table file")
    (n,) = struct.unpack_from("<Q", data, 4)
    (total,) = struct.unpack_from("<d", data, 12)
    body = data[20:]
    if len(body) != n * _ROW_DTYPE.itemsize:
        raise FormatError(f"{path}: expected {n} rows, file is truncated or padded")
    rows = np.frombuffer(body, dtype=_ROW_DTYPE)
    alias = rows["alias"].astype(np.int64)
    if n and (alias.min() < 1 or alias.max() > n):
        raise FormatError(f"{path}: alias indices outside 1..{n}")
    return AliasTable(tw=rows["tw"].copy(), alias=alias, n=int(n), total=total)


def save_weights(w, path) -> None:
    arr = w.weights if isinstance(w, WeightSet) else np.asarray(w, dtype=np.float64)
    with open(path, "wb") as f:
        f.write(WEIGHTS_MAGIC)
        f.write(struct.pack("<Q", arr.size))
        f.write(arr.astype("<f8").tobytes())


def load_weights(path) -> WeightSet:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != WEIGHTS_MAGIC:
        raise FormatError(f"{path}: not a weights file")
    (n,) = struct.unpack_from("<Q", data, 4)
    body = data[12:]
    if len(body) != n * 8:
        raise FormatError(f"{path}: expected {n} weights, file is truncated or padded")
    return make_weight_set(np.frombuffer(body, dtype="<f8").copy())
