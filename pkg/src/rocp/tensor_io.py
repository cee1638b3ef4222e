"""Binary tensor files.

Layout of one record::

    b"ROCP"                 magic
    uint8                   version (1)
    uint32 LE               N
    N x uint64 LE           extents
    prod(extents) x f64 LE  values, first index fastest

A tensor file holds one record.  A state file holds the records
``p[0..N-2]``, ``q[0..N-2]`` and a 1 x 1 record with the temporal length,
back to back.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import DomainError
from .online import ComplementaryState

__all__ = ["write_tensor", "read_tensor", "save_state", "load_state"]

MAGIC = b"ROCP"
VERSION = 1
_HEADER = struct.Struct("<4sBI")


def _write_record(f, x):
    x = np.asarray(x, dtype=np.float64)
    f.write(_HEADER.pack(MAGIC, VERSION, x.ndim))
    f.write(np.asarray(x.shape, dtype="<u8").tobytes())
    f.write(np.asarray(x, dtype="<f8").tobytes(order="F"))


def _read_record(f):
    head = f.read(_HEADER.size)
    if not head:
        return None
    if len(head) < _HEADER.size:
        raise DomainError("truncated tensor header")
    magic, version, ndim = _HEADER.unpack(head)
    if magic != MAGIC:
        raise DomainError(f"bad magic {magic!r}")
    if version != VERSION:
        raise DomainError(f"unsupported format version {version}")
    raw = f.read(8 * ndim)
    if len(raw) < 8 * ndim:
        raise DomainError("truncated extents")
    dims = tuple(int(d) for d in np.frombuffer(raw, dtype="<u8"))
    count = int(np.prod(dims))
    raw = f.read(8 * count)
    if len(raw) < 8 * count:
        raise DomainError(f"expected {count} values, file is truncated")
    data = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return np.reshape(data, dims, order="F")


def write_tensor(path, x):
    with open(path, "wb") as f:
        _write_record(f, x)


def read_tensor(path) -> np.ndarray:
    with open(path, "rb") as f:
        x = _read_record(f)
        if x is None:
            raise DomainError(f"{path} is empty")
        if f.read(1):
            raise DomainError(f"{path} has trailing data after the tensor")
    return x


def save_state(path, state: ComplementaryState):
    with open(path, "wb") as f:
        for m in state.p + state.q:
            _write_record(f, m)
        _write_record(f, np.array([[state.t_len]], dtype=np.float64))


def load_state(path, s=None) -> ComplementaryState:
    """Read a state written by :func:`save_state`.

    The sample count is not stored and must be supplied when the state
    drives sampled updates.
    """
    records = []
    with open(path, "rb") as f:
        while (rec := _read_record(f)) is not None:
            records.append(rec)
    if len(records) < 3 or len(records) % 2 == 0:
        raise DomainError(f"{path} does not hold a complementary state")
    k = (len(records) - 1) // 2
    p, q, t_len = records[:k], records[k:2 * k], records[-1]
    return ComplementaryState(p=tuple(p), q=tuple(q), t_len=int(t_len[0, 0]), s=s,
                              dims_head=tuple(m.shape[0] for m in p))
