"""Binary snapshots of a reasoning state.

Layout (all integers little-endian)::

    offset  size  field
    0       5     magic  b"MSDL1"
    5       2     u16    format version (currently 1)
    7       8     u64    payload length in bytes
    15      4     u32    CRC-32 of the payload
    19      n     payload: pickle (protocol 4) of the state dict

The state dict holds the program (rules and symbol table), the scheme
configuration, the round counter and the scheme registry. Snapshots are
only written between rounds. Loading runs :mod:`pickle`, so only load files
you produced yourself.
"""
from __future__ import annotations

import pickle
import struct
import zlib
from pathlib import Path

from .engine import Reasoner
from .syntax import DatalogError

MAGIC = b"MSDL1"
VERSION = 1
_HEADER = struct.Struct("<5sHQI")


class SnapshotError(DatalogError):
    pass


def dumps(reasoner: Reasoner) -> bytes:
    state = {
        "program": reasoner.program,
        "config": reasoner.config,
        "round": reasoner.round,
        "registry": reasoner.registry,
        "runs": reasoner.runs,
    }
    payload = pickle.dumps(state, protocol=4)
    return _HEADER.pack(MAGIC, VERSION, len(payload), zlib.crc32(payload)) + payload


def loads(data: bytes) -> Reasoner:
    if len(data) < _HEADER.size:
        raise SnapshotError("snapshot truncated")
    magic, version, length, crc = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError("not a snapshot file (bad magic)")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    payload = data[_HEADER.size:]
    if len(payload) != length:
        raise SnapshotError("snapshot truncated")
    if zlib.crc32(payload) != crc:
        raise SnapshotError("snapshot checksum mismatch")
    state = pickle.loads(payload)
    r = Reasoner.__new__(Reasoner)
    r.program = state["program"]
    r.config = state["config"]
    r.round = state["round"]
    r.registry = state["registry"]
    r.runs = state["runs"]
    r.verbose = False
    r.trace = None
    r.max_rounds = None
    for s in r.registry.schemes:
        s.registry = r.registry
    return r


def save(reasoner: Reasoner, path: str | Path) -> None:
    Path(path).write_bytes(dumps(reasoner))


def load(path: str | Path) -> Reasoner:
    return loads(Path(path).read_bytes())
