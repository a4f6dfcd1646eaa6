"""Binary checkpoint container.

Layout: magic "DARF", u32 version=1, then per-tensor records until EOF:
u16 name length, name bytes (utf-8), u8 rank, rank x u64 dims, payload as
little-endian float32. EMA shadow tensors are stored under an "ema/" name
prefix; free-form metadata under "meta/".
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"DARF"
VERSION = 1


class CheckpointError(Exception):
    pass


def _write_tensor(fh, name: str, array: np.ndarray):
    nb = name.encode("utf-8")
    if len(nb) > 0xFFFF:
        raise CheckpointError(f"tensor name too long: {name!r}")
    arr = np.asarray(array, dtype="<f4", order="C")
    fh.write(struct.pack("<H", len(nb)))
    fh.write(nb)
    fh.write(struct.pack("<B", arr.ndim))
    for d in arr.shape:
        fh.write(struct.pack("<Q", d))
    fh.write(arr.tobytes())


def _read_exact(fh, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise CheckpointError("truncated checkpoint file")
    return buf


def save_tensors(path, tensors: dict[str, np.ndarray]):
    """Write named float tensors; names are written in sorted order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        for name in sorted(tensors):
            _write_tensor(fh, name, tensors[name])


def load_tensors(path) -> dict[str, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    out: dict[str, np.ndarray] = {}
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise CheckpointError(f"{path}: bad magic, not a checkpoint file")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        while True:
            head = fh.read(2)
            if not head:
                break
            (nlen,) = struct.unpack("<H", head)
            name = _read_exact(fh, nlen).decode("utf-8")
            (rank,) = struct.unpack("<B", _read_exact(fh, 1))
            dims = struct.unpack(f"<{rank}Q", _read_exact(fh, 8 * rank)) if rank else ()
            count = int(np.prod(dims)) if dims else 1
            payload = _read_exact(fh, 4 * count)
            out[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
    return out


def pack_hash(hex_digest: str) -> np.ndarray:
    """Encode a hex digest as a float tensor for the meta/ namespace."""
    return np.frombuffer(bytes.fromhex(hex_digest), dtype=np.uint8).astype(np.float32)


def unpack_hash(array: np.ndarray) -> str:
    return bytes(np.asarray(array).astype(np.uint8)).hex()
