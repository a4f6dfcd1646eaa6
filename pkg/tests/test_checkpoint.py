"""Binary checkpoint container round-trips and layout."""

import struct

import numpy as np
import pytest

from stemdiff import nnkit as nk


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    tensors = {
        "enc.w": rng.normal(size=(3, 4)).astype(np.float32),
        "enc.b": rng.normal(size=4).astype(np.float32),
        "scalar": np.float32(2.5).reshape(()),
    }
    path = tmp_path / "model.ckpt"
    nk.save_tensors(path, tensors)
    back = nk.load_tensors(path)
    assert set(back) == set(tensors)
    for name in tensors:
        assert np.array_equal(back[name], tensors[name])
        assert back[name].dtype == np.float32


def test_binary_layout(tmp_path):
    path = tmp_path / "one.ckpt"
    nk.save_tensors(path, {"w": np.array([[1.0, 2.0]], dtype=np.float32)})
    raw = path.read_bytes()
    assert raw[:4] == b"DARF"
    assert struct.unpack("<I", raw[4:8])[0] == 1
    nlen = struct.unpack("<H", raw[8:10])[0]
    assert nlen == 1 and raw[10:11] == b"w"
    rank = raw[11]
    assert rank == 2
    dims = struct.unpack("<2Q", raw[12:28])
    assert dims == (1, 2)
    payload = np.frombuffer(raw[28:36], dtype="<f4")
    assert np.array_equal(payload, [1.0, 2.0])
    assert len(raw) == 36


def test_ema_prefix_and_prefer_ema(tmp_path):
    class Tiny(nk.Module):
        def __init__(self):
            self.w = nk.Parameter(np.ones((2, 2), dtype=np.float32), "w")

    model = Tiny()
    shadow = {"w": np.full((2, 2), 0.5, dtype=np.float32)}
    path = tmp_path / "tiny.ckpt"
    model.save(path, ema_shadow=shadow)
    names = set(nk.load_tensors(path))
    assert names == {"w", "ema/w"}

    fresh = Tiny()
    fresh.load(path, prefer_ema=True)
    assert np.all(fresh.w.value == 0.5)
    fresh.load(path, prefer_ema=False)
    assert np.all(fresh.w.value == 1.0)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(nk.CheckpointError, match="magic"):
        nk.load_tensors(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        nk.load_tensors(tmp_path / "absent.ckpt")


def test_hash_pack_round_trip():
    digest = "a3" * 16
    assert nk.unpack_hash(nk.pack_hash(digest)) == digest
