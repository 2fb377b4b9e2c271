"""Dense numeric kernel: float64 arrays, seeded RNG, binary tensor files.

All numeric state in this package is a C-contiguous ``numpy.ndarray`` of
float64 (checkpoint and dataset files may store float32, see ``write_lmt``).
Public operations validate that results are finite: NaN or Inf anywhere is a
contract violation and raises instead of propagating silently.
"""

from __future__ import annotations

import hashlib
import struct
from typing import BinaryIO

import numpy as np

from .errors import DimensionError, IntegrityError

__all__ = [
    "as_tensor",
    "ensure_finite",
    "matmul",
    "apply_activation",
    "sigmoid",
    "tanh",
    "SeededRng",
    "write_lmt",
    "read_lmt",
    "LMT1_MAGIC",
    "LMD1_MAGIC",
]

# Magic prefixes for the binary tensor format: "LMT1" carries float32
# payloads (dataset frames, embeddings), "LMD1" is the float64 twin used
# inside checkpoints where bit-exact parameter round trips are required.
LMT1_MAGIC = b"LMT1"
LMD1_MAGIC = b"LMD1"


def as_tensor(data) -> np.ndarray:
    """Coerce to a C-contiguous float64 array and verify finiteness."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    ensure_finite(arr, "as_tensor")
    return arr


def ensure_finite(arr: np.ndarray, context: str) -> np.ndarray:
    """Raise DimensionError-style contract violation on NaN/Inf values."""
    if not np.isfinite(arr).all():
        bad = int(np.size(arr) - np.isfinite(arr).sum())
        raise DimensionError(
            f"{context}: {bad} non-finite element(s) in tensor of shape {arr.shape}"
        )
    return arr


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with explicit shape checking.

    Raises DimensionError naming both shapes when inner dimensions differ.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: incompatible shapes {a.shape} x {b.shape}")
    out = a @ b
    return ensure_finite(out, "matmul")


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function.

    Uses the branch form so large negative inputs underflow to 0 instead of
    overflowing exp().
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(np.asarray(x, dtype=np.float64))


_ACTIVATIONS = {"sigmoid": sigmoid, "tanh": tanh}


def apply_activation(x: np.ndarray, kind: str) -> np.ndarray:
    """Elementwise sigmoid or tanh; preserves shape."""
    try:
        fn = _ACTIVATIONS[kind]
    except KeyError:
        raise ValueError(f"unknown activation {kind!r}; expected 'sigmoid' or 'tanh'")
    return ensure_finite(fn(x), f"apply_activation[{kind}]")


class SeededRng:
    """Reproducible random stream (PCG64) with deterministic substreams.

    Identical seeds produce bytewise-identical streams on every platform.
    ``derive`` builds an independent child stream from the parent seed plus
    string/int keys, so parallel consumers (trees of a forest, epochs of a
    training loop) can draw without racing each other.
    """

    def __init__(self, seed: int, _keys: tuple[int, ...] = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._keys = _keys
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, *_keys]))
        )

    def derive(self, *keys: int | str) -> "SeededRng":
        ints = tuple(_key_to_int(k) for k in keys)
        return SeededRng(self.seed, self._keys + ints)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, keys={self._keys})"


def _key_to_int(key: int | str) -> int:
    if isinstance(key, int):
        return key & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2s(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def write_lmt(fh: BinaryIO, arr: np.ndarray, dtype: str = "f32") -> int:
    """Append one tensor record; returns the number of bytes written.

    Layout: magic, u32-LE rank, rank x u64-LE dims, row-major little-endian
    IEEE floats. ``dtype`` selects the LMT1 (float32) or LMD1 (float64)
    record flavor.
    """
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    ensure_finite(arr, "write_lmt")
    if dtype == "f32":
        magic, payload = LMT1_MAGIC, arr.astype("<f4").tobytes()
    elif dtype == "f64":
        magic, payload = LMD1_MAGIC, arr.astype("<f8").tobytes()
    else:
        raise ValueError(f"dtype must be 'f32' or 'f64', got {dtype!r}")
    header = magic + struct.pack("<I", arr.ndim) + struct.pack(f"<{arr.ndim}Q", *arr.shape)
    fh.write(header)
    fh.write(payload)
    return len(header) + len(payload)


def read_lmt(fh: BinaryIO) -> np.ndarray:
    """Read one tensor record written by ``write_lmt``; returns float64."""
    magic = fh.read(4)
    if magic == LMT1_MAGIC:
        itemsize, np_dtype = 4, "<f4"
    elif magic == LMD1_MAGIC:
        itemsize, np_dtype = 8, "<f8"
    else:
        raise IntegrityError(f"bad tensor magic {magic!r}")
    raw_rank = fh.read(4)
    if len(raw_rank) != 4:
        raise IntegrityError("truncated tensor header (rank)")
    rank = struct.unpack("<I", raw_rank)[0]
    if rank > 8:
        raise IntegrityError(f"implausible tensor rank {rank}")
    raw_dims = fh.read(8 * rank)
    if len(raw_dims) != 8 * rank:
        raise IntegrityError("truncated tensor header (dims)")
    shape = struct.unpack(f"<{rank}Q", raw_dims)
    count = int(np.prod(shape, dtype=np.uint64)) if rank else 1
    payload = fh.read(itemsize * count)
    if len(payload) != itemsize * count:
        raise IntegrityError(
            f"truncated tensor payload: expected {itemsize * count} bytes, got {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype=np_dtype, count=count).astype(np.float64)
    return ensure_finite(arr.reshape(shape), "read_lmt")
