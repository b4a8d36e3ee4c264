"""Binary checkpoint format.

Layout (all integers and reals little-endian)::

    b"SYNS"                 magic
    u32                     format version (1)
    u32                     layer count
    per layer:
        u32 fan_in, u32 fan_out
        u8  activation tag  (0 relu, 1 leaky_relu, 2 gelu, 3 identity)
        f64 slope           (only when tag == 1)
        f64[fan_in*fan_out] weights, row-major
        f64[fan_out]        biases
        u8[ceil(fan_in*fan_out/8)]  mask bits, row-major, LSB first
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from ..activations import from_tag
from ..errors import FormatError
from ..network import DenseNetwork, Layer

MAGIC = b"SYNS"
VERSION = 1
_LEAKY_TAG = 1


def to_bytes(net: DenseNetwork) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<II", VERSION, len(net.layers)))
    for layer in net.layers:
        buf.write(struct.pack("<IIB", layer.fan_in, layer.fan_out, layer.activation.tag))
        if layer.activation.tag == _LEAKY_TAG:
            buf.write(struct.pack("<d", layer.activation.slope))
        buf.write(np.ascontiguousarray(layer.weights, dtype="<f8").tobytes())
        buf.write(np.ascontiguousarray(layer.bias, dtype="<f8").tobytes())
        bits = np.packbits(layer.mask.ravel() != 0.0, bitorder="little")
        buf.write(bits.tobytes())
    return buf.getvalue()


def from_bytes(blob: bytes) -> DenseNetwork:
    view = memoryview(blob)
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(view):
            raise FormatError(f"checkpoint truncated at byte offset {pos} (wanted {n} more bytes)")
        chunk = view[pos:pos + n]
        pos += n
        return chunk

    if bytes(take(4)) != MAGIC:
        raise FormatError("not a checkpoint: bad magic")
    version, n_layers = struct.unpack("<II", take(8))
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    layers = []
    for _ in range(n_layers):
        fan_in, fan_out, tag = struct.unpack("<IIB", take(9))
        slope = struct.unpack("<d", take(8))[0] if tag == _LEAKY_TAG else 0.0
        count = fan_in * fan_out
        weights = np.frombuffer(take(8 * count), dtype="<f8").astype(np.float64).reshape(fan_in, fan_out)
        bias = np.frombuffer(take(8 * fan_out), dtype="<f8").astype(np.float64)
        bits = np.frombuffer(take((count + 7) // 8), dtype=np.uint8)
        mask = np.unpackbits(bits, count=count, bitorder="little").astype(np.float64).reshape(fan_in, fan_out)
        layers.append(Layer(weights, bias, mask, from_tag(tag, slope)))
    if pos != len(view):
        raise FormatError(f"{len(view) - pos} trailing bytes after last layer")
    return DenseNetwork(layers)


def save_checkpoint(net: DenseNetwork, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(to_bytes(net))
    return path


def load_checkpoint(path) -> DenseNetwork:
    return from_bytes(Path(path).read_bytes())
