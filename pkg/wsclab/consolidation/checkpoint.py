# -*- coding: utf-8 -*-
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from wsclab.exceptions import FormatError
from wsclab.nn import ParameterSet, build_segments
from wsclab.optim import MomentState

CHECKPOINT_MAGIC = b"WSCK"
CHECKPOINT_VERSION = 1

FLAG_AVERAGE = 0x01
FLAG_MOMENTS = 0x02

_F64 = np.dtype("<f8")


@dataclass(frozen=True)
class Checkpoint:
    theta: ParameterSet
    average: Optional[ParameterSet] = None
    moments: Optional[MomentState] = None

    def __post_init__(self) -> None:
        if self.average is not None:
            self.theta.check_layout(self.average, "checkpoint parameters and average")
        if self.moments is not None:
            self.moments.check_layout(self.theta)


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    theta = checkpoint.theta
    parts = [CHECKPOINT_MAGIC, struct.pack("<HI", CHECKPOINT_VERSION, len(theta.segments))]
    for segment in theta:
        name = segment.name.encode("utf-8")
        parts.append(struct.pack("<H", len(name)))
        parts.append(name)
        parts.append(struct.pack(f"<B{len(segment.shape)}I", len(segment.shape), *segment.shape))

    flags = 0
    if checkpoint.average is not None:
        flags |= FLAG_AVERAGE
    if checkpoint.moments is not None:
        flags |= FLAG_MOMENTS
    moments = checkpoint.moments
    step_count = moments.step_count if moments is not None else 0
    beta1 = moments.beta1 if moments is not None else 0.0
    beta2 = moments.beta2 if moments is not None else 0.0
    parts.append(struct.pack("<BQdd", flags, step_count, beta1, beta2))

    payloads = [theta.flat]
    if checkpoint.average is not None:
        payloads.append(checkpoint.average.flat)
    if moments is not None:
        payloads.extend([moments.m, moments.v])
    parts.extend(payload.astype(_F64, copy=False).tobytes() for payload in payloads)
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes, source: str) -> None:
        self.data = data
        self.source = source
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise FormatError(f"{self.source}: truncated {what}", offset=self.offset)
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str, what: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def floats(self, count: int, what: str) -> np.ndarray:
        return np.frombuffer(self.take(count * _F64.itemsize, what), dtype=_F64).astype(np.float64)


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> Checkpoint:
    reader = _Reader(data, source)
    if reader.take(4, "magic") != CHECKPOINT_MAGIC:
        raise FormatError(f"{source}: not a WSCK checkpoint", offset=0)
    version, count = reader.unpack("<HI", "header")
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{source}: unsupported checkpoint version {version}", offset=4)

    shapes = []
    for _ in range(count):
        (name_len,) = reader.unpack("<H", "segment name length")
        start = reader.offset
        try:
            name = reader.take(name_len, "segment name").decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"{source}: segment name is not utf-8", offset=start) from None
        (rank,) = reader.unpack("<B", "segment rank")
        shapes.append((name, tuple(reader.unpack(f"<{rank}I", "segment dims"))))
    segments = build_segments(shapes)
    size = segments[-1].stop if segments else 0

    flag_offset = reader.offset
    flags, step_count, beta1, beta2 = reader.unpack("<BQdd", "payload flags")
    if flags & ~(FLAG_AVERAGE | FLAG_MOMENTS):
        raise FormatError(f"{source}: unknown payload flags {flags:#04x}", offset=flag_offset)

    theta = ParameterSet(segments, reader.floats(size, "parameter payload"))
    average = ParameterSet(segments, reader.floats(size, "average payload")) if flags & FLAG_AVERAGE else None
    moments = None
    if flags & FLAG_MOMENTS:
        m = reader.floats(size, "first-moment payload")
        v = reader.floats(size, "second-moment payload")
        moments = MomentState(m=m, v=v, step_count=step_count, beta1=beta1, beta2=beta2)
    if reader.offset != len(data):
        raise FormatError(f"{source}: {len(data) - reader.offset} trailing bytes", offset=reader.offset)
    return Checkpoint(theta=theta, average=average, moments=moments)


def save_checkpoint(checkpoint: Checkpoint, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(encode_checkpoint(checkpoint))
    return path


def load_checkpoint(path: str | Path) -> Checkpoint:
    path = Path(path)
    return decode_checkpoint(path.read_bytes(), source=str(path))
