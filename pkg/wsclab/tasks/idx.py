# -*- coding: utf-8 -*-
from __future__ import annotations

import gzip
import struct
from pathlib import Path
from typing import Tuple

import numpy as np
import numpy.typing as npt

from wsclab.exceptions import ConfigurationError, FormatError
from wsclab.logging import logger

from .stream import ExampleSet, TaskSpec, TaskStream

# IDX type byte -> big-endian numpy dtype
IDX_TYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801


def _read_bytes(path: str | Path) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as gz_file:
            return gz_file.read()
    return path.read_bytes()


def parse_idx(data: bytes, source: str = "<bytes>") -> Tuple[int, npt.NDArray]:
    """Decode an IDX buffer into (magic, array). Raises FormatError carrying the failing byte offset."""
    if len(data) < 4:
        raise FormatError(f"{source}: truncated magic number", offset=len(data))
    zero0, zero1, type_code, ndims = struct.unpack(">4B", data[:4])
    if zero0 != 0 or zero1 != 0 or type_code not in IDX_TYPES:
        raise FormatError(f"{source}: unknown magic number {data[:4].hex()}", offset=0)
    header_len = 4 + 4 * ndims
    if len(data) < header_len:
        raise FormatError(f"{source}: truncated dimension header", offset=len(data))
    dims = struct.unpack(f">{ndims}I", data[4:header_len])
    dtype = IDX_TYPES[type_code]
    expected = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
    payload = len(data) - header_len
    if payload < expected:
        raise FormatError(f"{source}: payload holds {payload} of {expected} bytes", offset=len(data))
    if payload > expected:
        raise FormatError(f"{source}: {payload - expected} trailing bytes after payload", offset=header_len + expected)
    values = np.frombuffer(data, dtype=dtype, count=expected // dtype.itemsize, offset=header_len)
    magic = int.from_bytes(data[:4], "big")
    return magic, values.reshape(dims).astype(dtype.newbyteorder("="))


def read_idx(path: str | Path) -> Tuple[int, npt.NDArray]:
    return parse_idx(_read_bytes(path), source=str(path))


def load_idx_stream(images_path: str | Path, labels_path: str | Path, T: int, seed: int, test_fraction: float = 0.2) -> TaskStream:
    """Build a class-incremental stream from an IDX image/label pair.

    Classes (remapped to 0..C-1 by ascending id) are cut into T contiguous
    groups; the seed shuffles which group each task receives and which
    examples of each class are held out for testing.
    """
    images_magic, images = read_idx(images_path)
    if images_magic != IMAGES_MAGIC:
        raise FormatError(f"{images_path}: expected image magic {IMAGES_MAGIC:#010x}, got {images_magic:#010x}", offset=0)
    labels_magic, labels = read_idx(labels_path)
    if labels_magic != LABELS_MAGIC:
        raise FormatError(f"{labels_path}: expected label magic {LABELS_MAGIC:#010x}, got {labels_magic:#010x}", offset=0)
    if labels.shape[0] != images.shape[0]:
        raise FormatError(f"{labels_path}: {labels.shape[0]} labels for {images.shape[0]} images", offset=4)

    features = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
    class_values, remapped = np.unique(labels.astype(np.int64), return_inverse=True)
    num_classes = class_values.shape[0]
    if T < 1 or num_classes % T != 0:
        raise ConfigurationError(f"{num_classes} classes cannot be split into {T} equal tasks", field="tasks")
    if num_classes < 2:
        raise ConfigurationError("an IDX stream needs at least two classes", field="labels_path")

    rng = np.random.default_rng(seed)
    per_task = num_classes // T
    groups = [tuple(range(g * per_task, (g + 1) * per_task)) for g in range(T)]
    order = rng.permutation(T)

    tasks = []
    for t in range(T):
        class_ids = groups[order[t]]
        train_index, test_index = [], []
        for class_id in class_ids:
            members = np.flatnonzero(remapped == class_id)
            shuffled = members[rng.permutation(members.shape[0])]
            n_test = int(np.floor(test_fraction * members.shape[0]))
            test_index.append(np.sort(shuffled[:n_test]))
            train_index.append(np.sort(shuffled[n_test:]))
        split = {}
        for name, index in (("train", np.concatenate(train_index)), ("test", np.concatenate(test_index))):
            split[name] = ExampleSet(features[index], remapped[index], np.full(index.shape[0], t))
        tasks.append(TaskSpec(task_id=t, class_ids=class_ids, train=split["train"], test=split["test"]))

    logger.info(f"Loaded IDX stream: {images.shape[0]} examples, {num_classes} classes, {T} tasks")
    return TaskStream(tasks=tuple(tasks), num_classes=num_classes, input_dim=features.shape[1])
