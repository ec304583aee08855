# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np
import numpy.typing as npt

from wsclab.exceptions import ShapeError

Tensor = npt.NDArray[np.float64]


@dataclass(frozen=True)
class Segment:
    name: str
    shape: Tuple[int, ...]
    offset: int

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    @property
    def stop(self) -> int:
        return self.offset + self.size

    @property
    def slice(self) -> slice:
        return slice(self.offset, self.stop)


def build_segments(shapes: list[tuple[str, Tuple[int, ...]]]) -> Tuple[Segment, ...]:
    segments = []
    offset = 0
    for name, shape in shapes:
        segment = Segment(name=name, shape=tuple(int(d) for d in shape), offset=offset)
        segments.append(segment)
        offset = segment.stop
    return tuple(segments)


class ParameterSet:
    """Flat float64 buffer partitioned into named, contiguous layer segments.

    Operations in this package never mutate a ParameterSet they receive; they
    return new instances sharing the segment table.
    """

    __slots__ = ("segments", "flat", "_index")

    def __init__(self, segments: Tuple[Segment, ...], flat: Tensor) -> None:
        flat = np.ascontiguousarray(flat, dtype=np.float64)
        expected = segments[-1].stop if segments else 0
        if flat.ndim != 1 or flat.shape[0] != expected:
            raise ShapeError(f"flat buffer of length {flat.size} does not cover a layout of {expected} coordinates")
        self.segments = segments
        self.flat = flat
        self._index = {segment.name: segment for segment in segments}

    @classmethod
    def zeros(cls, segments: Tuple[Segment, ...]) -> "ParameterSet":
        return cls(segments, np.zeros(segments[-1].stop if segments else 0))

    def __len__(self) -> int:
        return self.flat.shape[0]

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __repr__(self) -> str:
        layout = ", ".join(f"{s.name}{list(s.shape)}" for s in self.segments)
        return f"ParameterSet({layout})"

    @property
    def layout(self) -> Tuple[Tuple[str, Tuple[int, ...], int], ...]:
        return tuple((s.name, s.shape, s.offset) for s in self.segments)

    def segment(self, name: str) -> Segment:
        try:
            return self._index[name]
        except KeyError:
            raise ShapeError(f"no segment named '{name}'") from None

    def view(self, name: str) -> Tensor:
        segment = self.segment(name)
        return self.flat[segment.slice].reshape(segment.shape)

    def copy(self) -> "ParameterSet":
        return ParameterSet(self.segments, self.flat.copy())

    def with_flat(self, flat: Tensor) -> "ParameterSet":
        return ParameterSet(self.segments, flat)

    def zeros_like(self) -> "ParameterSet":
        return ParameterSet(self.segments, np.zeros_like(self.flat))

    def same_layout(self, other: "ParameterSet") -> bool:
        return self.layout == other.layout

    def check_layout(self, other: "ParameterSet", what: str = "parameter sets") -> None:
        if not self.same_layout(other):
            raise ShapeError(f"{what} have different segment layouts: {self!r} vs {other!r}")


def check_flat(flat: Tensor, params: ParameterSet, what: str) -> None:
    if flat.shape != params.flat.shape:
        raise ShapeError(f"{what} of shape {flat.shape} does not match {len(params)} parameters")
