# -*- coding: utf-8 -*-
from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import numpy as np

from wsclab.exceptions import FormatError

from .stream import ExampleSet, TaskSpec, TaskStream

STREAM_HEADER = "WSC-STREAM v1"
SPLITS = ("train", "test")


def _row(task: int, label: int, features) -> str:
    return ",".join([str(task), str(label), *(repr(float(x)) for x in features)])


def dump_stream(stream: TaskStream) -> str:
    lines = [STREAM_HEADER, f"# tasks={len(stream)} classes={stream.num_classes} input_dim={stream.input_dim}"]
    for split in SPLITS:
        lines.append(f"[{split}]")
        for task in stream.tasks:
            examples: ExampleSet = getattr(task, split)
            for features, label in zip(examples.features, examples.labels):
                lines.append(_row(task.task_id, int(label), features))
    return "\n".join(lines) + "\n"


def _parse_meta(line: str) -> Dict[str, int]:
    if not line.startswith("# "):
        raise FormatError("line 2: expected '# tasks=.. classes=.. input_dim=..'")
    meta = {}
    for item in line[2:].split():
        key, _, value = item.partition("=")
        try:
            meta[key] = int(value)
        except ValueError:
            raise FormatError(f"line 2: {key} must be an integer, got {value!r}") from None
    if set(meta) != {"tasks", "classes", "input_dim"}:
        raise FormatError(f"line 2: metadata keys {sorted(meta)}")
    return meta


def load_stream(text: str) -> TaskStream:
    lines = text.splitlines()
    if not lines or lines[0].strip() != STREAM_HEADER:
        raise FormatError(f"line 1: expected header '{STREAM_HEADER}'")
    if len(lines) < 2:
        raise FormatError("line 2: missing metadata")
    meta = _parse_meta(lines[1].strip())
    T, C, D = meta["tasks"], meta["classes"], meta["input_dim"]

    rows: Dict[str, Dict[int, List[List[float]]]] = {split: {t: [] for t in range(T)} for split in SPLITS}
    labels: Dict[str, Dict[int, List[int]]] = {split: {t: [] for t in range(T)} for split in SPLITS}
    split = None
    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            split = line[1:-1]
            if split not in SPLITS:
                raise FormatError(f"line {lineno}: unknown block {line}")
            continue
        if split is None:
            raise FormatError(f"line {lineno}: example row before any [train]/[test] block")
        cells = line.split(",")
        if len(cells) != D + 2:
            raise FormatError(f"line {lineno}: expected {D + 2} fields, got {len(cells)}")
        try:
            task, label = int(cells[0]), int(cells[1])
            features = [float(cell) for cell in cells[2:]]
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        if not 0 <= task < T or not 0 <= label < C:
            raise FormatError(f"line {lineno}: task {task} / label {label} out of range")
        rows[split][task].append(features)
        labels[split][task].append(label)

    tasks = []
    for t in range(T):
        sets = {}
        for name in SPLITS:
            n = len(labels[name][t])
            sets[name] = ExampleSet(np.array(rows[name][t], dtype=np.float64).reshape(n, D), np.array(labels[name][t], dtype=np.int64), np.full(n, t))
        class_ids = tuple(sorted(set(labels["train"][t]) | set(labels["test"][t])))
        tasks.append(TaskSpec(task_id=t, class_ids=class_ids, train=sets["train"], test=sets["test"]))
    return TaskStream(tasks=tuple(tasks), num_classes=C, input_dim=D)


def save_stream_file(stream: TaskStream, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_stream(stream), encoding="utf-8")
    return path


def load_stream_file(path: str | Path) -> TaskStream:
    return load_stream(Path(path).read_text(encoding="utf-8"))
