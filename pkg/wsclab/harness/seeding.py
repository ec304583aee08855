# -*- coding: utf-8 -*-
from __future__ import annotations

import hashlib

import numpy as np

DATA = "data"
RESET = "reset"
ALIGNMENT = "alignment"


def derive_seed(seed: int, task_id: int, component: str) -> int:
    """Stable 64-bit seed for one (run seed, task, component) stream."""
    digest = hashlib.sha256(f"{seed}:{task_id}:{component}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def derive_rng(seed: int, task_id: int, component: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, task_id, component))
