# -*- coding: utf-8 -*-
from __future__ import annotations

from typing import Iterable, Optional

import numpy as np
import numpy.typing as npt

from wsclab.datastructures import ResetConfig
from wsclab.enum import RankingScope
from wsclab.exceptions import DomainError, ShapeError
from wsclab.nn import HEAD, ParameterSet

from .importance import ImportanceVector

IndexSet = npt.NDArray[np.int64]


def reset_quota(eligible: int, retain_fraction: float) -> int:
    """floor((1 - q) * eligible), robust to the representation error of 1 - q."""
    return int(np.floor((1.0 - retain_fraction) * eligible + 1e-9))


def eligible_mask(layout: ParameterSet, seen_classes: Optional[Iterable[int]] = None) -> npt.NDArray[np.bool_]:
    """Coordinates open to scoring and reset: everything except head rows of classes not seen before this task."""
    mask = np.ones(len(layout), dtype=bool)
    if seen_classes is None:
        return mask
    seen = np.zeros(layout.segment(f"{HEAD}.bias").size, dtype=bool)
    seen[np.asarray(list(seen_classes), dtype=np.int64)] = True
    weight = layout.segment(f"{HEAD}.weight")
    bias = layout.segment(f"{HEAD}.bias")
    mask[weight.slice] = np.repeat(seen, weight.shape[1])
    mask[bias.slice] = seen
    return mask


def _lowest(scores: np.ndarray, candidates: IndexSet, k: int) -> IndexSet:
    # stable sort keeps the lower flat index first among equal scores
    order = np.argsort(scores[candidates], kind="stable")
    return candidates[order[:k]]


def find_dormant_params(
    scores: ImportanceVector,
    cfg: ResetConfig,
    layout: ParameterSet,
    seen_classes: Optional[Iterable[int]] = None,
) -> IndexSet:
    """Flat indices of the (1 - q) fraction of eligible coordinates with the lowest scores, ascending."""
    if not 0.0 <= cfg.retain_fraction <= 1.0:
        raise DomainError("retain fraction must lie in [0, 1]")
    if len(scores) != len(layout):
        raise ShapeError(f"{len(scores)} scores for {len(layout)} parameters")
    values = scores.scores
    mask = eligible_mask(layout, seen_classes if cfg.exclude_unseen_head else None)
    total = reset_quota(int(mask.sum()), cfg.retain_fraction)
    if total == 0:
        return np.zeros(0, dtype=np.int64)

    if cfg.ranking_scope is RankingScope.GLOBAL:
        chosen = _lowest(values, np.flatnonzero(mask), total)
        return np.sort(chosen)

    candidates = [np.flatnonzero(mask[s.slice]) + s.offset for s in layout]
    exact = np.array([(1.0 - cfg.retain_fraction) * c.shape[0] for c in candidates])
    quotas = np.floor(exact + 1e-9).astype(np.int64)
    # hand the leftover slots to the segments with the largest fractional remainder
    leftover = total - int(quotas.sum())
    if leftover > 0:
        remainder = exact - quotas
        room = np.array([c.shape[0] for c in candidates]) - quotas
        order = [i for i in np.argsort(-remainder, kind="stable") if room[i] > 0]
        for i in order[:leftover]:
            quotas[i] += 1
    chosen = [_lowest(values, c, int(k)) for c, k in zip(candidates, quotas) if k > 0]
    return np.sort(np.concatenate(chosen)) if chosen else np.zeros(0, dtype=np.int64)
