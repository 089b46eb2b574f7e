"""Temporal statistics of comment arrival series.

All functions work on comment times in hours since the post. The post itself
is not an event, but the series is anchored at tau_0 = 0 where a first gap is
needed (local variation).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import EmptySample, TooFewEvents
from .tree import TimedTree

__all__ = [
    "event_series",
    "local_variation",
    "ActivityCounts",
    "classify_comments",
    "ccdf",
]

EARLY_CUT_H = 6.0
MID_CUT_H = 24.0


def event_series(tree: TimedTree) -> np.ndarray:
    """Comment times sorted ascending (duplicates preserved)."""
    return np.sort(tree.times[1:])


def local_variation(series: np.ndarray) -> float:
    """Local variation LV of an event series.

    LV = 3/(n-1) * sum_i ((g_{i+1} - g_i) / (g_{i+1} + g_i))^2 over successive
    gaps g_i, with tau_0 = 0 prepended. Duplicate timestamps are merged first
    (a zero gap would make a term 0/0); n is the merged event count. Perfectly
    regular series give 0, Poisson series concentrate near 1, bursty series
    exceed 1. Needs n >= 2.
    """
    t = np.unique(np.asarray(series, dtype=np.float64))
    t = t[t > 0.0]
    n = t.shape[0]
    if n < 2:
        raise TooFewEvents(f"local variation needs >= 2 distinct events, got {n}")
    gaps = np.diff(t, prepend=0.0)
    num = np.diff(gaps)
    den = gaps[1:] + gaps[:-1]
    return float(3.0 * np.mean((num / den) ** 2))


class ActivityCounts(NamedTuple):
    early: int  # within 6 h of the post
    mid: int    # (6, 24] h
    late: int   # after 24 h


def classify_comments(tree: TimedTree) -> ActivityCounts:
    """Comment counts in the early/mid/late windows after the post."""
    t = tree.times[1:]
    early = int(np.count_nonzero(t <= EARLY_CUT_H))
    mid = int(np.count_nonzero((t > EARLY_CUT_H) & (t <= MID_CUT_H)))
    return ActivityCounts(early=early, mid=mid, late=t.shape[0] - early - mid)


def ccdf(samples: np.ndarray) -> np.ndarray:
    """Empirical complementary CDF P(X > v) at each distinct sample value.

    Returns an (m, 2) array of (value, tail probability), values ascending.
    The last probability is 0 by construction. Needs at least one sample.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if x.shape[0] == 0:
        raise EmptySample("ccdf needs at least one sample")
    values = np.unique(x)
    above = x.shape[0] - np.searchsorted(x, values, side="right")
    return np.column_stack([values, above / x.shape[0]])
