"""Focused / non-focused operator screening and adaptive variation rates."""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, exp, pi

import numpy as np


def screen_focused(
    distances: np.ndarray, focused_count: int, nonfocused_count: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split members by their hyperplane distance.

    The ``focused_count`` members closest to the hyperplane are promoted,
    the ``nonfocused_count`` farthest are dropped, and everyone else is the
    remainder. Ties go to the lower member index in both directions.

    Args:
        distances: Hyperplane distance per member.
        focused_count: Members promoted straight into the next generation.
        nonfocused_count: Members excluded from this generation.

    Returns:
        ``(focused, excluded, remainder)`` index arrays. ``focused`` is in
        ascending distance order, ``excluded`` in descending distance order,
        ``remainder`` in ascending index order.

    Raises:
        ValueError: If the counts are negative or leave no remainder.
    """
    d = np.asarray(distances, dtype=float)
    n = len(d)
    if focused_count < 0 or nonfocused_count < 0:
        raise ValueError("screening counts must be nonnegative")
    if focused_count + nonfocused_count >= n:
        raise ValueError(
            f"screening {focused_count}+{nonfocused_count} members of {n} leaves no remainder"
        )
    idx = np.arange(n)
    ascending = np.lexsort((idx, d))
    descending = np.lexsort((idx, -d))
    focused = ascending[:focused_count]
    keep = np.ones(n, dtype=bool)
    keep[focused] = False
    # on ties the two ends can meet; a focused member is never also excluded
    excluded = descending[keep[descending]][:nonfocused_count]
    keep[excluded] = False
    return focused, excluded, idx[keep]


@dataclass(frozen=True)
class RateState:
    """Bounds on crossover / mutation probability plus population fitness stats."""

    pc_max: float
    pc_min: float
    pm_max: float
    pm_min: float
    f_bar: float
    f_max: float
    f_min: float

    def __post_init__(self):
        if not (0.0 <= self.pc_min <= self.pc_max <= 1.0):
            raise ValueError("need 0 <= pc_min <= pc_max <= 1")
        if not (0.0 <= self.pm_min <= self.pm_max <= 1.0):
            raise ValueError("need 0 <= pm_min <= pm_max <= 1")

    @classmethod
    def from_fitness(cls, fitness, pc_max, pc_min, pm_max, pm_min) -> "RateState":
        f = np.asarray(fitness, dtype=float)
        return cls(pc_max, pc_min, pm_max, pm_min, float(f.mean()), float(f.max()), float(f.min()))


def _adapt(hi: float, lo: float, f_bar: float, f_max: float, f_min: float) -> float:
    if f_max > f_bar:
        return hi
    denom = f_bar - f_min
    if denom == 0.0:
        return hi
    ratio = (f_bar - f_max) / denom
    rate = hi - (hi - lo) / (1.0 + exp(cos(ratio * pi)))
    return min(max(rate, lo), hi)


def adaptive_rates(state: RateState) -> tuple[float, float]:
    """Crossover and mutation probabilities from the population fitness spread.

    When the best fitness exceeds the mean both rates stay at their maxima;
    otherwise each is pulled toward its minimum by a logistic-of-cosine
    factor of (f_bar - f_max) / (f_bar - f_min). A zero denominator also
    returns the maxima. Results are clamped to [min, max].
    """
    s = state
    pc = _adapt(s.pc_max, s.pc_min, s.f_bar, s.f_max, s.f_min)
    pm = _adapt(s.pm_max, s.pm_min, s.f_bar, s.f_max, s.f_min)
    return pc, pm
