"""Adaptive objective normalization and hyperplane distance."""

from __future__ import annotations

import numpy as np

from nsgafo.core.reference import ReferenceSet

_DEGENERATE = 1e-12
_ASF_EPS = 1e-6
_MAX_CONDITION = 1e12
_PARALLEL = 1e6


def _intercepts(extremes: np.ndarray, spread: np.ndarray) -> np.ndarray:
    m = extremes.shape[1]
    intercepts = np.full(m, np.nan)
    # numerically singular extremes (repeated or collinear) give no plane
    if np.linalg.cond(extremes) <= _MAX_CONDITION:
        b = np.linalg.solve(extremes, np.ones(m))
        with np.errstate(divide="ignore"):
            intercepts = 1.0 / b
    # a plane (nearly) parallel to an axis has an intercept whose size and
    # even sign are decided by round-off; treat it as unusable
    bad = ~np.isfinite(intercepts) | (intercepts <= _DEGENERATE) | (intercepts > _PARALLEL * np.maximum(spread, _DEGENERATE))
    if bad.any():
        # the hyperplane is unusable as a whole, fall back per axis
        intercepts = spread.copy()
    intercepts[intercepts <= _DEGENERATE] = 1.0
    return intercepts


def normalize(objectives: np.ndarray, refs: ReferenceSet, update: bool = True) -> np.ndarray:
    """Translate by the ideal point and divide by hyperplane intercepts.

    The ideal point stored on ``refs`` is updated to the componentwise
    minimum of itself and the incoming objectives; extreme points are
    recomputed with an achievement scalarizing function, reusing the previous
    extremes as candidates. When the extremes do not span a usable
    hyperplane (condition number above 1e12, or an intercept <= 1e-12 or
    beyond 1e6 times the axis spread) every axis falls back to the
    population's max spread. An axis
    with zero spread is left unscaled, so identical members all normalize
    to zero.

    Args:
        objectives: (n, m) raw objective matrix, n >= 1.
        refs: Reference set carrying the normalization state.
        update: Store the new ideal and extremes on ``refs``.

    Returns:
        (n, m) normalized objectives, all entries >= 0.
    """
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2 or len(F) == 0:
        raise ValueError("normalize needs a non-empty (n, m) objective matrix")

    ideal = F.min(axis=0)
    if refs.ideal is not None:
        ideal = np.minimum(ideal, refs.ideal)
    shifted = F - ideal

    m = F.shape[1]
    weights = np.full((m, m), _ASF_EPS)
    np.fill_diagonal(weights, 1.0)
    candidates = shifted
    if refs.extremes is not None:
        candidates = np.vstack([refs.extremes - ideal, shifted])
    asf = np.max(candidates[None, :, :] / weights[:, None, :], axis=2)
    # near-equal scores count as ties (first candidate wins) so that
    # round-off from a translation cannot flip the choice
    best = asf.min(axis=1, keepdims=True)
    extremes = candidates[np.argmax(asf <= best * (1.0 + 1e-9), axis=1)]

    spread = shifted.max(axis=0)
    intercepts = _intercepts(extremes, spread)

    if update:
        refs.ideal = ideal
        refs.extremes = extremes + ideal
    return np.maximum(shifted / intercepts, 0.0)


def plane_distance(normalized: np.ndarray) -> np.ndarray | float:
    """Distance from normalized objective vector(s) to the plane sum(v) = 1."""
    v = np.asarray(normalized, dtype=float)
    m = v.shape[-1]
    d = np.abs(v.sum(axis=-1) - 1.0) / np.sqrt(m)
    return float(d) if v.ndim == 1 else d
