"""Constrained non-dominated sorting (minimization)."""

from __future__ import annotations

import numpy as np


def domination_matrix(objectives: np.ndarray, violation: np.ndarray | None = None) -> np.ndarray:
    """Boolean matrix ``D`` with ``D[i, j]`` true when member i dominates member j.

    Feasible members (violation == 0) dominate every infeasible member;
    two infeasible members compare by violation alone; two feasible members
    compare by Pareto dominance.
    """
    F = np.asarray(objectives, dtype=float)
    n = len(F)
    if violation is None:
        violation = np.zeros(n)
    cv = np.asarray(violation, dtype=float)

    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    pareto = le & lt

    feas = cv <= 0.0
    both_feasible = feas[:, None] & feas[None, :]
    feas_beats_infeas = feas[:, None] & ~feas[None, :]
    both_infeasible = ~feas[:, None] & ~feas[None, :]
    less_violation = cv[:, None] < cv[None, :]

    return (both_feasible & pareto) | feas_beats_infeas | (both_infeasible & less_violation)


def fast_nondominated_sort(
    objectives: np.ndarray, violation: np.ndarray | None = None
) -> list[list[int]]:
    """Partition members into fronts under constrained domination.

    Returns a list of fronts, each a sorted list of member indices. Front 0
    holds the members no other member dominates. An empty input gives [].
    """
    F = np.asarray(objectives, dtype=float)
    n = len(F)
    if n == 0:
        return []
    D = domination_matrix(F, violation)
    counts = D.sum(axis=0)
    fronts: list[list[int]] = []
    current = np.flatnonzero(counts == 0)
    while current.size:
        fronts.append(current.tolist())
        counts = counts - D[current].sum(axis=0)
        counts[current] = -1
        current = np.flatnonzero(counts == 0)
    return fronts


def ranks_from_fronts(fronts: list[list[int]], n: int) -> np.ndarray:
    rank = np.empty(n, dtype=int)
    for r, front in enumerate(fronts):
        rank[front] = r
    return rank


def nondominated_mask(objectives: np.ndarray) -> np.ndarray:
    """Mask of rows not Pareto-dominated by any other row (duplicates all kept)."""
    F = np.asarray(objectives, dtype=float)
    if len(F) == 0:
        return np.zeros(0, dtype=bool)
    D = domination_matrix(F)
    return ~D.any(axis=0)
