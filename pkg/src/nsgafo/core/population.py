"""Population containers and the nondominated archive."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nsgafo.core.sorting import domination_matrix


@dataclass
class Individual:
    genes: np.ndarray
    objectives: np.ndarray
    violation: float = 0.0
    rank: int = 0
    plane_distance: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.violation <= 0.0


@dataclass
class Population:
    """Column-oriented population: one row per member."""

    genes: np.ndarray
    objectives: np.ndarray
    violation: np.ndarray
    generation: int = 0

    def __len__(self) -> int:
        return len(self.genes)

    def __getitem__(self, i: int) -> Individual:
        return Individual(self.genes[i].copy(), self.objectives[i].copy(), float(self.violation[i]))

    def take(self, idx) -> "Population":
        idx = np.asarray(idx, dtype=int)
        return Population(self.genes[idx], self.objectives[idx], self.violation[idx], self.generation)

    @staticmethod
    def concat(*parts: "Population") -> "Population":
        return Population(
            np.vstack([p.genes for p in parts]),
            np.vstack([p.objectives for p in parts]),
            np.concatenate([p.violation for p in parts]),
            parts[0].generation,
        )

    @property
    def feasible(self) -> np.ndarray:
        return self.violation <= 0.0


def pareto_set(pop: Population) -> Population:
    """Nondominated members, feasible ones only when any member is feasible.

    Exact duplicate objective vectors are kept once (first occurrence).
    """
    feas = np.flatnonzero(pop.feasible)
    if feas.size:
        cand = feas
        D = domination_matrix(pop.objectives[cand])
        keep = cand[~D.any(axis=0)]
    else:
        cv = pop.violation
        keep = np.flatnonzero(cv == cv.min()) if len(pop) else np.zeros(0, dtype=int)
    if keep.size:
        _, first = np.unique(pop.objectives[keep], axis=0, return_index=True)
        keep = keep[np.sort(first)]
    return pop.take(keep)


def update_archive(archive: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Merge new feasible objective vectors into a mutually nondominated archive.

    Incoming points that are dominated by, or equal to, an archive point are
    dropped; archive points dominated by an incoming point are removed.
    """
    if len(new) == 0:
        return archive
    new = new[~domination_matrix(new).any(axis=0)]
    _, first = np.unique(new, axis=0, return_index=True)
    new = new[np.sort(first)]
    if len(archive) == 0:
        return new.copy()
    # a weakly dominates b: a <= b everywhere
    weak = np.all(archive[:, None, :] <= new[None, :, :], axis=2)
    new_ok = ~weak.any(axis=0)
    new = new[new_ok]
    if len(new) == 0:
        return archive
    strict_by_new = np.all(new[:, None, :] <= archive[None, :, :], axis=2) & np.any(
        new[:, None, :] < archive[None, :, :], axis=2
    )
    survivors = archive[~strict_by_new.any(axis=0)]
    return np.vstack([survivors, new])
