"""Reference-direction niching survival (environmental selection)."""

from __future__ import annotations

import numpy as np

from nsgafo.core.normalization import normalize
from nsgafo.core.reference import ReferenceSet
from nsgafo.core.sorting import fast_nondominated_sort


def associate(normalized: np.ndarray, refs: ReferenceSet) -> tuple[np.ndarray, np.ndarray]:
    """Nearest reference direction and perpendicular distance for each row."""
    W = refs.directions
    proj = normalized @ W.T
    # |f|^2 - (f.w)^2 with unit w, clipped against round-off
    sq = np.sum(normalized**2, axis=1, keepdims=True) - proj**2
    dist = np.sqrt(np.maximum(sq, 0.0))
    niche = np.argmin(dist, axis=1)
    return niche, dist[np.arange(len(normalized)), niche]


def niching_select(
    objectives: np.ndarray,
    violation: np.ndarray,
    refs: ReferenceSet,
    target: int,
    rng: np.random.Generator,
    forced: np.ndarray | None = None,
) -> np.ndarray:
    """Pick ``target`` survivors from a merged population.

    Members listed in ``forced`` always survive and count toward niche
    occupancy. The others are admitted front by front; the front that does
    not fit whole is thinned by niche count: the least crowded reference
    direction (random among ties) takes its closest member when empty, a
    random associated member otherwise.

    Returns:
        Sorted indices of the survivors.
    """
    F = np.asarray(objectives, dtype=float)
    cv = np.asarray(violation, dtype=float)
    n = len(F)
    forced = np.zeros(0, dtype=int) if forced is None else np.asarray(forced, dtype=int)
    if target > n:
        raise ValueError(f"cannot select {target} survivors from {n} members")
    if len(forced) > target:
        raise ValueError("more forced members than survivors")
    if target == n:
        return np.arange(n)

    free_mask = np.ones(n, dtype=bool)
    free_mask[forced] = False
    free = np.flatnonzero(free_mask)
    need = target - len(forced)

    chosen: list[int] = []
    last: list[int] = []
    for front in fast_nondominated_sort(F[free], cv[free]):
        members = free[front].tolist()
        if len(chosen) + len(members) <= need:
            chosen.extend(members)
            if len(chosen) == need:
                break
        else:
            last = members
            break

    if not last:
        return np.sort(np.concatenate([forced, np.array(chosen, dtype=int)]))

    pool = np.concatenate([forced, np.array(chosen, dtype=int), np.array(last, dtype=int)])
    normed = normalize(F[pool], refs)
    niche, dist = associate(normed, refs)
    n_fixed = len(forced) + len(chosen)

    rho = np.bincount(niche[:n_fixed], minlength=len(refs))
    cand_niche = niche[n_fixed:]
    cand_dist = dist[n_fixed:]
    alive = np.ones(len(last), dtype=bool)
    open_ref = np.ones(len(refs), dtype=bool)
    picked: list[int] = []

    remaining = need - len(chosen)
    while len(picked) < remaining:
        counts = np.where(open_ref, rho, np.iinfo(rho.dtype).max)
        ties = np.flatnonzero(counts == counts.min())
        j = ties[rng.integers(len(ties))]
        members = np.flatnonzero(alive & (cand_niche == j))
        if members.size == 0:
            open_ref[j] = False
            continue
        if rho[j] == 0:
            k = members[np.argmin(cand_dist[members])]
        else:
            k = members[rng.integers(members.size)]
        picked.append(last[k])
        alive[k] = False
        rho[j] += 1

    return np.sort(np.concatenate([forced, np.array(chosen + picked, dtype=int)]))
