"""Das-Dennis reference points and the normalization state attached to them."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np


def n_reference_points(m: int, p: int) -> int:
    """Number of simplex-lattice points for ``m`` objectives and ``p`` divisions."""
    return comb(m + p - 1, p)


def _compositions(m: int, p: int):
    # all nonnegative integer m-tuples summing to p, lexicographically descending
    if m == 1:
        yield (p,)
        return
    for first in range(p, -1, -1):
        for rest in _compositions(m - 1, p - first):
            yield (first, *rest)


def das_dennis(m: int, p: int) -> np.ndarray:
    """Systematic simplex-lattice points.

    Args:
        m: Number of objectives (>= 2).
        p: Divisions per axis (>= 1).

    Returns:
        Array of shape (H, m) with H = C(m + p - 1, p). Every coordinate is
        k / p for an integer k >= 0 and each row sums to 1.

    Raises:
        ValueError: If ``m < 2`` or ``p < 1``.
    """
    if m < 2:
        raise ValueError(f"need at least 2 objectives, got m={m}")
    if p < 1:
        raise ValueError(f"need at least 1 division, got p={p}")
    counts = np.array(list(_compositions(m, p)), dtype=float)
    return counts / p


def default_population_size(m: int, p: int) -> int:
    """Smallest multiple of 4 that is at least the reference-point count."""
    h = n_reference_points(m, p)
    return max(4, -(-h // 4) * 4)


@dataclass
class ReferenceSet:
    """Reference directions plus the running normalization state.

    ``ideal`` only ever moves toward smaller values. ``extremes`` holds the
    rows last chosen as axis extremes; they are offered again as candidates
    on the next normalization so the hyperplane does not jitter.
    """

    points: np.ndarray
    ideal: np.ndarray | None = None
    extremes: np.ndarray | None = None
    _unit: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        norms = np.linalg.norm(self.points, axis=1, keepdims=True)
        self._unit = self.points / norms

    @classmethod
    def from_divisions(cls, m: int, p: int) -> "ReferenceSet":
        return cls(das_dennis(m, p))

    @property
    def n_obj(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def directions(self) -> np.ndarray:
        """Reference points scaled to unit length."""
        return self._unit

    def copy(self) -> "ReferenceSet":
        return ReferenceSet(
            self.points.copy(),
            None if self.ideal is None else self.ideal.copy(),
            None if self.extremes is None else self.extremes.copy(),
        )
